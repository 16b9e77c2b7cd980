#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "agentex/cli.hpp"
#include "agentex/hardness.hpp"
#include "agentex/instance_io.hpp"
#include "agentex/line.hpp"
#include "agentex/oracle.hpp"
#include "agentex/tree.hpp"

#include <sstream>

namespace py = pybind11;
using namespace agentex;

namespace {

// Python int, Fraction or "p/q" string. Floats are refused so every value stays exact.
Rational to_rational(const py::handle& value) {
  if (py::isinstance<py::float_>(value)) throw py::type_error("floats are not exact; pass int, Fraction or 'p/q'");
  try {
    return parse_rational(py::str(value).cast<std::string>());
  } catch (const std::invalid_argument& e) {
    throw py::value_error(e.what());
  }
}

py::object to_fraction(const Rational& value) {
  static py::object fraction = py::module_::import("fractions").attr("Fraction");
  return fraction(py::int_(py::str(value.get_num().get_str())), py::int_(py::str(value.get_den().get_str())));
}

py::list fractions(const std::vector<Rational>& values) {
  py::list out;
  for (const auto& v : values) out.append(to_fraction(v));
  return out;
}

LineInstance make_line(const py::sequence& positions, const py::sequence& energies) {
  LineInstance inst;
  for (auto p : positions) inst.positions.push_back(to_rational(p));
  for (auto e : energies) inst.energies.push_back(to_rational(e));
  check_line(inst);
  return inst;
}

Network parse_tree(const std::string& text) {
  Instance inst = io::parse_instance(text);
  if (inst.kind != InstanceKind::Tree) throw InvalidInstance("expected a tree instance");
  return inst.network;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact solvers for energy-constrained mobile agents";

  py::register_exception<Error>(m, "AgentexError", PyExc_ValueError);
  py::register_exception<InvalidInstance>(m, "InvalidInstance", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<oracle::BudgetExhausted>(m, "BudgetExhausted", PyExc_RuntimeError);

  m.def("forward_potentials", [](const py::sequence& pos, const py::sequence& en) {
    return fractions(line::forward_potentials(make_line(pos, en)));
  });
  m.def("backward_potentials", [](const py::sequence& pos, const py::sequence& en) {
    return fractions(line::backward_potentials(make_line(pos, en)));
  });
  m.def("broadcast_potentials", [](const py::sequence& pos, const py::sequence& en) {
    return fractions(line::broadcast_potentials(make_line(pos, en)));
  });
  m.def("broadcast_potentials_back", [](const py::sequence& pos, const py::sequence& en) {
    return fractions(line::broadcast_potentials_back(make_line(pos, en)));
  });

  m.def(
      "delivery_decide",
      [](const py::sequence& pos, const py::sequence& en, const py::handle& source, const py::handle& target) {
        const auto d = line::delivery_decide(make_line(pos, en), to_rational(source), to_rational(target));
        return py::make_tuple(d.feasible, to_fraction(d.value));
      },
      py::arg("positions"), py::arg("energies"), py::arg("source"), py::arg("target"),
      "(feasible, surplus or minus the deficit at the target)");

  m.def(
      "plan_delivery",
      [](const py::sequence& pos, const py::sequence& en, const py::handle& source, const py::handle& target) {
        return io::to_json(line::plan_delivery(make_line(pos, en), to_rational(source), to_rational(target))).dump();
      },
      py::arg("positions"), py::arg("energies"), py::arg("source"), py::arg("target"),
      "Delivery schedule as a JSON document.");

  m.def("convergecast_decide", [](const py::sequence& pos, const py::sequence& en) {
    const auto d = line::convergecast_decide(make_line(pos, en));
    py::object cut = d.cut ? py::object(py::int_(*d.cut)) : py::none();
    return py::make_tuple(d.feasible, cut, to_fraction(d.surplus));
  });

  m.def("broadcast_set", [](const py::sequence& pos, const py::sequence& en) {
    return line::broadcast_set(make_line(pos, en));
  });

  m.def(
      "broadcast_schedule",
      [](const py::sequence& pos, const py::sequence& en, int source) {
        return io::to_json(line::broadcast_schedule(make_line(pos, en), source)).dump();
      },
      py::arg("positions"), py::arg("energies"), py::arg("source"));

  m.def(
      "validate",
      [](const std::string& instance, const std::string& schedule) {
        const Instance inst = io::parse_instance(instance);
        const auto doc = io::Json::parse(schedule);
        oracle::ValidationReport r;
        if (inst.kind == InstanceKind::Line) {
          if (!inst.line_task) throw InvalidInstance("instance has no task");
          r = oracle::validate_schedule(inst.line, *inst.line_task, io::line_schedule_from(doc));
        } else {
          if (!inst.net_task) throw InvalidInstance("instance has no task");
          r = oracle::validate_schedule(inst.network, *inst.net_task, io::net_schedule_from(inst.network, doc));
        }
        py::dict out;
        out["ok"] = r.ok;
        out["task_achieved"] = r.task_achieved;
        out["surplus"] = to_fraction(r.surplus_at_target);
        out["violation"] = r.violation ? py::object(py::str(r.violation->reason)) : py::none();
        return out;
      },
      py::arg("instance"), py::arg("schedule"), "Replays a JSON schedule against a JSON instance with a task.");

  m.def(
      "edge_potentials",
      [](const std::string& tree) {
        const auto pot = tree::all_edge_potentials(parse_tree(tree));
        py::list out;
        for (std::size_t e = 0; 2 * e < pot.value.size(); ++e)
          out.append(py::make_tuple(to_fraction(pot.toward_v(static_cast<int>(e))),
                                    to_fraction(pot.toward_u(static_cast<int>(e)))));
        return out;
      },
      "Per edge: (energy gathered at u from u's side, energy gathered at v from v's side).");

  m.def("tree_convergecast", [](const std::string& tree) {
    const auto r = tree::convergecast_points(parse_tree(tree));
    py::list intervals;
    for (const auto& e : r.edges)
      if (e.interval) intervals.append(py::make_tuple(e.edge, to_fraction(e.interval->first), to_fraction(e.interval->second)));
    return py::make_tuple(r.feasible, intervals);
  });

  m.def("tree_broadcast_sources", [](const std::string& tree) { return tree::broadcast_sources(parse_tree(tree)); });

  m.def("partition_exists", &oracle::partition_exists);
  m.def("analytic_feasible", &hardness::analytic_feasible);

  m.def(
      "run",
      [](const std::vector<std::string>& args, const std::string& input) {
        std::istringstream in(input);
        std::ostringstream out, err;
        const int code = cli::run(args, in, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), py::arg("stdin") = "", "Runs a command-line invocation; returns (exit code, stdout, stderr).");
}
