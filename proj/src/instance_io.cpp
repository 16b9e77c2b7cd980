#include "agentex/instance_io.hpp"

#include <algorithm>
#include <cctype>

namespace agentex::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw InvalidInstance("malformed document: " + what); }

const Json& field(const Json& obj, const char* name) {
  if (!obj.is_object() || !obj.contains(name)) fail(std::string("missing field '") + name + "'");
  return obj.at(name);
}

int int_from(const Json& value, const char* what) {
  if (!value.is_number_integer()) fail(std::string(what) + " must be an integer");
  return value.get<int>();
}

std::string id_from(const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  fail("node ids must be strings or integers");
}

bool looks_integer(const std::string& s) {
  if (s.empty() || s.size() > 15) return false;
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size() || (s[i] == '0' && s.size() > i + 1)) return false;
  return std::all_of(s.begin() + i, s.end(), [](unsigned char c) { return std::isdigit(c); });
}

Json id_json(const std::string& name) {
  if (looks_integer(name)) return std::stoll(name);
  return name;
}

int node_from(const Network& net, const Json& value) {
  const int k = net.find_node(id_from(value));
  if (k < 0) fail("unknown node '" + id_from(value) + "'");
  return k;
}

InstanceKind kind_from(const std::string& text) {
  if (text == "line") return InstanceKind::Line;
  if (text == "tree") return InstanceKind::Tree;
  if (text == "graph") return InstanceKind::Graph;
  if (text == "digraph") return InstanceKind::Digraph;
  fail("unknown kind '" + text + "'");
}

}  // namespace

Json to_json(const Rational& value) {
  if (value.get_den() == 1 && value.get_num().fits_slong_p()) return value.get_num().get_si();
  return to_string(value);
}

Rational rational_from(const Json& value) {
  if (value.is_number_integer()) return Rational(value.get<long>());
  if (value.is_string()) {
    try {
      return parse_rational(value.get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  fail("expected an integer or a \"p/q\" string, got " + value.dump());
}

Json point_json(const Network& net, const NetPoint& p) {
  if (p.is_node()) return id_json(net.nodes.at(p.node));
  return Json{{"edge", p.edge}, {"offset", to_json(p.offset)}};
}

NetPoint point_from(const Network& net, const Json& value) {
  if (value.is_object()) {
    NetPoint p = NetPoint::on_edge(int_from(field(value, "edge"), "edge"), rational_from(field(value, "offset")));
    return canonical(net, p);
  }
  return NetPoint::at_node(node_from(net, value));
}

namespace {

LineTask line_task_from(const Json& doc) {
  LineTask task;
  task.kind = parse_task_kind(field(doc, "type").get<std::string>());
  if (task.kind == TaskKind::Delivery) {
    task.source = rational_from(field(doc, "source"));
    task.target = rational_from(field(doc, "target"));
  } else if (task.kind == TaskKind::Convergecast) {
    if (doc.contains("target")) task.point = rational_from(doc.at("target"));
  } else if (doc.contains("source")) {
    task.source_agent = int_from(doc.at("source"), "broadcast source");
  }
  return task;
}

NetTask net_task_from(const Network& net, const Json& doc) {
  NetTask task;
  task.kind = parse_task_kind(field(doc, "type").get<std::string>());
  if (task.kind == TaskKind::Delivery) {
    task.source = point_from(net, field(doc, "source"));
    task.target = point_from(net, field(doc, "target"));
  } else if (task.kind == TaskKind::Convergecast) {
    if (doc.contains("target")) task.point = point_from(net, doc.at("target"));
  } else if (doc.contains("source")) {
    task.source_agent = int_from(doc.at("source"), "broadcast source");
  }
  return task;
}

}  // namespace

Instance instance_from_json(const Json& doc) {
  if (!doc.is_object()) fail("instance must be an object");
  Instance inst;
  inst.kind = kind_from(field(doc, "kind").get<std::string>());
  const Json& agents = field(doc, "agents");
  if (!agents.is_array()) fail("agents must be an array");

  if (inst.kind == InstanceKind::Line) {
    for (const auto& a : agents)
      inst.line.push_back({rational_from(field(a, "position")), rational_from(field(a, "energy"))});
    collapse(inst.line);  // validates
    if (doc.contains("task")) {
      inst.line_task = line_task_from(doc.at("task"));
      if (inst.line_task->source_agent &&
          (*inst.line_task->source_agent < 0 || *inst.line_task->source_agent >= static_cast<int>(inst.line.size())))
        throw InvalidInstance("broadcast source agent out of range");
    }
    return inst;
  }

  Network& net = inst.network;
  const Json& nodes = field(doc, "nodes");
  if (!nodes.is_array()) fail("nodes must be an array");
  for (const auto& n : nodes) net.nodes.push_back(id_from(n));
  for (std::size_t i = 0; i < net.nodes.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (net.nodes[i] == net.nodes[j]) throw InvalidInstance("duplicate node id '" + net.nodes[i] + "'");
  const Json& edges = doc.contains("edges") ? doc.at("edges") : Json::array();
  if (!edges.is_array()) fail("edges must be an array");
  for (const auto& e : edges) {
    Edge edge{node_from(net, field(e, "u")), node_from(net, field(e, "v")), rational_from(field(e, "length")),
              inst.kind == InstanceKind::Digraph};
    if (e.contains("directed")) edge.directed = e.at("directed").get<bool>();
    net.edges.push_back(std::move(edge));
  }
  for (const auto& a : agents) net.agents.push_back({node_from(net, field(a, "node")), rational_from(field(a, "energy"))});
  if (inst.kind == InstanceKind::Tree)
    check_tree(net);
  else
    check_network(net);
  if (doc.contains("task")) {
    inst.net_task = net_task_from(net, doc.at("task"));
    if (inst.net_task->source_agent &&
        (*inst.net_task->source_agent < 0 || *inst.net_task->source_agent >= net.agent_count()))
      throw InvalidInstance("broadcast source agent out of range");
  }
  return inst;
}

Instance parse_instance(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    fail(e.what());
  }
  try {
    return instance_from_json(doc);
  } catch (const Json::exception& e) {
    fail(e.what());
  }
}

Json line_instance_json(const LineInstance& inst) {
  Json agents = Json::array();
  for (std::size_t i = 0; i < inst.size(); ++i)
    agents.push_back({{"position", to_json(inst.positions[i])}, {"energy", to_json(inst.energies[i])}});
  return Json{{"kind", "line"}, {"agents", agents}};
}

Json network_json(const Network& net, InstanceKind kind) {
  Json nodes = Json::array(), edges = Json::array(), agents = Json::array();
  for (const auto& n : net.nodes) nodes.push_back(id_json(n));
  for (const auto& e : net.edges) {
    Json edge{{"u", id_json(net.nodes[e.u])}, {"v", id_json(net.nodes[e.v])}, {"length", to_json(e.length)}};
    if (e.directed != (kind == InstanceKind::Digraph)) edge["directed"] = e.directed;
    edges.push_back(std::move(edge));
  }
  for (const auto& a : net.agents) agents.push_back({{"node", id_json(net.nodes[a.node])}, {"energy", to_json(a.energy)}});
  return Json{{"kind", kind_name(kind)}, {"nodes", nodes}, {"edges", edges}, {"agents", agents}};
}

Json task_json(const LineTask& task) {
  Json out{{"type", task_name(task.kind)}};
  if (task.kind == TaskKind::Delivery) {
    out["source"] = to_json(task.source);
    out["target"] = to_json(task.target);
  }
  if (task.point) out["target"] = to_json(*task.point);
  if (task.source_agent) out["source"] = *task.source_agent;
  return out;
}

Json task_json(const Network& net, const NetTask& task) {
  Json out{{"type", task_name(task.kind)}};
  if (task.kind == TaskKind::Delivery) {
    out["source"] = point_json(net, task.source);
    out["target"] = point_json(net, task.target);
  }
  if (task.point) out["target"] = point_json(net, *task.point);
  if (task.source_agent) out["source"] = *task.source_agent;
  return out;
}

Json to_json(const Instance& inst) {
  Json out;
  if (inst.kind == InstanceKind::Line) {
    Json agents = Json::array();
    for (const auto& a : inst.line) agents.push_back({{"position", to_json(a.position)}, {"energy", to_json(a.energy)}});
    out = Json{{"kind", "line"}, {"agents", agents}};
    if (inst.line_task) out["task"] = task_json(*inst.line_task);
  } else {
    out = network_json(inst.network, inst.kind);
    if (inst.net_task) out["task"] = task_json(inst.network, *inst.net_task);
  }
  return out;
}

Json to_json(const LineSchedule& schedule) {
  Json steps = Json::array();
  for (const auto& step : schedule.steps) {
    if (const auto* m = std::get_if<LineMove>(&step)) {
      Json path = Json::array();
      for (const auto& x : m->path) path.push_back(to_json(x));
      steps.push_back({{"move", {{"agent", m->agent}, {"path", path}}}});
    } else {
      const auto& t = std::get<Transfer>(step);
      steps.push_back({{"transfer", {{"from", t.from}, {"to", t.to}, {"amount", to_json(t.amount)}}}});
    }
  }
  return Json{{"steps", steps}};
}

Json to_json(const Network& net, const NetSchedule& schedule) {
  Json steps = Json::array();
  for (const auto& step : schedule.steps) {
    if (const auto* m = std::get_if<NetMove>(&step)) {
      Json path = Json::array();
      for (const auto& p : m->path) path.push_back(point_json(net, p));
      steps.push_back({{"move", {{"agent", m->agent}, {"path", path}}}});
    } else {
      const auto& t = std::get<Transfer>(step);
      steps.push_back({{"transfer", {{"from", t.from}, {"to", t.to}, {"amount", to_json(t.amount)}}}});
    }
  }
  return Json{{"steps", steps}};
}

namespace {

template <class P, class PointFn>
BasicSchedule<P> schedule_from(const Json& doc, PointFn&& point) {
  BasicSchedule<P> out;
  try {
    const Json& steps = field(doc, "steps");
    if (!steps.is_array()) fail("steps must be an array");
    for (const auto& step : steps) {
      if (step.contains("move")) {
        const Json& m = step.at("move");
        std::vector<P> path;
        for (const auto& p : field(m, "path")) path.push_back(point(p));
        out.move(int_from(field(m, "agent"), "agent"), std::move(path));
      } else if (step.contains("transfer")) {
        const Json& t = step.at("transfer");
        out.transfer(int_from(field(t, "from"), "from"), int_from(field(t, "to"), "to"), rational_from(field(t, "amount")));
      } else {
        fail("step must be a move or a transfer");
      }
    }
  } catch (const Json::exception& e) {
    fail(e.what());
  }
  return out;
}

}  // namespace

LineSchedule line_schedule_from(const Json& doc) {
  return schedule_from<Rational>(doc, [](const Json& p) { return rational_from(p); });
}

NetSchedule net_schedule_from(const Network& net, const Json& doc) {
  return schedule_from<NetPoint>(doc, [&](const Json& p) { return point_from(net, p); });
}

}  // namespace agentex::io
