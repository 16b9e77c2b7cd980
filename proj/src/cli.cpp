#include "agentex/cli.hpp"

#include "agentex/hardness.hpp"
#include "agentex/instance_io.hpp"
#include "agentex/line.hpp"
#include "agentex/oracle.hpp"
#include "agentex/tree.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace agentex::cli {

namespace {

using io::Json;

// Bad flags, unreadable files or a request the tool cannot serve.
class UsageError : public Error {
 public:
  using Error::Error;
};

// The tool produced something its own checks reject.
class InvariantError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string instance;
  std::string schedule_file;
  std::string output;
  std::string task;
  std::string source;
  std::string target;
  bool emit_tables = false;
  std::string resolution = "1/4";
  std::size_t max_states = oracle::SearchConfig{}.max_states;
  std::uint64_t seed = 1;
  // gen
  int size = 6;
  int agents = 3;
  long max_gap = 10;
  long max_energy = 20;
  std::string weights;
  std::string scale = "6";
  // bench
  std::vector<long> sizes{100'000, 1'000'000};
  double max_ratio = 15;
  double max_seconds = 10;
};

std::string read_text(const std::string& path, std::istream& in) {
  std::ostringstream text;
  if (path == "-") {
    text << in.rdbuf();
    return text.str();
  }
  std::ifstream file(path);
  if (!file) throw UsageError("cannot read " + path);
  text << file.rdbuf();
  return text.str();
}

Rational rational_arg(const std::string& text, const char* what) {
  try {
    return parse_rational(text);
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string("bad ") + what + ": " + text);
  }
}

int int_arg(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    int value = std::stoi(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  throw UsageError(std::string("bad ") + what + ": " + text);
}

// Node name, or EDGE@OFFSET for a point inside an edge.
NetPoint point_arg(const Network& net, const std::string& text) {
  if (auto at = text.find('@'); at != std::string::npos) {
    const int edge = int_arg(text.substr(0, at), "edge index");
    return canonical(net, NetPoint::on_edge(edge, rational_arg(text.substr(at + 1), "edge offset")));
  }
  const int node = net.find_node(text);
  if (node < 0) throw UsageError("unknown node " + text);
  return NetPoint::at_node(node);
}

oracle::SearchConfig search_config(const Options& opt) {
  oracle::SearchConfig cfg;
  cfg.resolution = rational_arg(opt.resolution, "resolution");
  if (cfg.resolution <= 0) throw UsageError("resolution must be positive");
  cfg.max_states = opt.max_states;
  return cfg;
}

// ---------------------------------------------------------------------------
// Instance and task

struct Problem {
  Instance inst;
  CollapsedLine collapsed;        // line instances
  std::vector<int> group_of;      // line: input agent -> collapsed agent
  LineTask line_task;
  NetTask net_task;

  bool is_line() const { return inst.kind == InstanceKind::Line; }
  TaskKind kind() const { return is_line() ? line_task.kind : net_task.kind; }
  Json task_json() const { return is_line() ? io::task_json(line_task) : io::task_json(inst.network, net_task); }
};

Problem load(const Options& opt, std::istream& in) {
  Problem p;
  p.inst = io::parse_instance(read_text(opt.instance, in));

  std::optional<TaskKind> kind;
  if (!opt.task.empty()) {
    try {
      kind = parse_task_kind(opt.task);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  if (p.is_line()) {
    p.collapsed = collapse(p.inst.line);
    p.group_of.assign(p.inst.line.size(), 0);
    for (std::size_t k = 0; k < p.collapsed.members.size(); ++k)
      for (int a : p.collapsed.members[k]) p.group_of[a] = static_cast<int>(k);
    const auto& pos = p.collapsed.line.positions;
    if (p.inst.line_task && (!kind || *kind == p.inst.line_task->kind)) {
      p.line_task = *p.inst.line_task;
    } else if (kind == TaskKind::Delivery) {
      p.line_task = LineTask::delivery(pos.front(), pos.back());
    } else if (kind) {
      p.line_task.kind = *kind;
    } else {
      throw UsageError("no task: pass --task or add one to the instance");
    }
    if (p.line_task.kind == TaskKind::Delivery) {
      if (!opt.source.empty()) p.line_task.source = rational_arg(opt.source, "source");
      if (!opt.target.empty()) p.line_task.target = rational_arg(opt.target, "target");
    } else if (p.line_task.kind == TaskKind::Convergecast) {
      if (!opt.target.empty()) p.line_task.point = rational_arg(opt.target, "target");
    } else if (!opt.source.empty()) {
      p.line_task.source_agent = int_arg(opt.source, "source agent");
    }
    if (p.line_task.source_agent &&
        (*p.line_task.source_agent < 0 || *p.line_task.source_agent >= static_cast<int>(p.inst.line.size())))
      throw UsageError("source agent out of range");
    return p;
  }

  const Network& net = p.inst.network;
  if (p.inst.net_task && (!kind || *kind == p.inst.net_task->kind)) {
    p.net_task = *p.inst.net_task;
  } else if (kind) {
    p.net_task.kind = *kind;
    if (*kind == TaskKind::Delivery && (opt.source.empty() || opt.target.empty()))
      throw UsageError("delivery on a network needs --source and --target");
  } else {
    throw UsageError("no task: pass --task or add one to the instance");
  }
  if (p.net_task.kind == TaskKind::Delivery) {
    if (!opt.source.empty()) p.net_task.source = point_arg(net, opt.source);
    if (!opt.target.empty()) p.net_task.target = point_arg(net, opt.target);
  } else if (p.net_task.kind == TaskKind::Convergecast) {
    if (!opt.target.empty()) p.net_task.point = point_arg(net, opt.target);
  } else if (!opt.source.empty()) {
    p.net_task.source_agent = int_arg(opt.source, "source agent");
  }
  if (p.net_task.source_agent && (*p.net_task.source_agent < 0 || *p.net_task.source_agent >= net.agent_count()))
    throw UsageError("source agent out of range");
  return p;
}

// Schedule on the collapsed line rewritten for the input agents: members hand their energy to the acting one first.
LineSchedule expand(const Problem& p, const LineSchedule& schedule, std::vector<int> actor = {}) {
  const auto& members = p.collapsed.members;
  if (actor.empty())
    for (const auto& group : members) actor.push_back(group.front());
  LineSchedule out;
  for (std::size_t k = 0; k < members.size(); ++k)
    for (int a : members[k])
      if (a != actor[k] && p.inst.line[a].energy > 0) out.transfer(a, actor[k], p.inst.line[a].energy);
  out.append(renumber(schedule, [&](int a) { return actor[a]; }));
  return out;
}

std::vector<int> input_agents(const Problem& p, const std::vector<int>& groups) {
  std::vector<int> out;
  for (int k : groups) out.insert(out.end(), p.collapsed.members[k].begin(), p.collapsed.members[k].end());
  std::sort(out.begin(), out.end());
  return out;
}

Json rationals(const std::vector<Rational>& values) {
  Json out = Json::array();
  for (const auto& v : values) out.push_back(io::to_json(v));
  return out;
}

Json optional_json(const std::optional<Rational>& value) { return value ? io::to_json(*value) : Json(nullptr); }

std::optional<Rational> best_of(const std::vector<std::optional<Rational>>& values) {
  std::optional<Rational> best;
  for (const auto& v : values)
    if (v && (!best || *best < *v)) best = *v;
  return best;
}

// ---------------------------------------------------------------------------
// Decisions

struct Decision {
  bool feasible = false;
  std::optional<Rational> value;
  Json witness;
  Json tables;
};

Decision decide_line(const Problem& p, bool tables) {
  const LineInstance& line = p.collapsed.line;
  const LineTask& task = p.line_task;
  Decision d;
  if (tables) {
    const auto pot = line::all_potentials(line);
    d.tables = Json{{"forward", rationals(pot.fwd)},
                    {"backward", rationals(pot.bwd)},
                    {"broadcast_left", rationals(pot.dc)},
                    {"broadcast_right", rationals(pot.db)},
                    {"agents", p.collapsed.members}};
  }
  switch (task.kind) {
    case TaskKind::Delivery: {
      const auto dec = line::delivery_decide(line, task.source, task.target);
      d.feasible = dec.feasible;
      d.value = dec.value;
      if (dec.feasible && task.source != task.target)
        d.witness = io::to_json(expand(p, line::plan_delivery(line, task.source, task.target)));
      break;
    }
    case TaskKind::Convergecast: {
      const auto dec = line::convergecast_decide(line);
      if (tables) d.tables["cut_values"] = [&] {
        Json cuts = Json::array();
        for (const auto& v : dec.cut_values) cuts.push_back(optional_json(v));
        return cuts;
      }();
      if (task.point) throw UsageError("line convergecast at a fixed point is not supported; use oracle search");
      d.feasible = dec.feasible;
      if (dec.feasible) {
        d.value = dec.surplus;
        if (dec.cut)
          d.witness = Json{{"cut", *dec.cut},
                           {"left", p.collapsed.members[*dec.cut]},
                           {"right", p.collapsed.members[*dec.cut + 1]}};
        else
          d.witness = Json{{"agent", p.collapsed.members[0]}};
      } else {
        d.value = best_of(dec.cut_values);
      }
      break;
    }
    case TaskKind::Broadcast: {
      const auto sources = line::broadcast_set(line);
      const auto agents = input_agents(p, sources);
      const std::size_t n = line.size();
      std::optional<int> group;
      if (task.source_agent) group = p.group_of[*task.source_agent];
      const auto pot = line::all_potentials(line);
      std::optional<Rational> best;
      std::optional<std::size_t> cut;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        if (group && *group != static_cast<int>(k) && *group != static_cast<int>(k + 1)) continue;
        Rational v = line::broadcast_cut_value(pot, line, k);
        if (!best || *best < v) best = v, cut = k;
      }
      if (tables) {
        Json cuts = Json::array();
        for (std::size_t k = 0; k + 1 < n; ++k) cuts.push_back(io::to_json(line::broadcast_cut_value(pot, line, k)));
        d.tables["broadcast_cut_values"] = cuts;
      }
      d.feasible = group ? std::binary_search(sources.begin(), sources.end(), *group) : !sources.empty();
      d.value = best;
      d.witness = Json{{"sources", agents}};
      if (cut) d.witness["cut"] = *cut;
      break;
    }
  }
  return d;
}

bool covers(const Network& tree, const tree::ConvergecastResult& r, const NetPoint& at) {
  const NetPoint p = canonical(tree, at);
  auto inside = [&](int e, const Rational& off) {
    const auto& iv = r.edges[e].interval;
    return iv && iv->first <= off && off <= iv->second;
  };
  if (!p.is_node()) return inside(p.edge, p.offset);
  if (r.node == p.node) return true;
  for (int e = 0; e < tree.edge_count(); ++e) {
    if (tree.edges[e].u == p.node && inside(e, Rational(0))) return true;
    if (tree.edges[e].v == p.node && inside(e, tree.edges[e].length)) return true;
  }
  return false;
}

Decision decide_tree(const Problem& p, bool tables) {
  const Network& net = p.inst.network;
  const NetTask& task = p.net_task;
  Decision d;
  if (tables) {
    const auto pot = tree::all_edge_potentials(net);
    Json edges = Json::array();
    for (int e = 0; e < net.edge_count(); ++e)
      edges.push_back({{"edge", e},
                       {"gathered_at_u", io::to_json(pot.toward_v(e))},
                       {"gathered_at_v", io::to_json(pot.toward_u(e))}});
    d.tables = Json{{"edge_potentials", edges}};
  }
  switch (task.kind) {
    case TaskKind::Delivery: {
      const auto r = tree::tree_delivery(net, task.source, task.target);
      d.feasible = r.feasible;
      d.value = r.value;
      if (r.feasible) d.witness = io::to_json(net, r.schedule);
      break;
    }
    case TaskKind::Convergecast: {
      const auto r = tree::convergecast_points(net);
      d.feasible = task.point ? covers(net, r, *task.point) : r.feasible;
      std::vector<std::optional<Rational>> surpluses;
      Json intervals = Json::array();
      for (const auto& e : r.edges) {
        surpluses.push_back(e.surplus);
        if (e.interval)
          intervals.push_back(
              {{"edge", e.edge}, {"from", io::to_json(e.interval->first)}, {"to", io::to_json(e.interval->second)}});
      }
      d.value = best_of(surpluses);
      d.witness = Json{{"intervals", intervals}};
      if (r.node) d.witness["node"] = io::point_json(net, NetPoint::at_node(*r.node));
      break;
    }
    case TaskKind::Broadcast: {
      const auto nodes = tree::broadcast_sources(net);
      Json names = Json::array(), agents = Json::array();
      for (int n : nodes) names.push_back(io::point_json(net, NetPoint::at_node(n)));
      for (int a = 0; a < net.agent_count(); ++a)
        if (std::binary_search(nodes.begin(), nodes.end(), net.agents[a].node)) agents.push_back(a);
      d.feasible = task.source_agent
                       ? std::binary_search(nodes.begin(), nodes.end(), net.agents[*task.source_agent].node)
                       : !nodes.empty();
      d.witness = Json{{"nodes", names}, {"agents", agents}};
      break;
    }
  }
  return d;
}

Decision decide_by_search(const Problem& p, const Options& opt) {
  const Network& net = p.inst.network;
  const auto cfg = search_config(opt);
  Decision d;
  if (p.net_task.kind == TaskKind::Broadcast && !p.net_task.source_agent) {
    const auto summary = oracle::explore_information(net, cfg);
    d.feasible = !summary.broadcast_sources.empty();
    d.witness = Json{{"sources", summary.broadcast_sources}, {"method", "search"}};
    return d;
  }
  const auto schedule = oracle::search_feasible(net, p.net_task, cfg);
  d.feasible = schedule.has_value();
  if (schedule) {
    d.value = oracle::max_surplus(net, p.net_task, cfg);
    d.witness = Json{{"schedule", io::to_json(net, *schedule)}, {"method", "search"}};
  }
  return d;
}

Decision decide(const Problem& p, const Options& opt) {
  if (p.is_line()) return decide_line(p, opt.emit_tables);
  if (p.inst.kind == InstanceKind::Tree) return decide_tree(p, opt.emit_tables);
  return decide_by_search(p, opt);
}

// ---------------------------------------------------------------------------
// Validation

Json report_json(const oracle::ValidationReport& r) {
  Json out{{"ok", r.ok}, {"task_achieved", r.task_achieved}, {"surplus", io::to_json(r.surplus_at_target)}};
  if (r.violation) out["violation"] = {{"step", r.violation->step}, {"reason", r.violation->reason}};
  return out;
}

oracle::ValidationReport validate(const Problem& p, const Json& schedule) {
  try {
    if (p.is_line()) return oracle::validate_schedule(p.inst.line, p.line_task, io::line_schedule_from(schedule));
    return oracle::validate_schedule(p.inst.network, p.net_task, io::net_schedule_from(p.inst.network, schedule));
  } catch (const Json::exception& e) {
    throw InvalidInstance(std::string("bad schedule document: ") + e.what());
  }
}

// Schedule document for the chosen task, or nullopt when the task is infeasible.
std::optional<Json> make_schedule(const Problem& p, const Options& opt) {
  if (p.kind() == TaskKind::Convergecast) throw UsageError("no schedule generator for convergecast");
  if (p.is_line()) {
    const LineInstance& line = p.collapsed.line;
    const LineTask& task = p.line_task;
    if (task.kind == TaskKind::Delivery) {
      if (!line::delivery_decide(line, task.source, task.target).feasible) return std::nullopt;
      if (task.source == task.target) return io::to_json(LineSchedule{});
      return io::to_json(expand(p, line::plan_delivery(line, task.source, task.target)));
    }
    const auto sources = line::broadcast_set(line);
    if (!task.source_agent) throw UsageError("broadcast schedule needs --source");
    const int group = p.group_of[*task.source_agent];
    if (!std::binary_search(sources.begin(), sources.end(), group)) return std::nullopt;
    std::vector<int> actor;
    for (const auto& members : p.collapsed.members) actor.push_back(members.front());
    actor[group] = *task.source_agent;
    return io::to_json(expand(p, line::broadcast_schedule(line, group), actor));
  }
  const Network& net = p.inst.network;
  if (p.inst.kind == InstanceKind::Tree && p.net_task.kind == TaskKind::Delivery) {
    const auto r = tree::tree_delivery(net, p.net_task.source, p.net_task.target);
    if (!r.feasible) return std::nullopt;
    return io::to_json(net, r.schedule);
  }
  if (p.net_task.kind == TaskKind::Broadcast && !p.net_task.source_agent)
    throw UsageError("broadcast schedule needs --source");
  const auto schedule = oracle::search_feasible(net, p.net_task, search_config(opt));
  if (!schedule) return std::nullopt;
  return io::to_json(net, *schedule);
}

// ---------------------------------------------------------------------------
// Commands

void emit(std::ostream& out, const Json& doc) { out << doc.dump(2) << '\n'; }

std::string value_text(const std::optional<Rational>& v) { return v ? to_string(*v) : std::string("none"); }

int cmd_solve(const Options& opt, std::istream& in, std::ostream& out, std::ostream& err) {
  const Problem p = load(opt, in);
  const Decision d = decide(p, opt);
  Json doc{{"task", p.task_json()},
           {"feasible", d.feasible},
           {"surplus_or_deficit", optional_json(d.value)},
           {"witness", d.witness}};
  if (opt.emit_tables) doc["tables"] = d.tables;
  emit(out, doc);
  err << task_name(p.kind()) << ": " << (d.feasible ? "feasible" : "infeasible") << ", value "
      << value_text(d.value) << '\n';
  return d.feasible ? kOk : kInfeasible;
}

int cmd_schedule(const Options& opt, std::istream& in, std::ostream& out, std::ostream& err) {
  const Problem p = load(opt, in);
  const auto schedule = make_schedule(p, opt);
  if (!schedule) {
    emit(out, Json{{"task", p.task_json()}, {"feasible", false}});
    err << task_name(p.kind()) << ": infeasible\n";
    return kInfeasible;
  }
  const auto report = validate(p, *schedule);
  if (!report.ok || !report.task_achieved)
    throw InvariantError("generated schedule fails validation: " +
                         (report.violation ? report.violation->reason : std::string("task not achieved")));
  if (p.kind() == TaskKind::Delivery && p.is_line()) {
    const auto dec = line::delivery_decide(p.collapsed.line, p.line_task.source, p.line_task.target);
    if (report.surplus_at_target != dec.value)
      throw InvariantError("schedule surplus " + to_string(report.surplus_at_target) + " differs from decision " +
                           to_string(dec.value));
  }
  if (!opt.output.empty()) {
    std::ofstream file(opt.output);
    if (!file) throw UsageError("cannot write " + opt.output);
    emit(file, *schedule);
  }
  emit(out, Json{{"task", p.task_json()}, {"feasible", true}, {"schedule", *schedule}, {"validation", report_json(report)}});
  err << task_name(p.kind()) << ": schedule of " << (*schedule)["steps"].size() << " steps validated, surplus "
      << to_string(report.surplus_at_target) << '\n';
  return kOk;
}

int cmd_validate(const Options& opt, std::istream& in, std::ostream& out, std::ostream& err) {
  const Problem p = load(opt, in);
  Json schedule;
  try {
    schedule = Json::parse(read_text(opt.schedule_file, in));
  } catch (const Json::exception& e) {
    throw UsageError(std::string("bad schedule document: ") + e.what());
  }
  if (schedule.contains("schedule")) schedule = schedule.at("schedule");
  const auto report = validate(p, schedule);
  emit(out, report_json(report));
  if (report.violation)
    err << "rejected at step " << report.violation->step << ": " << report.violation->reason << '\n';
  else
    err << (report.task_achieved ? "valid, task achieved" : "valid, task not achieved") << ", surplus "
        << to_string(report.surplus_at_target) << '\n';
  return report.ok && report.task_achieved ? kOk : kInfeasible;
}

int cmd_oracle(const std::string& mode, const Options& opt, std::istream& in, std::ostream& out, std::ostream& err) {
  const Problem p = load(opt, in);
  const auto cfg = search_config(opt);
  Json doc{{"task", p.task_json()}};
  // Line task and acting agents in terms of the collapsed line.
  LineTask line_task = p.line_task;
  std::vector<int> actor;
  if (p.is_line()) {
    for (const auto& members : p.collapsed.members) actor.push_back(members.front());
    if (line_task.source_agent) {
      line_task.source_agent = p.group_of[*p.line_task.source_agent];
      actor[*line_task.source_agent] = *p.line_task.source_agent;
    }
  }
  bool found = false;
  if (mode == "search") {
    std::optional<Json> schedule;
    if (p.is_line()) {
      if (auto s = oracle::search_feasible(p.collapsed.line, line_task, cfg)) schedule = io::to_json(expand(p, *s, actor));
    } else if (auto s = oracle::search_feasible(p.inst.network, p.net_task, cfg)) {
      schedule = io::to_json(p.inst.network, *s);
    }
    found = schedule.has_value();
    doc["feasible"] = found;
    if (schedule) doc["schedule"] = *schedule;
  } else if (mode == "broadcast-set") {
    std::vector<int> sources;
    if (p.is_line())
      sources = input_agents(p, oracle::broadcast_set(p.collapsed.line, cfg));
    else
      sources = oracle::explore_information(p.inst.network, cfg).broadcast_sources;
    found = !sources.empty();
    doc["feasible"] = found;
    doc["sources"] = sources;
  } else {
    const auto best = p.is_line() ? oracle::max_surplus(p.collapsed.line, line_task, cfg)
                                  : oracle::max_surplus(p.inst.network, p.net_task, cfg);
    found = best.has_value();
    doc["feasible"] = found;
    doc["max_surplus"] = optional_json(best);
  }
  doc["resolution"] = to_string(cfg.resolution);
  emit(out, doc);
  if (found)
    err << "oracle " << mode << ": found at resolution " << to_string(cfg.resolution) << '\n';
  else
    err << "oracle " << mode << ": no schedule at resolution " << to_string(cfg.resolution) << '\n';
  return found ? kOk : kInfeasible;
}

// ---------------------------------------------------------------------------
// Generators

std::vector<long long> weights_arg(const std::string& text) {
  std::vector<long long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(int_arg(item, "weight"));
  if (out.empty()) throw UsageError("--weights is required");
  return out;
}

long uniform(std::mt19937_64& rng, long lo, long hi) {
  return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

LineInstance random_line(std::mt19937_64& rng, long n, long max_gap, long max_energy) {
  LineInstance inst;
  long x = 0;
  for (long i = 0; i < n; ++i) {
    if (i > 0) x += uniform(rng, 1, max_gap);
    inst.positions.emplace_back(x);
    inst.energies.emplace_back(uniform(rng, 0, max_energy));
  }
  return inst;
}

Json gen_tree(std::mt19937_64& rng, const Options& opt) {
  Network net;
  for (int i = 0; i < opt.size; ++i) net.nodes.push_back("n" + std::to_string(i));
  for (int i = 1; i < opt.size; ++i)
    net.edges.push_back({static_cast<int>(uniform(rng, 0, i - 1)), i, Rational(uniform(rng, 1, opt.max_gap))});
  for (int a = 0; a < opt.agents; ++a)
    net.agents.push_back({static_cast<int>(uniform(rng, 0, opt.size - 1)), Rational(uniform(rng, 0, opt.max_energy))});
  return io::network_json(net, InstanceKind::Tree);
}

int cmd_gen(const std::string& what, const Options& opt, std::ostream& out, std::ostream& err) {
  std::mt19937_64 rng(opt.seed);
  if (opt.size < 1 || opt.agents < 0 || opt.max_gap < 1 || opt.max_energy < 0)
    throw UsageError("generator sizes must be positive");
  Json doc;
  if (what == "line") {
    doc = io::line_instance_json(random_line(rng, opt.size, opt.max_gap, opt.max_energy));
  } else if (what == "tree") {
    doc = gen_tree(rng, opt);
  } else {
    const auto weights = weights_arg(opt.weights);
    const Rational scale = rational_arg(opt.scale, "scale");
    const auto r = what == "partition-digraph" ? hardness::build_digraph_reduction(weights, scale)
                                               : hardness::build_graph_reduction(weights, scale);
    NetTask task = r.task;
    if (!opt.task.empty() && what == "partition-graph") {
      const TaskKind kind = parse_task_kind(opt.task);
      if (kind == TaskKind::Convergecast) task = hardness::convergecast_task(r);
      if (kind == TaskKind::Broadcast) task = hardness::broadcast_task(r);
    }
    doc = io::network_json(r.graph, r.kind);
    doc["task"] = io::task_json(r.graph, task);
  }
  emit(out, doc);
  err << "generated " << what << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// Benchmark

double time_line_solvers(const LineInstance& inst) {
  const auto start = std::chrono::steady_clock::now();
  const auto delivery = line::delivery_decide(inst, inst.positions.front(), inst.positions.back());
  const auto gather = line::convergecast_decide(inst);
  const auto sources = line::broadcast_set(inst);
  const auto stop = std::chrono::steady_clock::now();
  // Keep the results observable so nothing is optimized away.
  volatile bool sink = delivery.feasible ^ gather.feasible ^ sources.empty();
  (void)sink;
  return std::chrono::duration<double>(stop - start).count();
}

int cmd_bench(const Options& opt, std::ostream& out, std::ostream& err) {
  if (opt.sizes.empty()) throw UsageError("--sizes is empty");
  std::mt19937_64 rng(opt.seed);
  Json runs = Json::array();
  std::vector<double> seconds;
  bool ok = true;
  for (long n : opt.sizes) {
    if (n < 1) throw UsageError("sizes must be positive");
    const LineInstance inst = random_line(rng, n, opt.max_gap, opt.max_energy);
    seconds.push_back(time_line_solvers(inst));
    ok = ok && seconds.back() <= opt.max_seconds;
    runs.push_back({{"n", n}, {"seconds", seconds.back()}});
    err << "n=" << n << ": " << seconds.back() << " s\n";
  }
  Json doc{{"runs", runs}};
  if (seconds.size() >= 2) {
    const double ratio = seconds.back() / std::max(seconds.front(), 1e-9);
    const double growth = static_cast<double>(opt.sizes.back()) / static_cast<double>(opt.sizes.front());
    const double allowed = opt.max_ratio * growth / 10.0;
    doc["ratio"] = ratio;
    doc["allowed_ratio"] = allowed;
    ok = ok && ratio <= allowed;
  }
  doc["ok"] = ok;
  emit(out, doc);
  return ok ? kOk : kInfeasible;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy-constrained mobile agents: delivery, convergecast and broadcast"};
  app.require_subcommand(1);
  Options opt;

  auto task_flags = [&](CLI::App* sub) {
    sub->add_option("--task", opt.task, "delivery, convergecast or broadcast")
        ->check(CLI::IsMember({"delivery", "convergecast", "broadcast"}));
    sub->add_option("--source", opt.source, "delivery source (position, node or EDGE@OFFSET) or broadcast agent");
    sub->add_option("--target", opt.target, "delivery target or convergecast point");
    sub->add_option("--resolution", opt.resolution, "search grid step, p/q");
    sub->add_option("--max-states", opt.max_states, "search state budget");
  };

  auto* solve = app.add_subcommand("solve", "Decide a task and print a witness");
  solve->add_option("instance", opt.instance, "instance file, - for stdin")->required();
  solve->add_flag("--emit-tables", opt.emit_tables, "include potential tables");
  task_flags(solve);

  auto* schedule = app.add_subcommand("schedule", "Build a schedule and validate it");
  schedule->add_option("instance", opt.instance, "instance file, - for stdin")->required();
  schedule->add_option("-o,--output", opt.output, "also write the schedule document here");
  task_flags(schedule);

  auto* check = app.add_subcommand("validate", "Replay a schedule against an instance");
  check->add_option("instance", opt.instance, "instance file, - for stdin")->required();
  check->add_option("schedule", opt.schedule_file, "schedule file")->required();
  task_flags(check);

  auto* search = app.add_subcommand("oracle", "Exhaustive search on a grid");
  search->require_subcommand(1);
  const std::vector<std::pair<const char*, const char*>> modes{
      {"search", "Find a schedule"}, {"max-surplus", "Best surplus"}, {"broadcast-set", "Agents able to broadcast"}};
  for (const auto& [mode, help] : modes) {
    auto* sub = search->add_subcommand(mode, help);
    sub->add_option("instance", opt.instance, "instance file, - for stdin")->required();
    task_flags(sub);
  }

  auto* gen = app.add_subcommand("gen", "Write a generated instance");
  gen->require_subcommand(1);
  for (const char* what : {"line", "tree"}) {
    auto* sub = gen->add_subcommand(what, std::string("Random ") + what);
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("-n,--size", opt.size, what == std::string("line") ? "agents" : "nodes");
    if (what == std::string("tree")) sub->add_option("--agents", opt.agents, "agents");
    sub->add_option("--max-gap", opt.max_gap, "largest gap or edge length");
    sub->add_option("--max-energy", opt.max_energy, "largest energy");
  }
  for (const char* what : {"partition-digraph", "partition-graph"}) {
    auto* sub = gen->add_subcommand(what, "Partition reduction");
    sub->add_option("--weights", opt.weights, "comma-separated weights")->required();
    sub->add_option("--scale", opt.scale, "multiplier for lengths and energies");
    if (what == std::string("partition-graph"))
      sub->add_option("--task", opt.task, "task stored in the instance")
          ->check(CLI::IsMember({"delivery", "convergecast", "broadcast"}));
  }

  auto* bench = app.add_subcommand("bench", "Time the line solvers and check linear scaling");
  bench->add_option("--sizes", opt.sizes, "instance sizes")->delimiter(',');
  bench->add_option("--seed", opt.seed, "random seed");
  bench->add_option("--max-ratio", opt.max_ratio, "allowed time ratio per tenfold growth");
  bench->add_option("--max-seconds", opt.max_seconds, "time limit per size");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) return cmd_solve(opt, in, out, err);
    if (*schedule) return cmd_schedule(opt, in, out, err);
    if (*check) return cmd_validate(opt, in, out, err);
    if (*search) return cmd_oracle(search->get_subcommands().front()->get_name(), opt, in, out, err);
    if (*gen) return cmd_gen(gen->get_subcommands().front()->get_name(), opt, out, err);
    if (*bench) return cmd_bench(opt, out, err);
  } catch (const InvariantError& e) {
    err << "invariant failure: " << e.what() << '\n';
    return kInvariant;
  } catch (const oracle::BudgetExhausted& e) {
    err << "search budget exhausted (raise --max-states or the resolution): " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidInstance& e) {
    err << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const PreconditionError& e) {
    err << "unsupported: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvariant;
  }
  return kUsage;
}

}  // namespace agentex::cli
