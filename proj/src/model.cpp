#include "agentex/model.hpp"

#include <algorithm>
#include <numeric>

namespace agentex {

void check_line(const LineInstance& inst) {
  if (inst.positions.empty()) throw InvalidInstance("line instance has no agents");
  if (inst.positions.size() != inst.energies.size())
    throw InvalidInstance("positions and energies differ in length");
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (inst.energies[i] < 0) throw InvalidInstance("negative energy at agent " + std::to_string(i));
    if (i > 0 && !(inst.positions[i - 1] < inst.positions[i]))
      throw InvalidInstance("line positions are not strictly increasing at agent " + std::to_string(i));
  }
}

LineInstance mirror(const LineInstance& inst) {
  LineInstance out;
  const std::size_t n = inst.size();
  out.positions.reserve(n);
  out.energies.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.positions.push_back(-inst.positions[n - 1 - k]);
    out.energies.push_back(inst.energies[n - 1 - k]);
  }
  return out;
}

std::vector<LineAgent> to_agents(const LineInstance& inst) {
  std::vector<LineAgent> out;
  out.reserve(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) out.push_back({inst.positions[i], inst.energies[i]});
  return out;
}

CollapsedLine collapse(const std::vector<LineAgent>& agents) {
  if (agents.empty()) throw InvalidInstance("line instance has no agents");
  CollapsedLine out;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& a = agents[i];
    if (a.energy < 0) throw InvalidInstance("negative energy at agent " + std::to_string(i));
    if (i > 0) {
      const auto& prev = agents[i - 1].position;
      if (a.position < prev)
        throw InvalidInstance("line positions are not non-decreasing at agent " + std::to_string(i));
      if (a.position == prev) {
        out.line.energies.back() += a.energy;
        out.members.back().push_back(static_cast<int>(i));
        continue;
      }
    }
    out.line.positions.push_back(a.position);
    out.line.energies.push_back(a.energy);
    out.members.push_back({static_cast<int>(i)});
  }
  return out;
}

namespace {

struct Fold {
  Rational arrived;  // energy brought to the anchor
  int walker = -1;   // agent standing at the anchor after the fold, or -1
};

// Walks the agents `order` (farthest from the anchor first) toward `anchor`, pooling energy.
Fold fold_toward(const LineInstance& inst, const std::vector<int>& order, const Rational& anchor) {
  Fold out;
  if (order.empty()) return out;
  Rational carried = inst.energies[order[0]];
  for (std::size_t k = 1; k < order.size(); ++k) {
    Rational d = abs(inst.positions[order[k]] - inst.positions[order[k - 1]]);
    carried = (carried >= d ? Rational(carried - d) : Rational(0)) + inst.energies[order[k]];
  }
  Rational d = abs(anchor - inst.positions[order.back()]);
  if (carried >= d) {
    out.arrived = carried - d;
    out.walker = order.back();
  }
  return out;
}

}  // namespace

NormalizedDelivery normalize_delivery(const LineInstance& inst, const Rational& source, const Rational& target) {
  check_line(inst);
  if (source == target) throw PreconditionError("normalize_delivery requires source != target");
  NormalizedDelivery out;
  out.mirrored = target < source;
  const std::size_t n = inst.size();
  const LineInstance work = out.mirrored ? mirror(inst) : inst;
  const Rational s = out.mirrored ? Rational(-source) : source;
  const Rational t = out.mirrored ? Rational(-target) : target;
  auto original = [&](std::size_t k) { return static_cast<int>(out.mirrored ? n - 1 - k : k); };

  std::vector<int> left, right;  // indices into `work`, farthest first
  int at_s = -1, at_t = -1;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& x = work.positions[k];
    if (x < s) left.push_back(static_cast<int>(k));
    if (x == s) at_s = static_cast<int>(k);
    if (x == t) at_t = static_cast<int>(k);
  }
  for (std::size_t k = n; k-- > 0;)
    if (work.positions[k] > t) right.push_back(static_cast<int>(k));

  const Fold fl = fold_toward(work, left, s);
  const Fold fr = fold_toward(work, right, t);

  auto push = [&](const Rational& x, Rational e, int rep) {
    out.line.positions.push_back(x);
    out.line.energies.push_back(std::move(e));
    out.representative.push_back(rep);
  };

  Rational e_s = fl.arrived + (at_s >= 0 ? work.energies[at_s] : Rational(0));
  push(s, e_s, at_s >= 0 ? original(at_s) : (fl.walker >= 0 ? original(fl.walker) : -1));
  for (std::size_t k = 0; k < n; ++k)
    if (s < work.positions[k] && work.positions[k] < t) push(work.positions[k], work.energies[k], original(k));
  Rational e_t = fr.arrived + (at_t >= 0 ? work.energies[at_t] : Rational(0));
  push(t, e_t, at_t >= 0 ? original(at_t) : (fr.walker >= 0 ? original(fr.walker) : -1));

  for (int k : left) out.left_outer.push_back(original(k));
  for (int k : right) out.right_outer.push_back(original(k));
  return out;
}

// ---------------------------------------------------------------------------

int Network::find_node(const std::string& name) const {
  auto it = std::find(nodes.begin(), nodes.end(), name);
  return it == nodes.end() ? -1 : static_cast<int>(it - nodes.begin());
}

void check_network(const Network& net) {
  if (net.nodes.empty()) throw InvalidInstance("network has no nodes");
  for (std::size_t i = 0; i < net.nodes.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (net.nodes[i] == net.nodes[j]) throw InvalidInstance("duplicate node id '" + net.nodes[i] + "'");
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const auto& edge = net.edges[e];
    if (edge.u < 0 || edge.u >= net.node_count() || edge.v < 0 || edge.v >= net.node_count())
      throw InvalidInstance("edge " + std::to_string(e) + " has an unknown endpoint");
    if (edge.u == edge.v) throw InvalidInstance("edge " + std::to_string(e) + " is a self-loop");
    if (edge.length < 0) throw InvalidInstance("negative length on edge " + std::to_string(e));
  }
  for (std::size_t a = 0; a < net.agents.size(); ++a) {
    const auto& agent = net.agents[a];
    if (agent.node < 0 || agent.node >= net.node_count())
      throw InvalidInstance("agent " + std::to_string(a) + " is at an unknown node");
    if (agent.energy < 0) throw InvalidInstance("negative energy at agent " + std::to_string(a));
  }
}

void check_tree(const Network& net) {
  check_network(net);
  const int n = net.node_count();
  if (net.edge_count() != n - 1) throw InvalidInstance("not a tree: edge count must be node count - 1");
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& edge : net.edges) {
    if (edge.directed) throw InvalidInstance("not a tree: directed edge");
    int a = find(edge.u), b = find(edge.v);
    if (a == b) throw InvalidInstance("not a tree: cycle through edge " + net.nodes[edge.u] + "-" + net.nodes[edge.v]);
    parent[a] = b;
  }
}

NetPoint canonical(const Network& net, const NetPoint& p) {
  if (p.node >= 0) {
    if (p.node >= net.node_count()) throw InvalidInstance("point refers to an unknown node");
    return NetPoint::at_node(p.node);
  }
  if (p.edge < 0 || p.edge >= net.edge_count()) throw InvalidInstance("point refers to an unknown edge");
  const auto& edge = net.edges[p.edge];
  if (p.offset < 0 || p.offset > edge.length) throw InvalidInstance("edge offset out of range");
  if (p.offset == 0) return NetPoint::at_node(edge.u);
  if (p.offset == edge.length) return NetPoint::at_node(edge.v);
  return p;
}

NetPoint LineNetwork::point(const Rational& x) const {
  if (coords.empty() || x < coords.front() || x > coords.back())
    throw InvalidInstance("coordinate " + to_string(x) + " lies outside the line");
  auto it = std::lower_bound(coords.begin(), coords.end(), x);
  const int k = static_cast<int>(it - coords.begin());
  if (*it == x) return NetPoint::at_node(k);
  return NetPoint::on_edge(k - 1, Rational(x - coords[k - 1]));
}

LineNetwork line_network(const std::vector<LineAgent>& agents, const std::vector<Rational>& extra) {
  LineNetwork out;
  for (const auto& a : agents) out.coords.push_back(a.position);
  out.coords.insert(out.coords.end(), extra.begin(), extra.end());
  std::sort(out.coords.begin(), out.coords.end());
  out.coords.erase(std::unique(out.coords.begin(), out.coords.end()), out.coords.end());
  for (const auto& x : out.coords) out.net.nodes.push_back(to_string(x));
  for (std::size_t k = 1; k < out.coords.size(); ++k)
    out.net.edges.push_back({static_cast<int>(k - 1), static_cast<int>(k), out.coords[k] - out.coords[k - 1], false});
  for (const auto& a : agents) {
    auto it = std::lower_bound(out.coords.begin(), out.coords.end(), a.position);
    out.net.agents.push_back({static_cast<int>(it - out.coords.begin()), a.energy});
  }
  return out;
}

NetSchedule to_network(const LineNetwork& ln, const LineSchedule& schedule) {
  NetSchedule out;
  for (const auto& step : schedule.steps) {
    if (const auto* t = std::get_if<Transfer>(&step)) {
      out.steps.emplace_back(*t);
      continue;
    }
    const auto& m = std::get<LineMove>(step);
    NetMove nm{m.agent, {}};
    for (std::size_t k = 0; k < m.path.size(); ++k) {
      if (k > 0) {
        const Rational& a = m.path[k - 1];
        const Rational& b = m.path[k];
        if (a < b) {
          for (auto it = std::upper_bound(ln.coords.begin(), ln.coords.end(), a); it != ln.coords.end() && *it < b; ++it)
            nm.path.push_back(NetPoint::at_node(static_cast<int>(it - ln.coords.begin())));
        } else if (b < a) {
          auto it = std::lower_bound(ln.coords.begin(), ln.coords.end(), a);
          while (it != ln.coords.begin()) {
            --it;
            if (!(b < *it)) break;
            nm.path.push_back(NetPoint::at_node(static_cast<int>(it - ln.coords.begin())));
          }
        }
      }
      nm.path.push_back(ln.point(m.path[k]));
    }
    out.steps.emplace_back(std::move(nm));
  }
  return out;
}

NetTask to_network(const LineNetwork& ln, const LineTask& task) {
  NetTask out;
  out.kind = task.kind;
  out.source_agent = task.source_agent;
  if (task.kind == TaskKind::Delivery) {
    out.source = ln.point(task.source);
    out.target = ln.point(task.target);
  }
  if (task.point) out.point = ln.point(*task.point);
  return out;
}

const char* task_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::Delivery: return "delivery";
    case TaskKind::Convergecast: return "convergecast";
    case TaskKind::Broadcast: return "broadcast";
  }
  return "?";
}

TaskKind parse_task_kind(const std::string& text) {
  if (text == "delivery") return TaskKind::Delivery;
  if (text == "convergecast") return TaskKind::Convergecast;
  if (text == "broadcast") return TaskKind::Broadcast;
  throw InvalidInstance("unknown task '" + text + "'");
}

const char* kind_name(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::Line: return "line";
    case InstanceKind::Tree: return "tree";
    case InstanceKind::Graph: return "graph";
    case InstanceKind::Digraph: return "digraph";
  }
  return "?";
}

}  // namespace agentex
