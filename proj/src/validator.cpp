#include "agentex/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace agentex::oracle {

namespace {

using Bits = std::vector<std::uint64_t>;

bool has(const Bits& b, int k) { return (b[k / 64] >> (k % 64)) & 1U; }
void set_bit(Bits& b, int k) { b[k / 64] |= std::uint64_t{1} << (k % 64); }
bool unite(Bits& into, const Bits& from) {
  bool changed = false;
  for (std::size_t w = 0; w < into.size(); ++w) {
    auto merged = into[w] | from[w];
    changed |= merged != into[w];
    into[w] = merged;
  }
  return changed;
}

std::optional<Rational> offset_on(const Network& net, int e, const NetPoint& p) {
  const auto& edge = net.edges[e];
  if (p.is_node()) {
    if (p.node == edge.u) return Rational(0);
    if (p.node == edge.v) return edge.length;
    return std::nullopt;
  }
  if (p.edge == e) return p.offset;
  return std::nullopt;
}

struct Segment {
  int edge = -1;  // -1: no motion
  Rational from, to;
};

// Finds an edge carrying both points, preferring the shortest traversal.
std::optional<Segment> common_edge(const Network& net, const NetPoint& p, const NetPoint& q,
                                   const std::vector<std::vector<int>>& incident) {
  if (p == q) return Segment{};
  std::vector<int> candidates;
  if (!p.is_node())
    candidates.push_back(p.edge);
  else if (!q.is_node())
    candidates.push_back(q.edge);
  else
    candidates = incident[p.node];
  std::optional<Segment> best;
  for (int e : candidates) {
    auto a = offset_on(net, e, p);
    auto b = offset_on(net, e, q);
    if (!a || !b) continue;
    if (net.edges[e].directed && *b < *a) continue;
    Segment seg{e, *a, *b};
    if (!best || abs(seg.to - seg.from) < abs(best->to - best->from)) best = seg;
  }
  return best;
}

class Replay {
 public:
  Replay(const Network& net, const NetTask& task) : net_(net), task_(task) {
    const int n = net.agent_count();
    incident_.resize(net.node_count());
    for (int e = 0; e < net.edge_count(); ++e) {
      incident_[net.edges[e].u].push_back(e);
      incident_[net.edges[e].v].push_back(e);
    }
    tokens_ = task.kind == TaskKind::Convergecast ? n : 1;
    words_ = (tokens_ + 63) / 64;
    at_node_.resize(net.node_count());
    on_edge_.resize(net.edge_count());
    pos_.resize(n);
    energy_.resize(n);
    info_.assign(n, Bits(words_, 0));
    for (int a = 0; a < n; ++a) {
      pos_[a] = NetPoint::at_node(net.agents[a].node);
      energy_[a] = net.agents[a].energy;
      if (task.kind == TaskKind::Convergecast) set_bit(info_[a], a);
      if (task.kind == TaskKind::Broadcast && task.source_agent == a) set_bit(info_[a], 0);
      at_node_[net.agents[a].node].insert(a);
    }
    if (task.kind == TaskKind::Delivery) {
      source_ = canonical(net, task.source);
      target_ = canonical(net, task.target);
      if (source_ == target_) delivered_ = true;
    }
    for (int node = 0; node < net.node_count(); ++node) meet_all(NetPoint::at_node(node), at_node_[node], -1);
    check_goal();
  }

  std::optional<std::string> apply(const NetMove& m) {
    if (m.agent < 0 || m.agent >= net_.agent_count()) return "unknown agent " + std::to_string(m.agent);
    if (m.path.empty()) return std::string("empty path");
    std::vector<NetPoint> path;
    for (const auto& p : m.path) {
      try {
        path.push_back(canonical(net_, p));
      } catch (const InvalidInstance& e) {
        return std::string("path point out of range: ") + e.what();
      }
    }
    if (!(path.front() == pos_[m.agent])) return std::string("move does not start at the agent's position");
    for (std::size_t k = 1; k < path.size(); ++k) {
      auto seg = common_edge(net_, path[k - 1], path[k], incident_);
      if (!seg) return std::string("path is not contiguous");
      if (seg->edge < 0) continue;
      Rational cost = abs(seg->to - seg->from);
      if (cost > energy_[m.agent]) return std::string("negative energy");
      energy_[m.agent] -= cost;
      traverse(m.agent, *seg, path[k]);
    }
    check_goal();
    return std::nullopt;
  }

  std::optional<std::string> apply(const Transfer& t) {
    const int n = net_.agent_count();
    if (t.from < 0 || t.from >= n || t.to < 0 || t.to >= n) return std::string("unknown agent in transfer");
    if (t.from == t.to) return std::string("transfer to itself");
    if (!(pos_[t.from] == pos_[t.to])) return std::string("transfer without meeting");
    if (t.amount < 0) return std::string("negative transfer amount");
    if (t.amount > energy_[t.from]) return std::string("transfer exceeds donor energy");
    energy_[t.from] -= t.amount;
    energy_[t.to] += t.amount;
    check_goal();
    return std::nullopt;
  }

  ValidationReport report() const {
    ValidationReport r;
    r.positions = pos_;
    r.energies = energy_;
    for (const auto& bits : info_) {
      std::vector<int> known;
      for (int k = 0; k < tokens_; ++k)
        if (has(bits, k)) known.push_back(task_.kind == TaskKind::Broadcast && task_.source_agent ? *task_.source_agent : k);
      r.info.push_back(std::move(known));
    }
    r.task_achieved = achieved();
    if (r.task_achieved) r.surplus_at_target = surplus();
    return r;
  }

 private:
  void remove(int a) {
    const auto& p = pos_[a];
    if (p.is_node()) {
      at_node_[p.node].erase(a);
    } else {
      auto& m = on_edge_[p.edge];
      for (auto it = m.find(p.offset); it != m.end() && it->first == p.offset; ++it)
        if (it->second == a) {
          m.erase(it);
          break;
        }
    }
  }

  void place(int a, const NetPoint& p) {
    pos_[a] = p;
    if (p.is_node())
      at_node_[p.node].insert(a);
    else
      on_edge_[p.edge].emplace(p.offset, a);
  }

  // Merges information among `mover` (if >= 0) and all agents in `group` standing at `where`.
  template <class Group>
  void meet_all(const NetPoint& where, const Group& group, int mover) {
    Bits all(words_, 0);
    if (mover >= 0) unite(all, info_[mover]);
    for (int a : group) unite(all, info_[a]);
    if (task_.kind == TaskKind::Delivery && where == source_) set_bit(all, 0);
    if (mover >= 0) unite(info_[mover], all);
    for (int a : group) unite(info_[a], all);
    if (task_.kind == TaskKind::Delivery && where == target_ && has(all, 0) && (mover >= 0 || !group.empty()))
      delivered_ = true;
  }

  void traverse(int a, const Segment& seg, const NetPoint& end) {
    remove(a);
    const auto& edge = net_.edges[seg.edge];
    const Rational lo = min_of(seg.from, seg.to);
    const Rational hi = max_of(seg.from, seg.to);
    // Points on the segment where something happens, keyed by offset.
    std::map<Rational, std::vector<int>> stops;
    auto add_node = [&](int node, const Rational& off) {
      if (lo <= off && off <= hi) {
        auto& v = stops[off];
        v.insert(v.end(), at_node_[node].begin(), at_node_[node].end());
      }
    };
    add_node(edge.u, Rational(0));
    if (edge.v != edge.u) add_node(edge.v, edge.length);
    for (auto it = on_edge_[seg.edge].lower_bound(lo); it != on_edge_[seg.edge].end() && it->first <= hi; ++it)
      stops[it->first].push_back(it->second);
    for (const NetPoint* special : {&source_, &target_})
      if (task_.kind == TaskKind::Delivery)
        if (auto off = offset_on(net_, seg.edge, *special); off && lo <= *off && *off <= hi) stops[*off];

    auto visit = [&](const Rational& off, const std::vector<int>& group) {
      NetPoint here = canonical(net_, NetPoint::on_edge(seg.edge, off));
      meet_all(here, group, a);
    };
    if (seg.from <= seg.to) {
      for (const auto& [off, group] : stops) visit(off, group);
    } else {
      for (auto it = stops.rbegin(); it != stops.rend(); ++it) visit(it->first, it->second);
    }
    place(a, end);
  }

  bool full(const Bits& b) const {
    for (int k = 0; k < tokens_; ++k)
      if (!has(b, k)) return false;
    return true;
  }

  void check_goal() {
    if (task_.kind == TaskKind::Convergecast && !gathered_) {
      for (int a = 0; a < net_.agent_count(); ++a)
        if (full(info_[a]) && (!task_.point || canonical(net_, *task_.point) == pos_[a])) gathered_ = true;
    }
  }

  bool achieved() const {
    switch (task_.kind) {
      case TaskKind::Delivery: return delivered_;
      case TaskKind::Convergecast: return gathered_;
      case TaskKind::Broadcast:
        return std::all_of(info_.begin(), info_.end(), [](const Bits& b) { return has(b, 0); });
    }
    return false;
  }

  Rational energy_at(const NetPoint& p) const {
    Rational sum = 0;
    for (int a = 0; a < net_.agent_count(); ++a)
      if (pos_[a] == p) sum += energy_[a];
    return sum;
  }

  Rational surplus() const {
    if (task_.kind == TaskKind::Delivery) return energy_at(target_);
    if (task_.kind == TaskKind::Broadcast) {
      Rational sum = 0;
      for (const auto& e : energy_) sum += e;
      return sum;
    }
    std::optional<Rational> best;
    for (int a = 0; a < net_.agent_count(); ++a) {
      if (!full(info_[a])) continue;
      if (task_.point && !(canonical(net_, *task_.point) == pos_[a])) continue;
      Rational here = energy_at(pos_[a]);
      if (!best || *best < here) best = here;
    }
    return best.value_or(Rational(0));
  }

  const Network& net_;
  const NetTask& task_;
  std::vector<std::vector<int>> incident_;
  int tokens_ = 1;
  int words_ = 1;
  std::vector<NetPoint> pos_;
  std::vector<Rational> energy_;
  std::vector<Bits> info_;
  std::vector<std::set<int>> at_node_;
  std::vector<std::multimap<Rational, int>> on_edge_;
  NetPoint source_{}, target_{};
  bool delivered_ = false;
  bool gathered_ = false;
};

}  // namespace

ValidationReport validate_schedule(const Network& net, const NetTask& task, const NetSchedule& schedule) {
  check_network(net);
  if (task.kind == TaskKind::Broadcast &&
      (!task.source_agent || *task.source_agent < 0 || *task.source_agent >= net.agent_count()))
    throw PreconditionError("broadcast task needs a valid source agent");
  Replay replay(net, task);
  std::optional<Violation> violation;
  for (std::size_t k = 0; k < schedule.steps.size() && !violation; ++k) {
    auto why = std::visit([&](const auto& step) { return replay.apply(step); }, schedule.steps[k]);
    if (why) violation = Violation{k, *why + " at step " + std::to_string(k)};
  }
  ValidationReport r = replay.report();
  r.ok = !violation;
  r.violation = violation;
  if (violation) r.task_achieved = false;
  return r;
}

ValidationReport validate_schedule(const std::vector<LineAgent>& agents, const LineTask& task,
                                   const LineSchedule& schedule) {
  std::vector<Rational> extra;
  if (task.kind == TaskKind::Delivery) extra = {task.source, task.target};
  if (task.point) extra.push_back(*task.point);
  for (const auto& step : schedule.steps)
    if (const auto* m = std::get_if<LineMove>(&step)) extra.insert(extra.end(), m->path.begin(), m->path.end());
  const LineNetwork ln = line_network(agents, extra);
  ValidationReport r = validate_schedule(ln.net, to_network(ln, task), to_network(ln, schedule));
  for (const auto& p : r.positions) r.coordinates.push_back(coordinate(ln, p));
  return r;
}

ValidationReport validate_schedule(const LineInstance& inst, const LineTask& task, const LineSchedule& schedule) {
  return validate_schedule(to_agents(inst), task, schedule);
}

Rational coordinate(const LineNetwork& ln, const NetPoint& p) {
  if (p.is_node()) return ln.coords.at(p.node);
  return ln.coords.at(ln.net.edges.at(p.edge).u) + p.offset;
}

LineSchedule to_line(const LineNetwork& ln, const NetSchedule& schedule) {
  LineSchedule out;
  for (const auto& step : schedule.steps) {
    if (const auto* m = std::get_if<NetMove>(&step)) {
      std::vector<Rational> path;
      for (const auto& p : m->path) path.push_back(coordinate(ln, p));
      out.move(m->agent, std::move(path));
    } else {
      out.steps.emplace_back(std::get<Transfer>(step));
    }
  }
  return out;
}

}  // namespace agentex::oracle
