#include "agentex/hardness.hpp"

#include <numeric>

namespace agentex::hardness {

namespace {

Rational sum_of(const std::vector<long long>& w) {
  Rational s = 0;
  for (long long x : w) s += Rational(static_cast<long>(x));
  return s;
}

PartitionReduction skeleton(const std::vector<long long>& weights, const Rational& scale, InstanceKind kind) {
  if (weights.empty()) throw InvalidInstance("partition reduction needs at least one weight");
  for (long long w : weights)
    if (w < 0) throw InvalidInstance("partition weights must be non-negative");
  if (scale <= 0) throw InvalidInstance("scale must be positive");
  PartitionReduction r;
  r.weights = weights;
  r.scale = scale;
  r.total = sum_of(weights) * scale;
  r.kind = kind;
  Network& g = r.graph;
  g.nodes = {"s", "a", "t"};
  r.source = 0;
  r.hub = 1;
  r.target = 2;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    r.middle.push_back(g.node_count());
    g.nodes.push_back("x" + std::to_string(k + 1));
  }
  r.task = NetTask::delivery(NetPoint::at_node(r.source), NetPoint::at_node(r.target));
  return r;
}

}  // namespace

PartitionReduction build_digraph_reduction(const std::vector<long long>& weights, const Rational& scale) {
  PartitionReduction r = skeleton(weights, scale, InstanceKind::Digraph);
  Network& g = r.graph;
  const Rational& e = r.total;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const Rational w = Rational(static_cast<long>(weights[k])) * scale;
    g.edges.push_back({r.middle[k], r.source, Rational(w / 3), true});
    g.edges.push_back({r.middle[k], r.hub, Rational(0), true});
    g.agents.push_back({r.middle[k], w});
  }
  g.edges.push_back({r.source, r.hub, Rational(e / 3), true});
  g.edges.push_back({r.hub, r.target, Rational(e / 2), true});
  return r;
}

PartitionReduction build_graph_reduction(const std::vector<long long>& weights, const Rational& scale) {
  PartitionReduction r = skeleton(weights, scale, InstanceKind::Graph);
  Network& g = r.graph;
  const Rational& e = r.total;
  g.agents.push_back({r.source, Rational(0)});
  g.agents.push_back({r.hub, Rational(0)});
  g.agents.push_back({r.target, Rational(0)});
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const Rational w = Rational(static_cast<long>(weights[k])) * scale;
    g.edges.push_back({r.middle[k], r.source, Rational(w / 3 + e), false});
    g.edges.push_back({r.middle[k], r.hub, e, false});
    g.agents.push_back({r.middle[k], Rational(w + e)});
  }
  g.edges.push_back({r.source, r.hub, Rational(e / 3), false});
  g.edges.push_back({r.hub, r.target, Rational(e / 2), false});
  return r;
}

NetTask convergecast_task(const PartitionReduction& r) {
  return NetTask::convergecast(NetPoint::at_node(r.target));
}

NetTask broadcast_task(const PartitionReduction& r) {
  for (int k = 0; k < r.graph.agent_count(); ++k)
    if (r.graph.agents[k].node == r.source) return NetTask::broadcast(k);
  throw PreconditionError("no agent at s; broadcast needs the undirected gadget");
}

bool analytic_feasibility(const std::vector<long long>& to_source, const std::vector<long long>& to_hub) {
  const Rational alpha = sum_of(to_source), beta = sum_of(to_hub);
  const Rational e = alpha + beta;
  return 2 * alpha / 3 >= e / 3 && alpha / 3 + 2 * beta / 3 >= e / 2;
}

bool analytic_feasible(const std::vector<long long>& weights) {
  const std::size_t n = weights.size();
  if (n > 24) throw PreconditionError("analytic_feasible supports at most 24 weights");
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    std::vector<long long> first, second;
    for (std::size_t k = 0; k < n; ++k) ((mask >> k) & 1 ? first : second).push_back(weights[k]);
    if (analytic_feasibility(first, second)) return true;
  }
  return false;
}

}  // namespace agentex::hardness
