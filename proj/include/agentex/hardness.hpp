#pragma once

#include "agentex/model.hpp"

#include <vector>

namespace agentex::hardness {

/// Partition instance turned into a delivery network, with the role of each node.
struct PartitionReduction {
  std::vector<long long> weights;
  Rational scale = 1;
  Rational total;  // scaled sum of the weights
  InstanceKind kind = InstanceKind::Digraph;
  Network graph;
  int source = 0;  // s
  int target = 0;  // t
  int hub = 0;     // a
  std::vector<int> middle;  // one node per weight, in input order
  NetTask task;             // delivery from s to t
};

/// Directed gadget: x -> s of length w/3, x -> a of length 0, s -> a of length E/3, a -> t of length E/2,
/// one agent of energy w at every middle node and none elsewhere. Lengths and energies are multiplied by `scale`.
PartitionReduction build_digraph_reduction(const std::vector<long long>& weights, const Rational& scale = 1);

/// Undirected gadget: middle energies and middle edges grow by E, and every node hosts an agent
/// (zero energy outside the middle nodes).
PartitionReduction build_graph_reduction(const std::vector<long long>& weights, const Rational& scale = 1);

/// Convergecast at t and broadcast from the agent at s on the undirected gadget.
NetTask convergecast_task(const PartitionReduction& r);
NetTask broadcast_task(const PartitionReduction& r);

/// Whether delivery succeeds when the weights in `to_source` walk to s and the others walk to a.
bool analytic_feasibility(const std::vector<long long>& to_source, const std::vector<long long>& to_hub);

/// Whether some split passes analytic_feasibility (exhaustive, at most 24 weights).
bool analytic_feasible(const std::vector<long long>& weights);

}  // namespace agentex::hardness
