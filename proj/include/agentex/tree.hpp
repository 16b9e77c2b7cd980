#pragma once

#include "agentex/model.hpp"

#include <optional>
#include <vector>

namespace agentex::tree {

/// A tree derived from another one. node_origin gives the original node at the same place
/// (nodes added by ternarize map to the node they split); edge_origin is -1 for added edges.
struct DerivedTree {
  Network tree;
  std::vector<int> node_origin;
  std::vector<int> edge_origin;
};

/// Repeatedly removes leaves without agents, except nodes listed in `keep`. Throws InvalidInstance without agents.
DerivedTree truncate(const Network& tree, const std::vector<int>& keep = {});

/// Splits every node of degree k > 3 into a chain of k - 2 nodes joined by zero-length edges.
/// The original node keeps its index and its agents.
DerivedTree ternarize(const Network& tree);

/// Same relaxation as on the line.
Rational potential_step(const Rational& potential, const Rational& d);

/// Potential of directed edge `2e` (from edges[e].u towards edges[e].v) and `2e + 1` (the reverse):
/// the best energy left at the tail after gathering every packet of the tail's side there.
struct EdgePotentials {
  std::vector<Rational> value;

  const Rational& toward_v(int e) const { return value[2 * e]; }  // side of u, gathered at u
  const Rational& toward_u(int e) const { return value[2 * e + 1]; }
};

EdgePotentials all_edge_potentials(const Network& tree);

struct EdgeReport {
  int edge = 0;
  std::optional<Rational> surplus;  // cut surplus as on the line; nullopt if both sides are short
  std::optional<std::pair<Rational, Rational>> interval;  // convergecast offsets from edges[edge].u
};

struct ConvergecastResult {
  bool feasible = false;
  std::vector<EdgeReport> edges;  // indexed like the input's edges (removed edges get no interval)
  std::optional<int> node;        // set when the truncated tree is a single node
};

/// Offsets x in [0, d] where both sides' information can be gathered. Empty if none.
std::optional<std::pair<Rational, Rational>> meeting_interval(const Rational& left, const Rational& right,
                                                              const Rational& d);

ConvergecastResult convergecast_points(const Network& tree);

struct DeliveryResult {
  bool feasible = false;
  Rational value;
  NetSchedule schedule;  // set when feasible
  LineInstance path_line;  // delivery reduced to the s-t path
};

DeliveryResult tree_delivery(const Network& tree, const NetPoint& source, const NetPoint& target);

/// Energy a subtree can send to its root, walking every agent toward the root only.
Rational deliverable(const Network& tree, int root, int parent);

// ---------------------------------------------------------------------------
// Broadcast

/// Default bound on the number of agents handled by the broadcast tables.
inline constexpr int kBroadcastLimit = 64;

/// Entry of a broadcast table: best net energy, or nullopt when infeasible.
using Cell = std::optional<Rational>;

/// table[i][j]: i informed agents without own energy enter the tail side of the directed edge at its tail
/// (for 2e: at edges[e].u, for the side of u); every agent of that side is informed afterwards and j agents
/// stand at the tail. The value is the best energy left at the tail minus energy owed to the entrants.
struct BroadcastTable {
  std::vector<std::vector<Cell>> cell;
  int agents = 0;  // agents on the tail side
  /// Energy left at the tail once every agent of the side has walked there uninformed, pooling on the way.
  std::optional<Rational> gathered;
};

struct BroadcastTables {
  std::vector<BroadcastTable> table;  // by directed edge id as in EdgePotentials
};

BroadcastTables broadcast_tables(const Network& tree, int limit = kBroadcastLimit);

/// Whether the agents at `root` can inform the whole tree, given tables of all its incident edges.
bool is_broadcast_source(const Network& tree, const BroadcastTables& tables, int root);

/// Nodes hosting an agent able to broadcast, ascending. High-degree nodes are ternarized internally.
std::vector<int> broadcast_sources(const Network& tree, int limit = kBroadcastLimit);

}  // namespace agentex::tree
