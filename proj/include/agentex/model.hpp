#pragma once

#include "agentex/rational.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace agentex {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The input violates an instance invariant (negative energy, not a tree, ...).
class InvalidInstance : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Lines

/// Agents on a line with strictly increasing positions.
struct LineInstance {
  std::vector<Rational> positions;
  std::vector<Rational> energies;

  std::size_t size() const { return positions.size(); }
  bool operator==(const LineInstance&) const = default;
};

/// Throws InvalidInstance unless n >= 1, sizes match, positions strictly increase and energies are >= 0.
void check_line(const LineInstance& inst);

/// Reflects the line through the origin: agent i becomes agent n-1-i at -a_i.
LineInstance mirror(const LineInstance& inst);

/// One agent of an unnormalized line input. Several agents may share a position.
struct LineAgent {
  Rational position;
  Rational energy;
};

std::vector<LineAgent> to_agents(const LineInstance& inst);

/// Line input with co-located agents merged.
struct CollapsedLine {
  LineInstance line;
  /// members[k] lists the input agents merged into agent k, ascending; members[k][0] acts for the group.
  std::vector<std::vector<int>> members;
};

/// Merges co-located agents, summing their energy. Positions must be non-decreasing.
CollapsedLine collapse(const std::vector<LineAgent>& agents);

/// Delivery instance rewritten so that the first agent sits at the source and the last at the target.
struct NormalizedDelivery {
  LineInstance line;
  /// True when the instance was mirrored because source > target; coordinates in `line` are then negated.
  bool mirrored = false;
  /// Agent of the input instance acting for each normalized agent, or -1 for a virtual empty agent.
  std::vector<int> representative;
  /// Input agents that lie outside [source, target]. They walk inward before the main schedule.
  std::vector<int> left_outer;
  std::vector<int> right_outer;
};

/// Requires source != target. Agents outside the segment are folded inward; see delivery docs.
NormalizedDelivery normalize_delivery(const LineInstance& inst, const Rational& source, const Rational& target);

// ---------------------------------------------------------------------------
// Networks (trees, graphs, digraphs)

struct Edge {
  int u = 0;
  int v = 0;
  Rational length;
  bool directed = false;
};

struct NetAgent {
  int node = 0;
  Rational energy;
};

/// Weighted network with agents at nodes. Trees and general graphs share this representation.
struct Network {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  std::vector<NetAgent> agents;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  int agent_count() const { return static_cast<int>(agents.size()); }
  /// Index of the node with the given name, or -1.
  int find_node(const std::string& name) const;
};

using TreeInstance = Network;
using GraphInstance = Network;

/// Throws InvalidInstance on bad endpoints, negative lengths or energies.
void check_network(const Network& net);
/// check_network plus: undirected, connected and |E| = |V| - 1.
void check_tree(const Network& net);

/// Either a node or a point on an edge at `offset` from the edge's u endpoint.
struct NetPoint {
  int node = -1;
  int edge = -1;
  Rational offset;

  static NetPoint at_node(int n) { return NetPoint{n, -1, Rational(0)}; }
  static NetPoint on_edge(int e, Rational off) { return NetPoint{-1, e, std::move(off)}; }
  bool is_node() const { return node >= 0; }
  bool operator==(const NetPoint&) const = default;
};

/// Maps edge endpoints to nodes; throws InvalidInstance if the point is out of range.
NetPoint canonical(const Network& net, const NetPoint& p);

/// Path network for a line: one node per distinct coordinate among agents and `extra`, consecutive nodes joined.
struct LineNetwork {
  Network net;
  std::vector<Rational> coords;  // coordinate of each node, ascending

  NetPoint point(const Rational& x) const;  // throws InvalidInstance outside [front, back]
};

LineNetwork line_network(const std::vector<LineAgent>& agents, const std::vector<Rational>& extra = {});

// ---------------------------------------------------------------------------
// Tasks and schedules

enum class TaskKind { Delivery, Convergecast, Broadcast };

const char* task_name(TaskKind kind);
TaskKind parse_task_kind(const std::string& text);

template <class P>
struct BasicTask {
  TaskKind kind = TaskKind::Delivery;
  P source{};                  // delivery
  P target{};                  // delivery
  std::optional<P> point;      // convergecast: optional required meeting point
  std::optional<int> source_agent;  // broadcast

  static BasicTask delivery(P s, P t) {
    BasicTask task;
    task.kind = TaskKind::Delivery;
    task.source = std::move(s);
    task.target = std::move(t);
    return task;
  }
  static BasicTask convergecast(std::optional<P> at = std::nullopt) {
    BasicTask task;
    task.kind = TaskKind::Convergecast;
    task.point = std::move(at);
    return task;
  }
  static BasicTask broadcast(std::optional<int> agent = std::nullopt) {
    BasicTask task;
    task.kind = TaskKind::Broadcast;
    task.source_agent = agent;
    return task;
  }
};

template <class P>
struct BasicMove {
  int agent = 0;
  std::vector<P> path;
  bool operator==(const BasicMove&) const = default;
};

struct Transfer {
  int from = 0;
  int to = 0;
  Rational amount;
  bool operator==(const Transfer&) const = default;
};

template <class P>
using BasicStep = std::variant<BasicMove<P>, Transfer>;

template <class P>
struct BasicSchedule {
  std::vector<BasicStep<P>> steps;

  void move(int agent, std::vector<P> path) { steps.emplace_back(BasicMove<P>{agent, std::move(path)}); }
  void transfer(int from, int to, Rational amount) {
    steps.emplace_back(Transfer{from, to, std::move(amount)});
  }
  void append(const BasicSchedule& other) { steps.insert(steps.end(), other.steps.begin(), other.steps.end()); }
  bool operator==(const BasicSchedule&) const = default;
};

using LineTask = BasicTask<Rational>;
using NetTask = BasicTask<NetPoint>;
using LineMove = BasicMove<Rational>;
using NetMove = BasicMove<NetPoint>;
using LineSchedule = BasicSchedule<Rational>;
using NetSchedule = BasicSchedule<NetPoint>;

/// Converts a line schedule into a schedule on the path network, inserting the nodes crossed by each move.
NetSchedule to_network(const LineNetwork& ln, const LineSchedule& schedule);
NetTask to_network(const LineNetwork& ln, const LineTask& task);

/// Applies an agent renumbering to every step.
template <class P, class F>
BasicSchedule<P> renumber(const BasicSchedule<P>& schedule, F&& agent_map) {
  BasicSchedule<P> out;
  for (const auto& step : schedule.steps) {
    if (const auto* m = std::get_if<BasicMove<P>>(&step)) {
      out.move(agent_map(m->agent), m->path);
    } else {
      const auto& t = std::get<Transfer>(step);
      out.transfer(agent_map(t.from), agent_map(t.to), t.amount);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parsed instance documents

enum class InstanceKind { Line, Tree, Graph, Digraph };

const char* kind_name(InstanceKind kind);

struct Instance {
  InstanceKind kind = InstanceKind::Line;
  std::vector<LineAgent> line;  // kind == Line
  Network network;              // other kinds
  std::optional<LineTask> line_task;
  std::optional<NetTask> net_task;
};

}  // namespace agentex
