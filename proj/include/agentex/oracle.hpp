#pragma once

#include "agentex/model.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace agentex::oracle {

struct Violation {
  std::size_t step = 0;
  std::string reason;
};

struct ValidationReport {
  bool ok = true;  // no rule was broken
  std::optional<Violation> violation;
  bool task_achieved = false;
  /// Delivery: energy at the target. Convergecast: energy gathered where a fully informed agent stands.
  /// Broadcast: total energy left.
  Rational surplus_at_target;
  std::vector<NetPoint> positions;
  std::vector<Rational> coordinates;  // filled for line instances
  std::vector<Rational> energies;
  std::vector<std::vector<int>> info;  // tokens known by each agent
};

/// Replays the schedule step by step. Information merges whenever a moving agent passes a standing one.
ValidationReport validate_schedule(const Network& net, const NetTask& task, const NetSchedule& schedule);
ValidationReport validate_schedule(const std::vector<LineAgent>& agents, const LineTask& task,
                                   const LineSchedule& schedule);
ValidationReport validate_schedule(const LineInstance& inst, const LineTask& task, const LineSchedule& schedule);

struct SearchConfig {
  Rational resolution = Rational(1, 4);
  std::size_t max_states = 4'000'000;
};

/// The search hit `max_states` before it could decide.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

/// Largest number of agents the search handles.
inline constexpr int kMaxSearchAgents = 8;

/// Exhaustive search over agent positions on the resolution grid, pooled energies and information sets.
/// Returns a schedule that achieves the task, or nullopt if none exists at this resolution.
std::optional<NetSchedule> search_feasible(const Network& net, const NetTask& task, const SearchConfig& cfg = {});
std::optional<LineSchedule> search_feasible(const LineInstance& inst, const LineTask& task,
                                            const SearchConfig& cfg = {});

/// Best surplus (as in ValidationReport) over all schedules found; nullopt when the task is not achievable.
std::optional<Rational> max_surplus(const Network& net, const NetTask& task, const SearchConfig& cfg = {});
std::optional<Rational> max_surplus(const LineInstance& inst, const LineTask& task, const SearchConfig& cfg = {});

/// Convergecast and broadcast answers from a single search in which every agent starts with its own token.
struct InformationSummary {
  bool convergecast = false;
  std::vector<int> broadcast_sources;  // ascending agent indices
  std::size_t states = 0;
};

InformationSummary explore_information(const Network& net, const SearchConfig& cfg = {});
InformationSummary explore_information(const LineInstance& inst, const SearchConfig& cfg = {});

/// Broadcast sources found by search; the reference the line rule is compared with.
std::vector<int> broadcast_set(const LineInstance& inst, const SearchConfig& cfg = {});

/// True iff some sub-multiset has exactly half the total weight. Supports up to 20 weights.
bool partition_exists(const std::vector<long long>& weights);

/// Coordinates of a point of a line network.
Rational coordinate(const LineNetwork& ln, const NetPoint& p);
LineSchedule to_line(const LineNetwork& ln, const NetSchedule& schedule);

}  // namespace agentex::oracle
