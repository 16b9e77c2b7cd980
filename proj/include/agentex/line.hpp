#pragma once

#include "agentex/model.hpp"

#include <optional>
#include <vector>

namespace agentex::line {

// All agent and cut indices are 0-based. Cut k separates agents k and k + 1.

/// One relaxation across a gap of length d (the three cases of the forward scan).
Rational potential_step(const Rational& potential, const Rational& d);

/// Forward delivery potentials: fwd[i] >= 0 is the best surplus at a_i after carrying the packet from a_0,
/// a negative value is minus the least energy that must be added there.
std::vector<Rational> forward_potentials(const LineInstance& inst);

/// Potentials for delivering from a_{n-1} leftward, indexed by original agent.
std::vector<Rational> backward_potentials(const LineInstance& inst);

/// DC table: energy that may be suppressed from agent i (negative: deficit) so that agents 0..i
/// can bring agent i's information to every agent on its left.
std::vector<Rational> broadcast_potentials(const LineInstance& inst);

/// DB table: DC of the mirrored instance, indexed by original agent.
std::vector<Rational> broadcast_potentials_back(const LineInstance& inst);

struct Potentials {
  std::vector<Rational> fwd, bwd, dc, db;
};

Potentials all_potentials(const LineInstance& inst);

struct DeliveryDecision {
  bool feasible = false;
  Rational value;  // surplus at the target when feasible, minus the deficit otherwise
};

DeliveryDecision delivery_decide(const LineInstance& inst, const Rational& source, const Rational& target);

/// Schedule for an instance already normalized so that the packet travels from a_0 to a_{n-1}.
/// Throws PreconditionError when delivery is infeasible.
LineSchedule delivery_schedule(const LineInstance& normalized);

/// Full delivery schedule for arbitrary endpoints, in the input's coordinates and agent indices.
LineSchedule plan_delivery(const LineInstance& inst, const Rational& source, const Rational& target);

/// Surplus of the convergecast cut between agents k and k + 1, or nullopt when both sides are in deficit.
std::optional<Rational> cut_surplus(const Rational& left_fwd, const Rational& right_bwd, const Rational& d);

struct ConvergecastDecision {
  bool feasible = false;
  std::optional<std::size_t> cut;         // first cut with non-negative surplus; empty when n == 1
  Rational surplus;                       // surplus at the witness cut, or e(0) when n == 1
  std::vector<std::optional<Rational>> cut_values;
};

ConvergecastDecision convergecast_decide(const LineInstance& inst);

/// Value of the broadcast pair condition at cut k: DC[k] + DB[k+1] - 2 d.
Rational broadcast_cut_value(const Potentials& p, const LineInstance& inst, std::size_t k);

/// Agents able to broadcast, ascending.
std::vector<int> broadcast_set(const LineInstance& inst);

/// Schedule in which `source` informs every agent. Throws PreconditionError unless source is in broadcast_set.
LineSchedule broadcast_schedule(const LineInstance& inst, int source);

}  // namespace agentex::line
