#pragma once

#include "agentex/line.hpp"
#include "agentex/model.hpp"

#include "support.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace agentex::testing {

// Schedule mutations the validator must reject. Each returns nullopt when it does not apply.

/// Extends the last move that goes somewhere by more energy than exists in the instance.
inline std::optional<LineSchedule> lengthen_move(const LineSchedule& s, const Rational& total_energy) {
  for (std::size_t k = s.steps.size(); k-- > 0;) {
    const auto* m = std::get_if<LineMove>(&s.steps[k]);
    if (!m || m->path.size() < 2) continue;
    LineSchedule out = s;
    auto& path = std::get<LineMove>(out.steps[k]).path;
    const Rational dir = path.back() < path[path.size() - 2] ? Rational(-1) : Rational(1);
    path.push_back(path.back() + dir * (total_energy + 1));
    return out;
  }
  return std::nullopt;
}

/// Removes the first transfer of a positive amount.
inline std::optional<LineSchedule> delete_transfer(const LineSchedule& s) {
  for (std::size_t k = 0; k < s.steps.size(); ++k) {
    const auto* t = std::get_if<Transfer>(&s.steps[k]);
    if (!t || t->amount <= 0) continue;
    LineSchedule out = s;
    out.steps.erase(out.steps.begin() + static_cast<long>(k));
    return out;
  }
  return std::nullopt;
}

/// Moves a transfer ahead of the move that brought its two agents together.
inline std::optional<LineSchedule> reorder_transfer(const LineSchedule& s) {
  for (std::size_t k = 0; k < s.steps.size(); ++k) {
    const auto* t = std::get_if<Transfer>(&s.steps[k]);
    if (!t) continue;
    for (std::size_t j = k; j-- > 0;) {
      const auto* m = std::get_if<LineMove>(&s.steps[j]);
      if (!m || (m->agent != t->from && m->agent != t->to) || m->path.front() == m->path.back()) continue;
      LineSchedule out = s;
      auto step = out.steps[k];
      out.steps.erase(out.steps.begin() + static_cast<long>(k));
      out.steps.insert(out.steps.begin() + static_cast<long>(j), step);
      return out;
    }
  }
  return std::nullopt;
}

/// Flips the sign of the first transfer of a positive amount.
inline std::optional<LineSchedule> negate_amount(const LineSchedule& s) {
  for (std::size_t k = 0; k < s.steps.size(); ++k) {
    const auto* t = std::get_if<Transfer>(&s.steps[k]);
    if (!t || t->amount <= 0) continue;
    LineSchedule out = s;
    auto& amount = std::get<Transfer>(out.steps[k]).amount;
    amount = -amount;
    return out;
  }
  return std::nullopt;
}

/// Starts the first move somewhere the agent is not.
inline std::optional<LineSchedule> teleport(const LineSchedule& s) {
  for (std::size_t k = 0; k < s.steps.size(); ++k) {
    if (!std::holds_alternative<LineMove>(s.steps[k])) continue;
    LineSchedule out = s;
    auto& path = std::get<LineMove>(out.steps[k]).path;
    path.insert(path.begin(), path.front() + Rational(1, 3));
    return out;
  }
  return std::nullopt;
}

struct Mutation {
  std::string name;
  std::optional<LineSchedule> schedule;
};

inline std::vector<Mutation> all_mutations(const LineSchedule& s, const Rational& total_energy) {
  return {{"lengthen move", lengthen_move(s, total_energy)},
          {"delete transfer", delete_transfer(s)},
          {"reorder steps", reorder_transfer(s)},
          {"negate amount", negate_amount(s)},
          {"teleport", teleport(s)}};
}

struct Golden {
  LineInstance inst;
  LineTask task;
  LineSchedule schedule;
};

/// Delivery schedules with zero surplus that contain a positive transfer, so every operator applies.
inline std::vector<Golden> golden_schedules(std::size_t count = 20, unsigned seed = 2024) {
  std::vector<Golden> out;
  std::mt19937 rng(seed);
  while (out.size() < count) {
    LineInstance inst = random_line(rng, 3 + static_cast<int>(rng() % 5), 8, 12);
    const Rational last = line::forward_potentials(inst).back();
    if (last < 0 || inst.energies.back() < last) continue;
    inst.energies.back() -= last;  // surplus exactly 0
    const LineTask task = LineTask::delivery(inst.positions.front(), inst.positions.back());
    const LineSchedule schedule = line::delivery_schedule(inst);
    bool applies = true;
    for (const auto& m : all_mutations(schedule, Rational(0))) applies = applies && m.schedule.has_value();
    if (applies) out.push_back({std::move(inst), task, schedule});
  }
  return out;
}

}  // namespace agentex::testing
