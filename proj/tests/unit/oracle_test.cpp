#include "agentex/hardness.hpp"
#include "agentex/line.hpp"
#include "agentex/oracle.hpp"

#include "mutations.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <numeric>

namespace agentex {
namespace {

using testing::example1;
using testing::line_of;
using testing::q;

oracle::SearchConfig grid(const Rational& g) {
  oracle::SearchConfig cfg;
  cfg.resolution = g;
  return cfg;
}

Rational total_energy(const LineInstance& inst) {
  return std::accumulate(inst.energies.begin(), inst.energies.end(), Rational(0));
}

TEST(Validator, AcceptsExample1Schedule) {
  const auto inst = example1();
  const auto r = oracle::validate_schedule(inst, LineTask::delivery(q(0), q(40)), line::delivery_schedule(inst));
  EXPECT_TRUE(r.ok);
  EXPECT_TRUE(r.task_achieved);
  EXPECT_EQ(r.surplus_at_target, q(8));
}

TEST(Validator, LengthenedMoveRunsOutOfEnergy) {
  const auto inst = example1();
  const auto s = testing::lengthen_move(line::delivery_schedule(inst), total_energy(inst));
  ASSERT_TRUE(s);
  const auto r = oracle::validate_schedule(inst, LineTask::delivery(q(0), q(40)), *s);
  ASSERT_FALSE(r.ok);
  EXPECT_NE(r.violation->reason.find("negative energy at step"), std::string::npos) << r.violation->reason;
}

TEST(Validator, TransferWithoutMeeting) {
  LineSchedule s;
  s.transfer(0, 1, q(1));
  const auto r = oracle::validate_schedule(line_of({0, 10}, {5, 5}), LineTask::delivery(q(0), q(10)), s);
  ASSERT_FALSE(r.ok);
  EXPECT_NE(r.violation->reason.find("transfer without meeting"), std::string::npos);
  EXPECT_EQ(r.violation->step, 0u);
}

TEST(Validator, InformationMergesWhilePassing) {
  // Agent 0 walks past agent 1 to the far end; agent 1 learns agent 0's token on the way.
  LineSchedule s;
  s.move(0, {q(0), q(10)});
  const auto r = oracle::validate_schedule(line_of({0, 5, 10}, {10, 0, 0}), LineTask::broadcast(0), s);
  EXPECT_TRUE(r.ok && r.task_achieved);
}

TEST(Validator, PacketNeedsACarrier) {
  LineSchedule s;
  s.move(1, {q(5), q(10)});
  const auto r = oracle::validate_schedule(line_of({0, 5, 10}, {0, 10, 0}), LineTask::delivery(q(0), q(10)), s);
  EXPECT_TRUE(r.ok);
  EXPECT_FALSE(r.task_achieved);
}

TEST(Validator, MutationsAreRejected) {
  for (const auto& g : testing::golden_schedules(5)) {
    const auto base = oracle::validate_schedule(g.inst, g.task, g.schedule);
    ASSERT_TRUE(base.ok && base.task_achieved);
    EXPECT_EQ(base.surplus_at_target, q(0));
    for (const auto& m : testing::all_mutations(g.schedule, total_energy(g.inst))) {
      ASSERT_TRUE(m.schedule) << m.name;
      const auto r = oracle::validate_schedule(g.inst, g.task, *m.schedule);
      EXPECT_FALSE(r.ok && r.task_achieved) << m.name;
    }
  }
}

TEST(Search, FindsSimpleDelivery) {
  const auto s = oracle::search_feasible(line_of({0, 2}, {2, 0}), LineTask::delivery(q(0), q(2)));
  ASSERT_TRUE(s);
  const auto r = oracle::validate_schedule(line_of({0, 2}, {2, 0}), LineTask::delivery(q(0), q(2)), *s);
  EXPECT_TRUE(r.ok && r.task_achieved);
}

TEST(Search, NoScheduleWithDeficit) {
  EXPECT_FALSE(oracle::search_feasible(line_of({0, 4}, {1, 5}), LineTask::delivery(q(0), q(4)), grid(q(1, 4))));
}

TEST(Search, PartitionDigraphWithEqualSplit) {
  const auto r = hardness::build_digraph_reduction({1, 1}, q(6));
  const auto s = oracle::search_feasible(r.graph, r.task, grid(q(1)));
  ASSERT_TRUE(s);
  const auto v = oracle::validate_schedule(r.graph, r.task, *s);
  EXPECT_TRUE(v.ok && v.task_achieved);
}

TEST(Search, BudgetIsEnforced) {
  oracle::SearchConfig cfg = grid(q(1, 8));
  cfg.max_states = 50;
  EXPECT_THROW(oracle::search_feasible(example1(), LineTask::delivery(q(0), q(40)), cfg), oracle::BudgetExhausted);
}

TEST(MaxSurplus, ExactEnergy) {
  EXPECT_EQ(oracle::max_surplus(line_of({0, 10}, {10, 0}), LineTask::delivery(q(0), q(10))),
            std::optional<Rational>(q(0)));
}

TEST(MaxSurplus, MatchesLineDeliveryWithFractionalHandover) {
  LineInstance inst;
  for (long p = 0; p <= 3; ++p) inst.positions.emplace_back(p);
  inst.energies = {q(0), q(5, 2), q(1), q(3)};
  const auto task = LineTask::delivery(q(0), q(3));
  EXPECT_EQ(oracle::max_surplus(inst, task, grid(q(1, 4))), std::optional<Rational>(q(1)));
  EXPECT_EQ(line::delivery_decide(inst, q(0), q(3)).value, q(1));
}

TEST(MaxSurplus, ScaledConvergecast) {
  LineInstance inst{{q(0), q(5)}, {q(7, 2), q(7, 2)}};
  EXPECT_EQ(oracle::max_surplus(inst, LineTask::convergecast(), grid(q(1, 4))), std::optional<Rational>(q(2)));
}

TEST(Explore, TwoAgentAnswers) {
  const auto info = oracle::explore_information(line_of({0, 10}, {10, 10}));
  EXPECT_TRUE(info.convergecast);
  EXPECT_EQ(info.broadcast_sources, (std::vector<int>{0, 1}));
  const auto none = oracle::explore_information(line_of({0, 10}, {4, 4}));
  EXPECT_FALSE(none.convergecast);
  EXPECT_TRUE(none.broadcast_sources.empty());
}

TEST(PartitionExists, Examples) {
  EXPECT_TRUE(oracle::partition_exists({1, 2, 3}));
  EXPECT_FALSE(oracle::partition_exists({1, 2, 4}));
  EXPECT_TRUE(oracle::partition_exists({}));
  EXPECT_FALSE(oracle::partition_exists({1, 2}));
}

TEST(Coordinates, LineRoundTrip) {
  const auto ln = line_network({{q(0), q(1)}, {q(7), q(1)}}, {q(3)});
  LineSchedule s;
  s.move(0, {q(0), q(5)});
  EXPECT_EQ(oracle::to_line(ln, to_network(ln, s)), [] {
    LineSchedule e;
    e.move(0, {q(0), q(3), q(5)});
    return e;
  }());
}

}  // namespace
}  // namespace agentex
