#include "agentex/line.hpp"
#include "agentex/oracle.hpp"
#include "agentex/tree.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

namespace agentex {
namespace {

using testing::q;

oracle::SearchConfig grid(const Rational& g) {
  oracle::SearchConfig cfg;
  cfg.resolution = g;
  return cfg;
}

std::vector<LineInstance> random_lines(unsigned seed, int count, int max_n = 8) {
  std::mt19937 rng(seed);
  std::vector<LineInstance> out;
  for (int i = 0; i < count; ++i) out.push_back(testing::random_line(rng, 1 + static_cast<int>(rng() % max_n), 9, 12));
  return out;
}

LineInstance shifted(LineInstance inst, const Rational& c) {
  for (auto& p : inst.positions) p += c;
  return inst;
}

LineInstance scaled(LineInstance inst, const Rational& c) {
  for (auto& p : inst.positions) p *= c;
  for (auto& e : inst.energies) e *= c;
  return inst;
}

std::vector<Rational> times(std::vector<Rational> v, const Rational& c) {
  for (auto& x : v) x *= c;
  return v;
}

// ---------------------------------------------------------------------------
// Line model

TEST(LineProperties, MirrorIsAnInvolution) {
  for (const auto& inst : random_lines(1, 200)) EXPECT_EQ(mirror(mirror(inst)), inst);
}

TEST(LineProperties, TranslationLeavesEverythingUnchanged) {
  for (const auto& inst : random_lines(2, 200)) {
    const auto moved = shifted(inst, q(-37, 3));
    const auto a = line::all_potentials(inst), b = line::all_potentials(moved);
    EXPECT_EQ(a.fwd, b.fwd);
    EXPECT_EQ(a.bwd, b.bwd);
    EXPECT_EQ(a.dc, b.dc);
    EXPECT_EQ(a.db, b.db);
    EXPECT_EQ(line::convergecast_decide(inst).cut_values, line::convergecast_decide(moved).cut_values);
    EXPECT_EQ(line::broadcast_set(inst), line::broadcast_set(moved));
    const auto d1 = line::delivery_decide(inst, inst.positions.front(), inst.positions.back());
    const auto d2 = line::delivery_decide(moved, moved.positions.front(), moved.positions.back());
    EXPECT_EQ(d1.feasible, d2.feasible);
    EXPECT_EQ(d1.value, d2.value);
  }
}

TEST(LineProperties, ScalingMultipliesPotentialsAndKeepsDecisions) {
  for (const Rational c : {q(3), q(2, 7)}) {
    for (const auto& inst : random_lines(3, 150)) {
      const auto big = scaled(inst, c);
      const auto a = line::all_potentials(inst), b = line::all_potentials(big);
      EXPECT_EQ(times(a.fwd, c), b.fwd);
      EXPECT_EQ(times(a.bwd, c), b.bwd);
      EXPECT_EQ(times(a.dc, c), b.dc);
      EXPECT_EQ(times(a.db, c), b.db);
      const auto c1 = line::convergecast_decide(inst), c2 = line::convergecast_decide(big);
      EXPECT_EQ(c1.feasible, c2.feasible);
      EXPECT_EQ(Rational(c1.surplus * c), c2.surplus);
      EXPECT_EQ(line::broadcast_set(inst), line::broadcast_set(big));
    }
  }
}

TEST(LineProperties, NormalizeNeverAddsEnergyOrChangesFeasibility) {
  std::mt19937 rng(4);
  for (const auto& inst : random_lines(4, 300)) {
    const Rational s(static_cast<long>(rng() % 60)), t(static_cast<long>(rng() % 60));
    if (s == t) continue;
    const auto n = normalize_delivery(inst, s, t);
    Rational before = 0, after = 0;
    for (const auto& e : inst.energies) before += e;
    for (const auto& e : n.line.energies) after += e;
    EXPECT_LE(after, before);
    const bool normalized_ok = line::forward_potentials(n.line).back() >= 0;
    EXPECT_EQ(normalized_ok, line::delivery_decide(inst, s, t).feasible);
  }
}

TEST(LineProperties, NormalizeAgreesWithOracleOnTinyLines) {
  const auto family = testing::tiny_lines();
  int checked = 0;
  for (std::size_t i = 0; i < family.size(); i += 23) {
    const auto& inst = family[i];
    for (const auto& [s, t] : {std::pair{q(0), q(4)}, std::pair{q(3), q(1)}}) {
      const auto n = normalize_delivery(inst, s, t);
      const bool normalized_ok = line::forward_potentials(n.line).back() >= 0;
      const bool found = oracle::search_feasible(inst, LineTask::delivery(s, t), grid(q(1, 4))).has_value();
      EXPECT_EQ(normalized_ok, found) << "instance " << i << " from " << s << " to " << t;
      ++checked;
    }
  }
  EXPECT_GT(checked, 120);
}

// ---------------------------------------------------------------------------
// Line algorithms

TEST(LineProperties, MoreEnergyNeverHurts) {
  std::mt19937 rng(5);
  for (const auto& inst : random_lines(5, 300)) {
    auto richer = inst;
    const std::size_t i = rng() % inst.size();
    richer.energies[i] += Rational(static_cast<long>(1 + rng() % 5), 2);
    const auto before = line::forward_potentials(inst), after = line::forward_potentials(richer);
    for (std::size_t j = i; j < inst.size(); ++j) EXPECT_GE(after[j], before[j]);
    const auto& s = inst.positions.front();
    const auto& t = inst.positions.back();
    if (line::delivery_decide(inst, s, t).feasible) EXPECT_TRUE(line::delivery_decide(richer, s, t).feasible);
    if (line::convergecast_decide(inst).feasible) EXPECT_TRUE(line::convergecast_decide(richer).feasible);
    const auto rich_set = line::broadcast_set(richer);
    for (int a : line::broadcast_set(inst))
      EXPECT_TRUE(std::binary_search(rich_set.begin(), rich_set.end(), a)) << "agent " << a << " lost";
  }
}

TEST(LineProperties, DeficitIsExactlyTheMissingEnergy) {
  int seen = 0;
  for (const auto& inst : random_lines(6, 300)) {
    const Rational last = line::forward_potentials(inst).back();
    if (last >= 0) continue;
    auto topped = inst;
    topped.energies.back() -= last;
    EXPECT_EQ(line::forward_potentials(topped).back(), 0);
    ++seen;
  }
  EXPECT_GT(seen, 30);
}

TEST(LineProperties, DeliveryScheduleEndsWithTheSurplus) {
  for (const auto& inst : random_lines(7, 300)) {
    const auto& s = inst.positions.front();
    const auto& t = inst.positions.back();
    const auto d = line::delivery_decide(inst, s, t);
    if (!d.feasible) continue;
    const auto report = oracle::validate_schedule(inst, LineTask::delivery(s, t), line::plan_delivery(inst, s, t));
    ASSERT_TRUE(report.ok) << report.violation->reason;
    EXPECT_TRUE(report.task_achieved);
    EXPECT_EQ(report.surplus_at_target, d.value);
  }
}

TEST(LineProperties, SuppressingMoreThanTheSurplusBreaksDelivery) {
  for (const auto& inst : random_lines(8, 300)) {
    const auto& s = inst.positions.front();
    const auto& t = inst.positions.back();
    const auto d = line::delivery_decide(inst, s, t);
    if (!d.feasible || inst.energies.back() < d.value) continue;
    auto tight = inst;
    tight.energies.back() -= d.value;
    EXPECT_TRUE(line::delivery_decide(tight, s, t).feasible);
    if (tight.energies.back() == 0) continue;
    tight.energies.back() -= std::min(tight.energies.back(), Rational(1, 100));
    EXPECT_FALSE(line::delivery_decide(tight, s, t).feasible);
  }
}

TEST(LineProperties, SuppressingMoreThanTheCutSurplusBreaksThatCut) {
  const Rational eps(1, 100);
  int checked = 0;
  for (const auto& inst : random_lines(9, 400)) {
    const auto c = line::convergecast_decide(inst);
    if (!c.feasible || !c.cut) continue;
    const std::size_t k = *c.cut;
    const auto p = line::all_potentials(inst);
    // The side next to the cut that carries its potential into the cut; its nearest agent gives up energy.
    const bool left_carries = p.fwd[k] >= 0 && (p.bwd[k + 1] < 0 || p.fwd[k] - c.surplus - eps >= 0);
    const std::size_t agent = left_carries ? k : k + 1;
    const Rational side = left_carries ? p.fwd[k] : p.bwd[k + 1];
    if (side - c.surplus - eps < 0 || inst.energies[agent] < c.surplus + eps) continue;
    auto exact = inst, over = inst;
    exact.energies[agent] -= c.surplus;
    over.energies[agent] -= c.surplus + eps;
    EXPECT_EQ(line::convergecast_decide(exact).cut_values[k], std::optional<Rational>(0));
    EXPECT_EQ(line::convergecast_decide(over).cut_values[k], std::optional<Rational>(-eps));
    ++checked;
  }
  EXPECT_GT(checked, 30);
}

TEST(LineProperties, MirrorDuality) {
  for (const auto& inst : random_lines(10, 300)) {
    const auto m = mirror(inst);
    auto fwd_of_mirror = line::forward_potentials(m);
    std::reverse(fwd_of_mirror.begin(), fwd_of_mirror.end());
    EXPECT_EQ(line::backward_potentials(inst), fwd_of_mirror);
    const int n = static_cast<int>(inst.size());
    std::vector<int> expected;
    for (int a : line::broadcast_set(inst)) expected.push_back(n - 1 - a);
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(line::broadcast_set(m), expected);
  }
}

// ---------------------------------------------------------------------------
// Trees

TEST(TreeProperties, PathEmbeddingMatchesLine) {
  for (const auto& inst : testing::tiny_lines()) {
    if (inst.size() < 2) continue;
    const Network path = testing::path_of(inst);
    const auto d_line = line::delivery_decide(inst, inst.positions.front(), inst.positions.back());
    const auto d_tree = tree::tree_delivery(path, NetPoint::at_node(0), NetPoint::at_node(path.node_count() - 1));
    EXPECT_EQ(d_line.feasible, d_tree.feasible);
    EXPECT_EQ(d_line.value, d_tree.value);
    const auto c_line = line::convergecast_decide(inst);
    const auto c_tree = tree::convergecast_points(path);
    EXPECT_EQ(c_line.feasible, c_tree.feasible);
    for (std::size_t k = 0; k + 1 < inst.size(); ++k) EXPECT_EQ(c_line.cut_values[k], c_tree.edges[k].surplus);
  }
}

// The line rule is conservative: every agent it accepts is also a tree broadcast source on the path.
// Equality is reported by the acceptance suite.
TEST(TreeProperties, PathEmbeddingKeepsEveryLineBroadcastSource) {
  for (const auto& inst : testing::tiny_lines()) {
    const auto on_tree = tree::broadcast_sources(testing::path_of(inst));
    for (int a : line::broadcast_set(inst))
      EXPECT_TRUE(std::binary_search(on_tree.begin(), on_tree.end(), a)) << "agent " << a;
  }
}

// Potential of the side of `node` away from edge `via`, rooted at `node` from scratch.
Rational rooted_potential(const Network& t, int node, int via) {
  Rational value = 0;
  for (const auto& a : t.agents)
    if (a.node == node) value += a.energy;
  for (int e = 0; e < t.edge_count(); ++e) {
    if (e == via) continue;
    const auto& edge = t.edges[e];
    if (edge.u != node && edge.v != node) continue;
    const int other = edge.u == node ? edge.v : edge.u;
    value += tree::potential_step(rooted_potential(t, other, e), edge.length);
  }
  return value;
}

TEST(TreeProperties, ReroutingMatchesRootingFromScratch) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int nodes = 2 + static_cast<int>(rng() % 7);
    const Network t = testing::random_tree(rng, nodes, 1 + static_cast<int>(rng() % 5), 4, 6, 0);
    const auto pot = tree::all_edge_potentials(t);
    for (int e = 0; e < t.edge_count(); ++e) {
      EXPECT_EQ(pot.toward_v(e), rooted_potential(t, t.edges[e].u, e));
      EXPECT_EQ(pot.toward_u(e), rooted_potential(t, t.edges[e].v, e));
    }
  }
}

// Star-heavy trees so that ternarize has work to do.
Network bushy_tree(std::mt19937& rng) {
  Network t;
  const int nodes = 5 + static_cast<int>(rng() % 4);
  for (int i = 0; i < nodes; ++i) t.nodes.push_back("n" + std::to_string(i));
  for (int i = 1; i < nodes; ++i)
    t.edges.push_back({static_cast<int>(rng() % std::min(i, 2)), i, Rational(static_cast<long>(1 + rng() % 3))});
  const int agents = 1 + static_cast<int>(rng() % 4);
  for (int a = 0; a < agents; ++a)
    t.agents.push_back({static_cast<int>(rng() % nodes), Rational(static_cast<long>(rng() % 7))});
  return t;
}

TEST(TreeProperties, TernarizeIsTransparent) {
  std::mt19937 rng(12);
  int split = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Network t = bushy_tree(rng);
    const auto d = tree::ternarize(t);
    if (d.tree.node_count() > t.node_count()) ++split;
    const auto before = tree::all_edge_potentials(t), after = tree::all_edge_potentials(d.tree);
    for (int e = 0; e < d.tree.edge_count(); ++e) {
      const int o = d.edge_origin[e];
      if (o < 0) continue;
      const bool same_way = d.node_origin[d.tree.edges[e].u] == t.edges[o].u;
      EXPECT_EQ(after.toward_v(e), same_way ? before.toward_v(o) : before.toward_u(o));
      EXPECT_EQ(after.toward_u(e), same_way ? before.toward_u(o) : before.toward_v(o));
    }
    EXPECT_EQ(tree::convergecast_points(t).feasible, tree::convergecast_points(d.tree).feasible);
    const auto s = NetPoint::at_node(0), target = NetPoint::at_node(t.node_count() - 1);
    const auto d1 = tree::tree_delivery(t, s, target), d2 = tree::tree_delivery(d.tree, s, target);
    EXPECT_EQ(d1.feasible, d2.feasible);
    EXPECT_EQ(d1.value, d2.value);
    std::vector<int> mapped;
    for (int v : tree::broadcast_sources(d.tree)) mapped.push_back(d.node_origin[v]);
    std::sort(mapped.begin(), mapped.end());
    mapped.erase(std::unique(mapped.begin(), mapped.end()), mapped.end());
    EXPECT_EQ(tree::broadcast_sources(t), mapped);
  }
  EXPECT_GT(split, 50);
}

// ---------------------------------------------------------------------------
// Oracle

TEST(OracleProperties, FinerGridNeverLosesASchedule) {
  const auto family = testing::tiny_lines();
  int feasible = 0;
  for (std::size_t i = 0; i < family.size(); i += 5) {
    const auto& inst = family[i];
    for (const auto& task : {LineTask::delivery(inst.positions.front(), inst.positions.back()),
                             LineTask::convergecast(), LineTask::broadcast(0)}) {
      if (!oracle::search_feasible(inst, task, grid(q(1, 2)))) continue;
      ++feasible;
      EXPECT_TRUE(oracle::search_feasible(inst, task, grid(q(1, 4)))) << "instance " << i;
    }
  }
  EXPECT_GT(feasible, 100);
}

TEST(OracleProperties, FoundSchedulesValidate) {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 150; ++trial) {
    const auto inst = testing::random_line(rng, 1 + static_cast<int>(rng() % 3), 3, 5);
    for (const auto& task : {LineTask::delivery(inst.positions.front(), inst.positions.back()),
                             LineTask::convergecast(), LineTask::broadcast(0)}) {
      const auto s = oracle::search_feasible(inst, task, grid(q(1, 2)));
      if (!s) continue;
      const auto report = oracle::validate_schedule(inst, task, *s);
      EXPECT_TRUE(report.ok && report.task_achieved) << "trial " << trial;
    }
  }
}

}  // namespace
}  // namespace agentex
