#include "agentex/line.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agentex::line {

Rational potential_step(const Rational& potential, const Rational& d) {
  if (potential >= d) return potential - d;
  if (potential >= 0) return 2 * (potential - d);
  return potential - 2 * d;
}

std::vector<Rational> forward_potentials(const LineInstance& inst) {
  check_line(inst);
  std::vector<Rational> fwd(inst.size());
  fwd[0] = inst.energies[0];
  for (std::size_t i = 1; i < inst.size(); ++i)
    fwd[i] = inst.energies[i] + potential_step(fwd[i - 1], inst.positions[i] - inst.positions[i - 1]);
  return fwd;
}

std::vector<Rational> backward_potentials(const LineInstance& inst) {
  auto m = forward_potentials(mirror(inst));
  std::reverse(m.begin(), m.end());
  return m;
}

std::vector<Rational> broadcast_potentials(const LineInstance& inst) {
  check_line(inst);
  std::vector<Rational> dc(inst.size());
  Rational s = inst.positions[0];
  Rational e = 0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const Rational& a = inst.positions[i];
    const Rational& ei = inst.energies[i];
    if (a > ei + e + s) {
      e += ei;
      dc[i] = s + e - a;
    } else {
      s += (e + ei + max_of(Rational(a - s), Rational(0))) / 2;
      e = 0;
      dc[i] = 2 * (s - a);
    }
  }
  return dc;
}

std::vector<Rational> broadcast_potentials_back(const LineInstance& inst) {
  auto m = broadcast_potentials(mirror(inst));
  std::reverse(m.begin(), m.end());
  return m;
}

Potentials all_potentials(const LineInstance& inst) {
  return {forward_potentials(inst), backward_potentials(inst), broadcast_potentials(inst),
          broadcast_potentials_back(inst)};
}

DeliveryDecision delivery_decide(const LineInstance& inst, const Rational& source, const Rational& target) {
  check_line(inst);
  if (source == target) {
    Rational here = 0;
    for (std::size_t i = 0; i < inst.size(); ++i)
      if (inst.positions[i] == source) here += inst.energies[i];
    return {true, here};
  }
  const auto nd = normalize_delivery(inst, source, target);
  Rational value = forward_potentials(nd.line).back();
  return {value >= 0, value};
}

namespace {

// Replays moves and transfers on a line while recording them.
class Sim {
 public:
  explicit Sim(const LineInstance& inst) : pos_(inst.positions), energy_(inst.energies) {}

  const Rational& pos(int a) const { return pos_[a]; }
  const Rational& energy(int a) const { return energy_[a]; }
  LineSchedule take() { return std::move(schedule_); }

  void give(int from, int to, Rational amount) {
    if (amount <= 0) return;
    schedule_.transfer(from, to, amount);
    energy_[from] -= amount;
    energy_[to] += amount;
  }

  // Walks `agent` to x, stopping to take all energy from every agent in `pool` met on the way.
  // With `partial`, the walk ends early where the energy runs out. Returns the final position.
  Rational sweep(int agent, const Rational& x, const std::vector<char>& pool, bool partial = false) {
    const Rational from = pos_[agent];
    const bool right = from < x;
    std::vector<int> stops;
    for (int j = 0; j < static_cast<int>(pos_.size()); ++j) {
      if (j == agent || !pool[j] || energy_[j] <= 0) continue;
      const auto& p = pos_[j];
      if (right ? (from <= p && p <= x) : (x <= p && p <= from)) stops.push_back(j);
    }
    std::stable_sort(stops.begin(), stops.end(), [&](int a, int b) {
      return right ? pos_[a] < pos_[b] : pos_[b] < pos_[a];
    });
    for (int j : stops) {
      if (!walk(agent, pos_[j], partial)) return pos_[agent];
      give(j, agent, energy_[j]);
    }
    walk(agent, x, partial);
    return pos_[agent];
  }

 private:
  // Returns false if the agent had to stop short of x.
  bool walk(int agent, const Rational& x, bool partial) {
    Rational d = abs(x - pos_[agent]);
    if (d == 0) return true;
    Rational dest = x;
    bool reached = true;
    if (partial && d > energy_[agent]) {
      d = energy_[agent];
      dest = pos_[agent] < x ? Rational(pos_[agent] + d) : Rational(pos_[agent] - d);
      reached = false;
      if (d == 0) return false;
    }
    schedule_.move(agent, {pos_[agent], dest});
    energy_[agent] -= d;
    pos_[agent] = dest;
    return reached;
  }

  std::vector<Rational> pos_;
  std::vector<Rational> energy_;
  LineSchedule schedule_;
};

}  // namespace

LineSchedule delivery_schedule(const LineInstance& normalized) {
  const auto fwd = forward_potentials(normalized);
  if (fwd.back() < 0) throw PreconditionError("delivery is infeasible");
  const std::size_t n = normalized.size();
  const Rational& end = normalized.positions.back();
  const std::vector<char> everyone(n, 1);
  Sim sim(normalized);
  Rational packet = normalized.positions.front();
  for (std::size_t i = 0; i < n && packet != end; ++i) {
    const int agent = static_cast<int>(i);
    if (fwd[i] < 0 || packet > normalized.positions[i]) continue;
    sim.sweep(agent, packet, everyone);
    packet = sim.sweep(agent, end, everyone, true);
  }
  if (packet != end) throw std::logic_error("delivery schedule stopped short of the target");
  return sim.take();
}

LineSchedule plan_delivery(const LineInstance& inst, const Rational& source, const Rational& target) {
  check_line(inst);
  if (source == target) return {};
  const auto nd = normalize_delivery(inst, source, target);
  LineSchedule main = delivery_schedule(nd.line);

  // Outer agents walk inward, each handing its pooled energy to the next one met.
  Sim sim(inst);
  const std::vector<char> none(inst.size(), 0);
  auto fold = [&](const std::vector<int>& order, const Rational& anchor, int anchor_agent) {
    if (order.empty()) return;
    int walker = order[0];
    for (std::size_t k = 1; k <= order.size(); ++k) {
      const Rational& dest = k < order.size() ? inst.positions[order[k]] : anchor;
      if (sim.energy(walker) >= abs(dest - sim.pos(walker))) {
        sim.sweep(walker, dest, none);
        const int next = k < order.size() ? order[k] : anchor_agent;
        if (next >= 0 && next != walker) sim.give(walker, next, sim.energy(walker));
      }
      if (k < order.size()) walker = order[k];
    }
  };
  fold(nd.left_outer, source, nd.representative.front());
  fold(nd.right_outer, target, nd.representative.back());
  LineSchedule out = sim.take();

  auto agent_of = [&](int k) {
    int rep = nd.representative[k];
    if (rep < 0) throw std::logic_error("delivery schedule uses a virtual agent");
    return rep;
  };
  LineSchedule lifted = renumber(main, agent_of);
  if (nd.mirrored)
    for (auto& step : lifted.steps)
      if (auto* m = std::get_if<LineMove>(&step))
        for (auto& x : m->path) x = -x;
  out.append(lifted);
  return out;
}

std::optional<Rational> cut_surplus(const Rational& left_fwd, const Rational& right_bwd, const Rational& d) {
  if (left_fwd >= 0 && right_bwd >= 0) return Rational(left_fwd + right_bwd - d);
  if (left_fwd >= 0) return Rational(left_fwd + right_bwd / 2 - d);
  if (right_bwd >= 0) return Rational(left_fwd / 2 + right_bwd - d);
  return std::nullopt;
}

ConvergecastDecision convergecast_decide(const LineInstance& inst) {
  check_line(inst);
  ConvergecastDecision out;
  const std::size_t n = inst.size();
  if (n == 1) {
    out.feasible = true;
    out.surplus = inst.energies[0];
    return out;
  }
  const auto fwd = forward_potentials(inst);
  const auto bwd = backward_potentials(inst);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    auto value = cut_surplus(fwd[k], bwd[k + 1], inst.positions[k + 1] - inst.positions[k]);
    if (value && *value >= 0 && !out.feasible) {
      out.feasible = true;
      out.cut = k;
      out.surplus = *value;
    }
    out.cut_values.push_back(std::move(value));
  }
  return out;
}

Rational broadcast_cut_value(const Potentials& p, const LineInstance& inst, std::size_t k) {
  return p.dc[k] + p.db[k + 1] - 2 * (inst.positions[k + 1] - inst.positions[k]);
}

namespace {

// Closed interval of doubles, rounded outward after every operation.
struct Interval {
  double lo = 0, hi = 0;
};

Interval enclose(const Rational& v) {
  const double d = v.get_d();
  return {std::nextafter(d, -HUGE_VAL), std::nextafter(d, HUGE_VAL)};
}

Interval operator+(Interval a, Interval b) {
  return {std::nextafter(a.lo + b.lo, -HUGE_VAL), std::nextafter(a.hi + b.hi, HUGE_VAL)};
}

Interval operator-(Interval a, Interval b) {
  return {std::nextafter(a.lo - b.hi, -HUGE_VAL), std::nextafter(a.hi - b.lo, HUGE_VAL)};
}

Interval scaled(Interval a, double f) { return {a.lo * f, a.hi * f}; }  // f is a power of two

// DC entry: exact while the scan state has a short denominator, an enclosure afterwards.
struct Approx {
  std::optional<Rational> exact;
  Interval range;
};

// Denominator size beyond which the scan switches to intervals.
constexpr std::size_t kExactBits = 64;

// Same scan as broadcast_potentials. Returns nullopt when an interval comparison cannot be decided.
std::optional<std::vector<Approx>> broadcast_potentials_filtered(const LineInstance& inst) {
  std::vector<Approx> dc(inst.size());
  Rational s = inst.positions[0];
  Rational e = 0;
  std::optional<Interval> loose;  // set once s is tracked by an interval
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const Rational& a = inst.positions[i];
    const Rational& ei = inst.energies[i];
    if (!loose) {
      if (a > ei + e + s) {
        e += ei;
        dc[i].exact = s + e - a;
      } else {
        s += (e + ei + max_of(Rational(a - s), Rational(0))) / 2;
        e = 0;
        dc[i].exact = 2 * (s - a);
      }
      dc[i].range = enclose(*dc[i].exact);
      if (mpz_sizeinbase(s.get_den().get_mpz_t(), 2) > kExactBits) loose = enclose(s);
      continue;
    }
    // a > ei + e + s  <=>  a - ei - e > s
    const Interval gap = enclose(Rational(a - ei - e));
    if (gap.lo > loose->hi) {
      e += ei;
      dc[i].range = *loose + enclose(Rational(e - a));
      continue;
    }
    if (gap.hi > loose->lo) return std::nullopt;
    const Interval at = enclose(a);
    if (at.lo > loose->hi)
      *loose = scaled(*loose + enclose(Rational(a + e + ei)), 0.5);
    else if (at.hi <= loose->lo)
      *loose = *loose + scaled(enclose(Rational(e + ei)), 0.5);
    else
      return std::nullopt;
    e = 0;
    dc[i].range = scaled(*loose - at, 2);
  }
  return dc;
}

// Sign of a cut value, or nullopt when the enclosure straddles zero.
std::optional<bool> cut_holds(const Approx& left, const Approx& right, const Rational& gap) {
  if (left.exact && right.exact) return *left.exact + *right.exact - 2 * gap >= 0;
  const Interval v = left.range + right.range - enclose(Rational(2 * gap));
  if (v.lo >= 0) return true;
  if (v.hi < 0) return false;
  return std::nullopt;
}

std::vector<int> broadcast_set_exact(const LineInstance& inst) {
  const std::size_t n = inst.size();
  const auto p = all_potentials(inst);
  std::vector<char> in(n, 0);
  for (std::size_t k = 0; k + 1 < n; ++k)
    if (broadcast_cut_value(p, inst, k) >= 0) in[k] = in[k + 1] = 1;
  std::vector<int> out;
  for (std::size_t i = 0; i < n; ++i)
    if (in[i]) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace

std::vector<int> broadcast_set(const LineInstance& inst) {
  check_line(inst);
  const std::size_t n = inst.size();
  if (n == 1) return {0};
  // Exact DC values can need Theta(n) bits each; decide from enclosures and fall back only on doubt.
  auto dc = broadcast_potentials_filtered(inst);
  auto db = dc ? broadcast_potentials_filtered(mirror(inst)) : std::nullopt;
  if (!dc || !db) return broadcast_set_exact(inst);
  std::reverse(db->begin(), db->end());
  std::vector<char> in(n, 0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const auto holds = cut_holds((*dc)[k], (*db)[k + 1], Rational(inst.positions[k + 1] - inst.positions[k]));
    if (!holds) return broadcast_set_exact(inst);
    if (*holds) in[k] = in[k + 1] = 1;
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < n; ++i)
    if (in[i]) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

// A group of agents whose carrier fetches the packet from `reach` and brings it back to `from`.
struct Block {
  int carrier;
  Rational from;
  Rational reach;
};

// One side of a broadcast cut, described in a frame where the cut lies to the right of every agent.
struct Side {
  LineInstance frame;
  std::size_t last = 0;  // frame index of the agent next to the cut
  bool mirrored = false;
  std::size_t n = 0;
  std::vector<Block> blocks;

  int phys(int k) const { return mirrored ? static_cast<int>(n) - 1 - k : k; }
  Rational coord(const Rational& x) const { return mirrored ? Rational(-x) : x; }
};

Side make_side(const LineInstance& inst, std::size_t last, bool mirrored) {
  Side side;
  side.frame = mirrored ? mirror(inst) : inst;
  side.last = last;
  side.mirrored = mirrored;
  side.n = inst.size();
  Rational s = side.frame.positions[0];
  Rational e = 0;
  for (std::size_t i = 0; i <= last; ++i) {
    const Rational& a = side.frame.positions[i];
    const Rational& ei = side.frame.energies[i];
    if (a > ei + e + s) {
      e += ei;
      continue;
    }
    Rational gain = (e + ei + max_of(Rational(a - s), Rational(0))) / 2;
    if (side.blocks.empty() || a > s)
      side.blocks.push_back({static_cast<int>(i), s, s + gain});
    else
      side.blocks.back().reach = s + gain;
    s += gain;
    e = 0;
  }
  return side;
}

// Hands the packet down the blocks of `side`, starting with block `top`.
void run_chain(Sim& sim, const Side& side, const std::vector<char>& pool, bool top_outbound) {
  for (std::size_t b = side.blocks.size(); b-- > 0;) {
    const auto& block = side.blocks[b];
    const int carrier = side.phys(block.carrier);
    if (b + 1 < side.blocks.size() || top_outbound) sim.sweep(carrier, side.coord(block.reach), pool);
    sim.sweep(carrier, side.coord(block.from), pool);
  }
}

}  // namespace

LineSchedule broadcast_schedule(const LineInstance& inst, int source) {
  check_line(inst);
  const std::size_t n = inst.size();
  if (source < 0 || static_cast<std::size_t>(source) >= n) throw PreconditionError("source agent out of range");
  if (n == 1) return {};
  const auto p = all_potentials(inst);
  std::optional<std::size_t> cut;
  for (std::size_t k = 0; k + 1 < n && !cut; ++k)
    if ((static_cast<int>(k) == source || static_cast<int>(k) + 1 == source) && broadcast_cut_value(p, inst, k) >= 0)
      cut = k;
  if (!cut) throw PreconditionError("agent " + std::to_string(source) + " is not in the broadcast set");
  const std::size_t i = *cut;

  Side left = make_side(inst, i, false);
  Side right = make_side(inst, n - 2 - i, true);
  std::vector<char> left_pool(n, 0), right_pool(n, 0);
  for (std::size_t k = 0; k < n; ++k) (k <= i ? left_pool : right_pool)[k] = 1;

  Sim sim(inst);
  const int li = static_cast<int>(i);
  const int ri = li + 1;
  const Rational& dc = p.dc[i];
  const Rational& db = p.db[i + 1];

  if (dc >= 0 && db >= 0) {
    const Rational x = inst.positions[i] + dc / 2;
    const Rational y = inst.positions[i + 1] - db / 2;
    const Rational meet = min_of(max_of(y, inst.positions[i]), x);
    sim.sweep(left.phys(left.blocks.back().carrier), meet, left_pool);
    sim.sweep(right.phys(right.blocks.back().carrier), meet, right_pool);
    run_chain(sim, right, right_pool, false);
    run_chain(sim, left, left_pool, false);
    return sim.take();
  }

  // One side is short of energy: the other side's carrier brings the missing amount to the agent next to the cut.
  const bool left_short = dc < 0;
  const Side& needy = left_short ? left : right;
  const Side& donor = left_short ? right : left;
  const auto& needy_pool = left_short ? left_pool : right_pool;
  const auto& donor_pool = left_short ? right_pool : left_pool;
  const int needy_agent = left_short ? li : ri;
  const Rational deficit = left_short ? Rational(-dc) : Rational(-db);

  const int donor_carrier = donor.phys(donor.blocks.back().carrier);
  sim.sweep(donor_carrier, inst.positions[needy_agent], donor_pool);
  sim.give(donor_carrier, needy_agent, deficit);
  run_chain(sim, donor, donor_pool, false);
  sim.sweep(needy_agent, needy.coord(needy.blocks.back().reach), needy_pool);
  run_chain(sim, needy, needy_pool, true);
  return sim.take();
}

}  // namespace agentex::line
