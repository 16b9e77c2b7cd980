#pragma once

#include "agentex/model.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace agentex::testing {

inline Rational q(long num, long den = 1) { return Rational(num, den); }

inline LineInstance line_of(std::vector<long> positions, std::vector<long> energies) {
  LineInstance inst;
  for (long p : positions) inst.positions.emplace_back(p);
  for (long e : energies) inst.energies.emplace_back(e);
  return inst;
}

inline LineInstance example1() { return line_of({0, 10, 20, 30, 40}, {0, 24, 10, 40, 0}); }

/// Every line with n <= 3 agents, strictly increasing integer positions in [0,4] and integer energies in [0,4].
inline std::vector<LineInstance> tiny_lines() {
  std::vector<LineInstance> out;
  std::vector<long> pos;
  std::function<void(int, long)> place = [&](int n, long lo) {
    if (static_cast<int>(pos.size()) == n) {
      int combos = 1;
      for (int i = 0; i < n; ++i) combos *= 5;
      for (int c = 0; c < combos; ++c) {
        std::vector<long> energies;
        for (int i = 0, rest = c; i < n; ++i, rest /= 5) energies.push_back(rest % 5);
        out.push_back(line_of(pos, energies));
      }
      return;
    }
    for (long p = lo; p <= 4; ++p) {
      pos.push_back(p);
      place(n, p + 1);
      pos.pop_back();
    }
  };
  for (int n = 1; n <= 3; ++n) place(n, 0);
  return out;
}

/// Path tree with one node per agent: node i holds agent i.
inline Network path_of(const LineInstance& inst) {
  Network net;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    net.nodes.push_back("p" + std::to_string(i));
    net.agents.push_back({static_cast<int>(i), inst.energies[i]});
    if (i > 0)
      net.edges.push_back({static_cast<int>(i) - 1, static_cast<int>(i),
                           Rational(inst.positions[i] - inst.positions[i - 1])});
  }
  return net;
}

/// Random tree: node i > 0 hangs from a uniform earlier node.
inline Network random_tree(std::mt19937& rng, int nodes, int agents, int max_length, int max_energy,
                           int min_length = 1) {
  Network net;
  for (int i = 0; i < nodes; ++i) net.nodes.push_back("n" + std::to_string(i));
  for (int i = 1; i < nodes; ++i) {
    const int parent = static_cast<int>(rng() % i);
    const long len = min_length + static_cast<long>(rng() % (max_length - min_length + 1));
    net.edges.push_back({parent, i, Rational(len)});
  }
  for (int a = 0; a < agents; ++a)
    net.agents.push_back({static_cast<int>(rng() % nodes), Rational(static_cast<long>(rng() % (max_energy + 1)))});
  return net;
}

inline LineInstance random_line(std::mt19937& rng, int n, int max_gap, int max_energy) {
  LineInstance inst;
  long x = 0;
  for (int i = 0; i < n; ++i) {
    if (i > 0) x += 1 + static_cast<long>(rng() % max_gap);
    inst.positions.emplace_back(x);
    inst.energies.emplace_back(static_cast<long>(rng() % (max_energy + 1)));
  }
  return inst;
}

/// Chain of `k` nodes joined by zero-length edges; its last node has `k` edges of length `len` to leaves
/// holding empty agents. Chain node c < `chain_agents` holds an agent of energy `each`; agent 0 is the source.
inline Network observation_tree(int k, int chain_agents, const Rational& each, const Rational& len) {
  Network net;
  for (int c = 0; c < k; ++c) {
    net.nodes.push_back("c" + std::to_string(c));
    if (c > 0) net.edges.push_back({c - 1, c, Rational(0)});
  }
  for (int a = 0; a < chain_agents; ++a) net.agents.push_back({a, each});
  for (int leaf = 0; leaf < k; ++leaf) {
    net.nodes.push_back("leaf" + std::to_string(leaf));
    net.edges.push_back({k - 1, k + leaf, len});
    net.agents.push_back({k + leaf, Rational(0)});
  }
  return net;
}

}  // namespace agentex::testing
