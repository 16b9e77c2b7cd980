#include "agentex/oracle.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <deque>
#include <limits>
#include <unordered_map>

namespace agentex::oracle {

namespace {

constexpr int kMax = kMaxSearchAgents;

// Network discretized at the search resolution. Vertices 0..N-1 are the network's nodes.
struct Grid {
  std::vector<std::vector<std::pair<int, int>>> adj;  // (vertex, cost in units)
  std::vector<NetPoint> point;
  std::vector<int> edge_base;   // first interior vertex of each edge
  std::vector<long> edge_units;  // edge length in units
  Rational g;

  int vertex(const Network& net, const NetPoint& p) const {
    NetPoint c = canonical(net, p);
    if (c.is_node()) return c.node;
    Rational q = c.offset / g;
    if (q.get_den() != 1) throw PreconditionError("task point is not on the search grid");
    return edge_base[c.edge] + static_cast<int>(q.get_num().get_si()) - 1;
  }
};

long units(const Rational& value, const Rational& g, const char* what) {
  Rational q = value / g;
  if (q.get_den() != 1)
    throw PreconditionError(std::string("resolution ") + to_string(g) + " does not divide " + what + " " +
                            to_string(value));
  if (!q.get_num().fits_slong_p() || q.get_num() > 60000)
    throw PreconditionError(std::string(what) + " is too large for the search grid");
  return q.get_num().get_si();
}

Grid make_grid(const Network& net, const Rational& g) {
  if (g <= 0) throw PreconditionError("resolution must be positive");
  Grid grid;
  grid.g = g;
  const int n = net.node_count();
  grid.adj.resize(n);
  for (int v = 0; v < n; ++v) grid.point.push_back(NetPoint::at_node(v));
  auto link = [&](int a, int b, int cost, bool directed) {
    grid.adj[a].push_back({b, cost});
    if (!directed) grid.adj[b].push_back({a, cost});
  };
  for (int e = 0; e < net.edge_count(); ++e) {
    const auto& edge = net.edges[e];
    const long m = units(edge.length, g, "edge length");
    grid.edge_base.push_back(static_cast<int>(grid.point.size()));
    grid.edge_units.push_back(m);
    if (m == 0) {
      link(edge.u, edge.v, 0, edge.directed);
      continue;
    }
    int prev = edge.u;
    for (long k = 1; k < m; ++k) {
      const int id = static_cast<int>(grid.point.size());
      grid.point.push_back(NetPoint::on_edge(e, Rational(g * k)));
      grid.adj.emplace_back();
      link(prev, id, 1, edge.directed);
      prev = id;
    }
    link(prev, edge.v, 1, edge.directed);
  }
  if (grid.point.size() > 60000) throw PreconditionError("search grid is too large");
  return grid;
}

struct State {
  std::array<std::uint16_t, kMax> pos{};
  std::array<std::uint16_t, kMax> energy{};
  std::array<std::uint8_t, kMax> info{};
  std::uint8_t flags = 0;  // bit 0: packet delivered
};

struct Key {
  std::array<std::uint16_t, kMax> pos{};
  std::uint8_t flags = 0;
  bool operator==(const Key& o) const { return pos == o.pos && flags == o.flags; }
};

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](std::uint64_t x) {
      h ^= x;
      h *= 1099511628211ULL;
    };
    for (int i = 0; i < kMax; ++i) mix(k.pos[i]);
    mix(k.flags);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

struct Step {
  std::uint32_t parent = 0;
  std::int8_t mover = -1;
  std::uint16_t to = 0;
  std::uint16_t take = 0;
  std::uint8_t cost = 0;
};

enum class Mode { Delivery, Gather, Spread, Explore };

class Search {
 public:
  Search(const Network& net, const NetTask& task, Mode mode, const SearchConfig& cfg)
      : net_(net), task_(task), mode_(mode), cfg_(cfg), grid_(make_grid(net, cfg.resolution)) {
    n_ = net.agent_count();
    if (n_ < 1) throw PreconditionError("search needs at least one agent");
    if (n_ > kMax) throw PreconditionError("search supports at most " + std::to_string(kMax) + " agents");
    if (mode == Mode::Delivery) {
      source_ = grid_.vertex(net, task.source);
      target_ = grid_.vertex(net, task.target);
    }
    if (mode == Mode::Gather && task.point) meet_ = grid_.vertex(net, *task.point);
    full_ = static_cast<std::uint8_t>((1U << n_) - 1);

    State root;
    for (int a = 0; a < n_; ++a) {
      root.pos[a] = static_cast<std::uint16_t>(net.agents[a].node);
      root.energy[a] = static_cast<std::uint16_t>(units(net.agents[a].energy, grid_.g, "energy"));
      if (mode != Mode::Delivery) root.info[a] = static_cast<std::uint8_t>(1U << a);
    }
    initial_ = root;
    normalize(root);
    insert(root, Step{});
  }

  // Explores breadth-first until `stop` returns true for a state or the space is exhausted.
  // States for which `prune` holds are not expanded. Returns the index of the stopping state.
  template <class Stop, class Prune>
  std::optional<std::uint32_t> run(Stop&& stop, Prune&& prune) {
    for (std::size_t i = 0; i < states_.size(); ++i) {
      if (stop(states_[i])) return static_cast<std::uint32_t>(i);
      if (!prune(states_[i])) expand(static_cast<std::uint32_t>(i));
    }
    return std::nullopt;
  }

  template <class Stop>
  std::optional<std::uint32_t> run(Stop&& stop) {
    return run(stop, [](const State&) { return false; });
  }

  const Grid& grid() const { return grid_; }
  int agents() const { return n_; }
  std::uint8_t full() const { return full_; }
  int meet() const { return meet_; }
  int target() const { return target_; }
  std::size_t size() const { return states_.size(); }

  int source() const { return source_; }

  // Grid distance in units from every vertex to `to`.
  std::vector<long> distances_to(int to) const {
    const int n = static_cast<int>(grid_.adj.size());
    std::vector<std::vector<std::pair<int, int>>> rev(n);
    for (int v = 0; v < n; ++v)
      for (const auto& [w, c] : grid_.adj[v]) rev[w].push_back({v, c});
    std::vector<long> dist(n, std::numeric_limits<long>::max());
    std::deque<int> queue{to};
    dist[to] = 0;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (const auto& [w, c] : rev[v])
        if (dist[v] + c < dist[w]) {
          dist[w] = dist[v] + c;
          c == 0 ? queue.push_front(w) : queue.push_back(w);
        }
    }
    return dist;
  }

  long pooled_at(const State& s, int vertex) const {
    long sum = 0;
    for (int a = 0; a < n_; ++a)
      if (s.pos[a] == vertex) sum += s.energy[a];
    return sum;
  }

  NetSchedule schedule_to(std::uint32_t index) const {
    std::vector<std::uint32_t> chain;
    for (std::uint32_t i = index; i != 0; i = steps_[i].parent) chain.push_back(i);
    std::reverse(chain.begin(), chain.end());

    NetSchedule out;
    const Rational& g = grid_.g;
    State cur = initial_;
    std::array<long, kMax> energy{};
    for (int a = 0; a < n_; ++a) energy[a] = cur.energy[a];
    auto give = [&](int from, int to, long amount) {
      if (amount <= 0) return;
      out.transfer(from, to, Rational(g * amount));
      energy[from] -= amount;
      energy[to] += amount;
    };
    auto pool = [&]() {
      for (int a = 0; a < n_; ++a)
        for (int b = 0; b < a; ++b)
          if (cur.pos[a] == cur.pos[b]) {
            give(a, b, energy[a]);
            break;
          }
    };
    pool();
    for (std::uint32_t i : chain) {
      const Step& st = steps_[i];
      const int m = st.mover;
      int holder = m;
      for (int b = 0; b < n_; ++b)
        if (cur.pos[b] == cur.pos[m]) {
          holder = b;
          break;
        }
      if (holder != m) give(holder, m, st.take);
      const NetPoint from = grid_.point[cur.pos[m]];
      const NetPoint to = grid_.point[st.to];
      energy[m] -= st.cost;
      cur.pos[m] = st.to;
      NetMove* last = out.steps.empty() ? nullptr : std::get_if<NetMove>(&out.steps.back());
      if (last && last->agent == m && last->path.back() == from)
        last->path.push_back(to);
      else
        out.move(m, {from, to});
      pool();
    }
    return out;
  }

  const State& state(std::uint32_t i) const { return states_[i]; }

 private:
  void normalize(State& s) const {
    for (int a = 0; a < n_; ++a) {
      for (int b = 0; b < a; ++b) {
        if (s.pos[a] != s.pos[b]) continue;
        s.energy[b] = static_cast<std::uint16_t>(s.energy[b] + s.energy[a]);
        s.energy[a] = 0;
        break;
      }
    }
    for (int a = 0; a < n_; ++a) {
      std::uint8_t all = s.info[a];
      for (int b = 0; b < n_; ++b)
        if (s.pos[b] == s.pos[a]) all |= s.info[b];
      if (mode_ == Mode::Delivery && s.pos[a] == source_) all |= 1;
      s.info[a] = all;
    }
    if (mode_ == Mode::Delivery) {
      if (source_ == target_) s.flags |= 1;
      for (int a = 0; a < n_; ++a)
        if (s.pos[a] == target_ && (s.info[a] & 1)) s.flags |= 1;
      // Once delivered, only energy matters.
      if (s.flags & 1) s.info.fill(1);
    }
  }

  // Skips states matched by a stored state at the same positions with at least as much energy and
  // information for every agent.
  void insert(const State& s, const Step& how) {
    Key key{s.pos, s.flags};
    auto& bucket = front_[key];
    for (std::uint32_t other : bucket) {
      const State& o = states_[other];
      bool dominated = true;
      for (int a = 0; a < n_ && dominated; ++a)
        dominated = o.energy[a] >= s.energy[a] && (o.info[a] & s.info[a]) == s.info[a];
      if (dominated) return;
    }
    if (states_.size() >= cfg_.max_states)
      throw BudgetExhausted("search budget of " + std::to_string(cfg_.max_states) + " states exhausted");
    bucket.push_back(static_cast<std::uint32_t>(states_.size()));
    states_.push_back(s);
    steps_.push_back(how);
  }

  void expand(std::uint32_t index) {
    const State s = states_[index];
    for (int m = 0; m < n_; ++m) {
      int holder = -1, last = -1;
      for (int b = 0; b < n_; ++b)
        if (s.pos[b] == s.pos[m]) {
          if (holder < 0) holder = b;
          last = b;
        }
      if (last != m) continue;  // only the highest-numbered agent of a group leaves it
      const int pool = s.energy[holder];
      for (const auto& [v, cost] : grid_.adj[s.pos[m]]) {
        if (pool < cost) continue;
        const int lo = holder == m ? pool : cost;
        for (int take = lo; take <= pool; ++take) {
          State t = s;
          t.energy[holder] = static_cast<std::uint16_t>(pool - take);
          t.energy[m] = static_cast<std::uint16_t>(take - cost);
          t.pos[m] = static_cast<std::uint16_t>(v);
          normalize(t);
          insert(t, Step{index, static_cast<std::int8_t>(m), static_cast<std::uint16_t>(v),
                         static_cast<std::uint16_t>(take), static_cast<std::uint8_t>(cost)});
        }
      }
    }
  }

  const Network& net_;
  const NetTask& task_;
  Mode mode_;
  SearchConfig cfg_;
  Grid grid_;
  int n_ = 0;
  int source_ = -1, target_ = -1, meet_ = -1;
  std::uint8_t full_ = 0;
  State initial_;
  std::vector<State> states_;
  std::vector<Step> steps_;
  std::unordered_map<Key, std::vector<std::uint32_t>, KeyHash> front_;
};

Mode mode_of(const NetTask& task) {
  switch (task.kind) {
    case TaskKind::Delivery: return Mode::Delivery;
    case TaskKind::Convergecast: return Mode::Gather;
    case TaskKind::Broadcast: return Mode::Spread;
  }
  return Mode::Explore;
}

void check_task(const Network& net, const NetTask& task) {
  check_network(net);
  if (task.kind == TaskKind::Broadcast &&
      (!task.source_agent || *task.source_agent < 0 || *task.source_agent >= net.agent_count()))
    throw PreconditionError("broadcast task needs a valid source agent");
}

// Index of a fully informed agent satisfying the meeting constraint, or -1.
int gathered(const Search& search, const State& s) {
  for (int a = 0; a < search.agents(); ++a)
    if (s.info[a] == search.full() && (search.meet() < 0 || s.pos[a] == search.meet())) return a;
  return -1;
}

bool goal(const Search& search, const NetTask& task, const State& s) {
  switch (task.kind) {
    case TaskKind::Delivery: return s.flags & 1;
    case TaskKind::Convergecast: return gathered(search, s) >= 0;
    case TaskKind::Broadcast: {
      const std::uint8_t bit = static_cast<std::uint8_t>(1U << *task.source_agent);
      for (int a = 0; a < search.agents(); ++a)
        if (!(s.info[a] & bit)) return false;
      return true;
    }
  }
  return false;
}

long surplus_units(const Search& search, const NetTask& task, const State& s) {
  switch (task.kind) {
    case TaskKind::Delivery: return search.pooled_at(s, search.target());
    case TaskKind::Convergecast: {
      long best = 0;
      for (int a = 0; a < search.agents(); ++a)
        if (s.info[a] == search.full() && (search.meet() < 0 || s.pos[a] == search.meet()))
          best = std::max(best, search.pooled_at(s, s.pos[a]));
      return best;
    }
    case TaskKind::Broadcast: {
      long sum = 0;
      for (int a = 0; a < search.agents(); ++a) sum += s.energy[a];
      return sum;
    }
  }
  return 0;
}

struct LineSetup {
  LineNetwork ln;
  NetTask task;
};

LineSetup line_setup(const LineInstance& inst, const LineTask& task) {
  check_line(inst);
  std::vector<Rational> extra;
  if (task.kind == TaskKind::Delivery) extra = {task.source, task.target};
  if (task.point) extra.push_back(*task.point);
  LineSetup out{line_network(to_agents(inst), extra), {}};
  out.task = to_network(out.ln, task);
  return out;
}

}  // namespace

std::optional<NetSchedule> search_feasible(const Network& net, const NetTask& task, const SearchConfig& cfg) {
  check_task(net, task);
  Search search(net, task, mode_of(task), cfg);
  auto hit = search.run([&](const State& s) { return goal(search, task, s); });
  if (!hit) return std::nullopt;
  return search.schedule_to(*hit);
}

std::optional<Rational> max_surplus(const Network& net, const NetTask& task, const SearchConfig& cfg) {
  check_task(net, task);
  Search search(net, task, mode_of(task), cfg);
  std::optional<long> best;
  // Surplus never exceeds the energy still held, less what an undelivered packet must still spend
  // to reach the target. States that cannot beat the incumbent are not expanded.
  std::vector<long> to_target;
  if (task.kind == TaskKind::Delivery) to_target = search.distances_to(search.target());
  auto total = [&](const State& s) {
    long sum = 0;
    for (int a = 0; a < search.agents(); ++a) sum += s.energy[a];
    if (to_target.empty() || (s.flags & 1)) return sum;
    long need = to_target[search.source()];
    for (int a = 0; a < search.agents(); ++a)
      if (s.info[a] & 1) need = std::min(need, to_target[s.pos[a]]);
    return sum - need;
  };
  search.run(
      [&](const State& s) {
        if (goal(search, task, s)) best = std::max(best.value_or(0), surplus_units(search, task, s));
        return false;
      },
      [&](const State& s) { return best && total(s) <= *best; });
  if (!best) return std::nullopt;
  return Rational(cfg.resolution * *best);
}

InformationSummary explore_information(const Network& net, const SearchConfig& cfg) {
  check_network(net);
  NetTask task = NetTask::convergecast();
  Search search(net, task, Mode::Explore, cfg);
  const int n = search.agents();
  std::uint8_t everywhere = search.full();  // tokens known by every agent in some state
  std::uint8_t found = 0;
  bool gather = false;
  search.run([&](const State& s) {
    std::uint8_t common = everywhere;
    for (int a = 0; a < n; ++a) {
      common &= s.info[a];
      if (s.info[a] == search.full()) gather = true;
    }
    found |= common;
    return gather && found == search.full();
  });
  InformationSummary out;
  out.convergecast = gather;
  out.states = search.size();
  for (int a = 0; a < n; ++a)
    if (found & (1U << a)) out.broadcast_sources.push_back(a);
  return out;
}

std::optional<LineSchedule> search_feasible(const LineInstance& inst, const LineTask& task, const SearchConfig& cfg) {
  auto setup = line_setup(inst, task);
  auto found = search_feasible(setup.ln.net, setup.task, cfg);
  if (!found) return std::nullopt;
  return to_line(setup.ln, *found);
}

std::optional<Rational> max_surplus(const LineInstance& inst, const LineTask& task, const SearchConfig& cfg) {
  auto setup = line_setup(inst, task);
  return max_surplus(setup.ln.net, setup.task, cfg);
}

InformationSummary explore_information(const LineInstance& inst, const SearchConfig& cfg) {
  check_line(inst);
  return explore_information(line_network(to_agents(inst)).net, cfg);
}

std::vector<int> broadcast_set(const LineInstance& inst, const SearchConfig& cfg) {
  return explore_information(inst, cfg).broadcast_sources;
}

bool partition_exists(const std::vector<long long>& weights) {
  if (weights.size() > 20) throw PreconditionError("partition_exists supports at most 20 weights");
  long long total = 0;
  for (auto w : weights) {
    if (w < 0) throw PreconditionError("weights must be non-negative");
    total += w;
  }
  if (total % 2) return false;
  const std::size_t n = weights.size();
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    long long sum = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1U << i)) sum += weights[i];
    if (2 * sum == total) return true;
  }
  return false;
}

}  // namespace agentex::oracle
