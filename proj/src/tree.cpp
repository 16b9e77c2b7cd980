#include "agentex/tree.hpp"

#include "agentex/line.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <stdexcept>

namespace agentex::tree {

namespace {

struct Adjacency {
  std::vector<std::vector<std::pair<int, int>>> nbr;  // (neighbor, edge)

  explicit Adjacency(const Network& net) : nbr(net.node_count()) {
    for (int e = 0; e < net.edge_count(); ++e) {
      nbr[net.edges[e].u].push_back({net.edges[e].v, e});
      nbr[net.edges[e].v].push_back({net.edges[e].u, e});
    }
  }
};

std::vector<Rational> node_energy(const Network& net) {
  std::vector<Rational> out(net.node_count(), Rational(0));
  for (const auto& a : net.agents) out[a.node] += a.energy;
  return out;
}

std::vector<int> node_agents(const Network& net) {
  std::vector<int> out(net.node_count(), 0);
  for (const auto& a : net.agents) ++out[a.node];
  return out;
}

int tail(const Network& net, int id) { return id % 2 == 0 ? net.edges[id / 2].u : net.edges[id / 2].v; }

// Nodes in BFS order from node 0 with the edge leading to each node's parent (-1 at the root).
struct Rooting {
  std::vector<int> order;
  std::vector<int> parent_edge;
  std::vector<int> parent;
};

Rooting root_at_zero(const Network& net, const Adjacency& adj) {
  Rooting r;
  r.parent_edge.assign(net.node_count(), -1);
  r.parent.assign(net.node_count(), -1);
  std::vector<char> seen(net.node_count(), 0);
  r.order.push_back(0);
  seen[0] = 1;
  for (std::size_t k = 0; k < r.order.size(); ++k) {
    const int x = r.order[k];
    for (auto [y, e] : adj.nbr[x])
      if (!seen[y]) {
        seen[y] = 1;
        r.parent[y] = x;
        r.parent_edge[y] = e;
        r.order.push_back(y);
      }
  }
  return r;
}

// Directed edge id whose tail is `from` on edge e.
int directed(const Network& net, int e, int from) { return net.edges[e].u == from ? 2 * e : 2 * e + 1; }

// Directed edges ordered so that (w -> u) comes before (u -> v) for every w != v.
std::vector<int> dependency_order(const Network& net, const Adjacency& adj) {
  const Rooting r = root_at_zero(net, adj);
  std::vector<int> out;
  for (auto it = r.order.rbegin(); it != r.order.rend(); ++it)
    if (r.parent_edge[*it] >= 0) out.push_back(directed(net, r.parent_edge[*it], *it));
  for (int x : r.order)
    if (r.parent_edge[x] >= 0) out.push_back(directed(net, r.parent_edge[x], r.parent[x]));
  return out;
}

}  // namespace

DerivedTree truncate(const Network& tree, const std::vector<int>& keep) {
  check_tree(tree);
  if (tree.agents.empty()) throw InvalidInstance("tree has no agents");
  const Adjacency adj(tree);
  const auto agents = node_agents(tree);
  std::vector<char> kept(tree.node_count(), 0), alive(tree.node_count(), 1), edge_alive(tree.edge_count(), 1);
  for (int k : keep) kept.at(k) = 1;
  std::vector<int> degree(tree.node_count());
  std::deque<int> queue;
  for (int x = 0; x < tree.node_count(); ++x) {
    degree[x] = static_cast<int>(adj.nbr[x].size());
    if (degree[x] <= 1 && !agents[x] && !kept[x]) queue.push_back(x);
  }
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop_front();
    if (!alive[x]) continue;
    alive[x] = 0;
    for (auto [y, e] : adj.nbr[x]) {
      if (!edge_alive[e]) continue;
      edge_alive[e] = 0;
      if (--degree[y] <= 1 && !agents[y] && !kept[y]) queue.push_back(y);
    }
  }

  DerivedTree out;
  std::vector<int> index(tree.node_count(), -1);
  for (int x = 0; x < tree.node_count(); ++x)
    if (alive[x]) {
      index[x] = out.tree.node_count();
      out.tree.nodes.push_back(tree.nodes[x]);
      out.node_origin.push_back(x);
    }
  for (int e = 0; e < tree.edge_count(); ++e)
    if (edge_alive[e]) {
      Edge edge = tree.edges[e];
      edge.u = index[edge.u];
      edge.v = index[edge.v];
      out.tree.edges.push_back(edge);
      out.edge_origin.push_back(e);
    }
  for (const auto& a : tree.agents) out.tree.agents.push_back({index[a.node], a.energy});
  return out;
}

DerivedTree ternarize(const Network& tree) {
  check_tree(tree);
  DerivedTree out{tree, {}, {}};
  Network& t = out.tree;
  for (int x = 0; x < tree.node_count(); ++x) out.node_origin.push_back(x);
  for (int e = 0; e < tree.edge_count(); ++e) out.edge_origin.push_back(e);

  const Adjacency adj(tree);
  for (int v = 0; v < tree.node_count(); ++v) {
    const int k = static_cast<int>(adj.nbr[v].size());
    if (k <= 3) continue;
    // Chain w_1 = v, w_2, ..., w_{k-2}.
    std::vector<int> chain{v};
    for (int j = 2; j <= k - 2; ++j) {
      std::string name = tree.nodes[v] + "#" + std::to_string(j);
      while (t.find_node(name) >= 0) name += "'";
      chain.push_back(t.node_count());
      t.nodes.push_back(name);
      out.node_origin.push_back(v);
    }
    for (std::size_t j = 0; j + 1 < chain.size(); ++j) {
      t.edges.push_back({chain[j], chain[j + 1], Rational(0), false});
      out.edge_origin.push_back(-1);
    }
    auto attach = [&](int slot, int w) {
      Edge& edge = t.edges[adj.nbr[v][slot].second];
      (edge.u == v ? edge.u : edge.v) = w;
    };
    for (int slot = 2; slot < k - 2; ++slot) attach(slot, chain[slot - 1]);
    attach(k - 2, chain.back());
    attach(k - 1, chain.back());
  }
  return out;
}

Rational potential_step(const Rational& potential, const Rational& d) { return line::potential_step(potential, d); }

EdgePotentials all_edge_potentials(const Network& tree) {
  check_tree(tree);
  const Adjacency adj(tree);
  const Rooting r = root_at_zero(tree, adj);
  const auto energy = node_energy(tree);
  EdgePotentials out;
  out.value.assign(2 * tree.edge_count(), Rational(0));

  // Postorder: child -> parent.
  for (auto it = r.order.rbegin(); it != r.order.rend(); ++it) {
    const int c = *it;
    if (r.parent_edge[c] < 0) continue;
    Rational value = energy[c];
    for (auto [w, e] : adj.nbr[c])
      if (e != r.parent_edge[c]) value += potential_step(out.value[directed(tree, e, w)], tree.edges[e].length);
    out.value[directed(tree, r.parent_edge[c], c)] = value;
  }
  // Preorder: parent -> child, removing the child's own contribution from the total at the parent.
  for (int p : r.order) {
    Rational total = energy[p];
    for (auto [w, e] : adj.nbr[p]) total += potential_step(out.value[directed(tree, e, w)], tree.edges[e].length);
    for (auto [c, e] : adj.nbr[p])
      if (e != r.parent_edge[p])
        out.value[directed(tree, e, p)] = total - potential_step(out.value[directed(tree, e, c)], tree.edges[e].length);
  }
  return out;
}

std::optional<std::pair<Rational, Rational>> meeting_interval(const Rational& left, const Rational& right,
                                                              const Rational& d) {
  // Gathering at offset x costs each side one relaxation step; the sum is concave in x.
  auto f = [&](const Rational& x) { return Rational(potential_step(left, x) + potential_step(right, d - x)); };
  std::vector<Rational> xs{Rational(0), d};
  if (left > 0 && left < d) xs.push_back(left);
  if (right > 0 && right < d) xs.push_back(d - right);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<Rational> fs;
  for (const auto& x : xs) fs.push_back(f(x));
  if (std::none_of(fs.begin(), fs.end(), [](const Rational& v) { return v >= 0; })) return std::nullopt;

  auto cross = [&](std::size_t a, std::size_t b) {
    return Rational(xs[a] + (-fs[a]) * (xs[b] - xs[a]) / (fs[b] - fs[a]));
  };
  std::size_t k = 0;
  while (fs[k] < 0) ++k;
  Rational lo = k == 0 ? xs[0] : cross(k - 1, k);
  std::size_t m = xs.size() - 1;
  while (fs[m] < 0) --m;
  Rational hi = m + 1 == xs.size() ? xs[m] : cross(m + 1, m);
  return std::make_pair(lo, hi);
}

ConvergecastResult convergecast_points(const Network& tree) {
  const DerivedTree tr = truncate(tree);
  const Network& t = tr.tree;
  ConvergecastResult out;
  for (int e = 0; e < tree.edge_count(); ++e) out.edges.push_back({e, std::nullopt, std::nullopt});

  const auto pot = all_edge_potentials(t);
  const Adjacency adj(t);
  const auto energy = node_energy(t);
  for (int e = 0; e < t.edge_count(); ++e) {
    EdgeReport& report = out.edges[tr.edge_origin[e]];
    report.surplus = line::cut_surplus(pot.toward_v(e), pot.toward_u(e), t.edges[e].length);
    report.interval = meeting_interval(pot.toward_v(e), pot.toward_u(e), t.edges[e].length);
    if (report.interval) out.feasible = true;
  }
  if (t.node_count() == 1) {
    out.node = tr.node_origin[0];
    out.feasible = true;
  }

  // Removed branches: reachable by a fully informed agent leaving the kept node they hang from.
  std::vector<Rational> gathered(t.node_count());
  for (int x = 0; x < t.node_count(); ++x) {
    gathered[x] = energy[x];
    for (auto [w, e] : adj.nbr[x]) gathered[x] += potential_step(pot.value[directed(t, e, w)], t.edges[e].length);
  }
  const Adjacency full(tree);
  std::vector<char> kept_edge(tree.edge_count(), 0);
  for (int e : tr.edge_origin) kept_edge[e] = 1;
  for (int x = 0; x < t.node_count(); ++x) {
    if (gathered[x] < 0) continue;
    const Rational& reach = gathered[x];
    // DFS into removed edges, tracking the distance from x.
    std::vector<std::tuple<int, int, Rational>> stack;  // node, edge used, distance
    stack.emplace_back(tr.node_origin[x], -1, Rational(0));
    while (!stack.empty()) {
      auto [a, via, dist] = stack.back();
      stack.pop_back();
      for (auto [b, e] : full.nbr[a]) {
        if (e == via || kept_edge[e] || dist > reach) continue;
        const Rational& len = tree.edges[e].length;
        const Rational r = min_of(len, reach - dist);
        auto& interval = out.edges[e].interval;
        interval = tree.edges[e].u == a ? std::make_pair(Rational(0), r) : std::make_pair(Rational(len - r), len);
        out.feasible = true;
        stack.emplace_back(b, e, Rational(dist + len));
      }
    }
  }
  return out;
}

Rational deliverable(const Network& tree, int root, int parent) {
  const Adjacency adj(tree);
  const auto energy = node_energy(tree);
  std::function<Rational(int, int)> go = [&](int x, int from) {
    Rational value = energy[x];
    for (auto [c, e] : adj.nbr[x])
      if (c != from) value += max_of(Rational(go(c, x) - tree.edges[e].length), Rational(0));
    return value;
  };
  return go(root, parent);
}

namespace {

// A tree with the edge points of a delivery turned into nodes.
struct Subdivided {
  Network net;
  int original_nodes = 0;
  std::vector<std::pair<int, Rational>> edge_base;  // per edge: original edge, offset of its u end
  std::vector<std::pair<int, Rational>> node_at;    // per added node: original edge, offset

  NetPoint back(const Network& orig, const NetPoint& p) const {
    if (p.is_node()) {
      if (p.node < original_nodes) return p;
      const auto& [e, off] = node_at[p.node - original_nodes];
      return NetPoint::on_edge(e, off);
    }
    const auto& [e, base] = edge_base[p.edge];
    return canonical(orig, NetPoint::on_edge(e, base + p.offset));
  }
};

Subdivided subdivide(const Network& tree, std::vector<NetPoint*> points) {
  Subdivided s{tree, tree.node_count(), {}, {}};
  for (int e = 0; e < tree.edge_count(); ++e) s.edge_base.push_back({e, Rational(0)});
  std::vector<std::vector<Rational>> cuts(tree.edge_count());
  for (NetPoint* p : points)
    if (!p->is_node()) cuts[p->edge].push_back(p->offset);
  std::vector<std::vector<std::pair<Rational, int>>> made(tree.edge_count());
  for (int e = 0; e < tree.edge_count(); ++e) {
    auto& c = cuts[e];
    if (c.empty()) continue;
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    const Edge orig = tree.edges[e];
    int prev = orig.u;
    Rational prev_off = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      const int node = s.net.node_count();
      std::string name = tree.nodes[orig.u] + "@" + to_string(c[k]);
      while (s.net.find_node(name) >= 0) name += "'";
      s.net.nodes.push_back(name);
      s.node_at.push_back({e, c[k]});
      made[e].push_back({c[k], node});
      if (k == 0) {
        s.net.edges[e].v = node;
        s.net.edges[e].length = c[k];
      } else {
        s.net.edges.push_back({prev, node, Rational(c[k] - prev_off), false});
        s.edge_base.push_back({e, prev_off});
      }
      prev = node;
      prev_off = c[k];
    }
    s.net.edges.push_back({prev, orig.v, Rational(orig.length - prev_off), false});
    s.edge_base.push_back({e, prev_off});
  }
  for (NetPoint* p : points)
    if (!p->is_node())
      for (const auto& [off, node] : made[p->edge])
        if (off == p->offset) {
          *p = NetPoint::at_node(node);
          break;
        }
  return s;
}

}  // namespace

DeliveryResult tree_delivery(const Network& tree, const NetPoint& source, const NetPoint& target) {
  check_tree(tree);
  NetPoint s = canonical(tree, source), t = canonical(tree, target);
  DeliveryResult out;
  if (s == t) {
    out.feasible = true;
    out.value = 0;
    if (s.is_node())
      for (const auto& a : tree.agents)
        if (a.node == s.node) out.value += a.energy;
    return out;
  }

  const Subdivided sub = subdivide(tree, {&s, &t});
  const Network& w = sub.net;
  const Adjacency adj(w);

  // Path from s to t.
  std::vector<int> parent(w.node_count(), -2), parent_edge(w.node_count(), -1);
  std::deque<int> queue{s.node};
  parent[s.node] = -1;
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop_front();
    for (auto [y, e] : adj.nbr[x])
      if (parent[y] == -2) {
        parent[y] = x;
        parent_edge[y] = e;
        queue.push_back(y);
      }
  }
  std::vector<int> path, path_edge;
  for (int x = t.node; x != s.node; x = parent[x]) {
    path.push_back(x);
    path_edge.push_back(parent_edge[x]);
  }
  path.push_back(s.node);
  std::reverse(path.begin(), path.end());
  std::reverse(path_edge.begin(), path_edge.end());  // path_edge[k] joins path[k] and path[k+1]
  const int m = static_cast<int>(path.size());
  std::vector<char> on_path(w.node_count(), 0);
  for (int x : path) on_path[x] = 1;
  std::vector<Rational> pos(m, Rational(0));
  for (int k = 1; k < m; ++k) pos[k] = pos[k - 1] + w.edges[path_edge[k - 1]].length;

  // Anchored subtrees send their energy toward the path.
  std::vector<std::vector<int>> at(w.node_count());
  for (int a = 0; a < w.agent_count(); ++a) at[w.agents[a].node].push_back(a);
  std::vector<Rational> energy;
  for (const auto& a : w.agents) energy.push_back(a.energy);
  NetSchedule gather;
  std::function<std::pair<int, Rational>(int, int)> collect = [&](int x, int from) {
    int holder = at[x].empty() ? -1 : at[x][0];
    for (std::size_t k = 1; k < at[x].size(); ++k)
      if (energy[at[x][k]] > 0) {
        gather.transfer(at[x][k], holder, energy[at[x][k]]);
        energy[holder] += energy[at[x][k]];
        energy[at[x][k]] = 0;
      }
    for (auto [c, e] : adj.nbr[x]) {
      if (c == from || on_path[c]) continue;
      auto [h, pool] = collect(c, x);
      if (h < 0 || pool <= w.edges[e].length) continue;
      gather.move(h, {NetPoint::at_node(c), NetPoint::at_node(x)});
      energy[h] -= w.edges[e].length;
      if (holder < 0) {
        holder = h;
      } else {
        gather.transfer(h, holder, energy[h]);
        energy[holder] += energy[h];
        energy[h] = 0;
      }
    }
    return std::make_pair(holder, holder < 0 ? Rational(0) : energy[holder]);
  };
  std::vector<int> holder(m);
  for (int k = 0; k < m; ++k) holder[k] = collect(path[k], -1).first;

  // Co-located path nodes (zero-length edges) pool at the first of them.
  std::vector<int> group_first(m);
  LineInstance line;
  std::vector<int> rep;
  for (int k = 0; k < m; ++k) {
    if (k > 0 && pos[k] == pos[k - 1]) {
      const int first = group_first[k] = group_first[k - 1];
      if (holder[k] >= 0) {
        std::vector<NetPoint> back;
        for (int j = k; j >= first; --j) back.push_back(NetPoint::at_node(path[j]));
        gather.move(holder[k], back);
        if (holder[first] < 0) {
          holder[first] = holder[k];
        } else {
          gather.transfer(holder[k], holder[first], energy[holder[k]]);
          energy[holder[first]] += energy[holder[k]];
          energy[holder[k]] = 0;
        }
        rep.back() = holder[first];
        line.energies.back() = energy[holder[first]];
      }
      continue;
    }
    group_first[k] = k;
    line.positions.push_back(pos[k]);
    line.energies.push_back(holder[k] >= 0 ? energy[holder[k]] : Rational(0));
    rep.push_back(holder[k]);
  }
  // Keep agents and the two endpoints only.
  LineInstance compact;
  std::vector<int> compact_rep;
  for (std::size_t k = 0; k < line.size(); ++k)
    if (rep[k] >= 0 || k == 0 || k + 1 == line.size()) {
      compact.positions.push_back(line.positions[k]);
      compact.energies.push_back(line.energies[k]);
      compact_rep.push_back(rep[k]);
    }
  out.path_line = compact;

  auto lift = [&](const NetSchedule& schedule) {
    NetSchedule lifted;
    for (const auto& step : schedule.steps) {
      if (const auto* mv = std::get_if<NetMove>(&step)) {
        std::vector<NetPoint> pts;
        for (const auto& p : mv->path) pts.push_back(sub.back(tree, p));
        lifted.move(mv->agent, std::move(pts));
      } else {
        lifted.steps.push_back(step);
      }
    }
    return lifted;
  };

  if (compact.size() == 1) {
    // Source and target are joined by zero-length edges only.
    out.value = compact.energies[0];
    out.feasible = compact_rep[0] >= 0;
    if (out.feasible) {
      std::vector<NetPoint> walk;
      for (int k = 0; k < m; ++k) walk.push_back(NetPoint::at_node(path[k]));
      gather.move(compact_rep[0], walk);
      out.schedule = lift(gather);
    }
    return out;
  }

  const auto decision = line::delivery_decide(compact, compact.positions.front(), compact.positions.back());
  out.feasible = decision.feasible;
  out.value = decision.value;
  if (!out.feasible) return out;

  // Line coordinates to points on the path: (index of the path node at or before, offset past it).
  auto locate = [&](const Rational& x) {
    int k = static_cast<int>(std::lower_bound(pos.begin(), pos.end(), x) - pos.begin());
    if (k < m && pos[k] == x) return std::make_pair(k, Rational(0));
    return std::make_pair(k - 1, Rational(x - pos[k - 1]));
  };
  auto point_of = [&](int k, const Rational& off) {
    if (off == 0) return NetPoint::at_node(path[k]);
    const int e = path_edge[k];
    const Edge& edge = w.edges[e];
    return NetPoint::on_edge(e, edge.u == path[k] ? off : Rational(edge.length - off));
  };
  auto segment = [&](const Rational& x0, const Rational& x1, std::vector<NetPoint>& pts) {
    const auto [pk, po] = locate(x0);
    const auto [qk, qo] = locate(x1);
    if (x0 < x1) {
      const int upper = qo > 0 ? qk : qk - 1;
      for (int n = pk + 1; n <= upper; ++n) pts.push_back(NetPoint::at_node(path[n]));
    } else {
      for (int n = po > 0 ? pk : pk - 1; n >= qk + 1; --n) pts.push_back(NetPoint::at_node(path[n]));
    }
    pts.push_back(point_of(qk, qo));
  };

  const LineSchedule main = line::delivery_schedule(compact);
  NetSchedule path_schedule;
  for (const auto& step : main.steps) {
    if (const auto* mv = std::get_if<LineMove>(&step)) {
      const int agent = compact_rep.at(mv->agent);
      if (agent < 0) throw std::logic_error("delivery schedule uses a virtual agent");
      const auto [k0, o0] = locate(mv->path.front());
      std::vector<NetPoint> pts{point_of(k0, o0)};
      for (std::size_t j = 1; j < mv->path.size(); ++j) segment(mv->path[j - 1], mv->path[j], pts);
      path_schedule.move(agent, std::move(pts));
    } else {
      const auto& tr = std::get<Transfer>(step);
      const int from = compact_rep.at(tr.from), to = compact_rep.at(tr.to);
      if (from < 0 || to < 0) throw std::logic_error("delivery schedule uses a virtual agent");
      path_schedule.transfer(from, to, tr.amount);
    }
  }
  gather.append(path_schedule);
  out.schedule = lift(gather);
  return out;
}

}  // namespace agentex::tree

namespace agentex::tree {

namespace {

using Matrix = std::vector<std::vector<Cell>>;

void improve(Cell& cell, const Rational& value) {
  if (!cell || *cell < value) cell = value;
}

// "At least j agents": entry j takes the best of every larger count.
void suffix_max(std::vector<Cell>& row) {
  for (int j = static_cast<int>(row.size()) - 2; j >= 0; --j)
    if (row[j + 1]) improve(row[j], *row[j + 1]);
}

// Table of a child side seen from the other end of the edge of length d.
// Row 0 is the unaided walk of every agent of the side; rows i >= 1 pay for i carriers going in
// and for each returner, and surplus without returners stays behind.
Matrix lift(const BroadcastTable& child, int local, const Rational& d, int cap) {
  Matrix out(cap + 1, std::vector<Cell>(cap + 1));
  const Rational walk = child.agents * d;
  if (child.gathered && *child.gathered >= walk)
    for (int j = 0; j <= std::min(child.agents, cap); ++j) out[0][j] = *child.gathered - walk;
  for (int i = 1; i <= cap; ++i) {
    for (int j = 0; j <= cap; ++j) {
      const Cell& b = child.cell[i][j];
      if (!b) continue;
      out[i][j] = j == 0 ? Rational(min_of(*b, Rational(0)) - i * d) : Rational(*b - (i + j) * d);
    }
    // The whole side may instead walk up to meet the carriers on the edge.
    if (child.gathered && child.agents > 0) {
      const Rational y = min_of(d, Rational(*child.gathered / child.agents));
      const Rational left = *child.gathered - child.agents * y;
      for (int j = 0; j <= cap; ++j) {
        if (j > 0 && i + j <= child.agents) continue;
        const Rational value = (j == 0 ? Rational(0) : left) - (i + j) * (d - y);
        improve(out[i][j], value);
      }
    }
    // Or an agent standing at the child end walks out to fetch the message and brings it back.
    if (local > 0 && child.cell[1][1] && *child.cell[1][1] > 0) {
      const Rational y = min_of(d, Rational(*child.cell[1][1] / 2));
      improve(out[i][0], Rational(-i * (d - y)));
    }
    suffix_max(out[i]);
  }
  return out;
}

// Moving agents in and out of one child: from a agents at the node to a' afterwards.
Matrix transition(const Matrix& lifted, int cap) {
  Matrix out(cap + 1, std::vector<Cell>(cap + 1));
  for (int a = 0; a <= cap; ++a)
    for (int i = 0; i <= a; ++i)
      for (int j = 0; j <= cap; ++j)
        if (lifted[i][j]) improve(out[a][std::min(cap, a - i + j)], *lifted[i][j]);
  return out;
}

// Best value for every final agent count, starting with `start` informed agents and serving the
// children one after another in the best order.
std::vector<Cell> serve(int start, const std::vector<Matrix>& steps, int cap) {
  std::vector<Cell> best(cap + 1);
  std::vector<int> order(steps.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  do {
    std::vector<Cell> cur(cap + 1);
    cur[std::min(start, cap)] = Rational(0);
    for (int k : order) {
      std::vector<Cell> next(cap + 1);
      for (int a = 0; a <= cap; ++a) {
        if (!cur[a]) continue;
        for (int b = 0; b <= cap; ++b)
          if (steps[k][a][b]) improve(next[b], *cur[a] + *steps[k][a][b]);
      }
      cur = std::move(next);
    }
    for (int a = 0; a <= cap; ++a)
      if (cur[a]) improve(best[a], *cur[a]);
  } while (std::next_permutation(order.begin(), order.end()));
  suffix_max(best);
  return best;
}

void check_broadcast_input(const Network& tree, int limit) {
  check_tree(tree);
  if (tree.agent_count() > limit)
    throw PreconditionError("broadcast tables support at most " + std::to_string(limit) + " agents");
}

// Lifted tables of every neighbor side of `x` except the one through `skip` (-1 for none).
std::vector<Matrix> child_steps(const Network& tree, const Adjacency& adj, const BroadcastTables& tables, int x,
                                int skip, int cap) {
  const auto local = node_agents(tree);
  std::vector<Matrix> steps;
  for (auto [w, e] : adj.nbr[x])
    if (w != skip)
      steps.push_back(transition(lift(tables.table[directed(tree, e, w)], local[w], tree.edges[e].length, cap), cap));
  return steps;
}

}  // namespace

BroadcastTables broadcast_tables(const Network& tree, int limit) {
  check_broadcast_input(tree, limit);
  const Adjacency adj(tree);
  for (int x = 0; x < tree.node_count(); ++x)
    if (adj.nbr[x].size() > 3) throw PreconditionError("broadcast tables need node degree at most 3; ternarize first");
  const int cap = tree.agent_count();
  const auto energy = node_energy(tree);
  const auto local = node_agents(tree);

  BroadcastTables out;
  out.table.resize(2 * tree.edge_count());
  for (int id : dependency_order(tree, adj)) {
    const int u = tail(tree, id);
    const Edge& edge = tree.edges[id / 2];
    const int v = edge.u == u ? edge.v : edge.u;
    BroadcastTable& t = out.table[id];
    t.cell.assign(cap + 1, std::vector<Cell>(cap + 1));

    t.agents = local[u];
    t.gathered = energy[u];
    for (auto [w, e] : adj.nbr[u]) {
      if (w == v) continue;
      const BroadcastTable& c = out.table[directed(tree, e, w)];
      t.agents += c.agents;
      const Rational walk = c.agents * tree.edges[e].length;
      if (t.gathered && c.gathered && *c.gathered >= walk)
        *t.gathered += *c.gathered - walk;
      else
        t.gathered.reset();
    }

    const auto steps = child_steps(tree, adj, out, u, v, cap);
    for (int i = 1; i <= cap; ++i) {
      auto best = serve(i + local[u], steps, cap);
      for (int j = 0; j <= cap; ++j)
        if (best[j]) t.cell[i][j] = energy[u] + *best[j];
    }
  }
  return out;
}

bool is_broadcast_source(const Network& tree, const BroadcastTables& tables, int root) {
  const Adjacency adj(tree);
  const auto local = node_agents(tree);
  if (local.at(root) == 0) return false;
  const int cap = tree.agent_count();
  const auto best = serve(local[root], child_steps(tree, adj, tables, root, -1, cap), cap);
  const Rational here = node_energy(tree)[root];
  return std::any_of(best.begin(), best.end(), [&](const Cell& c) { return c && here + *c >= 0; });
}

std::vector<int> broadcast_sources(const Network& tree, int limit) {
  check_broadcast_input(tree, limit);
  const DerivedTree ter = ternarize(tree);
  const auto tables = broadcast_tables(ter.tree, limit);
  std::vector<int> out;
  for (int x = 0; x < tree.node_count(); ++x)
    if (is_broadcast_source(ter.tree, tables, x)) out.push_back(x);
  return out;
}

}  // namespace agentex::tree
