#include "aomdd/structure.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <set>

#include "aomdd/errors.hpp"

namespace aomdd {

void PrimalGraph::add_edge(int u, int v) {
  if (u == v) return;
  auto insert = [](std::vector<int>& list, int x) {
    auto it = std::lower_bound(list.begin(), list.end(), x);
    if (it == list.end() || *it != x) list.insert(it, x);
  };
  insert(adj_[static_cast<std::size_t>(u)], v);
  insert(adj_[static_cast<std::size_t>(v)], u);
}

bool PrimalGraph::has_edge(int u, int v) const {
  const auto& list = adj_[static_cast<std::size_t>(u)];
  return std::binary_search(list.begin(), list.end(), v);
}

std::vector<std::pair<int, int>> PrimalGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (std::size_t u = 0; u < adj_.size(); ++u)
    for (int v : adj_[u])
      if (static_cast<int>(u) < v) out.emplace_back(static_cast<int>(u), v);
  return out;
}

std::size_t PrimalGraph::num_edges() const {
  std::size_t total = 0;
  for (const auto& list : adj_) total += list.size();
  return total / 2;
}

PrimalGraph build_primal_graph(const GraphicalModel& model) {
  PrimalGraph g(model.num_vars());
  for (const auto& f : model.functions())
    for (std::size_t i = 0; i < f.arity(); ++i)
      for (std::size_t j = i + 1; j < f.arity(); ++j) g.add_edge(f.scope()[i], f.scope()[j]);
  return g;
}

Ordering::Ordering(std::vector<int> order) : order_(std::move(order)), pos_(order_.size()) {
  std::vector<char> seen(order_.size(), 0);
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const int v = order_[i];
    if (v < 0 || static_cast<std::size_t>(v) >= order_.size() || seen[static_cast<std::size_t>(v)])
      throw PreconditionError("ordering is not a permutation of 0..n-1");
    seen[static_cast<std::size_t>(v)] = 1;
    pos_[static_cast<std::size_t>(v)] = i;
  }
}

Ordering Ordering::identity(std::size_t n) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  return Ordering(std::move(order));
}

namespace {

using AdjSets = std::vector<std::set<int>>;

AdjSets to_sets(const PrimalGraph& g) {
  AdjSets adj(g.size());
  for (std::size_t v = 0; v < g.size(); ++v)
    adj[v].insert(g.neighbors(static_cast<int>(v)).begin(), g.neighbors(static_cast<int>(v)).end());
  return adj;
}

std::size_t fill_in(const AdjSets& adj, int v) {
  const auto& nb = adj[static_cast<std::size_t>(v)];
  std::size_t missing = 0;
  for (auto i = nb.begin(); i != nb.end(); ++i)
    for (auto j = std::next(i); j != nb.end(); ++j)
      if (!adj[static_cast<std::size_t>(*i)].count(*j)) ++missing;
  return missing;
}

}  // namespace

Ordering min_fill_ordering(const PrimalGraph& g, std::uint64_t seed) {
  const std::size_t n = g.size();
  AdjSets adj = to_sets(g);
  std::mt19937_64 rng(seed);
  std::vector<char> alive(n, 1);
  std::vector<std::size_t> score(n);
  for (std::size_t v = 0; v < n; ++v) score[v] = fill_in(adj, static_cast<int>(v));

  std::vector<int> order(n);
  std::vector<int> best;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best_score = std::numeric_limits<std::size_t>::max();
    best.clear();
    for (std::size_t v = 0; v < n; ++v) {
      if (!alive[v]) continue;
      if (score[v] < best_score) {
        best_score = score[v];
        best.clear();
      }
      if (score[v] == best_score) best.push_back(static_cast<int>(v));
    }
    std::uniform_int_distribution<std::size_t> pick(0, best.size() - 1);
    const int v = best[pick(rng)];
    order[n - 1 - step] = v;
    alive[static_cast<std::size_t>(v)] = 0;

    const std::vector<int> nb(adj[static_cast<std::size_t>(v)].begin(),
                              adj[static_cast<std::size_t>(v)].end());
    for (int u : nb) adj[static_cast<std::size_t>(u)].erase(v);
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        adj[static_cast<std::size_t>(nb[i])].insert(nb[j]);
        adj[static_cast<std::size_t>(nb[j])].insert(nb[i]);
      }
    adj[static_cast<std::size_t>(v)].clear();

    std::set<int> touched(nb.begin(), nb.end());
    for (int u : nb) touched.insert(adj[static_cast<std::size_t>(u)].begin(), adj[static_cast<std::size_t>(u)].end());
    for (int u : touched) score[static_cast<std::size_t>(u)] = fill_in(adj, u);
  }
  return Ordering(std::move(order));
}

int induced_width(const PrimalGraph& g, const Ordering& d) {
  AdjSets adj = to_sets(g);
  int width = 0;
  for (std::size_t i = d.size(); i-- > 0;) {
    const int v = d[i];
    std::vector<int> earlier;
    for (int u : adj[static_cast<std::size_t>(v)])
      if (d.position(u) < i) earlier.push_back(u);
    width = std::max(width, static_cast<int>(earlier.size()));
    for (std::size_t a = 0; a < earlier.size(); ++a)
      for (std::size_t b = a + 1; b < earlier.size(); ++b) {
        adj[static_cast<std::size_t>(earlier[a])].insert(earlier[b]);
        adj[static_cast<std::size_t>(earlier[b])].insert(earlier[a]);
      }
  }
  return width;
}

// ---------------------------------------------------------------------------

PseudoTree PseudoTree::from_parents(std::vector<int> parent, std::vector<int> rank) {
  const std::size_t n = parent.size();
  if (rank.empty()) {
    rank.resize(n);
    std::iota(rank.begin(), rank.end(), 0);
  }
  PseudoTree t;
  t.parent_ = std::move(parent);
  t.children_.assign(n, {});
  t.depth_.assign(n, -1);
  t.pre_.assign(n, -1);
  t.end_.assign(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    const int p = t.parent_[v];
    if (p == kAbsent) continue;
    if (p == kNoParent) {
      if (t.root_ != -1) throw StructuralError("pseudo tree has more than one root");
      t.root_ = static_cast<int>(v);
    } else {
      if (p < 0 || static_cast<std::size_t>(p) >= n || t.parent_[static_cast<std::size_t>(p)] == kAbsent)
        throw StructuralError("pseudo tree parent of " + std::to_string(v) + " is not in the tree");
      t.children_[static_cast<std::size_t>(p)].push_back(static_cast<int>(v));
    }
  }
  for (auto& kids : t.children_)
    std::sort(kids.begin(), kids.end(), [&](int a, int b) {
      return rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)];
    });

  std::size_t members = 0;
  for (int p : t.parent_) members += p != kAbsent;
  if (members == 0) return t;
  if (t.root_ == -1) throw StructuralError("pseudo tree has no root");

  // Iterative preorder; end_ is filled when a node's last child finishes.
  std::vector<std::pair<int, std::size_t>> stack{{t.root_, 0}};
  t.depth_[static_cast<std::size_t>(t.root_)] = 0;
  t.pre_[static_cast<std::size_t>(t.root_)] = 0;
  t.preorder_.push_back(t.root_);
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    const auto& kids = t.children_[static_cast<std::size_t>(v)];
    if (next < kids.size()) {
      const int c = kids[next++];
      if (t.pre_[static_cast<std::size_t>(c)] != -1) throw StructuralError("pseudo tree has a cycle");
      t.depth_[static_cast<std::size_t>(c)] = t.depth_[static_cast<std::size_t>(v)] + 1;
      t.height_ = std::max(t.height_, t.depth_[static_cast<std::size_t>(c)]);
      t.pre_[static_cast<std::size_t>(c)] = static_cast<int>(t.preorder_.size());
      t.preorder_.push_back(c);
      stack.emplace_back(c, 0);
    } else {
      t.end_[static_cast<std::size_t>(v)] = static_cast<int>(t.preorder_.size());
      stack.pop_back();
    }
  }
  if (t.preorder_.size() != members) throw StructuralError("pseudo tree is not connected");
  return t;
}

std::vector<int> PseudoTree::ancestors(int v) const {
  std::vector<int> out;
  for (int p = parent(v); p >= 0; p = parent(p)) out.push_back(p);
  return out;
}

PseudoTree generate_pseudo_tree(const PrimalGraph& g, const Ordering& d) {
  const std::size_t n = g.size();
  if (d.size() != n) throw PreconditionError("ordering size differs from graph size");
  std::vector<int> parent(n, PseudoTree::kAbsent);
  std::vector<int> rank(n);
  for (std::size_t v = 0; v < n; ++v) rank[v] = static_cast<int>(d.position(static_cast<int>(v)));
  if (n == 0) return PseudoTree::from_parents(parent, rank);

  // stamp[v] identifies the work item that currently owns v.
  std::vector<int> stamp(n, 0);
  int next_stamp = 1;
  struct Item {
    int parent;
    std::vector<int> vertices;
  };
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<Item> work{{PseudoTree::kNoParent, std::move(all)}};

  while (!work.empty()) {
    Item item = std::move(work.back());
    work.pop_back();
    const int root = *std::min_element(item.vertices.begin(), item.vertices.end(),
                                       [&](int a, int b) { return d.position(a) < d.position(b); });
    parent[static_cast<std::size_t>(root)] = item.parent;
    const int own = next_stamp++;
    for (int v : item.vertices) stamp[static_cast<std::size_t>(v)] = own;
    stamp[static_cast<std::size_t>(root)] = 0;

    for (int s : item.vertices) {
      if (stamp[static_cast<std::size_t>(s)] != own) continue;
      const int comp = next_stamp++;
      std::vector<int> component{s};
      stamp[static_cast<std::size_t>(s)] = comp;
      for (std::size_t head = 0; head < component.size(); ++head)
        for (int u : g.neighbors(component[head]))
          if (stamp[static_cast<std::size_t>(u)] == own) {
            stamp[static_cast<std::size_t>(u)] = comp;
            component.push_back(u);
          }
      work.push_back({root, std::move(component)});
    }
  }
  return PseudoTree::from_parents(std::move(parent), std::move(rank));
}

PseudoTree chain_pseudo_tree(const Ordering& d) {
  return chain_pseudo_tree(d.order(), d, d.size());
}

PseudoTree chain_pseudo_tree(std::vector<int> vars, const Ordering& d, std::size_t n) {
  std::sort(vars.begin(), vars.end(), [&](int a, int b) { return d.position(a) < d.position(b); });
  std::vector<int> parent(n, PseudoTree::kAbsent);
  for (std::size_t i = 0; i < vars.size(); ++i)
    parent[static_cast<std::size_t>(vars[i])] = i == 0 ? PseudoTree::kNoParent : vars[i - 1];
  return PseudoTree::from_parents(std::move(parent));
}

std::vector<std::vector<int>> compute_contexts(const PseudoTree& t, const PrimalGraph& g) {
  const std::size_t n = t.num_vars();
  std::vector<std::vector<int>> ctx(n);
  const auto& order = t.dfs_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int x = *it;
    std::set<int> acc;
    for (int u : g.neighbors(x))
      if (t.contains(u) && u != x && t.is_ancestor(u, x)) acc.insert(u);
    for (int c : t.children(x))
      for (int u : ctx[static_cast<std::size_t>(c)])
        if (u != x) acc.insert(u);
    std::vector<int> list(acc.begin(), acc.end());
    std::sort(list.begin(), list.end(), [&](int a, int b) { return t.depth(a) > t.depth(b); });
    ctx[static_cast<std::size_t>(x)] = std::move(list);
  }
  return ctx;
}

std::vector<std::vector<int>> compute_buckets(const PseudoTree& t, const GraphicalModel& model) {
  std::vector<std::vector<int>> buckets(t.num_vars());
  const auto& fns = model.functions();
  for (std::size_t i = 0; i < fns.size(); ++i) {
    const auto& scope = fns[i].scope();
    if (scope.empty()) {
      if (t.empty()) throw StructuralError("no root for a constant function");
      buckets[static_cast<std::size_t>(t.root())].push_back(static_cast<int>(i));
      continue;
    }
    for (int v : scope)
      if (static_cast<std::size_t>(v) >= t.num_vars() || !t.contains(v))
        throw StructuralError("function " + std::to_string(i) + ": variable " + std::to_string(v) +
                              " is not in the pseudo tree");
    const int deepest = *std::max_element(scope.begin(), scope.end(),
                                          [&](int a, int b) { return t.depth(a) < t.depth(b); });
    for (int v : scope)
      if (!t.is_ancestor(v, deepest))
        throw StructuralError("function " + std::to_string(i) +
                              ": scope does not lie on a root-to-leaf path (variables " +
                              std::to_string(v) + " and " + std::to_string(deepest) + ")");
    buckets[static_cast<std::size_t>(deepest)].push_back(static_cast<int>(i));
  }
  return buckets;
}

bool embed_check(const PseudoTree& t1, const PseudoTree& t2) {
  if (t1.num_vars() != t2.num_vars()) return false;
  const PseudoTree& small = t1.size() <= t2.size() ? t1 : t2;
  const PseudoTree& large = t1.size() <= t2.size() ? t2 : t1;
  for (int v : small.dfs_order())
    if (!large.contains(v)) return false;
  for (int v : small.dfs_order()) {
    int p = large.parent(v);
    while (p >= 0 && !small.contains(p)) p = large.parent(p);
    if (p != small.parent(v)) return false;
  }
  return true;
}

void write_pseudo_tree(std::ostream& out, const PseudoTree& t) {
  out << "tree " << t.num_vars();
  for (int p : t.parents()) out << ' ' << p;
  out << "\norder " << t.size();
  for (int v : t.dfs_order()) out << ' ' << v;
  out << '\n';
}

void write_pseudo_tree_dot(std::ostream& out, const PseudoTree& t) {
  out << "digraph pseudo_tree {\n";
  for (int v : t.dfs_order()) out << "  x" << v << " [label=\"" << v << "\"];\n";
  for (int v : t.dfs_order())
    for (int c : t.children(v)) out << "  x" << v << " -> x" << c << ";\n";
  out << "}\n";
}

}  // namespace aomdd
