#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "aomdd/model.hpp"

namespace aomdd {

/// Undirected graph over variable ids; an edge joins two variables that
/// share a function scope.
class PrimalGraph {
 public:
  explicit PrimalGraph(std::size_t n = 0) : adj_(n) {}

  std::size_t size() const noexcept { return adj_.size(); }
  void add_edge(int u, int v);
  bool has_edge(int u, int v) const;
  /// Sorted neighbour list.
  const std::vector<int>& neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }
  std::vector<std::pair<int, int>> edges() const;
  std::size_t num_edges() const;

 private:
  std::vector<std::vector<int>> adj_;
};

PrimalGraph build_primal_graph(const GraphicalModel& model);

/// A permutation of 0..n-1.
class Ordering {
 public:
  Ordering() = default;
  explicit Ordering(std::vector<int> order);

  std::size_t size() const noexcept { return order_.size(); }
  int operator[](std::size_t i) const { return order_[i]; }
  const std::vector<int>& order() const noexcept { return order_; }
  std::size_t position(int v) const { return pos_[static_cast<std::size_t>(v)]; }

  static Ordering identity(std::size_t n);

 private:
  std::vector<int> order_;
  std::vector<std::size_t> pos_;
};

/// Greedy min-fill. The first vertex eliminated is placed last, so the
/// result read back to front is the elimination order. Ties are broken
/// by a generator seeded with `seed`.
Ordering min_fill_ordering(const PrimalGraph& g, std::uint64_t seed);

int induced_width(const PrimalGraph& g, const Ordering& d);

/// Rooted tree over a subset of the variables 0..n-1.
class PseudoTree {
 public:
  static constexpr int kNoParent = -1;
  static constexpr int kAbsent = -2;

  PseudoTree() = default;

  /// `parent[v]` is kNoParent for the single root and kAbsent for variables
  /// outside the tree. Siblings are ordered by ascending `rank[v]`
  /// (defaults to the variable id).
  static PseudoTree from_parents(std::vector<int> parent, std::vector<int> rank = {});

  std::size_t num_vars() const noexcept { return parent_.size(); }
  std::size_t size() const noexcept { return preorder_.size(); }
  bool empty() const noexcept { return preorder_.empty(); }
  bool contains(int v) const { return parent_[static_cast<std::size_t>(v)] != kAbsent; }
  int root() const noexcept { return root_; }
  int parent(int v) const { return parent_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& parents() const noexcept { return parent_; }
  const std::vector<int>& children(int v) const { return children_[static_cast<std::size_t>(v)]; }
  int depth(int v) const { return depth_[static_cast<std::size_t>(v)]; }
  /// Number of variables on the longest root-to-leaf path minus one.
  int height() const noexcept { return height_; }

  /// Depth-first preorder.
  const std::vector<int>& dfs_order() const noexcept { return preorder_; }
  int pre(int v) const { return pre_[static_cast<std::size_t>(v)]; }
  /// One past the last preorder index in the subtree of `v`.
  int subtree_end(int v) const { return end_[static_cast<std::size_t>(v)]; }
  /// Ancestor-or-self.
  bool is_ancestor(int a, int b) const {
    return pre_[static_cast<std::size_t>(a)] <= pre_[static_cast<std::size_t>(b)] &&
           pre_[static_cast<std::size_t>(b)] < end_[static_cast<std::size_t>(a)];
  }
  bool related(int a, int b) const { return is_ancestor(a, b) || is_ancestor(b, a); }
  /// Ancestors from parent up to the root.
  std::vector<int> ancestors(int v) const;

  friend bool operator==(const PseudoTree& a, const PseudoTree& b) {
    return a.parent_ == b.parent_ && a.preorder_ == b.preorder_;
  }

 private:
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  std::vector<int> depth_;
  std::vector<int> preorder_;
  std::vector<int> pre_;
  std::vector<int> end_;
  int root_ = -1;
  int height_ = 0;
};

/// Recursive conditioning: the first variable of `d` is the root and every
/// connected component left after removing it becomes a child subtree.
/// Components of a disconnected graph hang below the global root.
PseudoTree generate_pseudo_tree(const PrimalGraph& g, const Ordering& d);

/// Each variable's parent is its predecessor in `d`.
PseudoTree chain_pseudo_tree(const Ordering& d);

/// Chain over a subset of variables, ordered by `d`.
PseudoTree chain_pseudo_tree(std::vector<int> vars, const Ordering& d, std::size_t n);

/// context(X): ancestors of X adjacent to X or to one of its descendants,
/// closest ancestor first.
std::vector<std::vector<int>> compute_contexts(const PseudoTree& t, const PrimalGraph& g);

/// Function ids per variable; each function lands in the bucket of its
/// deepest scope variable. Empty scopes go to the root. Throws
/// StructuralError when a scope does not lie on a root-to-leaf path.
std::vector<std::vector<int>> compute_buckets(const PseudoTree& t, const GraphicalModel& model);

/// True iff the smaller tree is the larger one with the extra variables
/// deleted and their children reattached to the nearest kept ancestor.
bool embed_check(const PseudoTree& t1, const PseudoTree& t2);

/// Parent array, one line: "tree n p_0 ... p_{n-1}", then the preorder.
void write_pseudo_tree(std::ostream& out, const PseudoTree& t);
void write_pseudo_tree_dot(std::ostream& out, const PseudoTree& t);

}  // namespace aomdd
