#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "aomdd/diagram.hpp"
#include "aomdd/model.hpp"
#include "aomdd/structure.hpp"

namespace aomdd {

/// Consistency test consulted before each AND expansion.
///
/// A hook must be sound (never reject a value that extends to a nonzero
/// solution of the subproblem) and must depend only on the assignment to
/// the expanded variable and its context, since results are cached by
/// context.
class PruningHook {
 public:
  virtual ~PruningHook() = default;
  /// Called once per compilation before the search starts.
  virtual void prepare(const GraphicalModel& model, const PseudoTree& tree,
                       const std::vector<std::vector<int>>& contexts) = 0;
  /// `partial` holds the current path; `var` is already set to `value`.
  virtual bool consistent(int var, int value, const Assignment& partial) = 0;
};

std::unique_ptr<PruningHook> null_hook();

/// A nogood forbids the conjunction of its (variable, value) pairs. CNF
/// clauses and zero table entries both become nogoods.
struct Nogood {
  std::vector<std::pair<int, int>> literals;
};

/// Generalized unit propagation over nogoods on multi-valued domains.
class UnitPropagator {
 public:
  UnitPropagator(std::vector<int> domain_sizes, std::vector<Nogood> nogoods);

  /// Extends `x` with forced values. Returns false on a conflict.
  bool propagate(Assignment& x) const;
  /// Same, considering only the nogoods listed in `subset`.
  bool propagate(Assignment& x, std::span<const int> subset) const;

  const std::vector<Nogood>& nogoods() const noexcept { return nogoods_; }

 private:
  std::vector<int> domains_;
  std::vector<Nogood> nogoods_;
};

/// One nogood per zero table entry.
std::vector<Nogood> zero_tuples_as_nogoods(const GraphicalModel& model);

/// Unit propagation restricted, for each expanded variable X, to the
/// nogoods that touch X's pseudo-tree subtree, seeded with X's context.
std::unique_ptr<PruningHook> bcp_hook(const GraphicalModel& model);

/// Product of the bucket functions at `partial` extended by var = value.
/// Throws StructuralError when a scope variable is unassigned.
double arc_weight(const GraphicalModel& model, std::span<const int> bucket, int var, int value,
                  Assignment& partial);

enum class Reduction {
  inline_,   ///< reduce each meta-node when the search backtracks out of it
  deferred,  ///< build the context-minimal graph, then reduce level by level
};

struct SearchOptions {
  Reduction reduction = Reduction::inline_;
  PruningHook* hook = nullptr;
  /// Cap on cached subproblems (and stored graph nodes); 0 disables.
  std::size_t cache_cap = 0;
};

struct SearchCounters {
  std::vector<std::size_t> or_expansions;
  std::vector<std::size_t> and_expansions;
  std::vector<std::size_t> cache_hits;
  std::vector<std::size_t> pruned;

  void write(std::ostream& out) const;
};

struct SearchResult {
  Aomdd diagram;
  SearchCounters counters;
};

SearchResult compile_search(const GraphicalModel& model, std::shared_ptr<const PseudoTree> tree,
                            std::shared_ptr<UniqueTable> table, const SearchOptions& options = {});

/// The unreduced context-minimal AND/OR graph explored by the search.
class ContextMinimalGraph {
 public:
  static constexpr int kDead = -1;
  static constexpr int kLeaf = -2;

  struct Node {
    int var = -1;
    std::vector<double> weights;
    /// Per value: graph ids of the pseudo-tree children (kDead when the arc
    /// was pruned).
    std::vector<std::vector<int>> children;
  };

  std::vector<Node> nodes;
  int root = kLeaf;

  double evaluate(const Assignment& x) const;
  std::size_t size() const noexcept { return nodes.size(); }
};

struct ContextMinimalResult {
  ContextMinimalGraph graph;
  SearchCounters counters;
};

ContextMinimalResult build_context_minimal_graph(const GraphicalModel& model,
                                                 const PseudoTree& tree,
                                                 const SearchOptions& options = {});

/// Candidate meta-node of one variable whose children are already reduced.
using Candidate = std::vector<Arc>;

/// Reduces one level: each candidate passes through make_node, so
/// isomorphic candidates share a node and redundant ones dissolve.
std::vector<Factor> reduce_level(int var, std::vector<Candidate> candidates, UniqueTable& table);

/// Bottom-up reduction of a saved context-minimal graph.
Aomdd bottom_up_reduction(const ContextMinimalGraph& graph, std::shared_ptr<const PseudoTree> tree,
                          std::shared_ptr<UniqueTable> table);

}  // namespace aomdd
