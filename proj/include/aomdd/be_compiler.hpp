#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "aomdd/diagram.hpp"
#include "aomdd/model.hpp"
#include "aomdd/structure.hpp"

namespace aomdd {

/// Chain diagram (an MDD) for one table, scope ordered by `d`. Its pseudo
/// tree is the chain over the scope.
Aomdd function_to_chain_aomdd(const TableFunction& f, const Ordering& d,
                              std::shared_ptr<UniqueTable> table);

/// One node whose variable is an ancestor-or-self of every member.
struct ApplyGroup {
  NodeRef root = kOne;
  std::vector<NodeRef> members;
};

/// Groups the union of two AND-lists into maximal sets headed by a common
/// ancestor. Lists must be canonical (no ancestor pairs inside a list).
std::vector<ApplyGroup> group_descendants(const ChildList& list_f, const ChildList& list_g,
                                          const PseudoTree& t, const UniqueTable& table);

struct ApplyStats {
  std::size_t calls = 0;
  std::size_t memo_hits = 0;
};

/// Product of diagrams that share one unique table and embed in `t`.
class Apply {
 public:
  Apply(std::shared_ptr<const PseudoTree> t, std::shared_ptr<UniqueTable> table);

  /// v1 * (z1 and ... and zm). var(v1) must be an ancestor-or-self of every
  /// var(zi); the zi must be pairwise unrelated.
  Factor apply(NodeRef v1, std::span<const NodeRef> zs);

  /// Product of two factors (constants multiply, lists are joined).
  Factor multiply(const Factor& f, const Factor& g);

  const ApplyStats& stats() const noexcept { return stats_; }

 private:
  Factor combine_lists(const ChildList& f, const ChildList& g);

  struct KeyHash {
    std::size_t operator()(const std::vector<NodeRef>& key) const;
  };

  std::shared_ptr<const PseudoTree> tree_;
  std::shared_ptr<UniqueTable> table_;
  std::unordered_map<std::vector<NodeRef>, Factor, KeyHash> memo_;
  ApplyStats stats_;
};

struct BucketReport {
  int var = -1;
  std::vector<std::size_t> input_sizes;
  std::size_t output_size = 0;
  std::size_t apply_calls = 0;
  std::size_t memo_hits = 0;
};

struct BeResult {
  Aomdd diagram;
  std::vector<BucketReport> buckets;

  void write_report(std::ostream& out) const;
};

/// Bucket-elimination schedule over the pseudo tree generated from `d`,
/// folding each bucket with Apply and never eliminating the variable.
BeResult compile_be(const GraphicalModel& model, const Ordering& d,
                    std::shared_ptr<UniqueTable> table);

/// Same schedule over a given tree; every parent must precede its children
/// in `d` and every scope must lie on a root-to-leaf path.
BeResult compile_be(const GraphicalModel& model, const Ordering& d,
                    std::shared_ptr<const PseudoTree> tree, std::shared_ptr<UniqueTable> table);

/// Meta-nodes reachable from a factor.
std::size_t factor_size(const Factor& f, const UniqueTable& table);

}  // namespace aomdd
