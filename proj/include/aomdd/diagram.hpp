#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "aomdd/numeric.hpp"
#include "aomdd/structure.hpp"

namespace aomdd {

/// Index into a UniqueTable arena. 0 and 1 are the terminals.
using NodeRef = std::uint32_t;
inline constexpr NodeRef kZero = 0;
inline constexpr NodeRef kOne = 1;
inline constexpr bool is_terminal(NodeRef r) { return r <= kOne; }

/// AND-list of independent sub-diagrams. Canonical lists are exactly one
/// of: {kZero}, {kOne}, or non-terminal refs sorted by the pseudo-tree
/// preorder of their variables.
using ChildList = std::vector<NodeRef>;

/// A (constant, AND-list) pair: the value of the list scaled by `constant`.
/// Returned wherever a node may dissolve into its children.
struct Factor {
  double constant = 1.0;
  ChildList nodes{kOne};

  static Factor one() { return {1.0, {kOne}}; }
  static Factor zero() { return {0.0, {kZero}}; }
  static Factor of(NodeRef r, double c = 1.0) {
    return r == kZero ? zero() : Factor{c, {r}};
  }
  bool is_zero() const { return constant == 0.0 || (nodes.size() == 1 && nodes[0] == kZero); }
};

struct Arc {
  double weight = 0.0;
  ChildList children{kZero};

  friend bool operator==(const Arc&, const Arc&) = default;
};

struct MetaNode {
  int var = -1;
  std::vector<Arc> arcs;
};

enum class WeightMode {
  constraint,  ///< weights stay 0/1, no normalization
  weighted,    ///< per-node normalization, constants promoted upwards
};

struct DiagramConfig {
  WeightMode mode = WeightMode::weighted;
  int epsilon_digits = 12;
  /// Maximum number of stored meta-nodes; 0 disables the cap.
  std::size_t node_cap = 0;
};

class UniqueTable;

/// Scales `arcs` so their weights sum to 1 and returns the sum. Arcs with
/// weight 0 get children {kZero}. A zero return means every arc is dead.
double normalize_arcs(std::vector<Arc>& arcs);

/// Appends the nodes of `list` to `into`, keeping the canonical form.
/// Both inputs must cover disjoint pseudo-tree branches; the caller is
/// responsible for sort order (see merge_lists for the general case).
void append_list(ChildList& into, const ChildList& list);

/// Union of two AND-lists over disjoint branches, sorted by preorder.
ChildList merge_lists(const ChildList& a, const ChildList& b, const PseudoTree& t,
                      const UniqueTable& table);

/// Arena of hash-consed meta-nodes. Nodes of the same variable with equal
/// arcs (children and interned weights) are stored once.
class UniqueTable {
 public:
  UniqueTable(std::vector<int> domain_sizes, DiagramConfig config);
  UniqueTable(const UniqueTable&) = delete;
  UniqueTable& operator=(const UniqueTable&) = delete;

  const DiagramConfig& config() const noexcept { return config_; }
  WeightMode mode() const noexcept { return config_.mode; }
  const std::vector<int>& domain_sizes() const noexcept { return domains_; }
  std::size_t num_vars() const noexcept { return domains_.size(); }

  /// Normalizes (weighted mode), removes redundancy and hash-conses. The
  /// result is either a single node with the promoted constant, or, when
  /// every arc has the same children and weight, that common list with the
  /// common weight folded into the constant.
  Factor make_node(int var, std::vector<Arc> arcs);

  /// Hash-conses the arcs exactly as given; no normalization or
  /// redundancy check. Used when loading stored diagrams.
  NodeRef insert_raw(int var, std::vector<Arc> arcs);

  const MetaNode& node(NodeRef r) const { return nodes_[r]; }
  int var(NodeRef r) const { return nodes_[r].var; }
  /// Stored non-terminal nodes.
  std::size_t size() const noexcept { return nodes_.size() - 2; }

  bool weights_equal(double a, double b) const {
    return aomdd::weights_equal(a, b, config_.epsilon_digits);
  }
  /// Interned representative of `w` (see WeightRegistry).
  double snap(double w) { return registry_.snap(w); }
  /// Root factor with its constant interned, so compilers that multiply in
  /// different orders agree on the stored value.
  Factor canonical_root(Factor f);

  /// Counters for reduction events.
  std::size_t redundant_hits() const noexcept { return redundant_hits_; }
  std::size_t isomorphic_hits() const noexcept { return isomorphic_hits_; }

 private:
  struct NodeHash {
    const UniqueTable* table;
    std::size_t operator()(NodeRef r) const;
  };
  struct NodeEq {
    const UniqueTable* table;
    bool operator()(NodeRef a, NodeRef b) const;
  };
  using Level = std::unordered_set<NodeRef, NodeHash, NodeEq>;

  NodeRef intern(int var, std::vector<Arc> arcs);
  void check_arity(int var, const std::vector<Arc>& arcs) const;

  std::vector<int> domains_;
  DiagramConfig config_;
  WeightRegistry registry_;
  std::vector<MetaNode> nodes_;
  std::vector<Level> levels_;
  std::size_t redundant_hits_ = 0;
  std::size_t isomorphic_hits_ = 0;
};

std::shared_ptr<UniqueTable> make_table(const GraphicalModel& model, int epsilon_digits = 12,
                                        std::size_t node_cap = 0);

/// A compiled diagram: canonical for its function and pseudo tree.
struct Aomdd {
  std::shared_ptr<const PseudoTree> tree;
  std::shared_ptr<UniqueTable> table;
  /// Root AND-list scaled by the root constant.
  Factor root;

  const UniqueTable& nodes() const { return *table; }
};

struct DiagramStats {
  std::vector<std::size_t> nodes_per_var;
  std::size_t total_nodes = 0;
  /// Number of (AND-arc -> child) references, terminal children included.
  std::size_t total_edges = 0;
};

/// Non-terminal nodes reachable from the root, children before parents.
/// Arcs are visited in value order and lists in stored order, so the result
/// depends only on the diagram's structure.
std::vector<NodeRef> reachable_postorder(const Aomdd& a);

DiagramStats count_stats(const Aomdd& a);

/// Throws StructuralError when the pseudo trees differ. Shared tables
/// compare root references; otherwise a memoized recursive isomorphism
/// check is used. Root constants compare with weights_equal.
bool structural_equal(const Aomdd& a, const Aomdd& b);

/// Full scans used by tests: no isomorphic pair, no redundant node, and (in
/// weighted mode) weights summing to 1 within `sum_tol`. Returns a
/// description of the first violation, or an empty string.
std::string check_reduced(const Aomdd& a, double sum_tol = 1e-9);

}  // namespace aomdd
