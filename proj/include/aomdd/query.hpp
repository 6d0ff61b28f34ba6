#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "aomdd/diagram.hpp"
#include "aomdd/model.hpp"

namespace aomdd {

using BigCount = boost::multiprecision::cpp_int;

/// Observed variables; an Assignment whose unobserved entries are
/// kUnassigned. An empty Assignment means no evidence.
using Evidence = Assignment;

/// Pseudo-tree variables below node `u` (exclusive) that arc `arc` does not
/// reach through any of its children. For u == kOne with `arc` ignored the
/// root list of `a` is used instead.
std::vector<int> uncovered_variables(const Aomdd& a, NodeRef u, std::size_t arc);
/// Same set for the root AND-list.
std::vector<int> uncovered_root_variables(const Aomdd& a);

/// Root constant times the arc weights along the path that `x` selects.
double evaluate(const Aomdd& a, const Assignment& x);

/// Sum of evaluate over all full assignments consistent with `e`.
double sum_over(const Aomdd& a, const Evidence& e = {});

/// Number of full assignments consistent with `e` whose value is nonzero.
BigCount count_solutions(const Aomdd& a, const Evidence& e = {});

/// Sum traversal of the root list with don't-care factors and the root
/// constant left out. Equals 1 for a normalized weighted diagram (0 for
/// the zero diagram).
double normalized_mass(const Aomdd& a);

struct MpeResult {
  double value = 0.0;
  Assignment witness;
};

/// Maximum of evaluate over assignments consistent with `e`, with a witness.
/// Variables the diagram does not test take value 0 (or their evidence).
MpeResult mpe(const Aomdd& a, const Evidence& e = {});

/// Calls `sink` for up to `limit` nonzero assignments in lexicographic order
/// over the pseudo-tree preorder. Stops early when `sink` returns false.
void enumerate_solutions(const Aomdd& a, std::size_t limit,
                         const std::function<bool(const Assignment&, double)>& sink);
std::vector<std::pair<Assignment, double>> enumerate_solutions(const Aomdd& a, std::size_t limit);

/// Root identity when the diagrams share a table, structural_equal
/// otherwise. Throws StructuralError for different pseudo trees.
bool equivalent(const Aomdd& a, const Aomdd& b);

}  // namespace aomdd
