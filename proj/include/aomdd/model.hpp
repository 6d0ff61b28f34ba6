#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aomdd {

inline constexpr int kUnassigned = -1;

struct Variable {
  int id = 0;
  int domain_size = 1;
};

/// Assignment to the variables of a model; unassigned entries hold
/// kUnassigned.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t n) : values_(n, kUnassigned) {}
  explicit Assignment(std::vector<int> values) : values_(std::move(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  int operator[](std::size_t v) const { return values_[v]; }
  int& operator[](std::size_t v) { return values_[v]; }
  bool assigned(std::size_t v) const { return values_[v] != kUnassigned; }
  bool full() const;
  const std::vector<int>& values() const noexcept { return values_; }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<int> values_;
};

/// Non-negative table over an ordered scope. Values are stored in
/// mixed-radix order with the last scope variable varying fastest.
class TableFunction {
 public:
  TableFunction() = default;
  TableFunction(std::vector<int> scope, std::vector<int> dims,
                std::vector<double> values);

  const std::vector<int>& scope() const noexcept { return scope_; }
  const std::vector<int>& dims() const noexcept { return dims_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t arity() const noexcept { return scope_.size(); }

  /// Value at the restriction of a (sufficiently assigned) model
  /// assignment to this scope.
  double at(const Assignment& x) const;
  /// Value at a tuple given in scope order.
  double at_tuple(std::span<const int> tuple) const;
  std::size_t index_of(std::span<const int> tuple) const;

 private:
  std::vector<int> scope_;
  std::vector<int> dims_;
  std::vector<double> values_;
};

enum class ModelKind { constraint, weighted };

/// Variables with finite domains and table functions combined by product.
class GraphicalModel {
 public:
  GraphicalModel() = default;
  GraphicalModel(std::vector<int> domain_sizes, std::vector<TableFunction> functions,
                 ModelKind kind);

  std::size_t num_vars() const noexcept { return domains_.size(); }
  int domain_size(int v) const { return domains_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& domain_sizes() const noexcept { return domains_; }
  std::vector<Variable> variables() const;
  const std::vector<TableFunction>& functions() const noexcept { return functions_; }
  ModelKind kind() const noexcept { return kind_; }
  int max_domain_size() const;

  /// Builds a table over `scope` with dims looked up in this model.
  TableFunction make_function(std::vector<int> scope, std::vector<double> values) const;

 private:
  std::vector<int> domains_;
  std::vector<TableFunction> functions_;
  ModelKind kind_ = ModelKind::weighted;
};

/// Product of all functions at a full assignment. Throws PreconditionError
/// when `x` is not full.
double weight_of_full_assignment(const GraphicalModel& model, const Assignment& x);

/// Natural log of weight_of_full_assignment, summed term by term; -inf when
/// some factor is zero.
double log_weight_of_full_assignment(const GraphicalModel& model, const Assignment& x);

inline constexpr std::uint64_t kDefaultBruteForceCap = std::uint64_t{1} << 24;

/// Explicit universal function over variables 0..n-1 (last fastest).
/// Throws ResourceError when the table would exceed `cap` entries.
TableFunction brute_force_table(const GraphicalModel& model,
                                std::uint64_t cap = kDefaultBruteForceCap);

/// Steps `x` to the next full assignment in mixed-radix order (last variable
/// fastest). Returns false after the last one.
bool next_assignment(Assignment& x, std::span<const int> domain_sizes);

GraphicalModel parse_uai(std::istream& in);
GraphicalModel parse_uai(std::string_view text);
void write_uai(std::ostream& out, const GraphicalModel& model);

GraphicalModel parse_dimacs_cnf(std::istream& in);
GraphicalModel parse_dimacs_cnf(std::string_view text);

/// UAI evidence: a count followed by (variable, value) pairs.
Assignment parse_evidence(std::istream& in, const std::vector<int>& domain_sizes);
Assignment parse_evidence(std::string_view text, const std::vector<int>& domain_sizes);

}  // namespace aomdd
