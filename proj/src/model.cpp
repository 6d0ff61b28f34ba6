#include "aomdd/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "aomdd/errors.hpp"
#include "aomdd/numeric.hpp"

namespace aomdd {

bool Assignment::full() const {
  return std::none_of(values_.begin(), values_.end(),
                      [](int v) { return v == kUnassigned; });
}

TableFunction::TableFunction(std::vector<int> scope, std::vector<int> dims,
                             std::vector<double> values)
    : scope_(std::move(scope)), dims_(std::move(dims)), values_(std::move(values)) {
  if (scope_.size() != dims_.size())
    throw PreconditionError("table function: scope and dims differ in length");
  std::size_t expected = 1;
  for (int d : dims_) {
    if (d < 1) throw PreconditionError("table function: domain size < 1");
    expected *= static_cast<std::size_t>(d);
  }
  if (values_.size() != expected)
    throw PreconditionError("table function: expected " + std::to_string(expected) +
                            " values, got " + std::to_string(values_.size()));
  std::vector<int> sorted = scope_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw PreconditionError("table function: duplicate variable in scope");
  for (double v : values_)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw PreconditionError("table function: values must be finite and non-negative");
}

std::size_t TableFunction::index_of(std::span<const int> tuple) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < scope_.size(); ++i)
    idx = idx * static_cast<std::size_t>(dims_[i]) + static_cast<std::size_t>(tuple[i]);
  return idx;
}

double TableFunction::at_tuple(std::span<const int> tuple) const {
  return values_[index_of(tuple)];
}

double TableFunction::at(const Assignment& x) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < scope_.size(); ++i) {
    const int v = x[static_cast<std::size_t>(scope_[i])];
    if (v == kUnassigned)
      throw PreconditionError("variable " + std::to_string(scope_[i]) + " is unassigned");
    idx = idx * static_cast<std::size_t>(dims_[i]) + static_cast<std::size_t>(v);
  }
  return values_[idx];
}

GraphicalModel::GraphicalModel(std::vector<int> domain_sizes,
                               std::vector<TableFunction> functions, ModelKind kind)
    : domains_(std::move(domain_sizes)), functions_(std::move(functions)), kind_(kind) {
  for (int d : domains_)
    if (d < 1) throw PreconditionError("domain size must be >= 1");
  const int n = static_cast<int>(domains_.size());
  for (const auto& f : functions_) {
    for (std::size_t i = 0; i < f.arity(); ++i) {
      const int v = f.scope()[i];
      if (v < 0 || v >= n)
        throw PreconditionError("scope variable " + std::to_string(v) + " does not exist");
      if (f.dims()[i] != domains_[static_cast<std::size_t>(v)])
        throw PreconditionError("table dims disagree with domain of variable " +
                                std::to_string(v));
    }
    if (kind_ == ModelKind::constraint)
      for (double v : f.values())
        if (v != 0.0 && v != 1.0)
          throw PreconditionError("constraint model tables must be 0/1");
  }
}

std::vector<Variable> GraphicalModel::variables() const {
  std::vector<Variable> out;
  out.reserve(domains_.size());
  for (std::size_t i = 0; i < domains_.size(); ++i)
    out.push_back({static_cast<int>(i), domains_[i]});
  return out;
}

int GraphicalModel::max_domain_size() const {
  return domains_.empty() ? 1 : *std::max_element(domains_.begin(), domains_.end());
}

TableFunction GraphicalModel::make_function(std::vector<int> scope,
                                            std::vector<double> values) const {
  std::vector<int> dims;
  dims.reserve(scope.size());
  for (int v : scope) {
    if (v < 0 || v >= static_cast<int>(domains_.size()))
      throw PreconditionError("scope variable " + std::to_string(v) + " does not exist");
    dims.push_back(domains_[static_cast<std::size_t>(v)]);
  }
  return TableFunction(std::move(scope), std::move(dims), std::move(values));
}

namespace {

void require_full(const GraphicalModel& model, const Assignment& x) {
  if (x.size() != model.num_vars())
    throw PreconditionError("assignment has " + std::to_string(x.size()) +
                            " entries, model has " + std::to_string(model.num_vars()) +
                            " variables");
  for (std::size_t v = 0; v < x.size(); ++v) {
    if (x[v] == kUnassigned)
      throw PreconditionError("variable " + std::to_string(v) + " is unassigned");
    if (x[v] < 0 || x[v] >= model.domain_size(static_cast<int>(v)))
      throw PreconditionError("value out of range for variable " + std::to_string(v));
  }
}

}  // namespace

double weight_of_full_assignment(const GraphicalModel& model, const Assignment& x) {
  require_full(model, x);
  double w = 1.0;
  for (const auto& f : model.functions()) {
    w *= f.at(x);
    if (w == 0.0) return 0.0;
  }
  return w;
}

double log_weight_of_full_assignment(const GraphicalModel& model, const Assignment& x) {
  require_full(model, x);
  double lw = 0.0;
  for (const auto& f : model.functions()) {
    const double v = f.at(x);
    if (v == 0.0) return -std::numeric_limits<double>::infinity();
    lw += std::log(v);
  }
  return lw;
}

bool next_assignment(Assignment& x, std::span<const int> domain_sizes) {
  for (std::size_t i = x.size(); i-- > 0;) {
    if (++x[i] < domain_sizes[i]) return true;
    x[i] = 0;
  }
  return false;
}

TableFunction brute_force_table(const GraphicalModel& model, std::uint64_t cap) {
  const std::size_t n = model.num_vars();
  std::uint64_t total = 1;
  for (int d : model.domain_sizes()) {
    total *= static_cast<std::uint64_t>(d);
    if (total > cap)
      throw ResourceError("brute-force table exceeds cap of " + std::to_string(cap) +
                          " entries");
  }
  std::vector<int> scope(n);
  for (std::size_t i = 0; i < n; ++i) scope[i] = static_cast<int>(i);
  std::vector<double> values;
  values.reserve(total);
  Assignment x(std::vector<int>(n, 0));
  do {
    values.push_back(weight_of_full_assignment(model, x));
  } while (next_assignment(x, model.domain_sizes()));
  return TableFunction(std::move(scope), model.domain_sizes(), std::move(values));
}

// ---------------------------------------------------------------------------
// Text formats

namespace {

class Tokenizer {
 public:
  explicit Tokenizer(std::istream& in) : in_(in) {}

  /// Next whitespace-delimited token; empty at end of input.
  std::string next() {
    std::string tok;
    int c;
    while ((c = in_.get()) != EOF) {
      if (c == '\n') ++line_;
      if (!std::isspace(c)) break;
    }
    if (c == EOF) return tok;
    tok_line_ = line_;
    tok.push_back(static_cast<char>(c));
    while ((c = in_.peek()) != EOF && !std::isspace(c)) tok.push_back(static_cast<char>(in_.get()));
    return tok;
  }

  /// Skips the remainder of the current line.
  void skip_line() {
    int c;
    while ((c = in_.get()) != EOF && c != '\n') {
    }
    if (c == '\n') ++line_;
  }

  int line() const noexcept { return tok_line_; }

  long long integer(const char* what) {
    const std::string tok = next();
    if (tok.empty()) throw ParseError(std::string("unexpected end of input, expected ") + what, line_);
    long long v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
      throw ParseError("expected " + std::string(what) + ", got '" + tok + "'", tok_line_);
    return v;
  }

  double real(const char* what) {
    const std::string tok = next();
    if (tok.empty()) throw ParseError(std::string("unexpected end of input, expected ") + what, line_);
    double v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
      throw ParseError("expected " + std::string(what) + ", got '" + tok + "'", tok_line_);
    return v;
  }

 private:
  std::istream& in_;
  int line_ = 1;
  int tok_line_ = 1;
};

}  // namespace

GraphicalModel parse_uai(std::istream& in) {
  Tokenizer tok(in);
  const std::string preamble = tok.next();
  if (preamble != "MARKOV" && preamble != "BAYES")
    throw ParseError("unknown preamble '" + preamble + "' (expected MARKOV or BAYES)",
                     tok.line());
  const long long n = tok.integer("variable count");
  if (n < 0) throw ParseError("negative variable count", tok.line());
  std::vector<int> domains(static_cast<std::size_t>(n));
  for (auto& d : domains) {
    const long long k = tok.integer("domain size");
    if (k < 1) throw ParseError("domain size must be >= 1", tok.line());
    d = static_cast<int>(k);
  }
  const long long m = tok.integer("function count");
  if (m < 0) throw ParseError("negative function count", tok.line());
  std::vector<std::vector<int>> scopes(static_cast<std::size_t>(m));
  for (auto& scope : scopes) {
    const long long arity = tok.integer("scope size");
    if (arity < 0) throw ParseError("negative scope size", tok.line());
    for (long long i = 0; i < arity; ++i) {
      const long long v = tok.integer("scope variable");
      if (v < 0 || v >= n)
        throw ParseError("scope variable " + std::to_string(v) + " out of range", tok.line());
      if (std::find(scope.begin(), scope.end(), static_cast<int>(v)) != scope.end())
        throw ParseError("duplicate variable " + std::to_string(v) + " in scope", tok.line());
      scope.push_back(static_cast<int>(v));
    }
  }
  std::vector<TableFunction> functions;
  functions.reserve(scopes.size());
  for (auto& scope : scopes) {
    std::vector<int> dims;
    std::size_t expected = 1;
    for (int v : scope) {
      dims.push_back(domains[static_cast<std::size_t>(v)]);
      expected *= static_cast<std::size_t>(dims.back());
    }
    const long long count = tok.integer("table size");
    if (count < 0 || static_cast<std::size_t>(count) != expected)
      throw ParseError("table declares " + std::to_string(count) + " entries, scope requires " +
                           std::to_string(expected),
                       tok.line());
    std::vector<double> values(expected);
    for (auto& v : values) {
      v = tok.real("table entry");
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ParseError("table entries must be finite and non-negative", tok.line());
    }
    functions.emplace_back(std::move(scope), std::move(dims), std::move(values));
  }
  if (const std::string extra = tok.next(); !extra.empty())
    throw ParseError("trailing token '" + extra + "'", tok.line());
  return GraphicalModel(std::move(domains), std::move(functions), ModelKind::weighted);
}

GraphicalModel parse_uai(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_uai(in);
}

void write_uai(std::ostream& out, const GraphicalModel& model) {
  out << "MARKOV\n" << model.num_vars() << '\n';
  for (std::size_t v = 0; v < model.num_vars(); ++v)
    out << (v ? " " : "") << model.domain_size(static_cast<int>(v));
  out << '\n' << model.functions().size() << '\n';
  for (const auto& f : model.functions()) {
    out << f.arity();
    for (int v : f.scope()) out << ' ' << v;
    out << '\n';
  }
  for (const auto& f : model.functions()) {
    out << '\n' << f.values().size() << '\n';
    for (std::size_t i = 0; i < f.values().size(); ++i)
      out << (i ? " " : "") << format_shortest(f.values()[i]);
    out << '\n';
  }
}

GraphicalModel parse_dimacs_cnf(std::istream& in) {
  Tokenizer tok(in);
  std::string t = tok.next();
  while (t == "c" || (!t.empty() && t[0] == 'c')) {
    tok.skip_line();
    t = tok.next();
  }
  if (t != "p") throw ParseError("expected DIMACS header 'p cnf V C'", tok.line());
  if (tok.next() != "cnf") throw ParseError("expected 'cnf' in header", tok.line());
  const long long nv = tok.integer("variable count");
  const long long nc = tok.integer("clause count");
  if (nv < 0 || nc < 0) throw ParseError("negative count in header", tok.line());
  const std::size_t n = static_cast<std::size_t>(nv);
  std::vector<int> domains(n, 2);
  std::vector<TableFunction> functions;

  std::vector<long long> clause;
  bool open = false;
  for (t = tok.next(); !t.empty(); t = tok.next()) {
    if (t[0] == 'c' || t[0] == '%') {
      tok.skip_line();
      continue;
    }
    long long lit = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), lit);
    if (ec != std::errc() || p != t.data() + t.size())
      throw ParseError("expected literal, got '" + t + "'", tok.line());
    if (lit == 0) {
      // Literal (v, negated) is false at v = negated ? 1 : 0; the clause
      // forbids the tuple where every literal is false.
      std::vector<int> scope;
      std::vector<int> falsifying;
      bool tautology = false;
      for (long long l : clause) {
        const int v = static_cast<int>(std::llabs(l) - 1);
        const int fval = l < 0 ? 1 : 0;
        auto it = std::find(scope.begin(), scope.end(), v);
        if (it == scope.end()) {
          scope.push_back(v);
          falsifying.push_back(fval);
        } else if (falsifying[static_cast<std::size_t>(it - scope.begin())] != fval) {
          tautology = true;
        }
      }
      std::vector<int> dims(scope.size(), 2);
      std::vector<double> values(std::size_t{1} << scope.size(), 1.0);
      if (!tautology) {
        std::size_t idx = 0;
        for (int fv : falsifying) idx = idx * 2 + static_cast<std::size_t>(fv);
        values[idx] = 0.0;
      }
      functions.emplace_back(std::move(scope), std::move(dims), std::move(values));
      clause.clear();
      open = false;
      continue;
    }
    if (std::llabs(lit) > nv)
      throw ParseError("literal " + t + " exceeds variable count " + std::to_string(nv),
                       tok.line());
    clause.push_back(lit);
    open = true;
  }
  if (open) throw ParseError("clause missing terminating 0", tok.line());
  return GraphicalModel(std::move(domains), std::move(functions), ModelKind::constraint);
}

GraphicalModel parse_dimacs_cnf(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dimacs_cnf(in);
}

Assignment parse_evidence(std::istream& in, const std::vector<int>& domain_sizes) {
  std::vector<long long> nums;
  Tokenizer tok(in);
  std::vector<int> lines;
  for (std::string t = tok.next(); !t.empty(); t = tok.next()) {
    long long v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size())
      throw ParseError("expected integer, got '" + t + "'", tok.line());
    nums.push_back(v);
    lines.push_back(tok.line());
  }
  Assignment e(domain_sizes.size());
  if (nums.empty()) return e;
  std::size_t start = 1;
  long long count = nums[0];
  // Multi-sample files prefix the record with a sample count of 1.
  if (static_cast<long long>(nums.size()) != 1 + 2 * count && nums[0] == 1 && nums.size() >= 2 &&
      static_cast<long long>(nums.size()) == 2 + 2 * nums[1]) {
    count = nums[1];
    start = 2;
  }
  if (count < 0 || static_cast<long long>(nums.size()) != static_cast<long long>(start) + 2 * count)
    throw ParseError("evidence count does not match the number of pairs", lines.back());
  for (std::size_t i = start; i < nums.size(); i += 2) {
    const long long var = nums[i];
    const long long val = nums[i + 1];
    if (var < 0 || var >= static_cast<long long>(domain_sizes.size()))
      throw ParseError("unknown evidence variable " + std::to_string(var), lines[i]);
    if (val < 0 || val >= domain_sizes[static_cast<std::size_t>(var)])
      throw ParseError("value " + std::to_string(val) + " out of range for variable " +
                           std::to_string(var),
                       lines[i + 1]);
    e[static_cast<std::size_t>(var)] = static_cast<int>(val);
  }
  return e;
}

Assignment parse_evidence(std::string_view text, const std::vector<int>& domain_sizes) {
  std::istringstream in{std::string(text)};
  return parse_evidence(in, domain_sizes);
}

}  // namespace aomdd
