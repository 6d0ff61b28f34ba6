#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

#include "aomdd/be_compiler.hpp"
#include "aomdd/diagram.hpp"
#include "aomdd/model.hpp"
#include "aomdd/query.hpp"
#include "aomdd/search_compiler.hpp"
#include "aomdd/structure.hpp"

namespace aomdd::testing {

inline std::string sample_cnf() {
  return "p cnf 8 13\n"
         "6 8 0\n1 -8 0\n"
         "1 2 7 0\n1 -2 -7 0\n-1 2 -7 0\n-1 -2 7 0\n"
         "6 7 0\n2 6 0\n1 5 0\n3 5 0\n3 4 0\n-3 -4 0\n2 3 0\n";
}

/// The nine constraints over A..H (= 0..7) as 0/1 tables.
inline GraphicalModel sample_model(bool drop_last = false) {
  std::vector<int> dom(8, 2);
  GraphicalModel shell(dom, {}, ModelKind::constraint);
  auto table = [&](std::vector<int> scope, auto pred) {
    std::vector<double> values;
    Assignment x(std::vector<int>(scope.size(), 0));
    std::vector<int> dims(scope.size(), 2);
    do {
      values.push_back(pred(x.values()) ? 1.0 : 0.0);
    } while (next_assignment(x, dims));
    return shell.make_function(std::move(scope), std::move(values));
  };
  enum { A, B, C, D, E, F, G, H };
  std::vector<TableFunction> fs{
      table({F, H}, [](const auto& t) { return t[0] || t[1]; }),
      table({A, H}, [](const auto& t) { return t[0] || !t[1]; }),
      table({A, B, G}, [](const auto& t) { return (t[0] ^ t[1] ^ t[2]) == 1; }),
      table({F, G}, [](const auto& t) { return t[0] || t[1]; }),
      table({B, F}, [](const auto& t) { return t[0] || t[1]; }),
      table({A, E}, [](const auto& t) { return t[0] || t[1]; }),
      table({C, E}, [](const auto& t) { return t[0] || t[1]; }),
      table({C, D}, [](const auto& t) { return (t[0] ^ t[1]) == 1; }),
      table({B, C}, [](const auto& t) { return t[0] || t[1]; }),
  };
  if (drop_last) fs.pop_back();
  return GraphicalModel(dom, std::move(fs), ModelKind::constraint);
}

inline GraphicalModel queens4_model() {
  std::vector<int> dom(4, 4);
  GraphicalModel shell(dom, {}, ModelKind::constraint);
  std::vector<TableFunction> fs;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      std::vector<double> values;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) values.push_back(a == b || std::abs(a - b) == j - i ? 0.0 : 1.0);
      fs.push_back(shell.make_function({i, j}, values));
    }
  return GraphicalModel(dom, std::move(fs), ModelKind::constraint);
}

/// X_i == X_j for every pair.
inline GraphicalModel all_equal_model(int n, int k) {
  std::vector<int> dom(static_cast<std::size_t>(n), k);
  GraphicalModel shell(dom, {}, ModelKind::constraint);
  std::vector<TableFunction> fs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      std::vector<double> values;
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) values.push_back(a == b ? 1.0 : 0.0);
      fs.push_back(shell.make_function({i, j}, values));
    }
  return GraphicalModel(dom, std::move(fs), ModelKind::constraint);
}

struct RandomModelSpec {
  int max_vars = 12;
  int max_domain = 3;
  int max_functions = 15;
  int max_arity = 3;
  double zero_prob = 0.3;
};

inline GraphicalModel random_model(std::mt19937_64& rng, ModelKind kind, const RandomModelSpec& spec = {}) {
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = uniform(1, spec.max_vars);
  std::vector<int> dom(static_cast<std::size_t>(n));
  for (int& k : dom) k = uniform(2, spec.max_domain);
  GraphicalModel shell(dom, {}, kind);
  const int m = uniform(1, spec.max_functions);
  std::vector<int> vars(static_cast<std::size_t>(n));
  std::iota(vars.begin(), vars.end(), 0);
  std::vector<TableFunction> fs;
  for (int i = 0; i < m; ++i) {
    std::shuffle(vars.begin(), vars.end(), rng);
    const int arity = uniform(1, std::min(n, spec.max_arity));
    std::vector<int> scope(vars.begin(), vars.begin() + arity);
    std::size_t size = 1;
    for (int v : scope) size *= static_cast<std::size_t>(dom[static_cast<std::size_t>(v)]);
    std::vector<double> values(size);
    for (double& x : values) {
      if (unit(rng) < spec.zero_prob)
        x = 0.0;
      else
        x = kind == ModelKind::constraint ? 1.0 : 0.05 + unit(rng);
    }
    fs.push_back(shell.make_function(std::move(scope), std::move(values)));
  }
  return GraphicalModel(dom, std::move(fs), kind);
}

/// Random k-CNF over n variables as 0/1 tables (one per clause).
inline GraphicalModel random_cnf(std::mt19937_64& rng, int n, int clauses, int width) {
  std::vector<int> dom(static_cast<std::size_t>(n), 2);
  GraphicalModel shell(dom, {}, ModelKind::constraint);
  std::vector<int> vars(static_cast<std::size_t>(n));
  std::iota(vars.begin(), vars.end(), 0);
  std::vector<TableFunction> fs;
  for (int c = 0; c < clauses; ++c) {
    std::shuffle(vars.begin(), vars.end(), rng);
    std::vector<int> scope(vars.begin(), vars.begin() + std::min(width, n));
    std::vector<int> sign(scope.size());
    for (int& s : sign) s = static_cast<int>(rng() & 1);
    std::vector<double> values(std::size_t{1} << scope.size(), 1.0);
    std::size_t idx = 0;
    for (int s : sign) idx = idx * 2 + static_cast<std::size_t>(s ? 0 : 1);
    values[idx] = 0.0;
    fs.push_back(shell.make_function(std::move(scope), std::move(values)));
  }
  return GraphicalModel(dom, std::move(fs), ModelKind::constraint);
}

struct Compiled {
  std::shared_ptr<const PseudoTree> tree;
  Ordering order;
  Aomdd search;
  Aomdd be;
  SearchCounters counters;
};

/// Compiles with both compilers over the same tree; each gets its own
/// table unless `shared` is given.
inline Compiled compile_both(const GraphicalModel& model, std::uint64_t seed,
                             std::shared_ptr<UniqueTable> shared = nullptr) {
  Compiled c;
  const PrimalGraph g = build_primal_graph(model);
  c.order = min_fill_ordering(g, seed);
  c.tree = std::make_shared<const PseudoTree>(generate_pseudo_tree(g, c.order));
  auto t1 = shared ? shared : make_table(model);
  auto t2 = shared ? shared : make_table(model);
  auto s = compile_search(model, c.tree, t1);
  c.search = s.diagram;
  c.counters = s.counters;
  c.be = compile_be(model, c.order, c.tree, t2).diagram;
  return c;
}

struct BruteSummary {
  double total = 0.0;
  double max = 0.0;
  BigCount count = 0;
};

inline BruteSummary brute_summary(const TableFunction& table) {
  BruteSummary s;
  for (double v : table.values()) {
    s.total += v;
    s.max = std::max(s.max, v);
    if (v != 0.0) ++s.count;
  }
  return s;
}

inline bool close_rel(double a, double b, double tol) {
  if (a == b) return true;
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace aomdd::testing
