#include <doctest.h>

#include <random>

#include "aomdd/errors.hpp"
#include "support.hpp"

using namespace aomdd;

namespace {

enum { A, B, C, D, E, F, G, H };

/// Both variants use the pseudo tree of the full network.
Aomdd compile_sample(bool drop_c9 = false) {
  const auto m = testing::sample_model(drop_c9);
  auto tree = std::make_shared<const PseudoTree>(
      generate_pseudo_tree(build_primal_graph(testing::sample_model()), Ordering::identity(8)));
  return compile_search(m, tree, make_table(m)).diagram;
}

Aomdd terminal(double constant, NodeRef r) {
  auto tree = std::make_shared<const PseudoTree>(chain_pseudo_tree(Ordering::identity(2)));
  auto table = std::make_shared<UniqueTable>(std::vector<int>{2, 2}, DiagramConfig{});
  return Aomdd{tree, table, Factor{constant, {r}}};
}

}  // namespace

TEST_CASE("evaluate examples") {
  const Aomdd a = compile_sample();
  const auto m = testing::sample_model();
  const Assignment x(std::vector<int>{1, 1, 1, 0, 1, 1, 1, 1});
  CHECK(evaluate(a, x) == weight_of_full_assignment(m, x));

  const Assignment y(std::vector<int>{0, 1});
  CHECK(evaluate(terminal(3.5, kOne), y) == 3.5);
  CHECK(evaluate(terminal(0.0, kZero), y) == 0.0);
  CHECK_THROWS_AS(evaluate(a, Assignment(8)), PreconditionError);
}

TEST_CASE("counting and summing") {
  const Aomdd a = compile_sample();
  CHECK(count_solutions(a) == 16);
  CHECK(sum_over(a) == 16.0);

  const auto q = testing::queens4_model();
  auto tree = std::make_shared<const PseudoTree>(
      generate_pseudo_tree(build_primal_graph(q), Ordering::identity(4)));
  const Aomdd qa = compile_search(q, tree, make_table(q)).diagram;
  CHECK(count_solutions(qa) == 2);
  const auto boards = enumerate_solutions(qa, 10);
  REQUIRE(boards.size() == 2);
  CHECK(boards[0].first.values() == std::vector<int>{1, 3, 0, 2});
  CHECK(boards[1].first.values() == std::vector<int>{2, 0, 3, 1});

  CHECK(enumerate_solutions(terminal(0.0, kZero), 10).empty());
  CHECK(enumerate_solutions(terminal(1.0, kOne), 10).size() == 4);
  CHECK(enumerate_solutions(a, 5).size() == 5);
}

TEST_CASE("counts with don't-care variables use big integers") {
  // 70 unconstrained ternary variables: 3^70 solutions.
  std::vector<int> dom(70, 3);
  GraphicalModel shell(dom, {}, ModelKind::constraint);
  const GraphicalModel m(dom, {shell.make_function({0}, {1, 1, 0})}, ModelKind::constraint);
  auto tree = std::make_shared<const PseudoTree>(
      generate_pseudo_tree(build_primal_graph(m), Ordering::identity(70)));
  const Aomdd a = compile_search(m, tree, make_table(m)).diagram;
  BigCount want = 2;
  for (int i = 1; i < 70; ++i) want *= 3;
  CHECK(count_solutions(a) == want);
}

TEST_CASE("evidence") {
  const Aomdd a = compile_sample();
  const auto table = brute_force_table(testing::sample_model());
  Evidence e(8);
  e[A] = 0;
  e[D] = 1;
  BigCount want = 0;
  Assignment x(std::vector<int>(8, 0));
  std::size_t idx = 0;
  do {
    if (x[A] == 0 && x[D] == 1 && table.values()[idx] != 0.0) ++want;
    ++idx;
  } while (next_assignment(x, std::vector<int>(8, 2)));
  CHECK(count_solutions(a, e) == want);
  CHECK(sum_over(a, e) == static_cast<double>(want));

  Evidence bad(8);
  bad[0] = 5;
  CHECK_THROWS_AS(count_solutions(a, bad), PreconditionError);
  CHECK_THROWS_AS(count_solutions(a, Evidence(3)), PreconditionError);
}

TEST_CASE("mpe examples") {
  auto tree = std::make_shared<const PseudoTree>(chain_pseudo_tree(Ordering::identity(1)));
  auto table = std::make_shared<UniqueTable>(std::vector<int>{2}, DiagramConfig{});
  const Factor node = table->make_node(0, {{0.3, {kOne}}, {0.7, {kOne}}});
  const Aomdd a{tree, table, node};
  const MpeResult r = mpe(a);
  CHECK(r.value == doctest::Approx(0.7));
  CHECK(r.witness[0] == 1);

  const auto unsat = parse_dimacs_cnf("p cnf 1 2\n1 0\n-1 0\n");
  auto t1 = std::make_shared<const PseudoTree>(chain_pseudo_tree(Ordering::identity(1)));
  CHECK(mpe(compile_search(unsat, t1, make_table(unsat)).diagram).value == 0.0);
}

TEST_CASE("weighted queries against brute force") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 40; ++i) {
    const auto m = testing::random_model(rng, ModelKind::weighted);
    const auto c = testing::compile_both(m, static_cast<std::uint64_t>(i));
    const auto table = brute_force_table(m);
    const auto want = testing::brute_summary(table);
    for (const Aomdd* a : {&c.search, &c.be}) {
      CHECK(testing::close_rel(sum_over(*a), want.total, 1e-9));
      CHECK(count_solutions(*a) == want.count);
      if (want.total > 0.0) CHECK(normalized_mass(*a) == doctest::Approx(1.0).epsilon(1e-9));
      const MpeResult r = mpe(*a);
      CHECK(testing::close_rel(r.value, want.max, 1e-9));
      CHECK(evaluate(*a, r.witness) == r.value);
    }

    // Evidence on the first variable.
    Evidence e(m.num_vars());
    e[0] = 1;
    double total = 0.0, best = 0.0;
    Assignment x(std::vector<int>(m.num_vars(), 0));
    std::size_t idx = 0;
    do {
      const double v = table.values()[idx++];
      if (x[0] == 1) {
        total += v;
        best = std::max(best, v);
      }
    } while (next_assignment(x, m.domain_sizes()));
    CHECK(testing::close_rel(sum_over(c.search, e), total, 1e-9));
    const MpeResult r = mpe(c.search, e);
    CHECK(testing::close_rel(r.value, best, 1e-9));
    CHECK(r.witness[0] == 1);
  }
}

TEST_CASE("uncovered variables") {
  const Aomdd a = compile_sample();
  const UniqueTable& table = *a.table;
  std::size_t total = 0;
  for (NodeRef r : reachable_postorder(a))
    for (std::size_t i = 0; i < table.node(r).arcs.size(); ++i)
      for (int v : uncovered_variables(a, r, i)) {
        CHECK(a.tree->is_ancestor(table.var(r), v));
        ++total;
      }
  CHECK(uncovered_root_variables(a).empty());
  CHECK(total > 0);
}

TEST_CASE("equivalence") {
  const auto m = testing::sample_model();
  const Ordering d = Ordering::identity(8);
  auto tree = std::make_shared<const PseudoTree>(generate_pseudo_tree(build_primal_graph(m), d));
  auto shared = make_table(m);
  const Aomdd s = compile_search(m, tree, shared).diagram;
  const Aomdd b = compile_be(m, d, tree, shared).diagram;
  CHECK(equivalent(s, b));
  CHECK(s.root.nodes == b.root.nodes);
  CHECK_FALSE(equivalent(compile_sample(), compile_sample(true)));

  auto chain = std::make_shared<const PseudoTree>(chain_pseudo_tree(d));
  CHECK_THROWS_AS(equivalent(s, compile_search(m, chain, make_table(m)).diagram), StructuralError);

  // Scaling one function by 2 and another by 1/2 leaves the function alone.
  std::vector<TableFunction> fs;
  GraphicalModel shell({2, 2, 3}, {}, ModelKind::weighted);
  fs.push_back(shell.make_function({0, 1}, {0.1, 0.4, 0.3, 0.2}));
  fs.push_back(shell.make_function({1, 2}, {0.5, 0.25, 0.25, 0.9, 0.05, 0.05}));
  const GraphicalModel w({2, 2, 3}, fs, ModelKind::weighted);
  auto scaled = fs;
  auto scale = [](const TableFunction& f, double c) {
    auto v = f.values();
    for (double& x : v) x *= c;
    return TableFunction(f.scope(), f.dims(), v);
  };
  scaled[0] = scale(fs[0], 2.0);
  scaled[1] = scale(fs[1], 0.5);
  const GraphicalModel w2({2, 2, 3}, scaled, ModelKind::weighted);
  auto wt = std::make_shared<const PseudoTree>(generate_pseudo_tree(build_primal_graph(w), Ordering::identity(3)));
  CHECK(equivalent(compile_search(w, wt, make_table(w)).diagram, compile_search(w2, wt, make_table(w2)).diagram));
}
