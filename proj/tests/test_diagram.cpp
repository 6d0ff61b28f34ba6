#include <doctest.h>

#include <random>

#include "aomdd/errors.hpp"
#include "support.hpp"

using namespace aomdd;

namespace {

std::shared_ptr<UniqueTable> weighted_table(std::vector<int> domains, std::size_t cap = 0) {
  DiagramConfig config;
  config.node_cap = cap;
  return std::make_shared<UniqueTable>(std::move(domains), config);
}

}  // namespace

TEST_CASE("normalize_arcs") {
  std::vector<Arc> arcs{{2.0, {kOne}}, {2.0, {kOne}}};
  CHECK(normalize_arcs(arcs) == 4.0);
  CHECK(arcs[0].weight == 0.5);
  CHECK(arcs[1].weight == 0.5);

  std::vector<Arc> half{{0.0, {kOne}}, {3.0, {kOne}}};
  CHECK(normalize_arcs(half) == 3.0);
  CHECK(half[0].weight == 0.0);
  CHECK(half[0].children == ChildList{kZero});
  CHECK(half[1].weight == 1.0);

  std::vector<Arc> dead{{0.0, {kOne}}, {0.0, {kOne}}};
  CHECK(normalize_arcs(dead) == 0.0);
}

TEST_CASE("weights_equal and interning") {
  CHECK(weights_equal(0.25, 0.25));
  CHECK(weights_equal(0.3333333333331, 0.3333333333334, 12));
  CHECK_FALSE(weights_equal(0.5, 0.5 + 1e-6, 12));
  CHECK_FALSE(weights_equal(0.0, 1e-300));

  WeightRegistry reg(12);
  const double a = reg.snap(0.3333333333331);
  CHECK(reg.snap(0.3333333333334) == a);
  CHECK(reg.snap(0.5) != a);
  CHECK(reg.size() == 2);
}

TEST_CASE("make_node in weighted mode") {
  auto table = weighted_table({2, 2});
  const Factor ones = table->make_node(0, {{1.0, {kOne}}, {1.0, {kOne}}});
  CHECK(ones.nodes == ChildList{kOne});
  CHECK(ones.constant == 1.0);

  const Factor leaf = table->make_node(1, {{0.2, {kOne}}, {0.6, {kOne}}});
  REQUIRE(leaf.nodes.size() == 1);
  CHECK(leaf.constant == doctest::Approx(0.8));
  const Factor twos = table->make_node(0, {{2.0, leaf.nodes}, {2.0, leaf.nodes}});
  CHECK(twos.nodes == leaf.nodes);
  CHECK(twos.constant == 2.0);
  CHECK(table->redundant_hits() == 2);

  const Factor a = table->make_node(0, {{0.3, leaf.nodes}, {0.7, {kOne}}});
  const Factor b = table->make_node(0, {{0.3, leaf.nodes}, {0.7, {kOne}}});
  CHECK(a.nodes == b.nodes);
  CHECK(table->isomorphic_hits() == 1);
  CHECK(table->size() == 2);

  const Factor zero = table->make_node(0, {{0.0, {kOne}}, {0.0, leaf.nodes}});
  CHECK(zero.is_zero());
  CHECK_THROWS_AS(table->make_node(0, {{1.0, {kOne}}}), StructuralError);
}

TEST_CASE("make_node in constraint mode keeps 0/1 weights") {
  DiagramConfig config;
  config.mode = WeightMode::constraint;
  UniqueTable table({2, 2}, config);
  const Factor r = table.make_node(1, {{1.0, {kOne}}, {0.0, {kZero}}});
  REQUIRE(r.nodes.size() == 1);
  CHECK(r.constant == 1.0);
  CHECK(table.node(r.nodes[0]).arcs[0].weight == 1.0);
  CHECK(table.make_node(0, {{1.0, {kOne}}, {1.0, {kOne}}}).nodes == ChildList{kOne});
}

TEST_CASE("node cap raises a resource error") {
  auto table = weighted_table({3}, 2);
  table->make_node(0, {{0.1, {kOne}}, {0.2, {kOne}}, {0.7, {kOne}}});
  table->make_node(0, {{0.2, {kOne}}, {0.1, {kOne}}, {0.7, {kOne}}});
  CHECK_THROWS_AS(table->make_node(0, {{0.7, {kOne}}, {0.2, {kOne}}, {0.1, {kOne}}}), ResourceError);
}

TEST_CASE("count_stats") {
  const auto model = testing::sample_model();
  auto tree = std::make_shared<const PseudoTree>(
      generate_pseudo_tree(build_primal_graph(model), Ordering::identity(8)));
  Aomdd one{tree, make_table(model), Factor::one()};
  const auto s = count_stats(one);
  CHECK(s.total_nodes == 0);
  CHECK(s.total_edges == 0);

  const auto c = compile_search(model, tree, make_table(model)).diagram;
  const auto st = count_stats(c);
  CHECK(st.total_nodes == 18);
  CHECK(st.total_edges == 47);
  CHECK(st.nodes_per_var == std::vector<std::size_t>{1, 2, 4, 2, 1, 4, 2, 2});

  auto chain = std::make_shared<const PseudoTree>(chain_pseudo_tree(Ordering::identity(8)));
  const auto cs = count_stats(compile_search(model, chain, make_table(model)).diagram);
  CHECK(cs.total_nodes == 27);
  CHECK(cs.total_edges == 54);
}

TEST_CASE("structural_equal") {
  const auto model = testing::sample_model();
  const auto dropped = testing::sample_model(true);
  const Ordering d = Ordering::identity(8);
  auto tree = std::make_shared<const PseudoTree>(generate_pseudo_tree(build_primal_graph(model), d));
  const Aomdd a = compile_search(model, tree, make_table(model)).diagram;
  const Aomdd b = compile_search(model, tree, make_table(model)).diagram;
  const Aomdd c = compile_be(model, d, tree, make_table(model)).diagram;
  const Aomdd e = compile_search(dropped, tree, make_table(dropped)).diagram;
  CHECK(structural_equal(a, b));
  CHECK(structural_equal(a, c));
  CHECK_FALSE(structural_equal(a, e));

  auto other = std::make_shared<const PseudoTree>(chain_pseudo_tree(d));
  const Aomdd f = compile_search(model, other, make_table(model)).diagram;
  CHECK_THROWS_AS(structural_equal(a, f), StructuralError);
}

TEST_CASE("compiled diagrams are fully reduced") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 40; ++i) {
    const auto m = testing::random_model(rng, i % 2 ? ModelKind::weighted : ModelKind::constraint);
    const auto c = testing::compile_both(m, static_cast<std::uint64_t>(i));
    CHECK(check_reduced(c.search) == "");
    CHECK(check_reduced(c.be) == "");
    CHECK(c.search.root.constant >= 0.0);
  }
}
