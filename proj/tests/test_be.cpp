#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "aomdd/errors.hpp"
#include "support.hpp"

using namespace aomdd;

namespace {

enum { A, B, C, D, E, F, G, H };

std::shared_ptr<const PseudoTree> sample_tree() {
  return std::make_shared<const PseudoTree>(
      generate_pseudo_tree(build_primal_graph(testing::sample_model()), Ordering::identity(8)));
}

NodeRef leaf(UniqueTable& table, int var, double w) {
  return table.make_node(var, {{w, {kOne}}, {1.0 - w, {kOne}}}).nodes[0];
}

}  // namespace

TEST_CASE("chain diagrams of single tables") {
  const auto m = testing::sample_model();
  auto table = make_table(m);
  const Aomdd c8 = function_to_chain_aomdd(m.functions()[7], Ordering::identity(8), table);
  const auto s = count_stats(c8);
  CHECK(s.total_nodes == 3);
  REQUIRE(c8.root.nodes.size() == 1);
  const MetaNode& root = table->node(c8.root.nodes[0]);
  CHECK(root.var == C);
  CHECK(root.arcs[0].children != root.arcs[1].children);
  CHECK(table->var(root.arcs[0].children[0]) == D);

  GraphicalModel shell({2}, {}, ModelKind::weighted);
  auto wt = std::make_shared<UniqueTable>(std::vector<int>{2}, DiagramConfig{});
  const Aomdd constant = function_to_chain_aomdd(TableFunction({}, {}, {2.5}), Ordering::identity(1), wt);
  CHECK(constant.root.nodes == ChildList{kOne});
  CHECK(constant.root.constant == 2.5);

  const Aomdd unary = function_to_chain_aomdd(shell.make_function({0}, {0.4, 0.6}), Ordering::identity(1), wt);
  REQUIRE(unary.root.nodes.size() == 1);
  CHECK(unary.root.constant == doctest::Approx(1.0));
  CHECK(wt->node(unary.root.nodes[0]).arcs[0].weight == doctest::Approx(0.4));
  CHECK(wt->node(unary.root.nodes[0]).arcs[1].weight == doctest::Approx(0.6));
}

TEST_CASE("group_descendants") {
  const auto tree = sample_tree();
  UniqueTable table(std::vector<int>(8, 2), DiagramConfig{});
  const NodeRef c = leaf(table, C, 0.1), g = leaf(table, G, 0.2), h = leaf(table, H, 0.3);
  const NodeRef e = leaf(table, E, 0.4), f = leaf(table, F, 0.6), d = leaf(table, D, 0.7);

  const auto groups = group_descendants({c, g, h}, {e, f}, *tree, table);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].root == c);
  CHECK(groups[0].members == std::vector<NodeRef>{e});
  CHECK(groups[1].root == f);
  CHECK(groups[1].members == std::vector<NodeRef>{g, h});

  const auto single = group_descendants({d}, {}, *tree, table);
  REQUIRE(single.size() == 1);
  CHECK(single[0].members.empty());

  const auto two = group_descendants({d}, {g}, *tree, table);
  CHECK(two.size() == 2);
}

TEST_CASE("apply short cuts and products") {
  auto tree = std::make_shared<const PseudoTree>(PseudoTree::from_parents({PseudoTree::kNoParent, 0, 0}));
  auto table = std::make_shared<UniqueTable>(std::vector<int>{2, 2, 2}, DiagramConfig{});
  Apply apply(tree, table);
  const NodeRef x = leaf(*table, 0, 0.2);
  const std::vector<NodeRef> none;
  CHECK(apply.apply(kZero, std::vector<NodeRef>{x}).is_zero());
  CHECK(apply.apply(x, std::vector<NodeRef>{kZero}).is_zero());
  CHECK(apply.apply(x, none).nodes == ChildList{x});

  // (0.5, 0.5) would dissolve in make_node, so store it raw.
  const NodeRef half = table->insert_raw(0, {{0.5, {kOne}}, {0.5, {kOne}}});
  const Factor prod = apply.apply(x, std::vector<NodeRef>{half});
  REQUIRE(prod.nodes.size() == 1);
  CHECK(prod.constant == doctest::Approx(0.5));
  CHECK(table->node(prod.nodes[0]).arcs[0].weight == doctest::Approx(0.2));
  CHECK(table->node(prod.nodes[0]).arcs[1].weight == doctest::Approx(0.8));

  const NodeRef p = leaf(*table, 1, 0.3), q = leaf(*table, 2, 0.6);
  CHECK_THROWS_AS(apply.apply(p, std::vector<NodeRef>{q}), StructuralError);
  CHECK_THROWS_AS(apply.apply(x, std::vector<NodeRef>{half, p}), StructuralError);
}

TEST_CASE("C1 times C2 on the chain A, F, H") {
  const auto m = testing::sample_model();
  auto table = make_table(m);
  const Ordering d = Ordering::identity(8);
  auto chain = std::make_shared<const PseudoTree>(chain_pseudo_tree({A, F, H}, d, 8));
  Apply apply(chain, table);
  const Aomdd c1 = function_to_chain_aomdd(m.functions()[0], d, table);
  const Aomdd c2 = function_to_chain_aomdd(m.functions()[1], d, table);
  const Aomdd m1{chain, table, apply.multiply(c1.root, c2.root)};
  std::vector<std::vector<int>> tuples;
  for (const auto& [x, v] : enumerate_solutions(m1, 100)) {
    CHECK(v == 1.0);
    tuples.push_back({x[A], x[F], x[H]});
  }
  CHECK(tuples == std::vector<std::vector<int>>{{0, 1, 0}, {1, 0, 1}, {1, 1, 0}, {1, 1, 1}});
}

TEST_CASE("the message of F's bucket follows the pseudo tree") {
  const auto m = testing::sample_model();
  auto table = make_table(m);
  const Ordering d = Ordering::identity(8);
  const auto tree = sample_tree();
  Apply apply(tree, table);
  auto chain = [&](int i) { return function_to_chain_aomdd(m.functions()[static_cast<std::size_t>(i)], d, table).root; };
  const Factor m1 = apply.multiply(chain(0), chain(1));
  const Factor m2 = apply.multiply(chain(2), chain(3));
  const Factor m3 = apply.multiply(apply.multiply(chain(4), m1), m2);
  const Aomdd msg{tree, table, m3};
  bool forks = false;
  for (NodeRef r : reachable_postorder(msg)) {
    const MetaNode& n = table->node(r);
    if (n.var != F) continue;
    for (const Arc& arc : n.arcs)
      if (arc.children.size() == 2 && table->var(arc.children[0]) == G && table->var(arc.children[1]) == H)
        forks = true;
  }
  CHECK(forks);
}

TEST_CASE("compile_be examples") {
  const auto m = testing::sample_model();
  const auto r = compile_be(m, Ordering::identity(8), make_table(m));
  CHECK(count_stats(r.diagram).total_nodes == 18);
  CHECK(r.buckets.size() == 8);
  std::ostringstream report;
  r.write_report(report);
  CHECK(report.str().rfind("bucket", 0) == 0);

  // One function over every variable: the bucket tree is the chain.
  std::mt19937_64 rng(2);
  GraphicalModel shell({2, 3, 2}, {}, ModelKind::weighted);
  std::vector<double> values(12);
  for (double& v : values) v = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
  const GraphicalModel single({2, 3, 2}, {shell.make_function({0, 1, 2}, values)}, ModelKind::weighted);
  auto table = make_table(single);
  const Aomdd be = compile_be(single, Ordering::identity(3), table).diagram;
  const Aomdd direct = function_to_chain_aomdd(single.functions()[0], Ordering::identity(3), table);
  CHECK(structural_equal(be, direct));
}

TEST_CASE("compile_be rejects trees that the ordering cannot schedule") {
  const auto m = testing::sample_model();
  const auto tree = sample_tree();
  CHECK_THROWS_AS(compile_be(m, Ordering({B, A, C, D, E, F, G, H}), tree, make_table(m)), StructuralError);
  CHECK_THROWS_AS(compile_be(m, Ordering::identity(8), tree, make_table(m, 12, 3)), ResourceError);
}

TEST_CASE("apply folding order does not matter") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 30; ++i) {
    const auto m = testing::random_model(rng, i % 2 ? ModelKind::weighted : ModelKind::constraint);
    const PrimalGraph g = build_primal_graph(m);
    const Ordering d = min_fill_ordering(g, i);
    auto tree = std::make_shared<const PseudoTree>(generate_pseudo_tree(g, d));
    auto table = make_table(m);
    Apply apply(tree, table);
    std::vector<Factor> parts;
    for (const auto& f : m.functions()) parts.push_back(function_to_chain_aomdd(f, d, table).root);
    // Every chain embeds in the generated tree, so all can be multiplied.
    Factor forward = Factor::one(), backward = Factor::one();
    for (const auto& p : parts) forward = apply.multiply(forward, p);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) backward = apply.multiply(backward, *it);
    CHECK(forward.nodes == backward.nodes);
    CHECK(table->weights_equal(forward.constant, backward.constant));
  }
}

TEST_CASE("apply output size against the product bound") {
  std::mt19937_64 rng(17);
  int over = 0, total = 0;
  for (int i = 0; i < 40; ++i) {
    const auto m = testing::random_model(rng, ModelKind::weighted);
    if (m.functions().size() < 2) continue;
    const PrimalGraph g = build_primal_graph(m);
    const Ordering d = min_fill_ordering(g, i);
    auto tree = std::make_shared<const PseudoTree>(generate_pseudo_tree(g, d));
    auto table = make_table(m);
    Apply apply(tree, table);
    const Factor f = function_to_chain_aomdd(m.functions()[0], d, table).root;
    const Factor h = function_to_chain_aomdd(m.functions()[1], d, table).root;
    const std::size_t sf = factor_size(f, *table), sh = factor_size(h, *table);
    const std::size_t out = factor_size(apply.multiply(f, h), *table);
    ++total;
    if (out > sf * sh + sf + sh) ++over;
  }
  MESSAGE("apply outputs over |f||g|+|f|+|g|: " << over << " of " << total);
  WARN(over == 0);
}
