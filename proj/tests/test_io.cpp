#include <doctest.h>

#include <random>
#include <sstream>

#include "aomdd/errors.hpp"
#include "aomdd/io.hpp"
#include "support.hpp"

using namespace aomdd;

namespace {

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("round trip keeps structure and stats") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 40; ++i) {
    const auto m = testing::random_model(rng, i % 2 ? ModelKind::weighted : ModelKind::constraint);
    const auto c = testing::compile_both(m, static_cast<std::uint64_t>(i));
    const std::string text = to_text(c.search);
    const Aomdd back = read_aomdd_text(text);
    CHECK(*back.tree == *c.search.tree);
    CHECK(structural_equal(back, c.search));
    const auto s1 = count_stats(back), s2 = count_stats(c.search);
    CHECK(s1.nodes_per_var == s2.nodes_per_var);
    CHECK(s1.total_edges == s2.total_edges);
    CHECK(to_text(back) == text);
    CHECK(check_reduced(back) == "");
  }
}

TEST_CASE("constraint diagrams serialize identically from both compilers") {
  const auto m = testing::sample_model();
  const auto c = testing::compile_both(m, 0);
  CHECK(to_text(c.search) == to_text(c.be));
}

TEST_CASE("malformed diagram files") {
  CHECK_THROWS_AS(read_aomdd_text(""), ParseError);
  CHECK_THROWS_AS(read_aomdd_text("something else\n"), ParseError);
  const std::string good =
      "aomdd-v1\nmode weighted\nepsilon-digits 12\ndomains 1 2\ntree 1 -1\norder 1 0\nnodes 1\n"
      "2 0  0.25 1 1  0.75 1 1\nroot 2 1 2\n";
  const Aomdd a = read_aomdd_text(good);
  CHECK(sum_over(a) == doctest::Approx(2.0));
  std::string forward = good;
  forward.replace(forward.find("root 2 1 2"), 10, "root 2 1 3");
  CHECK_THROWS_AS(read_aomdd_text(forward), ParseError);
  std::string bad_weight = good;
  bad_weight.replace(bad_weight.find("0.25"), 4, "x.25");
  try {
    read_aomdd_text(bad_weight);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 8);
  }
}

TEST_CASE("DOT output") {
  const auto m = testing::sample_model();
  auto tree = std::make_shared<const PseudoTree>(
      generate_pseudo_tree(build_primal_graph(m), Ordering::identity(8)));
  testing::Compiled c;
  c.search = compile_search(m, tree, make_table(m)).diagram;
  std::ostringstream a, b;
  write_dot(a, c.search);
  write_dot(b, c.search);
  CHECK(a.str() == b.str());
  CHECK(count_of(a.str(), "[label=\"{") == 18);
  CHECK(count_of(a.str(), "shape=square") == 2);

  const Aomdd one{tree, c.search.table, Factor::one()};
  std::ostringstream t;
  write_dot(t, one);
  CHECK(count_of(t.str(), "shape=square") == 1);
  CHECK(count_of(t.str(), "->") == 0);
}
