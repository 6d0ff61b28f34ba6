#include "aomdd/be_compiler.hpp"

#include <algorithm>
#include <ostream>
#include <unordered_set>

#include "aomdd/errors.hpp"

namespace aomdd {

Aomdd function_to_chain_aomdd(const TableFunction& f, const Ordering& d,
                              std::shared_ptr<UniqueTable> table) {
  const std::size_t arity = f.arity();
  // perm[i]: position in f's scope of the i-th variable along d.
  std::vector<std::size_t> perm(arity);
  for (std::size_t i = 0; i < arity; ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return d.position(f.scope()[a]) < d.position(f.scope()[b]);
  });
  std::vector<int> tuple(arity, 0);

  // Decision-tree unfolding, reduced bottom-up through make_node.
  auto build = [&](auto& self, std::size_t level) -> Factor {
    if (level == arity) {
      const double v = f.at_tuple(tuple);
      return v == 0.0 ? Factor::zero() : Factor{v, {kOne}};
    }
    const std::size_t slot = perm[level];
    const int var = f.scope()[slot];
    std::vector<Arc> arcs;
    arcs.reserve(static_cast<std::size_t>(f.dims()[slot]));
    for (int x = 0; x < f.dims()[slot]; ++x) {
      tuple[slot] = x;
      Factor child = self(self, level + 1);
      arcs.push_back(Arc{child.constant, std::move(child.nodes)});
    }
    tuple[slot] = 0;
    return table->make_node(var, std::move(arcs));
  };
  Factor root = build(build, 0);
  auto chain = std::make_shared<const PseudoTree>(
      chain_pseudo_tree(f.scope(), d, table->num_vars()));
  return Aomdd{std::move(chain), std::move(table), std::move(root)};
}

std::vector<ApplyGroup> group_descendants(const ChildList& list_f, const ChildList& list_g,
                                          const PseudoTree& t, const UniqueTable& table) {
  struct Entry {
    NodeRef ref;
    int pre;
    bool from_f;
  };
  std::vector<Entry> entries;
  for (NodeRef r : list_f)
    if (!is_terminal(r)) entries.push_back({r, t.pre(table.var(r)), true});
  for (NodeRef r : list_g)
    if (!is_terminal(r)) entries.push_back({r, t.pre(table.var(r)), false});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.pre != b.pre ? a.pre < b.pre : a.from_f > b.from_f;
  });

  std::vector<ApplyGroup> groups;
  bool root_from_f = false;
  int end = -1;
  for (const Entry& e : entries) {
    if (!groups.empty() && e.pre < end) {
      if (e.from_f == root_from_f)
        throw StructuralError("apply: variables " + std::to_string(table.var(groups.back().root)) +
                              " and " + std::to_string(table.var(e.ref)) +
                              " from the same operand are in ancestor relation");
      groups.back().members.push_back(e.ref);
      continue;
    }
    groups.push_back({e.ref, {}});
    root_from_f = e.from_f;
    end = t.subtree_end(table.var(e.ref));
  }
  return groups;
}

std::size_t Apply::KeyHash::operator()(const std::vector<NodeRef>& key) const {
  std::size_t seed = key.size();
  for (NodeRef r : key) seed ^= r + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
  return seed;
}

Apply::Apply(std::shared_ptr<const PseudoTree> t, std::shared_ptr<UniqueTable> table)
    : tree_(std::move(t)), table_(std::move(table)) {}

Factor Apply::apply(NodeRef v1, std::span<const NodeRef> zs) {
  ++stats_.calls;
  if (v1 == kZero || std::find(zs.begin(), zs.end(), kZero) != zs.end()) return Factor::zero();
  if (v1 == kOne) {
    // Product semantics: 1 * (z1 and ... and zm) keeps the z's.
    ChildList rest;
    for (NodeRef z : zs)
      if (z != kOne) rest.push_back(z);
    if (rest.empty()) return Factor::one();
    return Factor{1.0, std::move(rest)};
  }
  std::vector<NodeRef> key;
  key.reserve(zs.size() + 1);
  key.push_back(v1);
  for (NodeRef z : zs)
    if (z != kOne) key.push_back(z);
  if (key.size() == 1) return Factor::of(v1);
  if (auto it = memo_.find(key); it != memo_.end()) {
    ++stats_.memo_hits;
    return it->second;
  }

  const UniqueTable& table = *table_;
  const PseudoTree& t = *tree_;
  const int x = table.var(v1);
  const std::span<const NodeRef> rest(key.begin() + 1, key.end());
  bool same_var = false;
  for (NodeRef z : rest) {
    const int zv = table.var(z);
    if (!t.is_ancestor(x, zv))
      throw StructuralError("apply: variable " + std::to_string(x) + " is not an ancestor of " +
                            std::to_string(zv));
    same_var = same_var || zv == x;
  }
  if (same_var && rest.size() != 1)
    throw StructuralError("apply: variable " + std::to_string(x) +
                          " meets several nodes when one has the same variable");

  // Copy: make_node below may grow the arena and invalidate references.
  const MetaNode v = table.node(v1);
  const MetaNode z = same_var ? table.node(rest[0]) : MetaNode{};
  const ChildList others(rest.begin(), rest.end());
  std::vector<Arc> arcs;
  arcs.reserve(v.arcs.size());
  for (std::size_t j = 0; j < v.arcs.size(); ++j) {
    double w = v.arcs[j].weight;
    if (same_var) w *= z.arcs[j].weight;
    if (w == 0.0) {
      arcs.push_back(Arc{0.0, {kZero}});
      continue;
    }
    Factor joined = combine_lists(v.arcs[j].children, same_var ? z.arcs[j].children : others);
    arcs.push_back(Arc{w * joined.constant, std::move(joined.nodes)});
  }
  Factor result = table_->make_node(x, std::move(arcs));
  memo_.emplace(std::move(key), result);
  return result;
}

Factor Apply::combine_lists(const ChildList& f, const ChildList& g) {
  auto is_zero = [](const ChildList& l) { return l.size() == 1 && l[0] == kZero; };
  if (is_zero(f) || is_zero(g)) return Factor::zero();
  Factor out = Factor::one();
  for (const ApplyGroup& grp : group_descendants(f, g, *tree_, *table_)) {
    Factor r = apply(grp.root, grp.members);
    if (r.is_zero()) return Factor::zero();
    out.constant *= r.constant;
    append_list(out.nodes, r.nodes);
  }
  return out;
}

Factor Apply::multiply(const Factor& f, const Factor& g) {
  if (f.is_zero() || g.is_zero()) return Factor::zero();
  Factor joined = combine_lists(f.nodes, g.nodes);
  if (joined.is_zero()) return Factor::zero();
  joined.constant *= f.constant * g.constant;
  return joined;
}

std::size_t factor_size(const Factor& f, const UniqueTable& table) {
  std::unordered_set<NodeRef> seen;
  std::vector<NodeRef> stack;
  for (NodeRef r : f.nodes)
    if (!is_terminal(r)) stack.push_back(r);
  while (!stack.empty()) {
    const NodeRef r = stack.back();
    stack.pop_back();
    if (!seen.insert(r).second) continue;
    for (const Arc& arc : table.node(r).arcs)
      for (NodeRef c : arc.children)
        if (!is_terminal(c) && !seen.count(c)) stack.push_back(c);
  }
  return seen.size();
}

void BeResult::write_report(std::ostream& out) const {
  out << "bucket inputs output apply_calls memo_hits\n";
  for (const auto& b : buckets) {
    out << b.var << ' ';
    for (std::size_t i = 0; i < b.input_sizes.size(); ++i) out << (i ? "," : "") << b.input_sizes[i];
    if (b.input_sizes.empty()) out << '-';
    out << ' ' << b.output_size << ' ' << b.apply_calls << ' ' << b.memo_hits << '\n';
  }
}

BeResult compile_be(const GraphicalModel& model, const Ordering& d,
                    std::shared_ptr<UniqueTable> table) {
  auto tree = std::make_shared<const PseudoTree>(generate_pseudo_tree(build_primal_graph(model), d));
  return compile_be(model, d, std::move(tree), std::move(table));
}

BeResult compile_be(const GraphicalModel& model, const Ordering& d,
                    std::shared_ptr<const PseudoTree> tree, std::shared_ptr<UniqueTable> table) {
  const std::size_t n = model.num_vars();
  if (d.size() != n || tree->size() != n)
    throw StructuralError("ordering and pseudo tree must cover every variable");
  for (std::size_t v = 0; v < n; ++v) {
    const int p = tree->parent(static_cast<int>(v));
    if (p >= 0 && d.position(p) > d.position(static_cast<int>(v)))
      throw StructuralError("pseudo tree parent " + std::to_string(p) + " follows child " +
                            std::to_string(v) + " in the ordering");
  }
  const auto buckets = compute_buckets(*tree, model);

  BeResult result{Aomdd{tree, table, Factor::one()}, {}};
  if (n == 0) {
    double c = 1.0;
    for (const auto& f : model.functions()) c *= f.values().front();
    result.diagram.root = table->canonical_root(Factor{c, {kOne}});
    return result;
  }

  Apply apply(tree, table);
  std::vector<std::vector<Factor>> incoming(n);
  for (std::size_t i = n; i-- > 0;) {
    const int x = d[i];
    BucketReport report;
    report.var = x;
    const ApplyStats before = apply.stats();
    Factor message = Factor::one();
    for (int fi : buckets[static_cast<std::size_t>(x)]) {
      Aomdd chain = function_to_chain_aomdd(model.functions()[static_cast<std::size_t>(fi)], d, table);
      report.input_sizes.push_back(factor_size(chain.root, *table));
      message = apply.multiply(message, chain.root);
    }
    for (const Factor& m : incoming[static_cast<std::size_t>(x)]) {
      report.input_sizes.push_back(factor_size(m, *table));
      message = apply.multiply(message, m);
    }
    incoming[static_cast<std::size_t>(x)].clear();
    report.output_size = factor_size(message, *table);
    report.apply_calls = apply.stats().calls - before.calls;
    report.memo_hits = apply.stats().memo_hits - before.memo_hits;
    result.buckets.push_back(std::move(report));

    const int p = tree->parent(x);
    if (p >= 0)
      incoming[static_cast<std::size_t>(p)].push_back(std::move(message));
    else
      result.diagram.root = std::move(message);
  }
  result.diagram.root = table->canonical_root(std::move(result.diagram.root));
  return result;
}

}  // namespace aomdd
