#include "aomdd/query.hpp"

#include <algorithm>
#include <unordered_map>

#include "aomdd/errors.hpp"

namespace aomdd {

namespace {

/// Walks the preorder range [begin, end) skipping the subtrees rooted at the
/// variables of `kids` (sorted by preorder).
template <typename Fn>
void for_each_uncovered(const Aomdd& a, int begin, int end, const ChildList& kids, Fn&& fn) {
  const PseudoTree& t = *a.tree;
  const auto& order = t.dfs_order();
  std::size_t k = 0;
  for (int p = begin; p < end;) {
    while (k < kids.size() && is_terminal(kids[k])) ++k;
    if (k < kids.size() && t.pre(a.table->var(kids[k])) == p) {
      p = t.subtree_end(a.table->var(kids[k]));
      ++k;
      continue;
    }
    fn(order[static_cast<std::size_t>(p)]);
    ++p;
  }
}

bool observed(const Evidence& e, int v) {
  return !e.values().empty() && e[static_cast<std::size_t>(v)] != kUnassigned;
}

void check_evidence(const Aomdd& a, const Evidence& e) {
  if (e.size() != 0 && e.size() != a.table->num_vars())
    throw PreconditionError("evidence has " + std::to_string(e.size()) + " entries, diagram has " +
                            std::to_string(a.table->num_vars()) + " variables");
  for (std::size_t v = 0; v < e.size(); ++v)
    if (e[v] != kUnassigned && (e[v] < 0 || e[v] >= a.table->domain_sizes()[v]))
      throw PreconditionError("evidence value out of range for variable " + std::to_string(v));
}

/// Shared memoized bottom-up traversal for sum and count.
template <typename Value, typename ArcTerm, typename DomainFactor>
class Summer {
 public:
  Summer(const Aomdd& a, const Evidence& e, ArcTerm arc_term, DomainFactor dom)
      : a_(a), e_(e), arc_term_(arc_term), dom_(dom) {}

  Value list(const ChildList& kids) {
    Value v = Value(1);
    for (NodeRef c : kids) {
      if (c == kZero) return Value(0);
      if (c == kOne) continue;
      v *= node(c);
    }
    return v;
  }

  Value node(NodeRef r) {
    if (auto it = memo_.find(r); it != memo_.end()) return it->second;
    const MetaNode& n = a_.table->node(r);
    const PseudoTree& t = *a_.tree;
    Value total = Value(0);
    for (std::size_t i = 0; i < n.arcs.size(); ++i) {
      if (observed(e_, n.var) && e_[static_cast<std::size_t>(n.var)] != static_cast<int>(i)) continue;
      const Arc& arc = n.arcs[i];
      if (arc.weight == 0.0) continue;
      Value term = arc_term_(arc.weight) * list(arc.children);
      for_each_uncovered(a_, t.pre(n.var) + 1, t.subtree_end(n.var), arc.children,
                         [&](int v) { term *= dom_(v); });
      total += term;
    }
    memo_.emplace(r, total);
    return total;
  }

  Value root() {
    const PseudoTree& t = *a_.tree;
    Value v = list(a_.root.nodes);
    if (v == Value(0) || t.empty()) return v;
    for_each_uncovered(a_, 0, static_cast<int>(t.size()), a_.root.nodes,
                       [&](int u) { v *= dom_(u); });
    return v;
  }

 private:
  const Aomdd& a_;
  const Evidence& e_;
  ArcTerm arc_term_;
  DomainFactor dom_;
  std::unordered_map<NodeRef, Value> memo_;
};

}  // namespace

std::vector<int> uncovered_variables(const Aomdd& a, NodeRef u, std::size_t arc) {
  std::vector<int> out;
  const MetaNode& n = a.table->node(u);
  for_each_uncovered(a, a.tree->pre(n.var) + 1, a.tree->subtree_end(n.var), n.arcs.at(arc).children,
                     [&](int v) { out.push_back(v); });
  return out;
}

std::vector<int> uncovered_root_variables(const Aomdd& a) {
  std::vector<int> out;
  for_each_uncovered(a, 0, static_cast<int>(a.tree->size()), a.root.nodes,
                     [&](int v) { out.push_back(v); });
  return out;
}

namespace {

double eval_node(const UniqueTable& table, NodeRef r, const Assignment& x) {
  if (r == kZero) return 0.0;
  if (r == kOne) return 1.0;
  const MetaNode& n = table.node(r);
  const Arc& arc = n.arcs[static_cast<std::size_t>(x[static_cast<std::size_t>(n.var)])];
  double v = arc.weight;
  for (NodeRef c : arc.children) v *= eval_node(table, c, x);
  return v;
}

}  // namespace

double evaluate(const Aomdd& a, const Assignment& x) {
  if (x.size() != a.table->num_vars())
    throw PreconditionError("assignment size differs from the diagram's variable count");
  for (int v : a.tree->dfs_order())
    if (x[static_cast<std::size_t>(v)] < 0 || x[static_cast<std::size_t>(v)] >= a.table->domain_sizes()[static_cast<std::size_t>(v)])
      throw PreconditionError("evaluate needs a full assignment (variable " + std::to_string(v) + ")");
  double v = a.root.constant;
  for (NodeRef c : a.root.nodes) v *= eval_node(*a.table, c, x);
  return v;
}

double sum_over(const Aomdd& a, const Evidence& e) {
  check_evidence(a, e);
  const auto& dom = a.table->domain_sizes();
  Summer<double, double (*)(double), std::function<double(int)>> s(
      a, e, [](double w) { return w; },
      [&](int v) { return observed(e, v) ? 1.0 : static_cast<double>(dom[static_cast<std::size_t>(v)]); });
  return a.root.constant * s.root();
}

BigCount count_solutions(const Aomdd& a, const Evidence& e) {
  check_evidence(a, e);
  if (a.root.constant == 0.0) return 0;
  const auto& dom = a.table->domain_sizes();
  Summer<BigCount, BigCount (*)(double), std::function<BigCount(int)>> s(
      a, e, [](double w) { return BigCount(w > 0.0 ? 1 : 0); },
      [&](int v) { return BigCount(observed(e, v) ? 1 : dom[static_cast<std::size_t>(v)]); });
  return s.root();
}

double normalized_mass(const Aomdd& a) {
  const Evidence none;
  Summer<double, double (*)(double), double (*)(int)> s(
      a, none, [](double w) { return w; }, [](int) { return 1.0; });
  return s.list(a.root.nodes);
}

MpeResult mpe(const Aomdd& a, const Evidence& e) {
  check_evidence(a, e);
  const UniqueTable& table = *a.table;
  struct Best {
    double value;
    std::size_t arc;
  };
  std::unordered_map<NodeRef, Best> memo;

  std::function<double(NodeRef)> node = [&](NodeRef r) -> double {
    if (r == kZero) return 0.0;
    if (r == kOne) return 1.0;
    if (auto it = memo.find(r); it != memo.end()) return it->second.value;
    const MetaNode& n = table.node(r);
    Best best{0.0, 0};
    bool found = false;
    for (std::size_t i = 0; i < n.arcs.size(); ++i) {
      if (observed(e, n.var) && e[static_cast<std::size_t>(n.var)] != static_cast<int>(i)) continue;
      const Arc& arc = n.arcs[i];
      double v = arc.weight;
      for (NodeRef c : arc.children) v *= node(c);
      if (!found || v > best.value) {
        best = {v, i};
        found = true;
      }
    }
    memo.emplace(r, best);
    return best.value;
  };

  MpeResult result;
  const std::size_t n = table.num_vars();
  result.witness = Assignment(n);
  double v = a.root.constant;
  for (NodeRef c : a.root.nodes) v *= node(c);
  result.value = v;

  std::vector<NodeRef> stack;
  for (NodeRef c : a.root.nodes)
    if (!is_terminal(c)) stack.push_back(c);
  while (!stack.empty()) {
    const NodeRef r = stack.back();
    stack.pop_back();
    const MetaNode& m = table.node(r);
    const std::size_t arc = memo.at(r).arc;
    result.witness[static_cast<std::size_t>(m.var)] = static_cast<int>(arc);
    for (NodeRef c : m.arcs[arc].children)
      if (!is_terminal(c)) stack.push_back(c);
  }
  for (std::size_t v2 = 0; v2 < n; ++v2)
    if (result.witness[v2] == kUnassigned)
      result.witness[v2] = observed(e, static_cast<int>(v2)) ? e[v2] : 0;
  return result;
}

void enumerate_solutions(const Aomdd& a, std::size_t limit,
                         const std::function<bool(const Assignment&, double)>& sink) {
  if (limit == 0 || a.root.is_zero()) return;
  const UniqueTable& table = *a.table;
  const PseudoTree& t = *a.tree;
  const auto& order = t.dfs_order();
  const std::size_t n = table.num_vars();
  // pending[v]: the node that decides v on the current branch, if any.
  std::vector<NodeRef> pending(n, kOne);
  Assignment x(n);
  for (std::size_t v = 0; v < n; ++v)
    if (!t.contains(static_cast<int>(v))) x[v] = 0;
  for (NodeRef c : a.root.nodes)
    if (!is_terminal(c)) pending[static_cast<std::size_t>(table.var(c))] = c;
  std::size_t emitted = 0;
  bool stop = false;

  std::function<void(std::size_t, double)> rec = [&](std::size_t pos, double value) {
    if (stop) return;
    if (pos == order.size()) {
      ++emitted;
      if (!sink(x, value) || emitted >= limit) stop = true;
      return;
    }
    const int v = order[pos];
    const int k = table.domain_sizes()[static_cast<std::size_t>(v)];
    const NodeRef u = pending[static_cast<std::size_t>(v)];
    if (u == kOne) {
      for (int i = 0; i < k && !stop; ++i) {
        x[static_cast<std::size_t>(v)] = i;
        rec(pos + 1, value);
      }
    } else {
      const MetaNode& m = table.node(u);
      for (int i = 0; i < k && !stop; ++i) {
        const Arc& arc = m.arcs[static_cast<std::size_t>(i)];
        if (arc.weight == 0.0) continue;
        x[static_cast<std::size_t>(v)] = i;
        for (NodeRef c : arc.children)
          if (!is_terminal(c)) pending[static_cast<std::size_t>(table.var(c))] = c;
        rec(pos + 1, value * arc.weight);
        for (NodeRef c : arc.children)
          if (!is_terminal(c)) pending[static_cast<std::size_t>(table.var(c))] = kOne;
      }
    }
    x[static_cast<std::size_t>(v)] = kUnassigned;
  };
  rec(0, a.root.constant);
}

std::vector<std::pair<Assignment, double>> enumerate_solutions(const Aomdd& a, std::size_t limit) {
  std::vector<std::pair<Assignment, double>> out;
  enumerate_solutions(a, limit, [&](const Assignment& x, double v) {
    out.emplace_back(x, v);
    return true;
  });
  return out;
}

bool equivalent(const Aomdd& a, const Aomdd& b) {
  if (a.tree != b.tree && !(*a.tree == *b.tree))
    throw StructuralError("equivalence across different pseudo trees is not supported");
  if (a.table == b.table)
    return a.root.nodes == b.root.nodes && a.table->weights_equal(a.root.constant, b.root.constant);
  return structural_equal(a, b);
}

}  // namespace aomdd
