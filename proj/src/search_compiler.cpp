#include "aomdd/search_compiler.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "aomdd/errors.hpp"

namespace aomdd {

// ---------------------------------------------------------------------------
// Pruning hooks

namespace {

class NullHook final : public PruningHook {
 public:
  void prepare(const GraphicalModel&, const PseudoTree&, const std::vector<std::vector<int>>&) override {}
  bool consistent(int, int, const Assignment&) override { return true; }
};

class BcpHook final : public PruningHook {
 public:
  explicit BcpHook(const GraphicalModel& model)
      : propagator_(model.domain_sizes(), zero_tuples_as_nogoods(model)) {}

  void prepare(const GraphicalModel& model, const PseudoTree& tree,
               const std::vector<std::vector<int>>& contexts) override {
    const std::size_t n = model.num_vars();
    contexts_ = contexts;
    relevant_.assign(n, {});
    const auto& nogoods = propagator_.nogoods();
    for (std::size_t g = 0; g < nogoods.size(); ++g) {
      // A nogood touches the subtree of X iff its deepest variable lies in
      // that subtree, i.e. X is an ancestor-or-self of the deepest variable.
      int deepest = -1;
      for (auto [v, val] : nogoods[g].literals)
        if (deepest < 0 || tree.depth(v) > tree.depth(deepest)) deepest = v;
      if (deepest < 0) {
        relevant_[static_cast<std::size_t>(tree.root())].push_back(static_cast<int>(g));
        continue;
      }
      for (int x = deepest; x >= 0; x = tree.parent(x)) relevant_[static_cast<std::size_t>(x)].push_back(static_cast<int>(g));
    }
    scratch_ = Assignment(n);
  }

  bool consistent(int var, int value, const Assignment& partial) override {
    Assignment& local = scratch_;
    std::fill_n(&local[0], local.size(), kUnassigned);
    for (int c : contexts_[static_cast<std::size_t>(var)]) local[static_cast<std::size_t>(c)] = partial[static_cast<std::size_t>(c)];
    local[static_cast<std::size_t>(var)] = value;
    return propagator_.propagate(local, relevant_[static_cast<std::size_t>(var)]);
  }

 private:
  UnitPropagator propagator_;
  std::vector<std::vector<int>> contexts_;
  std::vector<std::vector<int>> relevant_;
  Assignment scratch_;
};

}  // namespace

std::unique_ptr<PruningHook> null_hook() { return std::make_unique<NullHook>(); }

std::unique_ptr<PruningHook> bcp_hook(const GraphicalModel& model) {
  return std::make_unique<BcpHook>(model);
}

UnitPropagator::UnitPropagator(std::vector<int> domain_sizes, std::vector<Nogood> nogoods)
    : domains_(std::move(domain_sizes)), nogoods_(std::move(nogoods)) {}

bool UnitPropagator::propagate(Assignment& x) const {
  std::vector<int> all(nogoods_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return propagate(x, all);
}

bool UnitPropagator::propagate(Assignment& x, std::span<const int> subset) const {
  // removed[v][a] marks values pruned from v's domain during this call.
  std::unordered_map<int, std::vector<char>> removed;
  auto is_removed = [&](int v, int a) {
    auto it = removed.find(v);
    return it != removed.end() && it->second[static_cast<std::size_t>(a)];
  };
  enum class Lit { holds, fails, open };
  auto status = [&](int v, int a) {
    const int cur = x[static_cast<std::size_t>(v)];
    if (cur != kUnassigned) return cur == a ? Lit::holds : Lit::fails;
    return is_removed(v, a) ? Lit::fails : Lit::open;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (int g : subset) {
      const auto& lits = nogoods_[static_cast<std::size_t>(g)].literals;
      int open = -1;
      std::size_t open_count = 0;
      bool satisfied = false;
      for (std::size_t i = 0; i < lits.size() && !satisfied; ++i) {
        switch (status(lits[i].first, lits[i].second)) {
          case Lit::fails: satisfied = true; break;
          case Lit::open: ++open_count; open = static_cast<int>(i); break;
          case Lit::holds: break;
        }
      }
      if (satisfied || open_count > 1) continue;
      if (open_count == 0) return false;
      const auto [v, a] = lits[static_cast<std::size_t>(open)];
      auto& dom = removed[v];
      if (dom.empty()) dom.assign(static_cast<std::size_t>(domains_[static_cast<std::size_t>(v)]), 0);
      dom[static_cast<std::size_t>(a)] = 1;
      int remaining = 0;
      int last = -1;
      for (std::size_t b = 0; b < dom.size(); ++b)
        if (!dom[b]) {
          ++remaining;
          last = static_cast<int>(b);
        }
      if (remaining == 0) return false;
      if (remaining == 1) x[static_cast<std::size_t>(v)] = last;
      changed = true;
    }
  }
  return true;
}

std::vector<Nogood> zero_tuples_as_nogoods(const GraphicalModel& model) {
  std::vector<Nogood> out;
  for (const auto& f : model.functions()) {
    std::vector<int> tuple(f.arity(), 0);
    for (std::size_t idx = 0; idx < f.values().size(); ++idx) {
      if (f.values()[idx] == 0.0) {
        Nogood g;
        for (std::size_t i = 0; i < f.arity(); ++i) g.literals.emplace_back(f.scope()[i], tuple[i]);
        out.push_back(std::move(g));
      }
      for (std::size_t i = f.arity(); i-- > 0;) {
        if (++tuple[i] < f.dims()[i]) break;
        tuple[i] = 0;
      }
    }
  }
  return out;
}

double arc_weight(const GraphicalModel& model, std::span<const int> bucket, int var, int value,
                  Assignment& partial) {
  partial[static_cast<std::size_t>(var)] = value;
  double w = 1.0;
  for (int fi : bucket) {
    const TableFunction& f = model.functions()[static_cast<std::size_t>(fi)];
    for (int v : f.scope())
      if (!partial.assigned(static_cast<std::size_t>(v)))
        throw StructuralError("bucket function " + std::to_string(fi) + " of variable " +
                              std::to_string(var) + " has unassigned variable " + std::to_string(v));
    w *= f.at(partial);
    if (w == 0.0) break;
  }
  return w;
}

void SearchCounters::write(std::ostream& out) const {
  out << "var or_expansions and_expansions cache_hits pruned\n";
  for (std::size_t v = 0; v < or_expansions.size(); ++v)
    out << v << ' ' << or_expansions[v] << ' ' << and_expansions[v] << ' ' << cache_hits[v] << ' '
        << pruned[v] << '\n';
}

// ---------------------------------------------------------------------------
// Search engine

namespace {

/// Depth-first AND/OR search over the pseudo tree with context caching and
/// an explicit stack. `Policy` decides what a solved OR node turns into.
template <typename Policy>
class SearchEngine {
 public:
  using Result = typename Policy::Result;
  using ArcAcc = typename Policy::ArcAcc;

  SearchEngine(const GraphicalModel& model, const PseudoTree& tree, const SearchOptions& options,
               Policy& policy)
      : model_(model), tree_(tree), options_(options), policy_(policy) {
    const std::size_t n = model.num_vars();
    if (tree.size() != n) throw StructuralError("pseudo tree does not cover every variable");
    const PrimalGraph g = build_primal_graph(model);
    contexts_ = compute_contexts(tree, g);
    buckets_ = compute_buckets(tree, model);
    radix_.resize(n);
    caches_.resize(n);
    for (std::size_t x = 0; x < n; ++x) {
      const auto& ctx = contexts_[x];
      std::vector<std::uint64_t> mult(ctx.size());
      std::uint64_t span = 1;
      for (std::size_t i = ctx.size(); i-- > 0;) {
        mult[i] = span;
        const auto k = static_cast<std::uint64_t>(model.domain_size(ctx[i]));
        if (span > std::numeric_limits<std::uint64_t>::max() / k)
          throw ResourceError("context of variable " + std::to_string(x) + " is too large to index");
        span *= k;
      }
      radix_[x] = std::move(mult);
      // Arc weights must be determined by the context, or caching is unsound.
      for (int fi : buckets_[x])
        for (int v : model.functions()[static_cast<std::size_t>(fi)].scope())
          if (v != static_cast<int>(x) && std::find(ctx.begin(), ctx.end(), v) == ctx.end())
            throw StructuralError("bucket function " + std::to_string(fi) + " of variable " +
                                  std::to_string(x) + " reaches outside its context");
    }
    counters_.or_expansions.assign(n, 0);
    counters_.and_expansions.assign(n, 0);
    counters_.cache_hits.assign(n, 0);
    counters_.pruned.assign(n, 0);
    if (options.hook) options.hook->prepare(model, tree, contexts_);
  }

  Result run() {
    if (tree_.empty()) return policy_.empty_model(constant_functions());
    partial_ = Assignment(model_.num_vars());
    open(tree_.root(), 0);
    Result final_result{};
    while (!frames_.empty()) {
      const std::size_t top = frames_.size() - 1;
      if (!frames_[top].arc_open) {
        if (start_next_value(top)) continue;
        Result r = finish(top);
        if (top == 0) {
          final_result = std::move(r);
          frames_.pop_back();
        } else {
          frames_.pop_back();
          deliver(frames_.size() - 1, r);
        }
        continue;
      }
      Frame& f = frames_[top];
      const auto& kids = tree_.children(f.var);
      if (f.child == kids.size()) {
        close_arc(top);
        continue;
      }
      const int y = kids[f.child];
      const std::uint64_t key = context_key(y);
      auto& cache = caches_[static_cast<std::size_t>(y)];
      if (auto it = cache.find(key); it != cache.end()) {
        ++counters_.cache_hits[static_cast<std::size_t>(y)];
        const Result cached = it->second;
        deliver(top, cached);
      } else {
        open(y, key);
      }
    }
    return final_result;
  }

  SearchCounters& counters() { return counters_; }
  const std::vector<std::vector<int>>& contexts() const { return contexts_; }

 private:
  struct Frame {
    int var = -1;
    int value = -1;
    std::size_t child = 0;
    std::uint64_t key = 0;
    bool arc_open = false;
    ArcAcc arc{};
    std::vector<ArcAcc> arcs;
  };

  double constant_functions() const {
    double c = 1.0;
    for (const auto& f : model_.functions()) c *= f.values().front();
    return c;
  }

  std::uint64_t context_key(int x) const {
    std::uint64_t key = 0;
    const auto& ctx = contexts_[static_cast<std::size_t>(x)];
    const auto& mult = radix_[static_cast<std::size_t>(x)];
    for (std::size_t i = 0; i < ctx.size(); ++i)
      key += static_cast<std::uint64_t>(partial_[static_cast<std::size_t>(ctx[i])]) * mult[i];
    return key;
  }

  void open(int var, std::uint64_t key) {
    ++counters_.or_expansions[static_cast<std::size_t>(var)];
    Frame f;
    f.var = var;
    f.key = key;
    f.arcs.reserve(static_cast<std::size_t>(model_.domain_size(var)));
    frames_.push_back(std::move(f));
  }

  /// Moves the frame to its next value and opens that arc unless it is
  /// dead on arrival. Returns false when every value is done.
  bool start_next_value(std::size_t idx) {
    Frame& f = frames_[idx];
    const int k = model_.domain_size(f.var);
    if (++f.value >= k) return false;
    const double w = arc_weight(model_, buckets_[static_cast<std::size_t>(f.var)], f.var, f.value, partial_);
    if (w == 0.0) {
      f.arcs.push_back(policy_.dead_arc());
      return true;
    }
    if (options_.hook && !options_.hook->consistent(f.var, f.value, partial_)) {
      ++counters_.pruned[static_cast<std::size_t>(f.var)];
      f.arcs.push_back(policy_.dead_arc());
      return true;
    }
    ++counters_.and_expansions[static_cast<std::size_t>(f.var)];
    f.arc = policy_.begin_arc(w);
    f.arc_open = true;
    f.child = 0;
    return true;
  }

  void close_arc(std::size_t idx) {
    Frame& f = frames_[idx];
    f.arcs.push_back(std::move(f.arc));
    f.arc_open = false;
  }

  void deliver(std::size_t idx, const Result& r) {
    Frame& f = frames_[idx];
    if (!policy_.add_child(f.arc, r)) {
      // Line 38 of the search: a dead child kills the remaining siblings.
      f.arc = policy_.dead_arc();
      close_arc(idx);
      return;
    }
    if (++f.child == tree_.children(f.var).size()) close_arc(idx);
  }

  Result finish(std::size_t idx) {
    Frame& f = frames_[idx];
    partial_[static_cast<std::size_t>(f.var)] = kUnassigned;
    Result r = policy_.finish(f.var, f.arcs);
    auto& cache = caches_[static_cast<std::size_t>(f.var)];
    cache.emplace(f.key, r);
    ++cached_;
    if (options_.cache_cap != 0 && cached_ > options_.cache_cap) {
      std::size_t expanded = 0;
      for (auto c : counters_.or_expansions) expanded += c;
      throw ResourceError("search cache cap of " + std::to_string(options_.cache_cap) +
                          " exceeded after " + std::to_string(expanded) + " OR expansions");
    }
    return r;
  }

  const GraphicalModel& model_;
  const PseudoTree& tree_;
  const SearchOptions& options_;
  Policy& policy_;
  std::vector<std::vector<int>> contexts_;
  std::vector<std::vector<int>> buckets_;
  std::vector<std::vector<std::uint64_t>> radix_;
  std::vector<std::unordered_map<std::uint64_t, Result>> caches_;
  std::vector<Frame> frames_;
  Assignment partial_;
  SearchCounters counters_;
  std::size_t cached_ = 0;
};

/// Reduces while backtracking: every solved OR node goes through make_node.
struct InlinePolicy {
  using Result = Factor;
  using ArcAcc = Arc;

  UniqueTable& table;

  Result empty_model(double c) const { return c == 0.0 ? Factor::zero() : Factor{c, {kOne}}; }
  ArcAcc dead_arc() const { return Arc{0.0, {kZero}}; }
  ArcAcc begin_arc(double w) const { return Arc{w, {kOne}}; }
  bool add_child(ArcAcc& arc, const Result& r) const {
    if (r.is_zero()) return false;
    arc.weight *= r.constant;
    append_list(arc.children, r.nodes);
    return true;
  }
  Result finish(int var, std::vector<ArcAcc>& arcs) { return table.make_node(var, std::move(arcs)); }
};

/// Records the unreduced context-minimal graph.
struct RecordPolicy {
  using Result = int;
  struct ArcAcc {
    double weight = 0.0;
    std::vector<int> children;
  };

  ContextMinimalGraph& graph;
  std::size_t cap;

  Result empty_model(double c) const { return c == 0.0 ? ContextMinimalGraph::kDead : ContextMinimalGraph::kLeaf; }
  ArcAcc dead_arc() const { return {0.0, {ContextMinimalGraph::kDead}}; }
  ArcAcc begin_arc(double w) const { return {w, {}}; }
  bool add_child(ArcAcc& arc, Result r) const {
    if (r == ContextMinimalGraph::kDead) return false;
    arc.children.push_back(r);
    return true;
  }
  Result finish(int var, std::vector<ArcAcc>& arcs) {
    const bool dead = std::all_of(arcs.begin(), arcs.end(), [](const ArcAcc& a) { return a.weight == 0.0; });
    if (dead) return ContextMinimalGraph::kDead;
    ContextMinimalGraph::Node node;
    node.var = var;
    for (auto& a : arcs) {
      node.weights.push_back(a.weight);
      node.children.push_back(std::move(a.children));
    }
    graph.nodes.push_back(std::move(node));
    if (cap != 0 && graph.nodes.size() > cap)
      throw ResourceError("context-minimal graph exceeds " + std::to_string(cap) + " nodes");
    return static_cast<int>(graph.nodes.size() - 1);
  }
};

}  // namespace

ContextMinimalResult build_context_minimal_graph(const GraphicalModel& model, const PseudoTree& tree,
                                                 const SearchOptions& options) {
  ContextMinimalResult out;
  RecordPolicy policy{out.graph, options.cache_cap};
  SearchEngine<RecordPolicy> engine(model, tree, options, policy);
  out.graph.root = engine.run();
  out.counters = std::move(engine.counters());
  return out;
}

double ContextMinimalGraph::evaluate(const Assignment& x) const {
  if (root == kDead) return 0.0;
  if (root == kLeaf) return 1.0;
  // Children are always created before their parents.
  std::vector<double> value(nodes.size(), 0.0);
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    const Node& n = nodes[id];
    const auto v = static_cast<std::size_t>(x[static_cast<std::size_t>(n.var)]);
    double w = n.weights[v];
    for (int c : n.children[v]) w *= c == kDead ? 0.0 : value[static_cast<std::size_t>(c)];
    value[id] = w;
  }
  return value[static_cast<std::size_t>(root)];
}

std::vector<Factor> reduce_level(int var, std::vector<Candidate> candidates, UniqueTable& table) {
  std::vector<Factor> out;
  out.reserve(candidates.size());
  for (auto& c : candidates) out.push_back(table.make_node(var, std::move(c)));
  return out;
}

Aomdd bottom_up_reduction(const ContextMinimalGraph& graph, std::shared_ptr<const PseudoTree> tree,
                          std::shared_ptr<UniqueTable> table) {
  Aomdd out{tree, table, Factor::one()};
  if (graph.root == ContextMinimalGraph::kDead) {
    out.root = Factor::zero();
    return out;
  }
  if (graph.root == ContextMinimalGraph::kLeaf) return out;

  std::vector<std::vector<int>> by_var(table->num_vars());
  for (std::size_t id = 0; id < graph.nodes.size(); ++id)
    by_var[static_cast<std::size_t>(graph.nodes[id].var)].push_back(static_cast<int>(id));

  std::vector<Factor> reduced(graph.nodes.size());
  const auto& order = tree->dfs_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int var = *it;
    const auto& ids = by_var[static_cast<std::size_t>(var)];
    std::vector<Candidate> candidates;
    candidates.reserve(ids.size());
    for (int id : ids) {
      const auto& n = graph.nodes[static_cast<std::size_t>(id)];
      Candidate arcs;
      for (std::size_t v = 0; v < n.weights.size(); ++v) {
        Arc arc{n.weights[v], {kOne}};
        for (int c : n.children[v]) {
          if (c == ContextMinimalGraph::kDead) {
            arc = Arc{0.0, {kZero}};
            break;
          }
          const Factor& f = reduced[static_cast<std::size_t>(c)];
          arc.weight *= f.constant;
          append_list(arc.children, f.nodes);
        }
        arcs.push_back(std::move(arc));
      }
      candidates.push_back(std::move(arcs));
    }
    auto level = reduce_level(var, std::move(candidates), *table);
    for (std::size_t i = 0; i < ids.size(); ++i) reduced[static_cast<std::size_t>(ids[i])] = std::move(level[i]);
  }
  out.root = reduced[static_cast<std::size_t>(graph.root)];
  if (out.root.is_zero()) out.root = Factor::zero();
  return out;
}

SearchResult compile_search(const GraphicalModel& model, std::shared_ptr<const PseudoTree> tree,
                            std::shared_ptr<UniqueTable> table, const SearchOptions& options) {
  if (options.reduction == Reduction::deferred) {
    auto cm = build_context_minimal_graph(model, *tree, options);
    Aomdd a = bottom_up_reduction(cm.graph, tree, table);
    a.root = table->canonical_root(std::move(a.root));
    return {std::move(a), std::move(cm.counters)};
  }
  InlinePolicy policy{*table};
  SearchEngine<InlinePolicy> engine(model, *tree, options, policy);
  Factor root = engine.run();
  root = table->canonical_root(std::move(root));
  return {Aomdd{std::move(tree), std::move(table), std::move(root)}, std::move(engine.counters())};
}

}  // namespace aomdd
