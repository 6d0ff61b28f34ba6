#include "aomdd/diagram.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>

#include "aomdd/errors.hpp"

namespace aomdd {

namespace {

inline void hash_mix(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

void canonicalize_arc(Arc& arc) {
  if (arc.children.empty()) arc.children = {kOne};
  const bool dead = arc.weight == 0.0 ||
                    std::find(arc.children.begin(), arc.children.end(), kZero) != arc.children.end();
  if (dead) {
    arc.weight = 0.0;
    arc.children = {kZero};
  }
}

}  // namespace

double normalize_arcs(std::vector<Arc>& arcs) {
  double sum = 0.0;
  for (auto& arc : arcs) {
    canonicalize_arc(arc);
    sum += arc.weight;
  }
  if (sum == 0.0) return 0.0;
  for (auto& arc : arcs) arc.weight /= sum;
  return sum;
}

void append_list(ChildList& into, const ChildList& list) {
  if (into.size() == 1 && into[0] == kZero) return;
  if (list.size() == 1 && list[0] == kZero) {
    into = {kZero};
    return;
  }
  if (into.size() == 1 && into[0] == kOne) into.clear();
  for (NodeRef r : list)
    if (r != kOne) into.push_back(r);
  if (into.empty()) into = {kOne};
}

ChildList merge_lists(const ChildList& a, const ChildList& b, const PseudoTree& t,
                      const UniqueTable& table) {
  auto is_zero = [](const ChildList& l) { return l.size() == 1 && l[0] == kZero; };
  if (is_zero(a) || is_zero(b)) return {kZero};
  ChildList out;
  out.reserve(a.size() + b.size());
  for (NodeRef r : a)
    if (r != kOne) out.push_back(r);
  for (NodeRef r : b)
    if (r != kOne) out.push_back(r);
  if (out.empty()) return {kOne};
  std::sort(out.begin(), out.end(),
            [&](NodeRef x, NodeRef y) { return t.pre(table.var(x)) < t.pre(table.var(y)); });
  return out;
}

// ---------------------------------------------------------------------------

std::size_t UniqueTable::NodeHash::operator()(NodeRef r) const {
  const MetaNode& n = table->nodes_[r];
  std::size_t seed = std::hash<int>{}(n.var);
  for (const Arc& arc : n.arcs) {
    hash_mix(seed, std::hash<std::uint64_t>{}(std::bit_cast<std::uint64_t>(arc.weight)));
    hash_mix(seed, arc.children.size());
    for (NodeRef c : arc.children) hash_mix(seed, c);
  }
  return seed;
}

bool UniqueTable::NodeEq::operator()(NodeRef a, NodeRef b) const {
  const MetaNode& x = table->nodes_[a];
  const MetaNode& y = table->nodes_[b];
  return x.var == y.var && x.arcs == y.arcs;
}

UniqueTable::UniqueTable(std::vector<int> domain_sizes, DiagramConfig config)
    : domains_(std::move(domain_sizes)), config_(config), registry_(config.epsilon_digits) {
  nodes_.resize(2);  // terminals
  levels_.reserve(domains_.size());
  for (std::size_t v = 0; v < domains_.size(); ++v)
    levels_.emplace_back(16, NodeHash{this}, NodeEq{this});
}

void UniqueTable::check_arity(int var, const std::vector<Arc>& arcs) const {
  if (var < 0 || static_cast<std::size_t>(var) >= domains_.size())
    throw StructuralError("meta-node for unknown variable " + std::to_string(var));
  if (arcs.size() != static_cast<std::size_t>(domains_[static_cast<std::size_t>(var)]))
    throw StructuralError("meta-node for variable " + std::to_string(var) + " has " +
                          std::to_string(arcs.size()) + " arcs, domain size is " +
                          std::to_string(domains_[static_cast<std::size_t>(var)]));
}

NodeRef UniqueTable::intern(int var, std::vector<Arc> arcs) {
  const auto ref = static_cast<NodeRef>(nodes_.size());
  nodes_.push_back(MetaNode{var, std::move(arcs)});
  Level& level = levels_[static_cast<std::size_t>(var)];
  if (auto it = level.find(ref); it != level.end()) {
    nodes_.pop_back();
    ++isomorphic_hits_;
    return *it;
  }
  if (config_.node_cap != 0 && size() > config_.node_cap) {
    nodes_.pop_back();
    throw ResourceError("meta-node cap of " + std::to_string(config_.node_cap) + " exceeded");
  }
  level.insert(ref);
  return ref;
}

Factor UniqueTable::make_node(int var, std::vector<Arc> arcs) {
  check_arity(var, arcs);
  double constant = 1.0;
  if (config_.mode == WeightMode::weighted) {
    constant = normalize_arcs(arcs);
    if (constant == 0.0) return Factor::zero();
    for (Arc& arc : arcs) arc.weight = registry_.snap(arc.weight);
  } else {
    bool any = false;
    for (Arc& arc : arcs) {
      canonicalize_arc(arc);
      any = any || arc.weight != 0.0;
    }
    if (!any) return Factor::zero();
  }

  const bool redundant = std::all_of(arcs.begin() + 1, arcs.end(),
                                     [&](const Arc& arc) { return arc == arcs.front(); });
  if (redundant) {
    ++redundant_hits_;
    return Factor{constant * arcs.front().weight, std::move(arcs.front().children)};
  }
  return Factor{constant, {intern(var, std::move(arcs))}};
}

NodeRef UniqueTable::insert_raw(int var, std::vector<Arc> arcs) {
  check_arity(var, arcs);
  for (Arc& arc : arcs) {
    canonicalize_arc(arc);
    if (config_.mode == WeightMode::weighted) arc.weight = registry_.snap(arc.weight);
  }
  return intern(var, std::move(arcs));
}

Factor UniqueTable::canonical_root(Factor f) {
  if (f.is_zero()) return Factor::zero();
  if (config_.mode == WeightMode::weighted) f.constant = registry_.snap(f.constant);
  return f;
}

std::shared_ptr<UniqueTable> make_table(const GraphicalModel& model, int epsilon_digits,
                                        std::size_t node_cap) {
  DiagramConfig config;
  config.mode = model.kind() == ModelKind::constraint ? WeightMode::constraint : WeightMode::weighted;
  config.epsilon_digits = epsilon_digits;
  config.node_cap = node_cap;
  return std::make_shared<UniqueTable>(model.domain_sizes(), config);
}

// ---------------------------------------------------------------------------

std::vector<NodeRef> reachable_postorder(const Aomdd& a) {
  const UniqueTable& table = *a.table;
  std::vector<NodeRef> out;
  std::unordered_map<NodeRef, char> seen;
  struct Frame {
    NodeRef ref;
    std::size_t arc = 0;
    std::size_t child = 0;
  };
  std::vector<Frame> stack;
  auto visit = [&](NodeRef r) {
    if (is_terminal(r) || seen.count(r)) return;
    seen[r] = 1;
    stack.push_back({r});
  };
  for (auto it = a.root.nodes.begin(); it != a.root.nodes.end(); ++it) {
    visit(*it);
    while (!stack.empty()) {
      Frame& f = stack.back();
      const MetaNode& n = table.node(f.ref);
      if (f.arc == n.arcs.size()) {
        out.push_back(f.ref);
        stack.pop_back();
        continue;
      }
      const ChildList& kids = n.arcs[f.arc].children;
      if (f.child == kids.size()) {
        ++f.arc;
        f.child = 0;
        continue;
      }
      const NodeRef c = kids[f.child++];
      visit(c);
    }
  }
  return out;
}

DiagramStats count_stats(const Aomdd& a) {
  DiagramStats s;
  s.nodes_per_var.assign(a.table->num_vars(), 0);
  for (NodeRef r : reachable_postorder(a)) {
    const MetaNode& n = a.table->node(r);
    ++s.nodes_per_var[static_cast<std::size_t>(n.var)];
    ++s.total_nodes;
    for (const Arc& arc : n.arcs) s.total_edges += arc.children.size();
  }
  return s;
}

namespace {

class IsoChecker {
 public:
  IsoChecker(const UniqueTable& a, const UniqueTable& b) : a_(a), b_(b) {}

  bool nodes(NodeRef x, NodeRef y) {
    if (is_terminal(x) || is_terminal(y)) return x == y;
    const auto key = (static_cast<std::uint64_t>(x) << 32) | y;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const MetaNode& nx = a_.node(x);
    const MetaNode& ny = b_.node(y);
    bool eq = nx.var == ny.var && nx.arcs.size() == ny.arcs.size();
    for (std::size_t i = 0; eq && i < nx.arcs.size(); ++i)
      eq = a_.weights_equal(nx.arcs[i].weight, ny.arcs[i].weight) &&
           lists(nx.arcs[i].children, ny.arcs[i].children);
    memo_[key] = eq;
    return eq;
  }

  bool lists(const ChildList& x, const ChildList& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!nodes(x[i], y[i])) return false;
    return true;
  }

 private:
  const UniqueTable& a_;
  const UniqueTable& b_;
  std::unordered_map<std::uint64_t, bool> memo_;
};

}  // namespace

bool structural_equal(const Aomdd& a, const Aomdd& b) {
  if (a.tree != b.tree && !(*a.tree == *b.tree))
    throw StructuralError("diagrams are based on different pseudo trees");
  if (!a.table->weights_equal(a.root.constant, b.root.constant)) return false;
  if (a.table == b.table) return a.root.nodes == b.root.nodes;
  return IsoChecker(*a.table, *b.table).lists(a.root.nodes, b.root.nodes);
}

std::string check_reduced(const Aomdd& a, double sum_tol) {
  const UniqueTable& table = *a.table;
  std::map<int, std::vector<NodeRef>> by_var;
  for (NodeRef r : reachable_postorder(a)) by_var[table.var(r)].push_back(r);
  auto arcs_equal = [&](const Arc& x, const Arc& y) {
    return x.children == y.children && table.weights_equal(x.weight, y.weight);
  };
  for (const auto& [var, refs] : by_var) {
    for (NodeRef r : refs) {
      const auto& arcs = table.node(r).arcs;
      if (std::all_of(arcs.begin(), arcs.end(), [&](const Arc& x) { return arcs_equal(x, arcs[0]); }))
        return "redundant node " + std::to_string(r) + " of variable " + std::to_string(var);
      if (table.mode() == WeightMode::weighted) {
        double sum = 0.0;
        for (const Arc& arc : arcs) sum += arc.weight;
        if (std::abs(sum - 1.0) > sum_tol)
          return "weights of node " + std::to_string(r) + " sum to " + std::to_string(sum);
      }
    }
    for (std::size_t i = 0; i < refs.size(); ++i)
      for (std::size_t j = i + 1; j < refs.size(); ++j) {
        const auto& x = table.node(refs[i]).arcs;
        const auto& y = table.node(refs[j]).arcs;
        if (std::equal(x.begin(), x.end(), y.begin(), y.end(), arcs_equal))
          return "isomorphic nodes " + std::to_string(refs[i]) + " and " + std::to_string(refs[j]);
      }
  }
  return {};
}

}  // namespace aomdd
