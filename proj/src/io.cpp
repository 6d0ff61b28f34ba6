#include "aomdd/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "aomdd/errors.hpp"
#include "aomdd/numeric.hpp"

namespace aomdd {

namespace {

constexpr const char* kMagic = "aomdd-v1";

}  // namespace

void write_aomdd(std::ostream& out, const Aomdd& a) {
  const UniqueTable& table = *a.table;
  const PseudoTree& t = *a.tree;
  out << kMagic << '\n';
  out << "mode " << (table.mode() == WeightMode::constraint ? "constraint" : "weighted") << '\n';
  out << "epsilon-digits " << table.config().epsilon_digits << '\n';
  out << "domains " << table.num_vars();
  for (int k : table.domain_sizes()) out << ' ' << k;
  out << '\n';
  write_pseudo_tree(out, t);

  const auto order = reachable_postorder(a);
  std::unordered_map<NodeRef, std::size_t> id{{kZero, 0}, {kOne, 1}};
  for (NodeRef r : order) id.emplace(r, id.size());
  out << "nodes " << order.size() << '\n';
  for (NodeRef r : order) {
    const MetaNode& n = table.node(r);
    out << id.at(r) << ' ' << n.var;
    for (const Arc& arc : n.arcs) {
      out << "  " << format_shortest(arc.weight) << ' ' << arc.children.size();
      for (NodeRef c : arc.children) out << ' ' << id.at(c);
    }
    out << '\n';
  }
  out << "root " << format_shortest(a.root.constant) << ' ' << a.root.nodes.size();
  for (NodeRef c : a.root.nodes) out << ' ' << id.at(c);
  out << '\n';
}

std::string to_text(const Aomdd& a) {
  std::ostringstream out;
  write_aomdd(out, a);
  return out.str();
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::istringstream next(const std::string& keyword) {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError("unexpected end of file, expected '" + keyword + "'", line_ + 1);
    ++line_;
    std::istringstream ls(line);
    if (!keyword.empty()) {
      std::string word;
      ls >> word;
      if (word != keyword) throw ParseError("expected '" + keyword + "', got '" + word + "'", line_);
    }
    return ls;
  }

  template <typename T>
  T read(std::istringstream& ls, const char* what) {
    T v{};
    if constexpr (std::is_same_v<T, double>) {
      std::string tok;
      if (!(ls >> tok)) throw ParseError(std::string("missing ") + what, line_);
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || p != tok.data() + tok.size())
        throw ParseError(std::string("bad ") + what + " '" + tok + "'", line_);
    } else if (!(ls >> v)) {
      throw ParseError(std::string("missing ") + what, line_);
    }
    return v;
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
};

}  // namespace

Aomdd read_aomdd(std::istream& in) {
  LineReader r(in);
  {
    auto ls = r.next(kMagic);
  }
  auto mode_line = r.next("mode");
  const auto mode_name = r.read<std::string>(mode_line, "mode");
  DiagramConfig config;
  if (mode_name == "constraint")
    config.mode = WeightMode::constraint;
  else if (mode_name == "weighted")
    config.mode = WeightMode::weighted;
  else
    throw ParseError("unknown mode '" + mode_name + "'", r.line());
  auto eps_line = r.next("epsilon-digits");
  config.epsilon_digits = r.read<int>(eps_line, "epsilon digits");

  auto dom_line = r.next("domains");
  const auto n = r.read<std::size_t>(dom_line, "variable count");
  std::vector<int> domains(n);
  for (auto& k : domains) {
    k = r.read<int>(dom_line, "domain size");
    if (k < 1) throw ParseError("domain size must be >= 1", r.line());
  }

  auto tree_line = r.next("tree");
  if (r.read<std::size_t>(tree_line, "tree size") != n) throw ParseError("tree size differs from domains", r.line());
  std::vector<int> parents(n);
  for (auto& p : parents) p = r.read<int>(tree_line, "parent");
  auto order_line = r.next("order");
  const auto m = r.read<std::size_t>(order_line, "order size");
  std::vector<int> rank(n, 0);
  for (std::size_t i = 0; i < m; ++i) {
    const int v = r.read<int>(order_line, "order entry");
    if (v < 0 || static_cast<std::size_t>(v) >= n) throw ParseError("order entry out of range", r.line());
    rank[static_cast<std::size_t>(v)] = static_cast<int>(i);
  }
  std::shared_ptr<const PseudoTree> tree;
  try {
    tree = std::make_shared<const PseudoTree>(PseudoTree::from_parents(parents, rank));
  } catch (const StructuralError& e) {
    throw ParseError(e.what(), r.line());
  }

  auto table = std::make_shared<UniqueTable>(domains, config);
  auto count_line = r.next("nodes");
  const auto count = r.read<std::size_t>(count_line, "node count");
  std::vector<NodeRef> refs{kZero, kOne};
  refs.reserve(count + 2);
  auto lookup = [&](std::size_t id) {
    if (id >= refs.size()) throw ParseError("node id " + std::to_string(id) + " used before definition", r.line());
    return refs[id];
  };
  for (std::size_t i = 0; i < count; ++i) {
    auto ls = r.next("");
    if (r.read<std::size_t>(ls, "node id") != i + 2) throw ParseError("node ids must be dense and ascending", r.line());
    const int var = r.read<int>(ls, "variable");
    if (var < 0 || static_cast<std::size_t>(var) >= n) throw ParseError("variable out of range", r.line());
    std::vector<Arc> arcs(static_cast<std::size_t>(domains[static_cast<std::size_t>(var)]));
    for (Arc& arc : arcs) {
      arc.weight = r.read<double>(ls, "weight");
      const auto kids = r.read<std::size_t>(ls, "child count");
      arc.children.clear();
      for (std::size_t k = 0; k < kids; ++k) arc.children.push_back(lookup(r.read<std::size_t>(ls, "child id")));
    }
    refs.push_back(table->insert_raw(var, std::move(arcs)));
  }
  auto root_line = r.next("root");
  Factor root;
  root.constant = r.read<double>(root_line, "root constant");
  const auto kids = r.read<std::size_t>(root_line, "root list size");
  root.nodes.clear();
  for (std::size_t k = 0; k < kids; ++k) root.nodes.push_back(lookup(r.read<std::size_t>(root_line, "root id")));
  if (root.nodes.empty()) throw ParseError("empty root list", r.line());
  return Aomdd{std::move(tree), std::move(table), std::move(root)};
}

Aomdd read_aomdd_text(const std::string& text) {
  std::istringstream in(text);
  return read_aomdd(in);
}

void write_dot(std::ostream& out, const Aomdd& a) {
  const UniqueTable& table = *a.table;
  const auto order = reachable_postorder(a);
  std::unordered_map<NodeRef, std::string> name{{kZero, "t0"}, {kOne, "t1"}};
  std::vector<std::size_t> per_var(table.num_vars(), 0);
  for (NodeRef r : order) {
    const int v = table.var(r);
    name.emplace(r, "x" + std::to_string(v) + "_" + std::to_string(per_var[static_cast<std::size_t>(v)]++));
  }
  bool uses_zero = false, uses_one = false;
  auto note = [&](NodeRef c) {
    uses_zero = uses_zero || c == kZero;
    uses_one = uses_one || c == kOne;
  };
  for (NodeRef c : a.root.nodes) note(c);
  for (NodeRef r : order)
    for (const Arc& arc : table.node(r).arcs)
      for (NodeRef c : arc.children) note(c);

  out << "digraph aomdd {\n";
  out << "  label=\"root constant " << format_shortest(a.root.constant) << "\";\n";
  out << "  node [shape=record];\n";
  if (uses_zero) out << "  t0 [shape=square,label=\"0\"];\n";
  if (uses_one) out << "  t1 [shape=square,label=\"1\"];\n";
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const MetaNode& n = table.node(*it);
    out << "  " << name.at(*it) << " [label=\"{" << n.var << "|{";
    for (std::size_t i = 0; i < n.arcs.size(); ++i) out << (i ? "|" : "") << "<v" << i << "> " << i;
    out << "}}\"];\n";
  }
  if (!(a.root.nodes.size() == 1 && is_terminal(a.root.nodes[0])) || order.empty()) {
    if (!order.empty()) {
      out << "  root [shape=point];\n";
      for (NodeRef c : a.root.nodes) out << "  root -> " << name.at(c) << ";\n";
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const MetaNode& n = table.node(*it);
    for (std::size_t i = 0; i < n.arcs.size(); ++i) {
      const Arc& arc = n.arcs[i];
      for (NodeRef c : arc.children) {
        out << "  " << name.at(*it) << ":v" << i << " -> " << name.at(c) << " [label=\""
            << format_shortest(arc.weight) << "\"";
        if (arc.weight == 0.0) out << ",style=dashed";
        out << "];\n";
      }
    }
  }
  out << "}\n";
}

}  // namespace aomdd
