#include "aomdd/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <fstream>
#include <ostream>

#include "aomdd/be_compiler.hpp"
#include "aomdd/errors.hpp"
#include "aomdd/io.hpp"
#include "aomdd/numeric.hpp"
#include "aomdd/query.hpp"
#include "aomdd/search_compiler.hpp"

namespace aomdd {

namespace {

struct CompileConfig {
  std::string input;
  std::string format;
  std::string method = "search";
  std::string order = "minfill";
  std::string order_file;
  bool chain = false;
  std::string prune = "none";
  std::uint64_t seed = 0;
  int epsilon_digits = 12;
  std::size_t mem_cap = 0;
  std::string out_path;
  std::string dot_path;
  bool stats = false;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write '" + path + "'");
  return out;
}

GraphicalModel load_model(const CompileConfig& cfg) {
  std::string format = cfg.format;
  if (format.empty()) {
    const auto dot = cfg.input.rfind('.');
    format = dot != std::string::npos && cfg.input.substr(dot) == ".cnf" ? "cnf" : "uai";
  }
  auto in = open_in(cfg.input);
  return format == "cnf" ? parse_dimacs_cnf(in) : parse_uai(in);
}

Ordering load_ordering(const std::string& path, std::size_t n) {
  if (path.empty()) throw PreconditionError("--order file needs --order-file");
  auto in = open_in(path);
  std::vector<int> order;
  std::string tok;
  while (in >> tok) {
    int v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
      throw ParseError("bad ordering entry '" + tok + "'", 1);
    order.push_back(v);
  }
  if (order.size() != n)
    throw PreconditionError("ordering lists " + std::to_string(order.size()) +
                            " variables, model has " + std::to_string(n));
  return Ordering(std::move(order));
}

Aomdd load_diagram(const std::string& path) {
  auto in = open_in(path);
  return read_aomdd(in);
}

Assignment load_evidence(const std::string& path, const Aomdd& a) {
  if (path.empty()) return {};
  auto in = open_in(path);
  return parse_evidence(in, a.table->domain_sizes());
}

void write_stats(std::ostream& out, const CompileConfig& cfg, const GraphicalModel& model,
                 const PseudoTree& tree, int width, const DiagramStats& s, double seconds) {
  out << "n " << model.num_vars() << '\n';
  out << "k " << model.max_domain_size() << '\n';
  out << "w* " << width << '\n';
  out << "h " << tree.height() << '\n';
  out << "method " << cfg.method << '\n';
  out << "seed " << cfg.seed << '\n';
  out << "meta_per_var";
  for (std::size_t c : s.nodes_per_var) out << ' ' << c;
  out << '\n';
  out << "meta " << s.total_nodes << '\n';
  out << "edges " << s.total_edges << '\n';
  out << "time " << format_shortest(seconds) << '\n';
}

int cmd_compile(const CompileConfig& cfg, std::ostream& out) {
  const GraphicalModel model = load_model(cfg);
  const auto start = std::chrono::steady_clock::now();
  const PrimalGraph g = build_primal_graph(model);
  const Ordering d = cfg.order == "file" || !cfg.order_file.empty()
                         ? load_ordering(cfg.order_file, model.num_vars())
                         : min_fill_ordering(g, cfg.seed);
  auto tree = std::make_shared<const PseudoTree>(cfg.chain ? chain_pseudo_tree(d)
                                                           : generate_pseudo_tree(g, d));
  auto table = make_table(model, cfg.epsilon_digits, cfg.mem_cap);

  Aomdd diagram;
  if (cfg.method == "be") {
    diagram = compile_be(model, d, tree, table).diagram;
  } else {
    std::unique_ptr<PruningHook> hook = cfg.prune == "bcp" ? bcp_hook(model) : null_hook();
    SearchOptions options;
    options.hook = hook.get();
    options.cache_cap = cfg.mem_cap;
    diagram = compile_search(model, tree, table, options).diagram;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!cfg.out_path.empty()) {
    auto file = open_out(cfg.out_path);
    write_aomdd(file, diagram);
  } else if (!cfg.stats) {
    write_aomdd(out, diagram);
  }
  if (!cfg.dot_path.empty()) {
    auto file = open_out(cfg.dot_path);
    write_dot(file, diagram);
  }
  if (cfg.stats)
    write_stats(out, cfg, model, *tree, induced_width(g, d), count_stats(diagram), seconds);
  return kExitOk;
}

int cmd_query(const std::string& path, const std::string& what, const std::string& evidence_path,
              std::ostream& out) {
  const Aomdd a = load_diagram(path);
  const Assignment e = load_evidence(evidence_path, a);
  if (what == "count") {
    out << count_solutions(a, e) << '\n';
  } else if (what == "sum") {
    out << format_shortest(sum_over(a, e)) << '\n';
  } else if (what == "mpe") {
    const MpeResult r = mpe(a, e);
    out << format_shortest(r.value) << '\n';
    for (std::size_t v = 0; v < r.witness.size(); ++v) out << (v ? " " : "") << r.witness[v];
    out << '\n';
  } else {
    if (evidence_path.empty()) throw PreconditionError("eval needs --evidence with a full assignment");
    out << format_shortest(evaluate(a, e)) << '\n';
  }
  return kExitOk;
}

int cmd_equiv(const std::string& pa, const std::string& pb, std::ostream& out) {
  const Aomdd a = load_diagram(pa);
  const Aomdd b = load_diagram(pb);
  if (equivalent(a, b)) {
    out << "equivalent\n";
    return kExitOk;
  }
  out << "not equivalent\n";
  return kExitNegative;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compile graphical models into AND/OR multi-valued decision diagrams", "aomdd"};
  app.require_subcommand(1);

  CompileConfig cfg;
  auto* compile = app.add_subcommand("compile", "compile a UAI or DIMACS CNF model");
  compile->add_option("input", cfg.input, "model file")->required();
  compile->add_option("--format", cfg.format, "input format (default: from extension)")
      ->check(CLI::IsMember({"uai", "cnf"}));
  compile->add_option("--method", cfg.method, "compiler")->check(CLI::IsMember({"search", "be"}));
  compile->add_option("--order", cfg.order, "variable ordering")
      ->check(CLI::IsMember({"minfill", "file"}));
  compile->add_option("--order-file", cfg.order_file, "whitespace-separated variable indices");
  compile->add_flag("--chain", cfg.chain, "chain pseudo tree (MDD)");
  compile->add_option("--prune", cfg.prune, "search pruning")->check(CLI::IsMember({"none", "bcp"}));
  compile->add_option("--seed", cfg.seed, "min-fill tie-breaking seed");
  compile->add_option("--epsilon-digits", cfg.epsilon_digits, "weight equality digits")
      ->check(CLI::Range(1, 17));
  compile->add_option("--mem-cap", cfg.mem_cap, "maximum stored meta-nodes (0: none)");
  compile->add_option("--out", cfg.out_path, "diagram output file (default: stdout)");
  compile->add_option("--dot", cfg.dot_path, "also write Graphviz DOT");
  compile->add_flag("--stats", cfg.stats, "print the stats block");

  std::string query_file, query_kind, evidence_path;
  auto* query = app.add_subcommand("query", "query a compiled diagram");
  query->add_option("diagram", query_file, "diagram file")->required();
  query->add_option("kind", query_kind, "count, sum, mpe or eval")
      ->required()
      ->check(CLI::IsMember({"count", "sum", "mpe", "eval"}));
  query->add_option("--evidence", evidence_path, "evidence file (a full assignment for eval)");

  std::string equiv_a, equiv_b;
  auto* equiv = app.add_subcommand("equiv", "exit 0 when two diagrams represent the same function");
  equiv->add_option("a", equiv_a)->required();
  equiv->add_option("b", equiv_b)->required();

  std::string dot_file, dot_out;
  auto* dot = app.add_subcommand("dot", "render a diagram as Graphviz DOT");
  dot->add_option("diagram", dot_file)->required();
  dot->add_option("--out", dot_out, "output file (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (compile->parsed()) return cmd_compile(cfg, out);
    if (query->parsed()) return cmd_query(query_file, query_kind, evidence_path, out);
    if (equiv->parsed()) return cmd_equiv(equiv_a, equiv_b, out);
    const Aomdd a = load_diagram(dot_file);
    if (dot_out.empty()) {
      write_dot(out, a);
    } else {
      auto file = open_out(dot_out);
      write_dot(file, a);
    }
    return kExitOk;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << '\n';
    return kExitResource;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace aomdd
