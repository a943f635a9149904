// Command-line front end: compile CNF to CCDD, count models, draw uniform
// samples, run diagram queries, and cross-check results against a
// brute-force oracle.
//
// Exit codes: 0 success, 1 usage error, 2 input parse error, 3 resource
// limit, 4 internal invariant failure or verification mismatch.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ccdd/ccdd.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitResource = 3;
constexpr int kExitInvariant = 4;

struct VerifyMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class InputKind { Cnf, Ccdd };

InputKind input_kind(const std::string& path, const std::string& format_override) {
  if (format_override == "cnf") return InputKind::Cnf;
  if (format_override == "ccdd") return InputKind::Ccdd;
  if (path.ends_with(".cnf")) return InputKind::Cnf;
  if (path.ends_with(".ccdd")) return InputKind::Ccdd;
  throw CLI::ValidationError("cannot tell .cnf from .ccdd; pass --format");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ccdd::ParseError("cannot open input file: " + path);
  return in;
}

ccdd::CnfFormula load_cnf(const std::string& path) {
  std::ifstream in = open_input(path);
  return ccdd::parse_dimacs(in, &std::cerr);
}

ccdd::Diagram load_ccdd(const std::string& path) {
  std::ifstream in = open_input(path);
  return ccdd::deserialize(in);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ccdd::ParseError("cannot open output file: " + path);
  out << content;
}

std::vector<ccdd::Var> full_scope(ccdd::Var num_vars) {
  std::vector<ccdd::Var> scope(num_vars);
  for (ccdd::Var v = 1; v <= num_vars; ++v) scope[v - 1] = v;
  return scope;
}

struct CompileFlags {
  bool no_kernelize = false;
  bool pre_kernelize = false;
  std::string order = "auto";
  unsigned crossover_divisor = 0;  // 0: keep the mode default
  std::uint64_t node_budget = 0;

  ccdd::CompilerConfig to_config(bool counting) const {
    ccdd::CompilerConfig cfg = counting ? ccdd::counting_config() : ccdd::CompilerConfig{};
    cfg.kernelization_enabled = !no_kernelize;
    cfg.pre_kernelize = pre_kernelize;
    if (order == "minfill")
      cfg.order_mode = ccdd::OrderMode::Minfill;
    else if (order == "dlcp")
      cfg.order_mode = ccdd::OrderMode::Dlcp;
    if (crossover_divisor > 0) cfg.crossover_divisor = crossover_divisor;
    if (node_budget > 0) cfg.node_budget = node_budget;
    return cfg;
  }
};

void add_compile_flags(CLI::App* cmd, CompileFlags& flags) {
  cmd->add_flag("--no-kernelize", flags.no_kernelize, "disable kernelized conjunctions");
  cmd->add_flag("--pre-kernelize", flags.pre_kernelize,
                "force one kernelization pass at the root");
  cmd->add_option("--order", flags.order, "branch ordering: auto|minfill|dlcp")
      ->check(CLI::IsMember({"auto", "minfill", "dlcp"}));
  cmd->add_option("--crossover-divisor", flags.crossover_divisor,
                  "minfill width crossover divisor");
  cmd->add_option("--node-budget", flags.node_budget, "abort after this many emitted edges");
}

int cmd_compile(const std::string& input, std::string out_path, const CompileFlags& flags) {
  ccdd::CnfFormula cnf = load_cnf(input);
  auto start = std::chrono::steady_clock::now();
  ccdd::Diagram d = ccdd::compile(cnf, flags.to_config(false));
  auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  if (out_path.empty()) {
    out_path = input;
    if (auto dot = out_path.rfind('.'); dot != std::string::npos) out_path.resize(dot);
    out_path += ".ccdd";
  }
  write_file(out_path, ccdd::serialize(d));
  ccdd::DiagramStats s = ccdd::stats(d);
  std::cout << "nodes=" << s.nodes << " edges=" << s.edges << " knodes="
            << s.kernelized_node_count << " time_ms=" << elapsed.count() << "\n";
  return kExitOk;
}

int cmd_count(const std::string& input, const std::string& format, const CompileFlags& flags) {
  if (input_kind(input, format) == InputKind::Cnf) {
    ccdd::CnfFormula cnf = load_cnf(input);
    std::cout << ccdd::materialize(ccdd::exact_mc(cnf, flags.to_config(true))) << "\n";
  } else {
    ccdd::Diagram d = load_ccdd(input);
    ccdd::CountAnnotation ann = ccdd::ct(d);
    std::cout << ccdd::materialize(ann.at(d.root())) << "\n";
  }
  return kExitOk;
}

int cmd_sample(const std::string& input, const std::string& format, std::uint64_t n,
               std::uint64_t seed, const std::string& out_path, const CompileFlags& flags) {
  ccdd::Diagram d = input_kind(input, format) == InputKind::Cnf
                        ? ccdd::compile(load_cnf(input), flags.to_config(false))
                        : load_ccdd(input);
  ccdd::CountAnnotation ann = ccdd::ct(d);
  std::string out;
  if (ann.at(d.root()).is_zero()) {
    std::cerr << "input is unsatisfiable; no samples\n";
  } else {
    ccdd::SamplerState st(d, ann, full_scope(d.num_vars()), seed);
    for (std::uint64_t i = 0; i < n; ++i)
      out += ccdd::format_sample(st.sample(), st.scope());
  }
  if (out_path.empty())
    std::cout << out;
  else
    write_file(out_path, out);
  return kExitOk;
}

int cmd_query(const std::string& input, CLI::App* imply, CLI::App* consistent, CLI::App* valid,
              CLI::App* enumerate, const std::string& lits_text,
              std::optional<std::uint64_t> limit) {
  ccdd::Diagram d = load_ccdd(input);
  if (imply->parsed()) {
    std::istringstream ls(lits_text);
    std::vector<int> lits;
    int n;
    while (ls >> n) lits.push_back(n);
    ccdd::Term t;
    try {
      t = ccdd::make_term(lits);
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    }
    std::cout << (ccdd::implicant_check(d, t) ? "yes" : "no") << "\n";
  } else if (consistent->parsed()) {
    std::cout << (ccdd::consistency(d) ? "yes" : "no") << "\n";
  } else if (valid->parsed()) {
    std::cout << (ccdd::validity(d, full_scope(d.num_vars())) ? "yes" : "no") << "\n";
  } else if (enumerate->parsed()) {
    std::vector<ccdd::Var> scope = full_scope(d.num_vars());
    ccdd::enumerate_models(d, scope, limit, [&](const ccdd::Assignment& m) {
      std::cout << ccdd::format_sample(m, scope);
      return true;
    });
  } else {
    std::cerr << "error: query needs a subcommand\n";
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_stats(const std::string& input) {
  ccdd::Diagram d = load_ccdd(input);
  ccdd::DiagramStats s = ccdd::stats(d);
  std::cout << "nodes=" << s.nodes << " edges=" << s.edges << " knodes="
            << s.kernelized_node_count << " decisions=" << s.decision_count
            << " depth=" << s.max_depth << "\n";
  return kExitOk;
}

int cmd_dot(const std::string& input, const std::string& out_path) {
  ccdd::Diagram d = load_ccdd(input);
  std::string dot = ccdd::to_dot(d);
  if (out_path.empty())
    std::cout << dot;
  else
    write_file(out_path, dot);
  return kExitOk;
}

int cmd_verify(const std::string& input, const std::string& samples_path,
               const std::string& ccdd_path, unsigned max_vars) {
  ccdd::CnfFormula cnf = load_cnf(input);
  ccdd::BigInt expected;
  bool have_expected = false;

  ccdd::ModelCount mc = ccdd::exact_mc(cnf);
  ccdd::Diagram d = ccdd::compile(cnf);
  ccdd::CountAnnotation ann = ccdd::ct(d);
  ccdd::BigInt search_count = mc.value();
  ccdd::BigInt trace_count = ann.at(d.root()).value();
  std::cout << "exact_mc=" << search_count << " compile_ct=" << trace_count;
  if (search_count != trace_count) {
    std::cout << " MISMATCH\n";
    throw VerifyMismatch("exact_mc and compile+ct disagree");
  }
  expected = search_count;
  have_expected = true;

  if (cnf.num_vars() <= max_vars) {
    ccdd::BigInt brute = ccdd::brute_count(cnf, ccdd::OracleLimit{max_vars});
    std::cout << " brute=" << brute;
    if (brute != expected) {
      std::cout << " MISMATCH\n";
      throw VerifyMismatch("brute-force count disagrees");
    }
  } else {
    std::cout << " brute=skipped";
    std::cerr << "note: " << cnf.num_vars() << " vars exceed the oracle limit; brute-force check skipped\n";
  }

  if (!ccdd_path.empty()) {
    ccdd::Diagram stored = load_ccdd(ccdd_path);
    ccdd::ValidationReport rep = ccdd::validate(stored);
    if (!rep.ok()) throw VerifyMismatch("stored diagram invalid: " + rep.violations.front());
    std::vector<ccdd::Var> scope = full_scope(std::max(stored.num_vars(), cnf.num_vars()));
    ccdd::BigInt stored_count = ccdd::ct(stored, scope).at(stored.root()).value();
    std::cout << " ccdd_ct=" << stored_count;
    if (have_expected && stored_count != expected) {
      std::cout << " MISMATCH\n";
      throw VerifyMismatch("stored diagram count disagrees");
    }
  }

  if (!samples_path.empty()) {
    std::ifstream sf = open_input(samples_path);
    std::string line;
    std::uint64_t checked = 0;
    std::vector<std::uint64_t> histogram;
    std::vector<ccdd::Assignment> models;
    bool enumerable = cnf.num_vars() <= max_vars;
    if (enumerable) models = ccdd::brute_models(cnf, ccdd::OracleLimit{max_vars});
    histogram.resize(models.size(), 0);
    while (std::getline(sf, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      ccdd::Assignment omega(cnf.num_vars());
      int lit;
      while (ls >> lit) omega.set(static_cast<ccdd::Var>(lit < 0 ? -lit : lit), lit > 0);
      if (!ccdd::evaluate(cnf, omega)) throw VerifyMismatch("sample does not satisfy the formula");
      ++checked;
      if (enumerable) {
        bool found = false;
        for (size_t i = 0; i < models.size(); ++i)
          if (models[i] == omega) {
            ++histogram[i];
            found = true;
            break;
          }
        if (!found) throw VerifyMismatch("sample is not an enumerated model");
      }
    }
    std::cout << " samples=" << checked;
    if (enumerable && models.size() >= 2 && checked >= 10 * models.size()) {
      ccdd::ChiSquareResult chi = ccdd::chi_square_uniform(histogram);
      std::cout << " chi2=" << chi.statistic;
      if (chi.reject) {
        std::cout << " MISMATCH\n";
        throw VerifyMismatch("sample distribution rejected by chi-square");
      }
    }
  }

  std::cout << " ok\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CCDD knowledge compiler: exact model counting, uniform sampling, queries"};
  app.require_subcommand(1);

  std::string input, out_path, format, lits_text, samples_path, ccdd_path;
  std::uint64_t n_samples = 1, seed = 0;
  std::optional<std::uint64_t> limit;
  unsigned verify_max_vars = 24;
  CompileFlags flags;

  CLI::App* compile = app.add_subcommand("compile", "compile DIMACS CNF into a .ccdd file");
  compile->add_option("input", input, "input .cnf")->required();
  compile->add_option("--out", out_path, "output .ccdd path (default: input with .ccdd)");
  add_compile_flags(compile, flags);

  CLI::App* count = app.add_subcommand("count", "exact model count of a .cnf or .ccdd input");
  count->add_option("input", input)->required();
  count->add_option("--format", format, "override input format: cnf|ccdd")
      ->check(CLI::IsMember({"cnf", "ccdd"}));
  add_compile_flags(count, flags);

  CLI::App* sample = app.add_subcommand("sample", "draw uniform models");
  sample->add_option("input", input)->required();
  sample->add_option("-n", n_samples, "number of samples")->required();
  sample->add_option("--seed", seed, "RNG seed");
  sample->add_option("--out", out_path, "samples file (default: stdout)");
  sample->add_option("--format", format)->check(CLI::IsMember({"cnf", "ccdd"}));
  add_compile_flags(sample, flags);

  CLI::App* query = app.add_subcommand("query", "queries over a .ccdd file");
  query->add_option("input", input)->required();
  CLI::App* imply = query->add_subcommand("imply", "does a term imply the diagram");
  imply->add_option("lits", lits_text, "DIMACS literals, e.g. \"1 -7\"")->required();
  CLI::App* consistent = query->add_subcommand("consistent", "satisfiability");
  CLI::App* valid = query->add_subcommand("valid", "validity over the header scope");
  CLI::App* enumerate = query->add_subcommand("enumerate", "stream models lexicographically");
  enumerate->add_option("--limit", limit, "stop after this many models");
  query->require_subcommand(1);

  CLI::App* stats_cmd = app.add_subcommand("stats", "size statistics of a .ccdd file");
  stats_cmd->add_option("input", input)->required();

  CLI::App* dot = app.add_subcommand("dot", "Graphviz export of a .ccdd file");
  dot->add_option("input", input)->required();
  dot->add_option("--out", out_path, "output file (default: stdout)");

  CLI::App* verify = app.add_subcommand("verify", "cross-check counts and samples");
  verify->add_option("input", input, "input .cnf")->required();
  verify->add_option("--samples", samples_path, "samples file to check");
  verify->add_option("--ccdd", ccdd_path, "compiled diagram to check against");
  verify->add_option("--max-vars", verify_max_vars, "oracle enumeration limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (compile->parsed()) return cmd_compile(input, out_path, flags);
    if (count->parsed()) return cmd_count(input, format, flags);
    if (sample->parsed()) return cmd_sample(input, format, n_samples, seed, out_path, flags);
    if (query->parsed()) return cmd_query(input, imply, consistent, valid, enumerate, lits_text, limit);
    if (stats_cmd->parsed()) return cmd_stats(input);
    if (dot->parsed()) return cmd_dot(input, out_path);
    if (verify->parsed()) return cmd_verify(input, samples_path, ccdd_path, verify_max_vars);
  } catch (const ccdd::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ccdd::ResourceLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const VerifyMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const ccdd::InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
