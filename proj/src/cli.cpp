#include "relusat/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <map>

#include "relusat/oracle.hpp"
#include "relusat/solver.hpp"

namespace relusat::cli {

namespace {

constexpr int kDefinitive = 0;
constexpr int kInconclusive = 1;
constexpr int kUsage = 2;

struct Options {
  std::string net_path;
  std::string prop_path;
  std::string stats_path;
  std::uint64_t seed = 0;
  double timeout = 60.0;
  SearchMode mode = SearchMode::full;
  AbstractionMode abstraction = AbstractionMode::both;
  LpRelaxation relaxation = LpRelaxation::triangle;
  bool oracle = false;
  bool no_attack = false;
  std::size_t split = 1;
  std::size_t jobs = 1;
  // ablation
  std::size_t count = 50;
};

const std::map<std::string, SearchMode> kModes{
    {"full", SearchMode::full}, {"no-restart", SearchMode::no_restart}, {"no-learning", SearchMode::no_learning}};
const std::map<std::string, AbstractionMode> kAbstractions{
    {"interval", AbstractionMode::interval}, {"polytope", AbstractionMode::polytope}, {"both", AbstractionMode::both}};
const std::map<std::string, LpRelaxation> kRelaxations{
    {"triangle", LpRelaxation::triangle}, {"loose", LpRelaxation::loose}, {"none", LpRelaxation::none}};

template <typename T>
std::string name_of(const std::map<std::string, T>& table, T value) {
  for (const auto& [k, v] : table) {
    if (v == value) return k;
  }
  return "?";
}

SolverConfig solver_config(const Options& o) {
  SolverConfig cfg;
  cfg.seed = o.seed;
  cfg.timeout = o.timeout;
  cfg.mode = o.mode;
  cfg.theory.abstraction = o.abstraction;
  cfg.theory.relaxation = o.relaxation;
  cfg.split = o.split;
  cfg.jobs = o.jobs;
  cfg.run_attacks = !o.no_attack;
  cfg.attack.seed = o.seed;
  return cfg;
}

VerificationProblem load(const Options& o) {
  Network net = parse_network(read_text_file(o.net_path));
  return parse_vnnlib(read_text_file(o.prop_path), std::move(net));
}

void print_verdict(std::ostream& out, const Verdict& v) {
  out << to_string(v.kind) << '\n';
  if (v.kind == VerdictKind::sat) {
    char buf[64];
    for (std::size_t i = 0; i < v.witness.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", v.witness[i]);
      out << "X_" << i << " = " << buf << '\n';
    }
  }
}

int exit_code(const Verdict& v) {
  return v.kind == VerdictKind::sat || v.kind == VerdictKind::unsat ? kDefinitive : kInconclusive;
}

void write_stats(const std::string& path, const Options& o, const Verdict& v) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  if (path.size() >= 4 && path.ends_with(".csv")) {
    f << "verdict,mode,seed," << SearchStats::csv_header() << '\n'
      << to_string(v.kind) << ',' << name_of(kModes, o.mode) << ',' << o.seed << ',' << v.stats.to_csv_row() << '\n';
    return;
  }
  f << "verdict=" << to_string(v.kind) << '\n'
    << "mode=" << name_of(kModes, o.mode) << '\n'
    << "abstraction=" << name_of(kAbstractions, o.abstraction) << '\n'
    << "lp_relaxation=" << name_of(kRelaxations, o.relaxation) << '\n'
    << "seed=" << o.seed << '\n'
    << "split=" << o.split << '\n'
    << v.stats.to_key_value();
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const VerificationProblem problem = load(o);
  const Verdict v = verify(problem, solver_config(o));
  print_verdict(out, v);
  if (v.kind == VerdictKind::unknown && !v.reason.empty()) err << "reason: " << v.reason << '\n';
  write_stats(o.stats_path, o, v);
  if (o.oracle) {
    const Verdict ref = enumerate_verify(problem);
    err << "oracle: " << to_string(ref.kind) << '\n';
    if (exit_code(v) == kDefinitive && ref.kind != v.kind) {
      err << "error: verdict disagrees with the enumeration oracle\n";
      return kInconclusive;
    }
  }
  return exit_code(v);
}

int cmd_falsify(const Options& o, std::ostream& out) {
  const VerificationProblem problem = load(o);
  AttackConfig ac;
  ac.seed = o.seed;
  auto w = random_attack(problem, ac);
  if (!w) w = pgd_attack(problem, ac);
  Verdict v;
  if (w) {
    v.kind = VerdictKind::sat;
    v.witness = std::move(*w);
  }
  print_verdict(out, v);
  write_stats(o.stats_path, o, v);
  return exit_code(v);
}

int cmd_oracle(const Options& o, std::ostream& out, std::ostream& err) {
  const Verdict v = enumerate_verify(load(o));
  print_verdict(out, v);
  if (v.kind == VerdictKind::unknown) err << "reason: " << v.reason << '\n';
  write_stats(o.stats_path, o, v);
  return exit_code(v);
}

/// Random problems solved with learning on and off; one CSV row per run.
int cmd_ablation(const Options& o, std::ostream& out) {
  std::ofstream file;
  std::ostream* sink = &out;
  if (!o.stats_path.empty()) {
    file.open(o.stats_path);
    if (!file) throw std::runtime_error("cannot write " + o.stats_path);
    sink = &file;
  }
  *sink << "instance,mode,verdict," << SearchStats::csv_header() << '\n';
  for (std::size_t i = 0; i < o.count; ++i) {
    const VerificationProblem problem = generate_random_problem({}, o.seed + i);
    for (SearchMode mode : {SearchMode::full, SearchMode::no_learning}) {
      Options run = o;
      run.mode = mode;
      run.no_attack = true;
      const Verdict v = verify(problem, solver_config(run));
      *sink << i << ',' << name_of(kModes, mode) << ',' << to_string(v.kind) << ',' << v.stats.to_csv_row() << '\n';
    }
  }
  return kDefinitive;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Complete verifier for ReLU networks against linear output properties"};
  app.require_subcommand(1);
  Options o;

  const auto add_common = [&](CLI::App* sub, bool problem_files) {
    if (problem_files) {
      sub->add_option("--net", o.net_path, "network JSON file")->required();
      sub->add_option("--prop", o.prop_path, "property file (VNN-LIB subset)")->required();
    }
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--stats", o.stats_path, "write statistics (key=value, or CSV for *.csv)");
  };
  const auto add_search = [&](CLI::App* sub) {
    sub->add_option("--timeout", o.timeout, "wall-clock budget in seconds")->check(CLI::PositiveNumber);
    sub->add_option("--mode", o.mode, "search mode")->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case));
    sub->add_option("--abstraction", o.abstraction, "bound abstraction")
        ->transform(CLI::CheckedTransformer(kAbstractions, CLI::ignore_case));
    sub->add_option("--lp-relaxation", o.relaxation, "LP treatment of undecided neurons")
        ->transform(CLI::CheckedTransformer(kRelaxations, CLI::ignore_case));
    sub->add_option("--split", o.split, "input splits per dimension")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", o.jobs, "parallel workers")->check(CLI::PositiveNumber);
  };

  CLI::App* verify_cmd = app.add_subcommand("verify", "decide the property");
  add_common(verify_cmd, true);
  add_search(verify_cmd);
  verify_cmd->add_flag("--oracle", o.oracle, "cross-check with activation-pattern enumeration");
  verify_cmd->add_flag("--no-attack", o.no_attack, "skip the falsification attacks");

  CLI::App* falsify_cmd = app.add_subcommand("falsify", "run the attacks only");
  add_common(falsify_cmd, true);

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "decide by activation-pattern enumeration");
  add_common(oracle_cmd, true);

  CLI::App* ablation_cmd = app.add_subcommand("ablation", "learning on/off statistics on random problems");
  add_common(ablation_cmd, false);
  add_search(ablation_cmd);
  ablation_cmd->add_option("--count", o.count, "number of random problems")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kDefinitive;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kUsage;
  }

  try {
    if (verify_cmd->parsed()) return cmd_verify(o, out, err);
    if (falsify_cmd->parsed()) return cmd_falsify(o, out);
    if (oracle_cmd->parsed()) return cmd_oracle(o, out, err);
    return cmd_ablation(o, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const OracleRefusal& e) {
    err << "error: " << e.what() << '\n';
    return kInconclusive;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

} // namespace relusat::cli
