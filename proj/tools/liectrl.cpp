#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "liectrl/catalog.hpp"
#include "liectrl/config.hpp"
#include "liectrl/entropy.hpp"
#include "liectrl/quotient.hpp"
#include "liectrl/verify.hpp"

using namespace liectrl;
using nlohmann::json;

namespace {

std::string num(double v) {
  if (v == 0.0) v = 0.0;  // normalize negative zero
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct CommonArgs {
  std::string config_path;
  std::string csv_path;
  std::string json_path;
  std::string trace_path;
  std::optional<std::uint64_t> seed;
  bool dump_config = false;
};

ExperimentConfig load(const CommonArgs& args) {
  ExperimentConfig cfg = parse_config(args.config_path);
  if (args.seed) cfg.numerics.seed = *args.seed;
  return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config_path, "experiment config file")->required();
  cmd->add_option("--csv", args.csv_path, "write machine-readable results as CSV");
  cmd->add_option("--json", args.json_path, "write machine-readable results as JSON");
  cmd->add_option("--trace", args.trace_path, "dump the drift trajectory from the identity as CSV");
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_flag("--dump-config", args.dump_config, "print the effective config and exit");
}

bool maybe_dump(const CommonArgs& args, const ExperimentConfig& cfg) {
  if (!args.dump_config) return false;
  std::cout << cfg.to_json().dump(2) << "\n";
  return true;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ValidationError, "cannot write to '" + path + "'");
  out << content;
}

void write_trace(const ExperimentConfig& cfg, const std::string& path) {
  const LieAlgebra& table = *cfg.table;
  double tau_max = cfg.pair.tau.back();
  double tick = cfg.numerics.step * cfg.numerics.thinning;
  long ticks = std::lround(tau_max / tick);
  IntegrateOptions opts;
  opts.step = cfg.numerics.step;
  opts.table = &table;
  Mat g = Mat::Identity(table.rep_dim(), table.rep_dim());
  std::string csv = "t";
  for (const auto& name : table.basis_names()) csv += "," + name;
  csv += "\n";
  for (long k = 0; k <= ticks; ++k) {
    Vec coords = log_point(table, GroupElement{g, &table});
    csv += num(k * tick);
    for (int i = 0; i < coords.size(); ++i) csv += "," + num(coords(i));
    csv += "\n";
    if (k < ticks)
      g = rk4_integrate(
          g, tick,
          [&](double, const Mat& state) {
            return affine_field_eval(table, cfg.drift, GroupElement{state, &table});
          },
          opts);
  }
  write_file(path, csv);
}

void print_spectrum_table(const Mat& d_star, double tol_zero) {
  std::cout << "eigenvalues of the dual derivation:\n";
  std::cout << "  re               im\n";
  for (const auto& ev : spectrum(d_star))
    std::cout << "  " << num(ev.real()) << "  " << num(ev.imag()) << "\n";
  std::cout << "sum of positive real parts: " << num(closed_form_entropy(d_star, tol_zero))
            << "\n";
}

int cmd_validate(const CommonArgs& args) {
  ExperimentConfig cfg = load(args);
  if (maybe_dump(args, cfg)) return 0;
  ValidationReport report = validate_algebra(*cfg.table);
  std::cout << "algebra validation (" << (cfg.algebra_name.empty() ? "inline" : cfg.algebra_name)
            << ", dim " << cfg.table->dim() << ")\n";
  if (!cfg.table->notes().empty()) std::cout << "  notes: " << cfg.table->notes() << "\n";
  for (const auto& item : report.items)
    std::cout << "  " << (item.pass ? "PASS" : "FAIL") << "  " << item.name << "  residual "
              << num(item.residual) << "\n";
  if (args.json_path.empty() == false) {
    json j;
    j["pass"] = report.pass;
    j["max_residual"] = report.max_residual;
    for (const auto& item : report.items)
      j["items"].push_back({{"name", item.name}, {"residual", item.residual}, {"pass", item.pass}});
    write_file(args.json_path, j.dump(2) + "\n");
  }
  return report.pass ? 0 : 1;
}

int cmd_decompose(const CommonArgs& args) {
  ExperimentConfig cfg = load(args);
  if (maybe_dump(args, cfg)) return 0;
  DualDecomposition dual = dual_decomposition(*cfg.table, cfg.drift, cfg.flow_options());
  std::cout << "dual derivation D* (locked sign " << (dual.sign > 0 ? "+1" : "-1") << "):\n";
  for (int r = 0; r < dual.d_star.rows(); ++r) {
    std::cout << " ";
    for (int c = 0; c < dual.d_star.cols(); ++c) std::cout << " " << num(dual.d_star(r, c));
    std::cout << "\n";
  }
  std::cout << "right-invariant part at identity:";
  for (int i = 0; i < dual.y.size(); ++i) std::cout << " " << num(dual.y(i));
  std::cout << "\noracle residual: " << num(dual.oracle_residual)
            << "  (rejected sign residual: " << num(dual.rejected_residual) << ")\n";
  if (!args.json_path.empty()) {
    json j;
    j["sign"] = dual.sign;
    j["oracle_residual"] = dual.oracle_residual;
    j["rejected_residual"] = dual.rejected_residual;
    for (int r = 0; r < dual.d_star.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < dual.d_star.cols(); ++c) row.push_back(dual.d_star(r, c));
      j["d_star"].push_back(row);
    }
    for (int i = 0; i < dual.y.size(); ++i) j["y"].push_back(dual.y(i));
    write_file(args.json_path, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_spectrum(const CommonArgs& args) {
  ExperimentConfig cfg = load(args);
  if (maybe_dump(args, cfg)) return 0;
  DualDecomposition dual = dual_decomposition(*cfg.table, cfg.drift, cfg.flow_options());
  print_spectrum_table(dual.d_star, cfg.numerics.tol_zero);
  return 0;
}

int cmd_entropy_formula(const CommonArgs& args) {
  ExperimentConfig cfg = load(args);
  if (maybe_dump(args, cfg)) return 0;
  DualDecomposition dual = dual_decomposition(*cfg.table, cfg.drift, cfg.flow_options());
  double closed = closed_form_entropy(dual.d_star, cfg.numerics.tol_zero);
  double top = topological_entropy_upper(dual.d_star, cfg.numerics.tol_zero);
  print_spectrum_table(dual.d_star, cfg.numerics.tol_zero);
  std::cout << "closed-form entropy: " << num(closed) << "\n";
  std::cout << "time-one-map bound:  " << num(top) << "\n";
  for (const auto& ev : spectrum(dual.d_star)) {
    if (std::abs(ev.real()) < cfg.numerics.tol_zero && std::abs(ev.imag()) > cfg.numerics.tol_zero) {
      std::cerr << "note: purely imaginary eigenvalues detected; the empirical estimator may "
                   "converge slowly\n";
      break;
    }
  }
  if (!args.json_path.empty()) {
    json j;
    j["closed_form"] = closed;
    j["upper_bound_top"] = top;
    write_file(args.json_path, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_entropy_estimate(const CommonArgs& args) {
  ExperimentConfig cfg = load(args);
  if (maybe_dump(args, cfg)) return 0;
  AffineSystem sys = cfg.system();
  sys.validate();
  if (!args.trace_path.empty()) write_trace(cfg, args.trace_path);

  std::cerr << "seed " << cfg.numerics.seed << ", candidate cap " << cfg.numerics.candidate_cap
            << "\n";
  std::vector<ControlFunction> candidates =
      build_candidates(sys, cfg.pair, cfg.pair.tau.back(), cfg.candidate_options());
  std::cerr << "candidate family size: " << candidates.size() << "\n";

  EntropyResult result;
  try {
    result = entropy_estimate(sys, cfg.pair, candidates, cfg.numerics_options());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Uncoverable) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
    throw;
  }

  std::cout << "closed-form entropy: " << num(result.closed_form) << "\n";
  std::cout << "tau        eps        r          ln r / tau\n";
  std::string csv = "tau,eps,r,ln_r_over_tau\n";
  for (const auto& row : result.rows) {
    std::cout << num(row.tau) << "  " << num(row.eps) << "  " << row.r << "  "
              << num(row.ln_r_over_tau) << "\n";
    csv += num(row.tau) + "," + num(row.eps) + "," + std::to_string(row.r) + "," +
           num(row.ln_r_over_tau) + "\n";
  }
  for (const auto& fit : result.fits)
    std::cout << "eps " << num(fit.eps) << ": slope " << num(fit.slope) << " (R^2 "
              << num(fit.r_squared) << ")\n";
  std::cout << "empirical slope (smallest eps): " << num(result.empirical_slope) << " vs closed form "
            << num(result.closed_form) << "\n";
  if (!result.monotone_in_tau)
    std::cerr << "note: spanning counts are not monotone in tau (greedy-cover noise)\n";
  if (!result.monotone_in_eps)
    std::cerr << "note: spanning counts are not monotone in eps (greedy-cover noise)\n";
  if (result.imaginary_eigenvalues)
    std::cerr << "note: purely imaginary eigenvalues detected; convergence may be slow\n";

  if (!args.csv_path.empty()) write_file(args.csv_path, csv);
  if (!args.json_path.empty()) {
    json j;
    j["closed_form"] = result.closed_form;
    j["upper_bound_top"] = result.upper_bound_top;
    j["empirical_slope"] = result.empirical_slope;
    j["r_squared"] = result.r_squared;
    for (const auto& row : result.rows)
      j["rows"].push_back({{"tau", row.tau}, {"eps", row.eps}, {"r", row.r}});
    write_file(args.json_path, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_quotient_check(const CommonArgs& args) {
  ExperimentConfig cfg = load(args);
  if (maybe_dump(args, cfg)) return 0;
  const LieAlgebra& table = *cfg.table;
  DualDecomposition dual = dual_decomposition(table, cfg.drift, cfg.flow_options());
  EigenSplit split = eigen_split(dual.d_star, cfg.numerics.tol_zero);

  print_spectrum_table(dual.d_star, cfg.numerics.tol_zero);
  std::cout << "blocks:\n";
  for (const auto& block : split.blocks)
    std::cout << "  eigenvalue (" << num(block.eigenvalue.real()) << ", "
              << num(block.eigenvalue.imag()) << "i)  dim " << block.multiplicity
              << "  invariance residual " << num(block.invariance_residual) << "\n";
  std::cout << "dim g^{+,0} = " << split.plus_zero_basis.cols()
            << ", dim n = " << split.n_basis.cols()
            << ", joint condition " << num(split.joint_condition) << "\n";

  double grading = grading_check(table, split);
  double closure = check_n_closure(table, split);
  std::cout << "grading residual: " << num(grading) << "\n";
  std::cout << "n closure residual: " << num(closure) << "\n";

  std::mt19937_64 rng(cfg.numerics.seed);
  UnimodularityReport uni = unimodularity_check(table, split, rng);
  if (uni.vacuous)
    std::cout << "unimodularity: vacuous (trivial complement)\n";
  else
    std::cout << "unimodularity: trace residual " << num(uni.max_trace_residual)
              << ", modular residual " << num(uni.max_modular_residual) << " over " << uni.samples
              << " samples -> " << (uni.pass ? "PASS" : "FAIL") << "\n";

  QuotientChart chart(cfg.table, split, dual.d_star, cfg.numerics.chart_radius);
  double rate = closed_form_entropy(dual.d_star, cfg.numerics.tol_zero);
  std::cout << "volume growth (tau, measured, predicted, rel. error):\n";
  std::string csv = "tau,measured,predicted,rel_error\n";
  json growth_rows = json::array();
  bool growth_ok = true;
  for (double tau : {0.5, 1.0, 2.0}) {
    double measured = volume_growth(chart, tau, cfg.numerics.volume_fd_step);
    double predicted = std::exp(tau * rate);
    double rel = std::abs(measured - predicted) / predicted;
    growth_ok = growth_ok && rel < 1e-4;
    std::cout << "  " << num(tau) << "  " << num(measured) << "  " << num(predicted) << "  "
              << num(rel) << "\n";
    csv += num(tau) + "," + num(measured) + "," + num(predicted) + "," + num(rel) + "\n";
    growth_rows.push_back(
        {{"tau", tau}, {"measured", measured}, {"predicted", predicted}, {"rel_error", rel}});
  }
  if (!args.csv_path.empty()) write_file(args.csv_path, csv);

  bool pass = grading < 1e-8 && closure < 1e-8 && uni.pass && growth_ok;
  if (!args.json_path.empty()) {
    json j;
    j["pass"] = pass;
    j["dim_plus_zero"] = split.plus_zero_basis.cols();
    j["dim_n"] = split.n_basis.cols();
    j["grading_residual"] = grading;
    j["n_closure_residual"] = closure;
    j["joint_condition"] = split.joint_condition;
    for (const auto& block : split.blocks)
      j["blocks"].push_back({{"re", block.eigenvalue.real()},
                             {"im", block.eigenvalue.imag()},
                             {"dim", block.multiplicity},
                             {"invariance_residual", block.invariance_residual}});
    j["unimodularity"] = {{"vacuous", uni.vacuous},
                          {"trace_residual", uni.max_trace_residual},
                          {"modular_residual", uni.max_modular_residual},
                          {"pass", uni.pass}};
    j["volume_growth"] = growth_rows;
    write_file(args.json_path, j.dump(2) + "\n");
  }
  std::cout << (pass ? "quotient checks PASS" : "quotient checks FAIL") << "\n";
  return pass ? 0 : 1;
}

int cmd_verify_all(const CommonArgs& args) {
  ExperimentConfig cfg = load(args);
  if (maybe_dump(args, cfg)) return 0;
  std::cerr << "seed " << cfg.numerics.seed << "\n";
  std::vector<VerifyRow> rows = run_verification(cfg);
  std::size_t failures = 0;
  std::string csv = "suite,check,residual,threshold,pass\n";
  for (const auto& row : rows) {
    std::printf("%-4s  %-10s %-28s residual %-14s threshold %-8s%s\n",
                row.pass ? "PASS" : "FAIL", row.suite.c_str(), row.check.c_str(),
                num(row.residual).c_str(), num(row.threshold).c_str(),
                row.note.empty() ? "" : ("  [" + row.note + "]").c_str());
    csv += row.suite + "," + row.check + "," + num(row.residual) + "," + num(row.threshold) +
           "," + (row.pass ? "1" : "0") + "\n";
    if (!row.pass) ++failures;
  }
  std::cout << rows.size() - failures << "/" << rows.size() << " checks passed\n";
  if (!args.csv_path.empty()) write_file(args.csv_path, csv);
  if (!args.json_path.empty()) {
    json j = json::array();
    for (const auto& row : rows)
      j.push_back({{"suite", row.suite},
                   {"check", row.check},
                   {"residual", row.residual},
                   {"threshold", row.threshold},
                   {"pass", row.pass},
                   {"note", row.note}});
    write_file(args.json_path, j.dump(2) + "\n");
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"affine control systems on matrix Lie groups: flows, spectra and invariance "
               "entropy"};
  app.require_subcommand(1);

  CommonArgs validate_args, decompose_args, spectrum_args, formula_args, estimate_args,
      quotient_args, verify_args;

  add_common(app.add_subcommand("validate", "check the algebra axioms"), validate_args);
  add_common(app.add_subcommand("decompose", "dual decomposition of the drift"), decompose_args);
  add_common(app.add_subcommand("spectrum", "eigenvalues of the dual derivation"), spectrum_args);
  add_common(app.add_subcommand("entropy-formula", "closed-form invariance entropy"),
             formula_args);
  add_common(app.add_subcommand("entropy-estimate", "empirical spanning-set estimate"),
             estimate_args);
  add_common(app.add_subcommand("quotient-check", "eigenspace splitting and volume growth"),
             quotient_args);
  add_common(app.add_subcommand("verify-all", "run every module invariant suite"), verify_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("validate")) return cmd_validate(validate_args);
    if (app.got_subcommand("decompose")) return cmd_decompose(decompose_args);
    if (app.got_subcommand("spectrum")) return cmd_spectrum(spectrum_args);
    if (app.got_subcommand("entropy-formula")) return cmd_entropy_formula(formula_args);
    if (app.got_subcommand("entropy-estimate")) return cmd_entropy_estimate(estimate_args);
    if (app.got_subcommand("quotient-check")) return cmd_quotient_check(quotient_args);
    if (app.got_subcommand("verify-all")) return cmd_verify_all(verify_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
