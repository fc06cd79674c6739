#include "liectrl/verify.hpp"

#include <cmath>
#include <random>

#include "liectrl/entropy.hpp"
#include "liectrl/quotient.hpp"

namespace liectrl {

namespace {

Vec random_vec(int d, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = unif(rng);
  return v;
}

Mat random_derivation(const std::vector<Mat>& basis, int d, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  Mat D = Mat::Zero(d, d);
  for (const Mat& b : basis) D += unif(rng) * b;
  return D;
}

ControlFunction random_control(const AffineSystem& sys, int segments, double dt,
                               std::mt19937_64& rng) {
  const int m = sys.channels();
  Mat values(m, segments);
  for (int s = 0; s < segments; ++s) {
    for (int j = 0; j < m; ++j) {
      std::uniform_real_distribution<double> unif(sys.range.lo(j), sys.range.hi(j));
      values(j, s) = unif(rng);
    }
  }
  return ControlFunction(dt, values);
}

}  // namespace

std::vector<VerifyRow> run_verification(const ExperimentConfig& cfg) {
  std::vector<VerifyRow> rows;
  auto push = [&rows](std::string suite, std::string check, double residual, double threshold,
                      std::string note = "") {
    rows.push_back(
        {std::move(suite), std::move(check), residual, threshold, residual < threshold,
         std::move(note)});
  };

  const LieAlgebra& table = *cfg.table;
  const int d = table.dim();
  const int n = table.rep_dim();
  std::mt19937_64 rng(cfg.numerics.seed);
  const double step = cfg.numerics.step;
  auto deriv_basis = derivation_space(table);
  AffineSystem sys = cfg.system();
  sys.validate();

  {
    ValidationReport report = validate_algebra(table);
    push("algebra", "axioms", report.max_residual, 1e-12);
  }
  {
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      Vec x = random_vec(d, rng, 1.0), y = random_vec(d, rng, 1.0);
      Mat lhs = table.ad(table.bracket(x, y));
      Mat rhs = table.ad(x) * table.ad(y) - table.ad(y) * table.ad(x);
      worst = std::max(worst, (lhs - rhs).norm());
    }
    push("algebra", "ad homomorphism", worst, 1e-10);
  }
  {
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      Vec y = random_vec(d, rng, 2.0);
      y *= 5.0 / std::max(1.0, y.norm());
      worst = std::max(worst, (log_point(table, exp_point(table, y)) - y).norm());
    }
    push("algebra", "exp/log round trip", worst, 1e-10);
  }
  {
    double worst = 0.0;
    const double h = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
      Vec y = random_vec(d, rng, 1.0), v = random_vec(d, rng, 1.0);
      Mat fd =
          (exp_point(table, Vec(y + h * v)).m - exp_point(table, Vec(y - h * v)).m) / (2.0 * h);
      Mat analytic = exp_point(table, y).m * table.rep(dexp_apply(table, y, v));
      worst = std::max(worst, (fd - analytic).norm());
    }
    push("algebra", "dexp vs finite difference", worst, 1e-8);
  }

  {
    double worst_auto = 0.0, worst_group = 0.0;
    std::uniform_real_distribution<double> tdist(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
      LinearField lf{random_derivation(deriv_basis, d, rng, 1.0)};
      GroupElement g = exp_point(table, random_vec(d, rng, 1.0));
      GroupElement h = exp_point(table, random_vec(d, rng, 1.0));
      double t = tdist(rng), s = tdist(rng);
      Mat lhs = linear_flow(table, lf, t, GroupElement{g.m * h.m, &table}).m;
      Mat rhs = linear_flow(table, lf, t, g).m * linear_flow(table, lf, t, h).m;
      worst_auto = std::max(worst_auto, (lhs - rhs).norm());
      Mat once = linear_flow(table, lf, t + s, g).m;
      Mat twice = linear_flow(table, lf, t, linear_flow(table, lf, s, g)).m;
      worst_group = std::max(worst_group, (once - twice).norm());
    }
    push("fields", "flow is automorphic", worst_auto, 1e-9);
    push("fields", "one-parameter group", worst_group, 1e-10);
  }
  {
    // Differential at the identity of the integrated linear-drift flow.
    Mat D = cfg.drift.D;
    AffineField lin_only{D, Vec::Zero(d)};
    IntegrateOptions opts;
    opts.step = step;
    const double h = 1e-4;
    Mat fd(d, d);
    for (int i = 0; i < d; ++i) {
      GroupElement plus =
          affine_flow_direct(table, lin_only, 1.0, exp_point(table, Vec(h * Vec::Unit(d, i))), opts);
      GroupElement minus = affine_flow_direct(table, lin_only, 1.0,
                                              exp_point(table, Vec(-h * Vec::Unit(d, i))), opts);
      fd.col(i) = (log_point(table, plus) - log_point(table, minus)) / (2.0 * h);
    }
    push("fields", "differential at identity", (fd - dense_expm(D)).norm(), 1e-6);
  }
  {
    double worst_right = 0.0, worst_left = 0.0, worst_conj = 0.0;
    DualDecomposition dual = dual_decomposition(table, cfg.drift, cfg.flow_options());
    std::uniform_real_distribution<double> tdist(0.2, 1.5);
    IntegrateOptions opts;
    opts.step = step;
    for (int trial = 0; trial < 10; ++trial) {
      GroupElement g = exp_point(table, random_vec(d, rng, 0.7));
      double t = tdist(rng);
      GroupElement direct = affine_flow_direct(table, cfg.drift, t, g, opts);
      GroupElement at_e =
          affine_flow_direct(table, cfg.drift, t, GroupElement{Mat::Identity(n, n), &table}, opts);
      Mat right = linear_flow(table, LinearField{cfg.drift.D}, t, g).m * at_e.m;
      Mat left = at_e.m * linear_flow(table, LinearField{dual.d_star}, t, g).m;
      worst_right = std::max(worst_right, (direct.m - right).norm());
      worst_left = std::max(worst_left, (direct.m - left).norm());
      Mat psi = linear_flow(table, LinearField{cfg.drift.D}, t, g).m;
      Mat conj = at_e.m * linear_flow(table, LinearField{dual.d_star}, t, g).m * at_e.m.inverse();
      worst_conj = std::max(worst_conj, (psi - conj).norm());
    }
    push("fields", "right factorization", worst_right, 1e-6);
    push("fields", "left factorization", worst_left, 1e-6);
    push("fields", "conjugation identity", worst_conj, 1e-6);
    push("fields", "sign oracle margin", dual.oracle_residual,
         dual.rejected_residual > 0 ? 1e-4 : 1.0,
         dual.sign > 0 ? "locked sign +1" : "locked sign -1");
  }
  {
    // Drift data recovered from flow evaluations; fourth-order stencil keeps
    // the truncation error well under the contract for ||D|| of a few units.
    IntegrateOptions opts;
    opts.step = std::min(step, 2.5e-4);
    const double h = 1e-3;
    GroupElement e{Mat::Identity(n, n), &table};
    Vec z_rec = table.rep_coords(affine_field_eval(table, cfg.drift, e));
    Mat d_rec(d, d);
    for (int i = 0; i < d; ++i) {
      GroupElement gi = exp_point(table, Vec::Unit(d, i));
      auto psi = [&](double t) {
        Mat at_g = affine_flow_direct(table, cfg.drift, t, gi, opts).m;
        Mat at_e = affine_flow_direct(table, cfg.drift, t, e, opts).m;
        return log_point(table, GroupElement{at_g * at_e.inverse(), &table});
      };
      d_rec.col(i) =
          (8.0 * (psi(h) - psi(-h)) - (psi(2 * h) - psi(-2 * h))) / (12.0 * h);
    }
    double res = std::max((d_rec - cfg.drift.D).norm(), (z_rec - cfg.drift.z).norm());
    push("fields", "decomposition uniqueness", res, 1e-6);
  }

  {
    double worst_backend = 0.0, worst_cocycle = 0.0, worst_indep = 0.0;
    std::uniform_int_distribution<int> segs(1, 3);
    for (int trial = 0; trial < 10; ++trial) {
      ControlFunction u = random_control(sys, 8, cfg.controls.dt, rng);
      GroupElement g = exp_point(table, random_vec(d, rng, 0.5));
      double t = cfg.controls.dt * segs(rng);
      GroupElement a = solve(sys, t, g, u, step, SolveBackend::Direct);
      GroupElement b = solve(sys, t, g, u, step, SolveBackend::Factored);
      worst_backend = std::max(worst_backend, (a.m - b.m).norm());
      double s = cfg.controls.dt * segs(rng);
      worst_cocycle = std::max(worst_cocycle, cocycle_residual(sys, t, s, g, u, step));

      ControlFunction u2 = random_control(sys, 8, cfg.controls.dt, rng);
      Mat expected = linear_system_solution(sys, t, u, step).m *
                     linear_system_solution(sys, t, u2, step).m.inverse();
      Mat ratio = solve(sys, t, g, u, step, SolveBackend::Direct).m *
                  solve(sys, t, g, u2, step, SolveBackend::Direct).m.inverse();
      worst_indep = std::max(worst_indep, (ratio - expected).norm());
    }
    push("systems", "direct vs factored", worst_backend, 1e-6);
    push("systems", "cocycle", worst_cocycle, 1e-6);
    push("systems", "control independence", worst_indep, 1e-6);
  }

  {
    DualDecomposition dual = dual_decomposition(table, cfg.drift, cfg.flow_options());
    EigenSplit split = eigen_split(dual.d_star, cfg.numerics.tol_zero);
    push("quotient", "grading", grading_check(table, split), 1e-8);
    double closure = check_n_closure(table, split);
    push("quotient", "n is a subalgebra", closure, 1e-8);
    UnimodularityReport uni = unimodularity_check(table, split, rng);
    if (uni.vacuous) {
      push("quotient", "unimodularity", 0.0, 1.0, "vacuous (trivial complement)");
    } else {
      push("quotient", "unimodularity trace", uni.max_trace_residual, 1e-10);
      push("quotient", "unimodularity modular", uni.max_modular_residual, 1e-8);
    }

    QuotientChart chart(cfg.table, split, dual.d_star, cfg.numerics.chart_radius);
    double worst_semi = 0.0;
    std::uniform_int_distribution<int> segs(2, 6);
    for (int trial = 0; trial < 10; ++trial) {
      GroupElement g = exp_point(table, random_vec(d, rng, 0.5));
      ControlFunction u = random_control(sys, 8, cfg.controls.dt, rng);
      double t = cfg.controls.dt * segs(rng) * 0.5;
      Vec lhs = chart.project(solve(sys, t, g, u, step, SolveBackend::Direct));
      Vec rhs = induced_solve(sys, chart, t, chart.project(g), u, step, SolveBackend::Direct);
      worst_semi = std::max(worst_semi, (lhs - rhs).norm());
    }
    push("quotient", "semiconjugation", worst_semi, 1e-6);

    if (split.n_basis.cols() > 0) {
      double worst_lift = 0.0;
      for (int trial = 0; trial < 5; ++trial) {
        GroupElement g = exp_point(table, random_vec(d, rng, 0.5));
        Vec shift_coords = split.n_basis * random_vec(static_cast<int>(split.n_basis.cols()), rng, 0.5);
        GroupElement shifted{g.m * exp_point(table, shift_coords).m, &table};
        ControlFunction u = random_control(sys, 8, cfg.controls.dt, rng);
        Vec a = chart.project(solve(sys, 1.0, g, u, step, SolveBackend::Direct));
        Vec b = chart.project(solve(sys, 1.0, shifted, u, step, SolveBackend::Direct));
        worst_lift = std::max(worst_lift, (a - b).norm());
      }
      push("quotient", "well-definedness", worst_lift, 1e-6);
    } else {
      push("quotient", "well-definedness", 0.0, 1.0, "vacuous (trivial complement)");
    }

    double predicted_rate = closed_form_entropy(dual.d_star, cfg.numerics.tol_zero);
    double worst_growth = 0.0;
    for (double tau : {0.5, 1.0, 2.0}) {
      double measured = volume_growth(chart, tau, cfg.numerics.volume_fd_step);
      double predicted = std::exp(tau * predicted_rate);
      worst_growth = std::max(worst_growth, std::abs(measured - predicted) / predicted);
    }
    push("quotient", "volume growth", worst_growth, 1e-4);
  }

  {
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      Mat D = random_derivation(deriv_basis, d, rng, 1.5);
      worst = std::max(worst,
                       std::abs(closed_form_entropy(D, cfg.numerics.tol_zero) -
                                topological_entropy_upper(D, cfg.numerics.tol_zero)));
    }
    push("entropy", "closed form = time-one map", worst, 1e-10);

    double worst_sim = 0.0;
    std::uniform_real_distribution<double> unif(-0.3, 0.3);
    for (int trial = 0; trial < 25; ++trial) {
      Mat D = random_derivation(deriv_basis, d, rng, 1.5);
      Mat S = Mat::Identity(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) S(r, c) += unif(rng);
      worst_sim = std::max(worst_sim, std::abs(closed_form_entropy(Mat(S * D * S.inverse())) -
                                               closed_form_entropy(D)));
    }
    push("entropy", "similarity invariance", worst_sim, 1e-9);
  }

  return rows;
}

}  // namespace liectrl
