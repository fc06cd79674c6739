#include "liectrl/fields.hpp"

#include <cmath>
#include <sstream>

namespace liectrl {

Mat linear_field_eval(const LieAlgebra& table, const LinearField& lf, const GroupElement& g) {
  Vec y = log_point(table, g);
  Vec w = dexp_apply(table, y, Vec(lf.D * y));
  return g.m * table.rep(w);
}

Mat affine_field_eval(const LieAlgebra& table, const AffineField& af, const GroupElement& g) {
  return linear_field_eval(table, LinearField{af.D}, g) + g.m * table.rep(af.z);
}

GroupElement linear_flow(const LieAlgebra& table, const LinearField& lf, double t,
                         const GroupElement& g) {
  Vec y = log_point(table, g);
  return exp_point(table, dense_expm(t * lf.D) * y);
}

GroupElement affine_flow_direct(const LieAlgebra& table, const AffineField& af, double t,
                                const GroupElement& g, const IntegrateOptions& opts) {
  IntegrateOptions local = opts;
  local.table = &table;
  Mat result = rk4_integrate(
      g.m, t,
      [&](double, const Mat& state) {
        return affine_field_eval(table, af, GroupElement{state, &table});
      },
      local);
  return {result, &table};
}

double backend_tolerance(double step, double t, double state_norm) {
  return 10.0 * std::pow(step, 4) * std::max(std::abs(t), 1.0) * std::max(1.0, state_norm);
}

GroupElement affine_flow(const LieAlgebra& table, const AffineField& af, double t,
                         const GroupElement& g, double step) {
  IntegrateOptions opts;
  opts.step = step;
  GroupElement direct = affine_flow_direct(table, af, t, g, opts);

  GroupElement at_e = affine_flow_direct(
      table, af, t, GroupElement{Mat::Identity(table.rep_dim(), table.rep_dim()), &table}, opts);
  GroupElement psi = linear_flow(table, LinearField{af.D}, t, g);
  Mat factored = psi.m * at_e.m;

  double res = (direct.m - factored).norm();
  double tol = backend_tolerance(step, t, direct.m.norm());
  if (res > tol) {
    std::ostringstream os;
    os << "drift-flow backends disagree: residual " << res << " > " << tol
       << " at t=" << t << ", step=" << step;
    throw Error(ErrorCode::StepTooLarge, os.str());
  }
  return direct;
}

DualDecomposition dual_decomposition(const LieAlgebra& table, const AffineField& af,
                                     const FlowOptions& opts) {
  DerivationCheck dc = is_derivation(table, af.D);
  if (!dc.ok) {
    std::ostringstream os;
    os << "drift D is not a derivation (Leibniz residual " << dc.residual << ")";
    throw Error(ErrorCode::ValidationError, os.str());
  }

  DualDecomposition out;
  out.y = af.z;

  Mat ad_z = table.ad(af.z);
  if (ad_z.cwiseAbs().maxCoeff() < 1e-14) {
    out.d_star = af.D;
    out.sign = 1;
    out.oracle_residual = 0.0;
    out.rejected_residual = 0.0;
    return out;
  }

  // alpha_1(e) by integration, then a finite-difference probe of the
  // differential at e of g -> a^{-1} psi_1(g) a.
  IntegrateOptions iopts;
  iopts.step = opts.step;
  iopts.blowup_norm = opts.blowup_norm;
  const int n = table.rep_dim();
  GroupElement at_e =
      affine_flow_direct(table, af, 1.0, GroupElement{Mat::Identity(n, n), &table}, iopts);
  Mat a = at_e.m;
  Mat a_inv = a.inverse();

  const int d = table.dim();
  Mat exp_d = dense_expm(af.D);
  Mat fd(d, d);
  const double h = opts.fd_step;
  for (int i = 0; i < d; ++i) {
    Vec dir = Vec::Unit(d, i);
    auto probe = [&](double s) {
      // psi_1(exp(s e_i)) = exp(e^D s e_i), then conjugate by alpha_1(e).
      GroupElement conj{a_inv * exp_point(table, Vec(exp_d * (s * dir))).m * a, &table};
      return log_point(table, conj);
    };
    fd.col(i) = (probe(h) - probe(-h)) / (2.0 * h);
  }

  double res_plus = (fd - dense_expm(Mat(af.D + ad_z)).eval()).norm();
  double res_minus = (fd - dense_expm(Mat(af.D - ad_z)).eval()).norm();
  bool plus_ok = res_plus < opts.oracle_tol;
  bool minus_ok = res_minus < opts.oracle_tol;

  if (plus_ok && minus_ok)
    throw Error(ErrorCode::ConventionAmbiguity,
                "both sign candidates pass the flow-differential oracle with ad(z) != 0");
  if (!plus_ok && !minus_ok) {
    std::ostringstream os;
    os << "neither sign candidate passes the flow-differential oracle (residuals " << res_plus
       << ", " << res_minus << "); integrator or step problem";
    throw Error(ErrorCode::ConventionAmbiguity, os.str());
  }

  out.sign = plus_ok ? 1 : -1;
  out.d_star = af.D + (plus_ok ? 1.0 : -1.0) * ad_z;
  out.oracle_residual = plus_ok ? res_plus : res_minus;
  out.rejected_residual = plus_ok ? res_minus : res_plus;

  DerivationCheck star_check = is_derivation(table, out.d_star, 1e-10);
  if (!star_check.ok) {
    std::ostringstream os;
    os << "locked D* fails the Leibniz rule (residual " << star_check.residual << ")";
    throw Error(ErrorCode::ValidationError, os.str());
  }
  return out;
}

double conjugation_identity_residual(const LieAlgebra& table, const AffineField& af, double t,
                                     const GroupElement& g, double step) {
  FlowOptions fopts;
  fopts.step = step;
  DualDecomposition dual = dual_decomposition(table, af, fopts);

  IntegrateOptions iopts;
  iopts.step = step;
  const int n = table.rep_dim();
  GroupElement at_e =
      affine_flow_direct(table, af, t, GroupElement{Mat::Identity(n, n), &table}, iopts);

  GroupElement psi = linear_flow(table, LinearField{af.D}, t, g);
  GroupElement psi_star = linear_flow(table, LinearField{dual.d_star}, t, g);
  Mat conj = at_e.m * psi_star.m * at_e.m.inverse();
  return (psi.m - conj).norm();
}

}  // namespace liectrl
