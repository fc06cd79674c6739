#pragma once

#include "liectrl/algebra.hpp"
#include "liectrl/integrate.hpp"

namespace liectrl {

/// Vector field whose flow is a one-parameter group of automorphisms,
/// parametrized by its derivation matrix on the algebra.
struct LinearField {
  Mat D;
};

/// Drift field parametrized by the derivation of its vanishing-at-identity
/// part and the identity value z of its left-invariant part.
struct AffineField {
  Mat D;
  Vec z;
};

/// Right decomposition data for an AffineField: the derivation of the linear
/// part in F = X* + Y, the identity value of the right-invariant part, the
/// numerically locked sign in D* = D + sign * ad(z), and the oracle residuals
/// for the accepted and rejected sign.
struct DualDecomposition {
  Mat d_star;
  Vec y;
  int sign = 1;
  double oracle_residual = 0.0;
  double rejected_residual = 0.0;
};

struct FlowOptions {
  double step = 1e-3;
  double fd_step = 1e-4;        // finite-difference step for the sign oracle
  double oracle_tol = 1e-4;     // accepted sign must pass below this
  double blowup_norm = 1e6;
};

/// Value of the linear field at g, as a tangent matrix in the embedding.
/// Vanishes at the identity.
Mat linear_field_eval(const LieAlgebra& table, const LinearField& lf, const GroupElement& g);

/// Value of the affine field at g: linear part plus the left-invariant part
/// g * rep(z).
Mat affine_field_eval(const LieAlgebra& table, const AffineField& af, const GroupElement& g);

/// Computes (D*, y) for the right decomposition, locking the sign convention
/// against a finite-difference probe of the conjugated flow at the identity.
DualDecomposition dual_decomposition(const LieAlgebra& table, const AffineField& af,
                                     const FlowOptions& opts = {});

/// Automorphism flow: exp(e^{tD} log g).
GroupElement linear_flow(const LieAlgebra& table, const LinearField& lf, double t,
                         const GroupElement& g);

/// Drift flow by direct integration, cross-checked against the factorized
/// expression psi_t(g) * alpha_t(e). Throws StepTooLarge when the two
/// backends disagree beyond the step-order tolerance.
GroupElement affine_flow(const LieAlgebra& table, const AffineField& af, double t,
                         const GroupElement& g, double step);

/// Drift flow without the cross-check (internal fast path).
GroupElement affine_flow_direct(const LieAlgebra& table, const AffineField& af, double t,
                                const GroupElement& g, const IntegrateOptions& opts);

/// || psi_t(g) - a psi*_t(g) a^{-1} || with a = alpha_t(e).
double conjugation_identity_residual(const LieAlgebra& table, const AffineField& af, double t,
                                     const GroupElement& g, double step);

/// Tolerance used for backend agreement: 10 * step^4 per unit time, floored
/// at one unit and scaled by the state magnitude.
double backend_tolerance(double step, double t, double state_norm);

}  // namespace liectrl
