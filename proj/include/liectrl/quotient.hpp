#pragma once

#include <complex>
#include <memory>
#include <random>
#include <vector>

#include "liectrl/systems.hpp"

namespace liectrl {

/// Real invariant-subspace data for one eigenvalue cluster of a derivation.
struct EigenBlock {
  std::complex<double> eigenvalue;  // representative, Im >= 0
  int multiplicity = 0;             // algebraic, conjugate counted
  Mat basis;                        // d x multiplicity, orthonormal columns
  double invariance_residual = 0.0;
};

/// Splitting of the algebra into the nonnegative-real-part subalgebra and the
/// negative-real-part nilpotent complement, with per-eigenvalue blocks.
struct EigenSplit {
  std::vector<EigenBlock> blocks;  // sorted by descending Re
  Mat plus_zero_basis;             // d x p
  Mat n_basis;                     // d x q, p + q = d
  double joint_condition = 1.0;
  double n_closure_residual = 0.0;  // only meaningful once checked against a table
};

/// Invariant-subspace split of D* ordered by the sign of the real part.
/// Eigenvalues with |Re| < tol_zero count as zero and stay on the
/// nonnegative side.
EigenSplit eigen_split(const Mat& d_star, double tol_zero = 1e-10, double cluster_tol = 1e-6);

/// Checks the subalgebra closure of n against the table's bracket and stores
/// the residual in the split. Returns the residual.
double check_n_closure(const LieAlgebra& table, EigenSplit& split);

/// Max residual of [block_i, block_j] against the block of the summed
/// eigenvalue (zero when the sum is not an eigenvalue).
double grading_check(const LieAlgebra& table, const EigenSplit& split, double match_tol = 1e-6);

struct UnimodularityReport {
  bool vacuous = false;
  int samples = 0;
  double max_trace_residual = 0.0;
  double max_modular_residual = 0.0;
  bool pass = true;
};

/// Samples random elements of n and checks trace(ad) = 0 and |det Ad(exp)| = 1.
UnimodularityReport unimodularity_check(const LieAlgebra& table, const EigenSplit& split,
                                        std::mt19937_64& rng, int samples = 50);

/// Coordinates of the second kind adapted to a split: g = exp(a-part) * exp(n-part),
/// quotient coordinate = a. Global chart on the catalog (exponential) groups.
class QuotientChart {
public:
  QuotientChart(std::shared_ptr<const LieAlgebra> table, EigenSplit split, Mat d_star,
                double domain_radius = 50.0);

  int quotient_dim() const { return static_cast<int>(split_.plus_zero_basis.cols()); }
  const EigenSplit& split() const { return split_; }
  const Mat& d_star() const { return d_star_; }
  const LieAlgebra& alg() const { return *table_; }

  /// Splits g into chart coordinates (a, n). Newton iteration on the a-part.
  std::pair<Vec, Vec> factorize(const GroupElement& g) const;

  Vec project(const GroupElement& g) const { return factorize(g).first; }
  GroupElement lift(const Vec& a) const;

  /// Quotient coordinates of the dual automorphism flow through lift(a).
  Vec dual_flow_coords(double tau, const Vec& a) const;

private:
  Vec plus_coords(const Vec& w) const;  // coefficients on the plus/zero basis
  Vec split_solve(const Vec& w) const;  // full coefficients on [B+ | Bn]

  std::shared_ptr<const LieAlgebra> table_;
  EigenSplit split_;
  Mat d_star_;
  double domain_radius_;
  Eigen::ColPivHouseholderQR<Mat> joint_qr_;
};

/// Quotient solution: lift, solve on the group, project.
Vec induced_solve(const AffineSystem& sys, const QuotientChart& chart, double t, const Vec& x,
                  const ControlFunction& u, double step,
                  SolveBackend backend = SolveBackend::Factored, AlphaCache* cache = nullptr);

/// |det| of the finite-difference Jacobian of the induced dual flow at the
/// identity coset. Throws FDConditioning when one-sided estimates disagree.
double volume_growth(const QuotientChart& chart, double tau, double h_fd = 1e-5);

}  // namespace liectrl
