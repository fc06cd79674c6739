#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "liectrl/quotient.hpp"
#include "liectrl/systems.hpp"

namespace liectrl {

/// Sum of the positive real parts of the eigenvalues (with multiplicity);
/// real parts below tol_zero in magnitude count as zero.
double closed_form_entropy(const Mat& d_star, double tol_zero = 1e-10);

/// Sum of log|beta| over eigenvalues beta of exp(D*) outside the unit circle,
/// computed through the actual matrix exponential.
double topological_entropy_upper(const Mat& d_star, double tol_zero = 1e-10);

/// Compact K (sampled on a grid) and compact Q, both boxes in coordinates,
/// with the neighborhood radii and horizons of the estimate.
struct AdmissiblePair {
  Vec k_lo, k_hi;
  Vec k_spacing;             // per-axis grid spacing
  Vec q_lo, q_hi;
  std::vector<double> eps;   // neighborhood radii
  std::vector<double> tau;   // increasing horizons

  void validate(int expected_dim) const;
  std::vector<Vec> sample_points() const;
};

struct CandidateOptions {
  int levels = 5;            // lattice levels per channel, spanning the range
  double dt = 0.25;          // switching interval
  int cap = 5000;            // reservoir cap on the family size
  std::uint64_t seed = 0;
  int random_count = 1500;   // uniform lattice draws added to the family
  bool anchors = true;       // synthesize feedback-driven members from the K grid
  int anchor_stride = 1;
  int anchor_substeps = 8;   // integration substeps per segment during synthesis
};

/// Piecewise-constant lattice-valued control family: one-step-greedy
/// quantized feedback members anchored at K grid points, plus uniform random
/// lattice members, reservoir-capped at opts.cap.
std::vector<ControlFunction> build_candidates(const AffineSystem& sys, const AdmissiblePair& pair,
                                              double horizon, const CandidateOptions& opts);

struct NumericsOptions {
  double step = 1e-3;
  int thinning = 10;         // in-Q checks every thinning-th integrator step
  int threads = 0;           // 0 = hardware concurrency
  double blowup_norm = 1e6;
};

struct AdmissibilityReport {
  struct Row {
    int sample;
    int best_control;   // -1 when no candidate stays in Q over the horizon
    double exit_time;   // of the best control (infinity-like horizon+tick when it never exits)
    bool pass;
  };
  std::vector<Row> rows;
  bool all_pass = true;
  double horizon = 0.0;
};

/// Finite-horizon, finite-family surrogate of admissibility: a FAIL does not
/// prove the pair inadmissible, only that no candidate keeps that sample in Q.
AdmissibilityReport admissibility_check(const AffineSystem& sys, const AdmissiblePair& pair,
                                        const std::vector<ControlFunction>& candidates,
                                        double horizon, const NumericsOptions& opts = {});

/// Minimal-cardinality estimate of a (tau, eps, K, Q)-spanning subfamily:
/// exact search when the family has at most 20 members, greedy set cover
/// otherwise (deterministic lowest-index tie break). Throws Uncoverable when
/// some sample is covered by no candidate.
int spanning_count(const AffineSystem& sys, const AdmissiblePair& pair, double tau, double eps,
                   const std::vector<ControlFunction>& candidates,
                   const NumericsOptions& opts = {});

struct EntropyResult {
  double closed_form = 0.0;
  double upper_bound_top = 0.0;

  struct Row {
    double tau;
    double eps;
    long r;
    double ln_r_over_tau;
  };
  std::vector<Row> rows;

  struct Fit {
    double eps;
    double slope;
    double r_squared;
  };
  std::vector<Fit> fits;

  double empirical_slope = 0.0;  // slope at the smallest eps
  double r_squared = 0.0;
  bool monotone_in_tau = true;
  bool monotone_in_eps = true;
  bool imaginary_eigenvalues = false;
  AdmissibilityReport admissibility;
};

/// Regression estimate of the entropy: ln r against tau per eps, final slope
/// at the smallest eps. Requires every sample covered at every horizon.
EntropyResult entropy_estimate(const AffineSystem& sys, const AdmissiblePair& pair,
                               const std::vector<ControlFunction>& candidates,
                               const NumericsOptions& opts = {});

/// Same estimate on the induced quotient system; the pair is stated in chart
/// coordinates and trajectories are projected before the box checks.
EntropyResult entropy_estimate_induced(const AffineSystem& sys, const QuotientChart& chart,
                                       const AdmissiblePair& pair,
                                       const std::vector<ControlFunction>& candidates,
                                       const NumericsOptions& opts = {});

// Cover-problem helpers (exposed for the small-instance oracle tests).
int greedy_cover(const std::vector<std::vector<std::uint64_t>>& masks, int n_samples,
                 std::vector<int>* chosen = nullptr, std::vector<int>* uncovered = nullptr);
int exact_min_cover(const std::vector<std::vector<std::uint64_t>>& masks, int n_samples);

/// Least-squares slope of y against x with its R^2 (1.0 for a zero-variance fit).
std::pair<double, double> regression_slope(const std::vector<double>& x,
                                           const std::vector<double>& y);

}  // namespace liectrl
