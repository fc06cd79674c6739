#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "liectrl/fields.hpp"

namespace liectrl {

/// Box control range with 0 strictly interior.
struct ControlRange {
  Vec lo;
  Vec hi;

  int channels() const { return static_cast<int>(lo.size()); }
  bool contains(const Vec& v, double slack = 1e-12) const;
  void validate() const;  // throws ValidationError unless lo_j < 0 < hi_j
};

/// Piecewise-constant control: value k holds on [k dt, (k+1) dt).
class ControlFunction {
public:
  ControlFunction(double dt, Mat values);

  double dt() const { return dt_; }
  int segments() const { return static_cast<int>(values_.cols()); }
  int channels() const { return static_cast<int>(values_.rows()); }
  double horizon() const { return dt_ * segments(); }
  const Mat& values() const { return values_; }

  Vec value_at(double t) const;

  /// Drops the first t/dt segments; t must be a nonnegative multiple of dt.
  ControlFunction shift(double t) const;

private:
  double dt_;
  Mat values_;
};

/// Affine drift plus right-invariant control directions over a box range.
struct AffineSystem {
  std::shared_ptr<const LieAlgebra> table;
  AffineField drift;
  std::vector<Vec> control_dirs;
  ControlRange range;

  const LieAlgebra& alg() const { return *table; }
  int channels() const { return static_cast<int>(control_dirs.size()); }
  void validate() const;
  GroupElement identity() const;
};

enum class SolveBackend { Direct, Factored, CrossCheck };

/// Cache of drift-flow trajectories keyed by initial state; shared across
/// solves for different controls. Thread-safe insert-if-absent.
class AlphaCache {
public:
  /// alpha_t(g) for t >= 0, extending the cached step-grid trajectory as needed.
  Mat alpha(const AffineSystem& sys, const GroupElement& g, double t, double step);

  std::size_t entries() const;

private:
  struct Entry {
    std::vector<Mat> grid;  // grid[k] = alpha at k*step
  };
  mutable std::mutex mu_;
  std::unordered_map<std::string, Entry> map_;
};

/// Solution of the control system at time t from g under control u.
///
/// Direct integrates the full right-hand side; Factored integrates the
/// control-dependent part only from the identity and right-translates the
/// cached drift solution; CrossCheck runs both and insists they agree.
GroupElement solve(const AffineSystem& sys, double t, const GroupElement& g,
                   const ControlFunction& u, double step,
                   SolveBackend backend = SolveBackend::Factored, AlphaCache* cache = nullptr);

/// Identity-based solution of the associated control system with the purely
/// linear drift (the control-dependent factor of the factorized solution).
GroupElement linear_system_solution(const AffineSystem& sys, double t, const ControlFunction& u,
                                    double step);

/// || phi(t+s, g, u) - phi(t, phi(s, g, u), shift(u, s)) ||.
double cocycle_residual(const AffineSystem& sys, double t, double s, const GroupElement& g,
                        const ControlFunction& u, double step);

}  // namespace liectrl
