#pragma once

#include <cmath>
#include <functional>

#include "liectrl/algebra.hpp"

namespace liectrl {

struct IntegrateOptions {
  double step = 1e-3;
  double blowup_norm = 1e6;       // hard state-norm bound; exceeding it reports escape
  int monitor_interval = 100;     // group-membership check cadence, 0 disables
  double projection_threshold = 1e-9;
  const LieAlgebra* table = nullptr;  // needed for membership monitoring
};

/// Classical fixed-step 4th-order integration of dg/dt = f(t, g) in the
/// matrix embedding, from t = 0 to t (either sign). The step count is
/// ceil(|t|/step) with the last step shortened. When a table is supplied the
/// group-membership residual is monitored and the state reprojected through
/// exp(log(.)) when it drifts.
template <typename F>
Mat rk4_integrate(Mat g, double t, F&& f, const IntegrateOptions& opts = {}) {
  if (t == 0.0) return g;
  if (!(opts.step > 0.0)) throw Error(ErrorCode::ValidationError, "integrator step must be > 0");
  const double dir = t > 0.0 ? 1.0 : -1.0;
  const double total = std::abs(t);
  const long nsteps = static_cast<long>(std::ceil(total / opts.step - 1e-12));
  double done = 0.0;
  for (long k = 0; k < nsteps; ++k) {
    double h = std::min(opts.step, total - done);
    double tk = dir * done;
    double hs = dir * h;
    Mat k1 = f(tk, g);
    Mat k2 = f(tk + 0.5 * hs, Mat(g + 0.5 * hs * k1));
    Mat k3 = f(tk + 0.5 * hs, Mat(g + 0.5 * hs * k2));
    Mat k4 = f(tk + hs, Mat(g + hs * k3));
    g += (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    done += h;
    if (g.cwiseAbs().maxCoeff() > opts.blowup_norm)
      throw Error(ErrorCode::StateEscape, "trajectory escaped the configured norm bound");
    if (opts.table && opts.monitor_interval > 0 && (k + 1) % opts.monitor_interval == 0) {
      if (opts.table->membership_residual(g) > opts.projection_threshold) {
        GroupElement ge{g, opts.table};
        g = exp_point(*opts.table, log_point(*opts.table, ge)).m;
      }
    }
  }
  return g;
}

}  // namespace liectrl
