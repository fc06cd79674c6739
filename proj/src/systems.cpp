#include "liectrl/systems.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace liectrl {

namespace {

long substeps_per_segment(double dt, double step) {
  long n = std::lround(dt / step);
  if (n < 1 || std::abs(n * step - dt) > 1e-9 * std::max(1.0, dt)) {
    std::ostringstream os;
    os << "integrator step " << step << " must divide the control interval " << dt;
    throw Error(ErrorCode::ValidationError, os.str());
  }
  return n;
}

std::string cache_key(const AffineField& drift, const Mat& g, double step) {
  std::string key(reinterpret_cast<const char*>(g.data()), sizeof(double) * g.size());
  key.append(reinterpret_cast<const char*>(drift.D.data()), sizeof(double) * drift.D.size());
  key.append(reinterpret_cast<const char*>(drift.z.data()), sizeof(double) * drift.z.size());
  key.append(reinterpret_cast<const char*>(&step), sizeof(double));
  return key;
}

// Integrates dg/dt = rhs(g, v) over [0, t] with the control held segmentwise
// constant, keeping RK4 stages clear of switching times.
template <typename Rhs>
Mat integrate_with_control(const LieAlgebra& table, Mat g, double t, const ControlFunction& u,
                           double step, Rhs&& rhs) {
  if (t < -1e-12) throw Error(ErrorCode::ValidationError, "solve requires t >= 0");
  if (t > u.horizon() + 1e-9)
    throw Error(ErrorCode::ValidationError, "requested time exceeds the control horizon");
  substeps_per_segment(u.dt(), step);  // validate alignment
  IntegrateOptions opts;
  opts.step = step;
  opts.table = &table;
  double done = 0.0;
  int seg = 0;
  while (done < t - 1e-12) {
    double seg_end = std::min((seg + 1) * u.dt(), t);
    double span = seg_end - done;
    if (span > 1e-12) {
      Vec v = u.value_at(done + 0.5 * std::min(span, u.dt()));
      g = rk4_integrate(
          g, span, [&](double, const Mat& state) { return rhs(state, v); }, opts);
    }
    done = seg_end;
    ++seg;
  }
  return g;
}

}  // namespace

bool ControlRange::contains(const Vec& v, double slack) const {
  if (v.size() != lo.size()) return false;
  for (int j = 0; j < v.size(); ++j)
    if (v(j) < lo(j) - slack || v(j) > hi(j) + slack) return false;
  return true;
}

void ControlRange::validate() const {
  if (lo.size() != hi.size())
    throw Error(ErrorCode::DimensionMismatch, "control range bounds differ in length");
  for (int j = 0; j < lo.size(); ++j) {
    if (!(lo(j) < 0.0) || !(hi(j) > 0.0)) {
      std::ostringstream os;
      os << "0 not interior to the control range on channel " << j + 1 << " (lo=" << lo(j)
         << ", hi=" << hi(j) << ")";
      throw Error(ErrorCode::ValidationError, os.str());
    }
  }
}

ControlFunction::ControlFunction(double dt, Mat values) : dt_(dt), values_(std::move(values)) {
  if (!(dt_ > 0.0)) throw Error(ErrorCode::ValidationError, "control interval must be > 0");
}

Vec ControlFunction::value_at(double t) const {
  if (segments() == 0) throw Error(ErrorCode::ValidationError, "empty control function");
  if (t < -1e-12) throw Error(ErrorCode::ValidationError, "control evaluated at negative time");
  int k = static_cast<int>(std::floor(t / dt_ + 1e-12));
  if (k >= segments()) k = segments() - 1;
  return values_.col(k);
}

ControlFunction ControlFunction::shift(double t) const {
  if (t < -1e-12) throw Error(ErrorCode::NonAlignedShift, "shift requires t >= 0");
  long k = std::lround(t / dt_);
  if (std::abs(k * dt_ - t) > 1e-9 * std::max(1.0, dt_))
    throw Error(ErrorCode::NonAlignedShift, "shift time is not a multiple of the control interval");
  if (k > segments()) k = segments();
  return ControlFunction(dt_, values_.rightCols(segments() - k));
}

void AffineSystem::validate() const {
  if (!table) throw Error(ErrorCode::ValidationError, "system has no algebra table");
  range.validate();
  if (static_cast<int>(control_dirs.size()) != range.channels())
    throw Error(ErrorCode::DimensionMismatch, "control direction count must match range channels");
  for (const Vec& b : control_dirs)
    if (b.size() != table->dim())
      throw Error(ErrorCode::DimensionMismatch, "control direction has wrong algebra dimension");
  DerivationCheck dc = is_derivation(*table, drift.D);
  if (!dc.ok) {
    std::ostringstream os;
    os << "drift D is not a derivation (Leibniz residual " << dc.residual << ")";
    throw Error(ErrorCode::ValidationError, os.str());
  }
}

GroupElement AffineSystem::identity() const {
  return {Mat::Identity(table->rep_dim(), table->rep_dim()), table.get()};
}

Mat AlphaCache::alpha(const AffineSystem& sys, const GroupElement& g, double t, double step) {
  if (t < -1e-12) throw Error(ErrorCode::ValidationError, "alpha cache covers t >= 0 only");
  const LieAlgebra& table = sys.alg();
  long ticks = static_cast<long>(std::floor(t / step + 1e-9));
  double remainder = t - ticks * step;

  std::unique_lock<std::mutex> lock(mu_);
  Entry& entry = map_[cache_key(sys.drift, g.m, step)];
  if (entry.grid.empty()) entry.grid.push_back(g.m);
  IntegrateOptions opts;
  opts.step = step;
  opts.table = &table;
  while (static_cast<long>(entry.grid.size()) <= ticks) {
    Mat next = rk4_integrate(
        entry.grid.back(), step,
        [&](double, const Mat& state) {
          return affine_field_eval(table, sys.drift, GroupElement{state, &table});
        },
        opts);
    entry.grid.push_back(std::move(next));
  }
  Mat at_tick = entry.grid[ticks];
  lock.unlock();

  if (remainder < 1e-12) return at_tick;
  return rk4_integrate(
      at_tick, remainder,
      [&](double, const Mat& state) {
        return affine_field_eval(table, sys.drift, GroupElement{state, &table});
      },
      opts);
}

std::size_t AlphaCache::entries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return map_.size();
}

GroupElement linear_system_solution(const AffineSystem& sys, double t, const ControlFunction& u,
                                    double step) {
  const LieAlgebra& table = sys.alg();
  LinearField lin{sys.drift.D};
  std::vector<Mat> dir_reps;
  dir_reps.reserve(sys.control_dirs.size());
  for (const Vec& b : sys.control_dirs) dir_reps.push_back(table.rep(b));

  Mat out = integrate_with_control(
      table, Mat(Mat::Identity(table.rep_dim(), table.rep_dim())), t, u, step,
      [&](const Mat& state, const Vec& v) {
        Mat f = linear_field_eval(table, lin, GroupElement{state, &table});
        for (std::size_t j = 0; j < dir_reps.size(); ++j) f += v(j) * dir_reps[j] * state;
        return f;
      });
  return {out, &table};
}

GroupElement solve(const AffineSystem& sys, double t, const GroupElement& g,
                   const ControlFunction& u, double step, SolveBackend backend,
                   AlphaCache* cache) {
  const LieAlgebra& table = sys.alg();
  if (u.channels() != sys.channels())
    throw Error(ErrorCode::DimensionMismatch, "control has wrong channel count");
  for (int s = 0; s < u.segments(); ++s)
    if (!sys.range.contains(u.values().col(s)))
      throw Error(ErrorCode::ValidationError, "control value outside the admissible range");

  auto run_direct = [&]() {
    std::vector<Mat> dir_reps;
    dir_reps.reserve(sys.control_dirs.size());
    for (const Vec& b : sys.control_dirs) dir_reps.push_back(table.rep(b));
    Mat out = integrate_with_control(table, g.m, t, u, step, [&](const Mat& state, const Vec& v) {
      Mat f = affine_field_eval(table, sys.drift, GroupElement{state, &table});
      for (std::size_t j = 0; j < dir_reps.size(); ++j) f += v(j) * dir_reps[j] * state;
      return f;
    });
    return GroupElement{out, &table};
  };

  auto run_factored = [&]() {
    GroupElement phi = linear_system_solution(sys, t, u, step);
    Mat alpha_g;
    if (cache) {
      alpha_g = cache->alpha(sys, g, t, step);
    } else {
      IntegrateOptions opts;
      opts.step = step;
      alpha_g = affine_flow_direct(table, sys.drift, t, g, opts).m;
    }
    return GroupElement{phi.m * alpha_g, &table};
  };

  switch (backend) {
    case SolveBackend::Direct:
      return run_direct();
    case SolveBackend::Factored:
      return run_factored();
    case SolveBackend::CrossCheck: {
      GroupElement a = run_direct();
      GroupElement b = run_factored();
      double res = (a.m - b.m).norm();
      double tol = backend_tolerance(step, t, a.m.norm());
      if (res > tol) {
        std::ostringstream os;
        os << "direct and factored solutions disagree: residual " << res << " > " << tol
           << " at t=" << t;
        throw Error(ErrorCode::BackendMismatch, os.str());
      }
      return a;
    }
  }
  throw Error(ErrorCode::ValidationError, "unknown solve backend");
}

double cocycle_residual(const AffineSystem& sys, double t, double s, const GroupElement& g,
                        const ControlFunction& u, double step) {
  GroupElement lhs = solve(sys, t + s, g, u, step, SolveBackend::Direct);
  GroupElement mid = solve(sys, s, g, u, step, SolveBackend::Direct);
  GroupElement rhs = solve(sys, t, mid, u.shift(s), step, SolveBackend::Direct);
  return (lhs.m - rhs.m).norm();
}

}  // namespace liectrl
