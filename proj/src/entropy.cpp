#include "liectrl/entropy.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace liectrl {

namespace {

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

constexpr std::uint16_t kNeverExits = 0xffff;

/// Exit ticks of every (candidate, sample) trajectory out of each inflated
/// target box. Slot usage is up to the caller; slot radius 0 means Q itself.
struct SurvivalTable {
  int n_samples = 0;
  int n_candidates = 0;
  int n_ticks = 0;     // state checked at ticks 0..n_ticks
  double tick_dt = 0.0;
  std::vector<double> eps_slots;
  std::vector<std::vector<std::uint16_t>> exit_tick;  // [slot][cand * n_samples + sample]

  int tick_of(double tau) const {
    long k = std::lround(tau / tick_dt);
    if (std::abs(k * tick_dt - tau) > 1e-9)
      throw Error(ErrorCode::ValidationError,
                  "horizon is not aligned with the in-Q sampling grid");
    return static_cast<int>(k);
  }

  bool covered(int slot, int cand, int sample, int tau_tick) const {
    return exit_tick[slot][static_cast<std::size_t>(cand) * n_samples + sample] > tau_tick;
  }
};

SurvivalTable compute_survival(const AffineSystem& sys, const std::vector<GroupElement>& samples,
                               const std::function<Vec(const Mat&)>& coords, const Vec& q_lo,
                               const Vec& q_hi, const std::vector<double>& eps_slots,
                               double tau_max, const std::vector<ControlFunction>& candidates,
                               const NumericsOptions& opts) {
  const LieAlgebra& table = sys.alg();
  const double step = opts.step;
  const long total_steps = std::lround(tau_max / step);
  if (std::abs(total_steps * step - tau_max) > 1e-9)
    throw Error(ErrorCode::ValidationError, "tau_max must be a multiple of the integrator step");
  if (total_steps % opts.thinning != 0)
    throw Error(ErrorCode::ValidationError, "tau_max must be a multiple of step * thinning");

  SurvivalTable out;
  out.n_samples = static_cast<int>(samples.size());
  out.n_candidates = static_cast<int>(candidates.size());
  out.tick_dt = step * opts.thinning;
  out.n_ticks = static_cast<int>(total_steps / opts.thinning);
  out.eps_slots = eps_slots;
  if (out.n_ticks + 1 >= kNeverExits)
    throw Error(ErrorCode::ValidationError, "too many in-Q sample times for the survival table");

  const int n = table.rep_dim();
  const int n_slots = static_cast<int>(eps_slots.size());

  IntegrateOptions iopts;
  iopts.step = step;
  iopts.blowup_norm = opts.blowup_norm;
  iopts.table = &table;

  // Drift trajectories of every sample at the tick grid.
  std::vector<std::vector<Mat>> alpha(samples.size());
  parallel_for(out.n_samples, opts.threads, [&](int s) {
    std::vector<Mat> traj;
    traj.reserve(out.n_ticks + 1);
    Mat g = samples[s].m;
    traj.push_back(g);
    for (int k = 0; k < out.n_ticks; ++k) {
      g = rk4_integrate(
          g, out.tick_dt,
          [&](double, const Mat& state) {
            return affine_field_eval(table, sys.drift, GroupElement{state, &table});
          },
          iopts);
      traj.push_back(g);
    }
    alpha[s] = std::move(traj);
  });

  out.exit_tick.assign(n_slots,
                       std::vector<std::uint16_t>(
                           static_cast<std::size_t>(out.n_samples) * out.n_candidates, kNeverExits));

  LinearField lin{sys.drift.D};
  std::vector<Mat> dir_reps;
  for (const Vec& b : sys.control_dirs) dir_reps.push_back(table.rep(b));

  parallel_for(out.n_candidates, opts.threads, [&](int c) {
    const ControlFunction& u = candidates[c];
    // Control factor of the factorized solution along the tick grid.
    std::vector<Mat> phi;
    phi.reserve(out.n_ticks + 1);
    Mat g = Mat::Identity(n, n);
    phi.push_back(g);
    bool escaped = false;
    int escape_tick = out.n_ticks + 1;
    for (int k = 0; k < out.n_ticks && !escaped; ++k) {
      double t0 = k * out.tick_dt;
      try {
        for (int s = 0; s < opts.thinning; ++s) {
          Vec v = u.value_at(t0 + (s + 0.5) * step);
          g = rk4_integrate(
              g, step,
              [&](double, const Mat& state) {
                Mat f = linear_field_eval(table, lin, GroupElement{state, &table});
                for (std::size_t j = 0; j < dir_reps.size(); ++j) f += v(j) * dir_reps[j] * state;
                return f;
              },
              iopts);
        }
        phi.push_back(g);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::StateEscape) throw;
        escaped = true;
        escape_tick = k + 1;
      }
    }

    const int usable_ticks = escaped ? escape_tick - 1 : out.n_ticks;
    for (int s = 0; s < out.n_samples; ++s) {
      const std::size_t idx = static_cast<std::size_t>(c) * out.n_samples + s;
      int alive = n_slots;  // slots with no exit recorded yet
      std::vector<bool> open(n_slots, true);
      for (int k = 0; k <= out.n_ticks && alive > 0; ++k) {
        if (k > usable_ticks) {
          for (int slot = 0; slot < n_slots; ++slot)
            if (open[slot]) out.exit_tick[slot][idx] = static_cast<std::uint16_t>(k);
          break;
        }
        Vec x;
        try {
          x = coords(phi[k] * alpha[s][k]);
        } catch (const Error&) {
          // Outside the chart's validated ball: certainly outside the target.
          for (int slot = 0; slot < n_slots; ++slot)
            if (open[slot]) out.exit_tick[slot][idx] = static_cast<std::uint16_t>(k);
          break;
        }
        for (int slot = 0; slot < n_slots; ++slot) {
          if (!open[slot]) continue;
          double e = eps_slots[slot];
          bool inside = true;
          for (int i = 0; i < x.size() && inside; ++i)
            inside = x(i) >= q_lo(i) - e - 1e-12 && x(i) <= q_hi(i) + e + 1e-12;
          if (!inside) {
            out.exit_tick[slot][idx] = static_cast<std::uint16_t>(k);
            open[slot] = false;
            --alive;
          }
        }
      }
    }
  });
  return out;
}

std::vector<std::vector<std::uint64_t>> cover_masks(const SurvivalTable& table, int slot,
                                                    int tau_tick) {
  const int words = (table.n_samples + 63) / 64;
  std::vector<std::vector<std::uint64_t>> masks(table.n_candidates,
                                                std::vector<std::uint64_t>(words, 0));
  for (int c = 0; c < table.n_candidates; ++c)
    for (int s = 0; s < table.n_samples; ++s)
      if (table.covered(slot, c, s, tau_tick)) masks[c][s / 64] |= 1ull << (s % 64);
  return masks;
}

int count_cover(const SurvivalTable& table, int slot, double tau, int n_candidates_exact_limit,
                std::vector<int>* uncovered_out) {
  int tick = table.tick_of(tau);
  auto masks = cover_masks(table, slot, tick);
  std::vector<int> uncovered;
  int r;
  if (table.n_candidates <= n_candidates_exact_limit) {
    r = exact_min_cover(masks, table.n_samples);
    if (r < 0) {
      // Collect the uncoverable samples for the error report.
      greedy_cover(masks, table.n_samples, nullptr, &uncovered);
    }
  } else {
    r = greedy_cover(masks, table.n_samples, nullptr, &uncovered);
  }
  if (!uncovered.empty() || r < 0) {
    if (uncovered_out) {
      *uncovered_out = uncovered;
      return -1;
    }
    std::ostringstream os;
    os << uncovered.size() << " samples covered by no candidate at tau=" << tau
       << " (first: sample " << (uncovered.empty() ? -1 : uncovered.front()) << ")";
    throw Error(ErrorCode::Uncoverable, os.str());
  }
  if (uncovered_out) uncovered_out->clear();
  return r;
}

Vec log_coords_of(const LieAlgebra& table, const Mat& m) {
  return log_point(table, GroupElement{m, &table});
}

std::vector<GroupElement> grid_states(const LieAlgebra& table, const AdmissiblePair& pair) {
  std::vector<GroupElement> states;
  for (const Vec& p : pair.sample_points()) states.push_back(exp_point(table, p));
  return states;
}

std::vector<GroupElement> lifted_grid_states(const QuotientChart& chart,
                                             const AdmissiblePair& pair) {
  std::vector<GroupElement> states;
  for (const Vec& p : pair.sample_points()) states.push_back(chart.lift(p));
  return states;
}

EntropyResult estimate_core(const AffineSystem& sys, const AdmissiblePair& pair,
                            const std::vector<GroupElement>& samples,
                            const std::function<Vec(const Mat&)>& coords,
                            const std::vector<ControlFunction>& candidates,
                            const NumericsOptions& opts) {
  if (pair.tau.size() < 4)
    throw Error(ErrorCode::ValidationError, "the horizon grid needs at least 4 points");
  if (candidates.empty()) throw Error(ErrorCode::ValidationError, "empty candidate family");

  EntropyResult result;
  DualDecomposition dual = dual_decomposition(sys.alg(), sys.drift);
  result.closed_form = closed_form_entropy(dual.d_star);
  result.upper_bound_top = topological_entropy_upper(dual.d_star);
  for (const auto& ev : spectrum(dual.d_star))
    if (std::abs(ev.real()) < 1e-10 && std::abs(ev.imag()) > 1e-10)
      result.imaginary_eigenvalues = true;

  const double tau_max = *std::max_element(pair.tau.begin(), pair.tau.end());

  std::vector<double> slots;
  slots.push_back(0.0);  // admissibility slot: Q itself
  for (double e : pair.eps) slots.push_back(e);

  SurvivalTable table =
      compute_survival(sys, samples, coords, pair.q_lo, pair.q_hi, slots, tau_max, candidates, opts);

  // Admissibility surrogate at the full horizon.
  result.admissibility.horizon = tau_max;
  int horizon_tick = table.tick_of(tau_max);
  for (int s = 0; s < table.n_samples; ++s) {
    AdmissibilityReport::Row row{s, -1, 0.0, false};
    int best_exit = -1;
    for (int c = 0; c < table.n_candidates; ++c) {
      int exit = table.exit_tick[0][static_cast<std::size_t>(c) * table.n_samples + s];
      if (exit > best_exit) {
        best_exit = exit;
        row.best_control = c;
      }
      if (exit > horizon_tick) break;
    }
    row.exit_time = best_exit * table.tick_dt;
    row.pass = best_exit > horizon_tick;
    result.admissibility.all_pass = result.admissibility.all_pass && row.pass;
    result.admissibility.rows.push_back(row);
  }
  if (!result.admissibility.all_pass) {
    int failures = 0;
    for (const auto& row : result.admissibility.rows)
      if (!row.pass) ++failures;
    std::ostringstream os;
    os << failures << " of " << result.admissibility.rows.size()
       << " samples kept inside Q by no candidate over [0, " << tau_max << "]";
    throw Error(ErrorCode::Uncoverable, os.str());
  }

  for (std::size_t ei = 0; ei < pair.eps.size(); ++ei) {
    double eps = pair.eps[ei];
    std::vector<double> xs, ys;
    long prev_r = -1;
    for (double tau : pair.tau) {
      int r = count_cover(table, static_cast<int>(ei) + 1, tau, 20, nullptr);
      result.rows.push_back({tau, eps, r, std::log(static_cast<double>(r)) / tau});
      xs.push_back(tau);
      ys.push_back(std::log(static_cast<double>(r)));
      if (prev_r >= 0 && r < prev_r) result.monotone_in_tau = false;
      prev_r = r;
    }
    auto [slope, r2] = regression_slope(xs, ys);
    result.fits.push_back({eps, slope, r2});
  }

  // r should not increase when eps grows; compare row-wise across eps values.
  for (std::size_t a = 0; a < pair.eps.size(); ++a) {
    for (std::size_t b = 0; b < pair.eps.size(); ++b) {
      if (pair.eps[a] <= pair.eps[b]) continue;
      for (std::size_t t = 0; t < pair.tau.size(); ++t) {
        long ra = result.rows[a * pair.tau.size() + t].r;
        long rb = result.rows[b * pair.tau.size() + t].r;
        if (ra > rb) result.monotone_in_eps = false;
      }
    }
  }

  double eps_min = *std::min_element(pair.eps.begin(), pair.eps.end());
  for (const auto& fit : result.fits) {
    if (fit.eps == eps_min) {
      result.empirical_slope = fit.slope;
      result.r_squared = fit.r_squared;
    }
  }
  return result;
}

}  // namespace

double closed_form_entropy(const Mat& d_star, double tol_zero) {
  double sum = 0.0;
  for (const auto& ev : spectrum(d_star)) {
    double re = ev.real();
    if (std::abs(re) < tol_zero) continue;
    if (re > 0.0) sum += re;
  }
  return sum;
}

double topological_entropy_upper(const Mat& d_star, double tol_zero) {
  Mat time_one = dense_expm(d_star);
  double sum = 0.0;
  for (const auto& beta : spectrum(time_one)) {
    double growth = std::log(std::abs(beta));
    if (std::abs(growth) < tol_zero) continue;
    if (growth > 0.0) sum += growth;
  }
  return sum;
}

void AdmissiblePair::validate(int expected_dim) const {
  std::vector<std::string> errors;
  auto expect_dim = [&](const Vec& v, const char* what) {
    if (v.size() != expected_dim) {
      std::ostringstream os;
      os << what << " has length " << v.size() << ", expected " << expected_dim;
      errors.push_back(os.str());
    }
  };
  expect_dim(k_lo, "k_lo");
  expect_dim(k_hi, "k_hi");
  expect_dim(k_spacing, "k_spacing");
  expect_dim(q_lo, "q_lo");
  expect_dim(q_hi, "q_hi");
  if (errors.empty()) {
    for (int i = 0; i < expected_dim; ++i) {
      if (!(k_spacing(i) > 0.0)) errors.push_back("k_spacing must be positive");
      if (k_lo(i) > k_hi(i)) errors.push_back("K box is empty");
      if (k_lo(i) < q_lo(i) - 1e-12 || k_hi(i) > q_hi(i) + 1e-12)
        errors.push_back("K box must be contained in Q");
    }
  }
  if (eps.empty()) errors.push_back("eps list must be nonempty");
  for (double e : eps)
    if (!(e > 0.0)) errors.push_back("eps values must be positive");
  if (tau.empty()) errors.push_back("tau grid must be nonempty");
  for (std::size_t i = 1; i < tau.size(); ++i)
    if (tau[i] <= tau[i - 1]) errors.push_back("tau grid must be strictly increasing");
  if (!tau.empty() && !(tau.front() > 0.0)) errors.push_back("tau values must be positive");
  if (!errors.empty()) {
    std::ostringstream os;
    for (std::size_t i = 0; i < errors.size(); ++i) os << (i ? "; " : "") << errors[i];
    throw Error(ErrorCode::ValidationError, os.str());
  }
}

std::vector<Vec> AdmissiblePair::sample_points() const {
  const int d = static_cast<int>(k_lo.size());
  std::vector<int> counts(d);
  long total = 1;
  for (int i = 0; i < d; ++i) {
    counts[i] = static_cast<int>(std::floor((k_hi(i) - k_lo(i)) / k_spacing(i) + 1e-9)) + 1;
    total *= counts[i];
  }
  std::vector<Vec> points;
  points.reserve(total);
  std::vector<int> idx(d, 0);
  for (long n = 0; n < total; ++n) {
    Vec p(d);
    for (int i = 0; i < d; ++i) p(i) = k_lo(i) + idx[i] * k_spacing(i);
    points.push_back(p);
    for (int i = d - 1; i >= 0; --i) {
      if (++idx[i] < counts[i]) break;
      idx[i] = 0;
    }
  }
  return points;
}

std::vector<ControlFunction> build_candidates(const AffineSystem& sys, const AdmissiblePair& pair,
                                              double horizon, const CandidateOptions& opts) {
  const LieAlgebra& table = sys.alg();
  const int m = sys.channels();
  if (opts.levels < 2) throw Error(ErrorCode::ValidationError, "lattice needs at least 2 levels");
  const int nseg = static_cast<int>(std::ceil(horizon / opts.dt - 1e-9));
  if (nseg < 1) throw Error(ErrorCode::ValidationError, "horizon shorter than one control interval");

  std::vector<Mat> level_values(m, Mat(1, opts.levels));
  for (int j = 0; j < m; ++j)
    for (int l = 0; l < opts.levels; ++l)
      level_values[j](0, l) =
          sys.range.lo(j) + (sys.range.hi(j) - sys.range.lo(j)) * l / (opts.levels - 1);

  std::vector<Mat> dir_reps;
  for (const Vec& b : sys.control_dirs) dir_reps.push_back(table.rep(b));
  Vec q_center = 0.5 * (pair.q_lo + pair.q_hi);

  std::vector<ControlFunction> family;

  if (opts.anchors) {
    IntegrateOptions iopts;
    iopts.step = opts.dt / opts.anchor_substeps;
    iopts.table = &table;
    auto advance = [&](Mat g, const Vec& v) {
      return rk4_integrate(
          g, opts.dt,
          [&](double, const Mat& state) {
            Mat f = affine_field_eval(table, sys.drift, GroupElement{state, &table});
            for (int j = 0; j < m; ++j) f += v(j) * dir_reps[j] * state;
            return f;
          },
          iopts);
    };
    std::vector<Vec> anchors_pts = pair.sample_points();
    for (std::size_t a = 0; a < anchors_pts.size(); a += opts.anchor_stride) {
      Mat g = exp_point(table, anchors_pts[a]).m;
      Mat values(m, nseg);
      Vec v = Vec::Zero(m);
      for (int seg = 0; seg < nseg; ++seg) {
        // One-step-greedy quantized feedback, channel by channel.
        for (int j = 0; j < m; ++j) {
          double best_cost = std::numeric_limits<double>::infinity();
          double best_level = level_values[j](0, 0);
          for (int l = 0; l < opts.levels; ++l) {
            Vec probe = v;
            probe(j) = level_values[j](0, l);
            double cost;
            try {
              cost = (log_coords_of(table, advance(g, probe)) - q_center).squaredNorm();
            } catch (const Error&) {
              cost = std::numeric_limits<double>::infinity();
            }
            if (cost < best_cost) {
              best_cost = cost;
              best_level = probe(j);
            }
          }
          v(j) = best_level;
        }
        values.col(seg) = v;
        g = advance(g, v);
      }
      family.emplace_back(opts.dt, values);
    }
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<int> pick(0, opts.levels - 1);
  for (int r = 0; r < opts.random_count; ++r) {
    Mat values(m, nseg);
    for (int seg = 0; seg < nseg; ++seg)
      for (int j = 0; j < m; ++j) values(j, seg) = level_values[j](0, pick(rng));
    family.emplace_back(opts.dt, values);
  }

  if (static_cast<int>(family.size()) > opts.cap) {
    // Reservoir sample down to the cap, preserving selection determinism.
    std::vector<ControlFunction> reservoir;
    reservoir.reserve(opts.cap);
    for (std::size_t i = 0; i < family.size(); ++i) {
      if (static_cast<int>(i) < opts.cap) {
        reservoir.push_back(family[i]);
      } else {
        std::uniform_int_distribution<std::size_t> slot(0, i);
        std::size_t s = slot(rng);
        if (s < static_cast<std::size_t>(opts.cap)) reservoir[s] = family[i];
      }
    }
    family = std::move(reservoir);
  }
  return family;
}

int greedy_cover(const std::vector<std::vector<std::uint64_t>>& masks, int n_samples,
                 std::vector<int>* chosen, std::vector<int>* uncovered) {
  const int words = (n_samples + 63) / 64;
  std::vector<std::uint64_t> need(words, 0);
  for (int s = 0; s < n_samples; ++s) need[s / 64] |= 1ull << (s % 64);

  int count = 0;
  if (chosen) chosen->clear();
  for (;;) {
    bool empty = true;
    for (const auto w : need)
      if (w) {
        empty = false;
        break;
      }
    if (empty) break;

    int best = -1;
    int best_gain = 0;
    for (std::size_t c = 0; c < masks.size(); ++c) {
      int gain = 0;
      for (int w = 0; w < words; ++w) gain += std::popcount(masks[c][w] & need[w]);
      if (gain > best_gain) {
        best_gain = gain;
        best = static_cast<int>(c);
      }
    }
    if (best < 0) {
      if (uncovered) {
        uncovered->clear();
        for (int s = 0; s < n_samples; ++s)
          if (need[s / 64] & (1ull << (s % 64))) uncovered->push_back(s);
      }
      return count;  // partial cover; caller inspects `uncovered`
    }
    for (int w = 0; w < words; ++w) need[w] &= ~masks[best][w];
    if (chosen) chosen->push_back(best);
    ++count;
  }
  if (uncovered) uncovered->clear();
  return count;
}

namespace {

bool cover_combination_search(const std::vector<std::vector<std::uint64_t>>& masks,
                              const std::vector<std::uint64_t>& need, int k, int start,
                              std::vector<std::uint64_t>& acc) {
  if (k == 0) {
    for (std::size_t w = 0; w < need.size(); ++w)
      if (need[w] & ~acc[w]) return false;
    return true;
  }
  for (int c = start; c + k <= static_cast<int>(masks.size()); ++c) {
    std::vector<std::uint64_t> next = acc;
    for (std::size_t w = 0; w < need.size(); ++w) next[w] |= masks[c][w];
    if (cover_combination_search(masks, need, k - 1, c + 1, next)) return true;
  }
  return false;
}

}  // namespace

int exact_min_cover(const std::vector<std::vector<std::uint64_t>>& masks, int n_samples) {
  const int words = (n_samples + 63) / 64;
  std::vector<std::uint64_t> need(words, 0);
  for (int s = 0; s < n_samples; ++s) need[s / 64] |= 1ull << (s % 64);

  std::vector<std::uint64_t> all(words, 0);
  for (const auto& m : masks)
    for (int w = 0; w < words; ++w) all[w] |= m[w];
  for (int w = 0; w < words; ++w)
    if (need[w] & ~all[w]) return -1;  // uncoverable

  for (int k = 0; k <= static_cast<int>(masks.size()); ++k) {
    std::vector<std::uint64_t> acc(words, 0);
    if (cover_combination_search(masks, need, k, 0, acc)) return k;
  }
  return -1;
}

std::pair<double, double> regression_slope(const std::vector<double>& x,
                                           const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(ErrorCode::ValidationError, "regression needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  double slope = sxy / sxx;
  double r2 = syy > 1e-300 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return {slope, r2};
}

AdmissibilityReport admissibility_check(const AffineSystem& sys, const AdmissiblePair& pair,
                                        const std::vector<ControlFunction>& candidates,
                                        double horizon, const NumericsOptions& opts) {
  pair.validate(sys.alg().dim());
  if (candidates.empty()) throw Error(ErrorCode::ValidationError, "empty candidate family");
  const LieAlgebra& table = sys.alg();
  auto samples = grid_states(table, pair);
  std::function<Vec(const Mat&)> coords = [&table](const Mat& m) {
    return log_coords_of(table, m);
  };
  SurvivalTable survival = compute_survival(sys, samples, coords, pair.q_lo, pair.q_hi, {0.0},
                                            horizon, candidates, opts);
  AdmissibilityReport report;
  report.horizon = horizon;
  int horizon_tick = survival.tick_of(horizon);
  for (int s = 0; s < survival.n_samples; ++s) {
    AdmissibilityReport::Row row{s, -1, 0.0, false};
    int best_exit = -1;
    for (int c = 0; c < survival.n_candidates; ++c) {
      int exit = survival.exit_tick[0][static_cast<std::size_t>(c) * survival.n_samples + s];
      if (exit > best_exit) {
        best_exit = exit;
        row.best_control = c;
      }
      if (exit > horizon_tick) break;
    }
    row.exit_time = best_exit * survival.tick_dt;
    row.pass = best_exit > horizon_tick;
    report.all_pass = report.all_pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

int spanning_count(const AffineSystem& sys, const AdmissiblePair& pair, double tau, double eps,
                   const std::vector<ControlFunction>& candidates, const NumericsOptions& opts) {
  pair.validate(sys.alg().dim());
  if (candidates.empty()) throw Error(ErrorCode::ValidationError, "empty candidate family");
  const LieAlgebra& table = sys.alg();
  auto samples = grid_states(table, pair);
  std::function<Vec(const Mat&)> coords = [&table](const Mat& m) {
    return log_coords_of(table, m);
  };
  SurvivalTable survival =
      compute_survival(sys, samples, coords, pair.q_lo, pair.q_hi, {eps}, tau, candidates, opts);
  return count_cover(survival, 0, tau, 20, nullptr);
}

EntropyResult entropy_estimate(const AffineSystem& sys, const AdmissiblePair& pair,
                               const std::vector<ControlFunction>& candidates,
                               const NumericsOptions& opts) {
  pair.validate(sys.alg().dim());
  const LieAlgebra& table = sys.alg();
  std::function<Vec(const Mat&)> coords = [&table](const Mat& m) {
    return log_coords_of(table, m);
  };
  return estimate_core(sys, pair, grid_states(table, pair), coords, candidates, opts);
}

EntropyResult entropy_estimate_induced(const AffineSystem& sys, const QuotientChart& chart,
                                       const AdmissiblePair& pair,
                                       const std::vector<ControlFunction>& candidates,
                                       const NumericsOptions& opts) {
  pair.validate(chart.quotient_dim());
  std::function<Vec(const Mat&)> coords = [&chart](const Mat& m) {
    return chart.project(GroupElement{m, &chart.alg()});
  };
  return estimate_core(sys, pair, lifted_grid_states(chart, pair), coords, candidates, opts);
}

}  // namespace liectrl
