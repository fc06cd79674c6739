#include "liectrl/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace liectrl {

namespace {

struct Cluster {
  std::complex<double> rep;  // Im >= 0
  int count = 0;             // conjugates included
};

std::complex<double> canonical(const std::complex<double>& z) {
  return {z.real(), std::abs(z.imag())};
}

std::vector<Cluster> cluster_eigenvalues(const std::vector<std::complex<double>>& eig,
                                         double tol) {
  std::vector<Cluster> clusters;
  for (const auto& raw : eig) {
    std::complex<double> z = canonical(raw);
    bool placed = false;
    for (Cluster& c : clusters) {
      if (std::abs(c.rep - z) <= tol) {
        c.rep = (c.rep * static_cast<double>(c.count) + z) / static_cast<double>(c.count + 1);
        ++c.count;
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({z, 1});
  }
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.rep.real() != b.rep.real()) return a.rep.real() > b.rep.real();
    return a.rep.imag() > b.rep.imag();
  });
  return clusters;
}

Mat orthonormal_columns(const Mat& m) {
  Eigen::HouseholderQR<Mat> qr(m);
  Mat q = qr.householderQ() * Mat::Identity(m.rows(), m.cols());
  return q;
}

}  // namespace

EigenSplit eigen_split(const Mat& d_star, double tol_zero, double cluster_tol) {
  const int d = static_cast<int>(d_star.rows());
  if (d_star.cols() != d) throw Error(ErrorCode::DimensionMismatch, "eigen_split needs square input");

  std::vector<std::complex<double>> eig = spectrum(d_star);
  double scale = std::max(1.0, d_star.norm());
  std::vector<Cluster> clusters = cluster_eigenvalues(eig, cluster_tol * scale);

  EigenSplit split;
  int plus_dim = 0, n_dim = 0;
  for (const Cluster& c : clusters) {
    // Real form of the generalized eigenspace: kernel of the real polynomial
    // factor evaluated at D*, taken to the cluster multiplicity.
    Mat factor;
    if (std::abs(c.rep.imag()) <= cluster_tol * scale) {
      factor = d_star - c.rep.real() * Mat::Identity(d, d);
    } else {
      factor = (d_star * d_star - 2.0 * c.rep.real() * d_star +
                std::norm(c.rep) * Mat::Identity(d, d));
    }
    Mat power = Mat::Identity(d, d);
    for (int k = 0; k < c.count; ++k) {
      power = power * factor;
      power /= std::max(1.0, power.norm());
    }

    Eigen::JacobiSVD<Mat> svd(power, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int kernel_dim = c.count;
    double sigma_max = sv(0);
    double kernel_sigma = sv(d - kernel_dim);            // largest inside the kernel
    double keep_sigma = kernel_dim < d ? sv(d - kernel_dim - 1) : sigma_max;  // smallest outside
    if (kernel_sigma > 1e-7 * std::max(sigma_max, 1e-300) ||
        (kernel_dim < d && keep_sigma < 1e-7 * std::max(sigma_max, 1e-300))) {
      std::ostringstream os;
      os << "cannot separate the eigenvalue cluster near (" << c.rep.real() << ", "
         << c.rep.imag() << "i): singular values " << keep_sigma << " vs " << kernel_sigma
         << " (scale " << sigma_max << ")";
      throw Error(ErrorCode::ClusterSplitFailure, os.str());
    }

    EigenBlock block;
    block.eigenvalue = c.rep;
    block.multiplicity = c.count;
    block.basis = svd.matrixV().rightCols(kernel_dim);
    block.invariance_residual =
        ((Mat::Identity(d, d) - block.basis * block.basis.transpose()) * d_star * block.basis)
            .norm();
    split.blocks.push_back(std::move(block));
    if (c.rep.real() < -tol_zero)
      n_dim += c.count;
    else
      plus_dim += c.count;
  }

  split.plus_zero_basis.resize(d, plus_dim);
  split.n_basis.resize(d, n_dim);
  int pc = 0, nc = 0;
  for (const EigenBlock& b : split.blocks) {
    if (b.eigenvalue.real() < -tol_zero) {
      split.n_basis.middleCols(nc, b.multiplicity) = b.basis;
      nc += b.multiplicity;
    } else {
      split.plus_zero_basis.middleCols(pc, b.multiplicity) = b.basis;
      pc += b.multiplicity;
    }
  }
  if (plus_dim > 0) split.plus_zero_basis = orthonormal_columns(split.plus_zero_basis);
  if (n_dim > 0) split.n_basis = orthonormal_columns(split.n_basis);

  Mat joint(d, d);
  joint << split.plus_zero_basis, split.n_basis;
  Eigen::JacobiSVD<Mat> jsvd(joint);
  split.joint_condition = jsvd.singularValues()(0) / jsvd.singularValues()(d - 1);
  return split;
}

double check_n_closure(const LieAlgebra& table, EigenSplit& split) {
  const int q = static_cast<int>(split.n_basis.cols());
  double res = 0.0;
  if (q > 0) {
    Eigen::ColPivHouseholderQR<Mat> qr(split.n_basis);
    for (int i = 0; i < q; ++i) {
      for (int j = i + 1; j < q; ++j) {
        Vec w = table.bracket(split.n_basis.col(i), split.n_basis.col(j));
        Vec fitted = split.n_basis * qr.solve(w);
        res = std::max(res, (w - fitted).norm());
      }
    }
  }
  split.n_closure_residual = res;
  return res;
}

double grading_check(const LieAlgebra& table, const EigenSplit& split, double match_tol) {
  const int d = table.dim();
  double worst = 0.0;
  for (const EigenBlock& bi : split.blocks) {
    for (const EigenBlock& bj : split.blocks) {
      std::complex<double> sums[2] = {bi.eigenvalue + bj.eigenvalue,
                                      bi.eigenvalue + std::conj(bj.eigenvalue)};
      std::vector<const EigenBlock*> targets;
      for (const EigenBlock& bk : split.blocks) {
        for (const auto& s : sums) {
          if (std::abs(bk.eigenvalue - canonical(s)) <= match_tol) {
            targets.push_back(&bk);
            break;
          }
        }
      }
      Mat target(d, 0);
      for (const EigenBlock* t : targets) {
        Mat wider(d, target.cols() + t->multiplicity);
        wider << target, t->basis;
        target = std::move(wider);
      }
      std::optional<Eigen::ColPivHouseholderQR<Mat>> qr;
      if (target.cols() > 0) qr.emplace(target);
      for (int ci = 0; ci < bi.basis.cols(); ++ci) {
        for (int cj = 0; cj < bj.basis.cols(); ++cj) {
          Vec w = table.bracket(bi.basis.col(ci), bj.basis.col(cj));
          double res = target.cols() > 0 ? (w - target * qr->solve(w)).norm() : w.norm();
          worst = std::max(worst, res);
        }
      }
    }
  }
  return worst;
}

UnimodularityReport unimodularity_check(const LieAlgebra& table, const EigenSplit& split,
                                        std::mt19937_64& rng, int samples) {
  UnimodularityReport report;
  const int q = static_cast<int>(split.n_basis.cols());
  if (q == 0) {
    report.vacuous = true;
    return report;
  }
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  report.samples = samples;
  for (int s = 0; s < samples; ++s) {
    Vec coeff(q);
    for (int i = 0; i < q; ++i) coeff(i) = unif(rng);
    Vec x = split.n_basis * coeff;
    report.max_trace_residual = std::max(report.max_trace_residual, std::abs(table.ad(x).trace()));
    double mod = modular_function(table, exp_point(table, x));
    report.max_modular_residual = std::max(report.max_modular_residual, std::abs(mod - 1.0));
  }
  report.pass = report.max_trace_residual < 1e-10 && report.max_modular_residual < 1e-8;
  return report;
}

QuotientChart::QuotientChart(std::shared_ptr<const LieAlgebra> table, EigenSplit split, Mat d_star,
                             double domain_radius)
    : table_(std::move(table)),
      split_(std::move(split)),
      d_star_(std::move(d_star)),
      domain_radius_(domain_radius) {
  const int d = table_->dim();
  Mat joint(d, d);
  joint << split_.plus_zero_basis, split_.n_basis;
  joint_qr_.compute(joint);
  if (joint_qr_.rank() < d)
    throw Error(ErrorCode::ClusterSplitFailure, "split bases are not jointly independent");
}

Vec QuotientChart::split_solve(const Vec& w) const { return joint_qr_.solve(w); }

Vec QuotientChart::plus_coords(const Vec& w) const {
  return split_solve(w).head(quotient_dim());
}

GroupElement QuotientChart::lift(const Vec& a) const {
  if (a.size() != quotient_dim())
    throw Error(ErrorCode::DimensionMismatch, "lift argument has wrong quotient dimension");
  return exp_point(*table_, Vec(split_.plus_zero_basis * a));
}

std::pair<Vec, Vec> QuotientChart::factorize(const GroupElement& g) const {
  const int p = quotient_dim();
  const int q = static_cast<int>(split_.n_basis.cols());
  Vec w0 = log_point(*table_, g);
  if (w0.norm() > domain_radius_)
    throw Error(ErrorCode::ChartDomainError, "group element outside the chart's validated ball");
  if (q == 0) return {plus_coords(w0), Vec::Zero(0)};
  if (p == 0) return {Vec::Zero(0), split_solve(w0).tail(q)};

  auto residual = [&](const Vec& a) {
    Mat inv_lift = exp_point(*table_, Vec(-(split_.plus_zero_basis * a))).m;
    Vec w = log_point(*table_, GroupElement{inv_lift * g.m, table_.get()});
    return split_solve(w);
  };

  Vec a = plus_coords(w0);
  Vec full = residual(a);
  for (int iter = 0; iter < 50; ++iter) {
    Vec r = full.head(p);
    if (r.cwiseAbs().maxCoeff() < 1e-13) return {a, full.tail(q)};
    // Finite-difference Jacobian of the plus-part residual.
    Mat jac(p, p);
    double h = 1e-6 * std::max(1.0, a.norm());
    for (int i = 0; i < p; ++i) {
      Vec ap = a, am = a;
      ap(i) += h;
      am(i) -= h;
      jac.col(i) = (residual(ap).head(p) - residual(am).head(p)) / (2.0 * h);
    }
    Vec delta = jac.colPivHouseholderQr().solve(-r);
    a += delta;
    full = residual(a);
    if (!a.allFinite())
      throw Error(ErrorCode::ChartDomainError, "chart factorization diverged");
  }
  if (full.head(p).cwiseAbs().maxCoeff() < 1e-10) return {a, full.tail(q)};
  throw Error(ErrorCode::ChartDomainError, "chart factorization did not converge");
}

Vec QuotientChart::dual_flow_coords(double tau, const Vec& a) const {
  GroupElement g = lift(a);
  Vec moved = dense_expm(Mat(tau * d_star_)) * log_point(*table_, g);
  return project(exp_point(*table_, moved));
}

Vec induced_solve(const AffineSystem& sys, const QuotientChart& chart, double t, const Vec& x,
                  const ControlFunction& u, double step, SolveBackend backend, AlphaCache* cache) {
  GroupElement g = chart.lift(x);
  GroupElement moved = solve(sys, t, g, u, step, backend, cache);
  return chart.project(moved);
}

double volume_growth(const QuotientChart& chart, double tau, double h_fd) {
  if (tau < 0.0 || tau > 5.0)
    throw Error(ErrorCode::ValidationError, "volume growth is validated for tau in [0, 5]");
  const int p = chart.quotient_dim();
  if (p == 0) return 1.0;

  Vec origin = Vec::Zero(p);
  Vec at_zero = chart.dual_flow_coords(tau, origin);
  Mat fwd(p, p), bwd(p, p), ctr(p, p);
  for (int i = 0; i < p; ++i) {
    Vec ep = origin, em = origin;
    ep(i) += h_fd;
    em(i) -= h_fd;
    Vec up = chart.dual_flow_coords(tau, ep);
    Vec dn = chart.dual_flow_coords(tau, em);
    fwd.col(i) = (up - at_zero) / h_fd;
    bwd.col(i) = (at_zero - dn) / h_fd;
    ctr.col(i) = (up - dn) / (2.0 * h_fd);
  }
  double det_c = std::abs(ctr.determinant());
  double det_f = std::abs(fwd.determinant());
  double det_b = std::abs(bwd.determinant());
  if (std::abs(det_f - det_b) > 1e-3 * std::max(det_c, 1e-12)) {
    std::ostringstream os;
    os << "one-sided Jacobian determinants disagree (" << det_f << " vs " << det_b
       << "); reduce h_fd";
    throw Error(ErrorCode::FDConditioning, os.str());
  }
  return det_c;
}

}  // namespace liectrl
