#include "liectrl/algebra.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace liectrl {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LogDomainError: return "LogDomainError";
    case ErrorCode::SeriesDivergence: return "SeriesDivergence";
    case ErrorCode::RepresentationDeficient: return "RepresentationDeficient";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::ConventionAmbiguity: return "ConventionAmbiguity";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::BackendMismatch: return "BackendMismatch";
    case ErrorCode::NonAlignedShift: return "NonAlignedShift";
    case ErrorCode::ClusterSplitFailure: return "ClusterSplitFailure";
    case ErrorCode::FDConditioning: return "FDConditioning";
    case ErrorCode::ChartDomainError: return "ChartDomainError";
    case ErrorCode::Uncoverable: return "Uncoverable";
    case ErrorCode::StateEscape: return "StateEscape";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "UnknownError";
}

namespace {

Mat vec_of(const Mat& m) {
  return Eigen::Map<const Mat>(m.data(), m.size(), 1);
}

}  // namespace

LieAlgebra::LieAlgebra(int dim, std::vector<StructureEntry> structure, std::vector<Mat> rep_basis,
                       std::vector<std::string> basis_names, bool exp_global,
                       std::optional<int> nilpotency_class)
    : dim_(dim),
      structure_(std::move(structure)),
      rep_basis_(std::move(rep_basis)),
      basis_names_(std::move(basis_names)),
      exp_global_(exp_global),
      nilpotency_class_(nilpotency_class) {
  if (dim_ < 1) throw Error(ErrorCode::ValidationError, "algebra dimension must be >= 1");
  if (static_cast<int>(rep_basis_.size()) != dim_)
    throw Error(ErrorCode::DimensionMismatch, "rep_basis must contain dim matrices");
  rep_dim_ = static_cast<int>(rep_basis_.front().rows());
  for (const Mat& b : rep_basis_) {
    if (b.rows() != rep_dim_ || b.cols() != rep_dim_)
      throw Error(ErrorCode::DimensionMismatch, "rep_basis matrices must be square and same size");
  }
  if (basis_names_.empty()) {
    for (int i = 0; i < dim_; ++i) basis_names_.push_back("e" + std::to_string(i + 1));
  }
  if (static_cast<int>(basis_names_.size()) != dim_)
    throw Error(ErrorCode::DimensionMismatch, "basis_names must have dim entries");

  bracket_tensor_.assign(dim_, Mat::Zero(dim_, dim_));
  for (const StructureEntry& e : structure_) {
    if (e.i < 0 || e.i >= dim_ || e.j < 0 || e.j >= dim_ || e.k < 0 || e.k >= dim_) {
      std::ostringstream os;
      os << "structure entry (" << e.i + 1 << "," << e.j + 1 << "," << e.k + 1
         << ") outside [1.." << dim_ << "]";
      throw Error(ErrorCode::IndexOutOfRange, os.str());
    }
    bracket_tensor_[e.k](e.i, e.j) += e.c;
  }

  rep_stack_.resize(rep_dim_ * rep_dim_, dim_);
  for (int k = 0; k < dim_; ++k) rep_stack_.col(k) = vec_of(rep_basis_[k]);
  rep_qr_.compute(rep_stack_);
  if (rep_qr_.rank() < dim_)
    throw Error(ErrorCode::RepresentationDeficient, "rep_basis matrices are linearly dependent");

  // Nilpotency of the representation: a generic combination of the basis
  // matrices must vanish under repeated powers.
  Mat probe = Mat::Zero(rep_dim_, rep_dim_);
  for (int k = 0; k < dim_; ++k) probe += (1.0 + 0.37 * k) * rep_basis_[k];
  Mat power = probe;
  for (int q = 1; q <= rep_dim_; ++q) {
    if (power.cwiseAbs().maxCoeff() < 1e-14) {
      rep_nilpotent_ = true;
      rep_nilpotency_index_ = q;
      break;
    }
    power = power * probe;
  }
}

Vec LieAlgebra::bracket(const Vec& x, const Vec& y) const {
  if (x.size() != dim_ || y.size() != dim_)
    throw Error(ErrorCode::DimensionMismatch, "bracket arguments must have algebra dimension");
  Vec z(dim_);
  for (int k = 0; k < dim_; ++k) z(k) = x.dot(bracket_tensor_[k] * y);
  return z;
}

Mat LieAlgebra::ad(const Vec& x) const {
  if (x.size() != dim_)
    throw Error(ErrorCode::DimensionMismatch, "ad argument must have algebra dimension");
  Mat a(dim_, dim_);
  for (int k = 0; k < dim_; ++k) a.row(k) = x.transpose() * bracket_tensor_[k];
  return a;
}

Mat LieAlgebra::rep(const Vec& x) const {
  if (x.size() != dim_)
    throw Error(ErrorCode::DimensionMismatch, "rep argument must have algebra dimension");
  Mat m = Mat::Zero(rep_dim_, rep_dim_);
  for (int k = 0; k < dim_; ++k) m += x(k) * rep_basis_[k];
  return m;
}

Vec LieAlgebra::rep_coords(const Mat& m, double tol) const {
  if (m.rows() != rep_dim_ || m.cols() != rep_dim_)
    throw Error(ErrorCode::DimensionMismatch, "rep_coords argument has wrong embedding size");
  Vec x = rep_qr_.solve(vec_of(m));
  double res = (rep_stack_ * x - vec_of(m)).norm();
  if (res > tol) {
    std::ostringstream os;
    os << "matrix is not in the representation span (residual " << res << ")";
    throw Error(ErrorCode::RepresentationDeficient, os.str());
  }
  return x;
}

double LieAlgebra::rep_span_residual(const Mat& m) const {
  Vec x = rep_qr_.solve(vec_of(m));
  return (rep_stack_ * x - vec_of(m)).norm();
}

double LieAlgebra::membership_residual(const Mat& g) const {
  if (membership_) return membership_(g);
  // Fallback: residual of the exp/log round trip through the algebra.
  GroupElement ge{g, this};
  try {
    Vec y = log_point(*this, ge);
    return (exp_point(*this, y).m - g).norm();
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

ValidationReport validate_algebra(const LieAlgebra& table, double tol) {
  ValidationReport report;
  const int d = table.dim();

  double anti = 0.0;
  for (int k = 0; k < d; ++k) {
    Vec ek = Vec::Unit(d, k);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        Vec ei = Vec::Unit(d, i), ej = Vec::Unit(d, j);
        double cij = table.bracket(ei, ej)(k);
        double cji = table.bracket(ej, ei)(k);
        anti = std::max(anti, std::abs(cij + cji));
      }
    }
  }
  report.items.push_back({"antisymmetry", anti, anti < tol});

  double jacobi = 0.0;
  for (int i = 0; i < d; ++i) {
    Vec ei = Vec::Unit(d, i);
    for (int j = 0; j < d; ++j) {
      Vec ej = Vec::Unit(d, j);
      for (int k = 0; k < d; ++k) {
        Vec ek = Vec::Unit(d, k);
        Vec cyc = table.bracket(ei, table.bracket(ej, ek)) +
                  table.bracket(ej, table.bracket(ek, ei)) +
                  table.bracket(ek, table.bracket(ei, ej));
        jacobi = std::max(jacobi, cyc.cwiseAbs().maxCoeff());
      }
    }
  }
  report.items.push_back({"jacobi", jacobi, jacobi < tol});

  double faith = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Mat comm = table.rep_basis()[i] * table.rep_basis()[j] -
                 table.rep_basis()[j] * table.rep_basis()[i];
      Vec c = table.bracket(Vec::Unit(d, i), Vec::Unit(d, j));
      faith = std::max(faith, (comm - table.rep(c)).cwiseAbs().maxCoeff());
    }
  }
  report.items.push_back({"representation", faith, faith < tol});

  for (const auto& item : report.items) {
    report.pass = report.pass && item.pass;
    report.max_residual = std::max(report.max_residual, item.residual);
  }
  return report;
}

DerivationCheck is_derivation(const LieAlgebra& table, const Mat& D, double tol) {
  const int d = table.dim();
  if (D.rows() != d || D.cols() != d)
    throw Error(ErrorCode::DimensionMismatch, "derivation candidate must be d x d");
  double res = 0.0;
  for (int i = 0; i < d; ++i) {
    Vec ei = Vec::Unit(d, i);
    for (int j = i + 1; j < d; ++j) {
      Vec ej = Vec::Unit(d, j);
      Vec lhs = D * table.bracket(ei, ej);
      Vec rhs = table.bracket(D * ei, ej) + table.bracket(ei, D * ej);
      res = std::max(res, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }
  return {res < tol, res};
}

Mat dense_expm(const Mat& a) { return a.exp(); }

Mat dense_logm(const Mat& a) { return a.log(); }

GroupElement exp_point(const LieAlgebra& table, const Vec& y) {
  Mat m = table.rep(y);
  if (table.rep_nilpotent()) {
    Mat acc = Mat::Identity(table.rep_dim(), table.rep_dim());
    Mat term = acc;
    for (int k = 1; k <= table.rep_nilpotency_index(); ++k) {
      term = term * m / static_cast<double>(k);
      acc += term;
    }
    return {acc, &table};
  }
  return {dense_expm(m), &table};
}

Vec log_point(const LieAlgebra& table, const GroupElement& g, double tol) {
  if (!table.exp_global())
    throw Error(ErrorCode::LogDomainError, "log_point requires an exp_global table");
  if (g.m.rows() != table.rep_dim() || g.m.cols() != table.rep_dim())
    throw Error(ErrorCode::DimensionMismatch, "group element has wrong embedding size");
  Mat lg;
  if (table.rep_nilpotent()) {
    Mat n = g.m - Mat::Identity(table.rep_dim(), table.rep_dim());
    Mat term = n;
    lg = n;
    for (int k = 2; k <= table.rep_nilpotency_index(); ++k) {
      term = term * n;
      lg += (k % 2 == 0 ? -1.0 : 1.0) / static_cast<double>(k) * term;
    }
  } else {
    lg = dense_logm(g.m);
    if (!lg.allFinite() || (dense_expm(lg) - g.m).norm() > 1e-6 * std::max(1.0, g.m.norm()))
      throw Error(ErrorCode::LogDomainError, "matrix logarithm failed to converge");
  }
  try {
    return table.rep_coords(lg, tol);
  } catch (const Error&) {
    throw Error(ErrorCode::LogDomainError,
                "matrix logarithm lies outside the algebra representation");
  }
}

Vec dexp_apply(const LieAlgebra& table, const Vec& y, const Vec& v, double tol) {
  Mat ady = table.ad(y);
  if (!table.rep_nilpotent()) {
    double scale = ady.cwiseAbs().rowwise().sum().maxCoeff();
    if (scale >= 2.0 * M_PI)
      throw Error(ErrorCode::SeriesDivergence,
                  "ad(y) too large for the dexp series; reduce the step");
  }
  Vec term = v;
  Vec acc = v;
  const int max_terms = table.rep_nilpotent() ? table.dim() + 2 : 80;
  for (int k = 1; k <= max_terms; ++k) {
    term = -(ady * term) / static_cast<double>(k + 1);
    acc += term;
    if (term.cwiseAbs().maxCoeff() < tol) return acc;
  }
  if (term.cwiseAbs().maxCoeff() >= tol)
    throw Error(ErrorCode::SeriesDivergence, "dexp series did not reach tolerance");
  return acc;
}

Mat adjoint_matrix(const LieAlgebra& table, const GroupElement& g, double tol) {
  const int d = table.dim();
  Mat ginv = g.m.inverse();
  Mat ad_g(d, d);
  for (int j = 0; j < d; ++j) {
    Mat conj = g.m * table.rep_basis()[j] * ginv;
    double res = table.rep_span_residual(conj);
    if (res > tol) {
      std::ostringstream os;
      os << "Ad(g) column " << j << " escapes the representation span (residual " << res << ")";
      throw Error(ErrorCode::RepresentationDeficient, os.str());
    }
    ad_g.col(j) = table.rep_coords(conj, 10 * tol);
  }
  return ad_g;
}

double modular_function(const LieAlgebra& table, const GroupElement& g) {
  return std::abs(adjoint_matrix(table, g).determinant());
}

std::vector<Mat> derivation_space(const LieAlgebra& table, double tol) {
  const int d = table.dim();
  const int unknowns = d * d;  // vec(D), column-major: (r, c) -> c*d + r
  std::vector<Vec> brackets(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      brackets[i * d + j] = table.bracket(Vec::Unit(d, i), Vec::Unit(d, j));

  const int rows = d * d * (d - 1) / 2;
  Mat constraints = Mat::Zero(std::max(rows, 1), unknowns);
  int row = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const Vec& bij = brackets[i * d + j];
      for (int k = 0; k < d; ++k) {
        for (int c = 0; c < d; ++c) constraints(row, c * d + k) += bij(c);
        for (int r = 0; r < d; ++r) {
          constraints(row, i * d + r) -= brackets[r * d + j](k);
          constraints(row, j * d + r) -= brackets[i * d + r](k);
        }
        ++row;
      }
    }
  }

  Eigen::JacobiSVD<Mat> svd(constraints, Eigen::ComputeFullV);
  double sigma_max = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  std::vector<Mat> basis;
  for (int c = 0; c < unknowns; ++c) {
    bool in_kernel = c >= svd.singularValues().size() ||
                     svd.singularValues()(c) <= tol * std::max(sigma_max, 1.0);
    if (!in_kernel) continue;
    Vec v = svd.matrixV().col(c);
    Mat D(d, d);
    for (int col = 0; col < d; ++col) D.col(col) = v.segment(col * d, d);
    basis.push_back(D);
  }
  return basis;
}

std::vector<std::complex<double>> spectrum(const Mat& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "spectrum needs a square matrix");
  Eigen::EigenSolver<Mat> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::ConvergenceFailure, "eigenvalue iteration did not converge");
  std::vector<std::complex<double>> eig(m.rows());
  for (int i = 0; i < m.rows(); ++i) eig[i] = solver.eigenvalues()(i);
  std::sort(eig.begin(), eig.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return eig;
}

}  // namespace liectrl
