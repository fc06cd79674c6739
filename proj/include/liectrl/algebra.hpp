#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "liectrl/errors.hpp"

namespace liectrl {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// One structure-constant entry [e_i, e_j] += c * e_k. Indices are 0-based
/// in memory; the file format uses 1-based indices.
struct StructureEntry {
  int i;
  int j;
  int k;
  double c;
};

class LieAlgebra;

/// A point of the group, realized in the matrix embedding.
struct GroupElement {
  Mat m;
  const LieAlgebra* owner = nullptr;
};

/// Structure-constant Lie algebra with a faithful matrix representation.
///
/// The representation basis lives in n x n matrices (the embedding); all
/// group-level computations happen there. Catalog tables additionally carry
/// a membership residual for the defining constraints of the group.
class LieAlgebra {
public:
  LieAlgebra(int dim, std::vector<StructureEntry> structure, std::vector<Mat> rep_basis,
             std::vector<std::string> basis_names = {}, bool exp_global = false,
             std::optional<int> nilpotency_class = std::nullopt);

  int dim() const { return dim_; }
  int rep_dim() const { return rep_dim_; }
  bool exp_global() const { return exp_global_; }
  std::optional<int> nilpotency_class() const { return nilpotency_class_; }
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }
  const std::string& notes() const { return notes_; }
  void set_notes(std::string n) { notes_ = std::move(n); }
  const std::vector<std::string>& basis_names() const { return basis_names_; }
  const std::vector<StructureEntry>& structure() const { return structure_; }
  const std::vector<Mat>& rep_basis() const { return rep_basis_; }

  /// True when every representation matrix is strictly triangularizable to a
  /// common nilpotent form (detected at construction); enables exact
  /// polynomial exp/log.
  bool rep_nilpotent() const { return rep_nilpotent_; }
  int rep_nilpotency_index() const { return rep_nilpotency_index_; }

  /// [x, y] via the structure constants. Bilinear, antisymmetric.
  Vec bracket(const Vec& x, const Vec& y) const;

  /// Matrix of ad(x) = [x, .] acting on coordinates.
  Mat ad(const Vec& x) const;

  /// Embeds an algebra vector as a matrix, sum_i x_i rep_basis[i].
  Mat rep(const Vec& x) const;

  /// Inverse of rep() on its span (least squares). Throws
  /// RepresentationDeficient when the residual exceeds `tol`.
  Vec rep_coords(const Mat& m, double tol = 1e-8) const;
  double rep_span_residual(const Mat& m) const;

  /// Residual of the group's defining constraints at g; catalog factories
  /// install an exact test, anything else falls back to an exp/log
  /// round-trip residual.
  double membership_residual(const Mat& g) const;
  void set_membership_test(std::function<double(const Mat&)> f) { membership_ = std::move(f); }

private:
  int dim_;
  int rep_dim_;
  std::vector<StructureEntry> structure_;
  std::vector<Mat> rep_basis_;
  std::vector<std::string> basis_names_;
  bool exp_global_;
  std::optional<int> nilpotency_class_;
  std::string name_;
  std::string notes_;
  bool rep_nilpotent_ = false;
  int rep_nilpotency_index_ = 0;

  std::vector<Mat> bracket_tensor_;  // per output coordinate k: d x d matrix of c^k_{ij}
  Mat rep_stack_;                    // n^2 x d, column k = vec(rep_basis[k])
  Eigen::ColPivHouseholderQR<Mat> rep_qr_;
  std::function<double(const Mat&)> membership_;

  friend struct ValidationReport;
};

/// Per-invariant residual report for validate_algebra.
struct ValidationReport {
  struct Item {
    std::string name;
    double residual;
    bool pass;
  };
  std::vector<Item> items;
  bool pass = true;
  double max_residual = 0.0;
};

ValidationReport validate_algebra(const LieAlgebra& table, double tol = 1e-12);

struct DerivationCheck {
  bool ok;
  double residual;
};

/// Leibniz-rule check: D[e_i,e_j] = [D e_i, e_j] + [e_i, D e_j] on all basis pairs.
DerivationCheck is_derivation(const LieAlgebra& table, const Mat& D, double tol = 1e-12);

/// Group exponential in the matrix embedding. Exact polynomial for nilpotent
/// representations, dense scaling-and-squaring otherwise.
GroupElement exp_point(const LieAlgebra& table, const Vec& y);

/// Inverse of exp_point for exp_global tables. Throws LogDomainError when the
/// matrix logarithm fails or lands outside the representation span.
Vec log_point(const LieAlgebra& table, const GroupElement& g, double tol = 1e-8);

/// Trivialized differential of exp: returns w with
/// d/dt exp(y + t v)|_0 = rep-embedding of exp(y) * rep(w).
/// Truncates when the series term drops below `tol` (exact for nilpotent ad).
Vec dexp_apply(const LieAlgebra& table, const Vec& y, const Vec& v, double tol = 1e-14);

/// Matrix of Ad(g) on coordinates, solved column-wise against the
/// representation basis by least squares.
Mat adjoint_matrix(const LieAlgebra& table, const GroupElement& g, double tol = 1e-8);

/// |det Ad(g)|.
double modular_function(const LieAlgebra& table, const GroupElement& g);

/// Eigenvalues of a real square matrix, conjugate pairs adjacent, sorted by
/// descending real part (then descending imaginary part).
std::vector<std::complex<double>> spectrum(const Mat& m);

/// Basis of the solution space of the Leibniz constraints: every derivation
/// of the table is a combination of the returned matrices.
std::vector<Mat> derivation_space(const LieAlgebra& table, double tol = 1e-10);

// Dense matrix functions shared across modules.
Mat dense_expm(const Mat& a);
Mat dense_logm(const Mat& a);

}  // namespace liectrl
