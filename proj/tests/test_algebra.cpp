#include <doctest.h>

#include <random>

#include "liectrl/catalog.hpp"

using namespace liectrl;

namespace {

Vec random_vec(int d, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = unif(rng);
  return v;
}

std::vector<std::shared_ptr<const LieAlgebra>> catalog_tables() {
  return {make_rn(2), make_heis3(), make_aff2()};
}

}  // namespace

TEST_CASE("catalog tables satisfy the algebra axioms") {
  for (const auto& table : catalog_tables()) {
    CAPTURE(table->name());
    ValidationReport report = validate_algebra(*table);
    CHECK(report.pass);
    CHECK(report.max_residual < 1e-12);
  }
}

TEST_CASE("abelian table with zero bracket validates") {
  auto rn2 = make_rn(2);
  ValidationReport report = validate_algebra(*rn2);
  CHECK(report.pass);
}

TEST_CASE("broken antisymmetry is reported with residual 2") {
  std::vector<Mat> rep(3, Mat::Zero(3, 3));
  rep[0](0, 1) = 1.0;
  rep[1](1, 2) = 1.0;
  rep[2](0, 2) = 1.0;
  // c^3_{21} deliberately +1 instead of -1.
  LieAlgebra broken(3, {{0, 1, 2, 1.0}, {1, 0, 2, 1.0}}, rep);
  ValidationReport report = validate_algebra(broken);
  CHECK_FALSE(report.pass);
  bool found = false;
  for (const auto& item : report.items) {
    if (item.name == "antisymmetry") {
      found = true;
      CHECK(item.residual == doctest::Approx(2.0));
      CHECK_FALSE(item.pass);
    }
  }
  CHECK(found);
}

TEST_CASE("structure entries outside the dimension raise IndexOutOfRange") {
  std::vector<Mat> rep(2, Mat::Zero(2, 2));
  rep[0](0, 0) = 1.0;
  rep[1](0, 1) = 1.0;
  CHECK_THROWS_WITH_AS(LieAlgebra(2, {{0, 1, 5, 1.0}}, rep), doctest::Contains("outside"),
                       Error);
}

TEST_CASE("bracket reproduces the defining relations") {
  auto heis = make_heis3();
  Vec p = Vec::Unit(3, 0), q = Vec::Unit(3, 1), r = Vec::Unit(3, 2);
  CHECK((heis->bracket(p, q) - r).norm() == doctest::Approx(0.0));
  CHECK(heis->bracket(p, p).norm() == doctest::Approx(0.0));

  auto aff = make_aff2();
  Vec x = Vec::Unit(2, 0), y = Vec::Unit(2, 1);
  CHECK((aff->bracket(x, 2.0 * y) - 2.0 * y).norm() == doctest::Approx(0.0));

  CHECK_THROWS_AS(heis->bracket(p, Vec::Zero(2)), Error);
}

TEST_CASE("ad matrices expand the bracket on the basis") {
  auto heis = make_heis3();
  Mat ad_p = heis->ad(Vec::Unit(3, 0));
  Mat expected = Mat::Zero(3, 3);
  expected(2, 1) = 1.0;  // Q coordinate feeds R
  CHECK((ad_p - expected).norm() == doctest::Approx(0.0));

  CHECK(heis->ad(Vec::Zero(3)).norm() == doctest::Approx(0.0));

  auto aff = make_aff2();
  Mat ad_x = aff->ad(Vec::Unit(2, 0));
  Mat exp_x = Mat::Zero(2, 2);
  exp_x(1, 1) = 1.0;
  CHECK((ad_x - exp_x).norm() == doctest::Approx(0.0));
}

TEST_CASE("ad is a bracket homomorphism on random pairs") {
  std::mt19937_64 rng(7);
  for (const auto& table : catalog_tables()) {
    CAPTURE(table->name());
    const int d = table->dim();
    for (int trial = 0; trial < 100; ++trial) {
      Vec x = random_vec(d, rng), y = random_vec(d, rng);
      Mat lhs = table->ad(table->bracket(x, y));
      Mat rhs = table->ad(x) * table->ad(y) - table->ad(y) * table->ad(x);
      CHECK((lhs - rhs).norm() < 1e-10);
    }
  }
}

TEST_CASE("derivation check follows the Leibniz rule on heis3") {
  auto heis = make_heis3();
  Mat good = Vec(Vec::LinSpaced(3, 1.0, 3.0)).asDiagonal();  // diag(1,2,3): 3 = 1 + 2
  CHECK(is_derivation(*heis, good).ok);

  Mat bad = Mat::Zero(3, 3);
  bad.diagonal() << 1.0, 2.0, 4.0;
  DerivationCheck check = is_derivation(*heis, bad);
  CHECK_FALSE(check.ok);
  CHECK(check.residual == doctest::Approx(1.0));
}

TEST_CASE("inner derivations pass the derivation check") {
  std::mt19937_64 rng(11);
  for (const auto& table : catalog_tables()) {
    CAPTURE(table->name());
    Vec x = random_vec(table->dim(), rng);
    CHECK(is_derivation(*table, table->ad(x)).ok);
  }
}

TEST_CASE("exp of zero is the identity") {
  for (const auto& table : catalog_tables()) {
    GroupElement e = exp_point(*table, Vec::Zero(table->dim()));
    CHECK((e.m - Mat::Identity(table->rep_dim(), table->rep_dim())).norm() ==
          doctest::Approx(0.0));
  }
}

TEST_CASE("nilpotent exp truncates exactly on heis3") {
  auto heis = make_heis3();
  Vec y(3);
  y << 1.0, 1.0, 0.0;  // P + Q
  GroupElement g = exp_point(*heis, y);
  Mat expected(3, 3);
  expected << 1, 1, 0.5, 0, 1, 1, 0, 0, 1;
  CHECK((g.m - expected).norm() < 1e-14);
  CHECK((log_point(*heis, g) - y).norm() < 1e-14);
}

TEST_CASE("exp/log round trip on all catalog tables") {
  std::mt19937_64 rng(3);
  for (const auto& table : catalog_tables()) {
    CAPTURE(table->name());
    for (int trial = 0; trial < 100; ++trial) {
      Vec y = random_vec(table->dim(), rng, 2.0);
      y *= 5.0 / std::max(1.0, y.norm());  // keep within ||y|| <= 10
      Vec back = log_point(*table, exp_point(*table, y));
      CHECK((back - y).norm() < 1e-10);
    }
  }
}

TEST_CASE("aff2 exp matches the dense matrix exponential") {
  auto aff = make_aff2();
  Vec y = Vec::Unit(2, 0);
  GroupElement g = exp_point(*aff, y);
  CHECK(g.m(0, 0) == doctest::Approx(std::exp(1.0)));
  CHECK(g.m(1, 1) == doctest::Approx(1.0));
  CHECK((log_point(*aff, g) - y).norm() < 1e-10);
}

TEST_CASE("dexp at zero is the identity, abelian dexp is trivial") {
  auto heis = make_heis3();
  Vec v(3);
  v << 0.3, -0.2, 0.9;
  CHECK((dexp_apply(*heis, Vec::Zero(3), v) - v).norm() == doctest::Approx(0.0));

  auto rn = make_rn(2);
  std::mt19937_64 rng(5);
  Vec w(2);
  w << 1.0, -2.0;
  CHECK((dexp_apply(*rn, random_vec(2, rng), w) - w).norm() == doctest::Approx(0.0));
}

TEST_CASE("dexp series value on heis3 matches the locked convention") {
  auto heis = make_heis3();
  Vec p = Vec::Unit(3, 0), q = Vec::Unit(3, 1);
  Vec w = dexp_apply(*heis, p, q);
  Vec expected(3);
  expected << 0.0, 1.0, -0.5;  // Q - R/2
  CHECK((w - expected).norm() < 1e-14);
}

TEST_CASE("dexp agrees with a finite difference of exp_point") {
  std::mt19937_64 rng(17);
  const double h = 1e-6;
  for (const auto& table : catalog_tables()) {
    CAPTURE(table->name());
    for (int trial = 0; trial < 100; ++trial) {
      Vec y = random_vec(table->dim(), rng);
      Vec v = random_vec(table->dim(), rng);
      Mat fd = (exp_point(*table, Vec(y + h * v)).m - exp_point(*table, Vec(y - h * v)).m) /
               (2.0 * h);
      Mat analytic = exp_point(*table, y).m * table->rep(dexp_apply(*table, y, v));
      CHECK((fd - analytic).norm() < 1e-8);
    }
  }
}

TEST_CASE("Ad at the identity is the identity with unit modular value") {
  for (const auto& table : catalog_tables()) {
    GroupElement e = exp_point(*table, Vec::Zero(table->dim()));
    Mat ad_e = adjoint_matrix(*table, e);
    CHECK((ad_e - Mat::Identity(table->dim(), table->dim())).norm() < 1e-12);
    CHECK(modular_function(*table, e) == doctest::Approx(1.0));
  }
}

TEST_CASE("heis3 is unimodular, aff2 is not") {
  auto heis = make_heis3();
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    GroupElement g = exp_point(*heis, random_vec(3, rng, 2.0));
    CHECK(modular_function(*heis, g) == doctest::Approx(1.0).epsilon(1e-10));
  }

  auto aff = make_aff2();
  GroupElement gx = exp_point(*aff, Vec::Unit(2, 0));
  double mod = modular_function(*aff, gx);
  CHECK((std::abs(mod - std::exp(1.0)) < 1e-10 || std::abs(mod - std::exp(-1.0)) < 1e-10));
  CHECK(mod != doctest::Approx(1.0));
}

TEST_CASE("spectrum sorts by real part and keeps conjugate pairs") {
  Mat diag = Mat::Zero(2, 2);
  diag(0, 0) = 1.0;
  diag(1, 1) = -2.0;
  auto eig = spectrum(diag);
  CHECK(eig[0].real() == doctest::Approx(1.0));
  CHECK(eig[1].real() == doctest::Approx(-2.0));

  Mat tri = Mat::Zero(3, 3);
  tri(0, 0) = 1.0;
  tri(1, 1) = 2.0;
  tri(2, 1) = 1.0;
  tri(2, 2) = 3.0;
  auto eig3 = spectrum(tri);
  CHECK(eig3[0].real() == doctest::Approx(3.0));
  CHECK(eig3[1].real() == doctest::Approx(2.0));
  CHECK(eig3[2].real() == doctest::Approx(1.0));

  Mat rot = Mat::Zero(2, 2);
  rot(0, 1) = -1.0;
  rot(1, 0) = 1.0;
  auto eigr = spectrum(rot);
  CHECK(eigr[0].real() == doctest::Approx(0.0));
  CHECK(eigr[0].imag() == doctest::Approx(1.0));
  CHECK(eigr[1].imag() == doctest::Approx(-1.0));
}

TEST_CASE("off-group matrices are rejected by log and Ad") {
  auto heis = make_heis3();
  Mat diag = Mat::Identity(3, 3);
  diag(1, 1) = 2.0;  // not unipotent, log leaves the representation span
  CHECK_THROWS_AS(log_point(*heis, GroupElement{diag, heis.get()}), Error);

  Mat rot = Mat::Identity(3, 3);
  rot(0, 0) = 0.0;
  rot(0, 1) = -1.0;
  rot(1, 0) = 1.0;
  rot(1, 1) = 0.0;
  try {
    adjoint_matrix(*heis, GroupElement{rot, heis.get()});
    FAIL("expected a representation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RepresentationDeficient);
  }
}

TEST_CASE("the dexp series guard rejects huge non-nilpotent arguments") {
  auto aff = make_aff2();
  Vec big = Vec::Zero(2);
  big(0) = 7.0;
  try {
    dexp_apply(*aff, big, Vec::Ones(2));
    FAIL("expected a series guard error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SeriesDivergence);
  }
}

TEST_CASE("group membership residuals are tight on catalog elements") {
  std::mt19937_64 rng(29);
  for (const auto& table : catalog_tables()) {
    CAPTURE(table->name());
    GroupElement g = exp_point(*table, random_vec(table->dim(), rng));
    CHECK(table->membership_residual(g.m) < 1e-8);
  }
}
