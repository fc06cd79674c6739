#include "liectrl/catalog.hpp"

#include <cmath>

namespace liectrl {

std::shared_ptr<const LieAlgebra> make_rn(int d) {
  if (d < 1) throw Error(ErrorCode::ValidationError, "rn:<d> needs d >= 1");
  const int n = d + 1;
  std::vector<Mat> rep;
  std::vector<std::string> names;
  for (int i = 0; i < d; ++i) {
    Mat b = Mat::Zero(n, n);
    b(i, d) = 1.0;
    rep.push_back(b);
    names.push_back("e" + std::to_string(i + 1));
  }
  auto alg = std::make_shared<LieAlgebra>(d, std::vector<StructureEntry>{}, rep, names,
                                          /*exp_global=*/true, /*nilpotency_class=*/1);
  alg->set_name("rn:" + std::to_string(d));
  alg->set_notes("abelian, simply connected; every connected subgroup is closed");
  alg->set_membership_test([d, n](const Mat& g) {
    if (g.rows() != n || g.cols() != n) return std::numeric_limits<double>::infinity();
    Mat ref = Mat::Identity(n, n);
    double res = 0.0;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        if (c != d || r == d) res = std::max(res, std::abs(g(r, c) - ref(r, c)));
    return res;
  });
  return alg;
}

std::shared_ptr<const LieAlgebra> make_heis3() {
  std::vector<Mat> rep(3, Mat::Zero(3, 3));
  rep[0](0, 1) = 1.0;  // P
  rep[1](1, 2) = 1.0;  // Q
  rep[2](0, 2) = 1.0;  // R
  std::vector<StructureEntry> structure = {{0, 1, 2, 1.0}, {1, 0, 2, -1.0}};
  auto alg = std::make_shared<LieAlgebra>(3, structure, rep,
                                          std::vector<std::string>{"P", "Q", "R"},
                                          /*exp_global=*/true, /*nilpotency_class=*/2);
  alg->set_name("heis3");
  alg->set_notes("nilpotent, simply connected; every connected subgroup is closed");
  alg->set_membership_test([](const Mat& g) {
    if (g.rows() != 3 || g.cols() != 3) return std::numeric_limits<double>::infinity();
    double res = 0.0;
    for (int i = 0; i < 3; ++i) res = std::max(res, std::abs(g(i, i) - 1.0));
    res = std::max({res, std::abs(g(1, 0)), std::abs(g(2, 0)), std::abs(g(2, 1))});
    return res;
  });
  return alg;
}

std::shared_ptr<const LieAlgebra> make_aff2() {
  std::vector<Mat> rep(2, Mat::Zero(2, 2));
  rep[0](0, 0) = 1.0;  // X
  rep[1](0, 1) = 1.0;  // Y
  std::vector<StructureEntry> structure = {{0, 1, 1, 1.0}, {1, 0, 1, -1.0}};
  auto alg = std::make_shared<LieAlgebra>(2, structure, rep, std::vector<std::string>{"X", "Y"},
                                          /*exp_global=*/true, std::nullopt);
  alg->set_name("aff2");
  alg->set_notes("solvable exponential; every connected subgroup is closed");
  alg->set_membership_test([](const Mat& g) {
    if (g.rows() != 2 || g.cols() != 2) return std::numeric_limits<double>::infinity();
    double res = std::max(std::abs(g(1, 0)), std::abs(g(1, 1) - 1.0));
    if (g(0, 0) <= 0.0) res = std::max(res, 1.0 - g(0, 0));
    return res;
  });
  return alg;
}

std::shared_ptr<const LieAlgebra> catalog(const std::string& name) {
  if (name == "heis3") return make_heis3();
  if (name == "aff2") return make_aff2();
  if (name.rfind("rn:", 0) == 0) {
    int d = 0;
    try {
      d = std::stoi(name.substr(3));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ValidationError, "malformed catalog name '" + name + "'");
    }
    return make_rn(d);
  }
  throw Error(ErrorCode::ValidationError,
              "unknown catalog name '" + name + "' (expected rn:<d>, heis3 or aff2)");
}

}  // namespace liectrl
