#pragma once

#include <memory>
#include <string>

#include "liectrl/algebra.hpp"

namespace liectrl {

/// Abelian R^d, embedded as translation matrices in dimension d+1.
std::shared_ptr<const LieAlgebra> make_rn(int d);

/// 3-dimensional Heisenberg algebra, unit upper-triangular 3x3 embedding.
/// Basis P, Q, R with [P, Q] = R.
std::shared_ptr<const LieAlgebra> make_heis3();

/// Simply connected ax+b group, 2x2 embedding [[a, b], [0, 1]] with a > 0.
/// Basis X, Y with [X, Y] = Y.
std::shared_ptr<const LieAlgebra> make_aff2();

/// Looks up "rn:<d>", "heis3" or "aff2". Throws ValidationError otherwise.
std::shared_ptr<const LieAlgebra> catalog(const std::string& name);

}  // namespace liectrl
