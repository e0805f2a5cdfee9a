#pragma once

// Small exact-rational linear algebra: span membership, null spaces, linear
// solves, orthogonal projection. Dense Gaussian elimination; deterministic.

#include <vector>

#include "rfm/rat.hpp"

namespace rfm {

// Reduced row echelon form in place; returns pivot column per row rank.
std::vector<std::size_t> rref(std::vector<RatVec>& rows);

// Is v a linear combination of the given rows?
bool in_span(std::vector<RatVec> rows, const RatVec& v);

// Deterministic basis of { w : row . w == 0 for every row }, vectors of
// length n.
std::vector<RatVec> nullspace_basis(std::vector<RatVec> rows, std::size_t n);

// Solves A x = b (A square, possibly singular); returns false when no
// solution exists or A is singular with b outside the range.
bool solve_linear(std::vector<RatVec> A, RatVec b, RatVec& x);

// Orthogonal projection of v onto span(rows) under the standard dot product.
RatVec project_onto_span(const std::vector<RatVec>& rows, const RatVec& v);

}  // namespace rfm
