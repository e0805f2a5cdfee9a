#include "rfm/linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace rfm {

std::vector<std::size_t> rref(std::vector<RatVec>& rows) {
  std::vector<std::size_t> pivots;
  if (rows.empty()) return pivots;
  const std::size_t n = rows[0].size();
  std::size_t r = 0;
  for (std::size_t col = 0; col < n && r < rows.size(); ++col) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][col].sign() == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    Rat piv = rows[r][col];
    for (auto& x : rows[r]) x /= piv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][col].sign() == 0) continue;
      Rat f = rows[i][col];
      for (std::size_t j = 0; j < n; ++j)
        if (rows[r][j].sign() != 0) rows[i][j] -= f * rows[r][j];
    }
    pivots.push_back(col);
    ++r;
  }
  rows.resize(r);  // drop zero rows
  return pivots;
}

bool in_span(std::vector<RatVec> rows, const RatVec& v) {
  rref(rows);
  RatVec w = v;
  const std::size_t n = v.size();
  for (const auto& row : rows) {
    std::size_t col = 0;
    while (col < n && row[col].sign() == 0) ++col;
    if (col == n) continue;
    if (w[col].sign() != 0) {
      Rat f = w[col] / row[col];
      for (std::size_t j = 0; j < n; ++j) w[j] -= f * row[j];
    }
  }
  for (const auto& x : w)
    if (x.sign() != 0) return false;
  return true;
}

std::vector<RatVec> nullspace_basis(std::vector<RatVec> rows, std::size_t n) {
  std::vector<std::size_t> pivots = rref(rows);
  std::vector<bool> is_pivot(n, false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  std::vector<RatVec> basis;
  for (std::size_t free_col = 0; free_col < n; ++free_col) {
    if (is_pivot[free_col]) continue;
    RatVec w(n);
    w[free_col] = Rat(1);
    for (std::size_t i = 0; i < rows.size(); ++i)
      w[pivots[i]] = -rows[i][free_col];
    basis.push_back(std::move(w));
  }
  return basis;
}

bool solve_linear(std::vector<RatVec> A, RatVec b, RatVec& x) {
  const std::size_t n = b.size();
  for (std::size_t i = 0; i < n; ++i) A[i].push_back(b[i]);
  std::vector<std::size_t> pivots = rref(A);
  x.assign(n, Rat(0));
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (pivots[i] == n) return false;  // row reads 0 = nonzero: inconsistent
    x[pivots[i]] = A[i][n];
  }
  // Free variables at zero always satisfy the reduced system.
  return true;
}

RatVec project_onto_span(const std::vector<RatVec>& rows, const RatVec& v) {
  // Reduce to an independent spanning set first, then solve the normal
  // equations G c = B v with G the Gram matrix.
  std::vector<RatVec> basis = rows;
  rref(basis);
  const std::size_t m = basis.size();
  RatVec out(v.size());
  if (m == 0) return out;
  std::vector<RatVec> G(m, RatVec(m));
  RatVec rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    rhs[i] = dot(basis[i], v);
    for (std::size_t j = 0; j < m; ++j) G[i][j] = dot(basis[i], basis[j]);
  }
  RatVec coef;
  if (!solve_linear(G, rhs, coef))
    throw std::logic_error("projection: singular Gram matrix on a basis");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[j] += coef[i] * basis[i][j];
  return out;
}

}  // namespace rfm
