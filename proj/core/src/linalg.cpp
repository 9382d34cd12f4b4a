#include "formalcr/linalg.hpp"

#include "formalcr/errors.hpp"

namespace formalcr {

GaussMatrix GaussMatrix::identity(std::size_t n) {
  GaussMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Gaussian(1);
  return m;
}

GaussMatrix GaussMatrix::from_rows(const std::vector<GaussRow>& rows, std::size_t cols) {
  GaussMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw StructuralError("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

GaussMatrix GaussMatrix::transpose() const {
  GaussMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool GaussMatrix::is_zero() const {
  for (const auto& x : a_)
    if (!x.is_zero()) return false;
  return true;
}

GaussMatrix operator*(const GaussMatrix& a, const GaussMatrix& b) {
  if (a.cols_ != b.rows_) throw StructuralError("matrix product shape mismatch");
  GaussMatrix p(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Gaussian& x = a(i, k);
      if (x.is_zero()) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) p(i, j).add_product(x, b(k, j));
    }
  return p;
}

bool operator==(const GaussMatrix& a, const GaussMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
}

EchelonForm row_echelon(GaussMatrix m) {
  EchelonForm out;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t piv = row;
    while (piv < m.rows() && m(piv, col).is_zero()) ++piv;
    if (piv == m.rows()) continue;
    if (piv != row)
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(piv, c), m(row, c));
    const Gaussian inv = Gaussian(1) / m(row, col);
    for (std::size_t c = col; c < m.cols(); ++c) m(row, c) *= inv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col).is_zero()) continue;
      const Gaussian f = m(r, col);
      for (std::size_t c = col; c < m.cols(); ++c) {
        if (!m(row, c).is_zero()) m(r, c) -= f * m(row, c);
      }
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.reduced = std::move(m);
  return out;
}

std::size_t rank(const GaussMatrix& m) { return row_echelon(m).rank(); }

Gaussian determinant(const GaussMatrix& m0) {
  if (m0.rows() != m0.cols()) throw StructuralError("determinant of a non-square matrix");
  GaussMatrix m = m0;
  const std::size_t n = m.rows();
  Gaussian det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m(piv, col).is_zero()) ++piv;
    if (piv == n) return Gaussian(0);
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m(piv, c), m(col, c));
      det = -det;
    }
    det *= m(col, col);
    const Gaussian inv = Gaussian(1) / m(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      if (m(r, col).is_zero()) continue;
      const Gaussian f = m(r, col) * inv;
      for (std::size_t c = col; c < n; ++c) m(r, c) -= f * m(col, c);
    }
  }
  return det;
}

std::optional<GaussMatrix> inverse(const GaussMatrix& m) {
  if (m.rows() != m.cols()) throw StructuralError("inverse of a non-square matrix");
  const std::size_t n = m.rows();
  GaussMatrix aug(n, 2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) aug(r, c) = m(r, c);
    aug(r, n + r) = Gaussian(1);
  }
  EchelonForm e = row_echelon(std::move(aug));
  if (e.rank() < n || e.pivots[n - 1] != n - 1) return std::nullopt;
  GaussMatrix inv(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) inv(r, c) = e.reduced(r, n + c);
  return inv;
}

std::vector<GaussRow> nullspace(const GaussMatrix& m) {
  EchelonForm e = row_echelon(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<GaussRow> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    GaussRow v(m.cols());
    v[free] = Gaussian(1);
    for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.reduced(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::size_t real_rank_of_split(const GaussMatrix& a) {
  GaussMatrix real(a.rows(), 2 * a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) {
      real(r, c) = Gaussian(a(r, c).re());
      real(r, a.cols() + c) = Gaussian(Rational(-a(r, c).im()));
    }
  return rank(real);
}

Gaussian rank_one_update_determinant(const GaussMatrix& C, const GaussRow& x, const GaussRow& y) {
  const std::size_t n = C.rows();
  if (C.cols() != n || x.size() != n || y.size() != n)
    throw StructuralError("rank_one_update_determinant: shape mismatch");
  Gaussian out = determinant(C);
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i].is_zero()) continue;
    GaussMatrix Ci = C;
    for (std::size_t c = 0; c < n; ++c) Ci(i, c) = y[c];
    out += x[i] * determinant(Ci);
  }
  return out;
}

}  // namespace formalcr
