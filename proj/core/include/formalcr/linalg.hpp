#pragma once

// Dense exact linear algebra over Q(i). Matrices here are small (constant
// parts of Jacobians, jet-space Macaulay blocks), so a plain row-major
// vector-of-rows layout is enough.

#include <cstddef>
#include <optional>
#include <vector>

#include "formalcr/gaussian.hpp"

namespace formalcr {

using GaussRow = std::vector<Gaussian>;

class GaussMatrix {
public:
  GaussMatrix() = default;
  GaussMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static GaussMatrix identity(std::size_t n);
  static GaussMatrix from_rows(const std::vector<GaussRow>& rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Gaussian& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const Gaussian& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

  GaussMatrix transpose() const;
  bool is_zero() const;

  friend GaussMatrix operator*(const GaussMatrix& a, const GaussMatrix& b);
  friend bool operator==(const GaussMatrix& a, const GaussMatrix& b);

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Gaussian> a_;
};

struct EchelonForm {
  GaussMatrix reduced;               // reduced row echelon form
  std::vector<std::size_t> pivots;   // pivot column of each nonzero row
  std::size_t rank() const { return pivots.size(); }
};

/// Reduced row echelon form by Gauss-Jordan elimination in column order.
EchelonForm row_echelon(GaussMatrix m);

std::size_t rank(const GaussMatrix& m);
Gaussian determinant(const GaussMatrix& m);

/// det C + sum_i x_i det C_i(y), where C_i(y) is C with row i replaced by
/// y^t. Equals det(C + x y^t).
Gaussian rank_one_update_determinant(const GaussMatrix& C, const GaussRow& x, const GaussRow& y);

/// Inverse of a square matrix; nullopt when singular.
std::optional<GaussMatrix> inverse(const GaussMatrix& m);

/// Basis of {x : m x = 0}, one vector per free column.
std::vector<GaussRow> nullspace(const GaussMatrix& m);

/// Rank of a matrix with rational entries given as real and imaginary parts
/// side by side: the real matrix [Re A | -Im A].
std::size_t real_rank_of_split(const GaussMatrix& a);

}  // namespace formalcr
