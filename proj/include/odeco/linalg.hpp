#pragma once

#include <cstddef>
#include <vector>

namespace odeco {

using Vector = std::vector<double>;

double dot(const Vector& a, const Vector& b);
double norm(const Vector& a);
void normalize(Vector& a);  // throws on (near-)zero input

/// sin of the acute angle between u and v, in [0, 1]. Symmetric and
/// sign-invariant; throws on zero input.
double sin_angle(const Vector& u, const Vector& v);

// Dense row-major matrix. Columns are the unit of work almost everywhere
// (factor matrices store one vector per column).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_columns(const std::vector<Vector>& cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Vector col(std::size_t j) const;
  void set_col(std::size_t j, const Vector& v);
  void swap_cols(std::size_t i, std::size_t j);
  void scale_col(std::size_t j, double s);

  Matrix transposed() const;
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
Matrix multiply_at_b(const Matrix& a, const Matrix& b);  // a^T * b
double frobenius_norm(const Matrix& m);

struct SvdResult {
  Matrix u;        // rows(m) x k, orthonormal columns
  Vector values;   // k singular values, descending
  Matrix v;        // cols(m) x k, orthonormal columns;  m = u diag(values) v^T
};

// One-sided Jacobi SVD (Hestenes): plane rotations orthogonalize the columns
// of the tall side until the relative off-diagonal mass drops below 1e-13.
// k = min(rows, cols). Zero singular values get orthonormal completion
// columns in u.
SvdResult dense_svd(const Matrix& m);

// Largest singular value.
double operator_norm(const Matrix& m);

// In-place modified Gram-Schmidt on columns; two passes. Returns false if a
// column is (numerically) dependent on the previous ones.
bool orthonormalize_columns(Matrix& m);

// Appends orthonormal columns (seeded from the standard basis) until the
// matrix has `target_cols` columns. Existing columns must be orthonormal.
Matrix complete_orthonormal(const Matrix& m, std::size_t target_cols);

}  // namespace odeco
