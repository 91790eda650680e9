#include "odeco/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace odeco {

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

void normalize(Vector& a) {
  double n = norm(a);
  if (n < 1e-300) throw std::invalid_argument("normalize: zero vector");
  for (double& x : a) x /= n;
}

double sin_angle(const Vector& u, const Vector& v) {
  double nu = norm(u), nv = norm(v);
  if (nu < 1e-300 || nv < 1e-300) throw std::invalid_argument("sin_angle: zero vector");
  double c = dot(u, v) / (nu * nv);
  c = std::min(1.0, std::abs(c));
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_columns(const std::vector<Vector>& cols) {
  if (cols.empty()) return Matrix();
  Matrix m(cols[0].size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != m.rows()) throw std::invalid_argument("from_columns: ragged input");
    m.set_col(j, cols[j]);
  }
  return m;
}

Vector Matrix::col(std::size_t j) const {
  Vector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void Matrix::set_col(std::size_t j, const Vector& v) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

void Matrix::swap_cols(std::size_t i, std::size_t j) {
  for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, i), (*this)(r, j));
}

void Matrix::scale_col(std::size_t j, double s) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) *= s;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: shape mismatch");
  Matrix c(a.rows(), b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix multiply_at_b(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("multiply_at_b: shape mismatch");
  Matrix c(a.cols(), b.cols(), 0.0);
  for (std::size_t k = 0; k < a.rows(); ++k)
    for (std::size_t i = 0; i < a.cols(); ++i) {
      double aki = a(k, i);
      if (aki == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aki * b(k, j);
    }
  return c;
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (double x : m.data()) s += x * x;
  return std::sqrt(s);
}

namespace {

// Column dot products computed on the raw buffer for speed.
double col_dot(const Matrix& m, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) s += m(r, i) * m(r, j);
  return s;
}

void rotate_cols(Matrix& m, std::size_t i, std::size_t j, double c, double s) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double xi = m(r, i), xj = m(r, j);
    m(r, i) = c * xi - s * xj;
    m(r, j) = s * xi + c * xj;
  }
}

}  // namespace

SvdResult dense_svd(const Matrix& m) {
  for (double x : m.data())
    if (!std::isfinite(x)) throw std::invalid_argument("dense_svd: non-finite entry");

  const bool transposed = m.rows() < m.cols();
  Matrix b = transposed ? m.transposed() : m;
  const std::size_t n = b.cols();
  Matrix v = Matrix::identity(n);

  constexpr double kOffDiagTol = 1e-13;
  constexpr int kMaxSweeps = 64;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double alpha = col_dot(b, i, i);
        double beta = col_dot(b, j, j);
        double gamma = col_dot(b, i, j);
        if (std::abs(gamma) <= kOffDiagTol * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        rotated = true;
        double zeta = (beta - alpha) / (2.0 * gamma);
        double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = c * t;
        rotate_cols(b, i, j, c, s);
        rotate_cols(v, i, j, c, s);
      }
    }
    if (!rotated) break;
  }

  Vector sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(col_dot(b, j, j));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t c) { return sigma[a] > sigma[c]; });

  Matrix u(b.rows(), n);
  Matrix vperm(n, n);
  Vector values(n);
  std::size_t nonzero = 0;
  const double zero_cut = (n > 0 && sigma[order[0]] > 0.0) ? sigma[order[0]] * 1e-300 : 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t src = order[j];
    values[j] = sigma[src];
    vperm.set_col(j, v.col(src));
    if (sigma[src] > zero_cut && sigma[src] > 0.0) {
      Vector cu = b.col(src);
      for (double& x : cu) x /= sigma[src];
      u.set_col(j, cu);
      ++nonzero;
    }
  }
  if (nonzero < n) {
    // Null columns: fill with an orthonormal completion so u stays orthogonal.
    Matrix base(u.rows(), nonzero);
    for (std::size_t j = 0; j < nonzero; ++j) base.set_col(j, u.col(j));
    Matrix full = complete_orthonormal(base, n);
    for (std::size_t j = nonzero; j < n; ++j) u.set_col(j, full.col(j));
  }

  SvdResult out;
  if (transposed) {
    out.u = vperm;
    out.v = u;
  } else {
    out.u = u;
    out.v = vperm;
  }
  out.values = values;
  return out;
}

double operator_norm(const Matrix& m) {
  SvdResult s = dense_svd(m);
  return s.values.empty() ? 0.0 : s.values[0];
}

bool orthonormalize_columns(Matrix& m) {
  bool ok = true;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    Vector c = m.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        Vector prev = m.col(k);
        double proj = dot(c, prev);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] -= proj * prev[i];
      }
    }
    double n = norm(c);
    if (n < 1e-12) {
      ok = false;
      n = n > 0.0 ? n : 1.0;
    }
    for (double& x : c) x /= n;
    m.set_col(j, c);
  }
  return ok;
}

Matrix complete_orthonormal(const Matrix& m, std::size_t target_cols) {
  if (target_cols > m.rows()) throw std::invalid_argument("complete_orthonormal: too many columns");
  Matrix out(m.rows(), target_cols);
  for (std::size_t j = 0; j < m.cols(); ++j) out.set_col(j, m.col(j));
  std::size_t have = m.cols();
  for (std::size_t e = 0; e < m.rows() && have < target_cols; ++e) {
    Vector c(m.rows(), 0.0);
    c[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < have; ++k) {
        Vector prev = out.col(k);
        double proj = dot(c, prev);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] -= proj * prev[i];
      }
    }
    double n = norm(c);
    if (n < 0.5) continue;  // basis vector already (nearly) spanned
    for (double& x : c) x /= n;
    out.set_col(have++, c);
  }
  if (have < target_cols) throw std::runtime_error("complete_orthonormal: completion failed");
  return out;
}

}  // namespace odeco
