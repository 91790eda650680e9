#include "odeco/odeco_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "odeco/rng.hpp"

namespace odeco {

OdecoTensor::OdecoTensor(std::vector<std::size_t> dims, Vector lambdas, std::vector<Matrix> factors)
    : dims_(std::move(dims)), lambdas_(std::move(lambdas)), factors_(std::move(factors)) {
  const std::size_t p = dims_.size();
  if (p < 2) throw std::invalid_argument("OdecoTensor: order must be >= 2");
  std::size_t dmin = *std::min_element(dims_.begin(), dims_.end());
  if (lambdas_.size() != dmin) throw std::invalid_argument("OdecoTensor: need d_min lambdas");
  if (factors_.size() != p) throw std::invalid_argument("OdecoTensor: need one factor per mode");
  for (std::size_t q = 0; q < p; ++q)
    if (factors_[q].rows() != dims_[q] || factors_[q].cols() != dmin)
      throw std::invalid_argument("OdecoTensor: factor shape mismatch");
  for (double l : lambdas_)
    if (!std::isfinite(l)) throw std::invalid_argument("OdecoTensor: non-finite lambda");

  // Canonical signs: lambda >= 0, absorbing flips into the mode-1 column.
  for (std::size_t k = 0; k < dmin; ++k) {
    if (lambdas_[k] < 0.0) {
      lambdas_[k] = -lambdas_[k];
      factors_[0].scale_col(k, -1.0);
    }
  }
  std::vector<std::size_t> order(dmin);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lambdas_[a] > lambdas_[b]; });
  bool sorted = std::is_sorted(order.begin(), order.end());
  if (!sorted) {
    Vector nl(dmin);
    std::vector<Matrix> nf(p);
    for (std::size_t q = 0; q < p; ++q) nf[q] = Matrix(dims_[q], dmin);
    for (std::size_t k = 0; k < dmin; ++k) {
      nl[k] = lambdas_[order[k]];
      for (std::size_t q = 0; q < p; ++q) nf[q].set_col(k, factors_[q].col(order[k]));
    }
    lambdas_ = std::move(nl);
    factors_ = std::move(nf);
  }
}

std::size_t OdecoTensor::rank() const {
  std::size_t r = 0;
  for (double l : lambdas_)
    if (l > 0.0) ++r;
  return r;
}

bool OdecoDiagnostics::ok(double tol) const {
  for (double v : orthonormality_violation)
    if (v > tol) return false;
  return ordering_violation <= tol && negativity_violation <= tol;
}

OdecoDiagnostics validate(const OdecoTensor& t, double tol) {
  (void)tol;
  OdecoDiagnostics d;
  for (std::size_t q = 0; q < t.order(); ++q) {
    const Matrix& u = t.factor(q);
    Matrix g = multiply_at_b(u, u);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j)
        worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    d.orthonormality_violation.push_back(worst);
  }
  const Vector& l = t.lambdas();
  for (std::size_t k = 0; k + 1 < l.size(); ++k)
    d.ordering_violation = std::max(d.ordering_violation, l[k + 1] - l[k]);
  for (double x : l) d.negativity_violation = std::max(d.negativity_violation, -x);
  d.ordering_violation = std::max(d.ordering_violation, 0.0);
  d.negativity_violation = std::max(d.negativity_violation, 0.0);
  return d;
}

DenseTensor to_dense(const OdecoTensor& t) {
  const std::size_t p = t.order();
  DenseTensor out(t.dims());
  const auto& dims = t.dims();
  std::vector<std::size_t> idx(p, 0);
  for (std::size_t k = 0; k < t.d_min(); ++k) {
    double l = t.lambdas()[k];
    if (l == 0.0) continue;
    std::fill(idx.begin(), idx.end(), 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
      double w = l;
      for (std::size_t q = 0; q < p; ++q) w *= t.factor(q)(idx[q], k);
      out[flat] += w;
      for (std::size_t s = p; s-- > 0;) {
        if (++idx[s] < dims[s]) break;
        idx[s] = 0;
      }
    }
  }
  return out;
}

OdecoTensor random_odeco(const std::vector<std::size_t>& dims, std::size_t r,
                         const Vector& lambdas, std::uint64_t seed) {
  if (dims.size() < 2) throw std::invalid_argument("random_odeco: order must be >= 2");
  std::size_t dmin = *std::min_element(dims.begin(), dims.end());
  if (r > dmin) throw std::invalid_argument("random_odeco: r exceeds min dimension");
  if (lambdas.size() != r) throw std::invalid_argument("random_odeco: need r lambdas");

  Rng rng(seed);
  std::vector<Matrix> factors;
  for (std::size_t q = 0; q < dims.size(); ++q) {
    Matrix g(dims[q], dmin);
    for (double& x : g.data()) x = rng.gaussian();
    if (!orthonormalize_columns(g)) throw std::runtime_error("random_odeco: degenerate sample");
    factors.push_back(std::move(g));
  }
  Vector full(dmin, 0.0);
  std::copy(lambdas.begin(), lambdas.end(), full.begin());
  return OdecoTensor(dims, std::move(full), std::move(factors));
}

double tuple_residual(const DenseTensor& t, const SingularTuple& tuple) {
  const std::size_t p = t.order();
  double worst = 0.0;
  for (std::size_t q = 0; q < p; ++q) {
    std::vector<Vector> others;
    for (std::size_t s = 0; s < p; ++s)
      if (s != q) others.push_back(tuple.vectors[s]);
    Vector w = contract_all_but(t, q, others);
    double err = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      double e = w[i] - tuple.value * tuple.vectors[q][i];
      err += e * e;
    }
    worst = std::max(worst, std::sqrt(err));
  }
  return worst;
}

SingularTuple enumerate_tuple(const OdecoTensor& t, const std::vector<std::size_t>& subset,
                              const std::vector<std::vector<int>>& signs) {
  const std::size_t p = t.order();
  if (p < 3) throw std::invalid_argument("enumerate_tuple: requires order >= 3");
  if (subset.empty()) throw std::invalid_argument("enumerate_tuple: empty subset");
  if (signs.size() != subset.size())
    throw std::invalid_argument("enumerate_tuple: one sign row per subset element");
  for (std::size_t k : subset) {
    if (k >= t.d_min()) throw std::invalid_argument("enumerate_tuple: index out of range");
    if (!(t.lambdas()[k] > 0.0))
      throw std::invalid_argument("enumerate_tuple: subset contains a zero singular value");
  }
  for (const auto& row : signs) {
    if (row.size() != p - 1) throw std::invalid_argument("enumerate_tuple: malformed signs");
    for (int s : row)
      if (s != 1 && s != -1) throw std::invalid_argument("enumerate_tuple: malformed signs");
  }

  const double expo = 2.0 / static_cast<double>(p - 2);
  double acc = 0.0;
  for (std::size_t k : subset) acc += std::pow(t.lambdas()[k], -expo);
  double lambda = std::pow(acc, -1.0 / expo);

  SingularTuple out;
  out.value = lambda;
  out.active_set = subset;
  out.signs.resize(subset.size());
  for (std::size_t i = 0; i < subset.size(); ++i) {
    int chi1 = 1;
    for (int s : signs[i]) chi1 *= s;
    out.signs[i].push_back(chi1);
    for (int s : signs[i]) out.signs[i].push_back(s);
  }
  out.vectors.resize(p);
  for (std::size_t q = 0; q < p; ++q) {
    Vector v(t.dim(q), 0.0);
    for (std::size_t i = 0; i < subset.size(); ++i) {
      std::size_t k = subset[i];
      double coeff = out.signs[i][q] * std::pow(lambda / t.lambdas()[k], 1.0 / (p - 2));
      for (std::size_t row = 0; row < v.size(); ++row) v[row] += coeff * t.factor(q)(row, k);
    }
    out.vectors[q] = std::move(v);
  }
  return out;
}

std::vector<SingularTuple> all_positive_tuples(const OdecoTensor& t) {
  const std::size_t p = t.order();
  std::vector<std::size_t> positive;
  for (std::size_t k = 0; k < t.d_min(); ++k)
    if (t.lambdas()[k] > 0.0) positive.push_back(k);
  std::vector<SingularTuple> out;
  const std::size_t r = positive.size();
  for (std::size_t mask = 1; mask < (std::size_t(1) << r); ++mask) {
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < r; ++i)
      if (mask & (std::size_t(1) << i)) subset.push_back(positive[i]);
    const std::size_t nsign = subset.size() * (p - 1);
    for (std::size_t bits = 0; bits < (std::size_t(1) << nsign); ++bits) {
      std::vector<std::vector<int>> signs(subset.size(), std::vector<int>(p - 1, 1));
      for (std::size_t b = 0; b < nsign; ++b)
        if (bits & (std::size_t(1) << b)) signs[b / (p - 1)][b % (p - 1)] = -1;
      out.push_back(enumerate_tuple(t, subset, signs));
    }
  }
  return out;
}

bool zero_tuple_check(const OdecoTensor& t, const Rank1Point& x) {
  if (x.order() != t.order()) throw std::invalid_argument("zero_tuple_check: order mismatch");
  constexpr double kTol = 1e-10;
  for (std::size_t k = 0; k < t.d_min(); ++k) {
    int orthogonal_modes = 0;
    for (std::size_t q = 0; q < t.order(); ++q) {
      double ip = dot(x.factors[q], t.factor_column(q, k));
      if (std::abs(ip) <= kTol) ++orthogonal_modes;
    }
    if (orthogonal_modes < 2) return false;
  }
  return true;
}

void write_odeco(std::ostream& os, const OdecoTensor& t) {
  os.precision(17);
  os << t.order();
  for (std::size_t d : t.dims()) os << ' ' << d;
  os << ' ' << t.d_min() << '\n';
  for (std::size_t k = 0; k < t.d_min(); ++k) os << (k ? " " : "") << t.lambdas()[k];
  os << '\n';
  for (std::size_t q = 0; q < t.order(); ++q) {
    const Matrix& u = t.factor(q);
    for (std::size_t i = 0; i < u.rows(); ++i) {
      for (std::size_t j = 0; j < u.cols(); ++j) os << (j ? " " : "") << u(i, j);
      os << '\n';
    }
  }
}

OdecoTensor read_odeco(std::istream& is) {
  std::size_t p = 0;
  if (!(is >> p) || p < 2) throw std::runtime_error("odeco parse: bad order");
  std::vector<std::size_t> dims(p);
  for (auto& d : dims)
    if (!(is >> d) || d == 0) throw std::runtime_error("odeco parse: bad dimension");
  std::size_t r = 0;
  if (!(is >> r)) throw std::runtime_error("odeco parse: bad rank");
  std::size_t dmin = *std::min_element(dims.begin(), dims.end());
  if (r > dmin) throw std::runtime_error("odeco parse: r exceeds min dimension");

  Vector lambdas(r);
  for (auto& l : lambdas) {
    if (!(is >> l)) throw std::runtime_error("odeco parse: truncated lambdas");
    if (!std::isfinite(l)) throw std::runtime_error("odeco parse: non-finite lambda");
  }
  std::vector<Matrix> factors;
  for (std::size_t q = 0; q < p; ++q) {
    Matrix u(dims[q], r);
    for (std::size_t i = 0; i < dims[q]; ++i)
      for (std::size_t j = 0; j < r; ++j) {
        if (!(is >> u(i, j))) throw std::runtime_error("odeco parse: truncated factors");
        if (!std::isfinite(u(i, j))) throw std::runtime_error("odeco parse: non-finite entry");
      }
    if (r < dmin) u = complete_orthonormal(u, dmin);
    factors.push_back(std::move(u));
  }
  Vector full(dmin, 0.0);
  std::copy(lambdas.begin(), lambdas.end(), full.begin());
  return OdecoTensor(dims, std::move(full), std::move(factors));
}

void write_odeco_file(const std::string& path, const OdecoTensor& t) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_odeco(f, t);
  if (!f) throw std::runtime_error("write failed: " + path);
}

OdecoTensor read_odeco_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return read_odeco(f);
}

}  // namespace odeco
