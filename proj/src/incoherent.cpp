#include "odeco/incoherent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace odeco {

IncoherentCp::IncoherentCp(std::vector<std::size_t> d, Vector e, std::vector<Matrix> f)
    : dims(std::move(d)), etas(std::move(e)), factors(std::move(f)) {
  const std::size_t p = dims.size();
  if (p < 2) throw std::invalid_argument("IncoherentCp: order must be >= 2");
  if (factors.size() != p) throw std::invalid_argument("IncoherentCp: need one factor per mode");
  const std::size_t r = etas.size();
  if (r == 0) throw std::invalid_argument("IncoherentCp: empty decomposition");
  std::size_t dmin = *std::min_element(dims.begin(), dims.end());
  if (r > dmin) throw std::invalid_argument("IncoherentCp: rank exceeds min dimension");
  for (std::size_t k = 0; k + 1 < r; ++k)
    if (etas[k] < etas[k + 1]) throw std::invalid_argument("IncoherentCp: etas must be descending");
  if (etas[r - 1] <= 0.0) throw std::invalid_argument("IncoherentCp: etas must be positive");
  for (std::size_t q = 0; q < p; ++q) {
    if (factors[q].rows() != dims[q] || factors[q].cols() != r)
      throw std::invalid_argument("IncoherentCp: factor shape mismatch");
    for (std::size_t k = 0; k < r; ++k) {
      double n = norm(factors[q].col(k));
      if (std::abs(n - 1.0) > 1e-10)
        throw std::invalid_argument("IncoherentCp: factor columns must be unit");
    }
  }
  for (std::size_t q = 0; q < p; ++q) delta = std::max(delta, isometry_delta(factors[q]));
}

double isometry_delta(const Matrix& a) {
  if (a.cols() > a.rows()) throw std::invalid_argument("isometry_delta: more columns than rows");
  SvdResult svd = dense_svd(a);
  double worst = 0.0;
  for (double s : svd.values) worst = std::max(worst, std::abs(s - 1.0));
  return worst;
}

Matrix polar_factor(const Matrix& a) {
  SvdResult svd = dense_svd(a);
  const std::size_t k = svd.values.size();
  if (k == 0 || svd.values[k - 1] <= 1e-12 * std::max(1.0, svd.values[0]))
    throw std::invalid_argument("polar_factor: rank-deficient input");
  return multiply(svd.u, svd.v.transposed());
}

DenseTensor to_dense(const IncoherentCp& x) {
  const std::size_t p = x.order();
  DenseTensor out(x.dims);
  std::vector<std::size_t> idx(p, 0);
  for (std::size_t k = 0; k < x.rank(); ++k) {
    std::fill(idx.begin(), idx.end(), 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
      double w = x.etas[k];
      for (std::size_t q = 0; q < p; ++q) w *= x.factors[q](idx[q], k);
      out[flat] += w;
      for (std::size_t s = p; s-- > 0;) {
        if (++idx[s] < x.dims[s]) break;
        idx[s] = 0;
      }
    }
  }
  return out;
}

OdecoTensor odeco_projection(const IncoherentCp& x) {
  const std::size_t p = x.order();
  std::size_t dmin = *std::min_element(x.dims.begin(), x.dims.end());
  std::vector<Matrix> factors(p);
  for (std::size_t q = 0; q < p; ++q)
    factors[q] = complete_orthonormal(polar_factor(x.factors[q]), dmin);
  Vector lambdas(dmin, 0.0);
  std::copy(x.etas.begin(), x.etas.end(), lambdas.begin());
  return OdecoTensor(x.dims, std::move(lambdas), std::move(factors));
}

IncoherentReport verify_incoherent(const IncoherentCp& x, const IncoherentCp& y,
                                   const NormConfig& cfg) {
  if (x.dims != y.dims) throw std::invalid_argument("verify_incoherent: dims mismatch");
  const std::size_t p = x.order();

  IncoherentReport rep;
  rep.delta = std::max(x.delta, y.delta);
  rep.cp_distance = spectral_norm(tensor_sub(to_dense(x), to_dense(y)), cfg).value;

  OdecoTensor tx = odeco_projection(x);
  OdecoTensor ty = odeco_projection(y);
  rep.matching = match_tuples(tx, ty);

  double base = (p + 1) * rep.delta * (x.etas[0] + y.etas[0]) + rep.cp_distance;
  rep.all_pass = true;
  const std::size_t kmax = std::min(x.rank(), y.rank());
  for (std::size_t k = 0; k < kmax; ++k) {
    std::size_t j = rep.matching.pi[k];
    IncoherentRow row;
    row.k = k;
    row.eta = x.etas[k];
    row.eta_tilde = j < y.rank() ? y.etas[j] : 0.0;
    row.gap = std::abs(row.eta - row.eta_tilde);
    for (std::size_t q = 0; q < p; ++q) {
      if (j >= y.rank()) {
        row.max_sin = 1.0;
        break;
      }
      row.max_sin = std::max(row.max_sin, sin_angle(x.factors[q].col(k), y.factors[q].col(j)));
    }
    row.bound_value = 17.0 * base;
    row.bound_angle = 17.0 * (base + rep.delta) / row.eta;
    row.ratio_value = base > 0.0 ? row.gap / base : 0.0;
    row.ratio_angle = (base + rep.delta) > 0.0 ? row.max_sin * row.eta / (base + rep.delta) : 0.0;
    row.pass = row.gap <= row.bound_value + 1e-8 && row.max_sin <= row.bound_angle + 1e-8;
    rep.all_pass = rep.all_pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

void write_incoherent(std::ostream& os, const IncoherentCp& x) {
  os.precision(17);
  os << x.order();
  for (std::size_t d : x.dims) os << ' ' << d;
  os << ' ' << x.rank() << '\n';
  for (std::size_t k = 0; k < x.rank(); ++k) os << (k ? " " : "") << x.etas[k];
  os << '\n';
  for (std::size_t q = 0; q < x.order(); ++q) {
    const Matrix& a = x.factors[q];
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < a.cols(); ++j) os << (j ? " " : "") << a(i, j);
      os << '\n';
    }
  }
}

IncoherentCp read_incoherent(std::istream& is) {
  std::size_t p = 0;
  if (!(is >> p) || p < 2) throw std::runtime_error("incoherent parse: bad order");
  std::vector<std::size_t> dims(p);
  for (auto& d : dims)
    if (!(is >> d) || d == 0) throw std::runtime_error("incoherent parse: bad dimension");
  std::size_t r = 0;
  if (!(is >> r) || r == 0) throw std::runtime_error("incoherent parse: bad rank");
  Vector etas(r);
  for (auto& e : etas) {
    if (!(is >> e)) throw std::runtime_error("incoherent parse: truncated etas");
    if (!std::isfinite(e)) throw std::runtime_error("incoherent parse: non-finite eta");
  }
  std::vector<Matrix> factors;
  for (std::size_t q = 0; q < p; ++q) {
    Matrix a(dims[q], r);
    for (std::size_t i = 0; i < dims[q]; ++i)
      for (std::size_t j = 0; j < r; ++j) {
        if (!(is >> a(i, j))) throw std::runtime_error("incoherent parse: truncated factors");
        if (!std::isfinite(a(i, j))) throw std::runtime_error("incoherent parse: non-finite entry");
      }
    factors.push_back(std::move(a));
  }
  return IncoherentCp(dims, std::move(etas), std::move(factors));
}

void write_incoherent_file(const std::string& path, const IncoherentCp& x) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_incoherent(f, x);
  if (!f) throw std::runtime_error("write failed: " + path);
}

IncoherentCp read_incoherent_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return read_incoherent(f);
}

}  // namespace odeco
