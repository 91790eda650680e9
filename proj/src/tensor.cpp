#include "odeco/tensor.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "odeco/rng.hpp"

namespace odeco {

namespace {

std::size_t checked_size(const std::vector<std::size_t>& dims) {
  if (dims.size() < 2) throw std::invalid_argument("DenseTensor: order must be >= 2");
  std::size_t n = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("DenseTensor: zero dimension");
    n *= d;
  }
  return n;
}

void check_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("DenseTensor: non-finite value");
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> dims)
    : dims_(std::move(dims)), values_(checked_size(dims_), 0.0) {}

DenseTensor::DenseTensor(std::vector<std::size_t> dims, std::vector<double> values)
    : dims_(std::move(dims)), values_(std::move(values)) {
  if (values_.size() != checked_size(dims_))
    throw std::invalid_argument("DenseTensor: value count does not match dims");
  check_finite(values_);
}

std::size_t DenseTensor::flat_index(const std::vector<std::size_t>& idx) const {
  if (idx.size() != dims_.size()) throw std::invalid_argument("flat_index: wrong arity");
  std::size_t f = 0;
  for (std::size_t s = 0; s < dims_.size(); ++s) {
    if (idx[s] >= dims_[s]) throw std::invalid_argument("flat_index: out of range");
    f = f * dims_[s] + idx[s];
  }
  return f;
}

Vector contract_all_but(const DenseTensor& t, std::size_t mode, const std::vector<Vector>& vectors) {
  const std::size_t p = t.order();
  if (mode >= p) throw std::invalid_argument("contract_all_but: mode out of range");
  if (vectors.size() != p - 1) throw std::invalid_argument("contract_all_but: need p-1 vectors");
  {
    std::size_t vi = 0;
    for (std::size_t s = 0; s < p; ++s) {
      if (s == mode) continue;
      if (vectors[vi].size() != t.dim(s))
        throw std::invalid_argument("contract_all_but: vector length mismatch");
      ++vi;
    }
  }

  const auto& vals = t.values();
  Vector out(t.dim(mode), 0.0);

  if (p == 3) {
    const std::size_t d0 = t.dim(0), d1 = t.dim(1), d2 = t.dim(2);
    const double* a = vals.data();
    if (mode == 0) {
      const Vector& v1 = vectors[0];
      const Vector& v2 = vectors[1];
      for (std::size_t i = 0; i < d0; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d1; ++j) {
          const double* row = a + (i * d1 + j) * d2;
          double w = v1[j];
          double inner = 0.0;
          for (std::size_t k = 0; k < d2; ++k) inner += row[k] * v2[k];
          acc += w * inner;
        }
        out[i] = acc;
      }
    } else if (mode == 1) {
      const Vector& v0 = vectors[0];
      const Vector& v2 = vectors[1];
      for (std::size_t i = 0; i < d0; ++i) {
        double w0 = v0[i];
        if (w0 == 0.0) continue;
        for (std::size_t j = 0; j < d1; ++j) {
          const double* row = a + (i * d1 + j) * d2;
          double inner = 0.0;
          for (std::size_t k = 0; k < d2; ++k) inner += row[k] * v2[k];
          out[j] += w0 * inner;
        }
      }
    } else {
      const Vector& v0 = vectors[0];
      const Vector& v1 = vectors[1];
      for (std::size_t i = 0; i < d0; ++i) {
        double w0 = v0[i];
        if (w0 == 0.0) continue;
        for (std::size_t j = 0; j < d1; ++j) {
          const double* row = a + (i * d1 + j) * d2;
          double w = w0 * v1[j];
          for (std::size_t k = 0; k < d2; ++k) out[k] += row[k] * w;
        }
      }
    }
    return out;
  }

  const auto& dims = t.dims();
  std::vector<std::size_t> idx(p, 0);
  for (std::size_t flat = 0; flat < vals.size(); ++flat) {
    double w = 1.0;
    std::size_t vi = 0;
    for (std::size_t s = 0; s < p; ++s) {
      if (s == mode) continue;
      w *= vectors[vi][idx[s]];
      ++vi;
    }
    out[idx[mode]] += vals[flat] * w;
    for (std::size_t s = p; s-- > 0;) {
      if (++idx[s] < dims[s]) break;
      idx[s] = 0;
    }
  }
  return out;
}

double rank1_value(const DenseTensor& t, const Rank1Point& x) {
  const std::size_t p = t.order();
  if (x.order() != p) throw std::invalid_argument("rank1_value: order mismatch");
  for (std::size_t s = 0; s < p; ++s)
    if (x.factors[s].size() != t.dim(s))
      throw std::invalid_argument("rank1_value: factor length mismatch");

  const auto& vals = t.values();
  if (p == 3) {
    const std::size_t d0 = t.dim(0), d1 = t.dim(1), d2 = t.dim(2);
    const Vector& v0 = x.factors[0];
    const Vector& v1 = x.factors[1];
    const Vector& v2 = x.factors[2];
    double acc = 0.0;
    for (std::size_t i = 0; i < d0; ++i) {
      if (v0[i] == 0.0) continue;
      double acc_i = 0.0;
      for (std::size_t j = 0; j < d1; ++j) {
        const double* row = vals.data() + (i * d1 + j) * d2;
        double inner = 0.0;
        for (std::size_t k = 0; k < d2; ++k) inner += row[k] * v2[k];
        acc_i += v1[j] * inner;
      }
      acc += v0[i] * acc_i;
    }
    return acc;
  }

  const auto& dims = t.dims();
  std::vector<std::size_t> idx(p, 0);
  double acc = 0.0;
  for (std::size_t flat = 0; flat < vals.size(); ++flat) {
    double w = vals[flat];
    for (std::size_t s = 0; s < p; ++s) w *= x.factors[s][idx[s]];
    acc += w;
    for (std::size_t s = p; s-- > 0;) {
      if (++idx[s] < dims[s]) break;
      idx[s] = 0;
    }
  }
  return acc;
}

Matrix matricize(const DenseTensor& t, std::size_t mode) {
  const std::size_t p = t.order();
  if (mode >= p) throw std::invalid_argument("matricize: mode out of range");
  std::size_t ncols = 1;
  for (std::size_t s = 0; s < p; ++s)
    if (s != mode) ncols *= t.dim(s);
  Matrix m(t.dim(mode), ncols);

  const auto& dims = t.dims();
  const auto& vals = t.values();
  std::vector<std::size_t> idx(p, 0);
  for (std::size_t flat = 0; flat < vals.size(); ++flat) {
    std::size_t col = 0;
    for (std::size_t s = 0; s < p; ++s) {
      if (s == mode) continue;
      col = col * dims[s] + idx[s];
    }
    m(idx[mode], col) = vals[flat];
    for (std::size_t s = p; s-- > 0;) {
      if (++idx[s] < dims[s]) break;
      idx[s] = 0;
    }
  }
  return m;
}

DenseTensor dematricize(const Matrix& m, std::size_t mode, const std::vector<std::size_t>& dims) {
  DenseTensor t(dims);
  const std::size_t p = dims.size();
  if (mode >= p) throw std::invalid_argument("dematricize: mode out of range");
  std::size_t ncols = 1;
  for (std::size_t s = 0; s < p; ++s)
    if (s != mode) ncols *= dims[s];
  if (m.rows() != dims[mode] || m.cols() != ncols)
    throw std::invalid_argument("dematricize: shape mismatch");

  std::vector<std::size_t> idx(p, 0);
  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    std::size_t col = 0;
    for (std::size_t s = 0; s < p; ++s) {
      if (s == mode) continue;
      col = col * dims[s] + idx[s];
    }
    t[flat] = m(idx[mode], col);
    for (std::size_t s = p; s-- > 0;) {
      if (++idx[s] < dims[s]) break;
      idx[s] = 0;
    }
  }
  return t;
}

Matrix khatri_rao(const std::vector<Matrix>& mats) {
  if (mats.empty()) throw std::invalid_argument("khatri_rao: empty input");
  const std::size_t r = mats[0].cols();
  std::size_t rows = 1;
  for (const Matrix& m : mats) {
    if (m.cols() != r) throw std::invalid_argument("khatri_rao: column-count mismatch");
    rows *= m.rows();
  }
  Matrix out(rows, r);
  for (std::size_t j = 0; j < r; ++j) {
    Vector acc{1.0};
    for (const Matrix& m : mats) {
      Vector next(acc.size() * m.rows());
      for (std::size_t a = 0; a < acc.size(); ++a)
        for (std::size_t b = 0; b < m.rows(); ++b) next[a * m.rows() + b] = acc[a] * m(b, j);
      acc = std::move(next);
    }
    out.set_col(j, acc);
  }
  return out;
}

double max_mode_sin_angle(const Rank1Point& a, const Rank1Point& b) {
  if (a.order() != b.order()) throw std::invalid_argument("max_mode_sin_angle: order mismatch");
  double worst = 0.0;
  for (std::size_t q = 0; q < a.order(); ++q)
    worst = std::max(worst, sin_angle(a.factors[q], b.factors[q]));
  return worst;
}

namespace {

constexpr double kDegenerate = 1e-300;

// Simultaneous normalized-gradient step; false if some contraction vanishes.
bool g_step(const DenseTensor& t, const Rank1Point& x, Rank1Point& out) {
  const std::size_t p = t.order();
  out.factors.resize(p);
  for (std::size_t q = 0; q < p; ++q) {
    std::vector<Vector> others;
    others.reserve(p - 1);
    for (std::size_t s = 0; s < p; ++s)
      if (s != q) others.push_back(x.factors[s]);
    Vector w = contract_all_but(t, q, others);
    double n = norm(w);
    if (!(n > kDegenerate)) return false;
    for (double& e : w) e /= n;
    out.factors[q] = std::move(w);
  }
  return true;
}

// Cyclic per-mode ascent of |<T, .>|; each update is the exact maximizer for
// its mode, so the objective is nondecreasing. Returns the final objective.
double cyclic_polish(const DenseTensor& t, Rank1Point& x, int max_sweeps) {
  const std::size_t p = t.order();
  double value = std::abs(rank1_value(t, x));
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double before = value;
    for (std::size_t q = 0; q < p; ++q) {
      std::vector<Vector> others;
      others.reserve(p - 1);
      for (std::size_t s = 0; s < p; ++s)
        if (s != q) others.push_back(x.factors[s]);
      Vector w = contract_all_but(t, q, others);
      double n = norm(w);
      if (!(n > kDegenerate)) return value;
      for (double& e : w) e /= n;
      x.factors[q] = std::move(w);
      value = n;
    }
    if (value - before <= 1e-14 * std::max(1.0, value)) break;
  }
  return value;
}

}  // namespace

SpectralNormResult spectral_norm(const DenseTensor& t, const NormConfig& cfg) {
  if (cfg.restarts < 1) throw std::invalid_argument("spectral_norm: restarts must be >= 1");
  if (cfg.max_iter < 1) throw std::invalid_argument("spectral_norm: max_iter must be >= 1");
  const std::size_t p = t.order();

  SpectralNormResult best;
  best.value = -1.0;
  for (int trial = 0; trial < cfg.restarts; ++trial) {
    Rng rng = Rng::derive(cfg.seed, static_cast<std::uint64_t>(trial));
    int attempts = 0;
  resample:
    Rank1Point x;
    x.factors.reserve(p);
    for (std::size_t q = 0; q < p; ++q) x.factors.push_back(rng.unit_vector(t.dim(q)));

    Rank1Point next;
    for (int it = 0; it < cfg.max_iter; ++it) {
      if (!g_step(t, x, next)) {
        if (++attempts < 64) goto resample;  // degenerate point, restart trial
        break;
      }
      double change = max_mode_sin_angle(x, next);
      x = next;
      if (change < cfg.tol) break;
    }
    double value = cyclic_polish(t, x, 100);
    if (value > best.value) {
      best.value = value;
      best.argmax = x;
    }
  }
  if (best.value < 0.0) {  // all trials degenerate: zero tensor
    best.value = 0.0;
    Rank1Point x;
    for (std::size_t q = 0; q < p; ++q) {
      Vector e(t.dim(q), 0.0);
      e[0] = 1.0;
      x.factors.push_back(e);
    }
    best.argmax = x;
  }
  return best;
}

namespace {
void check_same_dims(const DenseTensor& a, const DenseTensor& b, const char* who) {
  if (a.dims() != b.dims()) throw std::invalid_argument(std::string(who) + ": dims mismatch");
}
}  // namespace

DenseTensor tensor_add(const DenseTensor& a, const DenseTensor& b) {
  check_same_dims(a, b, "tensor_add");
  std::vector<double> v = a.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += b[i];
  return DenseTensor(a.dims(), std::move(v));
}

DenseTensor tensor_sub(const DenseTensor& a, const DenseTensor& b) {
  check_same_dims(a, b, "tensor_sub");
  std::vector<double> v = a.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= b[i];
  return DenseTensor(a.dims(), std::move(v));
}

DenseTensor tensor_scale(const DenseTensor& a, double c) {
  std::vector<double> v = a.values();
  for (double& x : v) x *= c;
  return DenseTensor(a.dims(), std::move(v));
}

void write_tensor(std::ostream& os, const DenseTensor& t) {
  os.precision(17);
  os << t.order();
  for (std::size_t d : t.dims()) os << ' ' << d;
  os << '\n';
  for (double x : t.values()) os << x << '\n';
}

DenseTensor read_tensor(std::istream& is) {
  std::size_t p = 0;
  if (!(is >> p) || p < 2) throw std::runtime_error("tensor parse: bad order");
  std::vector<std::size_t> dims(p);
  std::size_t n = 1;
  for (std::size_t q = 0; q < p; ++q) {
    if (!(is >> dims[q]) || dims[q] == 0) throw std::runtime_error("tensor parse: bad dimension");
    n *= dims[q];
  }
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(is >> vals[i])) throw std::runtime_error("tensor parse: truncated values");
    if (!std::isfinite(vals[i])) throw std::runtime_error("tensor parse: non-finite value");
  }
  return DenseTensor(std::move(dims), std::move(vals));
}

void write_tensor_file(const std::string& path, const DenseTensor& t) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_tensor(f, t);
  if (!f) throw std::runtime_error("write failed: " + path);
}

DenseTensor read_tensor_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return read_tensor(f);
}

}  // namespace odeco
