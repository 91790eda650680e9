#include "odeco/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "odeco/rng.hpp"

namespace odeco {

namespace {
constexpr double kDegenerate = 1e-300;
constexpr double kDuplicateSin = 1e-6;
}  // namespace

std::optional<Rank1Point> gradient_step(const DenseTensor& t, const Rank1Point& x) {
  const std::size_t p = t.order();
  if (x.order() != p) throw std::invalid_argument("gradient_step: order mismatch");
  Rank1Point out;
  out.factors.resize(p);
  for (std::size_t q = 0; q < p; ++q) {
    std::vector<Vector> others;
    others.reserve(p - 1);
    for (std::size_t s = 0; s < p; ++s)
      if (s != q) others.push_back(x.factors[s]);
    Vector w = contract_all_but(t, q, others);
    double n = norm(w);
    if (!(n > kDegenerate)) return std::nullopt;
    for (double& e : w) e /= n;
    out.factors[q] = std::move(w);
  }
  return out;
}

FindTupleResult find_tuple(const DenseTensor& t, const Rank1Point& init, const IterationConfig& cfg) {
  FindTupleResult res;
  Rank1Point x = init;
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    auto next = gradient_step(t, x);
    if (!next) break;  // degenerate; report last iterate, unconverged
    double change = max_mode_sin_angle(x, *next);
    x = std::move(*next);
    if (change < cfg.tol) {
      res.converged = true;
      ++it;
      break;
    }
  }
  res.iterations = it;

  double value = rank1_value(t, x);
  if (value < 0.0) {
    for (double& e : x.factors[0]) e = -e;
    value = -value;
  }
  res.tuple.value = value;
  res.tuple.vectors = std::move(x.factors);
  res.residual = tuple_residual(t, res.tuple);
  return res;
}

namespace {

bool is_duplicate(const SingularTuple& a, const SingularTuple& b) {
  for (std::size_t q = 0; q < a.vectors.size(); ++q)
    if (sin_angle(a.vectors[q], b.vectors[q]) >= kDuplicateSin) return false;
  return true;
}

// Project v onto the orthogonal complement of the given columns; false if the
// projection is numerically zero.
bool project_complement(Vector& v, const std::vector<Vector>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const Vector& b : basis) {
      double proj = dot(v, b);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * b[i];
    }
  double n = norm(v);
  if (n < 1e-8) return false;
  for (double& e : v) e /= n;
  return true;
}

}  // namespace

DecomposeResult decompose_odeco(const DenseTensor& t, std::size_t r, const IterationConfig& cfg,
                                std::uint64_t seed) {
  const std::size_t p = t.order();
  std::size_t dmin = *std::min_element(t.dims().begin(), t.dims().end());
  if (r > dmin) throw std::invalid_argument("decompose_odeco: r exceeds min dimension");
  if (cfg.restarts < 1) throw std::invalid_argument("decompose_odeco: restarts must be >= 1");

  DenseTensor working = t;
  std::vector<SingularTuple> found;
  std::vector<std::vector<Vector>> found_cols(p);  // per mode, accepted factor columns
  std::uint64_t draw = 0;

  for (std::size_t step = 0; step < r; ++step) {
    // Collect a few converged, non-duplicate candidates and keep the largest.
    std::vector<SingularTuple> candidates;
    int budget = cfg.restarts;
    while (budget > 0 && candidates.size() < 5) {
      --budget;
      Rng rng = Rng::derive(seed, draw++);
      Rank1Point init;
      init.factors.reserve(p);
      bool ok = true;
      for (std::size_t q = 0; q < p && ok; ++q) {
        Vector v = rng.unit_vector(t.dim(q));
        if (cfg.deflation == DeflationMode::orthogonal_complement && !found_cols[q].empty())
          ok = project_complement(v, found_cols[q]);
        init.factors.push_back(std::move(v));
      }
      if (!ok) continue;

      const DenseTensor& target =
          (cfg.deflation == DeflationMode::subtract) ? working : t;
      FindTupleResult res = find_tuple(target, init, cfg);
      if (!res.converged) continue;
      bool dup = false;
      for (const auto& f : found)
        if (is_duplicate(res.tuple, f)) {
          dup = true;
          break;
        }
      if (!dup)
        for (const auto& c : candidates)
          if (is_duplicate(res.tuple, c)) {
            dup = true;
            break;
          }
      if (dup) continue;
      candidates.push_back(std::move(res.tuple));
    }
    if (candidates.empty()) break;  // budget exhausted: partial result

    std::size_t best = 0;
    for (std::size_t c = 1; c < candidates.size(); ++c)
      if (candidates[c].value > candidates[best].value) best = c;
    SingularTuple accepted = std::move(candidates[best]);

    if (cfg.deflation == DeflationMode::subtract) {
      // working -= lambda * v^(1) x ... x v^(p)
      const auto& dims = t.dims();
      std::vector<std::size_t> idx(p, 0);
      for (std::size_t flat = 0; flat < working.size(); ++flat) {
        double w = accepted.value;
        for (std::size_t q = 0; q < p; ++q) w *= accepted.vectors[q][idx[q]];
        working[flat] -= w;
        for (std::size_t s = p; s-- > 0;) {
          if (++idx[s] < dims[s]) break;
          idx[s] = 0;
        }
      }
    }
    for (std::size_t q = 0; q < p; ++q) found_cols[q].push_back(accepted.vectors[q]);
    found.push_back(std::move(accepted));
  }

  // Per-mode Gram-Schmidt against earlier columns (in found order), then
  // recompute lambdas at the orthonormalized factors.
  std::vector<Matrix> factors(p);
  for (std::size_t q = 0; q < p; ++q) {
    Matrix m(t.dim(q), found.size());
    for (std::size_t k = 0; k < found.size(); ++k) m.set_col(k, found[k].vectors[q]);
    orthonormalize_columns(m);
    factors[q] = complete_orthonormal(m, dmin);
  }
  Vector lambdas(dmin, 0.0);
  for (std::size_t k = 0; k < found.size(); ++k) {
    Rank1Point x;
    for (std::size_t q = 0; q < p; ++q) x.factors.push_back(factors[q].col(k));
    lambdas[k] = rank1_value(t, x);  // sign fixed by the OdecoTensor constructor
  }

  DecomposeResult out{OdecoTensor(t.dims(), std::move(lambdas), std::move(factors)),
                      found.size() == r, found.size(), std::move(found)};
  return out;
}

OdecoTensor hosvd(const DenseTensor& t) {
  const std::size_t p = t.order();
  std::size_t dmin = *std::min_element(t.dims().begin(), t.dims().end());
  std::vector<Matrix> factors(p);
  Vector lambdas(dmin, 0.0);
  for (std::size_t q = 0; q < p; ++q) {
    SvdResult svd = dense_svd(matricize(t, q));
    Matrix u(t.dim(q), dmin);
    for (std::size_t k = 0; k < dmin; ++k) u.set_col(k, svd.u.col(k));
    factors[q] = std::move(u);
    if (q == 0)
      for (std::size_t k = 0; k < dmin; ++k) lambdas[k] = svd.values[k];
  }
  // Align signs so each component's rank-1 value is nonnegative.
  for (std::size_t k = 0; k < dmin; ++k) {
    Rank1Point x;
    for (std::size_t q = 0; q < p; ++q) x.factors.push_back(factors[q].col(k));
    if (rank1_value(t, x) < 0.0) factors[0].scale_col(k, -1.0);
  }
  return OdecoTensor(t.dims(), std::move(lambdas), std::move(factors));
}

}  // namespace odeco
