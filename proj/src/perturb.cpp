#include "odeco/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace odeco {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPassSlack = 1e-8;

void check_same_dims(const OdecoTensor& a, const OdecoTensor& b, const char* who) {
  if (a.dims() != b.dims()) throw std::invalid_argument(std::string(who) + ": dims mismatch");
}
}  // namespace

Matching match_tuples(const OdecoTensor& a, const OdecoTensor& b) {
  check_same_dims(a, b, "match_tuples");
  const std::size_t p = a.order();
  const std::size_t dmin = a.d_min();
  const double expo = static_cast<double>(p - 2) / static_cast<double>(p);

  // Cache all mode-wise inner products.
  std::vector<Matrix> ip(p);
  for (std::size_t q = 0; q < p; ++q) ip[q] = multiply_at_b(a.factor(q), b.factor(q));

  Matching m;
  m.pi.assign(dmin, 0);
  m.gamma.assign(p, std::vector<int>(dmin, 1));
  std::vector<bool> used(dmin, false);

  for (std::size_t k = 0; k < dmin; ++k) {
    std::size_t best_j = dmin;
    double best_score = 0.0;
    for (std::size_t j = 0; j < dmin; ++j) {
      if (used[j]) continue;
      double score = b.lambdas()[j];
      for (std::size_t q = 0; q < p; ++q) score *= std::pow(std::abs(ip[q](k, j)), expo);
      if (score > best_score) {
        best_score = score;
        best_j = j;
      }
    }
    if (best_j == dmin) {
      // Functional vanished everywhere: fall back to min max-mode sin angle.
      double best_angle = kInf;
      for (std::size_t j = 0; j < dmin; ++j) {
        if (used[j]) continue;
        double worst = 0.0;
        for (std::size_t q = 0; q < p; ++q) {
          double c = std::min(1.0, std::abs(ip[q](k, j)));
          worst = std::max(worst, std::sqrt(std::max(0.0, 1.0 - c * c)));
        }
        if (worst < best_angle) {
          best_angle = worst;
          best_j = j;
        }
      }
    }
    used[best_j] = true;
    m.pi[k] = best_j;
    m.score += best_score;

    // Signs: nonnegative inner products mode-by-mode; keep the per-index
    // product at +1 by sacrificing the weakest mode when needed.
    int prod = 1;
    std::size_t weakest = 0;
    double weakest_abs = kInf;
    for (std::size_t q = 0; q < p; ++q) {
      double v = ip[q](k, best_j);
      int s = (v < 0.0) ? -1 : 1;
      m.gamma[q][k] = s;
      prod *= s;
      if (std::abs(v) < weakest_abs) {
        weakest_abs = std::abs(v);
        weakest = q;
      }
    }
    if (prod < 0) m.gamma[weakest][k] = -m.gamma[weakest][k];
  }
  return m;
}

double delta_norm(const OdecoTensor& a, const OdecoTensor& b, const NormConfig& cfg) {
  check_same_dims(a, b, "delta_norm");
  return spectral_norm(tensor_sub(to_dense(a), to_dense(b)), cfg).value;
}

double h1(double x, std::size_t p) {
  double e = 2.0 / static_cast<double>(p - 2);
  double inner = std::pow(1.0 - std::pow(1.0 - x, e), 1.0 / e);
  return 1.0 / (1.0 - inner);
}

double h2(double x, std::size_t p) {
  double e = 2.0 / static_cast<double>(p - 2);
  double inner = (1.0 + x) * std::pow(1.0 - std::pow((1.0 - x) / (1.0 + x), e), 1.0 / e);
  return 1.0 / (1.0 - inner);
}

double h3(double x, double epsilon) { return x * (1.0 + (1.0 + epsilon) * (1.0 + x)); }

double h4(double x, double epsilon, std::size_t p) {
  double e = 2.0 / static_cast<double>(p - 2);
  return (1.0 + x) * std::pow(1.0 - std::pow((1.0 - x) / (1.0 + x), e), 1.0 / e) +
         (1.0 + epsilon) * x * (1.0 + x);
}

namespace {

// Bisect the increasing function f on (0, 1 - 1e-12) for f(x) = target.
// Verifies the bracket first and the achieved value afterwards.
template <typename F>
double invert_increasing(F f, double target, const char* name) {
  double lo = 0.0, hi = 1.0 - 1e-12;
  if (!(f(hi) >= target) || !(f(lo) <= target))
    throw std::invalid_argument(std::string("constants: target not bracketed for ") + name);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  if (std::abs(f(x) - target) > 1e-9)
    throw std::runtime_error(std::string("constants: inversion check failed for ") + name);
  return x;
}

}  // namespace

PerturbConstants constants(double epsilon, std::size_t p) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("constants: epsilon must be > 0");
  if (p < 3) throw std::invalid_argument("constants: order must be >= 3");

  PerturbConstants c;
  c.epsilon = epsilon;
  c.order = p;
  // h1, h2 diverge inside (0,1); invert their monotone denominators instead:
  // h(x) = 1/(1 - g(x)) >= y  <=>  g(x) >= 1 - 1/y, with g increasing from 0.
  double y = 1.0 + epsilon;
  auto g1 = [p](double x) {
    double e = 2.0 / static_cast<double>(p - 2);
    return std::pow(1.0 - std::pow(1.0 - x, e), 1.0 / e);
  };
  auto g2 = [p](double x) {
    double e = 2.0 / static_cast<double>(p - 2);
    return (1.0 + x) * std::pow(1.0 - std::pow((1.0 - x) / (1.0 + x), e), 1.0 / e);
  };
  c.h1_inv = invert_increasing(g1, 1.0 - 1.0 / y, "h1");
  c.h2_inv = invert_increasing(g2, 1.0 - 1.0 / y, "h2");
  c.h3_inv = invert_increasing([epsilon](double x) { return h3(x, epsilon); }, 1.0, "h3");
  c.h4_inv = invert_increasing([epsilon, p](double x) { return h4(x, epsilon, p); },
                               epsilon / (1.0 + epsilon), "h4");
  if (std::abs(h1(c.h1_inv, p) - y) > 1e-9 || std::abs(h2(c.h2_inv, p) - y) > 1e-9)
    throw std::runtime_error("constants: h1/h2 inversion check failed");

  c.c_epsilon = std::min({1.0 / (1.0 + epsilon), c.h1_inv, c.h2_inv, c.h3_inv, c.h4_inv});
  c.objective = std::max(1.0 + epsilon, 1.0 / c.c_epsilon);
  return c;
}

namespace {

PerturbationReport build_report(const OdecoTensor& a, const OdecoTensor& b, double epsilon,
                                double delta, const DenseTensor& diff) {
  const std::size_t p = a.order();
  const std::size_t dmin = a.d_min();
  PerturbConstants consts = constants(epsilon, 3);  // c_{eps,3} is valid for all p >= 3

  PerturbationReport rep;
  rep.delta = delta;
  rep.epsilon = epsilon;
  rep.c_epsilon = consts.c_epsilon;
  rep.matching = match_tuples(a, b);
  rep.all_pass = true;

  for (std::size_t k = 0; k < dmin; ++k) {
    BoundRow row;
    row.k = k;
    row.lambda = a.lambdas()[k];
    row.lambda_tilde = b.lambdas()[rep.matching.pi[k]];
    row.gap = std::abs(row.lambda - row.lambda_tilde);

    row.max_sin = 0.0;
    for (std::size_t q = 0; q < p; ++q)
      row.max_sin = std::max(
          row.max_sin, sin_angle(a.factor_column(q, k), b.factor_column(q, rep.matching.pi[k])));

    row.sharp = row.lambda > 0.0 && delta <= consts.c_epsilon * row.lambda;
    row.bound_value = row.sharp ? delta : 17.0 * delta;

    // Angle denominator: lambda_k, or lambda_{d_min-1} for a simple zero in
    // the last position.
    double denom = row.lambda;
    if (denom == 0.0 && k == dmin - 1 && dmin >= 2 && a.lambdas()[dmin - 2] > 0.0)
      denom = a.lambdas()[dmin - 2];
    if (denom > 0.0) {
      double cc = (delta <= consts.c_epsilon * denom) ? (1.0 + epsilon) : 17.0;
      row.bound_davis = cc * delta / denom;
    } else {
      row.bound_davis = kInf;
    }

    if (row.lambda > 0.0) {
      double worst = 0.0;
      for (std::size_t q = 0; q < p; ++q) {
        std::vector<Vector> others;
        for (std::size_t s = 0; s < p; ++s)
          if (s != q) others.push_back(a.factor_column(s, k));
        Vector w = contract_all_but(diff, q, others);
        Vector target = a.factor_column(q, k);
        for (std::size_t i = 0; i < w.size(); ++i) target[i] += w[i] / row.lambda;
        worst = std::max(worst, sin_angle(b.factor_column(q, rep.matching.pi[k]), target));
      }
      row.second_order_resid = worst;
      double x = delta / row.lambda;
      row.second_order_bound = (2.0 + x) * std::pow((1.0 + epsilon) * x, p - 1);
    } else {
      row.second_order_resid = std::numeric_limits<double>::quiet_NaN();
      row.second_order_bound = kInf;
    }

    bool pass_value = row.gap <= row.bound_value + kPassSlack;
    bool pass_angle = row.max_sin <= row.bound_davis + kPassSlack;
    bool pass_second = !(row.second_order_resid > row.second_order_bound + kPassSlack);
    row.pass = pass_value && pass_angle && pass_second;
    rep.all_pass = rep.all_pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace

PerturbationReport verify_bounds(const OdecoTensor& a, const OdecoTensor& b, double epsilon,
                                 const NormConfig& cfg) {
  check_same_dims(a, b, "verify_bounds");
  DenseTensor diff = tensor_sub(to_dense(b), to_dense(a));
  double delta = spectral_norm(diff, cfg).value;
  PerturbationReport rep = build_report(a, b, epsilon, delta, diff);
  rep.restarts_used = cfg.restarts;
  if (!rep.all_pass) {
    // A violation may stem from under-estimating delta; re-estimate once at
    // 10x the restarts and keep the larger value.
    NormConfig retry = cfg;
    retry.restarts = cfg.restarts * 10;
    retry.seed = cfg.seed + 1;
    double delta2 = std::max(delta, spectral_norm(diff, retry).value);
    rep = build_report(a, b, epsilon, delta2, diff);
    rep.restarts_used = retry.restarts;
    rep.reestimated = true;
  }
  return rep;
}

Matrix m_matrix(const OdecoTensor& a, const DenseTensor& delta_dense, std::size_t mode) {
  const std::size_t p = a.order();
  if (mode >= p) throw std::invalid_argument("m_matrix: mode out of range");
  if (delta_dense.dims() != a.dims()) throw std::invalid_argument("m_matrix: dims mismatch");
  const std::size_t r = a.rank();
  Matrix m(a.dim(mode), r);
  for (std::size_t k = 0; k < r; ++k) {
    std::vector<Vector> others;
    for (std::size_t s = 0; s < p; ++s)
      if (s != mode) others.push_back(a.factor_column(s, k));
    m.set_col(k, contract_all_but(delta_dense, mode, others));
  }
  return m;
}

NonessentialReport verify_nonessential(const OdecoTensor& a, const OdecoTensor& b,
                                       const SingularTuple& tuple_a, const NormConfig& cfg) {
  check_same_dims(a, b, "verify_nonessential");
  if (tuple_a.active_set.empty())
    throw std::invalid_argument("verify_nonessential: tuple has no active set");
  const std::size_t p = a.order();

  NonessentialReport rep;
  DenseTensor diff = tensor_sub(to_dense(b), to_dense(a));
  rep.delta = spectral_norm(diff, cfg).value;

  const std::size_t r = a.rank();
  double lambda_r = r > 0 ? a.lambdas()[r - 1] : 0.0;
  double mq = 0.0;
  for (std::size_t q = 0; q < p; ++q) mq = std::max(mq, operator_norm(m_matrix(a, diff, q)));
  rep.c1_ratio = rep.delta > 0.0 ? mq / rep.delta : 0.0;
  double scale = lambda_r * std::pow(static_cast<double>(r), -1.0 / (2.0 * (p - 2)));
  rep.c2_ratio = scale > 0.0 ? rep.delta / scale : kInf;

  rep.lambda_a = tuple_a.value;
  rep.lambda_star_min = kInf;
  for (std::size_t k : tuple_a.active_set)
    rep.lambda_star_min = std::min(rep.lambda_star_min, a.lambdas()[k]);
  rep.ref_vector = rep.delta / rep.lambda_star_min;
  rep.ref_value = tuple_a.value * rep.delta / rep.lambda_star_min;

  Matching m = match_tuples(a, b);
  std::vector<std::size_t> transported;
  std::vector<std::vector<int>> signs;
  rep.transportable = true;
  for (std::size_t i = 0; i < tuple_a.active_set.size(); ++i) {
    std::size_t k = tuple_a.active_set[i];
    std::size_t j = m.pi[k];
    if (!(b.lambdas()[j] > 0.0)) {
      rep.transportable = false;
      break;
    }
    transported.push_back(j);
    std::vector<int> row;
    for (std::size_t q = 1; q < p; ++q) row.push_back(tuple_a.signs[i][q] * m.gamma[q][k]);
    signs.push_back(std::move(row));
  }
  if (!rep.transportable) return rep;

  rep.matched = enumerate_tuple(b, transported, signs);
  rep.lambda_b = rep.matched.value;
  rep.value_gap = std::abs(rep.lambda_a - rep.lambda_b);
  rep.max_vector_distance = 0.0;
  for (std::size_t q = 0; q < p; ++q) {
    double s = 0.0;
    for (std::size_t i = 0; i < tuple_a.vectors[q].size(); ++i) {
      double e = tuple_a.vectors[q][i] - rep.matched.vectors[q][i];
      s += e * e;
    }
    rep.max_vector_distance = std::max(rep.max_vector_distance, std::sqrt(s));
  }
  return rep;
}

void write_report_csv(std::ostream& os, const PerturbationReport& report) {
  os.precision(17);
  os << "# delta=" << report.delta << " epsilon=" << report.epsilon
     << " c_epsilon=" << report.c_epsilon << " restarts=" << report.restarts_used
     << " reestimated=" << (report.reestimated ? 1 : 0) << '\n';
  os << "k,lambda,lambda_tilde,gap,max_sin,sharp_flag,bound_value,bound_davis,"
        "second_order_resid,second_order_bound,pass\n";
  for (const BoundRow& r : report.rows) {
    os << r.k << ',' << r.lambda << ',' << r.lambda_tilde << ',' << r.gap << ',' << r.max_sin
       << ',' << (r.sharp ? 1 : 0) << ',' << r.bound_value << ',' << r.bound_davis << ','
       << r.second_order_resid << ',' << r.second_order_bound << ',' << (r.pass ? 1 : 0) << '\n';
  }
}

}  // namespace odeco
