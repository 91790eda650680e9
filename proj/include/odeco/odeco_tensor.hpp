#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "odeco/tensor.hpp"

namespace odeco {

/// Orthogonally decomposable tensor: sum_k lambda_k u_k^(1) x ... x u_k^(p)
/// with lambda_1 >= ... >= lambda_{d_min} >= 0 and each factor matrix
/// (d_q x d_min) holding orthonormal columns. Construction canonicalizes:
/// negative lambdas are made nonnegative by flipping the mode-1 column, then
/// (lambda, paired columns) are stably sorted descending. Orthonormality is
/// the caller's responsibility; validate() reports violations.
class OdecoTensor {
 public:
  OdecoTensor(std::vector<std::size_t> dims, Vector lambdas, std::vector<Matrix> factors);

  std::size_t order() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t dim(std::size_t q) const { return dims_[q]; }
  std::size_t d_min() const { return lambdas_.size(); }
  std::size_t rank() const;  // number of strictly positive lambdas

  const Vector& lambdas() const { return lambdas_; }
  const Matrix& factor(std::size_t q) const { return factors_[q]; }
  const std::vector<Matrix>& factors() const { return factors_; }
  Vector factor_column(std::size_t q, std::size_t k) const { return factors_[q].col(k); }

 private:
  std::vector<std::size_t> dims_;
  Vector lambdas_;
  std::vector<Matrix> factors_;
};

struct OdecoDiagnostics {
  std::vector<double> orthonormality_violation;  // per mode, max |U^T U - I|
  double ordering_violation = 0.0;               // max lambda_{k+1} - lambda_k over ascents
  double negativity_violation = 0.0;             // max(0, -min lambda)
  bool ok(double tol) const;
};

OdecoDiagnostics validate(const OdecoTensor& t, double tol = 1e-10);

DenseTensor to_dense(const OdecoTensor& t);

/// Random odeco tensor: factors are Gram-Schmidt orthonormalizations of
/// standard-normal matrices; lambdas beyond r are zero (columns kept as the
/// orthonormal completion). Requires r = lambdas.size() <= min(dims).
OdecoTensor random_odeco(const std::vector<std::size_t>& dims, std::size_t r,
                         const Vector& lambdas, std::uint64_t seed);

/// One singular value/vector tuple. active_set is empty when unknown (results
/// of iterative search) or for lambda = 0 tuples; when present, signs[i][q]
/// in {+1,-1} records chi_k^(q) for k = active_set[i], with per-k product
/// over all modes equal to +1.
struct SingularTuple {
  double value = 0.0;
  std::vector<Vector> vectors;
  std::vector<std::size_t> active_set;
  std::vector<std::vector<int>> signs;
};

/// Max over modes of ||T x_{s != q} v^(s) - lambda v^(q)||.
double tuple_residual(const DenseTensor& t, const SingularTuple& tuple);

/// Closed-form singular tuple for a nonempty subset S of components with
/// lambda_k > 0 (p >= 3):
///   lambda = (sum_{k in S} lambda_k^{-2/(p-2)})^{-(p-2)/2},
///   v^(q)  = sum_{k in S} chi_k^(q) (lambda/lambda_k)^{1/(p-2)} u_k^(q).
/// signs[i] gives chi for modes 2..p (p-1 entries, each +1 or -1) for
/// k = subset[i]; chi_k^(1) is derived as their product so every per-k mode
/// product is +1. Singleton subsets recover essential tuples.
SingularTuple enumerate_tuple(const OdecoTensor& t, const std::vector<std::size_t>& subset,
                              const std::vector<std::vector<int>>& signs);

/// Every positive-lambda tuple: all nonempty subsets of {k : lambda_k > 0}
/// crossed with all sign patterns. Exponential in d_min; intended for small
/// instances.
std::vector<SingularTuple> all_positive_tuples(const OdecoTensor& t);

/// True iff x is a lambda = 0 singular tuple: for every k <= d_min at least
/// two modes q have |<v^(q), u_k^(q)>| <= 1e-10.
bool zero_tuple_check(const OdecoTensor& t, const Rank1Point& x);

/// File format: line 1 "p d1 ... dp r", line 2 the r lambdas, then p blocks
/// of d_q x r factor entries row-major. Readers complete r < d_min with
/// orthonormal zero-lambda columns.
void write_odeco(std::ostream& os, const OdecoTensor& t);
OdecoTensor read_odeco(std::istream& is);
void write_odeco_file(const std::string& path, const OdecoTensor& t);
OdecoTensor read_odeco_file(const std::string& path);

}  // namespace odeco
