#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "odeco/linalg.hpp"

namespace odeco {

/// Dense real tensor of order p >= 2, row-major storage (last index fastest).
/// All stored values must be finite; constructors and readers enforce it.
class DenseTensor {
 public:
  explicit DenseTensor(std::vector<std::size_t> dims);
  DenseTensor(std::vector<std::size_t> dims, std::vector<double> values);

  std::size_t order() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t dim(std::size_t q) const { return dims_[q]; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t flat) { return values_[flat]; }
  double operator[](std::size_t flat) const { return values_[flat]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  std::size_t flat_index(const std::vector<std::size_t>& idx) const;

 private:
  std::vector<std::size_t> dims_;
  std::vector<double> values_;
};

/// One point on the product of unit spheres: p factors, factor q of length d_q.
struct Rank1Point {
  std::vector<Vector> factors;
  std::size_t order() const { return factors.size(); }
};

/// Mode-q contraction against one vector per other mode (ascending mode order,
/// mode q skipped): returns T x_{s != q} v^(s), a vector of length d_q.
/// Plain multilinear sum, no normalization.
Vector contract_all_but(const DenseTensor& t, std::size_t mode, const std::vector<Vector>& vectors);

/// Signed inner product <T, a^(1) x ... x a^(p)>.
double rank1_value(const DenseTensor& t, const Rank1Point& x);

/// Mode-q flattening, d_q x prod_{s != q} d_s. Column index is the row-major
/// flattening of the retained indices in ascending mode order (last retained
/// mode fastest), so that Mat_q(T) = U^(q) diag(lambda) (V^(q))^T with
/// V^(q) the Khatri-Rao product of the other factors in ascending mode order.
Matrix matricize(const DenseTensor& t, std::size_t mode);

/// Inverse of matricize for the same mode and dims.
DenseTensor dematricize(const Matrix& m, std::size_t mode, const std::vector<std::size_t>& dims);

/// Columnwise Khatri-Rao product; all inputs must share the column count.
/// Column j is the Kronecker product of the j-th columns (first factor slowest).
Matrix khatri_rao(const std::vector<Matrix>& mats);

struct NormConfig {
  int restarts = 1000;
  double tol = 1e-10;     // max-mode sin-angle change between iterates
  int max_iter = 500;     // per restart
  std::uint64_t seed = 0;
};

struct SpectralNormResult {
  double value = 0.0;  // always a valid lower bound on ||t||
  Rank1Point argmax;
};

/// Multi-start estimate of the tensor spectral norm
/// max |<T, a^(1) x ... x a^(p)>| over unit vectors. Each restart samples the
/// factors uniformly on their spheres (seed, trial) and iterates the
/// normalized-gradient map; a monotone cyclic per-mode polish then runs until
/// the objective stagnates. Degenerate trials (a contraction below 1e-300)
/// are resampled. The result is an estimate: a certified lower bound only.
SpectralNormResult spectral_norm(const DenseTensor& t, const NormConfig& cfg = {});

DenseTensor tensor_add(const DenseTensor& a, const DenseTensor& b);
DenseTensor tensor_sub(const DenseTensor& a, const DenseTensor& b);
DenseTensor tensor_scale(const DenseTensor& a, double c);

/// Text format: first line "p d1 d2 ... dp", then one value per line in
/// row-major order. Readers reject NaN/Inf and size mismatches.
void write_tensor(std::ostream& os, const DenseTensor& t);
DenseTensor read_tensor(std::istream& is);
void write_tensor_file(const std::string& path, const DenseTensor& t);
DenseTensor read_tensor_file(const std::string& path);

double max_mode_sin_angle(const Rank1Point& a, const Rank1Point& b);

}  // namespace odeco
