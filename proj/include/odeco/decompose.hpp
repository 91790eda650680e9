#pragma once

#include <cstdint>
#include <optional>

#include "odeco/odeco_tensor.hpp"

namespace odeco {

enum class DeflationMode { orthogonal_complement, subtract };

struct IterationConfig {
  double tol = 1e-12;   // max-mode sin-angle change between successive iterates
  int max_iter = 1000;  // per gradient-iteration run
  int restarts = 50;    // random-initialization budget per deflation step
  DeflationMode deflation = DeflationMode::orthogonal_complement;
};

/// One simultaneous step of the normalized-gradient map: every mode-q factor
/// is replaced by the normalized contraction over the other modes, all
/// evaluated at the input point. Returns nullopt at degenerate points (some
/// contraction has norm <= 1e-300); callers restart from a fresh sample.
std::optional<Rank1Point> gradient_step(const DenseTensor& t, const Rank1Point& x);

struct FindTupleResult {
  SingularTuple tuple;  // lambda >= 0, signs flipped so the rank-1 value is >= 0
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // max-mode singular-equation residual at the limit
};

/// Iterates gradient_step from init until the max-mode angle change drops
/// below cfg.tol or cfg.max_iter is reached. Non-convergence is reported via
/// the flag; the tuple then holds the last iterate.
FindTupleResult find_tuple(const DenseTensor& t, const Rank1Point& init, const IterationConfig& cfg);

struct DecomposeResult {
  OdecoTensor tensor;
  bool complete = false;   // found all r requested tuples
  std::size_t found = 0;
  std::vector<SingularTuple> tuples;  // as found, before the final orthonormalization
};

/// Recovers r singular tuples by gradient iteration with random restarts and
/// deflation. orthogonal_complement projects each fresh initialization onto
/// the per-mode complement of the factors found so far; subtract removes the
/// found rank-one component from the working tensor. Duplicates (within
/// sin-angle 1e-6 in every mode) are rejected against the restart budget.
/// Factors are orthonormalized per mode against earlier columns at the end,
/// lambdas recomputed there and sorted descending.
DecomposeResult decompose_odeco(const DenseTensor& t, std::size_t r, const IterationConfig& cfg,
                                std::uint64_t seed);

/// Higher-order SVD comparator: per-mode left singular vectors of Mat_q(t)
/// (internal one-sided Jacobi SVD), lambdas from the mode-1 singular values,
/// component signs aligned so each rank-1 value is nonnegative. Identifies
/// essential singular vectors only when the singular values are simple; ties
/// yield an arbitrary orthonormal basis of the tied singular subspace.
OdecoTensor hosvd(const DenseTensor& t);

}  // namespace odeco
