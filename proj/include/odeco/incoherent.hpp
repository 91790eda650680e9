#pragma once

#include <iosfwd>
#include <string>

#include "odeco/perturb.hpp"

namespace odeco {

/// CP tensor with unit (not necessarily orthonormal) factor columns:
/// sum_k eta_k a_k^(1) x ... x a_k^(p), eta_1 >= ... >= eta_r > 0.
/// delta is the measured isometry defect, always recomputed from singular
/// values at construction (never trusted from input).
struct IncoherentCp {
  IncoherentCp(std::vector<std::size_t> dims, Vector etas, std::vector<Matrix> factors);

  std::size_t order() const { return dims.size(); }
  std::size_t rank() const { return etas.size(); }

  std::vector<std::size_t> dims;
  Vector etas;
  std::vector<Matrix> factors;  // d_q x r, unit columns
  double delta = 0.0;           // max over modes of isometry_delta(factor)
};

/// Max deviation of the matrix's singular values from 1 (via the internal
/// SVD); requires cols <= rows.
double isometry_delta(const Matrix& a);

/// Nearest orthonormal matrix: U = A (A^T A)^{-1/2}, computed as
/// left * right^T of the SVD. Requires full column rank. Satisfies
/// ||A - U|| <= isometry_delta(A).
Matrix polar_factor(const Matrix& a);

DenseTensor to_dense(const IncoherentCp& x);

/// Odeco projection: each factor replaced by its polar factor, etas kept as
/// lambdas (re-sorted descending with paired columns by the OdecoTensor
/// constructor), padded to d_min with zero-lambda orthonormal completion.
OdecoTensor odeco_projection(const IncoherentCp& x);

struct IncoherentRow {
  std::size_t k = 0;
  double eta = 0.0, eta_tilde = 0.0, gap = 0.0, max_sin = 0.0;
  double bound_value = 0.0, bound_angle = 0.0;  // Corollary-1 bounds with C = 17
  double ratio_value = 0.0, ratio_angle = 0.0;  // raw ratios, for tightness study
  bool pass = false;
};

struct IncoherentReport {
  double delta = 0.0;       // max of the two measured defects
  double cp_distance = 0.0; // ||X - X~|| estimate
  Matching matching;        // of the two odeco projections
  std::vector<IncoherentRow> rows;  // one per k <= min(r, r~)
  bool all_pass = false;
};

/// Projects both tensors, matches the projections, and reports
/// |eta_k - eta~_pi(k)| and max-mode sin angle between the original columns
/// against C[(p+1) delta (eta_1 + eta~_1) + ||X - X~||] and
/// C{... + delta}/eta_k with C = 17.
IncoherentReport verify_incoherent(const IncoherentCp& x, const IncoherentCp& y,
                                   const NormConfig& cfg = {});

/// File format mirrors the odeco format ("p d1 ... dp r", the r etas, then
/// p factor blocks); no orthonormality requirement.
void write_incoherent(std::ostream& os, const IncoherentCp& x);
IncoherentCp read_incoherent(std::istream& is);
void write_incoherent_file(const std::string& path, const IncoherentCp& x);
IncoherentCp read_incoherent_file(const std::string& path);

}  // namespace odeco
