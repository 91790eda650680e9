#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "odeco/decompose.hpp"
#include "odeco/incoherent.hpp"
#include "odeco/perturb.hpp"

namespace odeco {

struct ExperimentConfig {
  std::uint64_t seed = 1;
  bool full = false;    // paper-scale grids (200 omega values, 1000 restarts)
  int restarts = 200;   // spectral-norm restarts in harness paths
  double tol = 1e-10;
  double epsilon = 0.05;
  std::size_t grid_limit = 0;  // 0 = whole grid; tests may truncate
};

/// Omega grid: 1000/k for k in {1, 12, 23, ..., 199} plus 5 at desk scale;
/// k = 1..199 plus 5 under full.
std::vector<double> omega_grid(bool full);

/// Orthonormalize-then-recompute pipeline used after iterative search: per
/// mode Gram-Schmidt of the tuple factors in the given order, orthonormal
/// zero-lambda completion, lambdas re-evaluated on t at the final columns.
OdecoTensor tuples_to_odeco(const DenseTensor& t, const std::vector<SingularTuple>& tuples);

/// Subtract-mode deflation followed by re-running the gradient iteration on
/// the original tensor from each deflation output (stand-in for the cited
/// LROAT refinement step).
DecomposeResult decompose_with_refinement(const DenseTensor& t, std::size_t r,
                                          const IterationConfig& cfg, std::uint64_t seed);

struct Figure1Row {
  double omega = 0.0, lambda = 0.0, rho = 0.0, delta = 0.0;
  double delta_over_lambda = 0.0, max_sin = 0.0, ratio = 0.0;
};
struct Figure1Result {
  std::vector<Figure1Row> rows;
  bool all_below = false;   // max_sin <= delta/lambda on every row
  bool tight_ok = false;    // rows with delta/lambda < 0.05 have ratio >= 0.9
};
Figure1Result run_figure1(const ExperimentConfig& cfg, std::ostream* csv);

struct Figure2Row {
  double omega = 0.0, lambda = 0.0;
  int noise = 1;
  double noise_norm = 0.0, noise_over_lambda = 0.0;
  double max_sin = 0.0, recon_err_over_lambda = 0.0;
};
struct Figure2Result {
  std::vector<Figure2Row> rows;
  double noise_off_error = 0.0;  // max_sin on the noise-disabled row
};
Figure2Result run_figure2(const ExperimentConfig& cfg, std::ostream* csv);

struct CounterexampleResult {
  double weyl_delta = 0.0;        // expected 4/sqrt(3)
  double weyl_gap = 0.0;          // expected 2*sqrt(2)
  bool weyl_ok = false;           // both constants hit and gap > delta
  double matricization_ratio = 0.0;  // expected sqrt(19) at d = 20
  bool matricization_ok = false;
  double minmax_at_symmetric = 0.0;  // expected 0.5 at d = 4, lambda = 1
  double minmax_probe_floor = 0.0;   // min over 1e4 random probes
  bool minmax_ok = false;
  bool all_ok = false;
};
CounterexampleResult run_counterexamples(const ExperimentConfig& cfg, std::ostream* report);

struct ConstantsResult {
  std::vector<PerturbConstants> table;
  double argmin_epsilon = 0.0;
  double min_objective = 0.0;
  double argmax_c_epsilon = 0.0;  // c_eps rises to here, then decreases
  bool tail_decreasing = false;
};
ConstantsResult run_constants_table(const std::vector<double>& eps_grid, std::size_t p,
                                    std::ostream* csv);

struct SvdRatesRow {
  std::size_t d = 0;
  double lambda = 0.0;
  double mean_max_sin = 0.0;
  double bound = 0.0;  // sqrt(d1+d2+d3)/lambda
  double ratio_to_bound = 0.0;
  double noise_norm_mean = 0.0;
  double noise_ratio = 0.0;  // ||E|| / sqrt(d1+d2+d3)
};
struct SvdRatesResult {
  std::vector<SvdRatesRow> rows;  // two rows per d: base multiplier and doubled
  bool envelope_ok = false;       // every mean under 3x the bound
  bool doubling_ok = false;       // lambda doubling halves the mean within 25%
  bool noise_ratio_ok = false;    // every ||E||/sqrt(sum d) in [0.5, 2]
  bool all_ok = false;
};
SvdRatesResult run_svd_rates(const ExperimentConfig& cfg, std::ostream* csv);

void write_config_header(std::ostream& os, const ExperimentConfig& cfg, const std::string& name,
                         const std::string& extra = "");

}  // namespace odeco
