// Command-line harness: file-based decomposition plus seeded reproduction of
// the counterexamples, simulation figures, rate sweeps, and the constants
// table. Exit status: 0 all checks pass, 1 usage or I/O error, 2 a bound or
// golden-value check failed.

#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "odeco/experiments.hpp"

namespace {

// Output sink: --out writes a file, otherwise stdout.
struct Sink {
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file = std::make_unique<std::ofstream>(path);
      if (!*file) throw std::runtime_error("cannot open for writing: " + path);
    }
  }
  std::ostream& stream() { return file ? *file : std::cout; }
  std::unique_ptr<std::ofstream> file;
};

int run_decompose(const std::string& input, const std::string& out, std::size_t r,
                  const odeco::ExperimentConfig& cfg, const odeco::IterationConfig& icfg) {
  odeco::DenseTensor t = odeco::read_tensor_file(input);
  odeco::DecomposeResult res = odeco::decompose_odeco(t, r, icfg, cfg.seed);
  if (!out.empty()) odeco::write_odeco_file(out, res.tensor);
  std::cout.precision(17);
  for (std::size_t k = 0; k < res.tuples.size(); ++k)
    std::cout << "tuple " << k << ": lambda=" << res.tuples[k].value
              << " residual=" << odeco::tuple_residual(t, res.tuples[k]) << '\n';
  if (!res.complete) {
    std::cerr << "decompose: found " << res.found << " of " << r << " tuples\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"odeco tensor decomposition and perturbation-bound harness"};
  app.require_subcommand(1);

  odeco::ExperimentConfig cfg;
  std::string out_path;
  app.add_option("--seed", cfg.seed, "RNG seed (required for reproducibility; default 1)");
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_flag("--full", cfg.full, "paper-scale grids and restart counts");
  app.add_option("--restarts", cfg.restarts, "spectral-norm restarts (default 200)");
  app.add_option("--tol", cfg.tol, "iteration tolerance (default 1e-10)");
  app.add_option("--epsilon", cfg.epsilon, "sharp-regime epsilon (default 0.05)");

  std::string input_a, input_b;
  std::size_t rank = 0;
  auto* cmd_decompose = app.add_subcommand("decompose", "decompose a dense tensor file");
  cmd_decompose->add_option("input", input_a, "tensor file")->required();
  cmd_decompose->add_option("rank", rank, "number of tuples to recover")->required();

  auto* cmd_f1 = app.add_subcommand("figure1", "correlated random orthogonal pair sweep (CSV)");
  auto* cmd_f2 = app.add_subcommand("figure2", "Gaussian-noise deflation sweep (CSV)");
  auto* cmd_cx = app.add_subcommand("counterexamples", "verify the three golden counterexamples");
  auto* cmd_sr = app.add_subcommand("svd-rates", "tensor SVD error-rate sweep (CSV)");
  auto* cmd_ct = app.add_subcommand("constants", "sharp-regime constants table over epsilon");
  auto* cmd_pb = app.add_subcommand("perturb", "perturbation report for two odeco files (CSV)");
  cmd_pb->add_option("a", input_a, "odeco file")->required();
  cmd_pb->add_option("b", input_b, "odeco file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*cmd_decompose) {
      odeco::IterationConfig icfg;
      if (app.count("--restarts") > 0) icfg.restarts = cfg.restarts;
      if (app.count("--tol") > 0) icfg.tol = cfg.tol;
      return run_decompose(input_a, out_path, rank, cfg, icfg);
    }
    Sink sink(out_path);
    if (*cmd_f1) {
      odeco::Figure1Result res = odeco::run_figure1(cfg, &sink.stream());
      return (res.all_below && res.tight_ok) ? 0 : 2;
    }
    if (*cmd_f2) {
      odeco::Figure2Result res = odeco::run_figure2(cfg, &sink.stream());
      return res.noise_off_error < 1e-8 ? 0 : 2;
    }
    if (*cmd_cx) {
      odeco::CounterexampleResult res = odeco::run_counterexamples(cfg, &sink.stream());
      return res.all_ok ? 0 : 2;
    }
    if (*cmd_sr) {
      odeco::SvdRatesResult res = odeco::run_svd_rates(cfg, &sink.stream());
      return res.all_ok ? 0 : 2;
    }
    if (*cmd_ct) {
      std::vector<double> grid;
      for (double e = 0.5; e <= 8.0 + 1e-9; e += 0.01) grid.push_back(e);
      odeco::run_constants_table(grid, 3, &sink.stream());
      return 0;
    }
    if (*cmd_pb) {
      odeco::OdecoTensor a = odeco::read_odeco_file(input_a);
      odeco::OdecoTensor b = odeco::read_odeco_file(input_b);
      odeco::NormConfig nc{cfg.restarts, cfg.tol, 500, cfg.seed};
      odeco::PerturbationReport rep = odeco::verify_bounds(a, b, cfg.epsilon, nc);
      odeco::write_report_csv(sink.stream(), rep);
      return rep.all_pass ? 0 : 2;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
