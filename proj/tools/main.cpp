// Command-line front end: convergence studies, CQ weight inspection, and
// single-trajectory dumps.
//
// Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "fspde/study.hpp"

using namespace fspde;

namespace {

int default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Parses a dyadic level range written as "k1..k2".
std::pair<int, int> parse_levels(const std::string& text) {
  int lo = 0, hi = 0;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%d..%d%c", &lo, &hi, &extra) != 2) {
    throw CLI::ValidationError("--levels", "expected a range like 2..5");
  }
  return {lo, hi};
}

struct StudyCliOptions {
  std::string kind = "spatial";
  double alpha = 0.5;
  std::string levels;
  int fixed = -1;
  int realizations = -1;
  std::uint64_t seed = 0;
  double sigma = 1.0;
  double T = 1.0;
  bool paper_scale = false;
  int workers = default_workers();
  std::string out_dir = ".";
};

int run_study_command(const StudyCliOptions& opt) {
  StudyConfig cfg;
  cfg.kind = opt.kind == "spatial" ? StudyKind::Spatial : StudyKind::Temporal;
  cfg.alpha = opt.alpha;
  cfg.sigma = opt.sigma;
  cfg.T = opt.T;
  cfg.master_seed = opt.seed;
  cfg.workers = opt.workers;

  // Desk-scale defaults; --paper-scale restores the published configuration.
  if (cfg.kind == StudyKind::Spatial) {
    cfg.level_min = 2;
    cfg.level_max = 5;
    cfg.fixed_exponent = opt.paper_scale ? 14 : 12;
  } else {
    cfg.level_min = 6;
    cfg.level_max = 9;
    cfg.fixed_exponent = opt.paper_scale ? 10 : 8;
  }
  cfg.realizations = opt.paper_scale ? 10000 : 1000;
  if (!opt.levels.empty()) {
    std::tie(cfg.level_min, cfg.level_max) = parse_levels(opt.levels);
  }
  if (opt.fixed > 0) cfg.fixed_exponent = opt.fixed;
  if (opt.realizations > 0) cfg.realizations = opt.realizations;

  const ConvergenceReport report = run_study(cfg);

  char alpha_buf[32];
  std::snprintf(alpha_buf, sizeof(alpha_buf), "%g", cfg.alpha);
  const std::string basename =
      (cfg.kind == StudyKind::Spatial ? "spatial_alpha" : "temporal_alpha") +
      std::string(alpha_buf);
  const std::string csv_path = write_report_files(report, opt.out_dir, basename);

  std::cout << report_markdown(report);
  std::cout << "wrote " << csv_path << "\n";
  return 0;
}

struct SolveCliOptions {
  double alpha = 0.5;
  int h_exp = 5;
  int tau_exp = 8;
  double T = 1.0;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;
  std::string psi0 = "paper";
  std::string source = "paper";
  std::string out;
  std::string save_noise;
  std::string load_noise;
};

int run_solve_command(const SolveCliOptions& opt) {
  const Mesh1D mesh(1 << opt.h_exp);
  const Scalar tau = std::ldexp(1.0, -opt.tau_exp);
  const auto steps = static_cast<int>(std::llround(opt.T / tau));
  if (steps < 0 || static_cast<Scalar>(steps) * tau != opt.T) {
    throw std::invalid_argument("solve: T must be an exact multiple of tau");
  }

  SchemeConfig cfg{FractionalOrder(opt.alpha),
                   mesh,
                   tau,
                   steps,
                   opt.sigma,
                   opt.source == "zero" ? SourceTerm::zero() : paper_source(),
                   opt.psi0 == "zero" ? std::function<Scalar(Scalar)>{}
                                      : paper_initial()};
  const Stepper stepper(cfg);

  std::optional<NoisePath> path;
  if (!opt.load_noise.empty()) {
    path = load_noise_path(opt.load_noise);
  } else if (opt.sigma > 0.0) {
    path = sample_path(NoiseConfig{stepper.mode_count(), steps, tau, opt.seed,
                                   opt.realization});
  }
  if (path && !opt.save_noise.empty()) {
    save_noise_path(*path, opt.save_noise);
  }

  const NodalVector psi = path ? stepper.run(*path) : stepper.run();

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!opt.out.empty()) {
    file.open(opt.out);
    if (!file) throw std::runtime_error("solve: cannot open " + opt.out);
    out = &file;
  }
  char line[64];
  (*out) << "x,psi\n0,0\n";
  for (int i = 1; i <= mesh.interior_nodes(); ++i) {
    std::snprintf(line, sizeof(line), "%.12e,%.12e\n", mesh.node(i),
                  psi.values[i - 1]);
    (*out) << line;
  }
  (*out) << "1,0\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convolution-quadrature FEM solver for a stochastic "
               "time-fractional PDE on (0,1)"};
  app.require_subcommand(1);

  StudyCliOptions study_opt;
  CLI::App* study = app.add_subcommand(
      "study", "Run a Monte Carlo convergence study and write CSV/markdown");
  study->add_option("--kind", study_opt.kind, "spatial or temporal")
      ->check(CLI::IsMember({"spatial", "temporal"}))
      ->required();
  study->add_option("--alpha", study_opt.alpha, "fractional order in (0,2)")
      ->required();
  study->add_option("--levels", study_opt.levels,
                    "dyadic level range k1..k2 (default spatial 2..5, "
                    "temporal 6..9)");
  study->add_option("--fixed", study_opt.fixed,
                    "exponent of the fixed resolution: tau = 2^-e for spatial "
                    "studies, h = 2^-e for temporal (defaults 12 / 8)");
  study->add_option("--realizations", study_opt.realizations,
                    "Monte Carlo sample count (default 1000)");
  study->add_option("--seed", study_opt.seed, "master seed (default 0)");
  study->add_option("--sigma", study_opt.sigma, "noise intensity (default 1)");
  study->add_option("--T", study_opt.T, "final time (default 1)");
  study->add_flag("--paper-scale", study_opt.paper_scale,
                  "published configuration: I=10000, tau=2^-14 / h=2^-10");
  study->add_option("--workers", study_opt.workers,
                    "worker threads (default: hardware concurrency)");
  study->add_option("--out", study_opt.out_dir, "output directory (default .)");

  CLI::App* weights =
      app.add_subcommand("weights", "Print the CQ weights b_0..b_n");
  double weights_alpha = 0.5;
  std::int64_t weights_n = 16;
  weights->add_option("--alpha", weights_alpha, "fractional order in (0,2)")
      ->required();
  weights->add_option("--n", weights_n, "highest weight index")->required();

  SolveCliOptions solve_opt;
  CLI::App* solve = app.add_subcommand(
      "solve", "Run one trajectory and dump the final solution as CSV");
  solve->add_option("--alpha", solve_opt.alpha, "fractional order in (0,2)")
      ->required();
  solve->add_option("--h-exp", solve_opt.h_exp, "mesh size h = 2^-k (default 5)");
  solve->add_option("--tau-exp", solve_opt.tau_exp,
                    "time step tau = 2^-k (default 8)");
  solve->add_option("--T", solve_opt.T, "final time (default 1)");
  solve->add_option("--sigma", solve_opt.sigma, "noise intensity (default 1)");
  solve->add_option("--seed", solve_opt.seed, "master seed");
  solve->add_option("--realization", solve_opt.realization,
                    "realization index (default 0)");
  solve->add_option("--psi0", solve_opt.psi0, "initial data: paper or zero")
      ->check(CLI::IsMember({"paper", "zero"}));
  solve->add_option("--source", solve_opt.source, "source term: paper or zero")
      ->check(CLI::IsMember({"paper", "zero"}));
  solve->add_option("--out", solve_opt.out, "output CSV file (default stdout)");
  solve->add_option("--save-noise", solve_opt.save_noise,
                    "write the sampled noise path to this binary file");
  solve->add_option("--load-noise", solve_opt.load_noise,
                    "replay a previously saved noise path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (study->parsed()) return run_study_command(study_opt);
    if (weights->parsed()) {
      const CqWeights w =
          cq_weights(FractionalOrder(weights_alpha), weights_n);
      char line[64];
      for (Eigen::Index j = 0; j < w.count(); ++j) {
        std::snprintf(line, sizeof(line), "%" PRIdMAX " %.17g\n",
                      static_cast<std::intmax_t>(j), w.b[j]);
        std::cout << line;
      }
      return 0;
    }
    if (solve->parsed()) return run_solve_command(solve_opt);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
