#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fspde/time_stepper.hpp"

namespace fspde {

/// Initial data of the reference experiment: psi_0(x) = x(1-x).
std::function<Scalar(Scalar)> paper_initial();

/// Source of the reference experiment: +1 on [0,1/2], -1 on (1/2,1].
SourceTerm paper_source();

enum class StudyKind { Spatial, Temporal };

/// Monte Carlo convergence study over dyadic refinement levels 2^-k,
/// k = level_min..level_max. For a spatial study the levels are mesh sizes
/// and fixed_exponent pins tau = 2^-fixed_exponent; for a temporal study the
/// levels are step sizes and fixed_exponent pins h.
struct StudyConfig {
  StudyKind kind = StudyKind::Spatial;
  Scalar alpha = 0.5;
  Scalar T = 1.0;
  Scalar sigma = 1.0;
  int level_min = 2;
  int level_max = 5;
  int fixed_exponent = 12;
  int realizations = 1000;
  std::uint64_t master_seed = 0;
  int workers = 1;
  SourceTerm source = paper_source();
  std::function<Scalar(Scalar)> initial = paper_initial();
};

struct OrderEstimate {
  std::vector<Scalar> pairwise;  // log2(E_k / E_{k+1}) for adjacent levels
  Scalar mean = 0.0;
};

/// Pairwise observed orders of a decreasing error sequence and their mean.
/// Requires at least two positive finite errors.
OrderEstimate estimate_order(const std::vector<Scalar>& errors);

struct TheoreticalOrders {
  Scalar spatial = 0.0;   // 1/alpha - 1/2 for alpha >= 1/2, else 3/2
  Scalar temporal = 0.0;  // 1/2 - alpha/4
  std::string note;       // log-factor annotation, when one applies
};

TheoreticalOrders theoretical_orders(Scalar alpha);

struct ConvergenceReport {
  StudyConfig config;
  std::vector<int> error_levels;      // k of each E_k (level_min+1..level_max)
  std::vector<Scalar> errors;         // E_k, mean of per-realization norms
  std::vector<Scalar> std_errors;     // sigma_hat / sqrt(I)
  std::vector<Scalar> pairwise_orders;
  Scalar mean_order = 0.0;            // NaN when not computable
  Scalar last_order = 0.0;
  Scalar theoretical_order = 0.0;
  std::string theory_note;
  Scalar wall_seconds = 0.0;
};

/// E(h_k) = mean_i || psi_N^{(h_k)}(w_i) - psi_N^{(h_{k-1})}(w_i) ||, with the
/// coarse solution prolonged to the fine mesh and the norm taken with the
/// fine mass matrix. Realizations are coupled across levels through shared
/// per-mode noise streams.
ConvergenceReport spatial_study(const StudyConfig& config);

/// E(tau_k) = mean_i || psi_{N,tau_k}(w_i) - psi_{N,tau_{k-1}}(w_i) || on one
/// fixed mesh; every coarser path is the time-coarsening of the finest one.
ConvergenceReport temporal_study(const StudyConfig& config);

ConvergenceReport run_study(const StudyConfig& config);

/// Deterministic renderings of a report. The CSV is byte-identical across
/// runs and worker counts for a fixed config.
std::string report_csv(const ConvergenceReport& report);
std::string report_markdown(const ConvergenceReport& report);
std::string report_manifest(const ConvergenceReport& report);

/// Writes <basename>.csv, <basename>.md and <basename>.manifest.txt under
/// `directory` (created if missing); returns the CSV path.
std::string write_report_files(const ConvergenceReport& report,
                               const std::string& directory,
                               const std::string& basename);

}  // namespace fspde
