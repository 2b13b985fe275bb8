#include "fspde/study.hpp"

#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <mutex>
#include <thread>

namespace fspde {

std::function<Scalar(Scalar)> paper_initial() {
  return [](Scalar x) { return x * (1.0 - x); };
}

SourceTerm paper_source() {
  return SourceTerm::piecewise_const_x({0.5}, {1.0, -1.0});
}

namespace {

Scalar dyadic(int k) { return std::ldexp(1.0, -k); }

/// Runs body(0..count-1) on `workers` threads; any index may run on any
/// thread, results must be written to per-index slots.
void parallel_for(int count, int workers, const std::function<void(int)>& body) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

int steps_for(Scalar T, Scalar tau) {
  const auto n = static_cast<long long>(std::llround(T / tau));
  if (n < 1 || static_cast<Scalar>(n) * tau != T) {
    throw std::invalid_argument("study: T must be an exact multiple of tau");
  }
  return static_cast<int>(n);
}

void validate(const StudyConfig& cfg) {
  FractionalOrder check_alpha(cfg.alpha);
  if (cfg.level_min < 1 || cfg.level_max <= cfg.level_min) {
    throw std::invalid_argument("study: need 1 <= level_min < level_max");
  }
  if (cfg.realizations < 1) {
    throw std::invalid_argument("study: need at least one realization");
  }
  if (cfg.fixed_exponent < 1) {
    throw std::invalid_argument("study: fixed_exponent must be >= 1");
  }
  if (!(cfg.T > 0.0)) {
    throw std::invalid_argument("study: T must be positive");
  }
}

/// Mean and sample standard error per error level from an (levels x I) table
/// of per-realization norms; aggregation order is fixed by realization index.
void aggregate(const Matrix& samples, std::vector<Scalar>& means,
               std::vector<Scalar>& std_errors) {
  const Eigen::Index pairs = samples.rows();
  const Eigen::Index count = samples.cols();
  means.resize(pairs);
  std_errors.resize(pairs);
  for (Eigen::Index p = 0; p < pairs; ++p) {
    Scalar sum = 0.0;
    for (Eigen::Index i = 0; i < count; ++i) sum += samples(p, i);
    const Scalar mean = sum / static_cast<Scalar>(count);
    Scalar ssq = 0.0;
    for (Eigen::Index i = 0; i < count; ++i) {
      const Scalar d = samples(p, i) - mean;
      ssq += d * d;
    }
    means[p] = mean;
    std_errors[p] =
        count > 1 ? std::sqrt(ssq / static_cast<Scalar>(count - 1) /
                              static_cast<Scalar>(count))
                  : 0.0;
  }
}

void finish_report(ConvergenceReport& report) {
  for (Scalar e : report.errors) {
    if (!std::isfinite(e)) {
      throw NumericalError("study: non-finite error value");
    }
  }
  bool orders_computable = report.errors.size() >= 2;
  for (Scalar e : report.errors) orders_computable = orders_computable && e > 0.0;
  if (orders_computable) {
    OrderEstimate est = estimate_order(report.errors);
    report.pairwise_orders = est.pairwise;
    report.mean_order = est.mean;
    report.last_order = est.pairwise.back();
  } else {
    report.pairwise_orders.clear();
    report.mean_order = std::numeric_limits<Scalar>::quiet_NaN();
    report.last_order = std::numeric_limits<Scalar>::quiet_NaN();
  }
  const TheoreticalOrders theory = theoretical_orders(report.config.alpha);
  report.theoretical_order = report.config.kind == StudyKind::Spatial
                                 ? theory.spatial
                                 : theory.temporal;
  report.theory_note =
      report.config.kind == StudyKind::Spatial ? theory.note : "";
}

}  // namespace

OrderEstimate estimate_order(const std::vector<Scalar>& errors) {
  if (errors.size() < 2) {
    throw std::invalid_argument("estimate_order: need at least two errors");
  }
  for (Scalar e : errors) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw std::invalid_argument("estimate_order: errors must be positive");
    }
  }
  OrderEstimate est;
  est.pairwise.reserve(errors.size() - 1);
  Scalar sum = 0.0;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    const Scalar order = std::log2(errors[k] / errors[k + 1]);
    est.pairwise.push_back(order);
    sum += order;
  }
  est.mean = sum / static_cast<Scalar>(est.pairwise.size());
  return est;
}

TheoreticalOrders theoretical_orders(Scalar alpha) {
  FractionalOrder a(alpha);
  TheoreticalOrders t;
  t.temporal = 0.5 - alpha / 4.0;
  if (alpha >= 0.5) {
    t.spatial = 1.0 / alpha - 0.5;
    t.note = "spatial rate holds up to the factor sqrt(log(e + 1/h))";
  } else {
    t.spatial = 1.5;
  }
  return t;
}

ConvergenceReport spatial_study(const StudyConfig& config) {
  validate(config);
  if (config.kind != StudyKind::Spatial) {
    throw std::invalid_argument("spatial_study: config.kind mismatch");
  }
  const auto t_start = std::chrono::steady_clock::now();

  const Scalar tau = dyadic(config.fixed_exponent);
  const int num_steps = steps_for(config.T, tau);
  const Scalar h_min = dyadic(config.level_max);
  if (tau > h_min * h_min) {
    std::cerr << "warning: tau = " << tau
              << " exceeds the h_min^2 = " << h_min * h_min
              << " heuristic; temporal error may pollute the spatial study\n";
  }

  const int levels = config.level_max - config.level_min + 1;
  std::vector<std::unique_ptr<Stepper>> steppers;
  std::vector<TriDiagOperator> masses;
  steppers.reserve(levels);
  for (int k = config.level_min; k <= config.level_max; ++k) {
    SchemeConfig sc{FractionalOrder(config.alpha), Mesh1D(1 << k), tau,
                    num_steps, config.sigma, config.source, config.initial};
    steppers.push_back(std::make_unique<Stepper>(std::move(sc)));
    masses.push_back(steppers.back()->mass());
  }
  const int max_modes = steppers.back()->mode_count();

  const int pairs = levels - 1;
  Matrix samples(pairs, config.realizations);
  parallel_for(config.realizations, config.workers, [&](int i) {
    NoiseConfig nc{max_modes, num_steps, tau, config.master_seed,
                   static_cast<std::uint64_t>(i)};
    const NoisePath path = sample_path(nc);
    std::vector<NodalVector> solutions;
    solutions.reserve(levels);
    for (int l = 0; l < levels; ++l) {
      solutions.push_back(steppers[l]->run(path));
    }
    for (int p = 0; p < pairs; ++p) {
      const NodalVector lifted =
          prolong(solutions[p], solutions[p + 1].mesh);
      NodalVector diff(solutions[p + 1].mesh,
                       solutions[p + 1].values - lifted.values);
      samples(p, i) = discrete_l2_norm(diff, masses[p + 1]);
    }
  });

  ConvergenceReport report;
  report.config = config;
  for (int k = config.level_min + 1; k <= config.level_max; ++k) {
    report.error_levels.push_back(k);
  }
  aggregate(samples, report.errors, report.std_errors);
  finish_report(report);
  report.wall_seconds =
      std::chrono::duration<Scalar>(std::chrono::steady_clock::now() - t_start)
          .count();
  return report;
}

ConvergenceReport temporal_study(const StudyConfig& config) {
  validate(config);
  if (config.kind != StudyKind::Temporal) {
    throw std::invalid_argument("temporal_study: config.kind mismatch");
  }
  const auto t_start = std::chrono::steady_clock::now();

  const Mesh1D mesh(1 << config.fixed_exponent);
  const int levels = config.level_max - config.level_min + 1;
  std::vector<std::unique_ptr<Stepper>> steppers;
  std::vector<int> step_counts;
  for (int k = config.level_min; k <= config.level_max; ++k) {
    const Scalar tau_k = dyadic(k);
    const int n_k = steps_for(config.T, tau_k);
    SchemeConfig sc{FractionalOrder(config.alpha), mesh, tau_k,
                    n_k, config.sigma, config.source, config.initial};
    steppers.push_back(std::make_unique<Stepper>(std::move(sc)));
    step_counts.push_back(n_k);
  }
  const TriDiagOperator mass = assemble_mass(mesh);
  const int num_modes = steppers.front()->mode_count();

  const int pairs = levels - 1;
  Matrix samples(pairs, config.realizations);
  parallel_for(config.realizations, config.workers, [&](int i) {
    NoiseConfig nc{num_modes, step_counts.back(), dyadic(config.level_max),
                   config.master_seed, static_cast<std::uint64_t>(i)};
    std::vector<NoisePath> paths(levels);
    paths[levels - 1] = sample_path(nc);
    for (int l = levels - 2; l >= 0; --l) {
      paths[l] = coarsen_in_time(paths[l + 1], 2);
    }
    std::vector<NodalVector> solutions;
    solutions.reserve(levels);
    for (int l = 0; l < levels; ++l) {
      solutions.push_back(steppers[l]->run(paths[l]));
    }
    for (int p = 0; p < pairs; ++p) {
      NodalVector diff(mesh, solutions[p + 1].values - solutions[p].values);
      samples(p, i) = discrete_l2_norm(diff, mass);
    }
  });

  ConvergenceReport report;
  report.config = config;
  for (int k = config.level_min + 1; k <= config.level_max; ++k) {
    report.error_levels.push_back(k);
  }
  aggregate(samples, report.errors, report.std_errors);
  finish_report(report);
  report.wall_seconds =
      std::chrono::duration<Scalar>(std::chrono::steady_clock::now() - t_start)
          .count();
  return report;
}

ConvergenceReport run_study(const StudyConfig& config) {
  return config.kind == StudyKind::Spatial ? spatial_study(config)
                                           : temporal_study(config);
}

namespace {

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

std::string fmt_or_nan(const char* format, double value) {
  return std::isfinite(value) ? fmt(format, value) : std::string("nan");
}

}  // namespace

std::string report_csv(const ConvergenceReport& report) {
  std::string out = "level,resolution,error,stderr,pairwise_order\n";
  for (std::size_t p = 0; p < report.errors.size(); ++p) {
    out += std::to_string(report.error_levels[p]);
    out += ',' + fmt("%.12e", dyadic(report.error_levels[p]));
    out += ',' + fmt("%.12e", report.errors[p]);
    out += ',' + fmt("%.12e", report.std_errors[p]);
    out += ',';
    if (p >= 1 && !report.pairwise_orders.empty()) {
      out += fmt("%.12e", report.pairwise_orders[p - 1]);
    }
    out += '\n';
  }
  out += "# mean_order," + fmt_or_nan("%.12e", report.mean_order) + '\n';
  out += "# last_order," + fmt_or_nan("%.12e", report.last_order) + '\n';
  out += "# theoretical_order," + fmt("%.12e", report.theoretical_order) + '\n';
  if (!report.theory_note.empty()) {
    out += "# theory_note," + report.theory_note + '\n';
  }
  return out;
}

std::string report_markdown(const ConvergenceReport& report) {
  const bool spatial = report.config.kind == StudyKind::Spatial;
  const char* axis = spatial ? "h_k" : "tau_k";
  std::string head = "| alpha \\ " + std::string(axis) + " |";
  std::string rule = "| --- |";
  std::string row = "| alpha=" + fmt("%g", report.config.alpha) + " |";
  for (std::size_t p = 0; p < report.errors.size(); ++p) {
    head += " 2^-" + std::to_string(report.error_levels[p]) + " |";
    rule += " --- |";
    row += ' ' + fmt("%.4e", report.errors[p]) + " |";
  }
  head += " order |";
  rule += " --- |";
  row += ' ' + fmt_or_nan("%.3f", report.mean_order) + " (" +
         fmt("%.3f", report.theoretical_order) + ") |";
  std::string out = head + '\n' + rule + '\n' + row + '\n';
  if (!report.theory_note.empty()) {
    out += '\n' + report.theory_note + '\n';
  }
  return out;
}

std::string report_manifest(const ConvergenceReport& report) {
  const StudyConfig& c = report.config;
  char seed_buf[32];
  std::snprintf(seed_buf, sizeof(seed_buf), "%" PRIu64, c.master_seed);
  std::string out;
  out += "tool=fspde " + std::string(kVersion) + '\n';
  out += "kind=" + std::string(c.kind == StudyKind::Spatial ? "spatial"
                                                            : "temporal") + '\n';
  out += "alpha=" + fmt("%.17g", c.alpha) + '\n';
  out += "T=" + fmt("%.17g", c.T) + '\n';
  out += "sigma=" + fmt("%.17g", c.sigma) + '\n';
  out += "levels=" + std::to_string(c.level_min) + ".." +
         std::to_string(c.level_max) + '\n';
  out += "fixed_exponent=" + std::to_string(c.fixed_exponent) + '\n';
  out += "realizations=" + std::to_string(c.realizations) + '\n';
  out += "master_seed=" + std::string(seed_buf) + '\n';
  out += "workers=" + std::to_string(c.workers) + '\n';
  out += "wall_seconds=" + fmt("%.3f", report.wall_seconds) + '\n';
  return out;
}

std::string write_report_files(const ConvergenceReport& report,
                               const std::string& directory,
                               const std::string& basename) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const fs::path base = fs::path(directory) / basename;
  const std::string csv_path = base.string() + ".csv";
  std::ofstream(csv_path) << report_csv(report);
  std::ofstream(base.string() + ".md") << report_markdown(report);
  std::ofstream(base.string() + ".manifest.txt") << report_manifest(report);
  return csv_path;
}

}  // namespace fspde
