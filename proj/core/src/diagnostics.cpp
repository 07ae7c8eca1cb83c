#include "ustat/diagnostics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <set>

#include "ustat/errors.hpp"
#include "ustat/numeric.hpp"
#include "ustat/rng.hpp"

namespace ust::diagnostics {

std::string to_string(Mode mode) { return mode == Mode::exact ? "exact" : "incomplete"; }

ExperimentConfig parse_experiment_config(const config::Document& doc) {
  ExperimentConfig cfg;
  cfg.process = processes::parse_process_spec(doc, "process");
  cfg.kernel = kernels::parse_kernel_spec(doc, "kernel");

  const auto& s = doc.section("experiment");
  static const std::set<std::string> known{"checkpoints", "replicates", "p",    "mode",
                                           "samples",     "truncation", "seed", "mc_samples"};
  for (const auto& [key, value] : s.entries()) {
    if (known.count(key) == 0) throw ConfigError("unknown key", s.field(key));
  }

  cfg.checkpoints = s.get_sizes("checkpoints");
  cfg.replicates = static_cast<std::size_t>(s.get_uint("replicates", 1));
  cfg.p = s.get_double("p", 1.0);
  const std::string mode = s.get_string("mode", "exact");
  if (mode == "exact") {
    cfg.mode = Mode::exact;
    if (s.has("samples")) throw ConfigError("only used with mode = incomplete", s.field("samples"));
  } else if (mode == "incomplete") {
    cfg.mode = Mode::incomplete;
    cfg.incomplete_samples = static_cast<std::size_t>(s.get_uint("samples"));
  } else {
    throw ConfigError("unknown mode '" + mode + "' (expected exact, incomplete)", s.field("mode"));
  }
  if (s.has("truncation")) cfg.truncation = s.get_double("truncation");
  cfg.master_seed = s.get_uint("seed", 0);
  cfg.mc_samples = static_cast<std::size_t>(s.get_uint("mc_samples", 100000));
  return cfg;
}

void validate(const ExperimentConfig& cfg, const Kernel& k) {
  if (cfg.replicates == 0) throw ConfigError("must be at least 1", "experiment.replicates");
  if (!(cfg.p >= 1.0) || !std::isfinite(cfg.p)) {
    throw ConfigError("must be a finite number >= 1", "experiment.p");
  }
  if (cfg.checkpoints.empty()) throw ConfigError("must not be empty", "experiment.checkpoints");
  for (std::size_t j = 0; j < cfg.checkpoints.size(); ++j) {
    if (cfg.checkpoints[j] < k.order()) {
      throw ConfigError(fmt::format("checkpoint {} is below the kernel order {}",
                                    cfg.checkpoints[j], k.order()),
                        "experiment.checkpoints");
    }
    if (j > 0 && cfg.checkpoints[j] <= cfg.checkpoints[j - 1]) {
      throw ConfigError("must be strictly increasing", "experiment.checkpoints");
    }
  }
  if (cfg.mode == Mode::incomplete && cfg.incomplete_samples == 0) {
    throw ConfigError("must be at least 1", "experiment.samples");
  }
  if (cfg.truncation && !(*cfg.truncation > 0.0 && std::isfinite(*cfg.truncation))) {
    throw ConfigError("must be a finite positive number", "experiment.truncation");
  }
  if (cfg.mc_samples < 2) throw ConfigError("must be at least 2", "experiment.mc_samples");
  const std::size_t dim = processes::dimension(cfg.process);
  if (k.input_dim() != 0 && k.input_dim() != dim) {
    throw ConfigError(fmt::format("kernel '{}' takes {}-dimensional points but the process "
                                  "produces {}-dimensional ones",
                                  k.name(), k.input_dim(), dim),
                      "kernel");
  }
  if (cfg.mode == Mode::exact) {
    const double cost = engine::exact_evaluation_cost(k, cfg.checkpoints.back());
    if (cost > kMaxExactEvaluations) {
      throw InfeasibleError(fmt::format(
          "exact evaluation at n = {} needs {:.3g} kernel evaluations (limit {:.0e}); "
          "set experiment.mode = incomplete and experiment.samples = B",
          cfg.checkpoints.back(), cost, kMaxExactEvaluations));
    }
  }
}

namespace {

bool lacks_guarantee(const Kernel& k) {
  return !k.symmetric() && k.order() >= 3 && k.name() != "indicator";
}

std::size_t nearest(const std::vector<double>& targets, double value) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < targets.size(); ++c) {
    if (std::abs(value - targets[c]) < std::abs(value - targets[best])) best = c;
  }
  return best;
}

}  // namespace

ConvergenceReport convergence_experiment(const ExperimentConfig& cfg, ExecPolicy policy) {
  Kernel k = kernels::build_kernel(cfg.kernel);
  validate(cfg, k);
  if (cfg.truncation) k = engine::truncate_kernel(k, engine::TruncationLevel(*cfg.truncation));

  ConvergenceReport report;
  report.kernel_name = k.name();
  report.order = k.order();
  report.p = cfg.p;
  report.mode = cfg.mode;
  report.incomplete_samples = cfg.incomplete_samples;
  report.master_seed = cfg.master_seed;
  report.checkpoints = cfg.checkpoints;
  report.no_theoretical_guarantee = lacks_guarantee(k);

  // The limit depends on the path only through its ergodic component.
  const auto models = limits::component_models(cfg.process);
  std::vector<limits::LimitEstimate> component_limits;
  for (std::size_t c = 0; c < models.size(); ++c) {
    const auto seed = rng::derive_seed(cfg.master_seed, rng::Stream::monte_carlo, c);
    component_limits.push_back(limits::estimate_limit(models[c], k, cfg.mc_samples, seed, policy));
    report.heuristic_limit = report.heuristic_limit || models[c].heuristic();
  }

  const std::size_t n = cfg.checkpoints.back();
  report.replicates.resize(cfg.replicates);
  // With a single replicate the engine gets the workers instead.
  const ExecPolicy inner = cfg.replicates == 1 ? policy : ExecPolicy{1};
  parallel_for(
      cfg.replicates,
      [&](std::size_t r) {
        ReplicateResult& out = report.replicates[r];
        out.seed = rng::derive_seed(cfg.master_seed, rng::Stream::replicate, r);
        const SamplePath path = processes::simulate(cfg.process, n, out.seed);
        out.latent_component = path.latent_component();
        out.limit = component_limits[out.latent_component.value_or(0)];
        if (cfg.mode == Mode::exact) {
          out.series = engine::prefix_u_statistics(path, k, cfg.checkpoints, inner);
        } else {
          out.series.checkpoints = cfg.checkpoints;
          for (std::size_t j = 0; j < cfg.checkpoints.size(); ++j) {
            const auto seed = rng::derive_seed(out.seed, rng::Stream::incomplete, j);
            out.series.values.push_back(engine::incomplete_u_statistic(
                path.prefix(cfg.checkpoints[j]), k, cfg.incomplete_samples, seed));
          }
        }
      },
      policy);

  std::vector<engine::PrefixSeries> series;
  std::vector<double> limit_values;
  for (const auto& rep : report.replicates) {
    series.push_back(rep.series);
    limit_values.push_back(rep.limit.value);
  }
  report.lp_error = limits::lp_distance(series, limit_values, cfg.p);

  const double count = static_cast<double>(cfg.replicates);
  for (std::size_t j = 0; j < cfg.checkpoints.size(); ++j) {
    double worst = 0.0;
    CompensatedSum u;
    CompensatedSum lim;
    CompensatedSum se;
    for (const auto& rep : report.replicates) {
      worst = std::max(worst, std::abs(rep.series.values[j] - rep.limit.value));
      u += rep.series.values[j];
      lim += rep.limit.value;
      se += rep.limit.std_error;
    }
    report.max_abs_error.push_back(worst);
    report.mean_u.push_back(u.value() / count);
    report.mean_limit.push_back(lim.value() / count);
    report.mean_limit_stderr.push_back(se.value() / count);
  }

  if (processes::is_mixture(cfg.process)) {
    std::vector<double> targets;
    for (const auto& l : component_limits) targets.push_back(l.value);
    report.clusters.resize(targets.size());
    std::vector<CompensatedSum> terminal(targets.size());
    for (std::size_t c = 0; c < targets.size(); ++c) {
      report.clusters[c].component = c;
      report.clusters[c].limit = targets[c];
    }
    for (const auto& rep : report.replicates) {
      const double last = rep.series.values.back();
      const std::size_t latent = rep.latent_component.value_or(0);
      const std::size_t assigned = nearest(targets, last);
      ++report.clusters[latent].count;
      ++report.clusters[assigned].assigned;
      terminal[latent] += last;
      if (assigned == latent) ++report.cluster_agreement;
    }
    for (std::size_t c = 0; c < targets.size(); ++c) {
      const auto& cl = report.clusters[c];
      report.clusters[c].mean_terminal_u =
          cl.count == 0 ? std::numeric_limits<double>::quiet_NaN()
                        : terminal[c].value() / static_cast<double>(cl.count);
    }
  }
  return report;
}

ConvergenceReport indicator_convergence_experiment(const ExperimentConfig& cfg,
                                                   ExecPolicy policy) {
  if (cfg.kernel.name != "indicator") {
    throw ConfigError("expected an indicator kernel, got '" + cfg.kernel.name + "'",
                      "kernel.name");
  }
  if (cfg.truncation) {
    throw ConfigError("indicator kernels are bounded by 1; drop the truncation",
                      "experiment.truncation");
  }
  auto report = convergence_experiment(cfg, policy);
  for (const auto& rep : report.replicates) {
    if (rep.limit.method != limits::LimitMethod::exact_box) {
      throw DomainError(
          "indicator_convergence_experiment: the process has no closed-form box probabilities");
    }
  }
  return report;
}

void write_report_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "# kernel=" << report.kernel_name << '\n';
  out << "# order=" << report.order << '\n';
  out << fmt::format("# p={:.17g}\n", report.p);
  out << "# mode=" << to_string(report.mode) << '\n';
  if (report.mode == Mode::incomplete) out << "# samples=" << report.incomplete_samples << '\n';
  out << "# replicates=" << report.replicates.size() << '\n';
  out << "# master_seed=" << report.master_seed << '\n';
  if (report.no_theoretical_guarantee) {
    out << "# flag=no theoretical guarantee (non-symmetric kernel of order >= 3)\n";
  }
  if (report.heuristic_limit) out << "# flag=heuristic limit (empirical plug-in law)\n";
  for (std::size_t j = 0; j < report.checkpoints.size(); ++j) {
    out << fmt::format("# max_abs_error checkpoint={} value={:.17g}\n", report.checkpoints[j],
                       report.max_abs_error[j]);
  }
  for (const auto& c : report.clusters) {
    out << fmt::format(
        "# cluster component={} limit={:.17g} count={} assigned={} mean_terminal_u={:.17g}\n",
        c.component, c.limit, c.count, c.assigned, c.mean_terminal_u);
  }
  if (!report.clusters.empty()) {
    out << "# cluster_agreement=" << report.cluster_agreement << '\n';
  }

  out << "replicate,checkpoint,u_value,limit_value,limit_stderr,abs_error\n";
  fmt::memory_buffer buf;
  for (std::size_t r = 0; r < report.replicates.size(); ++r) {
    const auto& rep = report.replicates[r];
    for (std::size_t j = 0; j < report.checkpoints.size(); ++j) {
      const double u = rep.series.values[j];
      fmt::format_to(std::back_inserter(buf), "{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", r,
                     report.checkpoints[j], u, rep.limit.value, rep.limit.std_error,
                     std::abs(u - rep.limit.value));
    }
  }
  for (std::size_t j = 0; j < report.checkpoints.size(); ++j) {
    fmt::format_to(std::back_inserter(buf), "-1,{},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                   report.checkpoints[j], report.mean_u[j], report.mean_limit[j],
                   report.mean_limit_stderr[j], report.lp_error[j]);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_summary(std::ostream& out, const ConvergenceReport& report) {
  out << fmt::format("kernel {} (order {}), {} replicates, mode {}", report.kernel_name,
                     report.order, report.replicates.size(), to_string(report.mode));
  if (report.mode == Mode::incomplete) out << " (B = " << report.incomplete_samples << ")";
  out << '\n';
  if (report.no_theoretical_guarantee) {
    out << "note: no theoretical guarantee for non-symmetric kernels of order >= 3\n";
  }
  if (report.heuristic_limit) out << "note: limit from an empirical plug-in law (heuristic)\n";
  out << fmt::format("{:>12}  {:>14}  {:>14}  {:>14}\n", "checkpoint", "mean U",
                     fmt::format("L^{:g} error", report.p), "max |U - I|");
  for (std::size_t j = 0; j < report.checkpoints.size(); ++j) {
    out << fmt::format("{:>12}  {:>14.6g}  {:>14.6g}  {:>14.6g}\n", report.checkpoints[j],
                       report.mean_u[j], report.lp_error[j], report.max_abs_error[j]);
  }
  if (!report.clusters.empty()) {
    out << "clusters (by latent component):\n";
    for (const auto& c : report.clusters) {
      out << fmt::format("  component {}: limit {:.6g}, {} paths, {} assigned, mean terminal U "
                         "{:.6g}\n",
                         c.component, c.limit, c.count, c.assigned, c.mean_terminal_u);
    }
    out << fmt::format("  nearest-limit assignment matches the latent index on {}/{} paths\n",
                       report.cluster_agreement, report.replicates.size());
  }
}

bool dj_identity_check(const SamplePath& path, const Kernel& k2, engine::TruncationLevel r) {
  if (k2.order() != 2) throw DomainError("dj_identity_check: kernel must have order 2");
  const std::size_t n = path.size();
  if (n < 2) throw DomainError("dj_identity_check: need at least two points");
  CompensatedSum sum;
  for (std::size_t j = 2; j <= n; ++j) {
    sum += static_cast<double>(j) * engine::d_jR(path, k2, j, r);
  }
  const double rebuilt = sum.value() / binomial(n, 2);
  const double direct = engine::u_statistic(path, engine::truncate_kernel(k2, r));
  return relative_equal(rebuilt, direct, 1e-12);
}

std::vector<TailMassRow> tail_mass_diagnostic(const SamplePath& path, const Kernel& k, double p,
                                              const std::vector<double>& levels,
                                              std::size_t max_tuples, std::uint64_t rng_seed) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("tail_mass_diagnostic: p must be positive");
  if (max_tuples == 0) throw DomainError("tail_mass_diagnostic: max_tuples must be positive");
  const std::size_t n = path.size();
  const std::size_t m = k.order();
  if (n < m) throw DomainError("tail_mass_diagnostic: path shorter than the kernel order");
  for (double level : levels) {
    if (!(level >= 0.0)) throw DomainError("tail_mass_diagnostic: levels must be >= 0");
  }

  std::vector<double> magnitudes;
  std::vector<PointView> args(m);
  auto evaluate = [&](std::span<const std::size_t> tuple) {
    for (std::size_t l = 0; l < m; ++l) args[l] = path.point(tuple[l] - 1);
    magnitudes.push_back(std::abs(k(args)));
  };

  if (binomial(n, m) <= static_cast<double>(max_tuples)) {
    engine::IncreasingTuples tuples(n, m);
    while (tuples.next()) evaluate(tuples.current());
  } else {
    auto gen = rng::make_engine(rng_seed, rng::Stream::diagnostic);
    std::vector<std::size_t> tuple;
    for (std::size_t b = 0; b < max_tuples; ++b) {
      // Floyd's algorithm: m distinct indices from {1..n}.
      tuple.clear();
      for (std::size_t j = n - m + 1; j <= n; ++j) {
        const std::size_t t = std::uniform_int_distribution<std::size_t>(1, j)(gen);
        tuple.push_back(std::find(tuple.begin(), tuple.end(), t) == tuple.end() ? t : j);
      }
      std::sort(tuple.begin(), tuple.end());
      evaluate(tuple);
    }
  }

  std::vector<TailMassRow> rows;
  const double count = static_cast<double>(magnitudes.size());
  for (double level : levels) {
    CompensatedSum sum;
    for (double a : magnitudes) {
      if (a > level) sum += std::pow(a, p);
    }
    rows.push_back({level, sum.value() / count});
  }
  return rows;
}

}  // namespace ust::diagnostics
