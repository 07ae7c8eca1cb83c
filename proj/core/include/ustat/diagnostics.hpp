#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ustat/config.hpp"
#include "ustat/engine.hpp"
#include "ustat/kernels.hpp"
#include "ustat/limits.hpp"
#include "ustat/parallel.hpp"
#include "ustat/processes.hpp"

namespace ust::diagnostics {

// Exact runs above this many kernel evaluations are refused.
inline constexpr double kMaxExactEvaluations = 1e9;

enum class Mode { exact, incomplete };

std::string to_string(Mode mode);

struct ExperimentConfig {
  processes::ProcessSpec process = processes::make_iid(processes::Normal{0.0, 1.0});
  kernels::KernelSpec kernel;
  std::vector<std::size_t> checkpoints;
  std::size_t replicates = 1;
  double p = 1.0;
  Mode mode = Mode::exact;
  std::size_t incomplete_samples = 0;  // B, incomplete mode only
  std::optional<double> truncation;
  std::uint64_t master_seed = 0;
  std::size_t mc_samples = 100000;
};

// Reads [process], [kernel] and [experiment]:
//
//   [experiment]
//   checkpoints = 250, 500, 1000
//   replicates = 200
//   p = 1
//   mode = exact            ; or incomplete, with samples = B
//   truncation = 10         ; optional
//   seed = 42
//   mc_samples = 100000
ExperimentConfig parse_experiment_config(const config::Document& doc);

// Checks the config against the built kernel. Throws ConfigError for bad values
// and InfeasibleError when exact mode would exceed kMaxExactEvaluations.
void validate(const ExperimentConfig& cfg, const Kernel& k);

struct ReplicateResult {
  std::uint64_t seed = 0;
  std::optional<std::size_t> latent_component;
  engine::PrefixSeries series;
  limits::LimitEstimate limit;
};

// Replicates grouped by their recorded latent component.
struct ClusterSummary {
  std::size_t component = 0;
  double limit = 0.0;
  std::size_t count = 0;     // replicates whose latent index is this component
  std::size_t assigned = 0;  // replicates whose terminal U is nearest this limit
  double mean_terminal_u = 0.0;
};

struct ConvergenceReport {
  std::string kernel_name;
  std::size_t order = 0;
  double p = 1.0;
  Mode mode = Mode::exact;
  std::size_t incomplete_samples = 0;
  std::uint64_t master_seed = 0;
  std::vector<std::size_t> checkpoints;
  std::vector<ReplicateResult> replicates;

  // Per checkpoint.
  std::vector<double> lp_error;
  std::vector<double> max_abs_error;
  std::vector<double> mean_u;
  std::vector<double> mean_limit;
  std::vector<double> mean_limit_stderr;

  // Mixtures only.
  std::vector<ClusterSummary> clusters;
  std::size_t cluster_agreement = 0;

  // Non-symmetric kernels of order >= 3 outside the indicator family.
  bool no_theoretical_guarantee = false;
  bool heuristic_limit = false;
};

// Simulates cfg.replicates paths with seeds derived from the master seed,
// computes prefix U-statistics (of h_R when a truncation is set) and the limit
// of each path's ergodic component, then aggregates the errors. Replicates run
// in parallel; the report does not depend on the worker count.
ConvergenceReport convergence_experiment(const ExperimentConfig& cfg, ExecPolicy policy = {});

// As convergence_experiment, but insists on an indicator kernel whose limits
// all come from exact box probabilities.
ConvergenceReport indicator_convergence_experiment(const ExperimentConfig& cfg,
                                                   ExecPolicy policy = {});

// Header comments, then replicate,checkpoint,u_value,limit_value,limit_stderr,abs_error
// rows. Summary rows carry replicate=-1 with the mean U, mean limit, mean limit
// standard error and the L^p error.
void write_report_csv(std::ostream& out, const ConvergenceReport& report);
void write_summary(std::ostream& out, const ConvergenceReport& report);

// Rebuilds U_{2,n,h_R} from the d_{j,R} terms and compares it with the direct
// U-statistic of the truncated kernel at relative tolerance 1e-12.
bool dj_identity_check(const SamplePath& path, const Kernel& k2, engine::TruncationLevel r);

struct TailMassRow {
  double level = 0.0;
  double mass = 0.0;
};

// Mean of |h|^p 1{|h| > R} over index tuples, for each R. All tuples are used
// when there are at most max_tuples of them; otherwise max_tuples tuples are
// drawn uniformly. Advisory only.
std::vector<TailMassRow> tail_mass_diagnostic(const SamplePath& path, const Kernel& k, double p,
                                              const std::vector<double>& levels,
                                              std::size_t max_tuples = 1000000,
                                              std::uint64_t rng_seed = 0);

}  // namespace ust::diagnostics
