#include "cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ustat/config.hpp"
#include "ustat/diagnostics.hpp"
#include "ustat/engine.hpp"
#include "ustat/errors.hpp"
#include "ustat/kernels.hpp"
#include "ustat/limits.hpp"
#include "ustat/parallel.hpp"
#include "ustat/path_io.hpp"
#include "ustat/processes.hpp"
#include "ustat/rng.hpp"

namespace ust::cli {
namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string input_path;
  std::string output_path;
};

config::Document load_document(const Options& opt) {
  config::Document doc = opt.config_path.empty() ? config::Document::parse_string("", "<empty>")
                                                 : config::Document::load(opt.config_path);
  for (const auto& assignment : opt.overrides) doc.apply_override(assignment);
  return doc;
}

ExecPolicy policy() { return ExecPolicy{threads_from_env()}; }

// Writes to --output atomically, or to stdout when no file was given.
void emit(const Options& opt, std::ostream& out, const std::string& contents) {
  if (opt.output_path.empty()) {
    out << contents;
  } else {
    processes::write_file_atomically(opt.output_path, contents);
  }
}

const config::Section& section_or_empty(const config::Document& doc, const std::string& name) {
  static const config::Section empty;
  return doc.has_section(name) ? doc.section(name) : empty;
}

// The path under study: --input if given, else a fresh simulation of
// [process] with n and seed from the given section.
SamplePath obtain_path(const Options& opt, const config::Document& doc,
                       const std::string& section) {
  if (!opt.input_path.empty()) return processes::load_path_csv(opt.input_path);
  const auto& s = doc.section(section);
  const auto spec = processes::parse_process_spec(doc);
  return processes::simulate(spec, static_cast<std::size_t>(s.get_uint("n")), s.get_uint("seed", 0));
}

int run_simulate(const Options& opt, std::ostream& out) {
  const auto doc = load_document(opt);
  const auto spec = processes::parse_process_spec(doc);
  const auto& s = doc.section("simulate");
  const auto n = static_cast<std::size_t>(s.get_uint("n"));
  if (n == 0) throw ConfigError("must be at least 1", s.field("n"));
  const auto path = processes::simulate(spec, n, s.get_uint("seed", 0));

  std::ostringstream csv;
  processes::write_path_csv(csv, path);
  emit(opt, out, csv.str());
  if (!opt.output_path.empty()) {
    out << "seed=" << path.seed();
    if (path.latent_component()) out << " latent_component=" << *path.latent_component();
    out << " n=" << path.size() << " -> " << opt.output_path << '\n';
  }
  return kOk;
}

int run_ustat(const Options& opt, std::ostream& out) {
  const auto doc = load_document(opt);
  const auto path = obtain_path(opt, doc, "ustat");
  const auto& s = section_or_empty(doc, "ustat");
  Kernel k = kernels::build_kernel(kernels::parse_kernel_spec(doc));
  if (s.has("truncation")) k = engine::truncate_kernel(k, engine::TruncationLevel(s.get_double("truncation")));

  const std::string mode = s.get_string("mode", "exact");
  double value = 0.0;
  std::size_t samples = 0;
  if (mode == "exact") {
    if (path.size() >= k.order()) {
      const double cost = engine::exact_evaluation_cost(k, path.size());
      if (cost > diagnostics::kMaxExactEvaluations) {
        throw InfeasibleError(fmt::format(
            "exact evaluation at n = {} needs {:.3g} kernel evaluations (limit {:.0e}); "
            "use --set ustat.mode=incomplete --set ustat.samples=B",
            path.size(), cost, diagnostics::kMaxExactEvaluations));
      }
    }
    value = engine::u_statistic(path, k, policy());
  } else if (mode == "incomplete") {
    samples = static_cast<std::size_t>(s.get_uint("samples"));
    const auto seed = rng::derive_seed(s.get_uint("seed", 0), rng::Stream::incomplete);
    value = engine::incomplete_u_statistic(path, k, samples, seed);
  } else {
    throw ConfigError("unknown mode '" + mode + "' (expected exact, incomplete)", s.field("mode"));
  }

  out << fmt::format("{:.12f}\n", value);
  if (!opt.output_path.empty()) {
    processes::write_file_atomically(
        opt.output_path,
        fmt::format("kernel,order,n,mode,samples,u_value\n{},{},{},{},{},{:.17g}\n", k.name(),
                    k.order(), path.size(), mode, samples, value));
  }
  return kOk;
}

int run_limit(const Options& opt, std::ostream& out) {
  const auto doc = load_document(opt);
  const auto& s = section_or_empty(doc, "limit");
  const Kernel k = kernels::build_kernel(kernels::parse_kernel_spec(doc));
  const auto mc = static_cast<std::size_t>(s.get_uint("mc_samples", 100000));
  const auto seed = s.get_uint("seed", 0);

  std::vector<limits::RandomMeasureModel> models;
  if (!opt.input_path.empty()) {
    const auto path = processes::load_path_csv(opt.input_path);
    if (doc.has_section("process")) {
      models.push_back(limits::mu_omega_for_path(processes::parse_process_spec(doc), path));
    } else {
      models.push_back(limits::split_sample_model(path));
    }
  } else {
    models = limits::component_models(processes::parse_process_spec(doc));
  }

  std::string csv = "component,limit_value,limit_stderr,method,heuristic\n";
  for (const auto& model : models) {
    const auto est = limits::estimate_limit(
        model, k, mc, rng::derive_seed(seed, rng::Stream::monte_carlo, model.component_index()),
        policy());
    out << fmt::format("component {} ({}): {:.12g}", model.component_index(), model.description(),
                       est.value);
    if (est.method == limits::LimitMethod::monte_carlo) {
      out << fmt::format(" +/- {:.3g}", est.std_error);
    }
    out << " [" << limits::to_string(est.method) << (model.heuristic() ? ", heuristic" : "")
        << "]\n";
    csv += fmt::format("{},{:.17g},{:.17g},{},{}\n", model.component_index(), est.value,
                       est.std_error, limits::to_string(est.method), model.heuristic() ? 1 : 0);
  }
  if (!opt.output_path.empty()) processes::write_file_atomically(opt.output_path, csv);
  return kOk;
}

int run_converge(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto doc = load_document(opt);
  const auto cfg = diagnostics::parse_experiment_config(doc);
  const auto report = diagnostics::convergence_experiment(cfg, policy());
  std::ostringstream csv;
  diagnostics::write_report_csv(csv, report);
  if (opt.output_path.empty()) {
    diagnostics::write_summary(err, report);
    out << csv.str();
  } else {
    processes::write_file_atomically(opt.output_path, csv.str());
    diagnostics::write_summary(out, report);
  }
  return kOk;
}

int run_check_gaussian(const Options& opt, std::ostream& out) {
  const auto doc = load_document(opt);
  const auto spec = processes::parse_process_spec(doc);
  if (!processes::is_gaussian(spec)) {
    throw ConfigError("check-gaussian needs a Gaussian process (iid normal, ar1 or linear)",
                      "process.type");
  }
  const auto& s = section_or_empty(doc, "check");
  const auto m = static_cast<std::size_t>(s.get_uint("m", 2));
  const auto max_lag = static_cast<std::size_t>(s.get_uint("max_lag", 64));
  if (m == 0) throw ConfigError("must be at least 1", "check.m");
  if (max_lag < m) throw ConfigError("must be at least check.m", "check.max_lag");

  std::ostringstream report;
  report << "process: " << processes::describe(spec) << '\n';
  const auto scan = processes::check_covariance_determinant(spec, m, max_lag);
  std::string where;
  for (std::size_t i : scan.minimizer) where += (where.empty() ? "" : ",") + std::to_string(i);
  const char* det_verdict = !(scan.min_determinant > 0.0) ? "FAIL"
                            : scan.window_limited         ? "WINDOW-LIMITED"
                                                          : "PASS";
  report << fmt::format("min det Sigma over m={} tuples with lags <= {}: {:.12g} at ({})\n", m,
                        max_lag, scan.min_determinant, where);
  report << "determinant condition: " << det_verdict << '\n';

  const double gamma0 = processes::autocovariance(spec, 0);
  std::vector<double> cesaro;
  for (std::size_t horizon : {10, 100, 1000}) {
    cesaro.push_back(processes::check_ergodicity_cesaro(spec, horizon));
    report << fmt::format("cesaro N={}: {:.12g}\n", horizon, cesaro.back());
  }
  const bool decaying = cesaro[1] <= cesaro[0] && cesaro[2] <= cesaro[1];
  const bool small = cesaro[2] <= 1e-2 * gamma0;
  report << "ergodicity condition: " << (decaying && small ? "PASS" : "UNDECIDED") << '\n';

  out << report.str();
  if (!opt.output_path.empty()) processes::write_file_atomically(opt.output_path, report.str());
  return kOk;
}

int run_identity_check(const Options& opt, std::ostream& out) {
  const auto doc = load_document(opt);
  const auto path = obtain_path(opt, doc, "identity");
  const auto& s = section_or_empty(doc, "identity");
  const Kernel k = kernels::build_kernel(kernels::parse_kernel_spec(doc));
  if (k.order() != 2) throw ConfigError("the identity check needs an order-2 kernel", "kernel.name");
  const engine::TruncationLevel r(s.get_double("truncation"));
  const bool ok = diagnostics::dj_identity_check(path, k, r);
  out << fmt::format("pair-sum reconstruction of the truncated U-statistic for {} at n = {}, "
                     "R = {:g}: {}\n",
                     k.name(), path.size(), r.value(), ok ? "PASS" : "FAIL");
  return ok ? kOk : kFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"U-statistics of stationary sequences: simulation, estimation and convergence checks",
               "ustat"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Options opt;
  auto add_common = [&](CLI::App* sub, bool input) {
    sub->add_option("-c,--config", opt.config_path, "Experiment file ([process], [kernel], ...)")
        ->check(CLI::ExistingFile);
    sub->add_option("-s,--set", opt.overrides, "Override: section.key=value (repeatable)");
    sub->add_option("-o,--output", opt.output_path, "Output file (written atomically)");
    if (input) {
      sub->add_option("-i,--input", opt.input_path, "Path CSV to use instead of simulating")
          ->check(CLI::ExistingFile);
    }
  };

  auto* simulate = app.add_subcommand("simulate", "Simulate [process]; n and seed in [simulate]");
  auto* ustat = app.add_subcommand("ustat", "U-statistic of [kernel] on a path");
  auto* limit = app.add_subcommand("limit", "Limit value of [kernel] per ergodic component");
  auto* converge = app.add_subcommand("converge", "Replicated convergence experiment");
  auto* gaussian = app.add_subcommand("check-gaussian", "Determinant and Cesaro checks");
  auto* identity = app.add_subcommand("identity-check",
                                      "Rebuild the truncated order-2 U-statistic from pair sums");
  add_common(simulate, false);
  add_common(ustat, true);
  add_common(limit, true);
  add_common(converge, false);
  add_common(gaussian, false);
  add_common(identity, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*simulate) return run_simulate(opt, out);
    if (*ustat) return run_ustat(opt, out);
    if (*limit) return run_limit(opt, out);
    if (*converge) return run_converge(opt, out, err);
    if (*gaussian) return run_check_gaussian(opt, out);
    if (*identity) return run_identity_check(opt, out);
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsageError;
}

}  // namespace ust::cli
