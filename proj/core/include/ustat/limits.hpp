#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ustat/engine.hpp"
#include "ustat/kernel.hpp"
#include "ustat/parallel.hpp"
#include "ustat/processes.hpp"
#include "ustat/rng.hpp"

namespace ust::limits {

class RandomMeasureModel;

// Product law of two independent sides; coordinates of x come first.
struct PairedLaw {
  std::shared_ptr<const RandomMeasureModel> x;
  std::shared_ptr<const RandomMeasureModel> y;
};

// Uniform law on stored points (row-major, `dim` columns).
struct EmpiricalLaw {
  std::vector<double> data;
  std::size_t dim = 1;
};

// mu_omega for one path: the marginal law of the ergodic component the path
// lives in. For synthetic mixtures this is the latent component's marginal.
class RandomMeasureModel {
 public:
  using Law = std::variant<processes::MarginalLaw, PairedLaw, EmpiricalLaw>;

  RandomMeasureModel(Law law, std::size_t component_index, std::string description);

  static RandomMeasureModel marginal(processes::MarginalLaw law, std::size_t component = 0);
  static RandomMeasureModel paired(RandomMeasureModel x, RandomMeasureModel y,
                                   std::size_t component = 0);
  // Heuristic plug-in law from observed points.
  static RandomMeasureModel empirical(const SamplePath& sample, std::size_t component = 0);

  const Law& law() const noexcept { return law_; }
  std::size_t component_index() const noexcept { return component_; }
  const std::string& description() const noexcept { return description_; }
  std::size_t dim() const noexcept;
  bool heuristic() const noexcept;

  // Writes one draw into out (size dim()).
  void sample(rng::Engine& engine, std::span<double> out) const;

  // P(X in box) for a box given as one interval per coordinate, when a closed
  // form exists (one-dimensional laws, independent pairs of them, empirical laws).
  std::optional<double> box_probability(std::span<const Interval> box) const;
  // E[X^k] for one-dimensional laws.
  std::optional<double> raw_moment(unsigned k) const;
  // One-dimensional, atomless and symmetric about a point.
  bool symmetric_atomless() const noexcept;
  // Coordinates [0, x_dim) independent of the rest.
  bool independent_pair(std::size_t x_dim) const noexcept;

 private:
  Law law_;
  std::size_t component_;
  std::string description_;
};

enum class LimitMethod { analytic, monte_carlo, exact_box };

std::string to_string(LimitMethod method);

struct LimitEstimate {
  double value = 0.0;
  double std_error = 0.0;  // zero unless method == monte_carlo
  LimitMethod method = LimitMethod::analytic;
};

// mu_omega of an ergodic spec (its own marginal law). Throws for mixtures.
RandomMeasureModel marginal_model(const processes::ProcessSpec& spec, std::size_t component = 0);

// One model per mixture component (a single model for ergodic specs).
std::vector<RandomMeasureModel> component_models(const processes::ProcessSpec& spec);

// mu_omega of the path: the latent component's law for mixtures.
RandomMeasureModel mu_omega_for_path(const processes::ProcessSpec& spec, const SamplePath& path);

// First half of the path as an empirical law; flagged heuristic.
RandomMeasureModel split_sample_model(const SamplePath& path);

// I_m(S, h, omega). Uses the kernel's closed form when it applies to the model
// (exact_box when assembled from box probabilities); otherwise averages h over
// mc_samples independent m-tuples of i.i.d. draws from the model.
LimitEstimate estimate_limit(const RandomMeasureModel& model, const Kernel& k,
                             std::size_t mc_samples, std::uint64_t seed, ExecPolicy policy = {});

// Always the Monte Carlo route. Draws come in fixed blocks with their own
// derived seeds, so the result does not depend on the worker count.
LimitEstimate monte_carlo_limit(const RandomMeasureModel& model, const Kernel& k,
                                std::size_t mc_samples, std::uint64_t seed,
                                ExecPolicy policy = {});

// Per checkpoint: (mean over replicates of |U - limit|^p)^(1/p).
std::vector<double> lp_distance(std::span<const engine::PrefixSeries> series,
                                std::span<const double> limits, double p);

}  // namespace ust::limits
