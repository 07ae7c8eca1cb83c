#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "ustat/config.hpp"
#include "ustat/engine.hpp"
#include "ustat/point.hpp"
#include "ustat/rng.hpp"

namespace ust::processes {

struct Normal {
  double mean = 0.0;
  double sd = 1.0;
};

struct Uniform {
  double a = 0.0;
  double b = 1.0;
};

// shift + Exp(rate).
struct Exponential {
  double rate = 1.0;
  double shift = 0.0;
};

// One-dimensional marginal law with closed-form CDF and moments.
class MarginalLaw {
 public:
  using Variant = std::variant<Normal, Uniform, Exponential>;

  MarginalLaw(Variant law);  // NOLINT(google-explicit-constructor)
  // Let a bare Normal{...} etc. convert in one step.
  template <class Law>
    requires std::is_constructible_v<Variant, Law>
  MarginalLaw(Law law) : MarginalLaw(Variant(std::move(law))) {}  // NOLINT

  const Variant& variant() const noexcept { return law_; }
  double sample(rng::Engine& engine) const;
  double cdf(double x) const;
  double mean() const;
  double variance() const;
  // E[X^k].
  double raw_moment(unsigned k) const;
  // Atomless and symmetric about some point.
  bool symmetric() const noexcept;
  bool gaussian() const noexcept { return std::holds_alternative<Normal>(law_); }
  std::string describe() const;

 private:
  Variant law_;
};

struct ProcessSpec;

struct Iid {
  MarginalLaw law;
};

// X_t = mean + rho (X_{t-1} - mean) + sigma eps_t, started in the stationary law.
struct GaussianAr1 {
  double mean = 0.0;
  double rho = 0.0;
  double sigma = 1.0;
};

// X_t = mean + sigma * sum_k coefficients[k] eps_{t-k}.
struct GaussianLinear {
  std::vector<double> coefficients;
  double mean = 0.0;
  double sigma = 1.0;
};

// One component is chosen per path with probability weights[k]; the whole
// path then follows that component.
struct Mixture {
  std::vector<double> weights;
  std::vector<ProcessSpec> components;
};

// (X_i, Y_i) with the two sequences independent of each other.
struct PairedIndependent {
  std::shared_ptr<const ProcessSpec> x;
  std::shared_ptr<const ProcessSpec> y;
};

struct ProcessSpec {
  std::variant<Iid, GaussianAr1, GaussianLinear, Mixture, PairedIndependent> variant;
};

ProcessSpec make_iid(MarginalLaw law);
ProcessSpec make_ar1(double mean, double rho, double sigma);
ProcessSpec make_linear(std::vector<double> coefficients, double mean = 0.0, double sigma = 1.0);
ProcessSpec make_mixture(std::vector<double> weights, std::vector<ProcessSpec> components);
ProcessSpec make_paired(ProcessSpec x, ProcessSpec y);

// Throws ConfigError naming the field ("process.rho", "process.weights", ...).
void validate(const ProcessSpec& spec, const std::string& prefix = "process");

std::size_t dimension(const ProcessSpec& spec);
bool is_mixture(const ProcessSpec& spec) noexcept;
// IID Normal, AR(1) or Gaussian linear.
bool is_gaussian(const ProcessSpec& spec) noexcept;
std::string describe(const ProcessSpec& spec);

// Deterministic in (spec, n, seed). Mixture paths record the latent component.
SamplePath simulate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);

// Cov(X_0, X_lag) for IID and Gaussian-family specs.
double autocovariance(const ProcessSpec& spec, std::size_t lag);

// (1/N) sum_{i=1}^N |Cov(X_0, X_i)|.
double check_ergodicity_cesaro(const ProcessSpec& spec, std::size_t horizon);

class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(Eigen::MatrixXd matrix);

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  double determinant() const;
  double min_eigenvalue() const;

 private:
  Eigen::MatrixXd matrix_;
};

// Entries Cov(X_{i_a}, X_{i_b}) = gamma(|i_a - i_b|).
CovarianceMatrix covariance_matrix(const ProcessSpec& spec, const engine::IndexTuple& indices);

struct DeterminantScan {
  double min_determinant = 0.0;
  std::size_t order = 0;
  std::size_t max_lag = 0;
  std::vector<std::size_t> minimizer;  // 1-based indices attaining the minimum
  // False when the infimum over all tuples is known to be attained inside the
  // scanned window (IID and AR(1)); true otherwise.
  bool window_limited = true;
};

// Minimum of det(Sigma(i_1..i_m)) over increasing tuples with i_1 = 1 and
// i_m - i_1 <= max_lag. Stationarity makes i_1 = 1 exhaustive up to
// translation. For AR(1) the determinant factors as
// gamma(0)^m prod_g (1 - rho^{2 g}) over consecutive gaps g, which is
// smallest at unit gaps, so the window contains the true infimum.
DeterminantScan check_covariance_determinant(const ProcessSpec& spec, std::size_t m,
                                             std::size_t max_lag = 64);

// [process] section (and any sections it references) -> ProcessSpec.
ProcessSpec parse_process_spec(const config::Document& doc, const std::string& section = "process");

}  // namespace ust::processes
