#include "ustat/processes.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <set>

#include "ustat/errors.hpp"

namespace ust::processes {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

MarginalLaw::MarginalLaw(Variant law) : law_(law) {}

double MarginalLaw::sample(rng::Engine& engine) const {
  return std::visit(
      Overloaded{
          [&](const Normal& l) { return std::normal_distribution<double>(l.mean, l.sd)(engine); },
          [&](const Uniform& l) {
            return std::uniform_real_distribution<double>(l.a, l.b)(engine);
          },
          [&](const Exponential& l) {
            return l.shift + std::exponential_distribution<double>(l.rate)(engine);
          },
      },
      law_);
}

double MarginalLaw::cdf(double x) const {
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  return std::visit(Overloaded{
                        [&](const Normal& l) { return normal_cdf((x - l.mean) / l.sd); },
                        [&](const Uniform& l) { return std::clamp((x - l.a) / (l.b - l.a), 0.0, 1.0); },
                        [&](const Exponential& l) {
                          return x <= l.shift ? 0.0 : -std::expm1(-l.rate * (x - l.shift));
                        },
                    },
                    law_);
}

double MarginalLaw::mean() const { return raw_moment(1); }

double MarginalLaw::variance() const {
  return std::visit(Overloaded{
                        [](const Normal& l) { return l.sd * l.sd; },
                        [](const Uniform& l) { return (l.b - l.a) * (l.b - l.a) / 12.0; },
                        [](const Exponential& l) { return 1.0 / (l.rate * l.rate); },
                    },
                    law_);
}

double MarginalLaw::raw_moment(unsigned k) const {
  return std::visit(
      Overloaded{
          [k](const Normal& l) {
            // E X^k = mu E X^{k-1} + (k-1) sigma^2 E X^{k-2}
            double prev2 = 1.0;
            double prev1 = l.mean;
            if (k == 0) return prev2;
            for (unsigned i = 2; i <= k; ++i) {
              const double next = l.mean * prev1 + (i - 1) * l.sd * l.sd * prev2;
              prev2 = prev1;
              prev1 = next;
            }
            return prev1;
          },
          [k](const Uniform& l) {
            const double kp1 = static_cast<double>(k) + 1.0;
            return (std::pow(l.b, kp1) - std::pow(l.a, kp1)) / (kp1 * (l.b - l.a));
          },
          [k](const Exponential& l) {
            // E (s + Y)^k = sum_i binom(k, i) s^{k-i} i! / rate^i
            double sum = 0.0;
            double binom = 1.0;
            double fact_over_rate = 1.0;
            for (unsigned i = 0; i <= k; ++i) {
              if (i > 0) {
                binom = binom * (k - i + 1) / i;
                fact_over_rate *= i / l.rate;
              }
              sum += binom * std::pow(l.shift, static_cast<double>(k - i)) * fact_over_rate;
            }
            return sum;
          },
      },
      law_);
}

bool MarginalLaw::symmetric() const noexcept {
  return !std::holds_alternative<Exponential>(law_);
}

std::string MarginalLaw::describe() const {
  return std::visit(
      Overloaded{
          [](const Normal& l) { return fmt::format("normal(mean={},sd={})", l.mean, l.sd); },
          [](const Uniform& l) { return fmt::format("uniform(a={},b={})", l.a, l.b); },
          [](const Exponential& l) {
            return fmt::format("exponential(rate={},shift={})", l.rate, l.shift);
          },
      },
      law_);
}

ProcessSpec make_iid(MarginalLaw law) { return ProcessSpec{Iid{law}}; }

ProcessSpec make_ar1(double mean, double rho, double sigma) {
  return ProcessSpec{GaussianAr1{mean, rho, sigma}};
}

ProcessSpec make_linear(std::vector<double> coefficients, double mean, double sigma) {
  return ProcessSpec{GaussianLinear{std::move(coefficients), mean, sigma}};
}

ProcessSpec make_mixture(std::vector<double> weights, std::vector<ProcessSpec> components) {
  return ProcessSpec{Mixture{std::move(weights), std::move(components)}};
}

ProcessSpec make_paired(ProcessSpec x, ProcessSpec y) {
  return ProcessSpec{PairedIndependent{std::make_shared<const ProcessSpec>(std::move(x)),
                                       std::make_shared<const ProcessSpec>(std::move(y))}};
}

namespace {

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(message, field);
}

void validate_law(const MarginalLaw& law, const std::string& prefix) {
  std::visit(Overloaded{
                 [&](const Normal& l) {
                   require(std::isfinite(l.mean), prefix + ".mean", "must be finite");
                   require(std::isfinite(l.sd) && l.sd > 0.0, prefix + ".sd",
                           "must be positive and finite");
                 },
                 [&](const Uniform& l) {
                   require(std::isfinite(l.a), prefix + ".a", "must be finite");
                   require(std::isfinite(l.b) && l.b > l.a, prefix + ".b",
                           "must be finite and greater than a");
                 },
                 [&](const Exponential& l) {
                   require(std::isfinite(l.rate) && l.rate > 0.0, prefix + ".rate",
                           "must be positive and finite");
                   require(std::isfinite(l.shift), prefix + ".shift", "must be finite");
                 },
             },
             law.variant());
}

}  // namespace

void validate(const ProcessSpec& spec, const std::string& prefix) {
  std::visit(
      Overloaded{
          [&](const Iid& s) { validate_law(s.law, prefix); },
          [&](const GaussianAr1& s) {
            require(std::isfinite(s.mean), prefix + ".mean", "must be finite");
            require(std::isfinite(s.rho) && std::abs(s.rho) < 1.0, prefix + ".rho",
                    "must satisfy |rho| < 1 for a stationary AR(1)");
            require(std::isfinite(s.sigma) && s.sigma > 0.0, prefix + ".sigma",
                    "must be positive and finite");
          },
          [&](const GaussianLinear& s) {
            require(!s.coefficients.empty(), prefix + ".coefficients", "must not be empty");
            require(std::all_of(s.coefficients.begin(), s.coefficients.end(),
                                [](double a) { return std::isfinite(a); }),
                    prefix + ".coefficients", "must be finite");
            require(std::any_of(s.coefficients.begin(), s.coefficients.end(),
                                [](double a) { return a != 0.0; }),
                    prefix + ".coefficients", "must contain a non-zero coefficient");
            require(std::isfinite(s.mean), prefix + ".mean", "must be finite");
            require(std::isfinite(s.sigma) && s.sigma > 0.0, prefix + ".sigma",
                    "must be positive and finite");
          },
          [&](const Mixture& s) {
            require(!s.components.empty(), prefix + ".components", "must not be empty");
            require(s.weights.size() == s.components.size(), prefix + ".weights",
                    "need exactly one weight per component");
            double total = 0.0;
            for (double w : s.weights) {
              require(std::isfinite(w) && w >= 0.0, prefix + ".weights",
                      "must be non-negative and finite");
              total += w;
            }
            require(std::abs(total - 1.0) <= 1e-12, prefix + ".weights", "must sum to 1");
            for (std::size_t k = 0; k < s.components.size(); ++k) {
              const std::string sub = prefix + ".components[" + std::to_string(k) + "]";
              require(!is_mixture(s.components[k]), sub, "nested mixtures are not supported");
              validate(s.components[k], sub);
              require(dimension(s.components[k]) == dimension(s.components[0]), sub,
                      "all components must share one dimension");
            }
          },
          [&](const PairedIndependent& s) {
            require(s.x != nullptr, prefix + ".x", "missing specification");
            require(s.y != nullptr, prefix + ".y", "missing specification");
            require(!is_mixture(*s.x), prefix + ".x", "a mixture cannot be one side of a pair");
            require(!is_mixture(*s.y), prefix + ".y", "a mixture cannot be one side of a pair");
            validate(*s.x, prefix + ".x");
            validate(*s.y, prefix + ".y");
          },
      },
      spec.variant);
}

std::size_t dimension(const ProcessSpec& spec) {
  return std::visit(Overloaded{
                        [](const Mixture& s) {
                          return s.components.empty() ? std::size_t{1}
                                                      : dimension(s.components.front());
                        },
                        [](const PairedIndependent& s) {
                          return dimension(*s.x) + dimension(*s.y);
                        },
                        [](const auto&) { return std::size_t{1}; },
                    },
                    spec.variant);
}

bool is_mixture(const ProcessSpec& spec) noexcept {
  return std::holds_alternative<Mixture>(spec.variant);
}

bool is_gaussian(const ProcessSpec& spec) noexcept {
  if (const auto* iid = std::get_if<Iid>(&spec.variant)) return iid->law.gaussian();
  return std::holds_alternative<GaussianAr1>(spec.variant) ||
         std::holds_alternative<GaussianLinear>(spec.variant);
}

std::string describe(const ProcessSpec& spec) {
  return std::visit(
      Overloaded{
          [](const Iid& s) { return "iid(" + s.law.describe() + ")"; },
          [](const GaussianAr1& s) {
            return fmt::format("ar1(mean={},rho={},sigma={})", s.mean, s.rho, s.sigma);
          },
          [](const GaussianLinear& s) {
            return fmt::format("linear(coefficients=[{}],mean={},sigma={})",
                               fmt::join(s.coefficients, ";"), s.mean, s.sigma);
          },
          [](const Mixture& s) {
            std::string out = "mixture(";
            for (std::size_t k = 0; k < s.components.size(); ++k) {
              if (k > 0) out += ";";
              out += fmt::format("{}:{}", s.weights[k], describe(s.components[k]));
            }
            return out + ")";
          },
          [](const PairedIndependent& s) {
            return "paired(" + describe(*s.x) + ";" + describe(*s.y) + ")";
          },
      },
      spec.variant);
}

namespace {

std::vector<double> simulate_values(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);

std::vector<double> simulate_iid(const Iid& s, std::size_t n, std::uint64_t seed) {
  auto engine = rng::make_engine(seed, rng::Stream::path);
  std::vector<double> out(n);
  for (double& v : out) v = s.law.sample(engine);
  return out;
}

std::vector<double> simulate_ar1(const GaussianAr1& s, std::size_t n, std::uint64_t seed) {
  auto engine = rng::make_engine(seed, rng::Stream::path);
  std::normal_distribution<double> eps(0.0, 1.0);
  const double stationary_sd = s.sigma / std::sqrt(1.0 - s.rho * s.rho);
  std::vector<double> out(n);
  double x = s.mean + stationary_sd * eps(engine);
  out[0] = x;
  for (std::size_t t = 1; t < n; ++t) {
    x = s.mean + s.rho * (x - s.mean) + s.sigma * eps(engine);
    out[t] = x;
  }
  return out;
}

std::vector<double> simulate_linear(const GaussianLinear& s, std::size_t n, std::uint64_t seed) {
  auto engine = rng::make_engine(seed, rng::Stream::path);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t q = s.coefficients.size();
  // noise[t + q - 1] is eps_t for t in [-(q-1), n).
  std::vector<double> noise(n + q - 1);
  for (double& e : noise) e = normal(engine);
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    double acc = 0.0;
    for (std::size_t k = 0; k < q; ++k) acc += s.coefficients[k] * noise[t + q - 1 - k];
    out[t] = s.mean + s.sigma * acc;
  }
  return out;
}

std::vector<double> simulate_values(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
  return std::visit(
      Overloaded{
          [&](const Iid& s) { return simulate_iid(s, n, seed); },
          [&](const GaussianAr1& s) { return simulate_ar1(s, n, seed); },
          [&](const GaussianLinear& s) { return simulate_linear(s, n, seed); },
          [&](const Mixture&) -> std::vector<double> {
            throw DomainError("simulate: mixtures are handled at the top level");
          },
          [&](const PairedIndependent& s) {
            const std::size_t dx = dimension(*s.x);
            const std::size_t dy = dimension(*s.y);
            const auto xs = simulate_values(*s.x, n, rng::derive_seed(seed, rng::Stream::path, 1));
            const auto ys = simulate_values(*s.y, n, rng::derive_seed(seed, rng::Stream::path, 2));
            std::vector<double> out;
            out.reserve(n * (dx + dy));
            for (std::size_t t = 0; t < n; ++t) {
              out.insert(out.end(), xs.begin() + static_cast<std::ptrdiff_t>(t * dx),
                         xs.begin() + static_cast<std::ptrdiff_t>((t + 1) * dx));
              out.insert(out.end(), ys.begin() + static_cast<std::ptrdiff_t>(t * dy),
                         ys.begin() + static_cast<std::ptrdiff_t>((t + 1) * dy));
            }
            return out;
          },
      },
      spec.variant);
}

std::size_t pair_split_of(const ProcessSpec& spec) {
  if (const auto* p = std::get_if<PairedIndependent>(&spec.variant)) return dimension(*p->x);
  return 0;
}

std::size_t draw_component(const std::vector<double>& weights, std::uint64_t seed) {
  auto engine = rng::make_engine(seed, rng::Stream::latent);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(engine);
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    last_positive = k;
    cumulative += weights[k];
    if (u < cumulative) return k;
  }
  return last_positive;  // u fell into the rounding gap below 1
}

}  // namespace

SamplePath simulate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("simulate: n must be at least 1");
  validate(spec);
  const std::string id = describe(spec);
  if (const auto* mix = std::get_if<Mixture>(&spec.variant)) {
    const std::size_t k = draw_component(mix->weights, seed);
    const ProcessSpec& component = mix->components[k];
    return SamplePath(simulate_values(component, n, seed), dimension(component), seed, k, id,
                      pair_split_of(component));
  }
  return SamplePath(simulate_values(spec, n, seed), dimension(spec), seed, std::nullopt, id,
                    pair_split_of(spec));
}

double autocovariance(const ProcessSpec& spec, std::size_t lag) {
  return std::visit(
      Overloaded{
          [&](const Iid& s) { return lag == 0 ? s.law.variance() : 0.0; },
          [&](const GaussianAr1& s) {
            return std::pow(s.rho, static_cast<double>(lag)) * s.sigma * s.sigma /
                   (1.0 - s.rho * s.rho);
          },
          [&](const GaussianLinear& s) {
            double acc = 0.0;
            for (std::size_t k = 0; k + lag < s.coefficients.size(); ++k) {
              acc += s.coefficients[k] * s.coefficients[k + lag];
            }
            return s.sigma * s.sigma * acc;
          },
          [&](const Mixture&) -> double {
            throw DomainError(
                "autocovariance: a mixture is not ergodic; query each component instead");
          },
          [&](const PairedIndependent&) -> double {
            throw DomainError("autocovariance: defined for one-dimensional processes only");
          },
      },
      spec.variant);
}

namespace {

void require_gaussian(const ProcessSpec& spec, const char* who) {
  if (!is_gaussian(spec)) {
    throw DomainError(std::string(who) + ": requires a Gaussian process (iid normal, ar1, linear)");
  }
}

}  // namespace

double check_ergodicity_cesaro(const ProcessSpec& spec, std::size_t horizon) {
  require_gaussian(spec, "check_ergodicity_cesaro");
  if (horizon == 0) throw DomainError("check_ergodicity_cesaro: N must be at least 1");
  double sum = 0.0;
  for (std::size_t i = 1; i <= horizon; ++i) sum += std::abs(autocovariance(spec, i));
  return sum / static_cast<double>(horizon);
}

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
    throw DomainError("CovarianceMatrix: must be square and non-empty");
  }
  if (!matrix_.isApprox(matrix_.transpose(), 1e-12)) {
    throw DomainError("CovarianceMatrix: must be symmetric");
  }
  if (min_eigenvalue() < -1e-10) {
    throw DomainError("CovarianceMatrix: must be positive semi-definite");
  }
}

double CovarianceMatrix::determinant() const { return matrix_.determinant(); }

double CovarianceMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

namespace {

Eigen::MatrixXd toeplitz_block(const std::vector<double>& gamma,
                               std::span<const std::size_t> indices) {
  const auto m = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      const auto ia = indices[static_cast<std::size_t>(a)];
      const auto ib = indices[static_cast<std::size_t>(b)];
      out(a, b) = gamma[ia > ib ? ia - ib : ib - ia];
    }
  }
  return out;
}

}  // namespace

CovarianceMatrix covariance_matrix(const ProcessSpec& spec, const engine::IndexTuple& indices) {
  require_gaussian(spec, "covariance_matrix");
  const std::size_t span = indices[indices.size() - 1] - indices[0];
  std::vector<double> gamma(span + 1);
  for (std::size_t lag = 0; lag <= span; ++lag) gamma[lag] = autocovariance(spec, lag);
  return CovarianceMatrix(toeplitz_block(gamma, indices.indices()));
}

DeterminantScan check_covariance_determinant(const ProcessSpec& spec, std::size_t m,
                                             std::size_t max_lag) {
  require_gaussian(spec, "check_covariance_determinant");
  if (m == 0) throw DomainError("check_covariance_determinant: m must be at least 1");
  if (max_lag < m) throw DomainError("check_covariance_determinant: max_lag must be at least m");

  std::vector<double> gamma(max_lag + 1);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) gamma[lag] = autocovariance(spec, lag);

  DeterminantScan scan;
  scan.order = m;
  scan.max_lag = max_lag;
  scan.min_determinant = std::numeric_limits<double>::infinity();
  scan.window_limited = std::holds_alternative<GaussianLinear>(spec.variant);

  std::vector<std::size_t> indices(m);
  indices[0] = 1;
  auto consider = [&] {
    const double det = toeplitz_block(gamma, indices).determinant();
    if (det < scan.min_determinant) {
      scan.min_determinant = det;
      scan.minimizer = indices;
    }
  };
  if (m == 1) {
    consider();
    return scan;
  }
  // Remaining indices range over {2, ..., max_lag + 1}.
  engine::IncreasingTuples rest(max_lag, m - 1);
  while (rest.next()) {
    const auto cur = rest.current();
    for (std::size_t l = 0; l + 1 < m; ++l) indices[l + 1] = cur[l] + 1;
    consider();
  }
  return scan;
}

namespace {

using config::Document;
using config::Section;

void reject_unknown_keys(const Section& section, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : section.entries()) {
    if (allowed.count(key) == 0) throw ConfigError("unknown key", section.field(key));
  }
}

MarginalLaw parse_law(const Section& s) {
  const std::string law = s.get_string("law", "normal");
  if (law == "normal") {
    reject_unknown_keys(s, {"type", "law", "mean", "sd"});
    return MarginalLaw(Normal{s.get_double("mean", 0.0), s.get_double("sd", 1.0)});
  }
  if (law == "uniform") {
    reject_unknown_keys(s, {"type", "law", "a", "b"});
    return MarginalLaw(Uniform{s.get_double("a", 0.0), s.get_double("b", 1.0)});
  }
  if (law == "exponential") {
    reject_unknown_keys(s, {"type", "law", "rate", "shift"});
    return MarginalLaw(Exponential{s.get_double("rate", 1.0), s.get_double("shift", 0.0)});
  }
  throw ConfigError("unknown law '" + law + "' (expected normal, uniform, exponential)",
                    s.field("law"));
}

ProcessSpec parse_node(const Document& doc, const std::string& name) {
  const Section& s = doc.section(name);
  const std::string type = s.get_string("type");
  std::optional<ProcessSpec> parsed;
  if (type == "iid") {
    parsed = make_iid(parse_law(s));
  } else if (type == "ar1") {
    reject_unknown_keys(s, {"type", "mean", "rho", "sigma"});
    parsed = make_ar1(s.get_double("mean", 0.0), s.get_double("rho"), s.get_double("sigma", 1.0));
  } else if (type == "linear") {
    reject_unknown_keys(s, {"type", "coefficients", "mean", "sigma"});
    parsed = make_linear(s.get_doubles("coefficients"), s.get_double("mean", 0.0),
                       s.get_double("sigma", 1.0));
  } else if (type == "mixture") {
    reject_unknown_keys(s, {"type", "weights", "components"});
    std::vector<ProcessSpec> components;
    for (const auto& child : s.get_strings("components")) {
      components.push_back(parse_node(doc, name + "." + child));
    }
    parsed = make_mixture(s.get_doubles("weights"), std::move(components));
  } else if (type == "paired") {
    reject_unknown_keys(s, {"type", "x", "y"});
    parsed = make_paired(parse_node(doc, name + "." + s.get_string("x")),
                       parse_node(doc, name + "." + s.get_string("y")));
  } else {
    throw ConfigError("unknown process type '" + type +
                          "' (expected iid, ar1, linear, mixture, paired)",
                      s.field("type"));
  }
    ProcessSpec spec = std::move(*parsed);
  // Leaf checks report the section's own key names.
  if (!is_mixture(spec) && !std::holds_alternative<PairedIndependent>(spec.variant)) {
    validate(spec, name);
  }
  return spec;
}

}  // namespace

ProcessSpec parse_process_spec(const Document& doc, const std::string& section) {
  ProcessSpec spec = parse_node(doc, section);
  validate(spec, section);
  return spec;
}

}  // namespace ust::processes
