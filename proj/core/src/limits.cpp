#include "ustat/limits.hpp"

#include <algorithm>
#include <cmath>

#include "ustat/errors.hpp"
#include "ustat/numeric.hpp"

namespace ust::limits {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::size_t kMonteCarloBlock = 4096;

}  // namespace

RandomMeasureModel::RandomMeasureModel(Law law, std::size_t component_index,
                                       std::string description)
    : law_(std::move(law)), component_(component_index), description_(std::move(description)) {
  if (const auto* e = std::get_if<EmpiricalLaw>(&law_)) {
    if (e->dim == 0 || e->data.empty() || e->data.size() % e->dim != 0) {
      throw DomainError("RandomMeasureModel: empirical law needs at least one point");
    }
  }
  if (const auto* p = std::get_if<PairedLaw>(&law_)) {
    if (!p->x || !p->y) throw DomainError("RandomMeasureModel: paired law needs both sides");
  }
}

RandomMeasureModel RandomMeasureModel::marginal(processes::MarginalLaw law,
                                                std::size_t component) {
  std::string description = law.describe();
  return RandomMeasureModel(std::move(law), component, std::move(description));
}

RandomMeasureModel RandomMeasureModel::paired(RandomMeasureModel x, RandomMeasureModel y,
                                              std::size_t component) {
  std::string description = "paired(" + x.description() + ";" + y.description() + ")";
  return RandomMeasureModel(PairedLaw{std::make_shared<const RandomMeasureModel>(std::move(x)),
                                      std::make_shared<const RandomMeasureModel>(std::move(y))},
                            component, std::move(description));
}

RandomMeasureModel RandomMeasureModel::empirical(const SamplePath& sample, std::size_t component) {
  std::string description =
      "empirical(n=" + std::to_string(sample.size()) + ",heuristic split-sample plug-in)";
  return RandomMeasureModel(EmpiricalLaw{sample.data(), sample.dim()}, component,
                            std::move(description));
}

std::size_t RandomMeasureModel::dim() const noexcept {
  return std::visit(Overloaded{
                        [](const processes::MarginalLaw&) { return std::size_t{1}; },
                        [](const PairedLaw& p) { return p.x->dim() + p.y->dim(); },
                        [](const EmpiricalLaw& e) { return e.dim; },
                    },
                    law_);
}

bool RandomMeasureModel::heuristic() const noexcept {
  return std::visit(Overloaded{
                        [](const processes::MarginalLaw&) { return false; },
                        [](const PairedLaw& p) { return p.x->heuristic() || p.y->heuristic(); },
                        [](const EmpiricalLaw&) { return true; },
                    },
                    law_);
}

void RandomMeasureModel::sample(rng::Engine& engine, std::span<double> out) const {
  std::visit(Overloaded{
                 [&](const processes::MarginalLaw& l) { out[0] = l.sample(engine); },
                 [&](const PairedLaw& p) {
                   const std::size_t dx = p.x->dim();
                   p.x->sample(engine, out.first(dx));
                   p.y->sample(engine, out.subspan(dx));
                 },
                 [&](const EmpiricalLaw& e) {
                   const std::size_t rows = e.data.size() / e.dim;
                   const std::size_t r =
                       std::uniform_int_distribution<std::size_t>(0, rows - 1)(engine);
                   std::copy_n(e.data.begin() + static_cast<std::ptrdiff_t>(r * e.dim), e.dim,
                               out.begin());
                 },
             },
             law_);
}

std::optional<double> RandomMeasureModel::box_probability(std::span<const Interval> box) const {
  if (box.size() != dim()) throw DomainError("box_probability: box dimension mismatch");
  return std::visit(
      Overloaded{
          [&](const processes::MarginalLaw& l) -> std::optional<double> {
            const Interval& iv = box[0];
            return std::max(0.0, l.cdf(iv.hi) - l.cdf(iv.lo));
          },
          [&](const PairedLaw& p) -> std::optional<double> {
            const std::size_t dx = p.x->dim();
            auto px = p.x->box_probability(box.first(dx));
            auto py = p.y->box_probability(box.subspan(dx));
            if (!px || !py) return std::nullopt;
            return *px * *py;
          },
          [&](const EmpiricalLaw& e) -> std::optional<double> {
            const std::size_t rows = e.data.size() / e.dim;
            std::size_t hits = 0;
            for (std::size_t r = 0; r < rows; ++r) {
              bool inside = true;
              for (std::size_t c = 0; c < e.dim && inside; ++c) {
                inside = box[c].contains(e.data[r * e.dim + c]);
              }
              hits += inside ? 1 : 0;
            }
            return static_cast<double>(hits) / static_cast<double>(rows);
          },
      },
      law_);
}

std::optional<double> RandomMeasureModel::raw_moment(unsigned k) const {
  return std::visit(Overloaded{
                        [&](const processes::MarginalLaw& l) -> std::optional<double> {
                          return l.raw_moment(k);
                        },
                        [&](const PairedLaw&) -> std::optional<double> { return std::nullopt; },
                        [&](const EmpiricalLaw& e) -> std::optional<double> {
                          if (e.dim != 1) return std::nullopt;
                          CompensatedSum sum;
                          for (double v : e.data) sum.add(std::pow(v, static_cast<double>(k)));
                          return sum.value() / static_cast<double>(e.data.size());
                        },
                    },
                    law_);
}

bool RandomMeasureModel::symmetric_atomless() const noexcept {
  const auto* l = std::get_if<processes::MarginalLaw>(&law_);
  return l != nullptr && l->symmetric();
}

bool RandomMeasureModel::independent_pair(std::size_t x_dim) const noexcept {
  const auto* p = std::get_if<PairedLaw>(&law_);
  return p != nullptr && p->x->dim() == x_dim;
}

std::string to_string(LimitMethod method) {
  switch (method) {
    case LimitMethod::analytic:
      return "analytic";
    case LimitMethod::monte_carlo:
      return "monte_carlo";
    case LimitMethod::exact_box:
      return "exact_box";
  }
  return "unknown";
}

RandomMeasureModel marginal_model(const processes::ProcessSpec& spec, std::size_t component) {
  using namespace processes;
  return std::visit(
      Overloaded{
          [&](const Iid& s) { return RandomMeasureModel::marginal(s.law, component); },
          [&](const GaussianAr1& s) {
            const double sd = s.sigma / std::sqrt(1.0 - s.rho * s.rho);
            return RandomMeasureModel::marginal(Normal{s.mean, sd}, component);
          },
          [&](const GaussianLinear& s) {
            const double sd = std::sqrt(autocovariance(spec, 0));
            return RandomMeasureModel::marginal(Normal{s.mean, sd}, component);
          },
          [&](const Mixture&) -> RandomMeasureModel {
            throw DomainError("marginal_model: a mixture has one law per component");
          },
          [&](const PairedIndependent& s) {
            return RandomMeasureModel::paired(marginal_model(*s.x), marginal_model(*s.y),
                                              component);
          },
      },
      spec.variant);
}

std::vector<RandomMeasureModel> component_models(const processes::ProcessSpec& spec) {
  std::vector<RandomMeasureModel> out;
  if (const auto* mix = std::get_if<processes::Mixture>(&spec.variant)) {
    for (std::size_t k = 0; k < mix->components.size(); ++k) {
      out.push_back(marginal_model(mix->components[k], k));
    }
  } else {
    out.push_back(marginal_model(spec, 0));
  }
  return out;
}

RandomMeasureModel mu_omega_for_path(const processes::ProcessSpec& spec, const SamplePath& path) {
  if (const auto* mix = std::get_if<processes::Mixture>(&spec.variant)) {
    const auto& latent = path.latent_component();
    if (!latent) throw DomainError("mu_omega_for_path: mixture path carries no latent component");
    if (*latent >= mix->components.size()) {
      throw DomainError("mu_omega_for_path: latent component out of range");
    }
    return marginal_model(mix->components[*latent], *latent);
  }
  return marginal_model(spec, 0);
}

RandomMeasureModel split_sample_model(const SamplePath& path) {
  if (path.size() < 2) throw DomainError("split_sample_model: need at least two points");
  return RandomMeasureModel::empirical(path.prefix(path.size() / 2));
}

LimitEstimate estimate_limit(const RandomMeasureModel& model, const Kernel& k,
                             std::size_t mc_samples, std::uint64_t seed, ExecPolicy policy) {
  if (const auto& hook = k.analytic_limit()) {
    if (auto value = hook(model)) {
      return {value->value, 0.0,
              value->from_box_probabilities ? LimitMethod::exact_box : LimitMethod::analytic};
    }
  }
  return monte_carlo_limit(model, k, mc_samples, seed, policy);
}

LimitEstimate monte_carlo_limit(const RandomMeasureModel& model, const Kernel& k,
                                std::size_t mc_samples, std::uint64_t seed, ExecPolicy policy) {
  if (mc_samples < 2) throw DomainError("monte_carlo_limit: need at least 2 samples");
  if (k.input_dim() != 0 && k.input_dim() != model.dim()) {
    throw DomainError("monte_carlo_limit: kernel input dimension does not match the model");
  }

  const std::size_t m = k.order();
  const std::size_t d = model.dim();
  // Arguments are i.i.d., so a symmetrized kernel and its base share one mean.
  const Evaluator& eval = k.symmetrization_base() ? k.symmetrization_base() : k.evaluator();

  struct Block {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
  };
  const std::size_t blocks = (mc_samples + kMonteCarloBlock - 1) / kMonteCarloBlock;
  std::vector<Block> partial(blocks);

  parallel_for(
      blocks,
      [&](std::size_t b) {
        auto engine = rng::make_engine(seed, rng::Stream::monte_carlo, b);
        const std::size_t begin = b * kMonteCarloBlock;
        const std::size_t end = std::min(mc_samples, begin + kMonteCarloBlock);
        std::vector<double> coords(m * d);
        std::vector<PointView> args(m);
        for (std::size_t l = 0; l < m; ++l) args[l] = PointView(coords.data() + l * d, d);
        Block acc;
        for (std::size_t s = begin; s < end; ++s) {
          for (std::size_t l = 0; l < m; ++l) {
            model.sample(engine, std::span<double>(coords.data() + l * d, d));
          }
          const double v = eval(args);
          acc.count += 1.0;
          const double delta = v - acc.mean;
          acc.mean += delta / acc.count;
          acc.m2 += delta * (v - acc.mean);
        }
        partial[b] = acc;
      },
      policy);

  // Chan et al. pairwise merge, in block order.
  Block total;
  for (const Block& b : partial) {
    if (b.count == 0.0) continue;
    const double n = total.count + b.count;
    const double delta = b.mean - total.mean;
    total.mean += delta * b.count / n;
    total.m2 += b.m2 + delta * delta * total.count * b.count / n;
    total.count = n;
  }
  const double variance = total.m2 / (total.count - 1.0);
  if (!std::isfinite(total.mean)) {
    throw DomainError("monte_carlo_limit: kernel produced a non-finite value");
  }
  return {total.mean, std::sqrt(variance / total.count), LimitMethod::monte_carlo};
}

std::vector<double> lp_distance(std::span<const engine::PrefixSeries> series,
                                std::span<const double> limits, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("lp_distance: p must be a finite real >= 1");
  if (series.empty()) throw DomainError("lp_distance: no replicates");
  if (series.size() != limits.size()) {
    throw DomainError("lp_distance: need exactly one limit per replicate");
  }
  const auto& checkpoints = series.front().checkpoints;
  for (const auto& s : series) {
    if (s.checkpoints != checkpoints || s.values.size() != checkpoints.size()) {
      throw DomainError("lp_distance: replicates must share checkpoints");
    }
  }

  std::vector<double> out(checkpoints.size());
  const auto replicates = static_cast<double>(series.size());
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    CompensatedSum sum;
    for (std::size_t r = 0; r < series.size(); ++r) {
      const double err = std::abs(series[r].values[c] - limits[r]);
      sum.add(p == 1.0 ? err : std::pow(err, p));
    }
    const double mean = sum.value() / replicates;
    out[c] = p == 1.0 ? mean : std::pow(mean, 1.0 / p);
  }
  return out;
}

}  // namespace ust::limits
