#include "ustat/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

#include "ustat/errors.hpp"
#include "ustat/limits.hpp"
#include "ustat/numeric.hpp"

namespace ust::kernels {

Box::Box(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  if (intervals_.empty()) throw DomainError("Box: needs at least one interval");
  for (const auto& iv : intervals_) {
    if (std::isnan(iv.lo) || std::isnan(iv.hi) || !(iv.lo < iv.hi)) {
      throw DomainError("Box: every interval needs lo < hi");
    }
  }
}

Box Box::whole_space(std::size_t dim) { return Box(std::vector<Interval>(dim, Interval{})); }

bool Box::contains(PointView x) const {
  if (x.size() != intervals_.size()) throw DomainError("Box: point dimension mismatch");
  for (std::size_t c = 0; c < x.size(); ++c) {
    if (!intervals_[c].contains(x[c])) return false;
  }
  return true;
}

bool operator==(const Box& a, const Box& b) {
  return std::equal(a.intervals_.begin(), a.intervals_.end(), b.intervals_.begin(),
                    b.intervals_.end(), [](const Interval& p, const Interval& q) {
                      return p.lo == q.lo && p.hi == q.hi;
                    });
}

Kernel symmetry_test_kernel() {
  Kernel k("symmetry3", 3, true, [](KernelArgs a) {
    const double x1 = a[0][0];
    const double x2 = a[1][0];
    const double x3 = a[2][0];
    return static_cast<double>(to_int(sgn(2.0 * x1 - x2 - x3)) +
                               to_int(sgn(2.0 * x2 - x1 - x3)) +
                               to_int(sgn(2.0 * x3 - x1 - x2)));
  });
  k.with_input_dim(1).with_bound(3.0).with_analytic_limit(
      [](const limits::RandomMeasureModel& model) -> std::optional<LimitValue> {
        // 2X1 - X2 - X3 is then symmetric about 0 and atomless.
        if (model.symmetric_atomless()) return LimitValue{0.0, false};
        return std::nullopt;
      });
  return k;
}

double dcov_f(PointView z1, PointView z2, PointView z3, PointView z4, const Metric& metric) {
  if (z1.size() != z2.size() || z1.size() != z3.size() || z1.size() != z4.size()) {
    throw DomainError("dcov_f: dimension mismatch");
  }
  return metric(z1, z2) - metric(z1, z3) - metric(z2, z4) + metric(z3, z4);
}

namespace {

void require_pairs(KernelArgs pairs, std::size_t x_dim, const char* who) {
  if (pairs.size() != 6) throw DomainError(std::string(who) + ": needs exactly six pairs");
  if (x_dim == 0) throw DomainError(std::string(who) + ": x part must be non-empty");
  for (const auto& p : pairs) {
    if (p.size() != pairs[0].size() || p.size() <= x_dim) {
      throw DomainError(std::string(who) + ": dimension mismatch");
    }
  }
}

}  // namespace

double dcov_g(KernelArgs pairs, std::size_t x_dim, const Metric& metric, DcovIndexing indexing) {
  require_pairs(pairs, x_dim, "dcov_g");
  auto x = [&](std::size_t i) { return pairs[i].first(x_dim); };
  auto y = [&](std::size_t i) { return pairs[i].subspan(x_dim); };
  const double fx = dcov_f(x(0), x(1), x(2), x(3), metric);
  const double fy = indexing == DcovIndexing::displayed ? dcov_f(y(0), y(1), y(2), y(3), metric)
                                                        : dcov_f(y(0), y(1), y(4), y(5), metric);
  return fx * fy;
}

double dcov_h(KernelArgs pairs, std::size_t x_dim, const Metric& metric, DcovIndexing indexing) {
  require_pairs(pairs, x_dim, "dcov_h");

  std::array<std::size_t, 6> canon{};
  std::iota(canon.begin(), canon.end(), std::size_t{0});
  std::sort(canon.begin(), canon.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(pairs[a].begin(), pairs[a].end(), pairs[b].begin(),
                                        pairs[b].end());
  });

  std::array<std::array<double, 6>, 6> dx{};
  std::array<std::array<double, 6>, 6> dy{};
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = 0; b < 6; ++b) {
      const auto& pa = pairs[canon[a]];
      const auto& pb = pairs[canon[b]];
      dx[a][b] = metric(pa.first(x_dim), pb.first(x_dim));
      dy[a][b] = metric(pa.subspan(x_dim), pb.subspan(x_dim));
    }
  }
  auto f = [](const std::array<std::array<double, 6>, 6>& d, std::size_t a, std::size_t b,
              std::size_t c, std::size_t e) { return d[a][b] - d[a][c] - d[b][e] + d[c][e]; };

  std::array<std::size_t, 6> p{0, 1, 2, 3, 4, 5};
  CompensatedSum sum;
  do {
    const double fx = f(dx, p[0], p[1], p[2], p[3]);
    const double fy = indexing == DcovIndexing::displayed ? f(dy, p[0], p[1], p[2], p[3])
                                                          : f(dy, p[0], p[1], p[4], p[5]);
    sum.add(fx * fy);
  } while (std::next_permutation(p.begin(), p.end()));
  return sum.value() / 720.0;
}

Kernel dcov_kernel(std::size_t x_dim, std::size_t y_dim, DcovIndexing indexing, Metric metric) {
  if (x_dim == 0 || y_dim == 0) throw DomainError("dcov_kernel: both sides need a dimension");
  const char* name = indexing == DcovIndexing::displayed ? "dcov6" : "dcov6-standard";
  Kernel k(name, 6, true, [x_dim, metric, indexing](KernelArgs a) {
    return dcov_h(a, x_dim, metric, indexing);
  });
  k.with_input_dim(x_dim + y_dim)
      .with_symmetrization_base([x_dim, metric, indexing](KernelArgs a) {
        return dcov_g(a, x_dim, metric, indexing);
      })
      .with_analytic_limit(
          [x_dim](const limits::RandomMeasureModel& model) -> std::optional<LimitValue> {
            // Independent sides: E f(x..) factors out and E f = 0 for i.i.d. arguments.
            if (model.independent_pair(x_dim)) return LimitValue{0.0, false};
            return std::nullopt;
          });
  return k;
}

Kernel indicator_product_kernel(std::vector<Box> boxes) {
  if (boxes.empty()) throw DomainError("indicator_product_kernel: needs at least one box");
  const std::size_t dim = boxes.front().dim();
  for (const auto& b : boxes) {
    if (b.dim() != dim) throw DomainError("indicator_product_kernel: boxes differ in dimension");
  }
  const bool symmetric = std::all_of(boxes.begin(), boxes.end(),
                                     [&](const Box& b) { return b == boxes.front(); });
  const std::size_t m = boxes.size();

  std::vector<Factor> factors;
  for (const auto& b : boxes) {
    factors.emplace_back([b](PointView x) { return b.contains(x) ? 1.0 : 0.0; });
  }
  Kernel k("indicator", m, symmetric, [boxes](KernelArgs a) {
    for (std::size_t l = 0; l < boxes.size(); ++l) {
      if (!boxes[l].contains(a[l])) return 0.0;
    }
    return 1.0;
  });
  k.with_input_dim(dim).with_bound(1.0).with_factors(std::move(factors)).with_analytic_limit(
      [boxes](const limits::RandomMeasureModel& model) -> std::optional<LimitValue> {
        if (model.dim() != boxes.front().dim()) return std::nullopt;
        double product = 1.0;
        for (const auto& b : boxes) {
          auto prob = model.box_probability(b.intervals());
          if (!prob) return std::nullopt;
          product *= *prob;
        }
        return LimitValue{product, true};
      });
  return k;
}

Kernel polynomial_product_kernel(std::vector<double> coefficients, std::size_t order) {
  if (coefficients.empty()) throw DomainError("polynomial_product_kernel: no coefficients");
  if (order == 0) throw DomainError("polynomial_product_kernel: order must be at least 1");
  auto p = [coefficients](double x) {
    double acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
    return acc;
  };
  Kernel k("polynomial-product", order, true, [p](KernelArgs a) {
    double prod = 1.0;
    for (const auto& x : a) prod *= p(x[0]);
    return prod;
  });
  k.with_input_dim(1)
      .with_factors(std::vector<Factor>(order, [p](PointView x) { return p(x[0]); }))
      .with_analytic_limit([coefficients, order](const limits::RandomMeasureModel& model)
                               -> std::optional<LimitValue> {
        double mean = 0.0;
        for (std::size_t k = 0; k < coefficients.size(); ++k) {
          if (coefficients[k] == 0.0) continue;
          auto moment = model.raw_moment(static_cast<unsigned>(k));
          if (!moment) return std::nullopt;
          mean += coefficients[k] * *moment;
        }
        return LimitValue{std::pow(mean, static_cast<double>(order)), false};
      });
  if (coefficients.size() == 1) k.with_bound(std::pow(std::abs(coefficients[0]), order));
  return k;
}

Kernel constant_kernel(double value, std::size_t order) {
  if (!std::isfinite(value)) throw DomainError("constant_kernel: value must be finite");
  Kernel k("constant", order, true, [value](KernelArgs) { return value; });
  k.with_input_dim(0).with_bound(std::abs(value)).with_analytic_limit(
      [value](const limits::RandomMeasureModel&) -> std::optional<LimitValue> {
        return LimitValue{value, false};
      });
  return k;
}

Kernel table_kernel(std::vector<double> edges, std::vector<double> values, std::size_t order) {
  if (order == 0) throw DomainError("table_kernel: order must be at least 1");
  if (edges.size() < 2) throw DomainError("table_kernel: need at least two edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i - 1] < edges[i])) throw DomainError("table_kernel: edges must increase");
  }
  const std::size_t bins = edges.size() - 1;
  std::size_t cells = 1;
  for (std::size_t l = 0; l < order; ++l) cells *= bins;
  if (values.size() != cells) {
    throw DomainError("table_kernel: expected " + std::to_string(cells) + " table values");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("table_kernel: values must be finite");
  }

  // Symmetric iff the table is invariant under swapping adjacent axes.
  bool symmetric = true;
  std::vector<std::size_t> digits(order);
  for (std::size_t cell = 0; cell < cells && symmetric; ++cell) {
    std::size_t rest = cell;
    for (std::size_t l = order; l-- > 0;) {
      digits[l] = rest % bins;
      rest /= bins;
    }
    for (std::size_t l = 0; l + 1 < order && symmetric; ++l) {
      auto swapped = digits;
      std::swap(swapped[l], swapped[l + 1]);
      std::size_t other = 0;
      for (std::size_t d : swapped) other = other * bins + d;
      symmetric = values[other] == values[cell];
    }
  }

  auto bin_of = [edges](double x) -> std::ptrdiff_t {
    if (x < edges.front() || x >= edges.back()) return -1;
    return std::upper_bound(edges.begin(), edges.end(), x) - edges.begin() - 1;
  };
  Kernel k("user-table", order, symmetric, [bin_of, values, bins](KernelArgs a) {
    std::size_t cell = 0;
    for (const auto& x : a) {
      const auto b = bin_of(x[0]);
      if (b < 0) return 0.0;
      cell = cell * bins + static_cast<std::size_t>(b);
    }
    return values[cell];
  });
  double bound = 0.0;
  for (double v : values) bound = std::max(bound, std::abs(v));
  k.with_input_dim(1).with_bound(bound).with_analytic_limit(
      [edges, values, bins, order](const limits::RandomMeasureModel& model)
          -> std::optional<LimitValue> {
        if (model.dim() != 1) return std::nullopt;
        std::vector<double> prob(bins);
        for (std::size_t b = 0; b < bins; ++b) {
          const Interval iv{edges[b], edges[b + 1]};
          auto p = model.box_probability(std::span<const Interval>(&iv, 1));
          if (!p) return std::nullopt;
          prob[b] = *p;
        }
        CompensatedSum sum;
        for (std::size_t cell = 0; cell < values.size(); ++cell) {
          double weight = 1.0;
          std::size_t rest = cell;
          for (std::size_t l = 0; l < order; ++l) {
            weight *= prob[rest % bins];
            rest /= bins;
          }
          sum.add(values[cell] * weight);
        }
        return LimitValue{sum.value(), false};
      });
  return k;
}

KernelSpec parse_kernel_spec(const config::Document& doc, const std::string& section) {
  const auto& s = doc.section(section);
  KernelSpec spec;
  spec.name = s.get_string("name");
  for (const auto& [key, value] : s.entries()) {
    if (key != "name") spec.parameters[key] = value;
  }
  return spec;
}

namespace {

class Params {
 public:
  explicit Params(const KernelSpec& spec) : spec_(spec) {}

  std::string field(const std::string& key) const { return "kernel." + key; }
  bool has(const std::string& key) const { return spec_.parameters.count(key) != 0; }

  std::string raw(const std::string& key) const {
    used_.insert(key);
    auto it = spec_.parameters.find(key);
    if (it == spec_.parameters.end()) throw ConfigError("missing required parameter", field(key));
    return it->second;
  }
  double real(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key) && fallback) return *fallback;
    return config::parse_double(raw(key), field(key));
  }
  std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) const {
    if (!has(key) && fallback) return *fallback;
    return static_cast<std::size_t>(config::parse_uint(raw(key), field(key)));
  }
  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : config::split_list(raw(key))) {
      out.push_back(config::parse_double(item, field(key)));
    }
    if (out.empty()) throw ConfigError("must not be empty", field(key));
    return out;
  }
  void reject_unused() const {
    for (const auto& [key, value] : spec_.parameters) {
      if (used_.count(key) == 0) {
        throw ConfigError("unknown parameter for kernel '" + spec_.name + "'", field(key));
      }
    }
  }

 private:
  const KernelSpec& spec_;
  mutable std::set<std::string> used_;
};

Interval parse_interval(const std::string& text, const std::string& field) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("interval '" + text + "' must look like lo:hi", field);
  }
  Interval iv{config::parse_double(text.substr(0, colon), field),
              config::parse_double(text.substr(colon + 1), field)};
  if (!(iv.lo < iv.hi)) throw ConfigError("interval '" + text + "' needs lo < hi", field);
  return iv;
}

// "lo:hi,lo:hi | lo:hi,lo:hi": boxes separated by '|', dimensions by ','.
std::vector<Box> parse_boxes(const std::string& text, const std::string& field) {
  std::vector<Box> boxes;
  for (const auto& box_text : config::split_list(text, '|')) {
    std::vector<Interval> intervals;
    for (const auto& iv : config::split_list(box_text, ',')) {
      intervals.push_back(parse_interval(iv, field));
    }
    if (intervals.empty()) throw ConfigError("empty box", field);
    boxes.emplace_back(std::move(intervals));
  }
  if (boxes.empty()) throw ConfigError("needs at least one box", field);
  for (const auto& b : boxes) {
    if (b.dim() != boxes.front().dim()) throw ConfigError("boxes differ in dimension", field);
  }
  return boxes;
}

Metric parse_metric(const std::string& name, const std::string& field) {
  if (name == "euclidean") return euclidean_distance;
  if (name == "manhattan") {
    return [](PointView a, PointView b) {
      if (a.size() != b.size()) throw DomainError("manhattan distance: dimension mismatch");
      double sum = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
      return sum;
    };
  }
  throw ConfigError("unknown metric '" + name + "' (expected euclidean, manhattan)", field);
}

}  // namespace

std::vector<std::string> registered_kernels() {
  return {"symmetry3",          "dcov6",        "dcov6-standard", "indicator",
          "polynomial-product", "poly-product", "user-table",     "constant"};
}

Kernel build_kernel(const KernelSpec& spec) {
  const Params p(spec);
  std::optional<Kernel> k;
  try {
    if (spec.name == "symmetry3") {
      k = symmetry_test_kernel();
    } else if (spec.name == "dcov6" || spec.name == "dcov6-standard") {
      const auto indexing =
          spec.name == "dcov6" ? DcovIndexing::displayed : DcovIndexing::standard;
      const std::string metric = p.has("metric") ? p.raw("metric") : "euclidean";
      k = dcov_kernel(p.count("x_dim", 1), p.count("y_dim", 1), indexing,
                      parse_metric(metric, p.field("metric")));
    } else if (spec.name == "indicator") {
      k = indicator_product_kernel(parse_boxes(p.raw("boxes"), p.field("boxes")));
    } else if (spec.name == "polynomial-product" || spec.name == "poly-product") {
      k = polynomial_product_kernel(p.reals("coefficients"), p.count("order", 2));
    } else if (spec.name == "user-table") {
      k = table_kernel(p.reals("edges"), p.reals("values"), p.count("order", 2));
    } else if (spec.name == "constant") {
      k = constant_kernel(p.real("value"), p.count("order", 2));
    } else {
      std::string names;
      for (const auto& n : registered_kernels()) names += (names.empty() ? "" : ", ") + n;
      throw ConfigError("unknown kernel '" + spec.name + "'; registered: " + names,
                        "kernel.name");
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), "kernel");
  }
  p.reject_unused();
  return *k;
}

}  // namespace ust::kernels
