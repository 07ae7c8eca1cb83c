#include "ustat/point.hpp"

#include <cmath>

#include "ustat/errors.hpp"

namespace ust {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw DomainError(std::string(what) + ": coordinates must be finite");
    }
  }
}

}  // namespace

Point::Point(std::vector<double> coords, std::size_t pair_split)
    : coords_(std::move(coords)), pair_split_(pair_split) {
  if (coords_.empty()) throw DomainError("Point: dimension must be at least 1");
  if (pair_split_ >= coords_.size() && pair_split_ != 0) {
    throw DomainError("Point: pair split must leave a non-empty y part");
  }
  require_finite(coords_, "Point");
}

PointView Point::x() const {
  return pair_split_ == 0 ? view() : view().first(pair_split_);
}

PointView Point::y() const {
  if (pair_split_ == 0) throw DomainError("Point: not a paired point");
  return view().subspan(pair_split_);
}

SamplePath::SamplePath(std::vector<double> data, std::size_t dim, std::uint64_t seed,
                       std::optional<std::size_t> latent_component, std::string process_id,
                       std::size_t pair_split)
    : data_(std::move(data)),
      dim_(dim),
      seed_(seed),
      latent_(latent_component),
      process_id_(std::move(process_id)),
      pair_split_(pair_split) {
  if (dim_ == 0) throw DomainError("SamplePath: dimension must be at least 1");
  if (data_.empty()) throw DomainError("SamplePath: length must be at least 1");
  if (data_.size() % dim_ != 0) {
    throw DomainError("SamplePath: data size is not a multiple of the dimension");
  }
  if (pair_split_ >= dim_ && pair_split_ != 0) {
    throw DomainError("SamplePath: pair split must leave a non-empty y part");
  }
  require_finite(data_, "SamplePath");
}

SamplePath SamplePath::from_values(std::vector<double> values, std::uint64_t seed,
                                   std::string process_id) {
  return SamplePath(std::move(values), 1, seed, std::nullopt, std::move(process_id));
}

SamplePath SamplePath::from_points(const std::vector<Point>& points, std::uint64_t seed,
                                   std::string process_id) {
  if (points.empty()) throw DomainError("SamplePath: length must be at least 1");
  const std::size_t dim = points.front().dim();
  const std::size_t split = points.front().pair_split();
  std::vector<double> data;
  data.reserve(points.size() * dim);
  for (const auto& p : points) {
    if (p.dim() != dim) throw DomainError("SamplePath: points must share one dimension");
    data.insert(data.end(), p.coords().begin(), p.coords().end());
  }
  return SamplePath(std::move(data), dim, seed, std::nullopt, std::move(process_id), split);
}

Point SamplePath::point_copy(std::size_t i) const {
  auto v = point(i);
  return Point(std::vector<double>(v.begin(), v.end()), pair_split_);
}

SamplePath SamplePath::prefix(std::size_t n) const {
  if (n == 0 || n > size()) throw DomainError("SamplePath::prefix: length out of range");
  std::vector<double> head(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(n * dim_));
  return SamplePath(std::move(head), dim_, seed_, latent_, process_id_, pair_split_);
}

Sign sgn(double t) {
  if (!std::isfinite(t)) throw DomainError("sgn: argument must be finite");
  if (t > 0.0) return Sign::positive;
  if (t < 0.0) return Sign::negative;
  return Sign::zero;
}

double euclidean_distance(PointView a, PointView b) {
  if (a.size() != b.size()) throw DomainError("euclidean_distance: dimension mismatch");
  if (a.size() == 1) return std::abs(a[0] - b[0]);
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

}  // namespace ust
