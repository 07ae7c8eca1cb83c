#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ust {

// Non-owning view of one point of the state space R^d. Paired points (x, y)
// are stored as one vector with the x coordinates first.
using PointView = std::span<const double>;

using Metric = std::function<double(PointView, PointView)>;

// Owning point with finite coordinates.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords, std::size_t pair_split = 0);
  Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}

  std::size_t dim() const noexcept { return coords_.size(); }
  // Number of leading coordinates forming the x part of a pair; 0 if unpaired.
  std::size_t pair_split() const noexcept { return pair_split_; }
  double operator[](std::size_t i) const { return coords_[i]; }
  PointView view() const noexcept { return coords_; }
  const std::vector<double>& coords() const noexcept { return coords_; }

  PointView x() const;
  PointView y() const;

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
  std::size_t pair_split_ = 0;
};

// Half-open interval [lo, hi); either bound may be infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double t) const noexcept { return lo <= t && t < hi; }
};

// A finite trajectory X_1, ..., X_n stored row-major (n x dim).
class SamplePath {
 public:
  SamplePath(std::vector<double> data, std::size_t dim, std::uint64_t seed = 0,
             std::optional<std::size_t> latent_component = std::nullopt,
             std::string process_id = {}, std::size_t pair_split = 0);

  static SamplePath from_values(std::vector<double> values, std::uint64_t seed = 0,
                                std::string process_id = "data");
  static SamplePath from_points(const std::vector<Point>& points, std::uint64_t seed = 0,
                                std::string process_id = "data");

  std::size_t size() const noexcept { return data_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t pair_split() const noexcept { return pair_split_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::optional<std::size_t>& latent_component() const noexcept { return latent_; }
  const std::string& process_id() const noexcept { return process_id_; }
  const std::vector<double>& data() const noexcept { return data_; }

  // 0-based access.
  PointView point(std::size_t i) const noexcept {
    return PointView(data_.data() + i * dim_, dim_);
  }
  Point point_copy(std::size_t i) const;

  // The first n points, metadata preserved.
  SamplePath prefix(std::size_t n) const;

 private:
  std::vector<double> data_;
  std::size_t dim_;
  std::uint64_t seed_;
  std::optional<std::size_t> latent_;
  std::string process_id_;
  std::size_t pair_split_;
};

enum class Sign : int { negative = -1, zero = 0, positive = 1 };

constexpr int to_int(Sign s) noexcept { return static_cast<int>(s); }

// Exact sign convention: sgn(0) == 0 with no epsilon band.
Sign sgn(double t);

double euclidean_distance(PointView a, PointView b);

}  // namespace ust
