#pragma once

// Round circles in the open unit cube and the pairwise predicates used by the
// flows and arc modules.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace circlestab {

using Vec3 = Eigen::Vector3d;

struct Tolerances {
  double radius = 1e-6;      // smallest admissible radius
  double unit = 1e-12;       // normal normalization and parallelism
  double separation = 1e-9;  // minimal curve distance inside a configuration
  double plane = 1e-9;       // open-disk and in-plane margins
  double box = 1e-9;         // open-cube margin
  double distance = 1e-9;    // curve_distance accuracy
  double shell = 1e-9;       // flow shells must clear every curve by this much

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

class Circle {
 public:
  /// Normalizes `normal`; throws InvalidCircle for a tiny radius or a zero normal.
  Circle(const Vec3& center, double radius, const Vec3& normal, const Tolerances& tol = {});

  const Vec3& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  const Vec3& normal() const noexcept { return normal_; }

  /// Orthonormal in-plane basis (u, v) with u x v = normal.
  const Vec3& u() const noexcept { return u_; }
  const Vec3& v() const noexcept { return v_; }
  Vec3 point(double theta) const;

  /// Half-length of the curve's projection onto coordinate axis `axis`.
  double extent(int axis) const;
  bool inside_cube(double margin) const;

  friend bool operator==(const Circle& a, const Circle& b) {
    return a.center_ == b.center_ && a.radius_ == b.radius_ && a.normal_ == b.normal_;
  }

 private:
  Vec3 center_;
  double radius_;
  Vec3 normal_;
  Vec3 u_, v_;
};

class Configuration {
 public:
  Configuration() = default;
  /// Validates cube containment and pairwise disjointness (InvalidConfiguration).
  explicit Configuration(std::vector<Circle> circles, const Tolerances& tol = {});

  std::size_t size() const noexcept { return circles_.size(); }
  bool empty() const noexcept { return circles_.empty(); }
  const Circle& operator[](std::size_t i) const { return circles_.at(i); }
  const std::vector<Circle>& circles() const noexcept { return circles_; }
  const Tolerances& tolerances() const noexcept { return tol_; }

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.circles_ == b.circles_ && a.tol_ == b.tol_;
  }

 private:
  std::vector<Circle> circles_;
  Tolerances tol_;
};

/// First reason `circles` is not a valid configuration, if any.
std::optional<std::string> configuration_problem(const std::vector<Circle>& circles, const Tolerances& tol);

// ---------------------------------------------------------------------------
// Distances

double point_circle_distance(const Vec3& p, const Circle& c);
/// Closed-form min and max distance from p to the curve.
std::pair<double, double> point_circle_range(const Vec3& p, const Circle& c);
/// Distance to the closed disk bounded by the circle.
double point_disk_distance(const Vec3& p, const Circle& c);
double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);

struct SegmentPair {
  double distance;
  Vec3 on_first;
  Vec3 on_second;
};

SegmentPair segment_segment(const Vec3& a0, const Vec3& a1, const Vec3& b0, const Vec3& b1);
/// Min distance from the segment to the curve. When the cheap lower bound
/// already exceeds `stop_above`, that bound is returned instead.
SegmentPair segment_circle(const Vec3& a, const Vec3& b, const Circle& c, double stop_above = 1e300);
SegmentPair segment_disk(const Vec3& a, const Vec3& b, const Circle& c);

/// Min distance between the two curves.
double curve_distance(const Circle& a, const Circle& b);
double min_curve_distance(const Configuration& cfg);

// ---------------------------------------------------------------------------
// Predicates

/// Does the curve of `other` meet the open disk of `owner`?
bool meets_disk(const Circle& owner, const Circle& other, const Tolerances& tol = {});
bool meets_disk(const Configuration& cfg, std::size_t i, std::size_t j);
bool center_in_disk(const Configuration& cfg, std::size_t i, std::size_t j);
bool microcosms_intersect(const Configuration& cfg, std::size_t i, std::size_t j);

struct PairRelation {
  bool microcosms_intersect = false;
  bool j_meets_disk_i = false;
  bool center_j_in_disk_i = false;
  double curve_distance = 0.0;
};

PairRelation relation(const Configuration& cfg, std::size_t i, std::size_t j);

double complexity(const Configuration& cfg);
std::vector<std::size_t> good_circles(const Configuration& cfg);

struct Classification {
  bool in_D = false;
  bool in_F = false;
};

Classification classify(const Configuration& cfg, std::size_t s);

// ---------------------------------------------------------------------------
// Operations

Configuration shrink_slice(const Configuration& cfg, double t);
Circle reference_circle();
Configuration stabilize(const Configuration& cfg);
/// x -> scale * x + shift applied to every circle.
Configuration similarity(const Configuration& cfg, double scale, const Vec3& shift);

struct GeneratorParams {
  int split_depth = 12;         // sub-boxes never come from more than this many cuts
  double radius_min = 0.15;     // radius as a fraction of the box's smallest half-width
  double radius_max = 0.45;
  double center_slack = 0.5;    // fraction of the free room used to offset centers
  int jitter_moves = 0;         // post-pass rigid motions (0 disables)
  double jitter = 0.15;         // small motion size, relative to the radius
  double thread_ratio = 0.3;    // largest radius ratio used by threading moves
};

Configuration random_unlinked(std::size_t k, std::uint64_t seed, const GeneratorParams& params = {});

}  // namespace circlestab
