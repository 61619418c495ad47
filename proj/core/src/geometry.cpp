#include "circlestab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <Eigen/Geometry>

#include "circlestab/error.hpp"
#include "circlestab/random.hpp"

namespace circlestab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Brent on [lo, hi]; returns (argmin, min).
template <class F>
std::pair<double, double> brent(F&& f, double lo, double hi) {
  std::uintmax_t iterations = 200;
  return boost::math::tools::brent_find_minima(f, lo, hi, std::numeric_limits<double>::digits - 1, iterations);
}

// Sample f on a grid over [lo, hi] (periodic if requested), refine every
// sampled local minimum by Brent, and return the best (argmin, min).
template <class F>
std::pair<double, double> sampled_minimum(F&& f, double lo, double hi, int samples, bool periodic) {
  const int n = periodic ? samples : samples + 1;
  const double step = (hi - lo) / samples;
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) values[i] = f(lo + step * i);

  std::pair<double, double> best{lo, values[0]};
  for (int i = 0; i < n; ++i) {
    if (values[i] < best.second) best = {lo + step * i, values[i]};
    const double left = (i > 0) ? values[i - 1] : (periodic ? values[n - 1] : values[i]);
    const double right = (i + 1 < n) ? values[i + 1] : (periodic ? values[0] : values[i]);
    if (values[i] > left || values[i] > right) continue;
    double a = lo + step * (i - 1), b = lo + step * (i + 1);
    if (!periodic) {
      a = std::max(a, lo);
      b = std::min(b, hi);
    }
    auto refined = brent(f, a, b);
    if (refined.second < best.second) best = refined;
  }
  return best;
}

Vec3 any_orthogonal(const Vec3& n) {
  const Vec3 a = std::abs(n.x()) <= std::abs(n.y()) && std::abs(n.x()) <= std::abs(n.z()) ? Vec3::UnitX()
                 : std::abs(n.y()) <= std::abs(n.z())                                     ? Vec3::UnitY()
                                                                                           : Vec3::UnitZ();
  return n.cross(a).normalized();
}

Vec3 closest_on_circle(const Vec3& p, const Circle& c) {
  const Vec3 d = p - c.center();
  Vec3 in_plane = d - d.dot(c.normal()) * c.normal();
  const double rho = in_plane.norm();
  if (rho < 1e-300) return c.center() + c.radius() * c.u();
  return c.center() + (c.radius() / rho) * in_plane;
}

Vec3 closest_on_disk(const Vec3& p, const Circle& c) {
  const Vec3 d = p - c.center();
  const Vec3 in_plane = d - d.dot(c.normal()) * c.normal();
  const double rho = in_plane.norm();
  if (rho <= c.radius()) return c.center() + in_plane;
  return c.center() + (c.radius() / rho) * in_plane;
}

void require_distinct(std::size_t i, std::size_t j, std::size_t k) {
  require(i != j, ErrorCode::InvalidArgument, "pair predicate called with i == j");
  require(i < k && j < k, ErrorCode::InvalidArgument, "circle index out of range");
}

}  // namespace

// ---------------------------------------------------------------------------

Circle::Circle(const Vec3& center, double radius, const Vec3& normal, const Tolerances& tol)
    : center_(center), radius_(radius) {
  require(std::isfinite(radius) && radius > tol.radius, ErrorCode::InvalidCircle,
          "radius must exceed " + std::to_string(tol.radius));
  require(center.allFinite() && normal.allFinite(), ErrorCode::InvalidCircle, "non-finite circle data");
  const double len = normal.norm();
  require(len > tol.unit, ErrorCode::InvalidCircle, "normal must be nonzero");
  // Already-unit normals are kept bit-for-bit so files round-trip.
  normal_ = std::abs(len - 1.0) <= 4 * std::numeric_limits<double>::epsilon() ? normal : Vec3(normal / len);
  u_ = any_orthogonal(normal_);
  v_ = normal_.cross(u_);
}

Vec3 Circle::point(double theta) const {
  return center_ + radius_ * (std::cos(theta) * u_ + std::sin(theta) * v_);
}

double Circle::extent(int axis) const {
  const double n = normal_[axis];
  return radius_ * std::sqrt(std::max(0.0, 1.0 - n * n));
}

bool Circle::inside_cube(double margin) const {
  for (int e = 0; e < 3; ++e) {
    const double ext = extent(e);
    if (!(center_[e] - ext > margin && center_[e] + ext < 1.0 - margin)) return false;
  }
  return true;
}

std::optional<std::string> configuration_problem(const std::vector<Circle>& circles, const Tolerances& tol) {
  for (std::size_t i = 0; i < circles.size(); ++i)
    if (!circles[i].inside_cube(tol.box)) return "circle " + std::to_string(i) + " leaves the open unit cube";
  for (std::size_t i = 0; i < circles.size(); ++i)
    for (std::size_t j = i + 1; j < circles.size(); ++j) {
      const auto& a = circles[i];
      const auto& b = circles[j];
      if ((a.center() - b.center()).norm() - a.radius() - b.radius() > tol.separation) continue;
      const double d = curve_distance(a, b);
      if (!(d > tol.separation)) {
        std::ostringstream os;
        os << "circles " << i << " and " << j << " are not disjoint (distance " << d << ")";
        return os.str();
      }
    }
  return std::nullopt;
}

Configuration::Configuration(std::vector<Circle> circles, const Tolerances& tol)
    : circles_(std::move(circles)), tol_(tol) {
  if (auto problem = configuration_problem(circles_, tol_)) fail(ErrorCode::InvalidConfiguration, *problem);
}

// ---------------------------------------------------------------------------

std::pair<double, double> point_circle_range(const Vec3& p, const Circle& c) {
  const Vec3 d = p - c.center();
  const double h = d.dot(c.normal());
  const double rho = (d - h * c.normal()).norm();
  return {std::hypot(h, rho - c.radius()), std::hypot(h, rho + c.radius())};
}

double point_circle_distance(const Vec3& p, const Circle& c) { return point_circle_range(p, c).first; }

double point_disk_distance(const Vec3& p, const Circle& c) {
  const Vec3 d = p - c.center();
  const double h = d.dot(c.normal());
  const double rho = (d - h * c.normal()).norm();
  if (rho <= c.radius()) return std::abs(h);
  return std::hypot(h, rho - c.radius());
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (a + s * ab - p).norm();
}

SegmentPair segment_segment(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2) {
  const Vec3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  constexpr double tiny = 1e-300;
  double s = 0, t = 0;
  if (a <= tiny && e <= tiny) {
    // both degenerate
  } else if (a <= tiny) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= tiny) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 1e-18 * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0) {
        t = 0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1) {
        t = 1;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  const Vec3 x = p1 + s * d1, y = p2 + t * d2;
  return {(x - y).norm(), x, y};
}

SegmentPair segment_circle(const Vec3& a, const Vec3& b, const Circle& c, double stop_above) {
  const double lower = point_segment_distance(c.center(), a, b) - c.radius();
  if (lower > stop_above) return {lower, a, c.center()};
  const Vec3 ab = b - a;
  auto f = [&](double s) { return point_circle_distance(a + s * ab, c); };
  const auto [s, d] = sampled_minimum(f, 0.0, 1.0, 16, false);
  const Vec3 x = a + s * ab;
  return {d, x, closest_on_circle(x, c)};
}

SegmentPair segment_disk(const Vec3& a, const Vec3& b, const Circle& c) {
  const double ha = (a - c.center()).dot(c.normal());
  const double hb = (b - c.center()).dot(c.normal());
  if ((ha <= 0 && hb >= 0) || (ha >= 0 && hb <= 0)) {
    if (ha != hb) {
      const double s = ha / (ha - hb);
      const Vec3 x = a + s * (b - a);
      if (point_disk_distance(x, c) <= 0.0 || (x - c.center()).norm() < c.radius()) return {0.0, x, x};
    }
  }
  // Distance to a convex set is convex along the segment.
  const Vec3 ab = b - a;
  auto f = [&](double s) { return point_disk_distance(a + s * ab, c); };
  auto [s, d] = brent(f, 0.0, 1.0);
  for (double end : {0.0, 1.0})
    if (f(end) < d) {
      s = end;
      d = f(end);
    }
  const Vec3 x = a + s * ab;
  return {d, x, closest_on_disk(x, c)};
}

double curve_distance(const Circle& a, const Circle& b) {
  auto f = [&](double theta) { return point_circle_distance(a.point(theta), b); };
  return sampled_minimum(f, 0.0, kTwoPi, 64, true).second;
}

double min_curve_distance(const Configuration& cfg) {
  double best = std::numeric_limits<double>::infinity();
  const auto& cs = cfg.circles();
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      const double lower = (cs[i].center() - cs[j].center()).norm() - cs[i].radius() - cs[j].radius();
      if (lower >= best) continue;
      best = std::min(best, curve_distance(cs[i], cs[j]));
    }
  return best;
}

// ---------------------------------------------------------------------------

bool meets_disk(const Circle& owner, const Circle& other, const Tolerances& tol) {
  const Vec3& n = owner.normal();
  const Vec3 offset = other.center() - owner.center();
  const double h0 = offset.dot(n);
  const double parallel = std::abs(n.dot(other.normal()));

  if (1.0 - parallel <= tol.unit) {
    if (std::abs(h0) >= tol.plane) return false;
    const double d = offset.norm();
    require(!(d < tol.plane && std::abs(owner.radius() - other.radius()) < tol.plane),
            ErrorCode::DegenerateGeometry, "coincident circles");
    // Coplanar: the nearest point of the other curve to the owner's center.
    return std::abs(d - other.radius()) < owner.radius() - tol.plane;
  }

  // other(θ) = c + r(cos θ u + sin θ v); its height above the plane is
  // h0 + A cos θ + B sin θ.
  const double A = other.radius() * other.u().dot(n);
  const double B = other.radius() * other.v().dot(n);
  const double R = std::hypot(A, B);
  if (std::abs(h0) > R) return false;
  const double base = std::atan2(B, A);
  const double spread = std::acos(std::clamp(-h0 / R, -1.0, 1.0));
  for (double theta : {base + spread, base - spread}) {
    const Vec3 p = other.point(theta) - owner.center();
    const double rho = (p - p.dot(n) * n).norm();
    if (rho < owner.radius() - tol.plane) return true;
  }
  return false;
}

bool meets_disk(const Configuration& cfg, std::size_t i, std::size_t j) {
  require_distinct(i, j, cfg.size());
  return meets_disk(cfg[i], cfg[j], cfg.tolerances());
}

bool center_in_disk(const Configuration& cfg, std::size_t i, std::size_t j) {
  require_distinct(i, j, cfg.size());
  const auto& ci = cfg[i];
  const Vec3 d = cfg[j].center() - ci.center();
  const double h = d.dot(ci.normal());
  const double eps = cfg.tolerances().plane;
  return std::abs(h) < eps && (d - h * ci.normal()).norm() < ci.radius() - eps;
}

bool microcosms_intersect(const Configuration& cfg, std::size_t i, std::size_t j) {
  require_distinct(i, j, cfg.size());
  return (cfg[i].center() - cfg[j].center()).norm() <= 2.0 * (cfg[i].radius() + cfg[j].radius());
}

PairRelation relation(const Configuration& cfg, std::size_t i, std::size_t j) {
  return {microcosms_intersect(cfg, i, j), meets_disk(cfg, i, j), center_in_disk(cfg, i, j),
          curve_distance(cfg[i], cfg[j])};
}

double complexity(const Configuration& cfg) {
  double worst = 0.0;
  for (std::size_t i = 0; i < cfg.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.size(); ++j) {
      if (!microcosms_intersect(cfg, i, j)) continue;
      const double a = cfg[i].radius(), b = cfg[j].radius();
      worst = std::max(worst, std::min(a, b) / std::max(a, b));
    }
  return worst;
}

std::vector<std::size_t> good_circles(const Configuration& cfg) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    bool good = true;
    for (std::size_t j = 0; j < cfg.size() && good; ++j)
      if (j != i && meets_disk(cfg, i, j)) good = false;
    if (good) out.push_back(i);
  }
  return out;
}

Classification classify(const Configuration& cfg, std::size_t s) {
  require(s <= cfg.size(), ErrorCode::InvalidArgument, "classify needs s <= k");
  std::size_t good = 0, loose = 0;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    bool is_good = true, is_loose = true;
    for (std::size_t j = 0; j < cfg.size(); ++j) {
      if (j == i || !meets_disk(cfg, i, j)) continue;
      is_good = false;
      if (center_in_disk(cfg, i, j)) is_loose = false;
    }
    good += is_good;
    loose += is_loose;
  }
  return {good >= s, loose >= s};
}

// ---------------------------------------------------------------------------

Configuration shrink_slice(const Configuration& cfg, double t) {
  const auto& tol = cfg.tolerances();
  require(t >= 0, ErrorCode::InvalidArgument, "slice height must be nonnegative");
  std::vector<Circle> out;
  out.reserve(cfg.size());
  for (const auto& c : cfg.circles()) {
    require(t < c.radius() - tol.radius, ErrorCode::InvalidArgument, "slice height must stay below every radius");
    out.emplace_back(c.center(), std::sqrt(c.radius() * c.radius() - t * t), c.normal(), tol);
  }
  if (auto problem = configuration_problem(out, tol)) fail(ErrorCode::DisjointnessBroken, *problem);
  return Configuration(std::move(out), tol);
}

Circle reference_circle() { return Circle(Vec3(0.75, 0.75, 0.75), 0.1, Vec3::UnitZ()); }

Configuration similarity(const Configuration& cfg, double scale, const Vec3& shift) {
  require(scale > 0, ErrorCode::InvalidArgument, "similarity scale must be positive");
  std::vector<Circle> out;
  out.reserve(cfg.size());
  for (const auto& c : cfg.circles())
    out.emplace_back(scale * c.center() + shift, scale * c.radius(), c.normal(), cfg.tolerances());
  return Configuration(std::move(out), cfg.tolerances());
}

Configuration stabilize(const Configuration& cfg) {
  std::vector<Circle> out;
  out.reserve(cfg.size() + 1);
  for (const auto& c : cfg.circles()) out.emplace_back(0.5 * c.center(), 0.5 * c.radius(), c.normal(), cfg.tolerances());
  out.push_back(reference_circle());
  return Configuration(std::move(out), cfg.tolerances());
}

// ---------------------------------------------------------------------------
// Generation

namespace {

struct Box {
  Vec3 lo, hi;
  int depth;
};

struct Pose {
  Vec3 center;
  Vec3 normal;
  double radius;
};

Vec3 random_unit(KeyedRng& rng) {
  for (;;) {
    Vec3 v(rng.normal(), rng.normal(), rng.normal());
    const double n = v.norm();
    if (n > 1e-6) return v / n;
  }
}

Vec3 rotate_towards(const Vec3& from, const Vec3& to, double fraction) {
  const double c = std::clamp(from.dot(to), -1.0, 1.0);
  const double angle = std::acos(c);
  if (angle < 1e-12) return to;
  const Vec3 axis = from.cross(to).normalized();
  return Eigen::AngleAxisd(angle * fraction, axis) * from;
}

// Moves circle j continuously through the poses in `legs`. Each substep is
// shorter than half the current clearance, so the curve never crosses
// another curve or the cube boundary; the move is abandoned if the clearance
// drops below `floor`.
bool continuous_motion(std::vector<Circle>& circles, std::size_t j, const std::vector<Pose>& legs, double floor,
                       const Tolerances& tol) {
  Pose current{circles[j].center(), circles[j].normal(), circles[j].radius()};
  auto clearance = [&](const Circle& moving) {
    double best = 1.0;
    for (int e = 0; e < 3; ++e) {
      const double ext = moving.extent(e);
      best = std::min({best, moving.center()[e] - ext, 1.0 - moving.center()[e] - ext});
    }
    for (std::size_t i = 0; i < circles.size(); ++i) {
      if (i == j) continue;
      const double lower =
          (circles[i].center() - moving.center()).norm() - circles[i].radius() - moving.radius();
      if (lower >= best) continue;
      best = std::min(best, curve_distance(circles[i], moving));
    }
    return best;
  };

  for (const Pose& goal : legs) {
    Vec3 goal_normal = goal.normal.dot(current.normal) < 0 ? Vec3(-goal.normal) : goal.normal;
    const double angle = std::acos(std::clamp(current.normal.dot(goal_normal), -1.0, 1.0));
    const double speed = (goal.center - current.center).norm() + std::abs(goal.radius - current.radius) +
                         std::max(goal.radius, current.radius) * angle;
    double tau = 0.0;
    int guard = 0;
    while (tau < 1.0) {
      if (++guard > 4000) return false;
      const Circle here(current.center + tau * (goal.center - current.center),
                        current.radius + tau * (goal.radius - current.radius),
                        rotate_towards(current.normal, goal_normal, tau), tol);
      const double room = clearance(here);
      if (room < floor) return false;
      if (speed <= 0) break;
      tau = std::min(1.0, tau + 0.5 * room / speed);
    }
    current = {goal.center, goal_normal, goal.radius};
    const Circle done(current.center, current.radius, current.normal, tol);
    if (clearance(done) < floor) return false;
  }
  circles[j] = Circle(current.center, current.radius, current.normal, tol);
  return true;
}

}  // namespace

Configuration random_unlinked(std::size_t k, std::uint64_t seed, const GeneratorParams& params) {
  require(k >= 1, ErrorCode::InvalidArgument, "random_unlinked needs k >= 1");
  require(params.radius_min > 0 && params.radius_min <= params.radius_max && params.radius_max < 0.5,
          ErrorCode::InvalidArgument, "radius fractions must satisfy 0 < min <= max < 0.5");
  require(params.center_slack >= 0 && params.center_slack < 1, ErrorCode::InvalidArgument,
          "center_slack must lie in [0, 1)");
  KeyedRng rng(seed, k);
  const Tolerances tol;

  std::vector<Box> boxes{{Vec3::Zero(), Vec3::Ones(), 0}};
  while (boxes.size() < k) {
    double total = 0;
    for (const auto& b : boxes)
      if (b.depth < params.split_depth) total += (b.hi - b.lo).prod();
    if (total <= 0) fail(ErrorCode::GenerationFailed, "split depth too small for k boxes");
    double pick = rng.uniform() * total;
    std::size_t chosen = boxes.size();
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (boxes[i].depth >= params.split_depth) continue;
      chosen = i;
      pick -= (boxes[i].hi - boxes[i].lo).prod();
      if (pick < 0) break;
    }
    Box b = boxes[chosen];
    int axis = 0;
    const Vec3 size = b.hi - b.lo;
    for (int e = 1; e < 3; ++e)
      if (size[e] > size[axis]) axis = e;
    const double cut = b.lo[axis] + rng.uniform(0.35, 0.65) * size[axis];
    Box left = b, right = b;
    left.hi[axis] = cut;
    right.lo[axis] = cut;
    left.depth = right.depth = b.depth + 1;
    boxes[chosen] = left;
    boxes.push_back(right);
  }
  for (std::size_t i = boxes.size(); i > 1; --i) std::swap(boxes[i - 1], boxes[rng.below(i)]);

  std::vector<Circle> circles;
  circles.reserve(k);
  for (const auto& b : boxes) {
    const Vec3 half = 0.5 * (b.hi - b.lo);
    const Vec3 mid = 0.5 * (b.hi + b.lo);
    const double r = rng.uniform(params.radius_min, params.radius_max) * half.minCoeff();
    const Vec3 n = random_unit(rng);
    Vec3 c = mid;
    for (int e = 0; e < 3; ++e) {
      const double ext = r * std::sqrt(std::max(0.0, 1.0 - n[e] * n[e]));
      c[e] += rng.uniform(-1.0, 1.0) * params.center_slack * (half[e] - ext);
    }
    circles.emplace_back(c, r, n, tol);
  }

  for (int move = 0; move < params.jitter_moves && k >= 1; ++move) {
    const bool thread = k >= 2 && rng.uniform() < 0.6;
    if (thread) {
      std::size_t i = rng.below(k), j = rng.below(k - 1);
      if (j >= i) ++j;
      if (circles[i].radius() < circles[j].radius()) std::swap(i, j);
      const Circle& big = circles[i];
      const double r_new = std::min(circles[j].radius(), params.thread_ratio * big.radius() * rng.uniform(0.5, 1.0));
      if (r_new <= 10 * tol.radius) continue;
      const double phi = rng.uniform(0.0, kTwoPi);
      const Vec3 n_new = std::cos(phi) * big.u() + std::sin(phi) * big.v();
      const double psi = rng.uniform(0.0, kTwoPi);
      const double w_len = rng.uniform(0.0, 0.5) * (big.radius() - r_new);
      const Vec3 w = w_len * (std::cos(psi) * big.u() + std::sin(psi) * big.v());
      const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
      const double delta = side * rng.uniform(0.2, 0.7) * r_new;
      const Vec3 staging = big.center() + side * big.radius() * big.normal();
      const Vec3 final_center = big.center() + w + delta * big.normal();
      std::vector<Pose> legs{{staging, n_new, r_new}, {final_center, n_new, r_new}};
      continuous_motion(circles, j, legs, std::max(1e-6, 0.02 * r_new), tol);
    } else {
      const std::size_t j = rng.below(k);
      const Circle& c = circles[j];
      const Vec3 shift = params.jitter * c.radius() * rng.uniform() * random_unit(rng);
      const Vec3 axis = random_unit(rng);
      const Vec3 n_new = Eigen::AngleAxisd(params.jitter * rng.uniform(), axis) * c.normal();
      std::vector<Pose> legs{{c.center() + shift, n_new, c.radius()}};
      continuous_motion(circles, j, legs, std::max(1e-6, 0.02 * c.radius()), tol);
    }
  }

  if (auto problem = configuration_problem(circles, tol)) fail(ErrorCode::GenerationFailed, *problem);
  return Configuration(std::move(circles), tol);
}

}  // namespace circlestab
