#include "circlestab/arcs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>

#include "circlestab/error.hpp"

namespace circlestab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Box3 {
  Vec3 lo, hi;
};

Box3 segment_box(const Vec3& a, const Vec3& b) { return {a.cwiseMin(b), a.cwiseMax(b)}; }

double box_gap(const Box3& x, const Box3& y) {
  return (x.lo - y.hi).cwiseMax(y.lo - x.hi).cwiseMax(0.0).norm();
}

// A polyline with cached segment boxes, for pruned distance queries.
struct Segments {
  const std::vector<Vec3>* pts;
  std::vector<Box3> boxes;
  Box3 all;

  explicit Segments(const std::vector<Vec3>& p) : pts(&p) {
    all = {Vec3::Constant(kInf), Vec3::Constant(-kInf)};
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      boxes.push_back(segment_box(p[i], p[i + 1]));
      all.lo = all.lo.cwiseMin(boxes.back().lo);
      all.hi = all.hi.cwiseMax(boxes.back().hi);
    }
  }
  std::size_t size() const { return boxes.size(); }
  const Vec3& a(std::size_t i) const { return (*pts)[i]; }
  const Vec3& b(std::size_t i) const { return (*pts)[i + 1]; }
};

SegmentPair polyline_polyline(const Segments& x, const Segments& y) {
  SegmentPair best{kInf, Vec3::Zero(), Vec3::Zero()};
  if (x.size() == 0 || y.size() == 0) return best;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (box_gap(x.boxes[i], y.all) >= best.distance) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (box_gap(x.boxes[i], y.boxes[j]) >= best.distance) continue;
      auto d = segment_segment(x.a(i), x.b(i), y.a(j), y.b(j));
      if (d.distance < best.distance) best = d;
    }
  }
  return best;
}

// Segments [first, last) only.
SegmentPair polyline_circle(const Segments& x, const Circle& c, std::size_t first = 0,
                            std::size_t last = std::numeric_limits<std::size_t>::max()) {
  SegmentPair best{kInf, Vec3::Zero(), Vec3::Zero()};
  last = std::min(last, x.size());
  for (std::size_t i = first; i < last; ++i) {
    auto d = segment_circle(x.a(i), x.b(i), c, best.distance);
    if (d.distance < best.distance) best = d;
  }
  return best;
}

SegmentPair polyline_disk(const Segments& x, const Circle& c, std::size_t first = 0,
                          std::size_t last = std::numeric_limits<std::size_t>::max()) {
  SegmentPair best{kInf, Vec3::Zero(), Vec3::Zero()};
  last = std::min(last, x.size());
  const Box3 disk{c.center() - Vec3::Constant(c.radius()), c.center() + Vec3::Constant(c.radius())};
  for (std::size_t i = first; i < last; ++i) {
    if (box_gap(x.boxes[i], disk) >= best.distance) continue;
    auto d = segment_disk(x.a(i), x.b(i), c);
    if (d.distance < best.distance) best = d;
  }
  return best;
}

SegmentPair nonadjacent(const Segments& x) {
  SegmentPair best{kInf, Vec3::Zero(), Vec3::Zero()};
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 2; j < x.size(); ++j) {
      if (box_gap(x.boxes[i], x.boxes[j]) >= best.distance) continue;
      auto d = segment_segment(x.a(i), x.b(i), x.a(j), x.b(j));
      if (d.distance < best.distance) best = d;
    }
  return best;
}

std::string vec_string(const Vec3& v) {
  std::ostringstream os;
  os.precision(9);
  os << '(' << v.x() << ", " << v.y() << ", " << v.z() << ')';
  return os.str();
}

double max_turn(const std::vector<Vec3>& p) {
  double worst = 0;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const Vec3 a = p[i] - p[i - 1], b = p[i + 1] - p[i];
    if (a.norm() == 0 || b.norm() == 0) continue;
    worst = std::max(worst, std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0)));
  }
  return worst;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Arc

std::vector<double> Arc::cumulative() const {
  std::vector<double> s(polyline.size(), 0.0);
  for (std::size_t i = 1; i < polyline.size(); ++i) s[i] = s[i - 1] + (polyline[i] - polyline[i - 1]).norm();
  return s;
}

double Arc::length() const { return polyline.empty() ? 0.0 : cumulative().back(); }

Vec3 Arc::point_at(double s) const {
  require(!polyline.empty(), ErrorCode::InvalidArgument, "empty polyline");
  const auto cum = cumulative();
  if (s <= 0) return polyline.front();
  for (std::size_t i = 1; i < polyline.size(); ++i)
    if (s <= cum[i]) {
      const double len = cum[i] - cum[i - 1];
      const double f = len > 0 ? (s - cum[i - 1]) / len : 0.0;
      return polyline[i - 1] + f * (polyline[i] - polyline[i - 1]);
    }
  return polyline.back();
}

Vec3 Arc::tangent_at(double s) const {
  require(polyline.size() >= 2, ErrorCode::InvalidArgument, "polyline needs two points");
  const auto cum = cumulative();
  std::size_t i = 1;
  while (i + 1 < polyline.size() && s > cum[i]) ++i;
  return (polyline[i] - polyline[i - 1]).normalized();
}

std::vector<Vec3> Arc::truncated(double s, double snap) const {
  require(polyline.size() >= 2, ErrorCode::InvalidArgument, "polyline needs two points");
  const auto cum = cumulative();
  s = std::clamp(s, 0.0, cum.back());
  std::vector<Vec3> out{polyline.front()};
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    if (s <= cum[i] + snap) {
      if (s >= cum[i] - snap) {
        out.push_back(polyline[i]);
      } else if (s - cum[i - 1] > snap) {
        const double f = (s - cum[i - 1]) / (cum[i] - cum[i - 1]);
        out.push_back(polyline[i - 1] + f * (polyline[i] - polyline[i - 1]));
      }
      break;
    }
    out.push_back(polyline[i]);
  }
  if (out.size() < 2) out.push_back(polyline[1]);
  return out;
}

Arc make_arc(double t, double eta, std::size_t target, std::vector<Vec3> polyline) {
  Arc arc;
  arc.t = t;
  arc.eta = eta;
  arc.target = target;
  arc.polyline = std::move(polyline);
  arc.lambda = arc.length();
  return arc;
}

// ---------------------------------------------------------------------------
// Validation

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Parameters: return "parameters";
    case ViolationKind::Start: return "start";
    case ViolationKind::StandardSegment: return "standard-segment";
    case ViolationKind::Endpoint: return "endpoint";
    case ViolationKind::EndpointDirection: return "endpoint-direction";
    case ViolationKind::OutsideCube: return "outside-cube";
    case ViolationKind::HitsCircle: return "hits-circle";
    case ViolationKind::HitsOwnDisk: return "hits-own-disk";
    case ViolationKind::NotSimple: return "not-simple";
    case ViolationKind::BadTarget: return "bad-target";
    case ViolationKind::TargetNotGood: return "target-not-good";
    case ViolationKind::Ordering: return "ordering";
    case ViolationKind::RepeatedTarget: return "repeated-target";
    case ViolationKind::HitsArc: return "hits-arc";
    case ViolationKind::HitsDisk: return "hits-disk";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += "arc " + std::to_string(v.arc) + ": " + to_string(v.kind) + " (" + v.message + ")";
  }
  return out;
}

ValidationReport validate_arc(const Configuration& cfg, const Arc& arc, const ArcTolerances& tol) {
  ValidationReport rep;
  auto add = [&](ViolationKind kind, std::string msg, double dist = 0, Vec3 w = Vec3::Zero(),
                 Vec3 w2 = Vec3::Zero(), std::optional<std::size_t> other = std::nullopt) {
    rep.violations.push_back({kind, 0, other, dist, w, w2, std::move(msg)});
  };
  const auto& P = arc.polyline;
  if (P.size() < 2) {
    add(ViolationKind::Parameters, "polyline needs at least two points");
    return rep;
  }
  if (!(arc.t > 0 && arc.t < 1)) add(ViolationKind::Parameters, "t outside (0, 1)");
  const auto cum = arc.cumulative();
  const double len = cum.back();
  if (std::abs(arc.lambda - len) > tol.arc) add(ViolationKind::Parameters, "lambda differs from the polyline length");
  if (!(arc.eta > 0 && arc.eta <= arc.lambda + tol.arc)) add(ViolationKind::Parameters, "eta outside (0, lambda]");
  if (arc.target >= cfg.size()) {
    add(ViolationKind::BadTarget, "target index out of range");
    return rep;
  }
  const Circle& own = cfg[arc.target];

  const Vec3 entry(arc.t, arc.t, tol.arc);
  if ((P[0] - entry).norm() > tol.arc)
    add(ViolationKind::Start, "first point " + vec_string(P[0]) + " is not the entry point", (P[0] - entry).norm(), P[0],
        entry);

  const double z0 = P[0].z();
  auto off_standard = [&](const Vec3& p, double s) {
    return std::max({std::abs(p.x() - arc.t), std::abs(p.y() - arc.t), std::abs(p.z() - (z0 + s))});
  };
  for (std::size_t i = 0; i < P.size() && cum[i] <= arc.eta; ++i)
    if (off_standard(P[i], cum[i]) > tol.arc) {
      add(ViolationKind::StandardSegment, "vertex leaves the vertical entry segment", off_standard(P[i], cum[i]), P[i]);
      break;
    }
  if (arc.eta <= len && off_standard(arc.point_at(arc.eta), arc.eta) > tol.arc)
    add(ViolationKind::StandardSegment, "point at eta leaves the vertical entry segment", 0, arc.point_at(arc.eta));

  const double end_gap = (P.back() - own.center()).norm();
  if (end_gap > tol.arc)
    add(ViolationKind::Endpoint, "last point misses the target center", end_gap, P.back(), own.center());
  const Vec3 last_dir = (P.back() - P[P.size() - 2]).normalized();
  const double angle = std::acos(std::clamp(std::abs(last_dir.dot(own.normal())), 0.0, 1.0));
  if (!(angle <= tol.angle))
    add(ViolationKind::EndpointDirection, "final segment is " + std::to_string(angle) + " rad off the target normal",
        angle, P.back());

  for (const auto& p : P)
    if (!((p.array() > 0.0).all() && (p.array() < 1.0).all())) {
      add(ViolationKind::OutsideCube, "vertex " + vec_string(p) + " outside the open cube", 0, p);
      break;
    }

  const Segments segs(P);
  for (std::size_t c = 0; c < cfg.size(); ++c) {
    const auto d = polyline_circle(segs, cfg[c]);
    if (!(d.distance > tol.arc))
      add(ViolationKind::HitsCircle, "arc touches circle " + std::to_string(c), d.distance, d.on_first, d.on_second, c);
  }

  const auto own_disk = polyline_disk(segs, own, 0, segs.size() - 1);
  const double tail = point_disk_distance(P[P.size() - 2], own);
  if (!(own_disk.distance > tol.arc) || !(tail > tol.arc)) {
    const bool body = own_disk.distance <= tail;
    add(ViolationKind::HitsOwnDisk, "arc meets its target disk before the endpoint",
        body ? own_disk.distance : tail, body ? own_disk.on_first : P[P.size() - 2],
        body ? own_disk.on_second : own.center());
  }

  const auto self = nonadjacent(segs);
  if (!(self.distance > tol.arc))
    add(ViolationKind::NotSimple, "non-adjacent segments come too close", self.distance, self.on_first,
        self.on_second);
  return rep;
}

ValidationReport validate_simplex(const Configuration& cfg, const ArcSimplex& simplex, const ArcTolerances& tol) {
  ValidationReport rep;
  const auto& arcs = simplex.arcs;
  if (arcs.empty()) {
    rep.violations.push_back({ViolationKind::Parameters, 0, std::nullopt, 0, Vec3::Zero(), Vec3::Zero(),
                              "a simplex needs at least one arc"});
    return rep;
  }
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    auto sub = validate_arc(cfg, arcs[i], tol);
    for (auto& v : sub.violations) {
      v.arc = i;
      rep.violations.push_back(std::move(v));
    }
  }
  auto add = [&](ViolationKind kind, std::size_t i, std::optional<std::size_t> j, std::string msg, double d = 0,
                 Vec3 w = Vec3::Zero(), Vec3 w2 = Vec3::Zero()) {
    rep.violations.push_back({kind, i, j, d, w, w2, std::move(msg)});
  };

  for (std::size_t i = 0; i + 1 < arcs.size(); ++i)
    if (!(arcs[i].t < arcs[i + 1].t)) add(ViolationKind::Ordering, i, i + 1, "entry parameters not increasing");

  const auto good = good_circles(cfg);
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const auto target = arcs[i].target;
    if (target >= cfg.size()) continue;
    if (!seen.insert(target).second)
      add(ViolationKind::RepeatedTarget, i, std::nullopt, "circle " + std::to_string(target) + " targeted twice");
    if (!std::binary_search(good.begin(), good.end(), target))
      add(ViolationKind::TargetNotGood, i, std::nullopt, "circle " + std::to_string(target) + " is not good");
  }

  std::vector<Segments> segs;
  segs.reserve(arcs.size());
  for (const auto& a : arcs) segs.emplace_back(a.polyline);
  for (std::size_t i = 0; i < arcs.size(); ++i)
    for (std::size_t j = 0; j < arcs.size(); ++j) {
      if (i == j) continue;
      if (j > i) {
        const auto d = polyline_polyline(segs[i], segs[j]);
        if (!(d.distance > tol.arc))
          add(ViolationKind::HitsArc, i, j, "arcs come too close", d.distance, d.on_first, d.on_second);
      }
      if (arcs[j].target >= cfg.size() || arcs[j].target == arcs[i].target) continue;
      const auto d = polyline_disk(segs[i], cfg[arcs[j].target]);
      if (!(d.distance > tol.arc))
        add(ViolationKind::HitsDisk, i, j, "arc meets the disk of circle " + std::to_string(arcs[j].target),
            d.distance, d.on_first, d.on_second);
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Routing

namespace {

class RouteSpace {
 public:
  RouteSpace(const Configuration& cfg, const ArcSimplex& existing, std::size_t own, const ArcTolerances& tol)
      : cfg_(cfg), own_(own), tol_(tol) {
    for (const auto& a : existing.arcs) {
      disks_.push_back(a.target);
      arcs_.push_back(&a.polyline);
    }
    disks_.push_back(own);
    for (const auto* p : arcs_) segs_.emplace_back(*p);
  }

  double clearance(const Vec3& p) const {
    double best = std::min({p.x(), 1 - p.x(), p.y(), 1 - p.y(), p.z(), 1 - p.z()});
    for (const auto& c : cfg_.circles()) best = std::min(best, point_circle_distance(p, c));
    for (auto d : disks_) best = std::min(best, point_disk_distance(p, cfg_[d]));
    for (const auto& s : segs_)
      for (std::size_t i = 0; i < s.size(); ++i) best = std::min(best, point_segment_distance(p, s.a(i), s.b(i)));
    return best;
  }

  enum class Kind { Body, Entry, Approach };

  bool segment_clear(const Vec3& a, const Vec3& b, double need, Kind kind = Kind::Body) const {
    for (const Vec3* p : {&a, &b}) {
      for (int e = 0; e < 2; ++e)
        if ((*p)[e] < need || (*p)[e] > 1 - need) return false;
      if ((*p).z() > 1 - need) return false;
      if (kind != Kind::Entry && (*p).z() < need) return false;
    }
    for (std::size_t c = 0; c < cfg_.size(); ++c) {
      const double limit = (kind == Kind::Approach && c == own_) ? 2 * tol_.arc : need;
      if (!(segment_circle(a, b, cfg_[c], limit).distance > limit)) return false;
    }
    for (auto d : disks_) {
      if (kind == Kind::Approach && d == own_) continue;
      if (!(segment_disk(a, b, cfg_[d]).distance > need)) return false;
    }
    const Box3 box = segment_box(a, b);
    for (const auto& s : segs_) {
      if (box_gap(box, s.all) > need) continue;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (box_gap(box, s.boxes[i]) > need) continue;
        if (!(segment_segment(a, b, s.a(i), s.b(i)).distance > need)) return false;
      }
    }
    return true;
  }

 private:
  const Configuration& cfg_;
  std::size_t own_;
  ArcTolerances tol_;
  std::vector<std::size_t> disks_;
  std::vector<const std::vector<Vec3>*> arcs_;
  std::vector<Segments> segs_;
};

class VoxelGrid {
 public:
  VoxelGrid(const RouteSpace& space, int n, double inflate) : n_(n), h_(1.0 / n), blocked_(std::size_t(n) * n * n) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) blocked_[index(i, j, l)] = space.clearance(center(i, j, l)) < inflate;
  }

  int n() const { return n_; }
  std::size_t index(int i, int j, int l) const { return (std::size_t(i) * n_ + j) * n_ + l; }
  Vec3 center(int i, int j, int l) const { return Vec3((i + 0.5) * h_, (j + 0.5) * h_, (l + 0.5) * h_); }
  Vec3 center(std::size_t idx) const {
    return center(int(idx / (std::size_t(n_) * n_)), int((idx / n_) % n_), int(idx % n_));
  }
  bool free(std::size_t idx) const { return !blocked_[idx]; }

  /// Free cells near p reachable by a clear straight segment, nearest first.
  std::optional<std::size_t> connect(const Vec3& p, const RouteSpace& space, double need, int reach) const {
    const int ci = std::clamp(int(p.x() / h_), 0, n_ - 1), cj = std::clamp(int(p.y() / h_), 0, n_ - 1),
              cl = std::clamp(int(p.z() / h_), 0, n_ - 1);
    std::vector<std::pair<double, std::size_t>> candidates;
    for (int i = std::max(0, ci - reach); i <= std::min(n_ - 1, ci + reach); ++i)
      for (int j = std::max(0, cj - reach); j <= std::min(n_ - 1, cj + reach); ++j)
        for (int l = std::max(0, cl - reach); l <= std::min(n_ - 1, cl + reach); ++l) {
          const auto idx = index(i, j, l);
          if (free(idx)) candidates.emplace_back((center(i, j, l) - p).norm(), idx);
        }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& [d, idx] : candidates)
      if (space.segment_clear(p, center(idx), need)) return idx;
    return std::nullopt;
  }

  std::optional<std::vector<std::size_t>> shortest_path(std::size_t from, std::size_t to) const {
    const std::size_t total = blocked_.size();
    std::vector<double> dist(total, kInf);
    std::vector<std::size_t> parent(total, total);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    const Vec3 goal = center(to);
    auto heuristic = [&](std::size_t idx) { return (center(idx) - goal).norm(); };
    dist[from] = 0;
    open.emplace(heuristic(from), from);
    while (!open.empty()) {
      const auto [f, cur] = open.top();
      open.pop();
      if (cur == to) break;
      if (f - heuristic(cur) > dist[cur] + 1e-12) continue;
      const int ci = int(cur / (std::size_t(n_) * n_)), cj = int((cur / n_) % n_), cl = int(cur % n_);
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj)
          for (int dl = -1; dl <= 1; ++dl) {
            if (!di && !dj && !dl) continue;
            const int i = ci + di, j = cj + dj, l = cl + dl;
            if (i < 0 || j < 0 || l < 0 || i >= n_ || j >= n_ || l >= n_) continue;
            const auto nb = index(i, j, l);
            if (!free(nb)) continue;
            const double nd = dist[cur] + h_ * std::sqrt(double(di * di + dj * dj + dl * dl));
            if (nd < dist[nb]) {
              dist[nb] = nd;
              parent[nb] = cur;
              open.emplace(nd + heuristic(nb), nb);
            }
          }
    }
    if (dist[to] == kInf) return std::nullopt;
    std::vector<std::size_t> path;
    for (std::size_t cur = to; cur != total; cur = parent[cur]) path.push_back(cur);
    std::reverse(path.begin(), path.end());
    return path;
  }

 private:
  int n_;
  double h_;
  std::vector<std::uint8_t> blocked_;
};

// Corner cutting with both endpoints fixed.
std::vector<Vec3> chaikin(const std::vector<Vec3>& p) {
  std::vector<Vec3> out{p.front()};
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (i > 0) out.push_back(0.75 * p[i] + 0.25 * p[i + 1]);
    if (i + 2 < p.size()) out.push_back(0.25 * p[i] + 0.75 * p[i + 1]);
  }
  out.push_back(p.back());
  return out;
}

std::vector<Vec3> subdivide(const std::vector<Vec3>& p, std::size_t min_segments) {
  double total = 0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) total += (p[i + 1] - p[i]).norm();
  const double piece = total / double(min_segments);
  std::vector<Vec3> out{p.front()};
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double len = (p[i + 1] - p[i]).norm();
    const int m = std::max(1, int(std::ceil(len / piece - 1e-9)));
    for (int s = 1; s < m; ++s) out.push_back(p[i] + (double(s) / m) * (p[i + 1] - p[i]));
    out.push_back(p[i + 1]);
  }
  return out;
}

constexpr double kMaxTurn = std::numbers::pi / 3;

}  // namespace

Arc route_arc(const Configuration& cfg, const ArcSimplex& existing, std::size_t target, const RouteOptions& options,
              const ArcTolerances& tol) {
  require(target < cfg.size(), ErrorCode::InvalidArgument, "target index out of range");
  const auto good = good_circles(cfg);
  require(std::binary_search(good.begin(), good.end(), target), ErrorCode::InvalidArgument,
          "target circle " + std::to_string(target) + " is not good");
  double t_lo = 0;
  for (const auto& a : existing.arcs) {
    require(a.target != target, ErrorCode::InvalidArgument,
            "circle " + std::to_string(target) + " already carries an arc");
    t_lo = std::max(t_lo, a.t);
  }
  require(options.resolution > 0 && options.resolution <= 0.5, ErrorCode::InvalidArgument,
          "resolution must lie in (0, 0.5]");
  if (options.t)
    require(*options.t > t_lo && *options.t < 1, ErrorCode::InvalidArgument,
            "entry parameter must exceed existing ones and stay below 1");

  const int n = std::max(4, int(std::ceil(1.0 / options.resolution - 1e-9)));
  const double h = 1.0 / n;
  const double clear = std::max(4 * tol.arc, 0.25 * h);
  const double inflate = clear + 0.5 * std::sqrt(3.0) * h;
  const RouteSpace space(cfg, existing, target, tol);
  const VoxelGrid grid(space, n, inflate);
  const Circle& own = cfg[target];

  std::vector<double> ts;
  if (options.t) {
    ts.push_back(*options.t);
  } else {
    for (double f : {options.t_fraction, 0.5, 0.3, 0.7, 0.2, 0.8, 0.4, 0.6, 0.1, 0.9})
      if (f > 0 && f < 1) ts.push_back(t_lo + f * (1 - t_lo));
  }

  std::string last_reason = "no candidate entry point";
  for (double t : ts) {
    if (t - t_lo < 2 * clear || t < inflate || 1 - t < inflate) {
      last_reason = "entry parameter too close to a neighbour or the cube edge";
      continue;
    }
    const Vec3 s0(t, t, tol.arc);
    const Vec3 s1(t, t, tol.arc + 2 * inflate);
    if (!space.segment_clear(s0, s1, clear, RouteSpace::Kind::Entry)) {
      last_reason = "entry segment blocked";
      continue;
    }
    const auto start = grid.connect(s1, space, clear, 3);
    if (!start) {
      last_reason = "entry point cannot reach the grid";
      continue;
    }
    for (double side : {1.0, -1.0}) {
      for (double reach : {2.5, 4.0, 1.5, 6.0}) {
        const Vec3 q = own.center() + side * reach * inflate * own.normal();
        if (!space.segment_clear(q, own.center(), clear, RouteSpace::Kind::Approach)) {
          last_reason = "approach segment blocked";
          continue;
        }
        const auto goal = grid.connect(q, space, clear, 3);
        if (!goal) {
          last_reason = "approach point cannot reach the grid";
          continue;
        }
        const auto cells = grid.shortest_path(*start, *goal);
        if (!cells) {
          last_reason = "grid search found no path";
          continue;
        }

        std::vector<Vec3> middle{s1};
        for (auto c : *cells) middle.push_back(grid.center(c));
        middle.push_back(q);
        std::vector<Vec3> path{s0, s1};
        for (std::size_t i = 0; i + 1 < middle.size();) {
          std::size_t j = middle.size() - 1;
          while (j > i + 1 && !space.segment_clear(middle[i], middle[j], clear)) --j;
          path.push_back(middle[j]);
          i = j;
        }
        path.push_back(own.center());

        for (int round = 0; round < 5 && max_turn(path) > std::numbers::pi / 9; ++round) {
          auto smooth = chaikin(path);
          bool ok = true;
          for (std::size_t i = 1; ok && i + 2 < smooth.size(); ++i) ok = space.segment_clear(smooth[i], smooth[i + 1], clear);
          if (!ok) break;
          path = std::move(smooth);
        }
        if (max_turn(path) > kMaxTurn) {
          last_reason = "path bends too sharply";
          continue;
        }
        const double eta = (path[1] - path[0]).norm();
        Arc arc = make_arc(t, eta, target, subdivide(path, options.min_segments));
        ArcSimplex with = existing;
        with.arcs.push_back(arc);
        const auto report = validate_simplex(cfg, with, tol);
        if (!report.ok()) {
          last_reason = report.summary();
          continue;
        }
        return arc;
      }
    }
  }
  std::ostringstream os;
  os << "no route to circle " << target << " at resolution " << h << ": " << last_reason;
  fail(ErrorCode::NoRouteFound, os.str());
}

ArcSimplex resolve(const Configuration& cfg, const std::vector<std::size_t>& targets, const RouteOptions& options,
                   const ArcTolerances& tol) {
  ArcSimplex simplex;
  for (std::size_t idx = 0; idx < targets.size(); ++idx) {
    RouteOptions opt = options;
    opt.t.reset();
    opt.t_fraction = 1.0 / double(targets.size() - idx + 1);
    std::optional<Arc> arc;
    std::string reason;
    for (int refine = 0; refine < 3 && !arc; ++refine) {
      try {
        arc = route_arc(cfg, simplex, targets[idx], opt, tol);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoRouteFound) throw;
        reason = e.what();
        opt.resolution *= 0.5;
      }
    }
    if (!arc) fail(ErrorCode::NoRouteFound, reason);
    simplex.arcs.push_back(std::move(*arc));
  }
  return simplex;
}

std::vector<std::size_t> word_projection(const ArcSimplex& simplex) {
  std::vector<std::size_t> word;
  word.reserve(simplex.arcs.size());
  for (const auto& a : simplex.arcs) word.push_back(a.target);
  return word;
}

ArcSimplex face(const ArcSimplex& simplex, std::size_t i) {
  require(i < simplex.arcs.size() && simplex.arcs.size() >= 2, ErrorCode::InvalidArgument, "face index out of range");
  ArcSimplex out = simplex;
  out.arcs.erase(out.arcs.begin() + static_cast<std::ptrdiff_t>(i));
  return out;
}

// ---------------------------------------------------------------------------
// Retraction

RetractState retract_bounds(const Configuration& cfg, const ArcSimplex& simplex, std::size_t index,
                            const ArcTolerances& tol) {
  const auto& arcs = simplex.arcs;
  require(index < arcs.size(), ErrorCode::InvalidArgument, "arc index out of range");
  const Arc& arc = arcs[index];
  const Segments segs(arc.polyline);

  std::vector<bool> carries(cfg.size(), false);
  for (const auto& a : arcs) carries.at(a.target) = true;

  RetractState st;
  st.circle = arc.target;
  auto& terms = st.terms;
  terms.radius = cfg[arc.target].radius();
  terms.gap_next = (index + 1 < arcs.size() ? arcs[index + 1].t : 1.0) - arc.t;
  terms.gap_prev = arc.t - (index > 0 ? arcs[index - 1].t : 0.0);

  terms.arcs_and_disks = kInf;
  for (std::size_t j = 0; j < arcs.size(); ++j) {
    if (j == index) continue;
    const Segments other(arcs[j].polyline);
    terms.arcs_and_disks = std::min(terms.arcs_and_disks, polyline_polyline(segs, other).distance);
    terms.arcs_and_disks = std::min(terms.arcs_and_disks, polyline_disk(segs, cfg[arcs[j].target]).distance);
  }
  terms.circles = kInf;
  st.Z = 1.0;
  for (std::size_t c = 0; c < cfg.size(); ++c) {
    if (carries[c]) continue;
    terms.circles = std::min(terms.circles, polyline_circle(segs, cfg[c]).distance);
    st.Z = std::min(st.Z, cfg[c].center().z() - cfg[c].extent(2));
  }
  st.upsilon = 0.5 * nonadjacent(segs).distance;
  terms.tube = st.upsilon;

  const auto cum = arc.cumulative();
  terms.walls = kInf;
  for (std::size_t i = 0; i < arc.polyline.size(); ++i) {
    const Vec3& p = arc.polyline[i];
    terms.walls = std::min({terms.walls, p.x(), 1 - p.x(), p.y(), 1 - p.y(), 1 - p.z()});
    if (cum[i] >= arc.eta - tol.arc) terms.walls = std::min(terms.walls, p.z());
  }

  st.r_tilde = 0.5 * std::min({terms.radius, terms.gap_next, terms.gap_prev, terms.arcs_and_disks, terms.circles,
                               terms.tube, terms.walls});
  const double z0 = arc.polyline.front().z();
  st.stop = std::min(arc.eta, st.Z - z0 - std::max(1e-9, 1e-3 * tol.arc));
  return st;
}

RetractResult retract(const Configuration& cfg, const ArcSimplex& simplex, std::size_t steps,
                      const ArcTolerances& tol) {
  require(steps >= 2, ErrorCode::InvalidArgument, "retract needs at least two steps");
  {
    const auto report = validate_simplex(cfg, simplex, tol);
    require(report.ok(), ErrorCode::ValidationFailed, "input simplex invalid: " + report.summary());
  }
  const Tolerances& gtol = cfg.tolerances();
  std::vector<Circle> circles = cfg.circles();
  ArcSimplex current = simplex;
  RetractResult result;

  auto check = [&](const char* phase, std::size_t circle, double t) {
    ++result.validations;
    if (auto problem = configuration_problem(circles, gtol)) {
      std::ostringstream os;
      os << phase << " of circle " << circle << " at t = " << t << ": " << *problem;
      fail(ErrorCode::ValidationFailed, os.str());
    }
    const Configuration now(circles, gtol);
    const auto report = validate_simplex(now, current, tol);
    if (!report.ok()) {
      std::ostringstream os;
      os << phase << " of circle " << circle << " at t = " << t << ": " << report.summary();
      fail(ErrorCode::ValidationFailed, os.str());
    }
  };
  auto record = [&](RetractState& st, std::size_t step, double t, const Circle& c, const Arc& a) {
    RetractSample s{st.circle, step, t, c.radius(), c.center(), c.normal(), a.lambda, a.eta};
    st.course.push_back(s);
    result.trace.push_back(s);
  };

  for (std::size_t m = 0; m < current.arcs.size(); ++m) {
    const Configuration before(circles, gtol);
    RetractState st = retract_bounds(before, current, m, tol);
    if (!(st.upsilon > tol.arc)) {
      std::ostringstream os;
      os << "tube estimate " << st.upsilon << " for the arc to circle " << st.circle << " is degenerate";
      fail(ErrorCode::DegenerateTube, os.str());
    }
    if (!(st.stop > tol.arc)) {
      std::ostringstream os;
      os << "no room below the remaining circles for circle " << st.circle << " (Z = " << st.Z << ")";
      fail(ErrorCode::ValidationFailed, os.str());
    }
    const std::size_t ci = st.circle;
    const Circle c0 = circles[ci];
    const Arc a0 = current.arcs[m];
    const double r0 = c0.radius();
    const double lambda0 = a0.lambda, eta0 = a0.eta;

    for (std::size_t k = 0; k <= steps; ++k) {
      const double t = 2.0 * double(k) / double(steps);
      if (t <= 1.0) {
        circles[ci] = Circle(c0.center(), (1 - t) * r0 + t * st.r_tilde, c0.normal(), gtol);
        current.arcs[m] = a0;
      } else {
        const double ell = (2 - t) * lambda0 + (t - 1) * st.stop;
        Arc a = a0;
        a.polyline = a0.truncated(ell, 2 * tol.arc);
        a.lambda = a.length();
        a.eta = std::min(eta0, a.lambda);
        const Vec3 center = a.polyline.back();
        const Vec3 normal = (a.polyline.back() - a.polyline[a.polyline.size() - 2]).normalized();
        circles[ci] = Circle(center, std::min(st.r_tilde, center.z()), normal, gtol);
        current.arcs[m] = std::move(a);
      }
      record(st, k, t, circles[ci], current.arcs[m]);
      if (k > 0) check("retraction", ci, t);
    }
    result.states.push_back(std::move(st));
  }

  // Remaining circles: scale about the far corner into (corner, 1)^3.
  std::vector<bool> carries(circles.size(), false);
  double corner = 0;
  for (const auto& a : current.arcs) {
    carries[a.target] = true;
    const Circle& c = circles[a.target];
    for (int e = 0; e < 3; ++e) corner = std::max(corner, c.center()[e] + c.extent(e));
    for (const auto& p : a.polyline) corner = std::max(corner, p.maxCoeff());
  }
  corner += std::max(tol.arc, 1e-9);
  require(corner < 1, ErrorCode::ValidationFailed, "processed circles fill the cube");
  result.corner = corner;

  double scale = 1.0;
  for (std::size_t c = 0; c < circles.size(); ++c) {
    if (carries[c]) continue;
    for (int e = 0; e < 3; ++e) {
      const double low = circles[c].center()[e] - circles[c].extent(e);
      if (low <= corner) scale = std::min(scale, 0.999 * (1 - corner) / (1 - low));
    }
  }
  result.remaining_scale = scale;
  if (scale < 1) {
    const std::vector<Circle> start = circles;
    const Vec3 ones = Vec3::Ones();
    for (std::size_t k = 1; k <= steps; ++k) {
      const double mu = 1 + (double(k) / double(steps)) * (scale - 1);
      for (std::size_t c = 0; c < circles.size(); ++c) {
        if (carries[c]) continue;
        circles[c] = Circle(ones + mu * (start[c].center() - ones), mu * start[c].radius(), start[c].normal(), gtol);
      }
      check("corner scaling", circles.size(), double(k) / double(steps));
    }
  }

  result.final_config = Configuration(circles, gtol);
  result.final_simplex = current;
  return result;
}

std::string retract_csv(const std::vector<RetractSample>& trace) {
  std::string out = "step,circle,t,radius,cx,cy,cz,lambda,eta\n";
  for (const auto& s : trace)
    out += std::to_string(s.step) + ',' + std::to_string(s.circle) + ',' + fmt17(s.t) + ',' + fmt17(s.radius) + ',' +
           fmt17(s.center.x()) + ',' + fmt17(s.center.y()) + ',' + fmt17(s.center.z()) + ',' + fmt17(s.lambda) +
           ',' + fmt17(s.eta) + '\n';
  return out;
}

}  // namespace circlestab
