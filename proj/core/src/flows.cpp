#include "circlestab/flows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "circlestab/error.hpp"

namespace circlestab {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Vec3 phi(double t, const Vec3& x) {
  require(t >= 0, ErrorCode::InvalidArgument, "phi needs t >= 0");
  if (x.norm() <= 1.0) return x / (1.0 + t);
  return x;
}

Circle phi_circle(double a, const Vec3& c, double t, const Circle& circle, double shell_eps) {
  require(t >= 0 && a > 0, ErrorCode::InvalidArgument, "phi_circle needs t >= 0 and a > 0");
  if (t == 0) return circle;
  const auto [lo, hi] = point_circle_range(c, circle);
  if (hi < a - shell_eps) {
    const double f = 1.0 / (1.0 + t);
    Tolerances loose;
    loose.radius = 0.0;
    return Circle(c + f * (circle.center() - c), f * circle.radius(), circle.normal(), loose);
  }
  if (lo > a + shell_eps) return circle;
  std::ostringstream os;
  os << "circle at distance [" << lo << ", " << hi << "] crosses shell of radius " << a;
  fail(ErrorCode::ShellCrossed, os.str());
}

std::string datum_problem(const Configuration& cfg, const DisjunctionDatum& datum) {
  if (datum.shells.size() != cfg.size()) return "datum has the wrong number of shells";
  const double eps = cfg.tolerances().shell;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    const double a = datum.shells[i];
    const double r = cfg[i].radius();
    if (!(a > r && a < 2 * r)) return "shell " + std::to_string(i) + " outside (r, 2r)";
    for (std::size_t j = 0; j < cfg.size(); ++j) {
      const auto [lo, hi] = point_circle_range(cfg[i].center(), cfg[j]);
      if (!(hi < a - eps || lo > a + eps))
        return "shell " + std::to_string(i) + " meets circle " + std::to_string(j);
    }
  }
  return {};
}

DisjunctionDatum find_datum(const Configuration& cfg) {
  const double eps = cfg.tolerances().shell;
  DisjunctionDatum datum;
  datum.shells.reserve(cfg.size());
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    const double r = cfg[i].radius();
    std::vector<std::pair<double, double>> blocked;
    for (std::size_t j = 0; j < cfg.size(); ++j) {
      if (j == i) continue;
      const auto [lo, hi] = point_circle_range(cfg[i].center(), cfg[j]);
      if (hi + eps <= r || lo - eps >= 2 * r) continue;
      blocked.emplace_back(lo - eps, hi + eps);
    }
    std::sort(blocked.begin(), blocked.end());
    // Sweep the free gaps of (r + eps, 2r).
    double cursor = r + eps, best_len = 0, best_mid = 0;
    auto consider = [&](double lo, double hi) {
      if (hi - lo > best_len) {
        best_len = hi - lo;
        best_mid = 0.5 * (lo + hi);
      }
    };
    for (const auto& [lo, hi] : blocked) {
      if (lo > cursor) consider(cursor, std::min(lo, 2 * r));
      cursor = std::max(cursor, hi);
      if (cursor >= 2 * r) break;
    }
    if (cursor < 2 * r) consider(cursor, 2 * r);
    if (!(best_len > 2 * eps)) {
      std::ostringstream os;
      os << "no free shell radius for circle " << i << " (complexity " << complexity(cfg) << ")";
      fail(ErrorCode::ShellNotFound, os.str());
    }
    datum.shells.push_back(blocked.empty() ? 1.5 * r : best_mid);
  }
  return datum;
}

std::vector<std::size_t> radius_order(const Configuration& cfg) {
  std::vector<std::size_t> order(cfg.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cfg[a].radius() < cfg[b].radius(); });
  const double eps = cfg.tolerances().radius;
  for (std::size_t x = 0; x < order.size(); ++x)
    for (std::size_t y = x + 1; y < order.size(); ++y) {
      const std::size_t i = order[x], j = order[y];
      if (cfg[j].radius() - cfg[i].radius() > eps) break;
      if (microcosms_intersect(cfg, i, j))
        fail(ErrorCode::TieBreakNeeded,
             "circles " + std::to_string(i) + " and " + std::to_string(j) + " have equal radii and interact");
    }
  return order;
}

Configuration flow(const Configuration& cfg, const SimplexWeights& w, double t) {
  require(t >= 0, ErrorCode::InvalidArgument, "flow time must be nonnegative");
  require(!w.weights.empty() && w.weights.size() == w.data.size(), ErrorCode::InvalidArgument,
          "one datum per weight is required");
  double sum = 0;
  for (double s : w.weights) {
    require(s >= 0, ErrorCode::InvalidArgument, "weights must be nonnegative");
    sum += s;
  }
  require(std::abs(sum - 1.0) <= 1e-12, ErrorCode::InvalidArgument, "weights must sum to 1");
  for (const auto& d : w.data) {
    const auto problem = datum_problem(cfg, d);
    require(problem.empty(), ErrorCode::InvalidArgument, "invalid disjunction datum: " + problem);
  }
  if (t == 0) return cfg;

  const auto order = radius_order(cfg);
  const double eps = cfg.tolerances().shell;
  std::vector<Circle> current = cfg.circles();
  for (std::size_t i : order) {
    const Vec3 c = cfg[i].center();
    for (std::size_t v = 0; v < w.weights.size(); ++v) {
      const double tv = t * w.weights[v];
      if (tv == 0) continue;
      const double a = w.data[v].shells[i];
      for (auto& circle : current) circle = phi_circle(a, c, tv, circle, eps);
    }
  }
  if (auto problem = configuration_problem(current, cfg.tolerances()))
    fail(ErrorCode::DisjointnessBroken, *problem);
  return Configuration(std::move(current), cfg.tolerances());
}

RunResult run_to_good(const Configuration& cfg, std::size_t s, const RunOptions& options) {
  require(s <= cfg.size(), ErrorCode::InvalidArgument, "run_to_good needs s <= k");
  require(options.dt > 0 && options.t_max >= 0, ErrorCode::InvalidArgument, "dt must be positive");
  const std::size_t want = cfg.size() - s;

  RunResult result{cfg, {}, 0};
  auto snapshot = [&](std::size_t step, double t) {
    const auto& c = result.final_config;
    const double d = c.size() < 2 ? 0.0 : min_curve_distance(c);
    result.trace.push_back({step, t, complexity(c), good_circles(c).size(), d});
  };
  snapshot(0, 0.0);

  double t = 0;
  std::size_t step = 0;
  while (!classify(result.final_config, want).in_D) {
    if (t >= options.t_max) {
      std::ostringstream os;
      os << "not enough good circles by t = " << t;
      fail(ErrorCode::MaxTimeExceeded, os.str());
    }
    const auto weights = SimplexWeights::vertex(find_datum(result.final_config));
    double dt = std::min(options.dt, std::max(options.t_max - t, 1e-12));
    for (int attempt = 0;; ++attempt) {
      try {
        result.final_config = flow(result.final_config, weights, dt);
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ShellCrossed || attempt >= 30) throw;
        dt *= 0.5;
        ++result.halvings;
      }
    }
    t += dt;
    snapshot(++step, t);
  }
  return result;
}

std::string trace_csv(const std::vector<FlowTraceRow>& trace) {
  std::string out = "step,t,complexity,n_good,min_dist\n";
  for (const auto& row : trace) {
    out += std::to_string(row.step) + ',' + fmt17(row.t) + ',' + fmt17(row.complexity) + ',' +
           std::to_string(row.n_good) + ',' + fmt17(row.min_dist) + '\n';
  }
  return out;
}

}  // namespace circlestab
