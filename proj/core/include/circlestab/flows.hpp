#pragma once

// The shrinking flow driven by disjunction data: every circle owns a shell
// sphere of radius a_i in (r_i, 2 r_i) about its center that misses all
// curves, and the flow contracts each shell's ball towards its center.

#include <cstddef>
#include <string>
#include <vector>

#include "circlestab/geometry.hpp"

namespace circlestab {

struct DisjunctionDatum {
  std::vector<double> shells;
};

struct SimplexWeights {
  std::vector<double> weights;
  std::vector<DisjunctionDatum> data;  // one datum per vertex of the simplex

  static SimplexWeights vertex(DisjunctionDatum datum) { return {{1.0}, {std::move(datum)}}; }
};

/// x / (1 + t) inside the closed unit ball, x outside.
Vec3 phi(double t, const Vec3& x);

/// The rescaled map about the sphere of radius a centered at c, applied to a
/// whole circle. Throws ShellCrossed if the curve comes within `shell_eps` of
/// the sphere (for t > 0).
Circle phi_circle(double a, const Vec3& c, double t, const Circle& circle, double shell_eps = 1e-9);

/// Empty when the datum is valid for cfg; otherwise the first problem.
std::string datum_problem(const Configuration& cfg, const DisjunctionDatum& datum);

/// Midpoint of the widest free sub-interval of (r_i, 2 r_i) for every circle.
DisjunctionDatum find_datum(const Configuration& cfg);

/// Circle indices by ascending radius (ties by index). Throws TieBreakNeeded
/// when two circles with intersecting microcosms share a radius.
std::vector<std::size_t> radius_order(const Configuration& cfg);

Configuration flow(const Configuration& cfg, const SimplexWeights& w, double t);

struct FlowTraceRow {
  std::size_t step = 0;
  double t = 0.0;
  double complexity = 0.0;
  std::size_t n_good = 0;
  double min_dist = 0.0;
};

struct RunOptions {
  double dt = 0.5;
  double t_max = 1e3;
};

struct RunResult {
  Configuration final_config;
  std::vector<FlowTraceRow> trace;  // row 0 is the input
  std::size_t halvings = 0;         // steps shortened after a shell crossing
};

RunResult run_to_good(const Configuration& cfg, std::size_t s, const RunOptions& options = {});

std::string trace_csv(const std::vector<FlowTraceRow>& trace);

}  // namespace circlestab
