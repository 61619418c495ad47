#pragma once

// Arcs from the bottom face of the cube to centers of good circles, the
// simplices they form, their construction by grid routing, and the explicit
// retraction that pulls arc-carrying circles down to their entry points.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "circlestab/geometry.hpp"

namespace circlestab {

struct ArcTolerances {
  double arc = 1e-6;    // positional tolerance and minimal clearance
  double angle = 1e-3;  // final-direction tolerance (radians)
};

struct Arc {
  double t = 0.5;
  double lambda = 0.0;
  double eta = 0.0;
  std::size_t target = 0;
  std::vector<Vec3> polyline;

  /// Arc length at each vertex.
  std::vector<double> cumulative() const;
  double length() const;
  Vec3 point_at(double s) const;
  /// Direction of the segment containing s (the earlier one at a vertex).
  Vec3 tangent_at(double s) const;
  /// Polyline cut at arc length s; a cut within `snap` of a vertex lands on it.
  std::vector<Vec3> truncated(double s, double snap = 1e-9) const;
};

/// Builds an arc with lambda set to the polyline length.
Arc make_arc(double t, double eta, std::size_t target, std::vector<Vec3> polyline);

struct ArcSimplex {
  std::vector<Arc> arcs;

  std::size_t dimension() const { return arcs.size() - 1; }
};

enum class ViolationKind {
  Parameters,
  Start,
  StandardSegment,
  Endpoint,
  EndpointDirection,
  OutsideCube,
  HitsCircle,
  HitsOwnDisk,
  NotSimple,
  BadTarget,
  TargetNotGood,
  Ordering,
  RepeatedTarget,
  HitsArc,
  HitsDisk,
};

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::size_t arc = 0;
  std::optional<std::size_t> other;
  double distance = 0.0;
  Vec3 witness = Vec3::Zero();
  Vec3 other_witness = Vec3::Zero();
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(ViolationKind kind) const;
  std::string summary() const;
};

ValidationReport validate_arc(const Configuration& cfg, const Arc& arc, const ArcTolerances& tol = {});
ValidationReport validate_simplex(const Configuration& cfg, const ArcSimplex& simplex,
                                  const ArcTolerances& tol = {});

struct RouteOptions {
  double resolution = 1.0 / 40;
  std::optional<double> t;     // entry parameter; chosen above existing ones when absent
  double t_fraction = 0.5;     // preferred position of an automatic t between the last entry and 1
  std::size_t min_segments = 32;
};

Arc route_arc(const Configuration& cfg, const ArcSimplex& existing, std::size_t target,
              const RouteOptions& options = {}, const ArcTolerances& tol = {});

/// Routes arcs to `targets` in order with evenly spaced entry parameters;
/// each failing route is retried on finer grids before NoRouteFound escapes.
ArcSimplex resolve(const Configuration& cfg, const std::vector<std::size_t>& targets,
                   const RouteOptions& options = {}, const ArcTolerances& tol = {});

std::vector<std::size_t> word_projection(const ArcSimplex& simplex);
/// Face d_i: delete the i-th arc.
ArcSimplex face(const ArcSimplex& simplex, std::size_t i);

// ---------------------------------------------------------------------------
// Retraction

struct RetractTerms {
  double radius = 0;           // the circle's own radius
  double gap_next = 0;         // t_{i+1} - t_i, or 1 - t_i for the last arc
  double gap_prev = 0;         // t_i - t_{i-1}, or t_i for the first arc
  double arcs_and_disks = 0;   // other arcs and their target disks
  double circles = 0;          // circles without arcs
  double tube = 0;             // tube radius estimate
  double walls = 0;            // distance to the cube faces away from the entry
};

struct RetractSample {
  std::size_t circle = 0;
  std::size_t step = 0;
  double t = 0;
  double radius = 0;
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double lambda = 0;
  double eta = 0;
};

struct RetractState {
  std::size_t circle = 0;
  double r_tilde = 0;
  double Z = 0;
  double upsilon = 0;
  double stop = 0;  // arc-length parameter where the center comes to rest
  RetractTerms terms;
  std::vector<RetractSample> course;
};

struct RetractResult {
  Configuration final_config;
  ArcSimplex final_simplex;
  std::vector<RetractState> states;
  double corner = 0;                 // remaining circles end inside (corner, 1)^3
  double remaining_scale = 1;
  std::size_t validations = 0;       // intermediate states checked
  std::vector<RetractSample> trace;  // every sample, in order
};

/// Measures the quantities bounding the retraction of arc `index`.
RetractState retract_bounds(const Configuration& cfg, const ArcSimplex& simplex, std::size_t index,
                            const ArcTolerances& tol = {});

RetractResult retract(const Configuration& cfg, const ArcSimplex& simplex, std::size_t steps = 256,
                      const ArcTolerances& tol = {});

std::string retract_csv(const std::vector<RetractSample>& trace);

}  // namespace circlestab
