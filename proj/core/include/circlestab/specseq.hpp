#pragma once

// Spectral sequence of an augmented semisimplicial diagram of simplicial
// complexes, filtered by column.
//
// Sign convention (used everywhere): the total complex has
//   T_n = sum_{p >= -1, p + q = n} C_q(K_p)
// and on a chain x in C_q(K_p)
//   D x = boundary(x) + (-1)^q * delta_p(x),
// where delta_p = sum_i (-1)^i (d_i)_* for p >= 1 and delta_0 = augmentation.

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "circlestab/complexes.hpp"

namespace circlestab {

struct Diagram {
  /// columns[p + 1] is K_p for p = -1 .. N.
  std::vector<SimplicialComplex> columns;
  /// faces[p] lists the maps out of K_p: the augmentation for p = 0 (absent
  /// when K_{-1} is empty), d_0 .. d_p for p >= 1. faces.size() == N + 1.
  std::vector<std::vector<VertexMap>> faces;

  int top() const noexcept { return static_cast<int>(columns.size()) - 2; }
  const SimplicialComplex& column(int p) const { return columns.at(static_cast<std::size_t>(p + 1)); }
};

/// NotSimplicial for a non-simplicial or partial face map, InvalidArgument for
/// shape problems or failed simplicial identities.
void validate(const Diagram& diagram);

/// Chain-level diagram: what the spectral sequence actually consumes.
struct ChainDiagram {
  /// columns[p + 1] is the chain complex of column p, degrees from 0.
  std::vector<ChainComplex> columns;
  /// horizontal[p + 1][q] : C_q(column p) -> C_q(column p - 1); empty for p = -1.
  std::vector<std::vector<IntMatrix>> horizontal;

  int top() const noexcept { return static_cast<int>(columns.size()) - 2; }
};

ChainDiagram chain_diagram(const Diagram& diagram);

struct TotalComplex {
  struct Block {
    int p;
    int q;
    std::size_t offset;
    std::size_t size;
  };

  ChainComplex chains;                     // degrees from -1
  std::vector<std::vector<Block>> blocks;  // [n + 1], ascending p
  int top = -1;                            // last column index N

  /// Dimension of F_p T_n: chains supported in columns <= p.
  std::size_t filtration_dim(int n, int p) const;
};

TotalComplex total_complex(const ChainDiagram& diagram);
TotalComplex total_complex(const Diagram& diagram);

struct Page {
  int r = 1;
  Coefficients coefficients = Coefficients::rationals();
  int top = -1;
  int q_max = -1;
  std::map<std::pair<int, int>, std::size_t> dims;      // (p, q) -> dim E^r_{p,q}
  std::map<std::pair<int, int>, std::size_t> rank_out;  // rank of d^r leaving (p, q)

  std::size_t dim(int p, int q) const;
  std::size_t rank_from(int p, int q) const;
  std::size_t total(int n) const;
  bool is_zero() const;
  bool differential_zero() const;
};

/// First page from column homology over the field; d^1 is induced by the
/// horizontal maps on homology representatives. FieldOnly for Z.
Page e1(const ChainDiagram& diagram, const Coefficients& field);
Page e1(const Diagram& diagram, const Coefficients& field);

/// E^{r+1} from the filtration of T; checks it against the homology of
/// (E^r, d^r) and that d^{r+1} squares to zero.
Page turn_page(const Page& page, const TotalComplex& total);

struct Convergence {
  std::vector<Page> pages;  // E^1, E^2, ..., last one is E^infinity
  int stabilized_at = 1;    // every d^r with r >= this is zero
  int n_min = -1;
  std::vector<std::size_t> target;  // dim H_{n+1}(K_{-1}, ||X||) for n = n_min ..
  bool match = false;

  const Page& e_infinity() const { return pages.back(); }
};

Convergence converge(const ChainDiagram& diagram, const Coefficients& field);
Convergence converge(const Diagram& diagram, const Coefficients& field);

/// Columnwise vertex maps D -> D' (index p + 1 for column p).
struct DiagramMap {
  std::vector<VertexMap> columns;
};

/// Per-column algebraic cone: Cone_q = C_{q-1}(K_p) + C_q(K'_p) with
/// d(a, b) = (-da, t a + db). NotCommuting if t fails to commute with faces.
ChainDiagram mapping_cone(const Diagram& source, const Diagram& target, const DiagramMap& t);

struct LadderRow {
  int k = 0;
  int bound = 0;
  /// Entries (p, q) of the cone's E^1 inside {p >= 0, q <= bound(k - p - 1)}
  /// that are nonzero.
  std::vector<std::pair<int, int>> nonvanishing;
  /// On the augmentation column: t_* iso for q < bound(k), onto at q = bound(k).
  bool iso_below = true;
  bool surjective_at = true;
  /// Largest n such that the cone's E^infinity vanishes in all total degrees <= n.
  int vanishing_through = -2;

  bool region_vanishes() const { return nonvanishing.empty(); }
};

using BoundFunction = std::function<int(int)>;
int half_floor(int k);

/// maps[i] : family[i] -> family[i + 1]; row i is labelled k = k0 + i.
std::vector<LadderRow> stability_ladder(const std::vector<Diagram>& family, const std::vector<DiagramMap>& maps,
                                        int k0, const BoundFunction& bound, const Coefficients& field);

std::string page_csv(const std::vector<Page>& pages);

}  // namespace circlestab
