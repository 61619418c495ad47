#pragma once

// Finite combinatorial topology: simplicial complexes, semisimplicial sets,
// ordered flag spaces, and their integral/field homology.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "circlestab/linalg.hpp"

namespace circlestab {

using Vertex = int;
/// Strictly increasing vertex list.
using Simplex = std::vector<Vertex>;
using VertexMap = std::map<Vertex, Vertex>;

struct Coefficients {
  enum class Kind { Integers, Rationals, Prime };

  Kind kind = Kind::Integers;
  std::uint32_t prime = 0;

  static Coefficients integers() { return {}; }
  static Coefficients rationals() { return {Kind::Rationals, 0}; }
  static Coefficients prime_field(std::uint32_t p);
  /// Accepts "Z", "Q", "F2", "F3", ... and "Fp" (meaning F2).
  static Coefficients parse(std::string_view text);

  bool is_field() const noexcept { return kind != Kind::Integers; }
  std::string name() const;

  friend bool operator==(const Coefficients&, const Coefficients&) = default;
};

/// Finitely generated abelian group Z^rank + sum Z/d_i with d_1 | d_2 | ...
/// Over a field only `rank` (the dimension) is meaningful.
struct AbelianGroup {
  std::size_t rank = 0;
  std::vector<std::int64_t> torsion;

  bool is_zero() const noexcept { return rank == 0 && torsion.empty(); }
  std::string to_string() const;

  friend bool operator==(const AbelianGroup&, const AbelianGroup&) = default;
};

AbelianGroup free_abelian(std::size_t rank);

class SimplicialComplex {
 public:
  SimplicialComplex() = default;
  /// Downward closure of `faces`; `extra_vertices` adds isolated vertices.
  explicit SimplicialComplex(std::vector<Simplex> faces, std::vector<Vertex> extra_vertices = {});
  SimplicialComplex(std::initializer_list<Simplex> faces) : SimplicialComplex(std::vector<Simplex>(faces)) {}

  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  const std::vector<Simplex>& maximal() const noexcept { return maximal_; }
  /// -1 for the empty complex.
  int dimension() const noexcept { return static_cast<int>(by_dim_.size()) - 1; }
  bool empty() const noexcept { return vertices_.empty(); }

  const std::vector<Simplex>& simplices(int dim) const;
  std::optional<std::size_t> index_of(const Simplex& s) const;
  bool contains(const Simplex& s) const { return index_of(s).has_value(); }

  std::vector<std::size_t> f_vector() const;
  std::int64_t euler_characteristic() const;

  friend bool operator==(const SimplicialComplex& a, const SimplicialComplex& b) {
    return a.vertices_ == b.vertices_ && a.maximal_ == b.maximal_;
  }

 private:
  std::vector<Vertex> vertices_;
  std::vector<Simplex> maximal_;
  std::vector<std::vector<Simplex>> by_dim_;
  std::vector<std::map<Simplex, std::size_t>> index_;
};

/// Sort and deduplicate; throws InvalidArgument on repeated vertices.
Simplex make_simplex(std::vector<Vertex> vertices);

/// Face maps d_i : X_p -> X_{p-1}; simplicial identities are verified on
/// construction.
class SemiSimplicialSet {
 public:
  SemiSimplicialSet() = default;
  /// faces[p][c][i] is the index in degree p-1 of d_i applied to cell c of
  /// degree p. faces[0] must be empty (or the vector may start at degree 1
  /// by leaving faces[0] as an empty list).
  SemiSimplicialSet(std::vector<std::vector<std::int64_t>> cell_ids,
                    std::vector<std::vector<std::vector<std::size_t>>> faces);

  int dimension() const noexcept { return static_cast<int>(cells_.size()) - 1; }
  std::size_t count(int p) const;
  const std::vector<std::int64_t>& ids(int p) const { return cells_.at(p); }
  std::size_t face(int p, std::size_t cell, std::size_t i) const { return faces_.at(p).at(cell).at(i); }
  const std::vector<std::vector<std::vector<std::size_t>>>& faces() const noexcept { return faces_; }
  const std::vector<std::vector<std::int64_t>>& cells() const noexcept { return cells_; }

 private:
  std::vector<std::vector<std::int64_t>> cells_;
  std::vector<std::vector<std::vector<std::size_t>>> faces_;
};

/// X0 with an ordered relation X1; higher cells are the tuples all of whose
/// ordered pairs lie in X1.
class OrderedFlagSpace {
 public:
  OrderedFlagSpace(std::vector<Vertex> vertices, std::vector<std::pair<Vertex, Vertex>> relation);

  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  const std::vector<std::pair<Vertex, Vertex>>& relation() const noexcept { return relation_; }
  bool related(Vertex a, Vertex b) const;

  /// cells()[p] lists the ordered (p+1)-tuples in lexicographic order.
  const std::vector<std::vector<std::vector<Vertex>>>& cells() const noexcept { return cells_; }
  SemiSimplicialSet to_semisimplicial() const;

 private:
  std::vector<Vertex> vertices_;
  std::vector<std::pair<Vertex, Vertex>> relation_;
  std::map<std::pair<Vertex, Vertex>, bool> lookup_;
  std::vector<std::vector<std::vector<Vertex>>> cells_;
};

struct Flagified {
  SimplicialComplex complex;
  /// Underlying vertex set -> its unique admissible ordering.
  std::map<Simplex, std::vector<Vertex>> back;
};

Flagified flagify(const OrderedFlagSpace& space);

struct Graph {
  std::vector<Vertex> vertices;
  std::vector<std::pair<Vertex, Vertex>> edges;
};

SimplicialComplex flag_complex(const Graph& graph);
SimplicialComplex injective_words(std::span<const Vertex> letters);
SemiSimplicialSet ordered_injective_words(std::span<const Vertex> letters);
/// Tuples underlying ordered_injective_words, degree by degree, in cell order.
std::vector<std::vector<std::vector<Vertex>>> injective_tuples(std::span<const Vertex> letters);

SimplicialComplex link(const SimplicialComplex& complex, const Simplex& sigma);

// ---------------------------------------------------------------------------
// Chains and homology

/// Chain groups C_n for n = min_degree .. min_degree + dims.size() - 1.
/// boundary[k] : C_{min_degree+k} -> C_{min_degree+k-1} (rows x cols).
struct ChainComplex {
  int min_degree = 0;
  std::vector<std::size_t> dims;
  std::vector<IntMatrix> boundary;

  int max_degree() const noexcept { return min_degree + static_cast<int>(dims.size()) - 1; }
  std::size_t dim(int degree) const;
  /// Boundary out of `degree`, or an empty optional when it is the zero map.
  const IntMatrix* d(int degree) const;
  /// d_{n-1} d_n == 0 for every n.
  bool is_valid() const;
};

/// Ordered-basis boundary: [v0..vq] -> sum (-1)^i [.. v̂_i ..]. With
/// `reduced`, an augmentation to Z in degree -1 is included.
ChainComplex chain_complex(const SimplicialComplex& complex, bool reduced = false);
/// Alternating sum of face maps.
ChainComplex chain_complex(const SemiSimplicialSet& set, bool reduced = false);

/// Rank of an integer matrix over the given coefficients (SNF for Z).
std::size_t matrix_rank(const IntMatrix& m, const Coefficients& coefficients);

std::vector<AbelianGroup> homology(const ChainComplex& chains, int lo, int hi,
                                   const Coefficients& coefficients = Coefficients::integers());
std::vector<AbelianGroup> homology(const SimplicialComplex& complex, int lo, int hi,
                                   const Coefficients& coefficients = Coefficients::integers(),
                                   bool reduced = false);
std::vector<AbelianGroup> homology(const SemiSimplicialSet& set, int lo, int hi,
                                   const Coefficients& coefficients = Coefficients::integers(),
                                   bool reduced = false);

/// Induced chain map in one degree: C_q(K) -> C_q(L). Degenerate images vanish.
IntMatrix chain_map(const SimplicialComplex& source, const SimplicialComplex& target, const VertexMap& f,
                    int degree);

bool is_simplicial_map(const SimplicialComplex& source, const SimplicialComplex& target, const VertexMap& f);

// ---------------------------------------------------------------------------
// Connectivity

struct ConnectivityVerdict {
  int target = 0;
  /// Largest m <= target for which the complex is homologically m-connected
  /// (-2 for the empty complex).
  int achieved = -2;
  std::optional<int> failing_degree;

  bool passed() const noexcept { return achieved >= target; }
  std::string label() const;
};

/// Homological proxy: nonempty, connected, integral reduced homology zero
/// through degree m.
ConnectivityVerdict connectivity_bound(const SimplicialComplex& complex, int n);

struct LinkFailure {
  Simplex simplex;
  int required = 0;
  ConnectivityVerdict verdict;
};

struct WcmVerdict {
  int n = 0;
  ConnectivityVerdict whole;
  std::vector<LinkFailure> failures;

  bool passed() const noexcept { return whole.passed() && failures.empty(); }
};

WcmVerdict is_weakly_cm(const SimplicialComplex& complex, int n);

/// True iff f is injective on every simplex; throws NotSimplicial if some
/// image is not a simplex of `target`.
bool simplexwise_injective_check(const SimplicialComplex& source, const SimplicialComplex& target,
                                 const VertexMap& f);

// ---------------------------------------------------------------------------
// Inductive lifting over a projection Y -> X

/// Called with the lifts of already-lifted neighbours and the vertex of X
/// that must be lifted; returns a vertex of Y or nothing.
using LiftChooser = std::function<std::optional<Vertex>(std::span<const Vertex> lifted_neighbours, Vertex target)>;

struct LiftProblem {
  SimplicialComplex disk;
  VertexMap g;                          // disk -> X
  VertexMap boundary_lift;              // boundary vertices of the disk -> Y
  std::vector<Vertex> interior_order;   // interior vertices, lifted in this order
  SimplicialComplex total;              // Y
  SimplicialComplex base;               // X
  VertexMap projection;                 // Y -> X
};

struct LiftResult {
  bool ok = false;
  VertexMap lift;
  std::optional<Vertex> failed_vertex;
  std::string reason;
};

LiftResult inductive_lift(const LiftProblem& problem, const LiftChooser& chooser);

// ---------------------------------------------------------------------------
// Presentations

/// Letters are signed 1-based generator indices: +i is g_i, -i its inverse.
struct Presentation {
  std::size_t generators = 0;
  std::vector<std::vector<int>> relators;
};

void validate(const Presentation& presentation);
AbelianGroup abelianize(const Presentation& presentation);

/// Coxeter presentations used as fixtures: symmetric group on n letters and
/// the hyperoctahedral group of signed permutations of n letters.
Presentation symmetric_group_presentation(std::size_t n);
Presentation hyperoctahedral_presentation(std::size_t n);

}  // namespace circlestab
