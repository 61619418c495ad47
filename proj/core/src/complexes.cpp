#include "circlestab/complexes.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "circlestab/error.hpp"
#include "circlestab/field.hpp"

namespace circlestab {

// ---------------------------------------------------------------------------
// Coefficients and groups

Coefficients Coefficients::prime_field(std::uint32_t p) {
  PrimeField check(p);  // validates primality
  return {Kind::Prime, check.p};
}

Coefficients Coefficients::parse(std::string_view text) {
  if (text == "Z") return integers();
  if (text == "Q") return rationals();
  if (text == "Fp") return prime_field(2);
  if (text.size() >= 2 && text.front() == 'F') {
    std::uint32_t p = 0;
    for (char c : text.substr(1)) {
      require(c >= '0' && c <= '9', ErrorCode::InvalidArgument, "bad coefficient spec: " + std::string(text));
      p = p * 10 + static_cast<std::uint32_t>(c - '0');
    }
    return prime_field(p);
  }
  fail(ErrorCode::InvalidArgument, "unknown coefficients: " + std::string(text));
}

std::string Coefficients::name() const {
  switch (kind) {
    case Kind::Integers: return "Z";
    case Kind::Rationals: return "Q";
    case Kind::Prime: return "F" + std::to_string(prime);
  }
  return "?";
}

AbelianGroup free_abelian(std::size_t rank) { return AbelianGroup{rank, {}}; }

std::string AbelianGroup::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  if (rank == 1) {
    out << "Z";
    first = false;
  } else if (rank > 1) {
    out << "Z^" << rank;
    first = false;
  }
  for (auto d : torsion) {
    if (!first) out << " + ";
    out << "Z/" << d;
    first = false;
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Simplicial complexes

Simplex make_simplex(std::vector<Vertex> vertices) {
  std::sort(vertices.begin(), vertices.end());
  require(std::adjacent_find(vertices.begin(), vertices.end()) == vertices.end(), ErrorCode::InvalidArgument,
          "simplex has a repeated vertex");
  return vertices;
}

SimplicialComplex::SimplicialComplex(std::vector<Simplex> faces, std::vector<Vertex> extra_vertices) {
  std::vector<std::set<Simplex>> closure;
  auto insert = [&](const Simplex& s) {
    const std::size_t d = s.size() - 1;
    if (closure.size() <= d) closure.resize(d + 1);
    closure[d].insert(s);
  };
  for (auto& f : faces) {
    if (f.empty()) continue;
    Simplex s = make_simplex(std::move(f));
    require(s.size() < 31, ErrorCode::InvalidArgument, "simplex dimension too large");
    const std::uint32_t n = static_cast<std::uint32_t>(s.size());
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      Simplex sub;
      for (std::uint32_t i = 0; i < n; ++i)
        if (mask & (1u << i)) sub.push_back(s[i]);
      insert(sub);
    }
  }
  for (Vertex v : extra_vertices) insert(Simplex{v});

  by_dim_.resize(closure.size());
  index_.resize(closure.size());
  for (std::size_t d = 0; d < closure.size(); ++d) {
    by_dim_[d].assign(closure[d].begin(), closure[d].end());
    for (std::size_t i = 0; i < by_dim_[d].size(); ++i) index_[d].emplace(by_dim_[d][i], i);
  }
  for (const auto& v : by_dim_.empty() ? std::vector<Simplex>{} : by_dim_[0]) vertices_.push_back(v[0]);

  std::set<Simplex> covered;
  for (std::size_t d = 1; d < by_dim_.size(); ++d) {
    for (const auto& s : by_dim_[d]) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        Simplex face = s;
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(i));
        covered.insert(face);
      }
    }
  }
  for (const auto& level : by_dim_)
    for (const auto& s : level)
      if (!covered.count(s)) maximal_.push_back(s);
}

const std::vector<Simplex>& SimplicialComplex::simplices(int dim) const {
  static const std::vector<Simplex> none;
  if (dim < 0 || dim >= static_cast<int>(by_dim_.size())) return none;
  return by_dim_[static_cast<std::size_t>(dim)];
}

std::optional<std::size_t> SimplicialComplex::index_of(const Simplex& s) const {
  if (s.empty() || s.size() > index_.size()) return std::nullopt;
  const auto& idx = index_[s.size() - 1];
  auto it = idx.find(s);
  if (it == idx.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> SimplicialComplex::f_vector() const {
  std::vector<std::size_t> f;
  for (const auto& level : by_dim_) f.push_back(level.size());
  return f;
}

std::int64_t SimplicialComplex::euler_characteristic() const {
  std::int64_t chi = 0;
  for (std::size_t d = 0; d < by_dim_.size(); ++d)
    chi += (d % 2 == 0 ? 1 : -1) * static_cast<std::int64_t>(by_dim_[d].size());
  return chi;
}

// ---------------------------------------------------------------------------
// Semisimplicial sets

SemiSimplicialSet::SemiSimplicialSet(std::vector<std::vector<std::int64_t>> cell_ids,
                                     std::vector<std::vector<std::vector<std::size_t>>> faces)
    : cells_(std::move(cell_ids)), faces_(std::move(faces)) {
  faces_.resize(cells_.size());
  require(faces_.empty() || faces_[0].empty(), ErrorCode::InvalidArgument, "degree 0 cells have no faces");
  for (std::size_t p = 1; p < cells_.size(); ++p) {
    require(faces_[p].size() == cells_[p].size(), ErrorCode::InvalidArgument,
            "face table size mismatch in degree " + std::to_string(p));
    for (const auto& f : faces_[p]) {
      require(f.size() == p + 1, ErrorCode::InvalidArgument, "a p-cell needs p+1 faces");
      for (auto idx : f)
        require(idx < cells_[p - 1].size(), ErrorCode::InvalidArgument, "face index out of range");
    }
  }
  // d_i d_j = d_{j-1} d_i for i < j
  for (std::size_t p = 2; p < cells_.size(); ++p) {
    for (std::size_t c = 0; c < cells_[p].size(); ++c) {
      for (std::size_t j = 1; j <= p; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
          const auto lhs = faces_[p - 1][faces_[p][c][j]][i];
          const auto rhs = faces_[p - 1][faces_[p][c][i]][j - 1];
          require(lhs == rhs, ErrorCode::InvalidArgument,
                  "simplicial identity fails in degree " + std::to_string(p));
        }
      }
    }
  }
}

std::size_t SemiSimplicialSet::count(int p) const {
  if (p < 0 || p >= static_cast<int>(cells_.size())) return 0;
  return cells_[static_cast<std::size_t>(p)].size();
}

// ---------------------------------------------------------------------------
// Ordered flag spaces

OrderedFlagSpace::OrderedFlagSpace(std::vector<Vertex> vertices, std::vector<std::pair<Vertex, Vertex>> relation)
    : vertices_(std::move(vertices)) {
  std::sort(vertices_.begin(), vertices_.end());
  require(std::adjacent_find(vertices_.begin(), vertices_.end()) == vertices_.end(), ErrorCode::InvalidArgument,
          "duplicate vertex in ordered flag space");
  std::set<std::pair<Vertex, Vertex>> seen;
  for (const auto& [a, b] : relation) {
    require(std::binary_search(vertices_.begin(), vertices_.end(), a) &&
                std::binary_search(vertices_.begin(), vertices_.end(), b),
            ErrorCode::InvalidArgument, "relation references an unknown vertex");
    require(a != b, ErrorCode::FlagViolation, "relation contains a loop (" + std::to_string(a) + "," +
                                                  std::to_string(a) + ")");
    require(!seen.count({b, a}), ErrorCode::FlagViolation,
            "both orderings of {" + std::to_string(a) + "," + std::to_string(b) + "} are related");
    if (seen.insert({a, b}).second) relation_.emplace_back(a, b);
  }
  for (const auto& pr : relation_) lookup_[pr] = true;

  // Depth-first extension: append v when every earlier entry relates to v.
  std::vector<Vertex> tuple;
  std::function<void()> extend = [&] {
    const std::size_t p = tuple.size() - 1;
    if (cells_.size() <= p) cells_.resize(p + 1);
    cells_[p].push_back(tuple);
    for (Vertex v : vertices_) {
      bool ok = true;
      for (Vertex u : tuple) {
        if (!related(u, v)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      tuple.push_back(v);
      extend();
      tuple.pop_back();
    }
  };
  for (Vertex v : vertices_) {
    tuple = {v};
    extend();
  }
  for (auto& level : cells_) std::sort(level.begin(), level.end());
}

bool OrderedFlagSpace::related(Vertex a, Vertex b) const { return lookup_.count({a, b}) > 0; }

namespace {

SemiSimplicialSet semisimplicial_from_tuples(const std::vector<std::vector<std::vector<Vertex>>>& tuples) {
  std::vector<std::vector<std::int64_t>> ids(tuples.size());
  std::vector<std::vector<std::vector<std::size_t>>> faces(tuples.size());
  std::vector<std::map<std::vector<Vertex>, std::size_t>> index(tuples.size());
  for (std::size_t p = 0; p < tuples.size(); ++p) {
    for (std::size_t c = 0; c < tuples[p].size(); ++c) {
      index[p].emplace(tuples[p][c], c);
      ids[p].push_back(static_cast<std::int64_t>(c));
    }
  }
  for (std::size_t p = 1; p < tuples.size(); ++p) {
    for (const auto& t : tuples[p]) {
      std::vector<std::size_t> f;
      for (std::size_t i = 0; i <= p; ++i) {
        auto face = t;
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(i));
        auto it = index[p - 1].find(face);
        require(it != index[p - 1].end(), ErrorCode::InvalidArgument, "face of a cell is missing");
        f.push_back(it->second);
      }
      faces[p].push_back(std::move(f));
    }
  }
  return SemiSimplicialSet(std::move(ids), std::move(faces));
}

}  // namespace

SemiSimplicialSet OrderedFlagSpace::to_semisimplicial() const { return semisimplicial_from_tuples(cells_); }

Flagified flagify(const OrderedFlagSpace& space) {
  Flagified out;
  std::vector<Simplex> sets;
  for (const auto& level : space.cells()) {
    for (const auto& tuple : level) {
      Simplex s = make_simplex(tuple);
      auto [it, inserted] = out.back.emplace(s, tuple);
      require(inserted, ErrorCode::FlagViolation, "a vertex set admits two orderings");
      sets.push_back(std::move(s));
    }
  }
  out.complex = SimplicialComplex(std::move(sets), space.vertices());
  return out;
}

// ---------------------------------------------------------------------------
// Constructions

SimplicialComplex flag_complex(const Graph& graph) {
  std::vector<Vertex> verts = graph.vertices;
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  std::map<Vertex, std::set<Vertex>> adj;
  for (Vertex v : verts) adj[v];
  for (const auto& [a, b] : graph.edges) {
    require(a != b, ErrorCode::InvalidArgument, "graph has a loop");
    require(adj.count(a) && adj.count(b), ErrorCode::InvalidArgument, "edge references unknown vertex");
    adj[a].insert(b);
    adj[b].insert(a);
  }
  // Bron-Kerbosch with pivoting.
  std::vector<Simplex> cliques;
  std::function<void(std::vector<Vertex>&, std::set<Vertex>, std::set<Vertex>)> bk =
      [&](std::vector<Vertex>& r, std::set<Vertex> p, std::set<Vertex> x) {
        if (p.empty() && x.empty()) {
          cliques.push_back(r);
          return;
        }
        Vertex pivot = !p.empty() ? *p.begin() : *x.begin();
        std::size_t best = 0;
        for (const auto* s : {&p, &x})
          for (Vertex u : *s) {
            std::size_t c = 0;
            for (Vertex w : p) c += adj[u].count(w);
            if (c >= best) {
              best = c;
              pivot = u;
            }
          }
        std::vector<Vertex> candidates;
        for (Vertex v : p)
          if (!adj[pivot].count(v)) candidates.push_back(v);
        for (Vertex v : candidates) {
          std::set<Vertex> np, nx;
          for (Vertex w : p)
            if (adj[v].count(w)) np.insert(w);
          for (Vertex w : x)
            if (adj[v].count(w)) nx.insert(w);
          r.push_back(v);
          bk(r, std::move(np), std::move(nx));
          r.pop_back();
          p.erase(v);
          x.insert(v);
        }
      };
  std::vector<Vertex> r;
  bk(r, std::set<Vertex>(verts.begin(), verts.end()), {});
  return SimplicialComplex(std::move(cliques), verts);
}

SimplicialComplex injective_words(std::span<const Vertex> letters) {
  require(!letters.empty(), ErrorCode::InvalidArgument, "injective words need a nonempty alphabet");
  return SimplicialComplex({make_simplex({letters.begin(), letters.end()})});
}

std::vector<std::vector<std::vector<Vertex>>> injective_tuples(std::span<const Vertex> letters) {
  std::vector<Vertex> alphabet(letters.begin(), letters.end());
  std::sort(alphabet.begin(), alphabet.end());
  require(!alphabet.empty(), ErrorCode::InvalidArgument, "injective words need a nonempty alphabet");
  require(std::adjacent_find(alphabet.begin(), alphabet.end()) == alphabet.end(), ErrorCode::InvalidArgument,
          "alphabet has repeated letters");
  std::vector<std::vector<std::vector<Vertex>>> tuples(alphabet.size());
  std::vector<Vertex> word;
  std::vector<bool> used(alphabet.size(), false);
  std::function<void()> grow = [&] {
    tuples[word.size() - 1].push_back(word);
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      word.push_back(alphabet[i]);
      grow();
      word.pop_back();
      used[i] = false;
    }
  };
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    used[i] = true;
    word = {alphabet[i]};
    grow();
    used[i] = false;
  }
  for (auto& level : tuples) std::sort(level.begin(), level.end());
  return tuples;
}

SemiSimplicialSet ordered_injective_words(std::span<const Vertex> letters) {
  return semisimplicial_from_tuples(injective_tuples(letters));
}

SimplicialComplex link(const SimplicialComplex& complex, const Simplex& sigma_in) {
  const Simplex sigma = make_simplex(sigma_in);
  require(complex.contains(sigma), ErrorCode::SimplexNotFound, "simplex is not in the complex");
  std::vector<Simplex> faces;
  for (const auto& f : complex.maximal()) {
    if (!std::includes(f.begin(), f.end(), sigma.begin(), sigma.end())) continue;
    Simplex rest;
    std::set_difference(f.begin(), f.end(), sigma.begin(), sigma.end(), std::back_inserter(rest));
    if (!rest.empty()) faces.push_back(std::move(rest));
  }
  return SimplicialComplex(std::move(faces));
}

// ---------------------------------------------------------------------------
// Chains and homology

std::size_t ChainComplex::dim(int degree) const {
  if (degree < min_degree || degree > max_degree()) return 0;
  return dims[static_cast<std::size_t>(degree - min_degree)];
}

const IntMatrix* ChainComplex::d(int degree) const {
  if (degree <= min_degree || degree > max_degree()) return nullptr;
  const auto& m = boundary[static_cast<std::size_t>(degree - min_degree)];
  if (m.rows() == 0 || m.cols() == 0) return nullptr;
  return &m;
}

bool ChainComplex::is_valid() const {
  for (int n = min_degree + 2; n <= max_degree(); ++n) {
    const IntMatrix* a = d(n - 1);
    const IntMatrix* b = d(n);
    if (a && b && !multiply(*a, *b).is_zero()) return false;
  }
  return true;
}

ChainComplex chain_complex(const SimplicialComplex& complex, bool reduced) {
  ChainComplex c;
  c.min_degree = reduced ? -1 : 0;
  if (reduced) {
    c.dims.push_back(1);
    c.boundary.emplace_back(0, 1);
  }
  for (int q = 0; q <= complex.dimension(); ++q) {
    const auto& cells = complex.simplices(q);
    c.dims.push_back(cells.size());
    if (q == 0) {
      if (reduced) {
        IntMatrix m(1, cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j) m(0, j) = 1;
        c.boundary.push_back(std::move(m));
      } else {
        c.boundary.emplace_back(0, cells.size());
      }
      continue;
    }
    IntMatrix m(complex.simplices(q - 1).size(), cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      for (std::size_t i = 0; i < cells[j].size(); ++i) {
        Simplex face = cells[j];
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(i));
        m(*complex.index_of(face), j) += (i % 2 == 0) ? 1 : -1;
      }
    }
    c.boundary.push_back(std::move(m));
  }
  return c;
}

ChainComplex chain_complex(const SemiSimplicialSet& set, bool reduced) {
  ChainComplex c;
  c.min_degree = reduced ? -1 : 0;
  if (reduced) {
    c.dims.push_back(1);
    c.boundary.emplace_back(0, 1);
  }
  for (int p = 0; p <= set.dimension(); ++p) {
    const std::size_t n = set.count(p);
    c.dims.push_back(n);
    if (p == 0) {
      if (reduced) {
        IntMatrix m(1, n);
        for (std::size_t j = 0; j < n; ++j) m(0, j) = 1;
        c.boundary.push_back(std::move(m));
      } else {
        c.boundary.emplace_back(0, n);
      }
      continue;
    }
    IntMatrix m(set.count(p - 1), n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i <= static_cast<std::size_t>(p); ++i)
        m(set.face(p, j, i), j) += (i % 2 == 0) ? 1 : -1;
    c.boundary.push_back(std::move(m));
  }
  return c;
}

std::size_t matrix_rank(const IntMatrix& m, const Coefficients& coefficients) {
  switch (coefficients.kind) {
    case Coefficients::Kind::Integers: return invariant_factors(m).size();
    case Coefficients::Kind::Rationals: return sparse_rank(RationalField{}, m);
    case Coefficients::Kind::Prime: return sparse_rank(PrimeField(coefficients.prime), m);
  }
  return 0;
}

std::vector<AbelianGroup> homology(const ChainComplex& chains, int lo, int hi, const Coefficients& coefficients) {
  struct Reduced {
    std::size_t rank = 0;
    std::vector<std::int64_t> torsion;
  };
  std::map<int, Reduced> cache;
  auto reduce = [&](int degree) -> const Reduced& {
    auto it = cache.find(degree);
    if (it != cache.end()) return it->second;
    Reduced r;
    if (const IntMatrix* m = chains.d(degree)) {
      if (coefficients.kind == Coefficients::Kind::Integers) {
        const auto factors = invariant_factors(*m);
        r.rank = factors.size();
        for (auto f : factors)
          if (f > 1) r.torsion.push_back(f);
      } else {
        r.rank = matrix_rank(*m, coefficients);
      }
    }
    return cache.emplace(degree, std::move(r)).first->second;
  };
  std::vector<AbelianGroup> out;
  for (int n = lo; n <= hi; ++n) {
    const std::size_t cn = chains.dim(n);
    const auto& out_of = reduce(n);
    const auto& into = reduce(n + 1);
    AbelianGroup g;
    g.rank = cn - out_of.rank - into.rank;
    g.torsion = into.torsion;
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<AbelianGroup> homology(const SimplicialComplex& complex, int lo, int hi,
                                   const Coefficients& coefficients, bool reduced) {
  return homology(chain_complex(complex, reduced), lo, hi, coefficients);
}

std::vector<AbelianGroup> homology(const SemiSimplicialSet& set, int lo, int hi, const Coefficients& coefficients,
                                   bool reduced) {
  return homology(chain_complex(set, reduced), lo, hi, coefficients);
}

namespace {

Vertex apply(const VertexMap& f, Vertex v) {
  auto it = f.find(v);
  require(it != f.end(), ErrorCode::InvalidArgument, "vertex map undefined at " + std::to_string(v));
  return it->second;
}

}  // namespace

IntMatrix chain_map(const SimplicialComplex& source, const SimplicialComplex& target, const VertexMap& f,
                    int degree) {
  const auto& cells = source.simplices(degree);
  IntMatrix m(target.simplices(degree).size(), cells.size());
  for (std::size_t j = 0; j < cells.size(); ++j) {
    std::vector<Vertex> image;
    for (Vertex v : cells[j]) image.push_back(apply(f, v));
    // Sign of the sorting permutation; repeated vertices give a degenerate image.
    int sign = 1;
    for (std::size_t a = 0; a < image.size(); ++a)
      for (std::size_t b = a + 1; b < image.size(); ++b)
        if (image[a] > image[b]) sign = -sign;
    Simplex sorted = image;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      require(target.contains(Simplex(sorted.begin(), std::unique(sorted.begin(), sorted.end()))),
              ErrorCode::NotSimplicial, "image of a simplex is not a simplex");
      continue;
    }
    auto idx = target.index_of(sorted);
    require(idx.has_value(), ErrorCode::NotSimplicial, "image of a simplex is not a simplex");
    m(*idx, j) = sign;
  }
  return m;
}

bool is_simplicial_map(const SimplicialComplex& source, const SimplicialComplex& target, const VertexMap& f) {
  for (const auto& s : source.maximal()) {
    Simplex image;
    for (Vertex v : s) {
      auto it = f.find(v);
      if (it == f.end()) return false;
      image.push_back(it->second);
    }
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());
    if (!target.contains(image)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Connectivity

std::string ConnectivityVerdict::label() const {
  if (achieved <= -2) return "empty (not homologically (-1)-connected)";
  return "homologically " + std::to_string(achieved) + "-connected";
}

ConnectivityVerdict connectivity_bound(const SimplicialComplex& complex, int n) {
  ConnectivityVerdict v;
  v.target = n;
  if (n <= -2) {
    v.achieved = n;
    return v;
  }
  if (complex.empty()) {
    v.achieved = -2;
    v.failing_degree = -1;
    return v;
  }
  v.achieved = -1;
  if (n < 0) return v;
  const auto groups = homology(complex, 0, n, Coefficients::integers(), true);
  for (int i = 0; i <= n; ++i) {
    if (!groups[static_cast<std::size_t>(i)].is_zero()) {
      v.failing_degree = i;
      return v;
    }
    v.achieved = i;
  }
  return v;
}

WcmVerdict is_weakly_cm(const SimplicialComplex& complex, int n) {
  WcmVerdict out;
  out.n = n;
  out.whole = connectivity_bound(complex, n - 1);
  for (int p = 0; p <= complex.dimension(); ++p) {
    const int required = n - p - 2;
    if (required <= -2) continue;
    for (const auto& sigma : complex.simplices(p)) {
      auto verdict = connectivity_bound(link(complex, sigma), required);
      if (!verdict.passed()) out.failures.push_back({sigma, required, verdict});
    }
  }
  return out;
}

bool simplexwise_injective_check(const SimplicialComplex& source, const SimplicialComplex& target,
                                 const VertexMap& f) {
  bool injective = true;
  for (const auto& s : source.maximal()) {
    Simplex image;
    for (Vertex v : s) image.push_back(apply(f, v));
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());
    require(target.contains(image), ErrorCode::NotSimplicial, "image of a simplex is not a simplex");
    if (image.size() != s.size()) injective = false;
  }
  return injective;
}

// ---------------------------------------------------------------------------
// Lifting

LiftResult inductive_lift(const LiftProblem& problem, const LiftChooser& chooser) {
  LiftResult result;
  result.lift = problem.boundary_lift;

  std::set<Vertex> expected(problem.disk.vertices().begin(), problem.disk.vertices().end());
  std::set<Vertex> given;
  for (const auto& [v, y] : problem.boundary_lift) given.insert(v);
  for (Vertex v : problem.interior_order) {
    require(given.insert(v).second, ErrorCode::InvalidArgument, "interior vertex also has a boundary lift");
  }
  require(given == expected, ErrorCode::InvalidArgument, "boundary and interior vertices must cover the disk");

  auto covers = [&](Vertex v, Vertex y) {
    auto p = problem.projection.find(y);
    return problem.total.contains({y}) && p != problem.projection.end() && p->second == apply(problem.g, v);
  };
  for (const auto& [v, y] : problem.boundary_lift) {
    require(covers(v, y), ErrorCode::InvalidArgument, "boundary lift is not compatible with g");
  }

  // Every disk simplex whose vertices are all lifted must land on a simplex of Y.
  auto lifted_simplices_ok = [&](Vertex v) {
    for (int d = 1; d <= problem.disk.dimension(); ++d) {
      for (const auto& s : problem.disk.simplices(d)) {
        if (!std::binary_search(s.begin(), s.end(), v)) continue;
        Simplex image;
        bool complete = true;
        for (Vertex u : s) {
          auto it = result.lift.find(u);
          if (it == result.lift.end()) {
            complete = false;
            break;
          }
          image.push_back(it->second);
        }
        if (!complete) continue;
        std::sort(image.begin(), image.end());
        image.erase(std::unique(image.begin(), image.end()), image.end());
        if (!problem.total.contains(image)) return false;
      }
    }
    return true;
  };

  for (Vertex v : problem.interior_order) {
    std::vector<Vertex> neighbours;
    for (const auto& e : problem.disk.simplices(1)) {
      Vertex other;
      if (e[0] == v) other = e[1];
      else if (e[1] == v) other = e[0];
      else continue;
      auto it = result.lift.find(other);
      if (it != result.lift.end()) neighbours.push_back(it->second);
    }
    const auto choice = chooser(neighbours, apply(problem.g, v));
    if (!choice) {
      result.failed_vertex = v;
      result.reason = "chooser returned no lift";
      return result;
    }
    if (!covers(v, *choice)) {
      result.failed_vertex = v;
      result.reason = "chosen lift does not cover g";
      return result;
    }
    result.lift[v] = *choice;
    if (!lifted_simplices_ok(v)) {
      result.lift.erase(v);
      result.failed_vertex = v;
      result.reason = "chosen lift breaks simpliciality";
      return result;
    }
  }
  result.ok = is_simplicial_map(problem.disk, problem.total, result.lift);
  if (!result.ok) result.reason = "completed lift is not simplicial";
  return result;
}

// ---------------------------------------------------------------------------
// Presentations

void validate(const Presentation& presentation) {
  for (const auto& word : presentation.relators)
    for (int letter : word)
      require(letter != 0 && static_cast<std::size_t>(std::abs(letter)) <= presentation.generators,
              ErrorCode::InvalidArgument, "relator letter out of range: " + std::to_string(letter));
}

AbelianGroup abelianize(const Presentation& presentation) {
  validate(presentation);
  IntMatrix m(presentation.relators.size(), presentation.generators);
  for (std::size_t r = 0; r < presentation.relators.size(); ++r)
    for (int letter : presentation.relators[r])
      m(r, static_cast<std::size_t>(std::abs(letter) - 1)) += letter > 0 ? 1 : -1;
  const auto factors = invariant_factors(m);
  AbelianGroup g;
  g.rank = presentation.generators - factors.size();
  for (auto f : factors)
    if (f > 1) g.torsion.push_back(f);
  return g;
}

namespace {

std::vector<int> power_of_product(int a, int b, int exponent) {
  std::vector<int> word;
  for (int i = 0; i < exponent; ++i) {
    word.push_back(a);
    word.push_back(b);
  }
  return word;
}

}  // namespace

Presentation symmetric_group_presentation(std::size_t n) {
  require(n >= 1, ErrorCode::InvalidArgument, "symmetric group needs n >= 1");
  Presentation p;
  p.generators = n - 1;
  for (int i = 1; i <= static_cast<int>(n) - 1; ++i) {
    p.relators.push_back({i, i});
    for (int j = i + 1; j <= static_cast<int>(n) - 1; ++j)
      p.relators.push_back(power_of_product(i, j, j == i + 1 ? 3 : 2));
  }
  return p;
}

Presentation hyperoctahedral_presentation(std::size_t n) {
  require(n >= 1, ErrorCode::InvalidArgument, "hyperoctahedral group needs n >= 1");
  // Generator 1 flips the sign of the first letter; generators 2..n are the
  // adjacent transpositions.
  Presentation p;
  p.generators = n;
  const int count = static_cast<int>(n);
  p.relators.push_back({1, 1});
  for (int i = 2; i <= count; ++i) {
    p.relators.push_back({i, i});
    p.relators.push_back(power_of_product(1, i, i == 2 ? 4 : 2));
    for (int j = i + 1; j <= count; ++j) p.relators.push_back(power_of_product(i, j, j == i + 1 ? 3 : 2));
  }
  return p;
}

}  // namespace circlestab
