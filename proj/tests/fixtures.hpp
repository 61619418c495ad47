#pragma once

// Shared builders and independent oracles for the unit and acceptance suites.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "circlestab/complexes.hpp"
#include "circlestab/geometry.hpp"
#include "circlestab/linalg.hpp"
#include "circlestab/random.hpp"
#include "circlestab/specseq.hpp"

namespace fixtures {

using namespace circlestab;

// Examples written around the origin at unit scale are moved into the cube by
// the similarity x -> 0.2 x + (0.5, 0.5, 0.5).
inline Circle placed(const Vec3& center, double radius, const Vec3& normal) {
  return Circle(0.2 * center + Vec3(0.5, 0.5, 0.5), 0.2 * radius, normal);
}

inline IntMatrix random_matrix(KeyedRng& rng, std::size_t rows, std::size_t cols, int lo = -9, int hi = 9) {
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(i, j) = lo + static_cast<std::int64_t>(rng.below(static_cast<std::size_t>(hi - lo + 1)));
  return m;
}

// ---------------------------------------------------------------------------
// Triangulations

inline SimplicialComplex boundary_of_simplex(int n) {
  std::vector<Simplex> faces;
  for (int skip = 0; skip <= n; ++skip) {
    Simplex f;
    for (int v = 0; v <= n; ++v)
      if (v != skip) f.push_back(v);
    faces.push_back(f);
  }
  return SimplicialComplex(faces);
}

inline SimplicialComplex full_simplex(int n) {
  Simplex s(static_cast<std::size_t>(n + 1));
  std::iota(s.begin(), s.end(), 0);
  return SimplicialComplex({s});
}

// Moebius' 7-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7.
inline SimplicialComplex seven_vertex_torus() {
  std::vector<Simplex> faces;
  for (int i = 0; i < 7; ++i) {
    faces.push_back(make_simplex({i, (i + 1) % 7, (i + 3) % 7}));
    faces.push_back(make_simplex({i, (i + 2) % 7, (i + 3) % 7}));
  }
  return SimplicialComplex(faces);
}

inline SimplicialComplex projective_plane_6() {
  const std::vector<Simplex> faces = {{1, 2, 3}, {1, 2, 4}, {1, 3, 5}, {1, 4, 6}, {1, 5, 6},
                                      {2, 3, 6}, {2, 4, 5}, {2, 5, 6}, {3, 4, 5}, {3, 4, 6}};
  return SimplicialComplex(faces);
}

// A 4x4 grid on the square with (x, 0) ~ (x, 4) and (0, y) ~ (4, 4 - y).
inline SimplicialComplex klein_bottle() {
  const int n = 4;
  auto id = [&](int i, int j) {
    if (i == n) {
      i = 0;
      j = (n - j) % n;
    }
    return i * n + (j % n);
  };
  std::vector<Simplex> faces;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      faces.push_back(make_simplex({id(i, j), id(i + 1, j), id(i + 1, j + 1)}));
      faces.push_back(make_simplex({id(i, j), id(i, j + 1), id(i + 1, j + 1)}));
    }
  return SimplicialComplex(faces);
}

// Closed surface check: every edge lies in exactly two triangles.
inline bool is_closed_surface(const SimplicialComplex& k) {
  std::map<Simplex, int> count;
  for (const auto& t : k.simplices(2))
    for (std::size_t i = 0; i < 3; ++i) {
      Simplex e = t;
      e.erase(e.begin() + static_cast<std::ptrdiff_t>(i));
      ++count[e];
    }
  if (count.size() != k.simplices(1).size()) return false;
  return std::all_of(count.begin(), count.end(), [](const auto& e) { return e.second == 2; });
}

inline std::int64_t derangements(int n) {
  std::int64_t a = 1, b = 0;  // D(0), D(1)
  if (n == 0) return a;
  for (int m = 2; m <= n; ++m) {
    const std::int64_t c = (m - 1) * (a + b);
    a = b;
    b = c;
  }
  return b;
}

// ---------------------------------------------------------------------------
// Finite permutation groups: abelianization by brute force.

using Perm = std::vector<int>;

inline Perm compose(const Perm& a, const Perm& b) {  // a after b
  Perm c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[static_cast<std::size_t>(b[i])];
  return c;
}

inline Perm inverse(const Perm& a) {
  Perm b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) b[static_cast<std::size_t>(a[i])] = static_cast<int>(i);
  return b;
}

inline std::set<Perm> closure(const std::vector<Perm>& gens, std::size_t degree) {
  Perm id(degree);
  std::iota(id.begin(), id.end(), 0);
  std::set<Perm> group{id};
  std::vector<Perm> frontier{id};
  while (!frontier.empty()) {
    std::vector<Perm> next;
    for (const auto& g : frontier)
      for (const auto& s : gens) {
        Perm h = compose(s, g);
        if (group.insert(h).second) next.push_back(std::move(h));
      }
    frontier = std::move(next);
  }
  return group;
}

struct FiniteAbelianization {
  std::size_t order = 0;     // |G / [G, G]|
  bool exponent_two = false;  // every g^2 lies in [G, G]
};

inline FiniteAbelianization brute_abelianization(const std::vector<Perm>& gens, std::size_t degree) {
  const auto group = closure(gens, degree);
  std::vector<Perm> commutators;
  std::set<Perm> seen;
  for (const auto& a : group)
    for (const auto& b : gens) {
      Perm c = compose(compose(a, b), compose(inverse(a), inverse(b)));
      if (seen.insert(c).second) commutators.push_back(c);
    }
  // The normal closure of [g, s] over generators s and all g is [G, G].
  std::vector<Perm> conj;
  for (const auto& c : commutators) conj.push_back(c);
  const auto derived = closure(conj, degree);
  FiniteAbelianization out;
  out.order = group.size() / derived.size();
  out.exponent_two = std::all_of(group.begin(), group.end(), [&](const Perm& g) { return derived.count(compose(g, g)) > 0; });
  return out;
}

inline std::vector<Perm> symmetric_generators(std::size_t n) {
  std::vector<Perm> gens;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Perm p(n);
    std::iota(p.begin(), p.end(), 0);
    std::swap(p[i], p[i + 1]);
    gens.push_back(p);
  }
  return gens;
}

// Signed permutations of {1..n} acting on {+-1..+-n} (points 0..2n-1).
inline std::vector<Perm> hyperoctahedral_generators(std::size_t n) {
  std::vector<Perm> gens;
  Perm flip(2 * n);
  std::iota(flip.begin(), flip.end(), 0);
  std::swap(flip[0], flip[n]);
  gens.push_back(flip);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Perm p(2 * n);
    std::iota(p.begin(), p.end(), 0);
    std::swap(p[i], p[i + 1]);
    std::swap(p[n + i], p[n + i + 1]);
    gens.push_back(p);
  }
  return gens;
}

// Does the permutation assignment satisfy every relator of the presentation?
inline bool satisfies(const Presentation& p, const std::vector<Perm>& gens, std::size_t degree) {
  Perm id(degree);
  std::iota(id.begin(), id.end(), 0);
  for (const auto& word : p.relators) {
    Perm acc = id;
    for (int letter : word) {
      const Perm& g = gens[static_cast<std::size_t>(std::abs(letter) - 1)];
      acc = compose(acc, letter > 0 ? g : inverse(g));
    }
    if (acc != id) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Diagrams

// Random subcomplex of `parent`: keeps each maximal face with probability 3/5,
// sometimes replaced by a random proper face.
inline SimplicialComplex random_subcomplex(const SimplicialComplex& parent, KeyedRng& rng) {
  std::vector<Simplex> faces;
  for (const auto& m : parent.maximal()) {
    if (rng.uniform() >= 0.6) continue;
    Simplex s = m;
    if (s.size() > 1 && rng.uniform() < 0.3) s.erase(s.begin() + static_cast<std::ptrdiff_t>(rng.below(s.size())));
    faces.push_back(s);
  }
  return SimplicialComplex(faces);
}

inline SimplicialComplex intersection(const std::vector<const SimplicialComplex*>& ks) {
  std::vector<Simplex> common;
  const auto& first = *ks.front();
  for (int d = 0; d <= first.dimension(); ++d)
    for (const auto& s : first.simplices(d))
      if (std::all_of(ks.begin(), ks.end(), [&](const SimplicialComplex* k) { return k->contains(s); }))
        common.push_back(s);
  return SimplicialComplex(common);
}

inline SimplicialComplex random_complex(KeyedRng& rng, int vertices, int faces) {
  std::vector<Simplex> out;
  for (int v = 0; v < vertices; ++v) out.push_back({v});
  for (int f = 0; f < faces; ++f) {
    const std::size_t size = 2 + rng.below(2);
    std::set<int> s;
    while (s.size() < size) s.insert(static_cast<int>(rng.below(static_cast<std::size_t>(vertices))));
    out.emplace_back(s.begin(), s.end());
  }
  return SimplicialComplex(out);
}

inline std::size_t simplex_count(const SimplicialComplex& k) {
  std::size_t n = 0;
  for (auto c : k.f_vector()) n += c;
  return n;
}

// K_p is the disjoint union over the p-cells x of a semisimplicial set of
// subcomplexes L_x of a base complex M with L_x inside L_{d_i x}. Vertex v of
// L_x is encoded as 100 * (index of x) + v and the face maps are the
// inclusions. The augmentation (when present) lands in M itself.
struct DiagramRecipe {
  Diagram diagram;
  std::vector<std::vector<SimplicialComplex>> pieces;  // pieces[p][x]
};

inline DiagramRecipe random_diagram(std::uint64_t seed, std::size_t max_simplices = 20) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    KeyedRng rng(seed, attempt);
    // The indexing semisimplicial set: a random ordered flag space.
    const int nv = 1 + static_cast<int>(rng.below(3));
    std::vector<Vertex> verts(static_cast<std::size_t>(nv));
    std::iota(verts.begin(), verts.end(), 0);
    std::vector<std::pair<Vertex, Vertex>> rel;
    for (int a = 0; a < nv; ++a)
      for (int b = a + 1; b < nv; ++b)
        if (rng.uniform() < 0.75) rel.push_back(rng.uniform() < 0.5 ? std::pair{a, b} : std::pair{b, a});
    const OrderedFlagSpace index(verts, rel);
    const SemiSimplicialSet x = index.to_semisimplicial();
    const int top = std::min(x.dimension(), 2);

    const bool augmented = rng.uniform() < 0.9;
    const SimplicialComplex base = random_complex(rng, 3 + static_cast<int>(rng.below(3)), 2 + static_cast<int>(rng.below(4)));
    DiagramRecipe r;
    r.pieces.resize(static_cast<std::size_t>(top + 1));
    for (int p = 0; p <= top; ++p)
      for (std::size_t c = 0; c < x.count(p); ++c) {
        if (p == 0) {
          r.pieces[0].push_back(random_subcomplex(base, rng));
          continue;
        }
        std::vector<const SimplicialComplex*> parents;
        for (int i = 0; i <= p; ++i)
          parents.push_back(&r.pieces[static_cast<std::size_t>(p - 1)][x.face(p, c, static_cast<std::size_t>(i))]);
        const SimplicialComplex meet = intersection(parents);
        r.pieces[static_cast<std::size_t>(p)].push_back(rng.uniform() < 0.5 ? meet : random_subcomplex(meet, rng));
      }

    auto encode = [](std::size_t cell, Vertex v) { return static_cast<Vertex>(100 * cell) + v; };
    Diagram& d = r.diagram;
    d.columns.push_back(augmented ? base : SimplicialComplex{});
    bool small = true;
    for (int p = 0; p <= top; ++p) {
      std::vector<Simplex> faces;
      std::vector<Vertex> extra;
      for (std::size_t c = 0; c < r.pieces[static_cast<std::size_t>(p)].size(); ++c) {
        const auto& piece = r.pieces[static_cast<std::size_t>(p)][c];
        for (const auto& m : piece.maximal()) {
          Simplex s;
          for (Vertex v : m) s.push_back(encode(c, v));
          faces.push_back(s);
        }
      }
      d.columns.emplace_back(faces, extra);
      small = small && simplex_count(d.columns.back()) <= max_simplices;
    }
    if (!small) continue;
    d.faces.resize(static_cast<std::size_t>(top + 1));
    for (int p = 0; p <= top; ++p) {
      const auto& cells = r.pieces[static_cast<std::size_t>(p)];
      if (p == 0) {
        if (!augmented) continue;
        VertexMap eps;
        for (std::size_t c = 0; c < cells.size(); ++c)
          for (Vertex v : cells[c].vertices()) eps[encode(c, v)] = v;
        d.faces[0].push_back(eps);
        continue;
      }
      for (int i = 0; i <= p; ++i) {
        VertexMap f;
        for (std::size_t c = 0; c < cells.size(); ++c)
          for (Vertex v : cells[c].vertices()) f[encode(c, v)] = encode(x.face(p, c, static_cast<std::size_t>(i)), v);
        d.faces[static_cast<std::size_t>(p)].push_back(f);
      }
    }
    return r;
  }
}

inline DiagramMap identity_map(const Diagram& d) {
  DiagramMap t;
  for (const auto& k : d.columns) {
    VertexMap m;
    for (Vertex v : k.vertices()) m[v] = v;
    t.columns.push_back(m);
  }
  return t;
}

// X_0 = {a, b}, X_1 = {e} with d_0 e = b, d_1 e = a, all augmented to a point:
// the realization is an interval, so the relative homology vanishes.
inline Diagram interval_diagram() {
  Diagram d;
  d.columns = {SimplicialComplex({{0}}), SimplicialComplex({{0}, {1}}), SimplicialComplex({{0}})};
  d.faces = {{VertexMap{{0, 0}, {1, 0}}}, {VertexMap{{0, 1}}, VertexMap{{0, 0}}}};
  return d;
}

// Columns of ordered injective words on {0..m-1} as discrete complexes (word
// codes), augmented to a point. Faces delete a letter. Columns past the
// longest word are empty so that every alphabet gives top + 2 columns.
struct WordDiagram {
  Diagram diagram;
  std::vector<std::map<std::vector<int>, Vertex>> codes;  // codes[p][word]
};

inline WordDiagram word_diagram(int m, int top) {
  WordDiagram w;
  std::vector<int> letters(static_cast<std::size_t>(m));
  std::iota(letters.begin(), letters.end(), 0);
  const auto tuples = injective_tuples(letters);
  w.diagram.columns.push_back(SimplicialComplex({{0}}));
  const int last = top;
  const std::vector<std::vector<int>> none;
  for (int p = 0; p <= last; ++p) {
    std::map<std::vector<int>, Vertex> code;
    std::vector<Simplex> pts;
    for (const auto& word : p < m ? tuples[static_cast<std::size_t>(p)] : none) {
      // Codes depend on the word only, so alphabet inclusions are identities on codes.
      Vertex c = 0;
      for (int l : word) c = c * 10 + (l + 1);
      code[word] = c;
      pts.push_back({c});
    }
    w.codes.push_back(code);
    w.diagram.columns.emplace_back(pts);
  }
  w.diagram.faces.resize(static_cast<std::size_t>(last + 1));
  for (int p = 0; p <= last; ++p) {
    if (p == 0) {
      VertexMap eps;
      for (const auto& [word, c] : w.codes[0]) eps[c] = 0;
      w.diagram.faces[0].push_back(eps);
      continue;
    }
    for (int i = 0; i <= p; ++i) {
      VertexMap f;
      for (const auto& [word, c] : w.codes[static_cast<std::size_t>(p)]) {
        std::vector<int> shorter = word;
        shorter.erase(shorter.begin() + i);
        f[c] = w.codes[static_cast<std::size_t>(p - 1)].at(shorter);
      }
      w.diagram.faces[static_cast<std::size_t>(p)].push_back(f);
    }
  }
  return w;
}

// Homology of the total complex assembled directly from the columns, without
// going through the library's total complex or filtration code.
inline std::map<int, std::size_t> total_homology(const Diagram& d, const Coefficients& field, bool* square_zero = nullptr) {
  if (square_zero) *square_zero = true;
  const int top = d.top();
  std::vector<ChainComplex> cols;
  for (int p = -1; p <= top; ++p) cols.push_back(chain_complex(d.column(p)));
  auto cdim = [&](int p, int q) -> std::size_t {
    const auto& c = cols[static_cast<std::size_t>(p + 1)];
    return q < 0 || q > c.max_degree() ? 0 : c.dim(q);
  };
  int qmax = 0;
  for (const auto& c : cols) qmax = std::max(qmax, c.max_degree());
  const int n_lo = -1, n_hi = top + qmax + 1;

  auto offsets = [&](int n) {
    std::map<int, std::size_t> off;  // p -> offset
    std::size_t at = 0;
    for (int p = -1; p <= top; ++p) {
      off[p] = at;
      at += cdim(p, n - p);
    }
    off[top + 1] = at;
    return off;
  };
  auto boundary = [&](int n) {
    const auto src = offsets(n), dst = offsets(n - 1);
    IntMatrix m(dst.at(top + 1), src.at(top + 1));
    for (int p = -1; p <= top; ++p) {
      const int q = n - p;
      if (cdim(p, q) == 0) continue;
      if (q >= 1) {
        const IntMatrix* b = cols[static_cast<std::size_t>(p + 1)].d(q);
        if (b)
          for (std::size_t i = 0; i < b->rows(); ++i)
            for (std::size_t j = 0; j < b->cols(); ++j) m(dst.at(p) + i, src.at(p) + j) += (*b)(i, j);
      }
      if (p >= 0 && cdim(p - 1, q) > 0) {
        const auto& maps = d.faces[static_cast<std::size_t>(p)];
        const std::int64_t sq = q % 2 == 0 ? 1 : -1;
        for (std::size_t i = 0; i < maps.size(); ++i) {
          const IntMatrix h = chain_map(d.column(p), d.column(p - 1), maps[i], q);
          const std::int64_t s = sq * (p == 0 || i % 2 == 0 ? 1 : -1);
          for (std::size_t a = 0; a < h.rows(); ++a)
            for (std::size_t b = 0; b < h.cols(); ++b) m(dst.at(p - 1) + a, src.at(p) + b) += s * h(a, b);
        }
      }
    }
    return m;
  };
  std::map<int, std::size_t> ranks, dims, out;
  for (int n = n_lo; n <= n_hi + 1; ++n) {
    dims[n] = offsets(n).at(top + 1);
    const IntMatrix b = boundary(n);
    ranks[n] = b.rows() == 0 || b.cols() == 0 ? 0 : matrix_rank(b, field);
    if (n > n_lo) {
      const IntMatrix prev = boundary(n - 1);
      if (square_zero && prev.cols() > 0 && b.cols() > 0 && prev.rows() > 0 && !multiply(prev, b).is_zero())
        *square_zero = false;
    }
  }
  for (int n = n_lo; n <= n_hi; ++n) out[n] = dims[n] - ranks[n] - ranks[n + 1];
  return out;
}

}  // namespace fixtures
