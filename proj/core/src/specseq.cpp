#include "circlestab/specseq.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>

#include "circlestab/error.hpp"
#include "circlestab/field.hpp"

namespace circlestab {

namespace {

Vertex apply_map(const VertexMap& f, Vertex v) {
  auto it = f.find(v);
  require(it != f.end(), ErrorCode::NotSimplicial, "face map undefined on vertex " + std::to_string(v));
  return it->second;
}

void check_map(const SimplicialComplex& source, const SimplicialComplex& target, const VertexMap& f,
               const std::string& what) {
  for (Vertex v : source.vertices()) {
    const Vertex w = apply_map(f, v);
    require(target.contains({w}), ErrorCode::NotSimplicial, what + " sends a vertex outside its target");
  }
  require(is_simplicial_map(source, target, f), ErrorCode::NotSimplicial, what + " is not simplicial");
}

IntMatrix add_scaled(IntMatrix a, const IntMatrix& b, std::int64_t s) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) += s * b(i, j);
  return a;
}

// Boundary from degree n to n - 1 with its full shape, zero when absent.
IntMatrix boundary_or_zero(const ChainComplex& c, int n) {
  if (const IntMatrix* m = c.d(n)) return *m;
  return IntMatrix(c.dim(n - 1), c.dim(n));
}

IntMatrix horizontal_or_zero(const ChainDiagram& cd, int p, int q) {
  const std::size_t rows = p >= 0 ? cd.columns[static_cast<std::size_t>(p)].dim(q) : 0;
  const std::size_t cols = cd.columns[static_cast<std::size_t>(p + 1)].dim(q);
  const auto& h = cd.horizontal[static_cast<std::size_t>(p + 1)];
  if (q >= 0 && static_cast<std::size_t>(q) < h.size()) {
    const IntMatrix& m = h[static_cast<std::size_t>(q)];
    require(m.rows() == rows && m.cols() == cols, ErrorCode::InvalidArgument, "horizontal map has the wrong shape");
    return m;
  }
  return IntMatrix(rows, cols);
}

// Copies `src` into `dst` at (r0, c0), scaled by s.
void place(IntMatrix& dst, const IntMatrix& src, std::size_t r0, std::size_t c0, std::int64_t s = 1) {
  for (std::size_t i = 0; i < src.rows(); ++i)
    for (std::size_t j = 0; j < src.cols(); ++j) dst(r0 + i, c0 + j) += s * src(i, j);
}

ChainComplex assemble(int min_degree, const std::vector<std::size_t>& dims,
                      const std::function<IntMatrix(int)>& boundary) {
  ChainComplex c;
  c.min_degree = min_degree;
  c.dims = dims;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const int n = min_degree + static_cast<int>(k);
    if (k == 0)
      c.boundary.emplace_back(0, dims[0]);
    else
      c.boundary.push_back(boundary(n));
  }
  return c;
}

template <class Fn>
decltype(auto) with_field(const Coefficients& coefficients, Fn&& fn) {
  require(coefficients.is_field(), ErrorCode::FieldOnly, "spectral sequence pages need field coefficients");
  if (coefficients.kind == Coefficients::Kind::Rationals) return fn(RationalField{});
  return fn(PrimeField(coefficients.prime));
}

// Row-echelon basis built one vector at a time. Rows are normalized to a unit
// pivot and reduced against every earlier row, so reducing a vector through
// the rows in order clears all pivots.
template <class F>
struct Echelon {
  using E = typename F::Elem;
  using Vec = std::vector<E>;

  std::vector<Vec> rows;
  std::vector<std::size_t> pivots;
  std::vector<int> rep;  // index among representatives, -1 for the quotient part
  std::size_t reps = 0;

  void reduce(const F& f, Vec& v, std::vector<E>* coords) const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::size_t piv = pivots[i];
      if (f.is_zero(v[piv])) continue;
      const E c = v[piv];
      const Vec& row = rows[i];
      for (std::size_t j = 0; j < v.size(); ++j)
        if (!f.is_zero(row[j])) v[j] = f.sub(v[j], f.mul(c, row[j]));
      if (coords && rep[i] >= 0) (*coords)[static_cast<std::size_t>(rep[i])] = c;
    }
  }

  bool insert(const F& f, Vec v, bool representative) {
    reduce(f, v, nullptr);
    std::size_t piv = 0;
    while (piv < v.size() && f.is_zero(v[piv])) ++piv;
    if (piv == v.size()) return false;
    const E inv = f.inv(v[piv]);
    for (auto& x : v) x = f.mul(x, inv);
    rows.push_back(std::move(v));
    pivots.push_back(piv);
    rep.push_back(representative ? static_cast<int>(reps++) : -1);
    return true;
  }

  const Vec& representative(std::size_t k) const {
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rep[i] == static_cast<int>(k)) return rows[i];
    fail(ErrorCode::InvalidArgument, "representative index out of range");
  }

  // Coordinates of v in the representative basis, modulo the quotient part.
  std::vector<E> coordinates(const F& f, Vec v, const char* what) const {
    std::vector<E> coords(reps, f.zero());
    reduce(f, v, &coords);
    for (const auto& x : v)
      require(f.is_zero(x), ErrorCode::InvalidArgument, std::string(what) + " left its target subspace");
    return coords;
  }
};

template <class F>
std::vector<typename F::Elem> apply(const F& f, const DenseMatrix<typename F::Elem>& m,
                                    const std::vector<typename F::Elem>& x) {
  std::vector<typename F::Elem> y(m.rows, f.zero());
  for (std::size_t j = 0; j < m.cols; ++j) {
    if (f.is_zero(x[j])) continue;
    for (std::size_t i = 0; i < m.rows; ++i)
      if (!f.is_zero(m(i, j))) y[i] = f.add(y[i], f.mul(m(i, j), x[j]));
  }
  return y;
}

template <class F>
std::vector<std::vector<typename F::Elem>> rows_of(const DenseMatrix<typename F::Elem>& m) {
  std::vector<std::vector<typename F::Elem>> out(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) out[i].assign(m.data.begin() + i * m.cols, m.data.begin() + (i + 1) * m.cols);
  return out;
}

// Induced maps between subquotients, as matrices (target reps x source reps),
// keyed by the source entry.
template <class F>
struct Differentials {
  using Mat = DenseMatrix<typename F::Elem>;
  std::map<std::pair<int, int>, Mat> maps;         // (p, q) -> matrix
  std::map<std::pair<int, int>, std::size_t> dims;  // (p, q) -> dim

  void finish(const F& f, Page& page, int r) {
    page.dims = dims;
    for (const auto& [key, m] : maps) {
      page.rank_out[key] = rank(f, m);
      const auto [p, q] = key;
      auto next = maps.find({p - r, q + r - 1});
      if (next == maps.end() || m.rows == 0 || m.cols == 0) continue;
      require(multiply(f, next->second, m).data ==
                  std::vector<typename F::Elem>(next->second.rows * m.cols, f.zero()),
              ErrorCode::InvalidArgument, "page differential does not square to zero");
    }
  }
};

int column_q_max(const std::vector<ChainComplex>& columns) {
  int q_max = -1;
  for (const auto& c : columns) q_max = std::max(q_max, c.max_degree());
  return q_max;
}

// E^r from the column filtration of the total complex:
//   Z^r_p = {x in F_p : Dx in F_{p-r}},  E^r_p = Z^r_p / (Z^{r-1}_{p-1} + D Z^{r-1}_{p+r-1}).
template <class F>
class FiltrationEngine {
 public:
  using E = typename F::Elem;
  using Vec = std::vector<E>;
  using Mat = DenseMatrix<E>;

  FiltrationEngine(F field, const TotalComplex& total) : f_(std::move(field)), t_(total) {
    for (int n = t_.chains.min_degree; n <= t_.chains.max_degree() + 1; ++n)
      d_[n] = to_field(f_, boundary_or_zero(t_.chains, n));
  }

  Page page(int r, const Coefficients& coefficients, int q_max) {
    require(r >= 1, ErrorCode::InvalidArgument, "pages start at r = 1");
    Page page;
    page.r = r;
    page.coefficients = coefficients;
    page.top = t_.top;
    page.q_max = q_max;
    std::map<std::pair<int, int>, Echelon<F>> entries;
    Differentials<F> out;
    for (int p = -1; p <= t_.top; ++p)
      for (int q = 0; q <= q_max; ++q) {
        entries[{p, q}] = entry(r, p, p + q);
        out.dims[{p, q}] = entries[{p, q}].reps;
      }
    for (int p = -1; p <= t_.top; ++p)
      for (int q = 0; q <= q_max; ++q) {
        const auto& src = entries[{p, q}];
        const int tp = p - r, tq = q + r - 1;
        auto tgt = entries.find({tp, tq});
        const std::size_t rows = tgt == entries.end() ? 0 : tgt->second.reps;
        Mat m(rows, src.reps, f_.zero());
        const int n = p + q;
        for (std::size_t k = 0; k < src.reps; ++k) {
          const Vec y = apply(f_, d(n), src.representative(k));
          if (tgt == entries.end()) {
            for (const auto& x : y)
              require(f_.is_zero(x), ErrorCode::InvalidArgument, "differential leaves the page");
            continue;
          }
          const auto coords = tgt->second.coordinates(f_, y, "page differential");
          for (std::size_t i = 0; i < rows; ++i) m(i, k) = coords[i];
        }
        out.maps[{p, q}] = std::move(m);
      }
    out.finish(f_, page, r);
    return page;
  }

 private:
  const Mat& d(int n) {
    auto it = d_.find(n);
    if (it == d_.end()) it = d_.emplace(n, Mat(t_.chains.dim(n - 1), t_.chains.dim(n), f_.zero())).first;
    return it->second;
  }

  // Z^r_p in T_n as rows of length dim T_n.
  std::vector<Vec> cycles(int r, int p, int n) {
    const std::size_t full = t_.chains.dim(n);
    const std::size_t f = t_.filtration_dim(n, p);
    if (f == 0) return {};
    const Mat& dn = d(n);
    const std::size_t start = t_.filtration_dim(n - 1, p - r);
    Mat sub(dn.rows - start, f, f_.zero());
    for (std::size_t i = start; i < dn.rows; ++i)
      for (std::size_t j = 0; j < f; ++j) sub(i - start, j) = dn(i, j);
    const Mat null = nullspace(f_, std::move(sub));
    std::vector<Vec> out(null.rows, Vec(full, f_.zero()));
    for (std::size_t i = 0; i < null.rows; ++i)
      for (std::size_t j = 0; j < f; ++j) out[i][j] = null(i, j);
    return out;
  }

  Echelon<F> entry(int r, int p, int n) {
    Echelon<F> e;
    for (auto& v : cycles(r - 1, p - 1, n)) e.insert(f_, std::move(v), false);
    const Mat& up = d(n + 1);
    for (const auto& v : cycles(r - 1, p + r - 1, n + 1)) e.insert(f_, apply(f_, up, v), false);
    for (auto& v : cycles(r, p, n)) e.insert(f_, std::move(v), true);
    return e;
  }

  F f_;
  const TotalComplex& t_;
  std::map<int, Mat> d_;
};

template <class F>
Page column_e1(const F& f, const ChainDiagram& cd, const Coefficients& coefficients) {
  using Mat = DenseMatrix<typename F::Elem>;
  Page page;
  page.r = 1;
  page.coefficients = coefficients;
  page.top = cd.top();
  page.q_max = column_q_max(cd.columns);
  std::map<std::pair<int, int>, Echelon<F>> homology_bases;
  Differentials<F> out;
  for (int p = -1; p <= page.top; ++p) {
    const ChainComplex& c = cd.columns[static_cast<std::size_t>(p + 1)];
    for (int q = 0; q <= page.q_max; ++q) {
      Echelon<F> e;
      const Mat up = to_field(f, boundary_or_zero(c, q + 1));
      for (std::size_t j = 0; j < up.cols; ++j) {
        std::vector<typename F::Elem> col(up.rows);
        for (std::size_t i = 0; i < up.rows; ++i) col[i] = up(i, j);
        e.insert(f, std::move(col), false);
      }
      if (c.dim(q) > 0)
        for (auto& z : rows_of<F>(nullspace(f, to_field(f, boundary_or_zero(c, q))))) e.insert(f, std::move(z), true);
      out.dims[{p, q}] = e.reps;
      homology_bases[{p, q}] = std::move(e);
    }
  }
  for (int p = -1; p <= page.top; ++p)
    for (int q = 0; q <= page.q_max; ++q) {
      const auto& src = homology_bases[{p, q}];
      if (p == -1) {
        out.maps[{p, q}] = Mat(0, src.reps, f.zero());
        continue;
      }
      const auto& tgt = homology_bases[{p - 1, q}];
      const Mat h = to_field(f, horizontal_or_zero(cd, p, q));
      Mat m(tgt.reps, src.reps, f.zero());
      const std::int64_t sign = q % 2 == 0 ? 1 : -1;
      for (std::size_t k = 0; k < src.reps; ++k) {
        const auto coords = tgt.coordinates(f, apply(f, h, src.representative(k)), "horizontal map");
        for (std::size_t i = 0; i < tgt.reps; ++i) m(i, k) = f.mul(f.from_int(sign), coords[i]);
      }
      out.maps[{p, q}] = std::move(m);
    }
  out.finish(f, page, 1);
  return page;
}

}  // namespace

// ---------------------------------------------------------------------------

void validate(const Diagram& diagram) {
  require(!diagram.columns.empty(), ErrorCode::InvalidArgument, "a diagram needs the augmentation column");
  const int top = diagram.top();
  require(diagram.faces.size() == static_cast<std::size_t>(top + 1), ErrorCode::InvalidArgument,
          "one list of face maps per column p >= 0 is required");
  if (top < 0) return;
  const auto& target = diagram.column(-1);
  const auto& aug = diagram.faces[0];
  if (target.empty()) {
    require(aug.empty() || diagram.column(0).empty(), ErrorCode::InvalidArgument,
            "augmentation into an empty column");
  } else {
    require(aug.size() == 1, ErrorCode::InvalidArgument, "column 0 needs exactly one augmentation map");
  }
  if (aug.size() == 1) check_map(diagram.column(0), target, aug[0], "augmentation");
  for (int p = 1; p <= top; ++p) {
    const auto& maps = diagram.faces[static_cast<std::size_t>(p)];
    require(maps.size() == static_cast<std::size_t>(p + 1), ErrorCode::InvalidArgument,
            "column " + std::to_string(p) + " needs " + std::to_string(p + 1) + " face maps");
    for (std::size_t i = 0; i < maps.size(); ++i)
      check_map(diagram.column(p), diagram.column(p - 1), maps[i],
                "face d" + std::to_string(i) + " of column " + std::to_string(p));
  }
  // Simplicial identities d_i d_j = d_{j-1} d_i (i < j), and e d_0 = e d_1.
  for (int p = 2; p <= top; ++p) {
    const auto& outer = diagram.faces[static_cast<std::size_t>(p - 1)];
    const auto& inner = diagram.faces[static_cast<std::size_t>(p)];
    for (Vertex v : diagram.column(p).vertices())
      for (int j = 1; j <= p; ++j)
        for (int i = 0; i < j; ++i)
          require(apply_map(outer[static_cast<std::size_t>(i)], apply_map(inner[static_cast<std::size_t>(j)], v)) ==
                      apply_map(outer[static_cast<std::size_t>(j - 1)], apply_map(inner[static_cast<std::size_t>(i)], v)),
                  ErrorCode::InvalidArgument,
                  "simplicial identity fails in column " + std::to_string(p) + " at vertex " + std::to_string(v));
  }
  if (top >= 1 && aug.size() == 1)
    for (Vertex v : diagram.column(1).vertices())
      require(apply_map(aug[0], apply_map(diagram.faces[1][0], v)) == apply_map(aug[0], apply_map(diagram.faces[1][1], v)),
              ErrorCode::InvalidArgument, "augmentation does not equalize the faces of column 1");
}

ChainDiagram chain_diagram(const Diagram& diagram) {
  validate(diagram);
  ChainDiagram cd;
  for (const auto& k : diagram.columns) cd.columns.push_back(chain_complex(k));
  cd.horizontal.resize(diagram.columns.size());
  for (int p = 0; p <= diagram.top(); ++p) {
    const auto& src = diagram.column(p);
    const auto& tgt = diagram.column(p - 1);
    auto& h = cd.horizontal[static_cast<std::size_t>(p + 1)];
    const auto& maps = diagram.faces[static_cast<std::size_t>(p)];
    for (int q = 0; q <= src.dimension(); ++q) {
      IntMatrix m(tgt.simplices(q).size(), src.simplices(q).size());
      for (std::size_t i = 0; i < maps.size(); ++i)
        m = add_scaled(std::move(m), chain_map(src, tgt, maps[i], q), i % 2 == 0 ? 1 : -1);
      h.push_back(std::move(m));
    }
  }
  return cd;
}

std::size_t TotalComplex::filtration_dim(int n, int p) const {
  if (n < -1 || n + 1 >= static_cast<int>(blocks.size())) return 0;
  std::size_t total = 0;
  for (const auto& b : blocks[static_cast<std::size_t>(n + 1)])
    if (b.p <= p) total += b.size;
  return total;
}

TotalComplex total_complex(const ChainDiagram& cd) {
  require(!cd.columns.empty() && cd.horizontal.size() == cd.columns.size(), ErrorCode::InvalidArgument,
          "chain diagram shape mismatch");
  TotalComplex t;
  t.top = cd.top();
  int n_max = -1;
  for (int p = -1; p <= t.top; ++p) {
    const int m = cd.columns[static_cast<std::size_t>(p + 1)].max_degree();
    if (m >= 0) n_max = std::max(n_max, p + m);
  }
  std::vector<std::size_t> dims;
  for (int n = -1; n <= n_max; ++n) {
    std::vector<TotalComplex::Block> row;
    std::size_t offset = 0;
    for (int p = -1; p <= t.top; ++p) {
      const int q = n - p;
      if (q < 0) continue;
      const std::size_t size = cd.columns[static_cast<std::size_t>(p + 1)].dim(q);
      row.push_back({p, q, offset, size});
      offset += size;
    }
    t.blocks.push_back(std::move(row));
    dims.push_back(offset);
  }
  auto block_of = [&](int n, int p) -> const TotalComplex::Block* {
    for (const auto& b : t.blocks[static_cast<std::size_t>(n + 1)])
      if (b.p == p) return &b;
    return nullptr;
  };
  t.chains = assemble(-1, dims, [&](int n) {
    IntMatrix m(dims[static_cast<std::size_t>(n)], dims[static_cast<std::size_t>(n + 1)]);
    for (const auto& b : t.blocks[static_cast<std::size_t>(n + 1)]) {
      if (b.size == 0) continue;
      const ChainComplex& col = cd.columns[static_cast<std::size_t>(b.p + 1)];
      if (const auto* below = block_of(n - 1, b.p); below && b.q >= 1)
        place(m, boundary_or_zero(col, b.q), below->offset, b.offset);
      if (b.p >= 0)
        if (const auto* left = block_of(n - 1, b.p - 1))
          place(m, horizontal_or_zero(cd, b.p, b.q), left->offset, b.offset, b.q % 2 == 0 ? 1 : -1);
    }
    return m;
  });
  require(t.chains.is_valid(), ErrorCode::InvalidArgument, "total differential does not square to zero");
  return t;
}

TotalComplex total_complex(const Diagram& diagram) { return total_complex(chain_diagram(diagram)); }

// ---------------------------------------------------------------------------

std::size_t Page::dim(int p, int q) const {
  auto it = dims.find({p, q});
  return it == dims.end() ? 0 : it->second;
}

std::size_t Page::rank_from(int p, int q) const {
  auto it = rank_out.find({p, q});
  return it == rank_out.end() ? 0 : it->second;
}

std::size_t Page::total(int n) const {
  std::size_t sum = 0;
  for (const auto& [key, d] : dims)
    if (key.first + key.second == n) sum += d;
  return sum;
}

bool Page::is_zero() const {
  return std::all_of(dims.begin(), dims.end(), [](const auto& e) { return e.second == 0; });
}

bool Page::differential_zero() const {
  return std::all_of(rank_out.begin(), rank_out.end(), [](const auto& e) { return e.second == 0; });
}

Page e1(const ChainDiagram& diagram, const Coefficients& field) {
  return with_field(field, [&](const auto& f) { return column_e1(f, diagram, field); });
}

Page e1(const Diagram& diagram, const Coefficients& field) { return e1(chain_diagram(diagram), field); }

Page turn_page(const Page& page, const TotalComplex& total) {
  return with_field(page.coefficients, [&](const auto& f) {
    FiltrationEngine engine(f, total);
    const Page here = engine.page(page.r, page.coefficients, page.q_max);
    require(here.dims == page.dims && here.rank_out == page.rank_out, ErrorCode::InvalidArgument,
            "page does not match the filtration of the total complex");
    Page next = engine.page(page.r + 1, page.coefficients, page.q_max);
    const int r = page.r;
    for (const auto& [key, d] : page.dims) {
      const auto [p, q] = key;
      const std::size_t in = page.rank_from(p + r, q - r + 1);
      const std::size_t expected = d - page.rank_from(p, q) - in;
      if (next.dim(p, q) != expected) {
        std::ostringstream os;
        os << "E^" << r + 1 << "_{" << p << "," << q << "} has dimension " << next.dim(p, q)
           << " but the homology of the previous page has " << expected;
        fail(ErrorCode::InvalidArgument, os.str());
      }
    }
    return next;
  });
}

namespace {

// Cone of the augmentation Tot(columns p >= 0) -> C(K_{-1}); its H_{n+1} is
// the relative homology the spectral sequence converges to in degree n.
ChainComplex augmentation_cone(const ChainDiagram& cd) {
  ChainDiagram upper = cd;
  upper.columns[0] = ChainComplex{};
  upper.horizontal[0].clear();
  if (upper.horizontal.size() > 1) upper.horizontal[1].clear();
  const TotalComplex t = total_complex(upper);
  const ChainComplex& base = cd.columns[0];
  const int m_max = std::max(t.chains.max_degree() + 1, base.max_degree());
  std::vector<std::size_t> dims;
  for (int m = 0; m <= std::max(m_max, 0); ++m) dims.push_back(t.chains.dim(m - 1) + base.dim(m));
  ChainComplex cone = assemble(0, dims, [&](int m) {
    const std::size_t a_src = t.chains.dim(m - 1), a_tgt = t.chains.dim(m - 2);
    IntMatrix d(a_tgt + base.dim(m - 1), a_src + base.dim(m));
    if (m >= 1) place(d, boundary_or_zero(t.chains, m - 1), 0, 0, -1);
    // The augmentation only sees the p = 0 block of T_{m-1}.
    for (const auto& b : t.blocks.size() > static_cast<std::size_t>(m) ? t.blocks[static_cast<std::size_t>(m)]
                                                                        : std::vector<TotalComplex::Block>{})
      if (b.p == 0 && b.size > 0) place(d, horizontal_or_zero(cd, 0, b.q), a_tgt, b.offset);
    place(d, boundary_or_zero(base, m), a_tgt, a_src);
    return d;
  });
  require(cone.is_valid(), ErrorCode::InvalidArgument, "augmentation cone does not square to zero");
  return cone;
}

}  // namespace

Convergence converge(const ChainDiagram& diagram, const Coefficients& field) {
  Convergence result;
  result.pages.push_back(e1(diagram, field));
  const TotalComplex total = total_complex(diagram);
  const int bound = diagram.top() + 2 + std::max(result.pages.back().q_max, 0) + 2;
  // Every d^r with r >= N + 2 leaves the first column, so it is zero there.
  const int settle = diagram.top() + 2;
  while (result.pages.back().r < settle || !result.pages.back().differential_zero()) {
    require(result.pages.back().r <= bound, ErrorCode::InvalidArgument, "spectral sequence failed to stabilize");
    result.pages.push_back(turn_page(result.pages.back(), total));
  }
  result.stabilized_at = result.pages.back().r;
  for (auto it = result.pages.rbegin(); it != result.pages.rend() && it->differential_zero(); ++it)
    result.stabilized_at = it->r;

  const ChainComplex cone = augmentation_cone(diagram);
  const auto h = homology(cone, 0, cone.max_degree(), field);
  result.n_min = -1;
  for (const auto& g : h) result.target.push_back(g.rank);
  const Page& inf = result.e_infinity();
  const int n_hi = std::max(static_cast<int>(result.target.size()) - 2, total.chains.max_degree());
  result.match = true;
  for (int n = -1; n <= n_hi; ++n) {
    const std::size_t want = static_cast<std::size_t>(n + 1) < result.target.size()
                                 ? result.target[static_cast<std::size_t>(n + 1)]
                                 : 0;
    if (inf.total(n) != want) result.match = false;
  }
  return result;
}

Convergence converge(const Diagram& diagram, const Coefficients& field) {
  return converge(chain_diagram(diagram), field);
}

// ---------------------------------------------------------------------------

ChainDiagram mapping_cone(const Diagram& source, const Diagram& target, const DiagramMap& t) {
  validate(source);
  validate(target);
  require(source.columns.size() == target.columns.size() && t.columns.size() == source.columns.size(),
          ErrorCode::InvalidArgument, "diagram map needs matching column counts");
  for (int p = -1; p <= source.top(); ++p) {
    const auto& map = t.columns[static_cast<std::size_t>(p + 1)];
    check_map(source.column(p), target.column(p), map, "column map " + std::to_string(p));
  }
  for (int p = 0; p <= source.top(); ++p) {
    const auto& sf = source.faces[static_cast<std::size_t>(p)];
    const auto& tf = target.faces[static_cast<std::size_t>(p)];
    require(sf.size() == tf.size(), ErrorCode::NotCommuting, "face counts differ in column " + std::to_string(p));
    const auto& here = t.columns[static_cast<std::size_t>(p + 1)];
    const auto& below = t.columns[static_cast<std::size_t>(p)];
    for (std::size_t i = 0; i < sf.size(); ++i)
      for (Vertex v : source.column(p).vertices())
        if (apply_map(below, apply_map(sf[i], v)) != apply_map(tf[i], apply_map(here, v)))
          fail(ErrorCode::NotCommuting, "map fails to commute with face " + std::to_string(i) + " of column " +
                                            std::to_string(p) + " at vertex " + std::to_string(v));
  }

  const ChainDiagram a = chain_diagram(source);
  const ChainDiagram b = chain_diagram(target);
  ChainDiagram cone;
  for (int p = -1; p <= source.top(); ++p) {
    const std::size_t idx = static_cast<std::size_t>(p + 1);
    const ChainComplex& ca = a.columns[idx];
    const ChainComplex& cb = b.columns[idx];
    const auto& map = t.columns[idx];
    const int top = std::max(ca.max_degree() + 1, cb.max_degree());
    std::vector<std::size_t> dims;
    for (int q = 0; q <= top; ++q) dims.push_back(ca.dim(q - 1) + cb.dim(q));
    cone.columns.push_back(assemble(0, dims, [&](int q) {
      IntMatrix d(ca.dim(q - 2) + cb.dim(q - 1), ca.dim(q - 1) + cb.dim(q));
      const std::size_t r0 = ca.dim(q - 2), c0 = ca.dim(q - 1);
      if (q >= 2) place(d, boundary_or_zero(ca, q - 1), 0, 0, -1);
      if (q >= 1) place(d, chain_map(source.column(p), target.column(p), map, q - 1), r0, 0);
      place(d, boundary_or_zero(cb, q), r0, c0);
      return d;
    }));
    require(cone.columns.back().is_valid(), ErrorCode::NotCommuting, "cone column does not square to zero");
    std::vector<IntMatrix> h;
    if (p >= 0) {
      const ChainComplex& pa = a.columns[idx - 1];
      const ChainComplex& pb = b.columns[idx - 1];
      for (int q = 0; q <= top; ++q) {
        IntMatrix m(pa.dim(q - 1) + pb.dim(q), ca.dim(q - 1) + cb.dim(q));
        if (q >= 1) place(m, horizontal_or_zero(a, p, q - 1), 0, 0);
        place(m, horizontal_or_zero(b, p, q), pa.dim(q - 1), ca.dim(q - 1));
        h.push_back(std::move(m));
      }
    }
    cone.horizontal.push_back(std::move(h));
  }
  return cone;
}

int half_floor(int k) { return k >= 0 ? k / 2 : -((-k + 1) / 2); }

namespace {

template <class F>
std::pair<bool, bool> augmentation_verdicts(const F& f, const SimplicialComplex& src, const SimplicialComplex& tgt,
                                            const VertexMap& map, int b) {
  using Mat = DenseMatrix<typename F::Elem>;
  const ChainComplex ca = chain_complex(src);
  const ChainComplex cb = chain_complex(tgt);
  bool iso = true, onto = true;
  for (int q = 0; q <= b; ++q) {
    const Mat za = nullspace(f, to_field(f, boundary_or_zero(ca, q)));
    const Mat tm = to_field(f, chain_map(src, tgt, map, q));
    const Mat bb = to_field(f, boundary_or_zero(cb, q + 1));
    // Images of the cycles of the source and the boundaries of the target, as rows.
    Mat images(za.rows, tm.rows, f.zero());
    for (std::size_t i = 0; i < za.rows; ++i) {
      std::vector<typename F::Elem> z(za.data.begin() + i * za.cols, za.data.begin() + (i + 1) * za.cols);
      const auto y = apply(f, tm, z);
      for (std::size_t j = 0; j < y.size(); ++j) images(i, j) = y[j];
    }
    Mat bounds(bb.cols, bb.rows, f.zero());
    for (std::size_t i = 0; i < bb.rows; ++i)
      for (std::size_t j = 0; j < bb.cols; ++j) bounds(j, i) = bb(i, j);
    const std::size_t rb = rank(f, bounds);
    const std::size_t rank_t = (bounds.rows + images.rows == 0) ? 0 : rank(f, stack_rows(f, bounds, images)) - rb;
    const std::size_t dim_a = za.rows - rank(f, to_field(f, boundary_or_zero(ca, q + 1)));
    const std::size_t dim_b = nullspace(f, to_field(f, boundary_or_zero(cb, q))).rows - rb;
    if (q < b && !(rank_t == dim_a && rank_t == dim_b)) iso = false;
    if (q == b && rank_t != dim_b) onto = false;
  }
  return {iso, onto};
}

}  // namespace

std::vector<LadderRow> stability_ladder(const std::vector<Diagram>& family, const std::vector<DiagramMap>& maps,
                                        int k0, const BoundFunction& bound, const Coefficients& field) {
  require(maps.size() + 1 == family.size(), ErrorCode::InvalidArgument, "one connecting map per consecutive pair");
  std::vector<LadderRow> rows;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    LadderRow row;
    row.k = k0 + static_cast<int>(i);
    row.bound = bound(row.k);
    const ChainDiagram cone = mapping_cone(family[i], family[i + 1], maps[i]);
    const Page page = e1(cone, field);
    for (const auto& [key, d] : page.dims) {
      const auto [p, q] = key;
      if (p >= 0 && q <= bound(row.k - p - 1) && d > 0) row.nonvanishing.push_back(key);
    }
    std::tie(row.iso_below, row.surjective_at) = with_field(field, [&](const auto& f) {
      return augmentation_verdicts(f, family[i].column(-1), family[i + 1].column(-1), maps[i].columns[0], row.bound);
    });
    const Convergence conv = converge(cone, field);
    const auto& inf = conv.e_infinity();
    const int n_hi = total_complex(cone).chains.max_degree();
    row.vanishing_through = -2;
    for (int n = -1; n <= n_hi && inf.total(n) == 0; ++n) row.vanishing_through = n;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string page_csv(const std::vector<Page>& pages) {
  std::string out = "r,p,q,dim\n";
  for (const auto& page : pages)
    for (const auto& [key, d] : page.dims)
      out += std::to_string(page.r) + ',' + std::to_string(key.first) + ',' + std::to_string(key.second) + ',' +
             std::to_string(d) + '\n';
  return out;
}

}  // namespace circlestab
