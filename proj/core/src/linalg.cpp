#include "circlestab/linalg.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <random>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "circlestab/error.hpp"

namespace circlestab {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) fail(ErrorCode::Overflow, "integer overflow in matrix arithmetic");
  return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) fail(ErrorCode::Overflow, "integer overflow in matrix arithmetic");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) fail(ErrorCode::Overflow, "integer overflow in matrix arithmetic");
  return r;
}

std::int64_t abs64(std::int64_t v) {
  if (v == std::numeric_limits<std::int64_t>::min()) fail(ErrorCode::Overflow, "integer overflow in abs");
  return v < 0 ? -v : v;
}

using Big = boost::multiprecision::cpp_int;

// Scalar operations for the two reducer instantiations: int64 aborts on
// overflow (the caller retries in arbitrary precision), cpp_int cannot.
struct Narrow {
  using T = std::int64_t;
  static T add(T a, T b) { return checked_add(a, b); }
  static T mul(T a, T b) { return checked_mul(a, b); }
  static T neg(T a) { return checked_sub(0, a); }
  static T abs(T a) { return abs64(a); }
};

struct Wide {
  using T = Big;
  static T add(const T& a, const T& b) { return a + b; }
  static T mul(const T& a, const T& b) { return a * b; }
  static T neg(const T& a) { return -a; }
  static T abs(const T& a) { return boost::multiprecision::abs(a); }
};

template <class T>
struct Grid {
  std::size_t rows = 0, cols = 0;
  std::vector<T> data;

  static Grid identity(std::size_t n) {
    Grid g{n, n, std::vector<T>(n * n, T(0))};
    for (std::size_t i = 0; i < n; ++i) g(i, i) = T(1);
    return g;
  }
  static Grid from(const IntMatrix& m) { return {m.rows(), m.cols(), std::vector<T>(m.data().begin(), m.data().end())}; }

  T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

IntMatrix narrow(const Grid<std::int64_t>& g) {
  IntMatrix m(g.rows, g.cols);
  for (std::size_t i = 0; i < g.rows; ++i)
    for (std::size_t j = 0; j < g.cols; ++j) m(i, j) = g(i, j);
  return m;
}

IntMatrix narrow(const Grid<Big>& g) {
  IntMatrix m(g.rows, g.cols);
  for (std::size_t i = 0; i < g.rows; ++i)
    for (std::size_t j = 0; j < g.cols; ++j) {
      const Big& v = g(i, j);
      if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
        fail(ErrorCode::Overflow, "Smith form entry does not fit in 64 bits");
      m(i, j) = static_cast<std::int64_t>(v);
    }
  return m;
}

// Quotient rounded to the nearest integer, so remainders satisfy |r| <= |b|/2.
template <class T>
T nearest_quotient(const T& a, const T& b) {
  T q = a / b;
  const T r = a - q * b;
  const T twice = r < 0 ? T(-2 * r) : T(2 * r);
  const T ab = b < 0 ? T(-b) : b;
  if (twice > ab) q += ((r < 0) == (b < 0)) ? T(1) : T(-1);
  return q;
}

// In-place diagonalization. U collects row operations, V column operations;
// either may be null when transforms are not wanted.
template <class Ops>
class SmithReducer {
 public:
  using T = typename Ops::T;

  SmithReducer(Grid<T>& a, Grid<T>* u, Grid<T>* v) : a_(a), u_(u), v_(v) {}

  void run() {
    const std::size_t n = std::min(a_.rows, a_.cols);
    std::size_t s = 0;
    for (; s < n; ++s) {
      if (!move_global_pivot(s)) break;
      reduce_at(s);
    }
    rank_ = s;
    fix_divisibility();
    for (std::size_t i = 0; i < rank_; ++i) {
      if (a_(i, i) < 0) negate_row(i);
    }
  }

 private:
  bool move_global_pivot(std::size_t s) {
    T best(0);
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = s; i < a_.rows; ++i) {
      for (std::size_t j = s; j < a_.cols; ++j) {
        if (a_(i, j) == 0) continue;
        const T av = Ops::abs(a_(i, j));
        if (best == 0 || av < best) {
          best = av;
          bi = i;
          bj = j;
          if (best == 1) goto found;
        }
      }
    }
    if (best == 0) return false;
  found:
    swap_rows(s, bi);
    swap_cols(s, bj);
    return true;
  }

  // Clears row s and column s outside the pivot by Euclidean steps.
  void reduce_at(std::size_t s) {
    for (;;) {
      T best = Ops::abs(a_(s, s));
      std::size_t bi = s, bj = s;
      for (std::size_t i = s + 1; i < a_.rows; ++i) {
        if (a_(i, s) != 0 && (best == 0 || Ops::abs(a_(i, s)) < best)) {
          best = Ops::abs(a_(i, s));
          bi = i;
          bj = s;
        }
      }
      for (std::size_t j = s + 1; j < a_.cols; ++j) {
        if (a_(s, j) != 0 && (best == 0 || Ops::abs(a_(s, j)) < best)) {
          best = Ops::abs(a_(s, j));
          bi = s;
          bj = j;
        }
      }
      if (bi != s) swap_rows(s, bi);
      if (bj != s) swap_cols(s, bj);

      bool clean = true;
      const T pivot = a_(s, s);
      for (std::size_t i = s + 1; i < a_.rows; ++i) {
        if (a_(i, s) == 0) continue;
        const T q = nearest_quotient(a_(i, s), pivot);
        if (q != 0) add_row_multiple(i, s, Ops::neg(q));
        if (a_(i, s) != 0) clean = false;
      }
      for (std::size_t j = s + 1; j < a_.cols; ++j) {
        if (a_(s, j) == 0) continue;
        const T q = nearest_quotient(a_(s, j), pivot);
        if (q != 0) add_col_multiple(j, s, Ops::neg(q));
        if (a_(s, j) != 0) clean = false;
      }
      if (clean) {
        bool row_clear = true;
        for (std::size_t i = s + 1; i < a_.rows && row_clear; ++i) row_clear = a_(i, s) == 0;
        if (row_clear) return;
      }
    }
  }

  // On a diagonal matrix, enforce d_i | d_j for i < j via the 2x2 gcd trick.
  void fix_divisibility() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < rank_; ++i) {
        for (std::size_t j = i + 1; j < rank_; ++j) {
          if (a_(j, j) % a_(i, i) == 0) continue;
          add_row_multiple(i, j, T(1));
          reduce_at(i);
          reduce_at(j);
          changed = true;
        }
      }
    }
  }

  static void swap_rows(Grid<T>& g, std::size_t i, std::size_t k) {
    for (std::size_t j = 0; j < g.cols; ++j) std::swap(g(i, j), g(k, j));
  }
  static void swap_cols(Grid<T>& g, std::size_t j, std::size_t k) {
    for (std::size_t i = 0; i < g.rows; ++i) std::swap(g(i, j), g(i, k));
  }

  void swap_rows(std::size_t i, std::size_t k) {
    if (i == k) return;
    swap_rows(a_, i, k);
    if (u_) swap_rows(*u_, i, k);
  }

  void swap_cols(std::size_t j, std::size_t k) {
    if (j == k) return;
    swap_cols(a_, j, k);
    if (v_) swap_cols(*v_, j, k);
  }

  // row_target += factor * row_source
  static void add_rows(Grid<T>& g, std::size_t target, std::size_t source, const T& factor) {
    for (std::size_t j = 0; j < g.cols; ++j)
      if (g(source, j) != 0) g(target, j) = Ops::add(g(target, j), Ops::mul(factor, g(source, j)));
  }
  static void add_cols(Grid<T>& g, std::size_t target, std::size_t source, const T& factor) {
    for (std::size_t i = 0; i < g.rows; ++i)
      if (g(i, source) != 0) g(i, target) = Ops::add(g(i, target), Ops::mul(factor, g(i, source)));
  }

  void add_row_multiple(std::size_t target, std::size_t source, const T& factor) {
    add_rows(a_, target, source, factor);
    if (u_) add_rows(*u_, target, source, factor);
  }

  void add_col_multiple(std::size_t target, std::size_t source, const T& factor) {
    add_cols(a_, target, source, factor);
    if (v_) add_cols(*v_, target, source, factor);
  }

  void negate_row(std::size_t i) {
    for (std::size_t j = 0; j < a_.cols; ++j) a_(i, j) = Ops::neg(a_(i, j));
    if (u_)
      for (std::size_t j = 0; j < u_->cols; ++j) (*u_)(i, j) = Ops::neg((*u_)(i, j));
  }

  Grid<T>& a_;
  Grid<T>* u_;
  Grid<T>* v_;
  std::size_t rank_ = 0;
};

Grid<Big> widen(const Grid<std::int64_t>& g) { return {g.rows, g.cols, std::vector<Big>(g.data.begin(), g.data.end())}; }
Grid<Big> widen(const Grid<Big>& g) { return g; }

using Rational = boost::multiprecision::cpp_rational;
using Lattice = std::vector<std::vector<Big>>;

Big round_nearest(const Rational& q) {
  const Big num = boost::multiprecision::numerator(q), den = boost::multiprecision::denominator(q);
  return nearest_quotient(num, den);
}

struct GramSchmidt {
  std::vector<std::vector<Rational>> star;
  std::vector<Rational> norm;
  std::vector<std::vector<Rational>> mu;

  explicit GramSchmidt(const Lattice& b) : star(b.size()), norm(b.size()), mu(b.size(), std::vector<Rational>(b.size())) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      star[k].assign(b[k].begin(), b[k].end());
      for (std::size_t j = 0; j < k; ++j) {
        Rational dot = 0;
        for (std::size_t l = 0; l < b[k].size(); ++l) dot += Rational(b[k][l]) * star[j][l];
        mu[k][j] = dot / norm[j];
        for (std::size_t l = 0; l < b[k].size(); ++l) star[k][l] -= mu[k][j] * star[j][l];
      }
      norm[k] = 0;
      for (const auto& x : star[k]) norm[k] += x * x;
    }
  }
};

// LLL (delta = 3/4) on independent vectors. `may_swap(k)` says whether b_k and
// b_{k-1} may trade places; `reduced(k, j, q)` reports b_k -= q b_j and
// `swapped(k)` reports a swap, so callers can mirror the moves elsewhere.
template <class MaySwap, class Reduced, class Swapped>
void lll(Lattice& b, MaySwap may_swap, Reduced reduced, Swapped swapped) {
  if (b.size() < 2) return;
  GramSchmidt gs(b);
  std::size_t k = 1;
  const Rational delta(3, 4);
  while (k < b.size()) {
    for (std::size_t j = k; j-- > 0;) {
      const Big q = round_nearest(gs.mu[k][j]);
      if (q == 0) continue;
      for (std::size_t l = 0; l < b[k].size(); ++l) b[k][l] -= q * b[j][l];
      for (std::size_t l = 0; l < j; ++l) gs.mu[k][l] -= Rational(q) * gs.mu[j][l];
      gs.mu[k][j] -= Rational(q);
      reduced(k, j, q);
    }
    if (may_swap(k) && gs.norm[k] < (delta - gs.mu[k][k - 1] * gs.mu[k][k - 1]) * gs.norm[k - 1]) {
      std::swap(b[k], b[k - 1]);
      swapped(k);
      gs = GramSchmidt(b);
      k = std::max<std::size_t>(k - 1, 1);
    } else {
      ++k;
    }
  }
}

Big dot_rows(const Grid<Big>& g, std::size_t i, std::size_t k) {
  Big s = 0;
  for (std::size_t l = 0; l < g.cols; ++l) s += g(i, l) * g(k, l);
  return s;
}

Big dot_cols(const Grid<Big>& g, std::size_t j, std::size_t k) {
  Big s = 0;
  for (std::size_t l = 0; l < g.rows; ++l) s += g(l, j) * g(l, k);
  return s;
}

// Elimination leaves valid but needlessly large transforms. For fixed D the
// pair (U, V) can still be changed by
//   row_i(U) += x row_j(U),  col_j(V) -= x (d_j / d_i) col_i(V)   when d_i | d_j,
// by adding kernel rows of U to any row, and by adding kernel columns of V to
// any column. Greedy pairwise reduction of |U|^2 + |V|^2 over the first kind,
// then LLL on the kernel columns of V and nearest-plane rounding of the rest.
void balance(Grid<Big>& u, const Grid<Big>& d, Grid<Big>& v) {
  std::size_t rank = 0;
  while (rank < std::min(d.rows, d.cols) && d(rank, rank) != 0) ++rank;
  auto diag = [&](std::size_t k) -> Big { return k < rank ? d(k, k) : Big(0); };

  // Best integer step for |a + x b|^2 + |p - x c q|^2.
  auto step = [](const Big& ab, const Big& bb, const Big& pq, const Big& qq, const Big& c) -> Big {
    const Big den = bb + c * c * qq;
    if (den == 0) return 0;
    return -nearest_quotient(Big(ab - c * pq), den);
  };

  for (int sweep = 0; sweep < 200; ++sweep) {
    bool moved = false;
    for (std::size_t i = 0; i < u.rows; ++i)
      for (std::size_t j = 0; j < u.rows; ++j) {
        if (i == j) continue;
        Big c = 0;
        if (j < rank) {
          if (i >= rank || diag(j) % diag(i) != 0) continue;
          c = diag(j) / diag(i);
        }
        const Big x = c == 0 ? step(dot_rows(u, i, j), dot_rows(u, j, j), 0, 0, 0)
                             : step(dot_rows(u, i, j), dot_rows(u, j, j), dot_cols(v, j, i), dot_cols(v, i, i), c);
        if (x == 0) continue;
        for (std::size_t l = 0; l < u.cols; ++l) u(i, l) += x * u(j, l);
        if (c != 0)
          for (std::size_t l = 0; l < v.rows; ++l) v(l, j) -= x * c * v(l, i);
        moved = true;
      }
    if (!moved) break;
  }

  const std::size_t c = v.cols;
  if (rank == c) return;
  Lattice kernel(c - rank);
  for (std::size_t k = rank; k < c; ++k)
    for (std::size_t l = 0; l < v.rows; ++l) kernel[k - rank].push_back(v(l, k));
  lll(kernel, [](std::size_t) { return true; }, [](std::size_t, std::size_t, const Big&) {}, [](std::size_t) {});
  const GramSchmidt gs(kernel);
  for (std::size_t j = 0; j < rank; ++j) {
    std::vector<Big> col(v.rows);
    for (std::size_t l = 0; l < v.rows; ++l) col[l] = v(l, j);
    for (std::size_t t = kernel.size(); t-- > 0;) {
      Rational dot = 0;
      for (std::size_t l = 0; l < v.rows; ++l) dot += Rational(col[l]) * gs.star[t][l];
      const Big q = round_nearest(dot / gs.norm[t]);
      if (q == 0) continue;
      for (std::size_t l = 0; l < v.rows; ++l) col[l] -= q * kernel[t][l];
    }
    for (std::size_t l = 0; l < v.rows; ++l) v(l, j) = col[l];
  }
  for (std::size_t k = rank; k < c; ++k)
    for (std::size_t l = 0; l < v.rows; ++l) v(l, k) = kernel[k - rank][l];
}

template <class Ops>
SmithForm smith_with(const IntMatrix& a, bool transforms) {
  using T = typename Ops::T;
  auto u = Grid<T>::identity(a.rows());
  auto d = Grid<T>::from(a);
  auto v = Grid<T>::identity(a.cols());
  SmithReducer<Ops>(d, transforms ? &u : nullptr, transforms ? &v : nullptr).run();
  if (!transforms) return {IntMatrix(), narrow(d), IntMatrix()};
  auto wu = widen(u), wv = widen(v);
  balance(wu, widen(d), wv);
  return {narrow(wu), narrow(d), narrow(wv)};
}

SmithForm smith_once(const IntMatrix& a, bool transforms) {
  try {
    return smith_with<Narrow>(a, transforms);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Overflow) throw;
  }
  return smith_with<Wide>(a, transforms);
}

// Small unimodular matrix for attempt `key`: a permutation times a unit
// lower-triangular matrix with entries in {-1, 0, 1}. Raw engine output keeps
// it identical on every platform.
IntMatrix scrambler(std::size_t n, std::uint64_t key) {
  IntMatrix m = IntMatrix::identity(n);
  if (key == 0 || n == 0) return m;
  std::mt19937_64 engine(key);
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) m(i, j) = static_cast<std::int64_t>(engine() % 3) - 1;
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[engine() % i]);
  IntMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = m(p[i], j);
  return out;
}

// The elimination path decides how large the transforms get. When they do not
// fit in 64 bits, retry on P A Q for small unimodular P, Q and map the result
// back: U' (P A Q) V' = D gives (U' P) A (Q V') = D.
SmithForm smith(const IntMatrix& a, bool transforms) {
  if (!transforms) return smith_once(a, false);
  constexpr std::uint64_t tries = 32;
  for (std::uint64_t attempt = 0; attempt < tries; ++attempt) {
    try {
      if (attempt == 0) return smith_once(a, true);
      const IntMatrix p = scrambler(a.rows(), 2 * attempt), q = scrambler(a.cols(), 2 * attempt + 1);
      const SmithForm f = smith_once(multiply(multiply(p, a), q), true);
      return {multiply(f.U, p), f.D, multiply(q, f.V)};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Overflow) throw;
    }
  }
  fail(ErrorCode::Overflow, "Smith form transforms do not fit in 64 bits");
}

}  // namespace

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  IntMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == cols, ErrorCode::InvalidArgument, "ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

bool IntMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](std::int64_t v) { return v == 0; });
}

bool IntMatrix::is_diagonal() const {
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (i != j && (*this)(i, j) != 0) return false;
  return true;
}

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  require(a.cols() == b.rows(), ErrorCode::InvalidArgument, "matrix shape mismatch in multiply");
  IntMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const std::int64_t v = a(i, k);
      if (v == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        if (b(k, j) != 0) c(i, j) = checked_add(c(i, j), checked_mul(v, b(k, j)));
      }
    }
  }
  return c;
}

std::int64_t determinant(const IntMatrix& a) {
  using boost::multiprecision::cpp_int;
  require(a.rows() == a.cols(), ErrorCode::InvalidArgument, "determinant of non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  std::vector<cpp_int> m(a.data().begin(), a.data().end());
  auto at = [&](std::size_t i, std::size_t j) -> cpp_int& { return m[i * n + j]; };
  cpp_int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (at(k, k) == 0) {
      std::size_t swap_with = k + 1;
      while (swap_with < n && at(swap_with, k) == 0) ++swap_with;
      if (swap_with == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(swap_with, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
      }
    }
    prev = at(k, k);
  }
  cpp_int det = at(n - 1, n - 1) * sign;
  if (det > std::numeric_limits<std::int64_t>::max() || det < std::numeric_limits<std::int64_t>::min())
    fail(ErrorCode::Overflow, "determinant does not fit in 64 bits");
  return static_cast<std::int64_t>(det);
}

SmithForm smith_normal_form(const IntMatrix& a) { return smith(a, true); }

std::vector<std::int64_t> invariant_factors(const IntMatrix& a) {
  const IntMatrix d = smith(a, false).D;
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < std::min(d.rows(), d.cols()); ++i) {
    if (d(i, i) == 0) break;
    out.push_back(d(i, i));
  }
  return out;
}

bool verify_smith_form(const IntMatrix& a, const SmithForm& form) {
  if (form.U.rows() != a.rows() || form.U.cols() != a.rows()) return false;
  if (form.V.rows() != a.cols() || form.V.cols() != a.cols()) return false;
  {
    const auto u = Grid<Big>::from(form.U), m = Grid<Big>::from(a), v = Grid<Big>::from(form.V);
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) {
        Big sum = 0;
        for (std::size_t k = 0; k < a.rows(); ++k) {
          if (u(i, k) == 0) continue;
          Big row = 0;
          for (std::size_t l = 0; l < a.cols(); ++l) row += m(k, l) * v(l, j);
          sum += u(i, k) * row;
        }
        if (sum != form.D(i, j)) return false;
      }
  }
  if (!form.D.is_diagonal()) return false;
  const std::size_t n = std::min(a.rows(), a.cols());
  bool seen_zero = false;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t d = form.D(i, i);
    if (d < 0) return false;
    if (d == 0) {
      seen_zero = true;
      continue;
    }
    if (seen_zero) return false;
    if (i > 0 && form.D(i - 1, i - 1) != 0 && d % form.D(i - 1, i - 1) != 0) return false;
  }
  return std::abs(determinant(form.U)) == 1 && std::abs(determinant(form.V)) == 1;
}

}  // namespace circlestab
