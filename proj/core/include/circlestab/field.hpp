#pragma once

// Exact linear algebra over Q and prime fields. Header-only templates; a
// field type supplies Elem plus zero/one/from_int/add/sub/mul/neg/inv/is_zero.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "circlestab/error.hpp"
#include "circlestab/linalg.hpp"

namespace circlestab {

struct RationalField {
  using Elem = boost::multiprecision::cpp_rational;

  Elem zero() const { return Elem(0); }
  Elem one() const { return Elem(1); }
  Elem from_int(std::int64_t v) const { return Elem(v); }
  Elem add(const Elem& a, const Elem& b) const { return a + b; }
  Elem sub(const Elem& a, const Elem& b) const { return a - b; }
  Elem mul(const Elem& a, const Elem& b) const { return a * b; }
  Elem neg(const Elem& a) const { return -a; }
  Elem inv(const Elem& a) const { return Elem(1) / a; }
  bool is_zero(const Elem& a) const { return a == 0; }
  std::string name() const { return "Q"; }
};

struct PrimeField {
  using Elem = std::uint32_t;

  explicit PrimeField(std::uint32_t prime) : p(prime) {
    require(prime >= 2, ErrorCode::InvalidArgument, "prime field needs p >= 2");
    for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= prime; ++d)
      require(prime % d != 0, ErrorCode::InvalidArgument, "field characteristic must be prime");
  }

  std::uint32_t p;

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  Elem from_int(std::int64_t v) const {
    std::int64_t r = v % static_cast<std::int64_t>(p);
    if (r < 0) r += p;
    return static_cast<Elem>(r);
  }
  Elem add(Elem a, Elem b) const { return static_cast<Elem>((static_cast<std::uint64_t>(a) + b) % p); }
  Elem sub(Elem a, Elem b) const { return static_cast<Elem>((static_cast<std::uint64_t>(a) + p - b) % p); }
  Elem mul(Elem a, Elem b) const { return static_cast<Elem>((static_cast<std::uint64_t>(a) * b) % p); }
  Elem neg(Elem a) const { return a == 0 ? 0 : p - a; }
  Elem inv(Elem a) const {
    // Fermat: a^(p-2)
    std::uint64_t result = 1, base = a, e = p - 2;
    while (e) {
      if (e & 1) result = result * base % p;
      base = base * base % p;
      e >>= 1;
    }
    return static_cast<Elem>(result);
  }
  bool is_zero(Elem a) const { return a == 0; }
  std::string name() const { return "F" + std::to_string(p); }
};

template <class E>
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<E> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, const E& fill) : rows(r), cols(c), data(r * c, fill) {}

  E& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const E& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

template <class F>
DenseMatrix<typename F::Elem> to_field(const F& field, const IntMatrix& m) {
  DenseMatrix<typename F::Elem> out(m.rows(), m.cols(), field.zero());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = field.from_int(m(i, j));
  return out;
}

template <class F>
DenseMatrix<typename F::Elem> multiply(const F& field, const DenseMatrix<typename F::Elem>& a,
                                       const DenseMatrix<typename F::Elem>& b) {
  require(a.cols == b.rows, ErrorCode::InvalidArgument, "matrix shape mismatch");
  DenseMatrix<typename F::Elem> c(a.rows, b.cols, field.zero());
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      if (field.is_zero(a(i, k))) continue;
      for (std::size_t j = 0; j < b.cols; ++j)
        if (!field.is_zero(b(k, j))) c(i, j) = field.add(c(i, j), field.mul(a(i, k), b(k, j)));
    }
  return c;
}

/// Reduced row echelon form in place; returns pivot columns.
template <class F>
std::vector<std::size_t> rref(const F& field, DenseMatrix<typename F::Elem>& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols && row < m.rows; ++col) {
    std::size_t sel = row;
    while (sel < m.rows && field.is_zero(m(sel, col))) ++sel;
    if (sel == m.rows) continue;
    if (sel != row)
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(sel, j), m(row, j));
    const auto inv = field.inv(m(row, col));
    for (std::size_t j = col; j < m.cols; ++j) m(row, j) = field.mul(m(row, j), inv);
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == row || field.is_zero(m(i, col))) continue;
      const auto f = m(i, col);
      for (std::size_t j = col; j < m.cols; ++j)
        if (!field.is_zero(m(row, j))) m(i, j) = field.sub(m(i, j), field.mul(f, m(row, j)));
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <class F>
std::size_t rank(const F& field, DenseMatrix<typename F::Elem> m) {
  return rref(field, m).size();
}

/// Basis (as rows) of {x : M x = 0}.
template <class F>
DenseMatrix<typename F::Elem> nullspace(const F& field, DenseMatrix<typename F::Elem> m) {
  const std::size_t n = m.cols;
  const auto pivots = rref(field, m);
  std::vector<bool> is_pivot(n, false);
  for (auto p : pivots) is_pivot[p] = true;
  DenseMatrix<typename F::Elem> basis(n - pivots.size(), n, field.zero());
  std::size_t b = 0;
  for (std::size_t free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    basis(b, free) = field.one();
    for (std::size_t r = 0; r < pivots.size(); ++r) basis(b, pivots[r]) = field.neg(m(r, free));
    ++b;
  }
  return basis;
}

/// Row-space basis in reduced echelon form (drops zero rows).
template <class F>
DenseMatrix<typename F::Elem> row_basis(const F& field, DenseMatrix<typename F::Elem> m) {
  const auto pivots = rref(field, m);
  DenseMatrix<typename F::Elem> out(pivots.size(), m.cols, field.zero());
  for (std::size_t i = 0; i < pivots.size(); ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = m(i, j);
  return out;
}

template <class F>
DenseMatrix<typename F::Elem> stack_rows(const F& field, const DenseMatrix<typename F::Elem>& a,
                                         const DenseMatrix<typename F::Elem>& b) {
  const std::size_t cols = a.rows ? a.cols : b.cols;
  DenseMatrix<typename F::Elem> out(a.rows + b.rows, cols, field.zero());
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out(a.rows + i, j) = b(i, j);
  return out;
}

/// Sparse column reduction; rank of an integer matrix over the field. This is
/// the path used for large boundary matrices.
template <class F>
std::size_t sparse_rank(const F& field, const IntMatrix& m) {
  using Elem = typename F::Elem;
  using Column = std::vector<std::pair<std::size_t, Elem>>;  // sorted by row
  std::vector<Column> columns(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0) {
        Elem e = field.from_int(m(i, j));
        if (!field.is_zero(e)) columns[j].emplace_back(i, std::move(e));
      }
  std::vector<std::optional<std::size_t>> owner(m.rows());  // pivot row -> reduced column
  std::vector<Column> reduced;
  reduced.reserve(m.cols());
  std::size_t rk = 0;
  for (auto& col : columns) {
    while (!col.empty()) {
      const std::size_t low = col.back().first;
      if (!owner[low]) break;
      const Column& other = reduced[*owner[low]];
      const Elem factor = field.mul(col.back().second, field.inv(other.back().second));
      Column merged;
      merged.reserve(col.size() + other.size());
      std::size_t a = 0, b = 0;
      while (a < col.size() || b < other.size()) {
        if (b == other.size() || (a < col.size() && col[a].first < other[b].first)) {
          merged.push_back(std::move(col[a++]));
        } else if (a == col.size() || other[b].first < col[a].first) {
          merged.emplace_back(other[b].first, field.neg(field.mul(factor, other[b].second)));
          ++b;
        } else {
          Elem v = field.sub(col[a].second, field.mul(factor, other[b].second));
          if (!field.is_zero(v)) merged.emplace_back(col[a].first, std::move(v));
          ++a;
          ++b;
        }
      }
      col = std::move(merged);
    }
    if (!col.empty()) {
      owner[col.back().first] = reduced.size();
      reduced.push_back(std::move(col));
      ++rk;
    }
  }
  return rk;
}

}  // namespace circlestab
