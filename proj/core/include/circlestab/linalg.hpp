#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace circlestab {

/// Dense row-major integer matrix. Arithmetic on entries is overflow-checked
/// everywhere in this module; an overflow raises ErrorCode::Overflow.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  static IntMatrix identity(std::size_t n);
  static IntMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::int64_t& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  std::int64_t operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<std::int64_t>& data() const noexcept { return data_; }

  bool is_zero() const;
  bool is_diagonal() const;

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int64_t> data_;
};

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b);

/// Exact determinant (fraction-free elimination in arbitrary precision).
/// Returns the value saturated to int64 only after checking it fits.
std::int64_t determinant(const IntMatrix& a);

/// U * A * V = D with U, V unimodular and D diagonal with d1 | d2 | ... and
/// nonnegative entries; nonzero entries come first.
struct SmithForm {
  IntMatrix U;
  IntMatrix D;
  IntMatrix V;
};

SmithForm smith_normal_form(const IntMatrix& a);

/// Nonzero diagonal entries of the Smith form, computed without tracking the
/// transforms (cheaper; used by homology).
std::vector<std::int64_t> invariant_factors(const IntMatrix& a);

/// Checks U*A*V == D, diagonal shape, divisibility chain, and |det U| =
/// |det V| = 1. Intended for tests and verification passes.
bool verify_smith_form(const IntMatrix& a, const SmithForm& form);

}  // namespace circlestab
