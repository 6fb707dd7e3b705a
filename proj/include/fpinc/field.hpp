#pragma once

/**
 * @file field.hpp
 * @brief Exact arithmetic and small dense linear algebra over a prime field F_p.
 *
 * A FieldSpec carries the odd prime modulus. FieldElem values always hold the
 * canonical residue in [0, p-1], so equality, ordering and hashing are plain
 * integer operations. Elements from different fields refuse to combine.
 *
 * The modulus is limited to p < 2^32 so that a product of two residues fits
 * in 64 bits.
 */

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fpinc/errors.hpp"

namespace fpinc {

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return (a * b) % p;
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
  std::uint64_t result = 1 % p;
  base %= p;
  while (exp > 0) {
    if (exp & 1U) result = mulmod(result, base, p);
    base = mulmod(base, base, p);
    exp >>= 1U;
  }
  return result;
}

inline bool is_prime_trial_division(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

inline std::uint64_t reduce_signed(std::int64_t v, std::uint64_t p) {
  const auto sp = static_cast<std::int64_t>(p);
  std::int64_t r = v % sp;
  if (r < 0) r += sp;
  return static_cast<std::uint64_t>(r);
}

}  // namespace detail

class FieldElem;

/// An odd prime modulus, verified at construction.
class FieldSpec {
 public:
  static constexpr std::uint64_t kMaxModulus = (std::uint64_t{1} << 32U) - 1U;

  explicit FieldSpec(std::uint64_t p) : p_(p) {
    if (p < 3 || p > kMaxModulus) {
      throw usage_error("field modulus must be an odd prime in [3, 2^32): got " + std::to_string(p));
    }
    if (!detail::is_prime_trial_division(p)) {
      throw usage_error("field modulus is not prime: " + std::to_string(p));
    }
  }

  [[nodiscard]] std::uint64_t p() const noexcept { return p_; }
  /// Either 1 or 3.
  [[nodiscard]] int residue_class_mod4() const noexcept { return static_cast<int>(p_ % 4); }
  [[nodiscard]] bool minus_one_is_square() const noexcept { return p_ % 4 == 1; }

  [[nodiscard]] FieldElem elem(std::int64_t v) const;
  [[nodiscard]] FieldElem zero() const;
  [[nodiscard]] FieldElem one() const;
  /// All p residues in increasing order.
  [[nodiscard]] std::vector<FieldElem> elements() const;

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;

 private:
  std::uint64_t p_;
};

class FieldElem {
 public:
  FieldElem(const FieldSpec& field, std::int64_t v) : value_(detail::reduce_signed(v, field.p())), p_(field.p()) {}

  /// Trusted construction from an already reduced residue.
  static FieldElem from_canonical(std::uint64_t value, std::uint64_t p) noexcept { return FieldElem(value, p); }

  [[nodiscard]] std::uint64_t value() const noexcept { return value_; }
  [[nodiscard]] std::uint64_t modulus() const noexcept { return p_; }
  [[nodiscard]] bool is_zero() const noexcept { return value_ == 0; }
  [[nodiscard]] FieldSpec field() const { return FieldSpec(p_); }

  FieldElem& operator+=(const FieldElem& o) {
    check_same(o);
    value_ += o.value_;
    if (value_ >= p_) value_ -= p_;
    return *this;
  }
  FieldElem& operator-=(const FieldElem& o) {
    check_same(o);
    value_ = value_ >= o.value_ ? value_ - o.value_ : value_ + p_ - o.value_;
    return *this;
  }
  FieldElem& operator*=(const FieldElem& o) {
    check_same(o);
    value_ = detail::mulmod(value_, o.value_, p_);
    return *this;
  }
  FieldElem& operator/=(const FieldElem& o);

  friend FieldElem operator+(FieldElem a, const FieldElem& b) { return a += b; }
  friend FieldElem operator-(FieldElem a, const FieldElem& b) { return a -= b; }
  friend FieldElem operator*(FieldElem a, const FieldElem& b) { return a *= b; }
  friend FieldElem operator/(FieldElem a, const FieldElem& b) { return a /= b; }
  FieldElem operator-() const { return FieldElem(value_ == 0 ? 0 : p_ - value_, p_); }

  [[nodiscard]] FieldElem pow(std::uint64_t e) const { return FieldElem(detail::powmod(value_, e, p_), p_); }

  friend bool operator==(const FieldElem& a, const FieldElem& b) noexcept {
    return a.p_ == b.p_ && a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const FieldElem& a, const FieldElem& b) noexcept {
    if (auto c = a.p_ <=> b.p_; c != 0) return c;
    return a.value_ <=> b.value_;
  }

 private:
  FieldElem(std::uint64_t value, std::uint64_t p) noexcept : value_(value), p_(p) {}

  void check_same(const FieldElem& o) const {
    if (o.p_ != p_) {
      throw usage_error("cannot combine elements of F_" + std::to_string(p_) + " and F_" + std::to_string(o.p_));
    }
  }

  std::uint64_t value_;
  std::uint64_t p_;
};

inline FieldElem FieldSpec::elem(std::int64_t v) const { return FieldElem(*this, v); }
inline FieldElem FieldSpec::zero() const { return FieldElem::from_canonical(0, p_); }
inline FieldElem FieldSpec::one() const { return FieldElem::from_canonical(1, p_); }
inline std::vector<FieldElem> FieldSpec::elements() const {
  std::vector<FieldElem> out;
  out.reserve(p_);
  for (std::uint64_t v = 0; v < p_; ++v) out.push_back(FieldElem::from_canonical(v, p_));
  return out;
}

/// Multiplicative inverse via Fermat's little theorem.
inline FieldElem invert(const FieldElem& x) {
  if (x.is_zero()) throw domain_error("inverse of zero in F_" + std::to_string(x.modulus()));
  return x.pow(x.modulus() - 2);
}

inline FieldElem& FieldElem::operator/=(const FieldElem& o) {
  check_same(o);
  return *this *= invert(o);
}

/// Legendre symbol (x/p) in {-1, 0, +1}, computed with the Jacobi reciprocity algorithm.
inline int legendre_symbol(const FieldElem& x) {
  std::uint64_t a = x.value();
  std::uint64_t n = x.modulus();
  if (a == 0) return 0;
  int sign = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      const std::uint64_t r = n % 8;
      if (r == 3 || r == 5) sign = -sign;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) sign = -sign;
    a %= n;
  }
  return n == 1 ? sign : 0;
}

inline bool is_square(const FieldElem& x) { return legendre_symbol(x) >= 0; }

/// A square root of x (Tonelli-Shanks), or nullopt when x is a non-residue.
/// The returned root r satisfies r <= p - r.
inline std::optional<FieldElem> sqrt(const FieldElem& x) {
  const std::uint64_t p = x.modulus();
  if (x.is_zero()) return x;
  if (legendre_symbol(x) != 1) return std::nullopt;
  std::uint64_t root = 0;
  if (p % 4 == 3) {
    root = detail::powmod(x.value(), (p + 1) / 4, p);
  } else {
    std::uint64_t q = p - 1;
    unsigned s = 0;
    while (q % 2 == 0) {
      q /= 2;
      ++s;
    }
    std::uint64_t z = 2;
    while (detail::powmod(z, (p - 1) / 2, p) != p - 1) ++z;
    std::uint64_t m = s;
    std::uint64_t c = detail::powmod(z, q, p);
    std::uint64_t t = detail::powmod(x.value(), q, p);
    std::uint64_t r = detail::powmod(x.value(), (q + 1) / 2, p);
    while (t != 1) {
      std::uint64_t i = 0;
      std::uint64_t t2 = t;
      while (t2 != 1) {
        t2 = detail::mulmod(t2, t2, p);
        ++i;
      }
      std::uint64_t b = c;
      for (std::uint64_t j = 0; j + 1 < m - i; ++j) b = detail::mulmod(b, b, p);
      m = i;
      c = detail::mulmod(b, b, p);
      t = detail::mulmod(t, c, p);
      r = detail::mulmod(r, b, p);
    }
    root = r;
  }
  if (root > p - root) root = p - root;
  return FieldElem::from_canonical(root, p);
}

/// Dense row-major matrix over F_p.
class MatrixModP {
 public:
  MatrixModP(const FieldSpec& field, std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), p_(field.p()), entries_(rows * cols, field.zero()) {}

  MatrixModP(const FieldSpec& field, std::size_t rows, std::size_t cols, std::vector<FieldElem> entries)
      : rows_(rows), cols_(cols), p_(field.p()), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) {
      throw usage_error("matrix entry count " + std::to_string(entries_.size()) + " != rows*cols");
    }
    for (const auto& e : entries_) {
      if (e.modulus() != p_) throw usage_error("matrix entries from different fields");
    }
  }

  static MatrixModP from_ints(const FieldSpec& field, std::size_t rows, std::size_t cols,
                              const std::vector<std::int64_t>& values) {
    std::vector<FieldElem> e;
    e.reserve(values.size());
    for (auto v : values) e.push_back(field.elem(v));
    return MatrixModP(field, rows, cols, std::move(e));
  }

  static MatrixModP identity(const FieldSpec& field, std::size_t n) {
    MatrixModP m(field, n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = field.one();
    return m;
  }

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] FieldSpec field() const { return FieldSpec(p_); }
  [[nodiscard]] const std::vector<FieldElem>& entries() const noexcept { return entries_; }

  FieldElem& at(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  [[nodiscard]] const FieldElem& at(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  friend bool operator==(const MatrixModP&, const MatrixModP&) = default;

  friend MatrixModP operator*(const MatrixModP& a, const MatrixModP& b) {
    if (a.cols_ != b.rows_ || a.p_ != b.p_) throw usage_error("matrix product dimension mismatch");
    MatrixModP out(a.field(), a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const auto& aik = a.at(i, k);
        if (aik.is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out.at(i, j) += aik * b.at(k, j);
      }
    }
    return out;
  }

  [[nodiscard]] std::vector<FieldElem> apply(const std::vector<FieldElem>& v) const {
    if (v.size() != cols_) throw usage_error("matrix-vector dimension mismatch");
    std::vector<FieldElem> out(rows_, field().zero());
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) out[i] += at(i, j) * v[j];
    }
    return out;
  }

  [[nodiscard]] MatrixModP transpose() const {
    MatrixModP t(field(), cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  /// Reduced row echelon form in place; returns the pivot column of each pivot row.
  std::vector<std::size_t> row_reduce() {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
      std::size_t piv = r;
      while (piv < rows_ && at(piv, c).is_zero()) ++piv;
      if (piv == rows_) continue;
      if (piv != r) {
        for (std::size_t j = 0; j < cols_; ++j) std::swap(at(piv, j), at(r, j));
      }
      const FieldElem inv = invert(at(r, c));
      for (std::size_t j = 0; j < cols_; ++j) at(r, j) *= inv;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (i == r || at(i, c).is_zero()) continue;
        const FieldElem factor = at(i, c);
        for (std::size_t j = 0; j < cols_; ++j) at(i, j) -= factor * at(r, j);
      }
      pivots.push_back(c);
      ++r;
    }
    return pivots;
  }

  [[nodiscard]] std::size_t rank() const {
    MatrixModP copy = *this;
    return copy.row_reduce().size();
  }

  [[nodiscard]] FieldElem determinant() const {
    if (rows_ != cols_) throw usage_error("determinant of a non-square matrix");
    MatrixModP m = *this;
    FieldElem det = field().one();
    for (std::size_t c = 0; c < cols_; ++c) {
      std::size_t piv = c;
      while (piv < rows_ && m.at(piv, c).is_zero()) ++piv;
      if (piv == rows_) return field().zero();
      if (piv != c) {
        for (std::size_t j = 0; j < cols_; ++j) std::swap(m.at(piv, j), m.at(c, j));
        det = -det;
      }
      det *= m.at(c, c);
      const FieldElem inv = invert(m.at(c, c));
      for (std::size_t i = c + 1; i < rows_; ++i) {
        if (m.at(i, c).is_zero()) continue;
        const FieldElem factor = m.at(i, c) * inv;
        for (std::size_t j = c; j < cols_; ++j) m.at(i, j) -= factor * m.at(c, j);
      }
    }
    return det;
  }

  /// Inverse of a square matrix, nullopt when singular.
  [[nodiscard]] std::optional<MatrixModP> inverse() const {
    if (rows_ != cols_) throw usage_error("inverse of a non-square matrix");
    const std::size_t n = rows_;
    MatrixModP aug(field(), n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = at(i, j);
      aug.at(i, n + i) = field().one();
    }
    const auto pivots = aug.row_reduce();
    if (pivots.size() < n || pivots[n - 1] != n - 1) return std::nullopt;
    MatrixModP inv(field(), n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) inv.at(i, j) = aug.at(i, n + j);
    return inv;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::uint64_t p_;
  std::vector<FieldElem> entries_;
};

/// Outcome of solve_linear: a unique solution, an affine solution space, or no solution.
struct LinearSolution {
  enum class Kind { Unique, Affine, Inconsistent };
  Kind kind = Kind::Inconsistent;
  /// One solution (empty when inconsistent).
  std::vector<FieldElem> particular;
  /// Basis of the homogeneous solution space; empty for Unique.
  std::vector<std::vector<FieldElem>> nullspace;
};

/// Solves M x = rhs by Gauss-Jordan elimination.
inline LinearSolution solve_linear(const MatrixModP& m, const std::vector<FieldElem>& rhs) {
  if (rhs.size() != m.rows()) {
    throw usage_error("solve_linear: rhs has " + std::to_string(rhs.size()) + " entries, matrix has " +
                      std::to_string(m.rows()) + " rows");
  }
  const FieldSpec field = m.field();
  for (const auto& v : rhs) {
    if (v.modulus() != field.p()) throw usage_error("solve_linear: rhs from a different field");
  }
  const std::size_t n = m.cols();
  MatrixModP aug(field, m.rows(), n + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, n) = rhs[i];
  }
  const auto pivots = aug.row_reduce();
  LinearSolution out;
  if (!pivots.empty() && pivots.back() == n) {
    out.kind = LinearSolution::Kind::Inconsistent;
    return out;
  }
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivots) is_pivot[c] = true;

  out.particular.assign(n, field.zero());
  for (std::size_t r = 0; r < pivots.size(); ++r) out.particular[pivots[r]] = aug.at(r, n);

  for (std::size_t free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    std::vector<FieldElem> basis(n, field.zero());
    basis[free] = field.one();
    for (std::size_t r = 0; r < pivots.size(); ++r) basis[pivots[r]] = -aug.at(r, free);
    out.nullspace.push_back(std::move(basis));
  }
  out.kind = out.nullspace.empty() ? LinearSolution::Kind::Unique : LinearSolution::Kind::Affine;
  return out;
}

}  // namespace fpinc

template <>
struct std::hash<fpinc::FieldElem> {
  std::size_t operator()(const fpinc::FieldElem& x) const noexcept {
    return std::hash<std::uint64_t>{}(x.value() * 0x9E3779B97F4A7C15ULL ^ x.modulus());
  }
};
