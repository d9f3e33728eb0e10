#pragma once

// Truncated polynomial model of germs of real-analytic functions:
// Q[z_1..z_n, w_1..w_n] modulo all monomials of total degree > D, with exact
// rational coefficients.  The w_i are independent formal variables (formal
// conjugates); no conjugation operation exists.
//
// Every series carries a valid order v: the object is certified to agree with
// the value it models on all monomials of total degree <= v.  Binary
// operations take the min of the operand orders, Wirtinger derivatives
// subtract 1.  Values assembled purely from polynomial data, where no
// operation ever discarded a monomial beyond the truncation bound, are exact
// and keep v pinned at the bound regardless of derivatives.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "superkoszul/rational.hpp"

namespace skz {

// ----------------------------------------------------------------- errors --

struct RingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RingMismatch : RingError {
  RingMismatch() : RingError("ring mismatch: operands belong to different rings") {}
};

struct ZeroConstantTerm : RingError {
  ZeroConstantTerm() : RingError("inversion requires a nonzero constant term") {}
};

struct ParseError : RingError {
  std::size_t offset;
  ParseError(const std::string& what, std::size_t off)
      : RingError(what + " (at offset " + std::to_string(off) + ")"), offset(off) {}
};

struct DegreeOverflow : RingError {
  DegreeOverflow(const std::string& monomial, int truncation)
      : RingError("literal monomial " + monomial + " exceeds truncation order " +
                  std::to_string(truncation)) {}
};

// ------------------------------------------------------------------- ring --

enum class VarKind : uint8_t { Z = 0, W = 1 };

struct RingSpec {
  int num_vars = 1;    // n: z_1..z_n and w_1..w_n
  int truncation = 4;  // D: monomials of total degree > D vanish

  bool operator==(const RingSpec& o) const {
    return num_vars == o.num_vars && truncation == o.truncation;
  }
  bool operator!=(const RingSpec& o) const { return !(*this == o); }
};

inline void require_same_ring(const RingSpec& a, const RingSpec& b) {
  if (a != b) throw RingMismatch{};
}

// Sentinel valid order for exact values (polynomial data where nothing was
// ever discarded).  Participates in min() as the identity.
inline constexpr int kExactOrder = 1 << 20;

inline int order_after_derivative(int v) {
  if (v >= kExactOrder) return kExactOrder;
  return v > 0 ? v - 1 : 0;
}

// -------------------------------------------------------------- monomials --

// Exponent vector: slots 0..n-1 are z_1..z_n, slots n..2n-1 are w_1..w_n.
struct Monomial {
  std::vector<uint8_t> e;

  explicit Monomial(int num_vars = 0) : e(static_cast<std::size_t>(2 * num_vars), 0) {}

  int degree() const {
    int d = 0;
    for (uint8_t x : e) d += x;
    return d;
  }
  int exponent(VarKind k, int index1) const {  // 1-based index
    return e[slot(k, index1)];
  }
  std::size_t slot(VarKind k, int index1) const {
    return static_cast<std::size_t>((k == VarKind::W ? e.size() / 2 : 0) + index1 - 1);
  }
  bool operator==(const Monomial& o) const { return e == o.e; }
};

// Canonical graded-lexicographic order used everywhere: ascending total
// degree, then descending exponent vectors (z_1-heavy terms first within a
// degree).  Series maps, printing, and the linear solver all share it.
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return a.e > b.e;  // larger exponent vector comes first
  }
};

Monomial monomial_product(const Monomial& a, const Monomial& b);
std::string to_string(const Monomial& m);  // "z1^2*w1", "1" for the unit

// ----------------------------------------------------------------- series --

class TruncatedSeries {
 public:
  using TermMap = std::map<Monomial, Rational, GrlexLess>;

  explicit TruncatedSeries(const RingSpec& ring, int valid_order = kExactOrder)
      : ring_(ring), valid_order_(valid_order) {}

  static TruncatedSeries zero(const RingSpec& ring, int valid_order = kExactOrder) {
    return TruncatedSeries(ring, valid_order);
  }
  static TruncatedSeries constant(const RingSpec& ring, const Rational& c,
                                  int valid_order = kExactOrder);
  static TruncatedSeries variable(const RingSpec& ring, VarKind kind, int index1);
  static TruncatedSeries from_monomial(const RingSpec& ring, const Monomial& m,
                                       const Rational& c, int valid_order = kExactOrder);

  const RingSpec& ring() const { return ring_; }
  int valid_order() const { return valid_order_; }
  // Largest degree actually representable/certified: min(v, D).
  int cap() const { return std::min(valid_order_, ring_.truncation); }
  bool exact() const { return valid_order_ >= kExactOrder; }
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }

  Rational coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational{0} : it->second;
  }
  Rational constant_term() const { return coefficient(Monomial(ring_.num_vars)); }

  // Restrict the certificate to `order` (drops stored monomials above it).
  TruncatedSeries truncated_to(int order) const;
  // Keep only the homogeneous part of the given total degree.
  TruncatedSeries homogeneous_part(int degree) const;

  void add_term(const Monomial& m, const Rational& c);  // respects cap()

  TruncatedSeries operator-() const;
  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b);
  friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b);
  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b);
  TruncatedSeries scaled(const Rational& c) const;

 private:
  RingSpec ring_;
  int valid_order_;
  TermMap terms_;
};

TruncatedSeries series_pow(const TruncatedSeries& a, int k);

// Exact inverse of a unit (nonzero constant term); throws ZeroConstantTerm
// otherwise.  Result valid order equals the input's.
TruncatedSeries invert_unit(const TruncatedSeries& a);

// Formal Wirtinger derivative d/dz_i or d/dw_i; valid order drops by one
// (exact inputs stay exact).
TruncatedSeries wirtinger(const TruncatedSeries& a, VarKind kind, int index1);

// ------------------------------------------------------------------ ideal --

// Coordinate ideal (z_i : i in vars); vars are 1-based z-indices.
struct IdealSpec {
  std::vector<int> vars;
};

// Substitute z_i := 0 for every generator of the ideal.
TruncatedSeries reduce_mod_ideal(const TruncatedSeries& a, const IdealSpec& ideal);

// ------------------------------------------------------- equality helpers --

// Order up to which two series agree: min of the caps if all monomials of
// total degree <= that order match, std::nullopt otherwise.
std::optional<int> agree_order(const TruncatedSeries& a, const TruncatedSeries& b);

// First monomial (grlex) of degree <= order with a nonzero coefficient.
std::optional<Monomial> first_nonzero_monomial(const TruncatedSeries& a, int order);

// --------------------------------------------------------------- printing --

// Canonical printing: graded-lex term order, explicit '*', '^' powers,
// "p/q" rationals, "0" for the zero series.  parse(print(s)) == s.
std::string to_string(const TruncatedSeries& s);

// Series parser for the expression grammar (rationals, z<k>/w<k>, + - * ^,
// unary minus, parentheses; '^' accepts a negative exponent on unit bases).
TruncatedSeries parse_series(const std::string& text, const RingSpec& ring);

}  // namespace skz
