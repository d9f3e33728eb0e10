#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "superkoszul/ring.hpp"
#include "test_util.hpp"

using namespace skz;
using testutil::SeriesGen;

namespace {

Monomial mono(const RingSpec& ring, std::vector<int> exps) {
  Monomial m(ring.num_vars);
  REQUIRE(exps.size() == m.e.size());
  for (std::size_t i = 0; i < exps.size(); ++i) m.e[i] = static_cast<std::uint8_t>(exps[i]);
  return m;
}

bool same_terms(const TruncatedSeries& a, const TruncatedSeries& b) {
  return a.terms() == b.terms();
}

}  // namespace

TEST_SUITE("ring") {

TEST_CASE("graded-lex monomial order: degree first, then z1-heavy first") {
  RingSpec ring{1, 8};
  GrlexLess less;
  Monomial one = mono(ring, {0, 0});
  Monomial z = mono(ring, {1, 0});
  Monomial w = mono(ring, {0, 1});
  Monomial zw = mono(ring, {1, 1});
  Monomial z2 = mono(ring, {2, 0});
  CHECK(less(one, z));
  CHECK(less(z, w));        // same degree: larger exponent vector first
  CHECK(less(w, z2));       // degree wins over lex
  CHECK(less(z2, zw));
  CHECK_FALSE(less(z, z));  // irreflexive

  // The order drives printing: within a degree, z-heavy monomials lead.
  TruncatedSeries s = TruncatedSeries::variable(ring, VarKind::W, 1) +
                      TruncatedSeries::variable(ring, VarKind::Z, 1) +
                      TruncatedSeries::constant(ring, 3);
  CHECK(to_string(s) == "3 + z1 + w1");
}

TEST_CASE("arithmetic: ring axioms hold exactly on random series") {
  RingSpec ring{2, 5};
  SeriesGen gen(ring, 0x5eed0001);
  for (int trial = 0; trial < 60; ++trial) {
    TruncatedSeries a = gen.random_series(4);
    TruncatedSeries b = gen.random_series(4);
    TruncatedSeries c = gen.random_series(4);
    CHECK(same_terms(a + b, b + a));
    CHECK(same_terms(a * b, b * a));
    CHECK(same_terms((a + b) + c, a + (b + c)));
    CHECK(same_terms((a * b) * c, a * (b * c)));
    CHECK(same_terms(a * (b + c), a * b + a * c));
    CHECK(same_terms(a - a, TruncatedSeries::zero(ring)));
    CHECK(same_terms(a.scaled(Rational(3, 2)) + a.scaled(Rational(-3, 2)),
                     TruncatedSeries::zero(ring)));
  }
}

TEST_CASE("arithmetic: truncation discards degrees beyond the bound") {
  RingSpec ring{1, 4};
  TruncatedSeries z = TruncatedSeries::variable(ring, VarKind::Z, 1);
  TruncatedSeries z2 = z * z;
  TruncatedSeries z4 = z2 * z2;
  CHECK(same_terms(z4, TruncatedSeries::from_monomial(ring, mono(ring, {4, 0}), 1)));
  // z^2 * z^3 leaves the ring entirely: the value is zero...
  TruncatedSeries z5 = z4 * z;
  CHECK(z5.is_zero());
  // ...and a product that discarded a cross-term is no longer exact.
  CHECK_FALSE(z5.exact());
  CHECK(z5.valid_order() == 4);
  // Whereas z*z discards nothing and stays exact.
  CHECK(z2.exact());
}

TEST_CASE("valid order: binary operations take the minimum") {
  RingSpec ring{1, 8};
  SeriesGen gen(ring, 0x5eed0002);
  TruncatedSeries a = gen.random_series(5).truncated_to(5);
  TruncatedSeries b = gen.random_series(5).truncated_to(3);
  CHECK(a.valid_order() == 5);
  CHECK(b.valid_order() == 3);
  CHECK((a + b).valid_order() == 3);
  CHECK((a - b).valid_order() == 3);
  CHECK((a * b).valid_order() == 3);
  CHECK(a.scaled(Rational(7)).valid_order() == 5);
  CHECK((-b).valid_order() == 3);
  // Truncating drops stored monomials above the new order.
  for (const auto& [m, c] : b.terms()) CHECK(m.degree() <= 3);
  // cap() never exceeds the ring truncation.
  TruncatedSeries e = gen.random_series(5);
  CHECK(e.exact());
  CHECK(e.cap() == 8);
}

TEST_CASE("valid order: derivatives lower truncated orders, keep exact ones") {
  RingSpec ring{1, 8};
  TruncatedSeries f = parse_series("z1^2*w1 + z1", ring);
  CHECK(f.exact());
  TruncatedSeries df = wirtinger(f, VarKind::Z, 1);
  CHECK(df.exact());  // polynomial data: nothing was ever discarded
  CHECK(same_terms(df, parse_series("2*z1*w1 + 1", ring)));

  TruncatedSeries g = f.truncated_to(6);
  CHECK(wirtinger(g, VarKind::Z, 1).valid_order() == 5);
  CHECK(wirtinger(g.truncated_to(0), VarKind::Z, 1).valid_order() == 0);
}

TEST_CASE("inversion matches the closed-form geometric series") {
  RingSpec ring{1, 8};
  // Oracle: 1/(1+z1*w1) = sum_k (-1)^k (z1*w1)^k, built from its coefficients.
  TruncatedSeries oracle = testutil::geometric_zw(ring, Rational(-1));
  TruncatedSeries unit = parse_series("1 + z1*w1", ring);
  TruncatedSeries inv = invert_unit(unit);
  CHECK(inv.valid_order() == 8);  // inversion of a non-constant discards tails
  CHECK(same_terms(inv, oracle));

  // Constants invert exactly.
  TruncatedSeries half = invert_unit(TruncatedSeries::constant(ring, 2));
  CHECK(half.exact());
  CHECK(half.constant_term() == Rational(1, 2));

  // The valid order of the input is preserved.
  CHECK(invert_unit(unit.truncated_to(3)).valid_order() == 3);
}

TEST_CASE("inversion: a * invert(a) = 1 on random units, zero constant rejected") {
  RingSpec ring{2, 5};
  SeriesGen gen(ring, 0x5eed0003);
  for (int trial = 0; trial < 40; ++trial) {
    TruncatedSeries a = gen.random_unit(5);
    TruncatedSeries prod = a * invert_unit(a);
    CHECK(same_terms(prod.truncated_to(prod.cap()),
                     TruncatedSeries::constant(ring, 1).truncated_to(prod.cap())));
  }
  CHECK_THROWS_AS(invert_unit(TruncatedSeries::variable(ring, VarKind::Z, 1)),
                  ZeroConstantTerm);
  CHECK_THROWS_AS(invert_unit(TruncatedSeries::zero(ring)), ZeroConstantTerm);
}

TEST_CASE("wirtinger derivative of an inverse matches the closed form") {
  RingSpec ring{1, 8};
  // d/dw1 (1+z1*w1)^{-1} = -z1 * (1+z1*w1)^{-2}; the right-hand side expands
  // to -z1 * sum_k (-1)^k (k+1) (z1*w1)^k, built here coefficient by
  // coefficient as an independent oracle.
  std::vector<Rational> coeffs;
  for (int k = 0; 2 * k <= ring.truncation; ++k) {
    coeffs.push_back(Rational((k % 2 == 0) ? (k + 1) : -(k + 1)));
  }
  TruncatedSeries oracle =
      -(TruncatedSeries::variable(ring, VarKind::Z, 1) * testutil::diagonal_series(ring, coeffs));

  TruncatedSeries lhs = wirtinger(invert_unit(parse_series("1 + z1*w1", ring)), VarKind::W, 1);
  CHECK(lhs.valid_order() == 7);
  CHECK(same_terms(lhs.truncated_to(7), oracle.truncated_to(7)));

  // Product rule on random pairs: d(ab) = da*b + a*db.
  SeriesGen gen(ring, 0x5eed0004);
  for (int trial = 0; trial < 40; ++trial) {
    TruncatedSeries a = gen.random_series(4);
    TruncatedSeries b = gen.random_series(4);
    for (VarKind kind : {VarKind::Z, VarKind::W}) {
      TruncatedSeries left = wirtinger(a * b, kind, 1);
      TruncatedSeries right = wirtinger(a, kind, 1) * b + a * wirtinger(b, kind, 1);
      CHECK(same_terms(left.truncated_to(left.cap()), right.truncated_to(left.cap())));
    }
  }

  // Mixed partials commute.
  TruncatedSeries f = parse_series("(1 + z1*w1)^2", ring);
  CHECK(same_terms(wirtinger(wirtinger(f, VarKind::Z, 1), VarKind::W, 1),
                   wirtinger(wirtinger(f, VarKind::W, 1), VarKind::Z, 1)));
}

TEST_CASE("homogeneous parts decompose a series by total degree") {
  RingSpec ring{1, 6};
  TruncatedSeries f = parse_series("(1 + z1*w1)^2", ring);
  CHECK(same_terms(f.homogeneous_part(0), TruncatedSeries::constant(ring, 1)));
  CHECK(same_terms(f.homogeneous_part(2), parse_series("2*z1*w1", ring)));
  CHECK(same_terms(f.homogeneous_part(4), parse_series("z1^2*w1^2", ring)));
  CHECK(f.homogeneous_part(1).is_zero());
  TruncatedSeries sum = TruncatedSeries::zero(ring);
  for (int d = 0; d <= ring.truncation; ++d) sum = sum + f.homogeneous_part(d);
  CHECK(same_terms(sum, f));
}

TEST_CASE("reduction modulo a coordinate ideal substitutes z_i = 0") {
  RingSpec ring{2, 6};
  TruncatedSeries f = parse_series("(1 + z1*w1)^2 + z2*w2 + z1*z2", ring);
  TruncatedSeries r1 = reduce_mod_ideal(f, IdealSpec{{1}});
  CHECK(same_terms(r1, parse_series("1 + z2*w2", ring)));
  TruncatedSeries r12 = reduce_mod_ideal(f, IdealSpec{{1, 2}});
  CHECK(same_terms(r12, TruncatedSeries::constant(ring, 1)));
  // w variables are untouched.
  TruncatedSeries g = reduce_mod_ideal(parse_series("w1 + z1", ring), IdealSpec{{1}});
  CHECK(same_terms(g, parse_series("w1", ring)));
}

TEST_CASE("agreement order certifies prefixes, locates first mismatch") {
  RingSpec ring{1, 8};
  TruncatedSeries a = parse_series("1 + z1*w1", ring);
  TruncatedSeries b = parse_series("1 + z1*w1 + z1^2*w1^2", ring);
  CHECK_FALSE(agree_order(a, b).has_value());
  CHECK(agree_order(a.truncated_to(3), b.truncated_to(3)) == 3);
  auto first = first_nonzero_monomial(b - a, ring.truncation);
  REQUIRE(first.has_value());
  CHECK(to_string(*first) == "z1^2*w1^2");
  CHECK_FALSE(first_nonzero_monomial(b - a, 3).has_value());
}

TEST_CASE("printing: canonical grlex form with explicit operators") {
  RingSpec ring{1, 8};
  CHECK(to_string(TruncatedSeries::zero(ring)) == "0");
  CHECK(to_string(TruncatedSeries::constant(ring, Rational(-5, 3))) == "-5/3");
  CHECK(to_string(parse_series("1 - 2*z1*w1 + 3*z1^2*w1^2", ring)) ==
        "1 - 2*z1*w1 + 3*z1^2*w1^2");
  CHECK(to_string(parse_series("z1*1/2", ring)) == "1/2*z1");
  CHECK(to_string(parse_series("-z1", ring)) == "-z1");
  CHECK(to_string(parse_series("w1 + z1^2", ring)) == "w1 + z1^2");
  RingSpec ring2{2, 4};
  CHECK(to_string(parse_series("z2*w1 - z1*w2", ring2)) == "-z1*w2 + z2*w1");
}

TEST_CASE("parsing: grammar basics and whitespace insensitivity") {
  RingSpec ring{1, 8};
  TruncatedSeries a = parse_series("1 + 2*z1*w1", ring);
  TruncatedSeries b = TruncatedSeries::constant(ring, 1) +
                      TruncatedSeries::from_monomial(ring, mono(ring, {1, 1}), 2);
  CHECK(same_terms(a, b));
  CHECK(a.exact());
  CHECK(same_terms(parse_series("  1+ 2 * z1*w1 ", ring), b));
  CHECK(same_terms(parse_series("(1 + z1*w1)^2", ring),
                   parse_series("1 + 2*z1*w1 + z1^2*w1^2", ring)));
  CHECK(same_terms(parse_series("z1 - -w1", ring), parse_series("z1 + w1", ring)));
  CHECK(same_terms(parse_series("3/2", ring), TruncatedSeries::constant(ring, Rational(3, 2))));
  CHECK(same_terms(parse_series("z1/2", ring),
                   TruncatedSeries::from_monomial(ring, mono(ring, {1, 0}), Rational(1, 2))));
  // Powers beyond the bound are fine for non-monomial bases: terms truncate.
  TruncatedSeries p = parse_series("(1 + z1)^9", ring);
  CHECK(p.coefficient(mono(ring, {8, 0})) == Rational(9));  // C(9,8)
  CHECK(p.coefficient(mono(ring, {0, 0})) == Rational(1));
}

TEST_CASE("parsing: negative exponents invert unit bases") {
  RingSpec ring{1, 8};
  CHECK(same_terms(parse_series("(1 + z1*w1)^-1", ring),
                   testutil::geometric_zw(ring, Rational(-1))));
  TruncatedSeries half = parse_series("2^-1", ring);
  CHECK(half.constant_term() == Rational(1, 2));
  CHECK(half.exact());
  TruncatedSeries sq = parse_series("(1 + z1*w1)^-2", ring);
  TruncatedSeries inv = parse_series("(1 + z1*w1)^-1", ring);
  CHECK(same_terms(sq, inv * inv));
  CHECK_THROWS_AS(parse_series("z1^-1", ring), ZeroConstantTerm);
}

TEST_CASE("parsing: errors carry byte offsets and reasons") {
  RingSpec ring{1, 8};
  // Dangling exponent.
  try {
    parse_series("z1^", ring);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset == 3);
  }
  // Literal monomial beyond the truncation bound, also through products.
  CHECK_THROWS_AS(parse_series("z1^9", ring), DegreeOverflow);
  CHECK_THROWS_AS(parse_series("z1^5*w1^4", ring), DegreeOverflow);
  CHECK_THROWS_AS(parse_series("(z1^5)*(w1^4)", ring), DegreeOverflow);
  // Non-integer denominators and division by zero.
  CHECK_THROWS_AS(parse_series("1/z1", ring), ParseError);
  CHECK_THROWS_AS(parse_series("1/0", ring), ParseError);
  // Unknown symbols, missing indices, trailing input.
  CHECK_THROWS_AS(parse_series("q1", ring), ParseError);
  CHECK_THROWS_AS(parse_series("z", ring), ParseError);
  CHECK_THROWS_AS(parse_series("z1 z1", ring), ParseError);
  CHECK_THROWS_AS(parse_series("(1 + z1", ring), ParseError);
  CHECK_THROWS_AS(parse_series("", ring), ParseError);
  // Form generators are not scalars.
  CHECK_THROWS_AS(parse_series("dz1", ring), ParseError);
  // Out-of-range variable index.
  CHECK_THROWS_AS(parse_series("z3", ring), ParseError);
}

TEST_CASE("parse inverts print on a random series corpus") {
  for (RingSpec ring : {RingSpec{1, 8}, RingSpec{2, 5}, RingSpec{3, 4}}) {
    SeriesGen gen(ring, 0x5eed0005);
    for (int trial = 0; trial < 100; ++trial) {
      TruncatedSeries s = gen.random_series(6);
      TruncatedSeries back = parse_series(to_string(s), ring);
      CHECK(same_terms(s, back));
      CHECK(to_string(back) == to_string(s));
    }
  }
}

}  // TEST_SUITE("ring")
