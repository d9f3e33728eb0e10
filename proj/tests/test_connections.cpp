#include <string>
#include <vector>

#include "doctest.h"
#include "superkoszul/connections.hpp"
#include "superkoszul/forms.hpp"
#include "superkoszul/ring.hpp"
#include "superkoszul/superlinear.hpp"
#include "test_util.hpp"

using namespace skz;
using testutil::SeriesGen;

namespace {

bool same_form(const Form& a, const Form& b) { return (a - b).is_zero(); }
bool same_matrix(const EndMatrix& a, const EndMatrix& b) { return (a - b).is_zero(); }
bool same_mv(const Multivector& a, const Multivector& b) { return (a - b).is_zero(); }

Form scalar_one(const RingSpec& ring) {
  return Form::scalar(TruncatedSeries::constant(ring, 1));
}

using testutil::curved_line_connection;
using testutil::random_flat_rank2;

Connection diagonal_part_rank2(SeriesGen& gen, const RingSpec& ring) {
  Form d0 = partial(Form::scalar(gen.random_series(4)));
  Form d1 = partial(Form::scalar(gen.random_series(4)));
  FormMatrix gamma(BundleSpec{2}, ring);
  gamma.set_entry(0, 0, d0);
  gamma.set_entry(1, 1, d1);
  return Connection(BundleSpec{2}, ring, gamma);
}

}  // namespace

TEST_SUITE("connections") {

TEST_CASE("wedge determinant: pins and permutation-sum oracle") {
  RingSpec ring{3, 4};
  BundleSpec b2{2};
  SeriesGen gen(ring, 0xc0ffee01);

  // 2x2 of scalars: ordinary ad - bc.
  TruncatedSeries a = gen.random_series(3), b = gen.random_series(3);
  TruncatedSeries c = gen.random_series(3), d = gen.random_series(3);
  FormMatrix m(b2, ring);
  m.set_entry(0, 0, Form::scalar(a));
  m.set_entry(0, 1, Form::scalar(b));
  m.set_entry(1, 0, Form::scalar(c));
  m.set_entry(1, 1, Form::scalar(d));
  CHECK(same_form(wedge_determinant(m), Form::scalar(a * d - b * c)));

  // One-entry minors are the entries themselves.
  CHECK(same_form(wedge_determinant(m, {0}, {1}), Form::scalar(b)));
  CHECK(same_form(wedge_determinant(m, {}, {}), scalar_one(ring)));

  // 3x3 of random (1,1)-forms against the explicit permutation sum.
  BundleSpec b3{3};
  FormMatrix r(b3, ring);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Form f(ring);
      for (int zi = 0; zi < 3; ++zi) {
        for (int wi = 0; wi < 3; ++wi) {
          f.add_part(FormKey{1u << zi, 1u << wi}, gen.random_series(1));
        }
      }
      r.set_entry(i, j, f);
    }
  }
  struct Perm { int s0, s1, s2; int sign; };
  const Perm perms[] = {{0, 1, 2, 1}, {0, 2, 1, -1}, {1, 0, 2, -1},
                        {1, 2, 0, 1}, {2, 0, 1, 1},  {2, 1, 0, -1}};
  Form oracle(ring);
  for (const Perm& p : perms) {
    Form term = wedge(r.entry(0, p.s0), wedge(r.entry(1, p.s1), r.entry(2, p.s2)));
    oracle = (p.sign > 0) ? oracle + term : oracle - term;
  }
  CHECK(same_form(wedge_determinant(r), oracle));

  // Selection validation.
  CHECK_THROWS_AS(wedge_determinant(m, {0, 1}, {0}), RingError);
  CHECK_THROWS_AS(wedge_determinant(m, {1, 0}, {0, 1}), RingError);
  CHECK_THROWS_AS(wedge_determinant(m, {0, 2}, {0, 1}), RingError);
}

TEST_CASE("connection validation enforces bidegree (1,0)") {
  RingSpec ring{1, 6};
  TruncatedSeries z = TruncatedSeries::variable(ring, VarKind::Z, 1);
  TruncatedSeries w = TruncatedSeries::variable(ring, VarKind::W, 1);

  FormMatrix bad(BundleSpec{1}, ring);
  bad.set_entry(0, 0, Form::from_part(ring, FormKey{0, 1}, -(z * w)));
  CHECK_THROWS_AS(Connection(BundleSpec{1}, ring, bad), RingError);

  FormMatrix good(BundleSpec{1}, ring);
  good.set_entry(0, 0, Form::from_part(ring, FormKey{1, 0}, z * w));
  CHECK_NOTHROW(Connection(BundleSpec{1}, ring, good));
}

TEST_CASE("check_flat: trivial and curved examples, witness for failure") {
  RingSpec line{1, 8};
  CHECK(check_flat(Connection::zero(BundleSpec{2}, line)).flat);
  CHECK(check_flat(Connection::zero(BundleSpec{2}, line)).verified_order == 8);

  // ∂Γ lands on dz∧dz and Γ∧Γ repeats dz: flat for any single-variable Γ.
  FlatnessVerdict curved = check_flat(curved_line_connection(line));
  CHECK(curved.flat);
  CHECK(curved.verified_order == 8);

  // Γ = z2 dz1 over two variables: ∂Γ = dz2∧dz1 ≠ 0.
  RingSpec plane{2, 4};
  TruncatedSeries z2 = TruncatedSeries::variable(plane, VarKind::Z, 2);
  FormMatrix gamma(BundleSpec{1}, plane);
  gamma.set_entry(0, 0, Form::from_part(plane, FormKey{1, 0}, z2));
  FlatnessVerdict verdict = check_flat(Connection(BundleSpec{1}, plane, gamma));
  CHECK_FALSE(verdict.flat);
  REQUIRE(verdict.witness.has_value());
  CHECK(verdict.witness->row == 1);
  CHECK(verdict.witness->col == 1);
  CHECK(verdict.witness->to_string() == "entry (1, 1), part dz1*dz2, monomial 1");

  // Conjugated diagonal-exact family stays flat with full matrix structure.
  RingSpec ring{2, 5};
  SeriesGen gen(ring, 0xf1a70001);
  for (int trial = 0; trial < 10; ++trial) {
    FlatnessVerdict v = check_flat(random_flat_rank2(gen, ring, Rational(2, 3)));
    CHECK(v.flat);
    CHECK(v.verified_order == 5);
  }

  // A generic matrix of (1,0)-forms is not flat.
  FormMatrix generic(BundleSpec{2}, ring);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Form f(ring);
      f.add_part(FormKey{1, 0}, gen.random_series(2));
      f.add_part(FormKey{2, 0}, gen.random_series(2));
      generic.set_entry(i, j, f);
    }
  }
  CHECK_FALSE(check_flat(Connection(BundleSpec{2}, ring, generic)).flat);
}

TEST_CASE("dual connection: pairing identity on all frame pairs") {
  RingSpec ring{2, 5};
  SeriesGen gen(ring, 0xd0a10002);
  BundleSpec bundle{3};
  FormMatrix gamma(bundle, ring);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Form f(ring);
      f.add_part(FormKey{1, 0}, gen.random_series(2));
      f.add_part(FormKey{2, 0}, gen.random_series(2));
      gamma.set_entry(i, j, f);
    }
  }
  Connection c(bundle, ring, gamma);
  Connection dual = dual_connection(c);
  // 0 = ∂⟨e^i, e_j⟩ = ⟨∇e^i, e_j⟩ + ⟨e^i, ∇e_j⟩ = Γ^∨[j][i] + Γ[i][j].
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK((dual.gamma().entry(j, i) + c.gamma().entry(i, j)).is_zero());
    }
  }

  // Rank 1: Γ = g dz ↦ −g dz.
  RingSpec line{1, 6};
  SeriesGen lgen(line, 0xd0a10003);
  FormMatrix g1(BundleSpec{1}, line);
  g1.set_entry(0, 0, Form::from_part(line, FormKey{1, 0}, lgen.random_series(3)));
  Connection cl(BundleSpec{1}, line, g1);
  CHECK(same_form(dual_connection(cl).gamma().entry(0, 0), -g1.entry(0, 0)));
}

TEST_CASE("exterior extension: generator pins and the super-Leibniz rule") {
  RingSpec ring{2, 5};
  SeriesGen gen(ring, 0xe17e0003);
  BundleSpec bundle{2};

  CHECK(exterior_extension_matrix(Connection::zero(bundle, ring)).is_zero());

  // Rank 1: the matrix part sends e_1 to Γ₁₁ ⊗ e_1.
  RingSpec line{1, 6};
  Connection cl = curved_line_connection(line);
  EndMatrix m1 = exterior_extension_matrix(cl);
  CHECK(same_form(m1.entry(1, 1), cl.gamma().entry(0, 0)));
  CHECK(m1.entry(0, 0).is_zero());
  CHECK(m1.entry(0, 1).is_zero());

  // Pinned expansion on the top wedge: D(e1∧e2) = De1∧e2 − e1∧De2.
  Connection c = random_flat_rank2(gen, ring, Rational(1, 2));
  EndMatrix m = exterior_extension_matrix(c);
  Multivector e1 = Multivector::basis(bundle, ring, 0b01);
  Multivector e2 = Multivector::basis(bundle, ring, 0b10);
  Multivector e12 = Multivector::basis(bundle, ring, 0b11);
  CHECK(same_mv(apply(m, e12),
                mv_wedge(apply(m, e1), e2) - mv_wedge(e1, apply(m, e2))));

  // Full operator A = ∂ + D is an odd superderivation of the wedge product.
  Superconnection nabla = Superconnection::partial_based(bundle, ring, {m});
  for (int trial = 0; trial < 12; ++trial) {
    Multivector v = testutil::random_multivector(gen, bundle, ring, 3);
    Multivector w = testutil::random_multivector(gen, bundle, ring, 3);
    for (int pv = 0; pv < 2; ++pv) {
      Multivector vp = v.parity_part(pv);
      Multivector lhs = nabla.apply_to(mv_wedge(vp, w));
      Multivector rhs = mv_wedge(nabla.apply_to(vp), w);
      Multivector second = mv_wedge(vp, nabla.apply_to(w));
      rhs = pv ? rhs - second : rhs + second;
      CHECK(same_mv(lhs, rhs));
    }
  }
}

TEST_CASE("curvature: series oracle, closedness, and the exterior-algebra oracle") {
  RingSpec line{1, 8};
  Connection cl = curved_line_connection(line);
  FormMatrix R = curvature_R(cl);

  // Independent oracle: (1+zw)^{-2} = Σ (−1)^k (k+1) (zw)^k, and the result
  // sits on dw∧dz = −dz∧dw.
  TruncatedSeries oracle =
      testutil::diagonal_series(line, {Rational(1), Rational(-2), Rational(3), Rational(-4), Rational(5)});
  TruncatedSeries coef = R.entry(0, 0).coefficient(FormKey{1, 1});
  auto agree = agree_order(coef, -oracle);
  REQUIRE(agree.has_value());
  CHECK(*agree >= 7);
  CHECK(first_nonzero_part(R.entry(0, 0) - R.entry(0, 0).bidegree_part(1, 1), 8) == std::nullopt);

  CHECK(curvature_R(Connection::zero(BundleSpec{2}, line)).is_zero());

  // Non-flat input is rejected with a located witness.
  RingSpec plane{2, 4};
  TruncatedSeries z2 = TruncatedSeries::variable(plane, VarKind::Z, 2);
  FormMatrix bad(BundleSpec{1}, plane);
  bad.set_entry(0, 0, Form::from_part(plane, FormKey{1, 0}, z2));
  CHECK_THROWS_WITH_AS(curvature_R(Connection(BundleSpec{1}, plane, bad)),
                       doctest::Contains("entry (1, 1)"), NotFlat);

  // Random flat family: entries are ∂̄-closed, and conjugating the curvature
  // matrix into the exterior algebra matches ∂̄ of the derivation extension.
  RingSpec ring{2, 5};
  SeriesGen gen(ring, 0xc04e0004);
  BundleSpec bundle{2};
  for (int trial = 0; trial < 8; ++trial) {
    Connection c = random_flat_rank2(gen, ring, Rational(-3, 2));
    FormMatrix curv = curvature_R(c);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) CHECK(dbar(curv.entry(i, j)).is_zero());
    }
    EndMatrix lhs = dbar_entries(exterior_extension_matrix(c));
    std::vector<Multivector> images;
    for (int j = 0; j < 2; ++j) {
      Multivector image(bundle, ring);
      for (int i = 0; i < 2; ++i) image.add_part(ExtMask{1} << i, -curv.entry(j, i));
      images.push_back(image);
    }
    CHECK(same_matrix(lhs, extend_derivation(bundle, ring, images, 0)));
  }
}

TEST_CASE("top Chern form: pins, constant-gauge invariance, bidegree guard") {
  RingSpec line{1, 8};
  CHECK(chern_form_top(curvature_R(Connection::zero(BundleSpec{2}, line))).is_zero());

  Connection cl = curved_line_connection(line);
  FormMatrix R = curvature_R(cl);
  CHECK(same_form(chern_form_top(R), R.entry(0, 0)));

  // Diagonal matrices multiply their diagonal entries.
  RingSpec ring{2, 5};
  SeriesGen gen(ring, 0xc4e60005);
  FormMatrix diag(BundleSpec{2}, ring);
  Form d0 = Form::from_part(ring, FormKey{1, 1}, gen.random_series(3));
  Form d1 = Form::from_part(ring, FormKey{2, 2}, gen.random_series(3));
  diag.set_entry(0, 0, d0);
  diag.set_entry(1, 1, d1);
  CHECK(same_form(chern_form_top(diag), wedge(d0, d1)));

  // Conjugating the connection by a constant matrix keeps det(R).
  {
    SeriesGen base_gen(ring, 0xc4e60006);
    SeriesGen conj_gen(ring, 0xc4e60006);
    Connection plain = diagonal_part_rank2(base_gen, ring);
    Connection conjugated = random_flat_rank2(conj_gen, ring, Rational(5, 7));
    CHECK(same_form(chern_form_top(curvature_R(plain)),
                    chern_form_top(curvature_R(conjugated))));
  }

  FormMatrix off(BundleSpec{1}, ring);
  off.set_entry(0, 0, Form::generator(ring, VarKind::Z, 1));
  CHECK_THROWS_AS(chern_form_top(off), RingError);
}

TEST_CASE("supercurvature: square oracle, parity, module linearity, guards") {
  RingSpec ring{2, 5};
  SeriesGen gen(ring, 0x5c0e0007);
  BundleSpec bundle{2};

  // Both halves trivial: zero curvature.
  Superconnection trivial = Superconnection::combine(
      Superconnection::partial_based(bundle, ring, {}),
      Superconnection::dbar_based(bundle, ring, {}));
  CHECK(supercurvature(trivial).is_zero());

  // ∇̃ = ∂̄ + ∇ for a flat connection: A² on every frame multivector.
  Connection c = random_flat_rank2(gen, ring, Rational(4, 3));
  Superconnection A = Superconnection::combine(
      Superconnection::partial_based(bundle, ring, {exterior_extension_matrix(c)}),
      Superconnection::dbar_based(bundle, ring, {}));
  EndMatrix curv = supercurvature(A);
  for (ExtMask s = 0; s < 4; ++s) {
    Multivector basis = Multivector::basis(bundle, ring, s);
    CHECK(same_mv(A.apply_to(A.apply_to(basis)), apply(curv, basis)));
  }
  CHECK(curv.total_parity_part(1).is_zero());
  CHECK(same_matrix(A.square(), curv));

  // R_A(ω ∧ v) = ω ∧ R_A(v).
  for (int trial = 0; trial < 10; ++trial) {
    Form w = testutil::random_form(gen, ring, 3);
    Multivector v = testutil::random_multivector(gen, bundle, ring, 3);
    CHECK(same_mv(apply(curv, left_form_mult(w, v)), left_form_mult(w, apply(curv, v))));
  }

  // Non-flat (1,0) half is refused with its witness.
  RingSpec plane{2, 4};
  TruncatedSeries z2 = TruncatedSeries::variable(plane, VarKind::Z, 2);
  FormMatrix bad_gamma(BundleSpec{1}, plane);
  bad_gamma.set_entry(0, 0, Form::from_part(plane, FormKey{1, 0}, z2));
  Connection bad(BundleSpec{1}, plane, bad_gamma);
  Superconnection bad_a = Superconnection::combine(
      Superconnection::partial_based(BundleSpec{1}, plane, {exterior_extension_matrix(bad)}),
      Superconnection::dbar_based(BundleSpec{1}, plane, {}));
  try {
    supercurvature(bad_a);
    FAIL("expected NotFlatHalves");
  } catch (const NotFlatHalves& e) {
    CHECK(e.half == "(1,0)");
  }

  // A (0,1) half whose square has a ∂̄ residue is refused as well.
  EndMatrix md = EndMatrix::zero(bundle, ring);
  md.add_entry(0, 0b01, Form::scalar(TruncatedSeries::variable(ring, VarKind::Z, 1) *
                                     TruncatedSeries::variable(ring, VarKind::W, 1)));
  Superconnection half_bad = Superconnection::combine(
      Superconnection::partial_based(bundle, ring, {}),
      Superconnection::dbar_based(bundle, ring, {md}));
  try {
    supercurvature(half_bad);
    FAIL("expected NotFlatHalves");
  } catch (const NotFlatHalves& e) {
    CHECK(e.half == "(0,1)");
  }

  // Structural guards: even pieces and mismatched halves are rejected.
  EndMatrix even_piece = EndMatrix::zero(bundle, ring);
  even_piece.add_entry(0b01, 0b10, scalar_one(ring));
  CHECK_THROWS_AS(Superconnection::dbar_based(bundle, ring, {even_piece}), RingError);
  CHECK_THROWS_AS(Superconnection::combine(Superconnection::dbar_based(bundle, ring, {}),
                                           Superconnection::dbar_based(bundle, ring, {})),
                  RingError);
  CHECK_THROWS_AS(supercurvature(Superconnection::dbar_based(bundle, ring, {})), RingError);
}

TEST_CASE("curvature satisfies the differential Bianchi identity") {
  auto bianchi_holds = [](const Connection& dual) {
    EndMatrix m = exterior_extension_matrix(dual);
    EndMatrix r_op = dbar_entries(m);
    EndMatrix residue = dbar_entries(r_op) + partial_entries(r_op) + supercommutator(m, r_op);
    return residue.is_zero();
  };

  RingSpec line{1, 8};
  CHECK(bianchi_holds(dual_connection(curved_line_connection(line))));

  RingSpec ring{2, 5};
  SeriesGen gen(ring, 0xb1a40008);
  for (int trial = 0; trial < 6; ++trial) {
    CHECK(bianchi_holds(dual_connection(random_flat_rank2(gen, ring, Rational(trial + 1, 2)))));
  }
}

TEST_CASE("chern character: rank-2 cancellation and rank-1 exponential oracle") {
  RingSpec ring{2, 6};
  SeriesGen gen(ring, 0xc6a20009);
  BundleSpec b2{2};

  Superconnection flat_triv = Superconnection::combine(
      Superconnection::partial_based(b2, ring, {exterior_extension_matrix(Connection::zero(b2, ring))}),
      Superconnection::dbar_based(b2, ring, {}));
  CHECK(chern_character(flat_triv).is_zero());

  // Rank 1 over two variables: ⋀E = 1 ⊕ E, so the character must equal
  // 1 − exp(R_E) with R_E = ∂̄Γ; the oracle builds the exponential directly.
  BundleSpec b1{1};
  for (int trial = 0; trial < 6; ++trial) {
    Form gamma_form = partial(Form::scalar(gen.random_series(4)));
    FormMatrix gamma(b1, ring);
    gamma.set_entry(0, 0, gamma_form);
    Connection c(b1, ring, gamma);
    Superconnection A = Superconnection::combine(
        Superconnection::partial_based(b1, ring, {exterior_extension_matrix(c)}),
        Superconnection::dbar_based(b1, ring, {}));
    Form r_e = dbar(gamma_form);
    Form expected = -r_e - wedge(r_e, r_e).scaled(Rational(1, 2));
    CHECK(same_form(chern_character(A), expected));
  }

  // Single variable pair: the character reduces to the dual curvature form.
  RingSpec line{1, 8};
  Connection cl = curved_line_connection(line);
  Superconnection Al = Superconnection::combine(
      Superconnection::partial_based(b1, line, {exterior_extension_matrix(cl)}),
      Superconnection::dbar_based(b1, line, {}));
  CHECK(same_form(chern_character(Al), curvature_R(cl).entry(0, 0)));
}

}  // TEST_SUITE
