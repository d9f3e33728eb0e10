#include "superkoszul/twisted.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "detail.hpp"
#include "superkoszul/solver.hpp"

namespace skz {

namespace {

using detail::mask_indices;
using detail::tau_component;
using detail::top_mask;
using detail::var_masks;
using detail::VerdictBuilder;

// Unknown slot for a multivector with (0, anti)-form coefficients: the basis
// mask it sits on and the antiholomorphic form generators it multiplies.
struct Slot {
  ExtMask mask;
  std::uint32_t wmask;
};

// Solves  contraction(tau)(x) = rhs  for a multivector x of pure exterior
// degree `ext_deg` whose coefficients are (0, anti_deg)-forms, using one
// probe per unknown coefficient so every sign is inherited from the
// contraction itself.  Deterministic through the graded solver; throws
// RingError when the equation has a nonzero right-hand side but no unknowns
// (the target exterior degree exceeds the rank), SolverInconsistency when
// the system is unsolvable at some order.
Multivector solve_through_section(const EndMatrix& i_tau, int ext_deg, int anti_deg,
                                  const Multivector& rhs, const std::string& label) {
  const BundleSpec& b = i_tau.bundle();
  const RingSpec& ring = i_tau.ring();
  const ExtMask top = top_mask(b.rank);

  std::vector<Slot> slots;
  if (ext_deg >= 0 && ext_deg <= b.rank) {
    for (ExtMask u = 0; u <= top; ++u) {
      if (mask_degree(u) != ext_deg) continue;
      for (std::uint32_t wm : var_masks(ring.num_vars, anti_deg)) slots.push_back({u, wm});
    }
  }

  Multivector out = Multivector::zero(b, ring);
  if (slots.empty()) {
    if (!rhs.is_zero()) {
      std::string note = label + ": nonzero right-hand side with no unknowns at exterior degree " +
                         std::to_string(ext_deg);
      for (const auto& [mask, f] : rhs.terms()) {
        if (f.is_zero()) continue;
        if (auto w = first_nonzero_part(f, f.min_valid_order())) {
          note += " (" + mask_to_string(mask, false) + " " + detail::describe(*w) + ")";
        }
        break;
      }
      throw RingError(note);
    }
    return out;
  }

  // Coefficient series contributed by each slot to each (target mask, target
  // antiholomorphic key) equation; the contraction never touches the form
  // part, so each slot only feeds equations with its own wmask.
  std::map<std::pair<ExtMask, std::uint32_t>, std::vector<std::pair<int, TruncatedSeries>>> lhs;
  for (int idx = 0; idx < static_cast<int>(slots.size()); ++idx) {
    const Multivector probe = Multivector::from_part(
        b, ring, slots[static_cast<std::size_t>(idx)].mask,
        Form::from_part(ring, FormKey{0, slots[static_cast<std::size_t>(idx)].wmask},
                        TruncatedSeries::constant(ring, Rational(1))));
    const Multivector image = apply(i_tau, probe);
    for (const auto& [vmask, f] : image.terms()) {
      for (const auto& [key, series] : f.parts()) {
        if (series.is_zero()) continue;
        lhs[{vmask, key.wmask}].emplace_back(idx, series);
      }
    }
  }

  std::set<std::pair<ExtMask, std::uint32_t>> keys;
  for (const auto& [key, eq] : lhs) keys.insert(key);
  for (const auto& [vmask, f] : rhs.terms()) {
    for (const auto& [key, series] : f.parts()) {
      if (series.is_zero()) continue;
      if (key.zmask != 0) {
        throw RingError(label + ": right-hand side carries a holomorphic form part " +
                        to_string(key));
      }
      keys.insert({vmask, key.wmask});
    }
  }

  GradedLinearSystem system(ring, static_cast<int>(slots.size()));
  for (const auto& key : keys) {
    std::vector<std::pair<int, TruncatedSeries>> eq;
    if (auto it = lhs.find(key); it != lhs.end()) eq = it->second;
    const TruncatedSeries target = rhs.coefficient(key.first).coefficient(FormKey{0, key.second});
    system.add_equation(label + " at " + mask_to_string(key.first, false) + " " +
                            to_string(FormKey{0, key.second}),
                        std::move(eq), target);
  }

  const std::vector<TruncatedSeries> x = system.solve();
  for (int idx = 0; idx < static_cast<int>(slots.size()); ++idx) {
    const TruncatedSeries& coef = x[static_cast<std::size_t>(idx)];
    if (coef.is_zero()) continue;
    out.add_part(slots[static_cast<std::size_t>(idx)].mask,
                 Form::from_part(ring, FormKey{0, slots[static_cast<std::size_t>(idx)].wmask}, coef));
  }
  return out;
}

}  // namespace

RealSection::RealSection(const BundleSpec& bundle, const RingSpec& ring, DualMultivector tau,
                         IdealSpec ideal, std::optional<SeriesMatrix> u)
    : bundle_(bundle), ring_(ring), tau_(std::move(tau)), ideal_(std::move(ideal)) {
  require_same_bundle(bundle_, tau_.bundle());
  require_same_ring(ring_, tau_.ring());

  for (const auto& [mask, coef] : tau_.terms()) {
    const std::string name = mask_to_string(mask, true);
    if (mask_degree(mask) != 1) {
      throw RingError("section must have exterior degree one; found a term on " + name);
    }
    if (!(coef - coef.bidegree_part(0, 0)).is_zero()) {
      throw RingError("section coefficient on " + name + " is not a (0,0)-form");
    }
    if (!reduce_mod_ideal(coef.coefficient(FormKey{}), ideal_).is_zero()) {
      throw RingError("section coefficient on " + name + " does not vanish modulo the ideal");
    }
  }

  const EndMatrix i_tau = contraction(tau_);
  if (!compose(i_tau, i_tau).is_zero()) {
    throw RingError("contraction by the section does not square to zero");
  }

  const int r = bundle_.rank;
  const int m = static_cast<int>(ideal_.vars.size());
  if (u) {
    if (static_cast<int>(u->size()) != r) {
      throw RingError("certificate matrix needs one row per frame vector; expected " +
                      std::to_string(r) + ", got " + std::to_string(u->size()));
    }
    for (const auto& row : *u) {
      if (static_cast<int>(row.size()) != m) {
        throw RingError("certificate matrix needs one column per ideal variable; expected " +
                        std::to_string(m) + ", got " + std::to_string(row.size()));
      }
    }
    for (int i = 0; i < m; ++i) {
      TruncatedSeries residual = TruncatedSeries::variable(ring_, VarKind::Z, ideal_.vars[static_cast<std::size_t>(i)]);
      for (int j = 0; j < r; ++j) {
        residual = residual - (*u)[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] *
                                  tau_component(tau_, j);
      }
      if (!residual.is_zero()) {
        std::string note = "certificate for z" + std::to_string(ideal_.vars[static_cast<std::size_t>(i)]) +
                           " does not reproduce the variable through the section";
        if (auto w = first_nonzero_part(Form::scalar(residual), residual.valid_order())) {
          note += " (" + detail::describe(*w) + ")";
        }
        throw RingError(note);
      }
    }
    u_ = std::move(*u);
  } else {
    u_.assign(static_cast<std::size_t>(r),
              std::vector<TruncatedSeries>(static_cast<std::size_t>(m),
                                           TruncatedSeries::constant(ring_, Rational(0))));
    for (int i = 0; i < m; ++i) {
      GradedLinearSystem system(ring_, r);
      std::vector<std::pair<int, TruncatedSeries>> lhs;
      for (int j = 0; j < r; ++j) lhs.emplace_back(j, tau_component(tau_, j));
      system.add_equation("z" + std::to_string(ideal_.vars[static_cast<std::size_t>(i)]) +
                              " through the section",
                          std::move(lhs),
                          TruncatedSeries::variable(ring_, VarKind::Z,
                                                    ideal_.vars[static_cast<std::size_t>(i)]));
      const std::vector<TruncatedSeries> column = system.solve();
      for (int j = 0; j < r; ++j) u_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = column[static_cast<std::size_t>(j)];
    }
  }
}

FormMatrix dbar_connection_matrix(const RealSection& s) {
  const int r = s.bundle().rank;
  const RingSpec& ring = s.ring();
  FormMatrix theta(s.bundle(), ring);
  for (int j = 0; j < r; ++j) {
    const Form db = dbar(Form::scalar(tau_component(s.tau(), j)));
    for (int l = 1; l <= ring.num_vars; ++l) {
      const FormKey key{0, std::uint32_t{1} << (l - 1)};
      const TruncatedSeries rhs = db.coefficient(key);
      if (rhs.is_zero()) continue;
      GradedLinearSystem system(ring, r);
      std::vector<std::pair<int, TruncatedSeries>> lhs;
      for (int i = 0; i < r; ++i) lhs.emplace_back(i, tau_component(s.tau(), i));
      system.add_equation("parallel condition for section component " + std::to_string(j + 1) +
                              " along " + to_string(key),
                          std::move(lhs), rhs);
      const std::vector<TruncatedSeries> x = system.solve();
      for (int i = 0; i < r; ++i) {
        if (x[static_cast<std::size_t>(i)].is_zero()) continue;
        theta.set_entry(i, j,
                        theta.entry(i, j) + Form::from_part(ring, key, x[static_cast<std::size_t>(i)]));
      }
    }
  }
  return theta;
}

EndMatrix dbar_connection_extension(const BundleSpec& b, const RingSpec& r,
                                    const FormMatrix& theta) {
  require_same_bundle(b, theta.bundle());
  require_same_ring(r, theta.ring());
  std::vector<Multivector> images;
  for (int j = 0; j < b.rank; ++j) {
    Multivector img = Multivector::zero(b, r);
    for (int i = 0; i < b.rank; ++i) img.add_part(ExtMask{1} << i, theta.entry(i, j));
    images.push_back(img);
  }
  return extend_derivation(b, r, images, 1);
}

EndMatrix TwistData::differential() const {
  EndMatrix out = EndMatrix::zero(bundle, ring);
  for (const auto& piece : a) out = out + piece;
  return out;
}

TwistData build_twist(const RealSection& s) {
  const BundleSpec& b = s.bundle();
  const RingSpec& ring = s.ring();
  TwistData t{b, ring, {}};
  t.a.push_back(contraction(s.tau()));
  t.a.push_back(dbar_connection_extension(b, ring, dbar_connection_matrix(s)));
  const EndMatrix& i_tau = t.a.front();

  // Each correction annihilates the obstruction accumulated by the earlier
  // pieces: on a generator, contraction by tau of a_k(e_j) must cancel the
  // weight-k part of the square of dbar + sum of the earlier pieces.
  for (int k = 2; k <= ring.num_vars; ++k) {
    EndMatrix mu = dbar_entries(t.a[static_cast<std::size_t>(k) - 1]);
    for (int i = 1; i <= k - 1; ++i) {
      mu = mu + compose(t.a[static_cast<std::size_t>(i)], t.a[static_cast<std::size_t>(k - i)]);
    }
    std::vector<Multivector> images;
    for (int j = 0; j < b.rank; ++j) {
      const Multivector rhs = -apply(mu, Multivector::basis(b, ring, ExtMask{1} << j));
      images.push_back(solve_through_section(
          i_tau, k, k, rhs,
          "twist correction " + std::to_string(k) + " on generator " + std::to_string(j + 1)));
    }
    t.a.push_back(extend_derivation(b, ring, images, 1));
  }
  while (t.a.size() > 2 && t.a.back().is_zero()) t.a.pop_back();
  return t;
}

IdentityVerdict verify_twist(const TwistData& t) {
  VerdictBuilder builder(t.ring.truncation);
  const int count = static_cast<int>(t.a.size());
  const int top_weight = 2 * (count - 1) + 1;
  for (int m = 0; m <= top_weight; ++m) {
    EndMatrix residual = EndMatrix::zero(t.bundle, t.ring);
    for (int i = 0; i <= m; ++i) {
      const int j = m - i;
      if (i >= count || j >= count) continue;
      residual = residual + compose(t.a[static_cast<std::size_t>(i)], t.a[static_cast<std::size_t>(j)]);
    }
    if (m >= 1 && m - 1 < count) {
      residual = residual + dbar_entries(t.a[static_cast<std::size_t>(m) - 1]);
    }
    builder.take("square-zero condition at antiholomorphic weight " + std::to_string(m), residual);
  }
  return builder.finish();
}

Multivector twisted_differential(const TwistData& t, const Multivector& v) {
  return dbar(v) + apply(t.differential(), v);
}

Superconnection superconnection_A(const TwistData& t, const Connection& c) {
  require_same_bundle(t.bundle, c.bundle());
  require_same_ring(t.ring, c.ring());
  const FlatnessVerdict flat = check_flat(c);
  if (!flat.flat) throw NotFlat(*flat.witness);
  const Superconnection partial_half =
      Superconnection::partial_based(t.bundle, t.ring, {exterior_extension_matrix(c)});
  const Superconnection dbar_half = Superconnection::dbar_based(t.bundle, t.ring, t.a);
  return Superconnection::combine(partial_half, dbar_half);
}

TracedPsi psi_and_trace(const TwistData& t, const Connection& c) {
  const Superconnection a = superconnection_A(t, c);
  const EndMatrix r = supercurvature(a);
  EndMatrix psi = EndMatrix::identity(t.bundle, t.ring);
  for (int p = 0; p < t.bundle.rank; ++p) psi = compose(r, psi);
  psi = psi.scaled(Rational(1) / factorial(t.bundle.rank));
  EndMatrix trace = inclusion_i(gen_supertrace(psi));
  return {std::move(psi), std::move(trace)};
}

Form trace_value(const TracedPsi& tp, const Multivector& v) {
  return apply(tp.trace, v).coefficient(0);
}

IdentityVerdict verify_cochain_trace(const TwistData& t, const Connection& c) {
  const IdentityVerdict cocycle = verify_twist(t);
  if (!cocycle.pass) return cocycle;

  const TracedPsi tp = psi_and_trace(t, c);
  const EndMatrix md = t.differential();
  VerdictBuilder builder(t.ring.truncation);
  builder.take(cocycle);
  builder.take("twisted differential against psi",
               dbar_entries(tp.psi) + supercommutator(md, tp.psi));
  builder.take("twisted differential against the trace row",
               dbar_entries(tp.trace) + supercommutator(md, tp.trace));

  const ExtMask top = top_mask(t.bundle.rank);
  for (int l = 0; l <= t.ring.num_vars; ++l) {
    for (std::uint32_t wm : var_masks(t.ring.num_vars, l)) {
      const Form coef = Form::from_part(t.ring, FormKey{0, wm},
                                        TruncatedSeries::constant(t.ring, Rational(1)));
      for (ExtMask mask = 0; mask <= top; ++mask) {
        const Multivector v = Multivector::from_part(t.bundle, t.ring, mask, coef);
        const Form lhs = dbar(trace_value(tp, v));
        const Form rhs = trace_value(tp, twisted_differential(t, v));
        builder.take("trace cochain on " + to_string(FormKey{0, wm}) + " " +
                         mask_to_string(mask, false),
                     lhs - rhs);
      }
    }
  }
  return builder.finish();
}

EndMatrix ComparisonData::total() const {
  EndMatrix out = EndMatrix::zero(bundle, ring);
  for (const auto& piece : u_tilde) out = out + piece;
  return out;
}

ComparisonData build_comparison(const RealSection& s, const TwistData& t) {
  const BundleSpec& b = s.bundle();
  const RingSpec& ring = s.ring();
  const int r = b.rank;
  if (static_cast<int>(s.ideal().vars.size()) != r) {
    throw RingError("comparison requires one ideal variable per frame vector; rank " +
                    std::to_string(r) + " with " + std::to_string(s.ideal().vars.size()) +
                    " ideal variables");
  }

  std::vector<TruncatedSeries> components;
  for (int i : s.ideal().vars) {
    components.push_back(TruncatedSeries::variable(ring, VarKind::Z, i));
  }
  ComparisonData cmp{b, ring, s.ideal(), DualMultivector::covector(b, ring, components),
                     s.u(), {}};

  // Exterior powers of the certificate matrix: minor determinants.
  FormMatrix uf(b, ring);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      uf.set_entry(i, j, Form::scalar(s.u()[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
    }
  }
  const ExtMask top = top_mask(r);
  EndMatrix u0 = EndMatrix::zero(b, ring);
  for (ExtMask source = 0; source <= top; ++source) {
    const std::vector<int> cols = mask_indices(source);
    for (ExtMask target = 0; target <= top; ++target) {
      if (mask_degree(target) != mask_degree(source)) continue;
      const Form minor = wedge_determinant(uf, mask_indices(target), cols);
      if (!minor.is_zero()) u0.add_entry(target, source, minor);
    }
  }
  cmp.u_tilde.push_back(std::move(u0));

  // Higher components, solved source degree by source degree: contraction by
  // tau of the new column equals what the chain condition demands from the
  // already-known columns and lower components.
  const EndMatrix& i_tau = t.a.front();
  const EndMatrix i_nu = contraction(cmp.nu);
  for (int l = 1; l <= ring.num_vars; ++l) {
    EndMatrix ul = EndMatrix::zero(b, ring);
    for (int deg = 0; deg <= r; ++deg) {
      for (ExtMask source = 0; source <= top; ++source) {
        if (mask_degree(source) != deg) continue;
        const Multivector f_t = Multivector::basis(b, ring, source);
        Multivector rhs = apply(ul, apply(i_nu, f_t));
        rhs = rhs - dbar(apply(cmp.u_tilde[static_cast<std::size_t>(l) - 1], f_t));
        for (int k = 1; k <= l && k < static_cast<int>(t.a.size()); ++k) {
          rhs = rhs - apply(t.a[static_cast<std::size_t>(k)],
                            apply(cmp.u_tilde[static_cast<std::size_t>(l - k)], f_t));
        }
        const Multivector x = solve_through_section(
            i_tau, deg + l, l, rhs,
            "comparison component " + std::to_string(l) + " at source " +
                mask_to_string(source, false));
        for (const auto& [target, f] : x.terms()) ul.add_entry(target, source, f);
      }
    }
    cmp.u_tilde.push_back(std::move(ul));
  }
  while (cmp.u_tilde.size() > 1 && cmp.u_tilde.back().is_zero()) cmp.u_tilde.pop_back();
  return cmp;
}

IdentityVerdict verify_comparison_chain(const ComparisonData& cmp, const TwistData& t) {
  VerdictBuilder builder(cmp.ring.truncation);
  const EndMatrix u = cmp.total();
  const EndMatrix i_nu = contraction(cmp.nu);
  const EndMatrix md = t.differential();
  builder.take("comparison chain condition",
               dbar_entries(u) + compose(md, u) - compose(u, i_nu));
  const ExtMask top = top_mask(cmp.bundle.rank);
  for (ExtMask mask = 0; mask <= top; ++mask) {
    const Multivector f_t = Multivector::basis(cmp.bundle, cmp.ring, mask);
    const Multivector residual =
        twisted_differential(t, apply(u, f_t)) - apply(u, apply(i_nu, f_t));
    builder.take("comparison chain on " + mask_to_string(mask, false), residual);
  }
  return builder.finish();
}

IdentityVerdict fundamental_class_local_twisted(const ComparisonData& cmp, const TracedPsi& tp) {
  VerdictBuilder builder(cmp.ring.truncation);
  const ExtMask top = top_mask(cmp.bundle.rank);
  const Form eta =
      trace_value(tp, apply(cmp.total(), Multivector::basis(cmp.bundle, cmp.ring, top)));
  Form target = Form::scalar(TruncatedSeries::constant(cmp.ring, Rational(1)));
  for (int i : cmp.ideal.vars) {
    target = wedge(target, partial(Form::scalar(TruncatedSeries::variable(cmp.ring, VarKind::Z, i))));
  }
  builder.take("local fundamental class modulo the ideal",
               reduce_mod_ideal(eta, cmp.ideal) - reduce_mod_ideal(target, cmp.ideal));
  return builder.finish();
}

Form augmentation(const Multivector& v, const IdealSpec& ideal) {
  return reduce_mod_ideal(v.coefficient(0), ideal);
}

}  // namespace skz
