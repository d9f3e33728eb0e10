#include "superkoszul/koszul.hpp"

#include <algorithm>
#include <random>
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

void require_degree(const BundleSpec& b, int p, const char* what) {
  if (p < 0 || p > b.rank) {
    throw RingError(std::string(what) + " expects an exterior degree between 0 and " +
                    std::to_string(b.rank) + ", got " + std::to_string(p));
  }
}

// Small deterministic series with bounded support for sampling-based checks.
TruncatedSeries sample_series(std::mt19937_64& rng, const RingSpec& ring, bool z_only) {
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<int> var(1, ring.num_vars);
  std::uniform_int_distribution<int> kind(0, z_only ? 0 : 1);
  std::uniform_int_distribution<int> len(0, 2);
  TruncatedSeries out = TruncatedSeries::constant(ring, Rational(coef(rng)));
  for (int t = 0; t < 2; ++t) {
    TruncatedSeries term = TruncatedSeries::constant(ring, Rational(coef(rng)));
    const int factors = len(rng);
    for (int f = 0; f < factors; ++f) {
      const VarKind k = kind(rng) == 0 ? VarKind::Z : VarKind::W;
      term = term * TruncatedSeries::variable(ring, k, var(rng));
    }
    out = out + term;
  }
  return out;
}

// A pseudorandom dbar-closed (q, q)-form: a combination of holomorphic
// coefficients on (q, q) generators plus dbar of a random (q, q-1)-form.
Form sample_closed_form(std::mt19937_64& rng, const RingSpec& ring, int q) {
  Form out = Form::zero(ring);
  for (std::uint32_t zm : var_masks(ring.num_vars, q)) {
    for (std::uint32_t wm : var_masks(ring.num_vars, q)) {
      if (rng() % 2 == 0) continue;
      out = out + Form::from_part(ring, FormKey{zm, wm}, sample_series(rng, ring, true));
    }
  }
  if (q >= 1) {
    Form pre = Form::zero(ring);
    for (std::uint32_t zm : var_masks(ring.num_vars, q)) {
      for (std::uint32_t wm : var_masks(ring.num_vars, q - 1)) {
        if (rng() % 2 == 0) continue;
        pre = pre + Form::from_part(ring, FormKey{zm, wm}, sample_series(rng, ring, false));
      }
    }
    out = out + dbar(pre);
  }
  return out;
}

}  // namespace

bool is_holomorphic(const TruncatedSeries& a) {
  const int n = a.ring().num_vars;
  for (const auto& [mono, coef] : a.terms()) {
    (void)coef;
    for (int i = 1; i <= n; ++i) {
      if (mono.exponent(VarKind::W, i) != 0) return false;
    }
  }
  return true;
}

Form reduce_mod_ideal(const Form& f, const IdealSpec& ideal) {
  Form out = Form::zero(f.ring());
  for (const auto& [key, coef] : f.parts()) {
    out.add_part(key, reduce_mod_ideal(coef, ideal));
  }
  return out;
}

KoszulData::KoszulData(const BundleSpec& bundle, const RingSpec& ring, DualMultivector tau,
                       Connection connection, IdealSpec ideal)
    : bundle_(bundle),
      ring_(ring),
      tau_(std::move(tau)),
      connection_(std::move(connection)),
      ideal_(std::move(ideal)),
      curvature_(bundle, ring),
      nabla_tau_(DualMultivector::zero(bundle, ring)),
      r_tau_(DualMultivector::zero(bundle, ring)) {
  require_same_bundle(bundle_, tau_.bundle());
  require_same_ring(ring_, tau_.ring());
  require_same_bundle(bundle_, connection_.bundle());
  require_same_ring(ring_, connection_.ring());

  for (const auto& [mask, coef] : tau_.terms()) {
    const std::string name = mask_to_string(mask, true);
    if (mask_degree(mask) != 1) {
      throw RingError("section must have exterior degree one; found a term on " + name);
    }
    if (!(coef - coef.bidegree_part(0, 0)).is_zero()) {
      throw RingError("section coefficient on " + name + " is not a (0,0)-form");
    }
    if (!is_holomorphic(coef.coefficient(FormKey{}))) {
      throw RingError("section coefficient on " + name + " involves antiholomorphic variables");
    }
  }

  const FlatnessVerdict flat = check_flat(connection_);
  if (!flat.flat) throw NotFlat(*flat.witness);

  const EndMatrix i_tau = contraction(tau_);
  if (!compose(i_tau, i_tau).is_zero()) {
    throw RingError("contraction by the section does not square to zero");
  }

  const int r = bundle_.rank;
  for (int i : ideal_.vars) {
    GradedLinearSystem system(ring_, r);
    std::vector<std::pair<int, TruncatedSeries>> lhs;
    for (int j = 0; j < r; ++j) lhs.emplace_back(j, tau_component(tau_, j));
    system.add_equation("z" + std::to_string(i) + " through the section", std::move(lhs),
                        TruncatedSeries::variable(ring_, VarKind::Z, i));
    certificates_.push_back(system.solve());
  }

  curvature_ = curvature_R(connection_);
  const FormMatrix dual_gamma = dual_connection(connection_).gamma();
  std::vector<Form> nabla_parts;
  std::vector<Form> r_parts;
  for (int k = 0; k < r; ++k) {
    Form nb = partial(Form::scalar(tau_component(tau_, k)));
    Form rt = Form::zero(ring_);
    for (int j = 0; j < r; ++j) {
      const Form alpha = Form::scalar(tau_component(tau_, j));
      nb = nb + wedge(dual_gamma.entry(k, j), alpha);
      rt = rt + wedge(curvature_.entry(k, j), alpha);
    }
    nabla_parts.push_back(nb);
    r_parts.push_back(rt);
  }
  nabla_tau_ = DualMultivector::covector_forms(bundle_, ring_, nabla_parts);
  r_tau_ = DualMultivector::covector_forms(bundle_, ring_, r_parts);
}

int phi_sign(const BundleSpec& b, ExtMask s) {
  const ExtMask top = top_mask(b.rank);
  if ((s & ~top) != 0) {
    throw RingError("basis mask " + mask_to_string(s, false) + " exceeds rank " +
                    std::to_string(b.rank));
  }
  return merge_sign(top ^ s, s);
}

int phi_inverse_sign(const BundleSpec& b, ExtMask t) {
  const ExtMask top = top_mask(b.rank);
  if ((t & ~top) != 0) {
    throw RingError("basis mask " + mask_to_string(t, true) + " exceeds rank " +
                    std::to_string(b.rank));
  }
  return merge_sign(t, top ^ t);
}

EndMatrix curvature_transform_matrix(const BundleSpec& b, const FormMatrix& r, int p) {
  require_same_bundle(b, r.bundle());
  require_degree(b, p, "curvature transform");
  const ExtMask top = top_mask(b.rank);
  const int m = b.rank - p;
  EndMatrix out = EndMatrix::zero(b, r.ring());
  for (ExtMask s = 0; s <= top; ++s) {
    if (mask_degree(s) != p) continue;
    const std::vector<int> cols = mask_indices(top ^ s);
    const int sign_s = phi_sign(b, s);
    for (ExtMask u = 0; u <= top; ++u) {
      if (mask_degree(u) != m) continue;
      const Form minor = wedge_determinant(r, mask_indices(u), cols);
      const int sign = sign_s * phi_inverse_sign(b, u);
      out.add_entry(top ^ u, s, sign < 0 ? -minor : minor);
    }
  }
  return out;
}

EndMatrix curvature_transform(const KoszulData& k, int p) {
  return curvature_transform_matrix(k.bundle(), k.curvature(), p);
}

EndMatrix psi_component(const KoszulData& k, int p) {
  require_degree(k.bundle(), p, "psi");
  EndMatrix acc = curvature_transform(k, p);
  const EndMatrix n = contraction(k.nabla_tau());
  for (int q = 0; q < p; ++q) acc = compose(n, acc);
  return acc.scaled(Rational(1) / factorial(p));
}

Form psi_value(const KoszulData& k, int p, ExtMask source) {
  if (mask_degree(source) != p) {
    throw RingError("psi_" + std::to_string(p) + " applied to a basis element of degree " +
                    std::to_string(mask_degree(source)));
  }
  return psi_component(k, p).entry(0, source);
}

std::vector<EndMatrix> psi_sequence(const KoszulData& k) {
  std::vector<EndMatrix> out;
  for (int p = 0; p <= k.bundle().rank; ++p) out.push_back(psi_component(k, p));
  return out;
}

IdentityVerdict verify_bracket_facts(const KoszulData& k) {
  VerdictBuilder builder(k.ring().truncation);
  const EndMatrix n = contraction(k.nabla_tau());
  const EndMatrix rt = contraction(k.r_tau());
  builder.take("[dbar, contraction(nabla tau)] - contraction(R tau)", dbar_entries(n) - rt);
  builder.take("[contraction(nabla tau), contraction(R tau)]", supercommutator(n, rt));
  return builder.finish();
}

IdentityVerdict verify_chain_ladder(const KoszulData& k, const std::vector<EndMatrix>& psi) {
  const int r = k.bundle().rank;
  if (static_cast<int>(psi.size()) != r + 1) {
    throw RingError("chain ladder expects " + std::to_string(r + 1) + " maps, got " +
                    std::to_string(psi.size()));
  }
  VerdictBuilder builder(k.ring().truncation);
  const EndMatrix i_tau = contraction(k.tau());
  for (int p = 1; p <= r; ++p) {
    builder.take("chain ladder at degree " + std::to_string(p),
                 dbar_entries(psi[static_cast<std::size_t>(p)]) -
                     compose(psi[static_cast<std::size_t>(p) - 1], i_tau));
  }
  return builder.finish();
}

IdentityVerdict verify_chain_map_psi(const KoszulData& k, int samples, std::uint64_t seed) {
  const int r = k.bundle().rank;
  const RingSpec& ring = k.ring();
  VerdictBuilder builder(ring.truncation);

  const IdentityVerdict ladder = verify_chain_ladder(k, psi_sequence(k));

  const EndMatrix n = contraction(k.nabla_tau());
  const EndMatrix rt = contraction(k.r_tau());
  EndMatrix prev = EndMatrix::identity(k.bundle(), ring);
  EndMatrix power = EndMatrix::identity(k.bundle(), ring);
  for (int p = 1; p <= r; ++p) {
    power = compose(n, power);
    builder.take("iterated bracket at power " + std::to_string(p),
                 dbar_entries(power) - compose(prev, rt).scaled(Rational(p)));
    prev = power;
  }

  std::mt19937_64 rng(seed);
  EndMatrix scaled_prev = EndMatrix::identity(k.bundle(), ring);
  EndMatrix scaled_power = EndMatrix::identity(k.bundle(), ring);
  for (int p = 1; p <= r; ++p) {
    scaled_power = compose(n, scaled_power).scaled(Rational(1, p));
    const ExtMask top = top_mask(r);
    for (int t = 0; t < samples; ++t) {
      Multivector v = Multivector::zero(k.bundle(), ring);
      for (ExtMask mask = 0; mask <= top; ++mask) {
        if (mask_degree(mask) != p) continue;
        v.add_part(mask, sample_closed_form(rng, ring, r - p));
      }
      const Form lhs = dbar(apply(scaled_power, v)).coefficient(0);
      const Form rhs = apply(scaled_prev, apply(rt, v)).coefficient(0);
      builder.take("closed-input diagram at degree " + std::to_string(p), lhs - rhs);
    }
    scaled_prev = scaled_power;
  }

  const IdentityVerdict inner = builder.finish();
  return {ladder.pass && inner.pass, std::min(ladder.verified_order, inner.verified_order),
          ladder.witness ? ladder.witness : inner.witness};
}

IdentityVerdict fundamental_class_local(const KoszulData& k) {
  const int r = k.bundle().rank;
  VerdictBuilder builder(k.ring().truncation);
  const Form lhs = psi_value(k, r, top_mask(r));
  Form rhs = Form::scalar(TruncatedSeries::constant(k.ring(), Rational(1)));
  for (int j = 0; j < r; ++j) {
    rhs = wedge(rhs, partial(Form::scalar(tau_component(k.tau(), j))));
  }
  builder.take("fundamental class modulo the ideal",
               reduce_mod_ideal(lhs, k.ideal()) - reduce_mod_ideal(rhs, k.ideal()));
  return builder.finish();
}

}  // namespace skz
