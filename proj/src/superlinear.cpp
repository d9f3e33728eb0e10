#include "superkoszul/superlinear.hpp"

#include <bit>

namespace skz {

int mask_degree(ExtMask mask) { return std::popcount(mask); }

std::string mask_to_string(ExtMask mask, bool dual) {
  std::string out;
  for (ExtMask rest = mask; rest != 0; rest &= rest - 1) {
    if (!out.empty()) out += "*";
    out += dual ? "e^" : "e";
    out += std::to_string(std::countr_zero(rest) + 1);
  }
  return out.empty() ? "1" : out;
}

namespace {

void require_mask(const BundleSpec& bundle, ExtMask mask) {
  if (mask >> bundle.rank)
    throw RingError("exterior mask uses a basis index beyond the bundle rank");
}

}  // namespace

namespace detail {

Form MaskedForms::coefficient(ExtMask mask) const {
  auto it = terms.find(mask);
  return it == terms.end() ? Form::zero(ring) : it->second;
}

void MaskedForms::add_part(ExtMask mask, const Form& coef) {
  require_mask(bundle, mask);
  require_same_ring(ring, coef.ring());
  auto it = terms.find(mask);
  if (it == terms.end()) {
    if (coef.is_zero() && coef.exact()) return;
    terms.emplace(mask, coef);
    return;
  }
  it->second = it->second + coef;
  if (it->second.is_zero() && it->second.exact()) terms.erase(it);
}

bool MaskedForms::is_zero() const {
  for (const auto& [mask, coef] : terms)
    if (!coef.is_zero()) return false;
  return true;
}

int MaskedForms::min_valid_order() const {
  int v = kExactOrder;
  for (const auto& [mask, coef] : terms) v = std::min(v, coef.min_valid_order());
  return v;
}

MaskedForms MaskedForms::parity_part(int parity) const {
  MaskedForms r(bundle, ring);
  for (const auto& [mask, coef] : terms) {
    r.add_part(mask, coef.parity_part((parity + mask_degree(mask)) % 2));
  }
  return r;
}

}  // namespace detail

// ------------------------------------------------------------ multivector --

Multivector Multivector::basis(const BundleSpec& b, const RingSpec& r, ExtMask mask) {
  return from_part(b, r, mask, Form::scalar(TruncatedSeries::constant(r, 1)));
}

Multivector Multivector::from_part(const BundleSpec& b, const RingSpec& r, ExtMask mask,
                                   const Form& coef) {
  Multivector v(b, r);
  v.add_part(mask, coef);
  return v;
}

Multivector Multivector::parity_part(int parity) const {
  Multivector v(bundle(), ring());
  v.data_ = data_.parity_part(parity);
  return v;
}

Multivector Multivector::operator-() const {
  Multivector v(bundle(), ring());
  for (const auto& [mask, coef] : terms()) v.add_part(mask, -coef);
  return v;
}

Multivector Multivector::scaled(const Rational& c) const {
  Multivector v(bundle(), ring());
  for (const auto& [mask, coef] : terms()) v.add_part(mask, coef.scaled(c));
  return v;
}

Multivector operator+(const Multivector& a, const Multivector& b) {
  require_same_bundle(a.bundle(), b.bundle());
  require_same_ring(a.ring(), b.ring());
  Multivector v = a;
  for (const auto& [mask, coef] : b.terms()) v.add_part(mask, coef);
  return v;
}

Multivector operator-(const Multivector& a, const Multivector& b) { return a + (-b); }

DualMultivector DualMultivector::basis(const BundleSpec& b, const RingSpec& r, ExtMask mask) {
  return from_part(b, r, mask, Form::scalar(TruncatedSeries::constant(r, 1)));
}

DualMultivector DualMultivector::from_part(const BundleSpec& b, const RingSpec& r, ExtMask mask,
                                           const Form& coef) {
  DualMultivector v(b, r);
  v.add_part(mask, coef);
  return v;
}

DualMultivector DualMultivector::covector(const BundleSpec& b, const RingSpec& r,
                                          const std::vector<TruncatedSeries>& coeffs) {
  std::vector<Form> forms;
  forms.reserve(coeffs.size());
  for (const auto& s : coeffs) forms.push_back(Form::scalar(s));
  return covector_forms(b, r, forms);
}

DualMultivector DualMultivector::covector_forms(const BundleSpec& b, const RingSpec& r,
                                                const std::vector<Form>& coeffs) {
  if (static_cast<int>(coeffs.size()) != b.rank)
    throw RingError("covector needs exactly one coefficient per basis element");
  DualMultivector v(b, r);
  for (int j = 0; j < b.rank; ++j) v.add_part(1u << j, coeffs[static_cast<std::size_t>(j)]);
  return v;
}

DualMultivector DualMultivector::parity_part(int parity) const {
  DualMultivector v(bundle(), ring());
  v.data_ = data_.parity_part(parity);
  return v;
}

DualMultivector DualMultivector::operator-() const {
  DualMultivector v(bundle(), ring());
  for (const auto& [mask, coef] : terms()) v.add_part(mask, -coef);
  return v;
}

DualMultivector DualMultivector::scaled(const Rational& c) const {
  DualMultivector v(bundle(), ring());
  for (const auto& [mask, coef] : terms()) v.add_part(mask, coef.scaled(c));
  return v;
}

DualMultivector operator+(const DualMultivector& a, const DualMultivector& b) {
  require_same_bundle(a.bundle(), b.bundle());
  require_same_ring(a.ring(), b.ring());
  DualMultivector v = a;
  for (const auto& [mask, coef] : b.terms()) v.add_part(mask, coef);
  return v;
}

DualMultivector operator-(const DualMultivector& a, const DualMultivector& b) {
  return a + (-b);
}

Multivector mv_wedge(const Multivector& a, const Multivector& b) {
  require_same_bundle(a.bundle(), b.bundle());
  require_same_ring(a.ring(), b.ring());
  Multivector v(a.bundle(), a.ring());
  for (const auto& [ma, fa] : a.terms()) {
    for (const auto& [mb, fb] : b.terms()) {
      if (ma & mb) continue;  // repeated exterior factor
      int ext_sign = merge_sign(ma, mb);
      // The coefficient of b crosses e_{ma}: Koszul sign on its odd part.
      Form crossed = fb.parity_part(0);
      Form odd = fb.parity_part(1);
      crossed = mask_degree(ma) % 2 ? crossed - odd : crossed + odd;
      Form coef = wedge(fa, crossed);
      v.add_part(ma | mb, ext_sign < 0 ? -coef : coef);
    }
  }
  return v;
}

Multivector left_form_mult(const Form& w, const Multivector& v) {
  Multivector r(v.bundle(), v.ring());
  for (const auto& [mask, coef] : v.terms()) r.add_part(mask, wedge(w, coef));
  return r;
}

DualMultivector left_form_mult(const Form& w, const DualMultivector& v) {
  DualMultivector r(v.bundle(), v.ring());
  for (const auto& [mask, coef] : v.terms()) r.add_part(mask, wedge(w, coef));
  return r;
}

Multivector dbar(const Multivector& v) {
  Multivector r(v.bundle(), v.ring());
  for (const auto& [mask, coef] : v.terms()) r.add_part(mask, dbar(coef));
  return r;
}

Multivector partial(const Multivector& v) {
  Multivector r(v.bundle(), v.ring());
  for (const auto& [mask, coef] : v.terms()) r.add_part(mask, partial(coef));
  return r;
}

DualMultivector dbar(const DualMultivector& v) {
  DualMultivector r(v.bundle(), v.ring());
  for (const auto& [mask, coef] : v.terms()) r.add_part(mask, dbar(coef));
  return r;
}

namespace {

template <typename T>
std::optional<int> masked_agree(const T& a, const T& b) {
  T diff = a - b;
  int order = a.ring().truncation;
  for (const auto& [mask, coef] : a.terms()) order = std::min(order, coef.min_valid_order());
  for (const auto& [mask, coef] : b.terms()) order = std::min(order, coef.min_valid_order());
  order = std::min(order, a.ring().truncation);
  for (const auto& [mask, coef] : diff.terms()) {
    if (first_nonzero_part(coef, order)) return std::nullopt;
  }
  return order;
}

template <typename T>
std::string masked_to_string(const T& v, bool dual) {
  std::string out;
  for (const auto& [mask, coef] : v.terms()) {
    if (coef.is_zero()) continue;
    if (!out.empty()) out += " + ";
    out += "(" + to_string(coef) + ")";
    if (mask != 0) out += " " + mask_to_string(mask, dual);
  }
  return out.empty() ? "0" : out;
}

}  // namespace

std::optional<int> agree_order(const Multivector& a, const Multivector& b) {
  return masked_agree(a, b);
}
std::optional<int> agree_order(const DualMultivector& a, const DualMultivector& b) {
  return masked_agree(a, b);
}

std::string to_string(const Multivector& v) { return masked_to_string(v, false); }
std::string to_string(const DualMultivector& v) { return masked_to_string(v, true); }

// -------------------------------------------------------------- endmatrix --

EndMatrix EndMatrix::identity(const BundleSpec& b, const RingSpec& r) {
  EndMatrix m(b, r);
  Form one = Form::scalar(TruncatedSeries::constant(r, 1));
  for (ExtMask mask = 0; mask < (1u << b.rank); ++mask) m.add_entry(mask, mask, one);
  return m;
}

EndMatrix EndMatrix::epsilon(const BundleSpec& b, const RingSpec& r) {
  EndMatrix m(b, r);
  Form one = Form::scalar(TruncatedSeries::constant(r, 1));
  for (ExtMask mask = 0; mask < (1u << b.rank); ++mask)
    m.add_entry(mask, mask, mask_degree(mask) % 2 ? -one : one);
  return m;
}

Form EndMatrix::entry(ExtMask target, ExtMask source) const {
  auto it = entries_.find(EntryKey{target, source});
  return it == entries_.end() ? Form::zero(ring_) : it->second;
}

void EndMatrix::add_entry(ExtMask target, ExtMask source, const Form& coef) {
  require_mask(bundle_, target);
  require_mask(bundle_, source);
  require_same_ring(ring_, coef.ring());
  EntryKey key{target, source};
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    if (coef.is_zero() && coef.exact()) return;
    entries_.emplace(key, coef);
    return;
  }
  it->second = it->second + coef;
  if (it->second.is_zero() && it->second.exact()) entries_.erase(it);
}

bool EndMatrix::is_zero() const {
  for (const auto& [key, coef] : entries_)
    if (!coef.is_zero()) return false;
  return true;
}

int EndMatrix::min_valid_order() const {
  int v = kExactOrder;
  for (const auto& [key, coef] : entries_) v = std::min(v, coef.min_valid_order());
  return v;
}

EndMatrix EndMatrix::total_parity_part(int parity) const {
  EndMatrix m(bundle_, ring_);
  for (const auto& [key, coef] : entries_) {
    int form_parity = (parity + unit_parity(key.target, key.source)) % 2;
    m.add_entry(key.target, key.source, coef.parity_part(form_parity));
  }
  return m;
}

EndMatrix EndMatrix::operator-() const {
  EndMatrix m(bundle_, ring_);
  for (const auto& [key, coef] : entries_) m.add_entry(key.target, key.source, -coef);
  return m;
}

EndMatrix EndMatrix::scaled(const Rational& c) const {
  EndMatrix m(bundle_, ring_);
  for (const auto& [key, coef] : entries_) m.add_entry(key.target, key.source, coef.scaled(c));
  return m;
}

EndMatrix operator+(const EndMatrix& a, const EndMatrix& b) {
  require_same_bundle(a.bundle_, b.bundle_);
  require_same_ring(a.ring_, b.ring_);
  EndMatrix m = a;
  for (const auto& [key, coef] : b.entries_) m.add_entry(key.target, key.source, coef);
  return m;
}

EndMatrix operator-(const EndMatrix& a, const EndMatrix& b) { return a + (-b); }

EndMatrix compose(const EndMatrix& a, const EndMatrix& b) {
  require_same_bundle(a.bundle(), b.bundle());
  require_same_ring(a.ring(), b.ring());
  EndMatrix m(a.bundle(), a.ring());
  for (const auto& [ka, fa] : a.entries()) {
    int pa = EndMatrix::unit_parity(ka.target, ka.source);
    for (const auto& [kb, fb] : b.entries()) {
      if (ka.source != kb.target) continue;
      // (ω₁ ⊗ φ₁)(ω₂ ⊗ φ₂) = (−1)^{|φ₁||ω₂|} ω₁∧ω₂ ⊗ φ₁φ₂.
      Form passed = fb.parity_part(0);
      Form odd = fb.parity_part(1);
      passed = pa ? passed - odd : passed + odd;
      m.add_entry(ka.target, kb.source, wedge(fa, passed));
    }
  }
  return m;
}

EndMatrix supercommutator(const EndMatrix& a, const EndMatrix& b) {
  EndMatrix r = EndMatrix::zero(a.bundle(), a.ring());
  for (int p = 0; p < 2; ++p) {
    EndMatrix ap = a.total_parity_part(p);
    if (ap.entries().empty()) continue;
    for (int q = 0; q < 2; ++q) {
      EndMatrix bq = b.total_parity_part(q);
      if (bq.entries().empty()) continue;
      EndMatrix ba = compose(bq, ap);
      r = r + compose(ap, bq) - (p * q ? -ba : ba);
    }
  }
  return r;
}

Multivector apply(const EndMatrix& m, const Multivector& v) {
  require_same_bundle(m.bundle(), v.bundle());
  require_same_ring(m.ring(), v.ring());
  Multivector out(v.bundle(), v.ring());
  for (const auto& [key, fm] : m.entries()) {
    int pm = EndMatrix::unit_parity(key.target, key.source);
    for (const auto& [mask, fv] : v.terms()) {
      if (mask != key.source) continue;
      Form passed = fv.parity_part(0);
      Form odd = fv.parity_part(1);
      passed = pm ? passed - odd : passed + odd;
      out.add_part(key.target, wedge(fm, passed));
    }
  }
  return out;
}

EndMatrix dbar_entries(const EndMatrix& m) {
  EndMatrix r(m.bundle(), m.ring());
  for (const auto& [key, coef] : m.entries()) r.add_entry(key.target, key.source, dbar(coef));
  return r;
}

EndMatrix partial_entries(const EndMatrix& m) {
  EndMatrix r(m.bundle(), m.ring());
  for (const auto& [key, coef] : m.entries()) r.add_entry(key.target, key.source, partial(coef));
  return r;
}

EndMatrix form_mult(const Form& w, const EndMatrix& m) {
  EndMatrix r(m.bundle(), m.ring());
  for (const auto& [key, coef] : m.entries()) r.add_entry(key.target, key.source, wedge(w, coef));
  return r;
}

Form supertrace(const EndMatrix& m) {
  Form t = Form::zero(m.ring());
  for (const auto& [key, coef] : m.entries()) {
    if (key.target != key.source) continue;
    t = mask_degree(key.target) % 2 ? t - coef : t + coef;
  }
  return t;
}

DualMultivector gen_supertrace(const EndMatrix& m) {
  DualMultivector out(m.bundle(), m.ring());
  for (const auto& [key, coef] : m.entries()) {
    ExtMask S = key.target, T = key.source;
    if (S & ~T) continue;  // needs S ⊆ T; everything else contributes nothing
    ExtMask U = T & ~S;
    // Coefficient of e^U: (−1)^{|U|} (−1)^{|T|} · sign(e_U ∧ e_S → e_T).
    int sign = merge_sign(U, S);
    if (mask_degree(U) % 2) sign = -sign;
    if (mask_degree(T) % 2) sign = -sign;
    out.add_part(U, sign < 0 ? -coef : coef);
  }
  return out;
}

EndMatrix inclusion_i(const DualMultivector& alpha) {
  EndMatrix m(alpha.bundle(), alpha.ring());
  for (const auto& [mask, coef] : alpha.terms()) m.add_entry(0u, mask, coef);
  return m;
}

EndMatrix left_mult(const Multivector& eta) {
  EndMatrix m(eta.bundle(), eta.ring());
  for (const auto& [ma, coef] : eta.terms()) {
    for (ExtMask t = 0; t < (1u << eta.bundle().rank); ++t) {
      if (ma & t) continue;
      int sign = merge_sign(ma, t);
      m.add_entry(ma | t, t, sign < 0 ? -coef : coef);
    }
  }
  return m;
}

EndMatrix extend_derivation(const BundleSpec& bundle, const RingSpec& ring,
                            const std::vector<Multivector>& images, int parity) {
  if (static_cast<int>(images.size()) != bundle.rank)
    throw RingError("superderivation needs exactly one image per basis element");
  EndMatrix m(bundle, ring);
  for (ExtMask t = 1; t < (1u << bundle.rank); ++t) {
    Multivector image(bundle, ring);
    int position = 0;
    for (ExtMask rest = t; rest != 0; rest &= rest - 1, ++position) {
      int j = std::countr_zero(rest);
      ExtMask below = t & ((1u << j) - 1);
      ExtMask above = t & ~((1u << (j + 1)) - 1);
      Multivector term = mv_wedge(
          mv_wedge(Multivector::basis(bundle, ring, below), images[static_cast<std::size_t>(j)]),
          Multivector::basis(bundle, ring, above));
      image = image + ((parity * position) % 2 ? -term : term);
    }
    for (const auto& [mask, coef] : image.terms()) m.add_entry(mask, t, coef);
  }
  return m;
}

EndMatrix contraction(const DualMultivector& covector) {
  const BundleSpec& bundle = covector.bundle();
  const RingSpec& ring = covector.ring();
  for (const auto& [mask, coef] : covector.terms()) {
    if (mask_degree(mask) != 1 && !coef.is_zero())
      throw RingError("contraction requires a covector of pure exterior degree 1");
  }
  // Split each coefficient by form parity: even coefficients extend to an
  // odd derivation, odd coefficients to an even one.
  EndMatrix result = EndMatrix::zero(bundle, ring);
  for (int form_parity = 0; form_parity < 2; ++form_parity) {
    std::vector<Multivector> images;
    bool any = false;
    for (int j = 0; j < bundle.rank; ++j) {
      Form part = covector.coefficient(1u << j).parity_part(form_parity);
      if (!part.is_zero()) any = true;
      images.push_back(Multivector::from_part(bundle, ring, 0u, part));
    }
    if (!any) continue;
    result = result + extend_derivation(bundle, ring, images, (1 + form_parity) % 2);
  }
  return result;
}

std::optional<int> agree_order(const EndMatrix& a, const EndMatrix& b) {
  EndMatrix diff = a - b;
  int order = a.ring().truncation;
  for (const auto& [key, coef] : a.entries()) order = std::min(order, coef.min_valid_order());
  for (const auto& [key, coef] : b.entries()) order = std::min(order, coef.min_valid_order());
  if (first_nonzero_entry(diff, order)) return std::nullopt;
  return order;
}

std::string EntryWitness::to_string() const {
  return "entry " + mask_to_string(target, false) + " <- " + mask_to_string(source, false) +
         ", part " + skz::to_string(key) + ", monomial " + skz::to_string(monomial);
}

std::optional<EntryWitness> first_nonzero_entry(const EndMatrix& m, int order) {
  for (const auto& [key, coef] : m.entries()) {
    if (auto w = first_nonzero_part(coef, order))
      return EntryWitness{key.target, key.source, w->key, w->monomial};
  }
  return std::nullopt;
}

std::string to_string(const EndMatrix& m) {
  std::string out;
  for (const auto& [key, coef] : m.entries()) {
    if (coef.is_zero()) continue;
    if (!out.empty()) out += "; ";
    out += mask_to_string(key.target, false) + " <- " + mask_to_string(key.source, false) +
           ": " + to_string(coef);
  }
  return out.empty() ? "0" : out;
}

}  // namespace skz
