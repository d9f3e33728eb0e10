#pragma once

// Super linear algebra of the exterior algebra of a rank-r free module E with
// form coefficients: multivectors in A ⊗̂ ⋀E, their duals, endomorphism
// matrices with Koszul-sign composition, superderivations, contraction,
// supertrace, and the generalized supertrace with values in ⋀E^∨.
//
// Sign discipline, fixed once and inherited everywhere: a homogeneous tensor
// ω ⊗ φ has total parity (form degree of ω + endomorphism parity of φ) mod 2,
// and (ω₁ ⊗ φ₁)(ω₂ ⊗ φ₂) = (−1)^{|φ₁||ω₂|} (ω₁ ∧ ω₂) ⊗ (φ₁ φ₂).
// The parity of a matrix unit E_{S,T} (sending e_T to e_S) is (|S|+|T|) mod 2.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "superkoszul/forms.hpp"
#include "superkoszul/ring.hpp"

namespace skz {

struct BundleSpec {
  int rank = 1;  // r >= 1; basis e_1..e_r, dual basis e^1..e^r

  bool operator==(const BundleSpec& o) const { return rank == o.rank; }
  bool operator!=(const BundleSpec& o) const { return !(*this == o); }
};

inline void require_same_bundle(const BundleSpec& a, const BundleSpec& b) {
  if (a != b) throw RingError("bundle mismatch: operands have different ranks");
}

// Exterior basis mask: bit i-1 set means e_i (or e^i) is present; wedge
// factors are always in increasing index order.
using ExtMask = std::uint32_t;

int mask_degree(ExtMask mask);
std::string mask_to_string(ExtMask mask, bool dual);  // "e1*e2" / "e^1*e^2", "1"

namespace detail {

// Shared representation of mask -> Form associations (multivectors and their
// duals).  Coefficients sit on the left of the exterior factors; exactly-zero
// coefficients are dropped, order-limited zeros are kept (see Form::add_part).
struct MaskedForms {
  BundleSpec bundle;
  RingSpec ring;
  std::map<ExtMask, Form> terms;

  MaskedForms(const BundleSpec& b, const RingSpec& r) : bundle(b), ring(r) {}

  Form coefficient(ExtMask mask) const;
  void add_part(ExtMask mask, const Form& coef);
  bool is_zero() const;
  int min_valid_order() const;
  // Keep only tensor terms of the given total parity (form + mask degree).
  MaskedForms parity_part(int parity) const;
};

}  // namespace detail

class Multivector {
 public:
  Multivector(const BundleSpec& bundle, const RingSpec& ring) : data_(bundle, ring) {}

  static Multivector zero(const BundleSpec& b, const RingSpec& r) { return {b, r}; }
  // The basis element e_S with exact unit coefficient.
  static Multivector basis(const BundleSpec& b, const RingSpec& r, ExtMask mask);
  static Multivector from_part(const BundleSpec& b, const RingSpec& r, ExtMask mask,
                               const Form& coef);

  const BundleSpec& bundle() const { return data_.bundle; }
  const RingSpec& ring() const { return data_.ring; }
  const std::map<ExtMask, Form>& terms() const { return data_.terms; }
  Form coefficient(ExtMask mask) const { return data_.coefficient(mask); }
  void add_part(ExtMask mask, const Form& coef) { data_.add_part(mask, coef); }
  bool is_zero() const { return data_.is_zero(); }
  int min_valid_order() const { return data_.min_valid_order(); }
  Multivector parity_part(int parity) const;

  Multivector operator-() const;
  Multivector scaled(const Rational& c) const;
  friend Multivector operator+(const Multivector& a, const Multivector& b);
  friend Multivector operator-(const Multivector& a, const Multivector& b);

 private:
  detail::MaskedForms data_;
};

class DualMultivector {
 public:
  DualMultivector(const BundleSpec& bundle, const RingSpec& ring) : data_(bundle, ring) {}

  static DualMultivector zero(const BundleSpec& b, const RingSpec& r) { return {b, r}; }
  // The dual basis element e^S with exact unit coefficient.
  static DualMultivector basis(const BundleSpec& b, const RingSpec& r, ExtMask mask);
  static DualMultivector from_part(const BundleSpec& b, const RingSpec& r, ExtMask mask,
                                   const Form& coef);
  // Exterior-degree-1 covector sum_j coeffs[j] e^{j+1} from scalar series.
  static DualMultivector covector(const BundleSpec& b, const RingSpec& r,
                                  const std::vector<TruncatedSeries>& coeffs);
  static DualMultivector covector_forms(const BundleSpec& b, const RingSpec& r,
                                        const std::vector<Form>& coeffs);

  const BundleSpec& bundle() const { return data_.bundle; }
  const RingSpec& ring() const { return data_.ring; }
  const std::map<ExtMask, Form>& terms() const { return data_.terms; }
  Form coefficient(ExtMask mask) const { return data_.coefficient(mask); }
  void add_part(ExtMask mask, const Form& coef) { data_.add_part(mask, coef); }
  bool is_zero() const { return data_.is_zero(); }
  int min_valid_order() const { return data_.min_valid_order(); }
  DualMultivector parity_part(int parity) const;

  DualMultivector operator-() const;
  DualMultivector scaled(const Rational& c) const;
  friend DualMultivector operator+(const DualMultivector& a, const DualMultivector& b);
  friend DualMultivector operator-(const DualMultivector& a, const DualMultivector& b);

 private:
  detail::MaskedForms data_;
};

// (ω ⊗ e_A) ∧ (η ⊗ e_B) = (−1)^{|A||η|} (ω ∧ η) ⊗ (e_A ∧ e_B).
Multivector mv_wedge(const Multivector& a, const Multivector& b);
// ω ∧ v: plain left multiplication by a form (no sign).
Multivector left_form_mult(const Form& w, const Multivector& v);
DualMultivector left_form_mult(const Form& w, const DualMultivector& v);

// Coefficientwise Dolbeault operators on multivectors: ∂̄(η ⊗ e_B) = ∂̄η ⊗ e_B.
Multivector dbar(const Multivector& v);
Multivector partial(const Multivector& v);
DualMultivector dbar(const DualMultivector& v);

std::optional<int> agree_order(const Multivector& a, const Multivector& b);
std::optional<int> agree_order(const DualMultivector& a, const DualMultivector& b);

std::string to_string(const Multivector& v);
std::string to_string(const DualMultivector& v);

// ------------------------------------------------------------- end matrix --

class EndMatrix {
 public:
  struct EntryKey {
    ExtMask target = 0;  // S: row
    ExtMask source = 0;  // T: column
    bool operator<(const EntryKey& o) const {
      return source != o.source ? source < o.source : target < o.target;
    }
    bool operator==(const EntryKey& o) const {
      return source == o.source && target == o.target;
    }
  };

  EndMatrix(const BundleSpec& bundle, const RingSpec& ring) : bundle_(bundle), ring_(ring) {}

  static EndMatrix zero(const BundleSpec& b, const RingSpec& r) { return {b, r}; }
  static EndMatrix identity(const BundleSpec& b, const RingSpec& r);
  // Grading involution: e_S -> (−1)^{|S|} e_S.
  static EndMatrix epsilon(const BundleSpec& b, const RingSpec& r);

  const BundleSpec& bundle() const { return bundle_; }
  const RingSpec& ring() const { return ring_; }
  const std::map<EntryKey, Form>& entries() const { return entries_; }
  Form entry(ExtMask target, ExtMask source) const;
  void add_entry(ExtMask target, ExtMask source, const Form& coef);
  bool is_zero() const;
  int min_valid_order() const;

  // Structural parity of a matrix unit E_{S,T}.
  static int unit_parity(ExtMask target, ExtMask source) {
    return (mask_degree(target) + mask_degree(source)) % 2;
  }
  // Restriction to tensor terms of total parity p (form + unit parity).
  EndMatrix total_parity_part(int parity) const;

  EndMatrix operator-() const;
  EndMatrix scaled(const Rational& c) const;
  friend EndMatrix operator+(const EndMatrix& a, const EndMatrix& b);
  friend EndMatrix operator-(const EndMatrix& a, const EndMatrix& b);

 private:
  BundleSpec bundle_;
  RingSpec ring_;
  std::map<EntryKey, Form> entries_;
};

// Matrix product with the Koszul sign (−1)^{|φ₁||ω₂|}.
EndMatrix compose(const EndMatrix& a, const EndMatrix& b);
// [a,b]_s = ab − (−1)^{|a||b|} ba, extended bilinearly over parity pieces.
EndMatrix supercommutator(const EndMatrix& a, const EndMatrix& b);
// m(v) with the sign (−1)^{|φ||η|} for coefficient forms η passed by φ.
Multivector apply(const EndMatrix& m, const Multivector& v);
// Entrywise Dolbeault operators; equal to [∂̄, m]_s and [∂, m]_s.
EndMatrix dbar_entries(const EndMatrix& m);
EndMatrix partial_entries(const EndMatrix& m);
// Entrywise left multiplication ω ∧ entry (the A-module structure).
EndMatrix form_mult(const Form& w, const EndMatrix& m);

// tr_s(m) = Σ_S (−1)^{|S|} entry(S,S).
Form supertrace(const EndMatrix& m);

// Generalized supertrace with values in ⋀E^∨: on a matrix unit,
// Tr_Λ(E_{S,T}) = (−1)^{|T\S|} (−1)^{|T|} sign(e_{T\S} ∧ e_S = ± e_T) e^{T\S}
// when S ⊆ T and 0 otherwise; form coefficients pass through on the left.
DualMultivector gen_supertrace(const EndMatrix& m);

// i(α): ⋀^m E -> ⋀^0 E by the determinant pairing ⟨e^U, e_V⟩ = δ_{UV}.
EndMatrix inclusion_i(const DualMultivector& alpha);

// Left wedge multiplication l_η(v) = η ∧ v as a matrix.
EndMatrix left_mult(const Multivector& eta);

// Derivation-extended contraction by an exterior-degree-1 covector; parity
// (1 + form parity) per homogeneous coefficient piece.
EndMatrix contraction(const DualMultivector& covector);

// Unique superderivation of the stated parity with the given generator
// images (one Multivector per e_j, j = 1..r), acting trivially on scalars.
EndMatrix extend_derivation(const BundleSpec& bundle, const RingSpec& ring,
                            const std::vector<Multivector>& images, int parity);

std::optional<int> agree_order(const EndMatrix& a, const EndMatrix& b);

struct EntryWitness {
  ExtMask target = 0;
  ExtMask source = 0;
  FormKey key;
  Monomial monomial;
  std::string to_string() const;
};
std::optional<EntryWitness> first_nonzero_entry(const EndMatrix& m, int order);

std::string to_string(const EndMatrix& m);

}  // namespace skz
