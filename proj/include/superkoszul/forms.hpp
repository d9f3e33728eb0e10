#pragma once

// Bigraded exterior algebra over the truncated ring: formal (p,q)-forms with
// generators dz_1..dz_n, dw_1..dw_n, wedge product with Koszul signs, and the
// formal operators partial (raises p) and dbar (raises q).
//
// All signs in the project descend from one convention fixed here: the
// canonical generator order dz_1 < ... < dz_n < dw_1 < ... < dw_n with series
// coefficients written on the left of the generator wedge.

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "superkoszul/ring.hpp"

namespace skz {

// Set of generators present in a wedge monomial: bit i-1 of zmask is dz_i,
// bit i-1 of wmask is dw_i.
struct FormKey {
  std::uint32_t zmask = 0;
  std::uint32_t wmask = 0;

  int p() const;  // |zmask|
  int q() const;  // |wmask|
  int degree() const { return p() + q(); }
  int parity() const { return degree() % 2; }

  // All generators as one bit set over positions 0..2n-1 in canonical order
  // (dz_i at i-1, dw_i at n+i-1).
  std::uint64_t combined(int num_vars) const {
    return zmask | (static_cast<std::uint64_t>(wmask) << num_vars);
  }

  bool operator==(const FormKey& o) const { return zmask == o.zmask && wmask == o.wmask; }
};

// Deterministic key order: total degree ascending, then combined mask
// ascending.  Drives storage and printing.
struct FormKeyLess {
  bool operator()(const FormKey& a, const FormKey& b) const {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    if (a.wmask != b.wmask) {
      // compare combined masks without needing n: zmask minor, wmask major
      return a.wmask < b.wmask;
    }
    return a.zmask < b.zmask;
  }
};

// Sign of sorting the concatenation gens(a), gens(b) into canonical order;
// the masks must be disjoint.
int merge_sign(std::uint64_t a, std::uint64_t b);

class Form {
 public:
  using PartMap = std::map<FormKey, TruncatedSeries, FormKeyLess>;

  explicit Form(const RingSpec& ring) : ring_(ring) {}

  static Form zero(const RingSpec& ring) { return Form(ring); }
  static Form scalar(const TruncatedSeries& s);
  // dz_i (VarKind::Z) or dw_i (VarKind::W) with exact unit coefficient.
  static Form generator(const RingSpec& ring, VarKind kind, int index1);
  static Form from_part(const RingSpec& ring, const FormKey& key, const TruncatedSeries& coef);

  const RingSpec& ring() const { return ring_; }
  const PartMap& parts() const { return parts_; }
  // True when no part stores a nonzero term (order-limited zero parts count
  // as zero values; see exact()).
  bool is_zero() const;
  // True when every stored part is certified to the truncation bound.
  bool exact() const;
  // Minimum valid order over stored parts (kExactOrder when empty).
  int min_valid_order() const;

  // Coefficient of a key; absent keys are exact zero.
  TruncatedSeries coefficient(const FormKey& key) const;
  // Merge a coefficient into a key.  Exactly-zero results are erased; zero
  // coefficients with a finite valid order are kept, because they still
  // certify "zero up to that order" and the order matters downstream.
  void add_part(const FormKey& key, const TruncatedSeries& coef);

  Form operator-() const;
  Form scaled(const Rational& c) const;
  // Truncate every coefficient's certificate to `order`.
  Form truncated_to(int order) const;
  // Keys with bidegree (p, q) exactly.
  Form bidegree_part(int p, int q) const;
  // Keys with total generator degree parity 0 (even) or 1 (odd).
  Form parity_part(int parity) const;

  friend Form operator+(const Form& a, const Form& b);
  friend Form operator-(const Form& a, const Form& b);

 private:
  RingSpec ring_;
  PartMap parts_;
};

Form wedge(const Form& a, const Form& b);
// Left multiplication by a scalar series (no signs: scalars are even).
Form left_mult(const TruncatedSeries& s, const Form& a);

// dbar(f * beta) = sum_i wirtinger_{w_i}(f) dw_i ^ beta; partial likewise
// with dz_i and z-derivatives.  Coefficient valid orders drop by one.
Form dbar(const Form& a);
Form partial(const Form& a);

// Order up to which two forms agree on every key: the minimum coefficient
// cap if all coefficients match up to it, std::nullopt otherwise.
std::optional<int> agree_order(const Form& a, const Form& b);

// First difference witness: key and monomial where `a` has a nonzero
// coefficient at degree <= order.
struct FormWitness {
  FormKey key;
  Monomial monomial;
};
std::optional<FormWitness> first_nonzero_part(const Form& a, int order);

std::string to_string(const FormKey& key);  // "dz1*dw2", "1" for the empty key
std::string to_string(const Form& a);

// Form literal grammar: the series grammar plus atoms dz<k>/dw<k> combined
// with '*' (wedge).  parse(print(a)) == a for exact forms.
Form parse_form(const std::string& text, const RingSpec& ring);

}  // namespace skz
