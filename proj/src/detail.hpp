// Internal helpers shared by the resolution and twisted-complex translation
// units: mask utilities, extraction of scalar section components, and the
// residual accumulator that turns a batch of identity checks into one
// IdentityVerdict with a located witness.
#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "superkoszul/koszul.hpp"
#include "superkoszul/superlinear.hpp"

namespace skz::detail {

inline ExtMask top_mask(int rank) { return (ExtMask{1} << rank) - 1; }

inline std::vector<int> mask_indices(ExtMask mask) {
  std::vector<int> out;
  for (int i = 0; mask >> i; ++i) {
    if ((mask >> i) & 1u) out.push_back(i);
  }
  return out;
}

// Masks over the ring variables with exactly `bits` bits set.
inline std::vector<std::uint32_t> var_masks(int num_vars, int bits) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t m = 0; m < (1u << num_vars); ++m) {
    if (mask_degree(m) == bits) out.push_back(m);
  }
  return out;
}

// Scalar (0,0) coefficient of tau at the degree-1 mask for 0-based index j.
inline TruncatedSeries tau_component(const DualMultivector& tau, int j) {
  return tau.coefficient(ExtMask{1} << j).coefficient(FormKey{});
}

inline std::string describe(const FormWitness& w) {
  return "part " + to_string(w.key) + ", monomial " + to_string(w.monomial);
}

// Accumulates residuals of several identities into one verdict.
class VerdictBuilder {
 public:
  explicit VerdictBuilder(int truncation) : truncation_(truncation), order_(truncation) {}

  void take(const std::string& label, const EndMatrix& residual) {
    const int order = std::min(truncation_, residual.min_valid_order());
    order_ = std::min(order_, order);
    if (residual.is_zero()) return;
    pass_ = false;
    if (!witness_) {
      if (auto w = first_nonzero_entry(residual, order)) {
        witness_ = label + ": " + w->to_string();
      } else {
        witness_ = label;
      }
    }
  }

  void take(const std::string& label, const Form& residual) {
    const int order = std::min(truncation_, residual.min_valid_order());
    order_ = std::min(order_, order);
    if (residual.is_zero()) return;
    pass_ = false;
    if (!witness_) {
      if (auto w = first_nonzero_part(residual, order)) {
        witness_ = label + ": " + describe(*w);
      } else {
        witness_ = label;
      }
    }
  }

  void take(const std::string& label, const Multivector& residual) {
    const int order = std::min(truncation_, residual.min_valid_order());
    order_ = std::min(order_, order);
    if (residual.is_zero()) return;
    pass_ = false;
    if (!witness_) {
      for (const auto& [mask, f] : residual.terms()) {
        if (f.is_zero()) continue;
        if (auto w = first_nonzero_part(f, order)) {
          witness_ = label + ": " + mask_to_string(mask, false) + " " + describe(*w);
        } else {
          witness_ = label + ": " + mask_to_string(mask, false);
        }
        break;
      }
      if (!witness_) witness_ = label;
    }
  }

  // Fold another verdict into this one (used when a check delegates to a
  // previously computed verdict).
  void take(const IdentityVerdict& v) {
    order_ = std::min(order_, v.verified_order);
    if (v.pass) return;
    pass_ = false;
    if (!witness_) witness_ = v.witness;
  }

  IdentityVerdict finish() const { return {pass_, order_, witness_}; }

 private:
  int truncation_;
  int order_;
  bool pass_ = true;
  std::optional<std::string> witness_;
};

}  // namespace skz::detail
