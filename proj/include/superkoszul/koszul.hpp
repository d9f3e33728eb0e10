// Koszul resolution of a holomorphic section and the explicit chain map onto
// the Dolbeault complex: the duality isomorphisms phi_p, the transported
// curvature matrices, the maps psi_p built from iterated contraction by the
// covariant derivative of the section, and the verification routines for the
// bracket identities, the chain-map ladder, and the local fundamental class
// modulo the coordinate ideal.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "superkoszul/connections.hpp"
#include "superkoszul/superlinear.hpp"

namespace skz {

// True when no monomial of `a` involves an antiholomorphic variable w_i.
bool is_holomorphic(const TruncatedSeries& a);

// Substitute z_i := 0 in every coefficient of every part; the form
// generators dz_i, dw_i are untouched.
Form reduce_mod_ideal(const Form& f, const IdealSpec& ideal);

// Outcome of an identity check: `pass` when every residual vanishes up to
// `verified_order` (the smaller of the ring truncation and the least valid
// order among the residuals); on failure `witness` locates the first
// offending coefficient.
struct IdentityVerdict {
  bool pass = false;
  int verified_order = 0;
  std::optional<std::string> witness;
};

// A holomorphic exterior-degree-1 section tau of the dual bundle together
// with a flat (1,0)-connection and the coordinate ideal cutting out the
// section's zero locus.  Construction validates:
//   * every coefficient of tau is a (0,0)-form with no w variables,
//   * the connection is flat (NotFlat otherwise),
//   * contraction by tau squares to zero,
//   * each ideal generator z_i lies in the ideal generated by the components
//    of tau, witnessed by series u_j with z_i = sum_j u_j tau_j
//    (SolverInconsistency otherwise),
// and precomputes the covariant derivative nabla(tau), the curvature applied
// to tau, and the curvature matrix itself.
class KoszulData {
 public:
  KoszulData(const BundleSpec& bundle, const RingSpec& ring, DualMultivector tau,
             Connection connection, IdealSpec ideal);

  const BundleSpec& bundle() const { return bundle_; }
  const RingSpec& ring() const { return ring_; }
  const DualMultivector& tau() const { return tau_; }
  const Connection& connection() const { return connection_; }
  const IdealSpec& ideal() const { return ideal_; }

  // Covector with (1,0)-form coefficients: component k is
  // partial(tau_k) + sum_j (dual gamma)_{k j} tau_j.
  const DualMultivector& nabla_tau() const { return nabla_tau_; }

  // Covector with (1,1)-form coefficients: component k is sum_j R_{k j} tau_j.
  const DualMultivector& r_tau() const { return r_tau_; }

  // Curvature matrix R = dbar(dual gamma) of the dual connection.
  const FormMatrix& curvature() const { return curvature_; }

  // For each ideal variable, the coefficients u_j expressing z_i through the
  // components of tau, in the order the variables appear in the ideal spec.
  const std::vector<std::vector<TruncatedSeries>>& ideal_certificates() const {
    return certificates_;
  }

 private:
  BundleSpec bundle_;
  RingSpec ring_;
  DualMultivector tau_;
  Connection connection_;
  IdealSpec ideal_;
  FormMatrix curvature_;
  DualMultivector nabla_tau_;
  DualMultivector r_tau_;
  std::vector<std::vector<TruncatedSeries>> certificates_;
};

// Sign of the duality map on the exterior-degree-p basis element with index
// set `s`: pairing against the complementary basis element produces
// phi_sign(b, s) times the top basis element, i.e. the image of e_s is
// phi_sign(b, s) * (dual of e_{complement}) tensor e_top.
int phi_sign(const BundleSpec& b, ExtMask s);

// Sign of the inverse duality map on (dual of e_t) tensor e_top: the image is
// phi_inverse_sign(b, t) * e_{complement of t}.
int phi_inverse_sign(const BundleSpec& b, ExtMask t);

// The transported compound-curvature operator on exterior degree p: conjugate
// the (rank - p)-fold wedge power of `r` (acting on the dual bundle) by the
// duality maps.  Entries are (rank-p, rank-p)-forms; entry (complement of U,
// S) is phi_sign(S) * phi_inverse_sign(U) * minor of `r` with rows U and
// columns complement(S).
EndMatrix curvature_transform_matrix(const BundleSpec& b, const FormMatrix& r, int p);

// curvature_transform_matrix for the curvature of k's connection.
EndMatrix curvature_transform(const KoszulData& k, int p);

// psi_p = (1/p!) (contraction by nabla tau)^p composed with the transported
// compound curvature: a matrix whose only target is the empty mask and whose
// sources have exterior degree p, with (rank, rank-p)-form entries.
EndMatrix psi_component(const KoszulData& k, int p);

// The form psi_p(e_source): entry (empty, source) of psi_component.
Form psi_value(const KoszulData& k, int p, ExtMask source);

// psi_0 .. psi_rank as one vector.
std::vector<EndMatrix> psi_sequence(const KoszulData& k);

// Checks, as matrix identities:
//   * the supercommutator of dbar with contraction by nabla(tau) equals
//     contraction by the curvature applied to tau, and
//   * contraction by nabla(tau) supercommutes with contraction by the
//     curvature applied to tau.
IdentityVerdict verify_bracket_facts(const KoszulData& k);

// Checks the chain-map ladder dbar(psi_p(e_S)) = psi_{p-1}(contraction by tau
// of e_S) for p = 1..rank and every basis element, using the supplied maps
// (index p holds psi_p).  Exposed separately so corrupted maps can be fed in.
IdentityVerdict verify_chain_ladder(const KoszulData& k, const std::vector<EndMatrix>& psi);

// Full chain-map verification: the ladder for psi_sequence(k), the iterated
// bracket identity (supercommutator of dbar with the p-th contraction power
// equals p times the (p-1)-st power composed with contraction by the
// curvature applied to tau), and the induced diagram on pseudorandom
// dbar-closed inputs (`samples` per degree, reproducible from `seed`).
IdentityVerdict verify_chain_map_psi(const KoszulData& k, int samples = 4,
                                     std::uint64_t seed = 0x5eed5eedULL);

// Checks that psi_rank applied to the top exterior basis element agrees with
// the wedge of the (1,0)-derivatives of the components of tau after reducing
// both modulo the coordinate ideal.
IdentityVerdict fundamental_class_local(const KoszulData& k);

}  // namespace skz
