// Twisted Koszul complex for a section with antiholomorphic dependence: a
// (0,1)-connection matrix that makes the section parallel, square-zero
// corrections assembled into a twisted differential, the superconnection
// pairing it with a flat holomorphic connection, the generalized-supertrace
// row of the top supercurvature power (a cochain map into (rank, *)-forms),
// and the comparison with the free resolution of the coordinate ideal that
// pins the local fundamental class.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "superkoszul/connections.hpp"
#include "superkoszul/koszul.hpp"
#include "superkoszul/superlinear.hpp"

namespace skz {

using SeriesMatrix = std::vector<std::vector<TruncatedSeries>>;

// Exterior-degree-1 section of the dual bundle whose scalar coefficients may
// involve the antiholomorphic variables, together with the coordinate ideal
// it cuts out and a certificate matrix u with
//   z_i = sum_j u[j][i] * tau_j   for the i-th ideal variable.
// Construction validates:
//   * every coefficient of tau is a (0,0)-form (w variables allowed),
//   * contraction by tau squares to zero,
//   * every component of tau vanishes modulo the ideal,
//   * the certificate: solved by the graded solver when not supplied
//     (SolverInconsistency if some z_i is unreachable), back-substituted
//     exactly when supplied (RingError on mismatch).
class RealSection {
 public:
  RealSection(const BundleSpec& bundle, const RingSpec& ring, DualMultivector tau,
              IdealSpec ideal, std::optional<SeriesMatrix> u = std::nullopt);

  const BundleSpec& bundle() const { return bundle_; }
  const RingSpec& ring() const { return ring_; }
  const DualMultivector& tau() const { return tau_; }
  const IdealSpec& ideal() const { return ideal_; }

  // u[j][i]: coefficient of tau_j in the expression for the i-th ideal
  // variable (rows indexed by the frame, columns by ideal.vars order).
  const SeriesMatrix& u() const { return u_; }

 private:
  BundleSpec bundle_;
  RingSpec ring_;
  DualMultivector tau_;
  IdealSpec ideal_;
  SeriesMatrix u_;
};

// Matrix theta of (0,1)-forms solving  sum_i tau_i * theta_{i j} = dbar(tau_j)
// columnwise: the (0,1)-connection  dbar + theta  on the bundle then makes
// the section parallel, i.e. the supercommutator of the extended connection
// with contraction by tau vanishes.  Solved deterministically by the graded
// solver; throws SolverInconsistency when some dbar(tau_j) is not reachable
// through the section.
FormMatrix dbar_connection_matrix(const RealSection& s);

// Odd-derivation extension of a generator-level (0,1)-form matrix to the
// exterior algebra: the superderivation with generator images
// sum_i theta[i][j] (tensor) e_i, acting trivially on coefficients.
EndMatrix dbar_connection_extension(const BundleSpec& b, const RingSpec& r,
                                    const FormMatrix& theta);

// Matrix pieces of the twisted differential: a[0] = contraction by tau,
// a[1] = the parallel (0,1)-connection extension, and solved corrections a[k]
// raising the antiholomorphic degree by k and the exterior degree by k-1,
// chosen so that the full operator  dbar + sum_k a[k]  squares to zero.
struct TwistData {
  BundleSpec bundle;
  RingSpec ring;
  std::vector<EndMatrix> a;

  // Sum of the matrix pieces (the full differential is dbar + this).
  EndMatrix differential() const;
};

// Builds the twist: theta from dbar_connection_matrix, then each correction
// a_k (k >= 2) on generators by solving through contraction by tau, extended
// as an odd derivation.  Corrections stop at the variable count; for indices
// past the rank the obstruction must vanish identically (RingError with a
// witness otherwise, SolverInconsistency when a solvable step fails).
TwistData build_twist(const RealSection& s);

// All square-zero conditions of the twisted differential: for every
// antiholomorphic weight m,
//   sum_{i+j=m} a_i a_j + [dbar, a_{m-1}]_s = 0
// as matrices (weight-m component of the square of dbar + sum a_k).
IdentityVerdict verify_twist(const TwistData& t);

// The full twisted differential applied to a multivector:
// dbar(v) + (sum_k a_k)(v).
Multivector twisted_differential(const TwistData& t, const Multivector& v);

// Superconnection combining the derivation extension of a flat holomorphic
// connection (the partial half) with the twisted differential (the dbar
// half).  Throws NotFlat via the flatness check of c.
Superconnection superconnection_A(const TwistData& t, const Connection& c);

// psi = (supercurvature of A)^rank / rank!  together with its generalized
// supertrace packaged as a row matrix from the exterior algebra to its
// scalar part; applying `trace` to a multivector and reading the empty-mask
// coefficient evaluates the trace map (a (rank, *)-form).
struct TracedPsi {
  EndMatrix psi;
  EndMatrix trace;
};
TracedPsi psi_and_trace(const TwistData& t, const Connection& c);

// The (rank, *)-form obtained by evaluating the trace row on a multivector.
Form trace_value(const TracedPsi& tp, const Multivector& v);

// Cochain property of the trace row: dbar after the trace map equals the
// trace map after the twisted differential.  Checked three ways: the
// square-zero conditions of the twist (returned directly with a located
// witness when they fail), the matrix identities
//   [dbar + differential, psi]_s = 0  and  [dbar + differential, trace]_s = 0,
// and honest operator evaluation on every basis element dw_K (tensor) e_T.
IdentityVerdict verify_cochain_trace(const TwistData& t, const Connection& c);

// Free-module comparison with the coordinate Koszul complex: nu sends the
// j-th frame vector to the j-th ideal variable, u_tilde[0] extends the
// certificate matrix u to exterior powers by minor determinants, and each
// u_tilde[l] (l >= 1) raises the antiholomorphic degree by l and the exterior
// degree by l, solved so that the chain condition
//   (dbar + differential) after u_tilde  =  u_tilde after contraction by nu
// holds.  Requires one ideal variable per frame vector.
struct ComparisonData {
  BundleSpec bundle;
  RingSpec ring;
  IdealSpec ideal;
  DualMultivector nu;
  SeriesMatrix u;
  std::vector<EndMatrix> u_tilde;

  // Sum of the components.
  EndMatrix total() const;
};
ComparisonData build_comparison(const RealSection& s, const TwistData& t);

// The chain condition of the comparison map, as a matrix identity and by
// operator evaluation on every source basis element.
IdentityVerdict verify_comparison_chain(const ComparisonData& cmp, const TwistData& t);

// Evaluates the trace row on the comparison map at the top source basis
// element and checks the result equals dz_{i1} ^ ... ^ dz_{ir} (ideal
// variables in their given order) after reducing both modulo the ideal.
IdentityVerdict fundamental_class_local_twisted(const ComparisonData& cmp,
                                                const TracedPsi& tp);

// Projection to exterior degree zero followed by reduction modulo the ideal;
// intertwines the twisted differential with dbar.
Form augmentation(const Multivector& v, const IdealSpec& ideal);

}  // namespace skz
