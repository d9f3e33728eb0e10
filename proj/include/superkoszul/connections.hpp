#pragma once

// Connections of type (1,0) on the free module E: flatness checking, the
// induced connection on the dual module, the derivation extension to the
// exterior algebra, curvature, the top Chern form, and superconnections with
// their supercurvature and Chern character.
//
// Frame conventions, fixed once: a connection is stored as its matrix Γ in
// the frame e_1..e_r, with ∇e_j = Σ_i Γ[i][j] e_i (columns hold images), and
// every entry is a form of bidegree (1,0).  The induced connection on the
// dual frame e^1..e^r has matrix Γ^∨ = −Γ^T, and the curvature of that dual
// connection is the matrix R = ∂̄(Γ^∨), again acting columnwise.

#include <optional>
#include <string>
#include <vector>

#include "superkoszul/forms.hpp"
#include "superkoszul/ring.hpp"
#include "superkoszul/superlinear.hpp"

namespace skz {

// ------------------------------------------------------------ form matrix --

// Square matrix of forms over a fixed ring, one row and column per frame
// vector; acts columnwise (frame vector j maps to Σ_i entry(i, j) · e_i).
class FormMatrix {
 public:
  FormMatrix(const BundleSpec& bundle, const RingSpec& ring);

  static FormMatrix zero(const BundleSpec& b, const RingSpec& r) { return {b, r}; }

  const BundleSpec& bundle() const { return bundle_; }
  const RingSpec& ring() const { return ring_; }
  // Zero-based indices; throws RingError when out of range.
  const Form& entry(int i, int j) const;
  void set_entry(int i, int j, const Form& f);

  bool is_zero() const;
  int min_valid_order() const;
  FormMatrix transposed() const;
  FormMatrix operator-() const;
  friend FormMatrix operator+(const FormMatrix& a, const FormMatrix& b);
  friend FormMatrix operator-(const FormMatrix& a, const FormMatrix& b);

 private:
  BundleSpec bundle_;
  RingSpec ring_;
  std::vector<std::vector<Form>> entries_;
};

// Entrywise Dolbeault operators.
FormMatrix dbar_entries(const FormMatrix& m);
FormMatrix partial_entries(const FormMatrix& m);

// Determinant of the square submatrix picked by equally long ascending
// zero-based row and column lists, expanded with wedge products.  Meaningful
// when the selected entries have even degree (so they commute); the top
// Chern form and exterior-power minors of a curvature matrix are the
// intended callers.  Empty selections give the scalar 1.
Form wedge_determinant(const FormMatrix& m, const std::vector<int>& rows,
                       const std::vector<int>& cols);
Form wedge_determinant(const FormMatrix& m);

// ------------------------------------------------------------- connection --

// ∇ = ∂ + Γ in the frame e_1..e_r; every Γ entry must be of bidegree (1,0).
class Connection {
 public:
  Connection(const BundleSpec& bundle, const RingSpec& ring, const FormMatrix& gamma);

  static Connection zero(const BundleSpec& b, const RingSpec& r);

  const BundleSpec& bundle() const { return gamma_.bundle(); }
  const RingSpec& ring() const { return gamma_.ring(); }
  const FormMatrix& gamma() const { return gamma_; }

 private:
  FormMatrix gamma_;
};

struct FlatnessWitness {
  int row = 0;  // one-based, matching the frame labels e_1..e_r
  int col = 0;
  FormKey key;
  Monomial monomial;
  std::string to_string() const;
};

struct FlatnessVerdict {
  bool flat = false;
  int verified_order = 0;  // ∂Γ + Γ∧Γ vanishes through this total degree
  std::optional<FlatnessWitness> witness;
};

struct NotFlat : RingError {
  explicit NotFlat(const FlatnessWitness& w);
  FlatnessWitness witness;
};

// ∇² = 0, i.e. ∂Γ + Γ∧Γ = 0 entrywise; reports the first failing entry.
FlatnessVerdict check_flat(const Connection& c);

// Induced connection on the dual frame: Γ^∨ = −Γ^T.
Connection dual_connection(const Connection& c);

// Matrix part of the derivation extension of ∇ to ⋀E: the odd superderivation
// with generator images Σ_i Γ[i][j] ⊗ e_i.  The full operator is ∂ + this.
EndMatrix exterior_extension_matrix(const Connection& c);

// Curvature of the induced dual connection: R = ∂̄(Γ^∨), acting columnwise on
// e^1..e^r.  Requires flatness (throws NotFlat); entries are then ∂̄-closed
// forms of bidegree (1,1).
FormMatrix curvature_R(const Connection& c);

// Wedge-product determinant of a curvature-shaped matrix; every entry must be
// purely of bidegree (1,1).
Form chern_form_top(const FormMatrix& R);

// --------------------------------------------------------- superconnection --

struct NotFlatHalves : RingError {
  NotFlatHalves(const std::string& half_name, const EntryWitness& w);
  std::string half;
  EntryWitness witness;
};

// Odd operator D + M on form-valued multivectors, where D is a scalar
// differential (∂̄, ∂, or d = ∂ + ∂̄) and M a finite sum of matrix pieces of
// odd total parity.  A combined superconnection keeps its two halves
// separate: the (1,0) half extends ∂ and the (0,1) half extends ∂̄.
class Superconnection {
 public:
  enum class Base { Dbar, Partial, Full };

  static Superconnection dbar_based(const BundleSpec& b, const RingSpec& r,
                                    std::vector<EndMatrix> pieces);
  static Superconnection partial_based(const BundleSpec& b, const RingSpec& r,
                                       std::vector<EndMatrix> pieces);
  // ∇ + δ from a ∂-based half and a ∂̄-based half over the same frame.
  static Superconnection combine(const Superconnection& partial_half,
                                 const Superconnection& dbar_half);

  Base base() const { return base_; }
  const BundleSpec& bundle() const { return bundle_; }
  const RingSpec& ring() const { return ring_; }
  const std::vector<EndMatrix>& partial_pieces() const { return partial_pieces_; }
  const std::vector<EndMatrix>& dbar_pieces() const { return dbar_pieces_; }
  EndMatrix partial_half_matrix() const;
  EndMatrix dbar_half_matrix() const;
  EndMatrix matrix_part() const;

  // A(v): the base differential of v plus the matrix action.
  Multivector apply_to(const Multivector& v) const;
  // A² as a matrix (the base differential squares to zero, so no residual
  // differential part remains).
  EndMatrix square() const;

 private:
  Superconnection(const BundleSpec& b, const RingSpec& r, Base base,
                  std::vector<EndMatrix> partial_pieces, std::vector<EndMatrix> dbar_pieces);

  BundleSpec bundle_;
  RingSpec ring_;
  Base base_;
  std::vector<EndMatrix> partial_pieces_;
  std::vector<EndMatrix> dbar_pieces_;
};

// Supercurvature of a combined superconnection A = ∇ + δ: verifies that each
// half squares to zero (throws NotFlatHalves with a witness otherwise) and
// returns R_A = A² = [∇, δ]_s, a matrix of even total parity.
EndMatrix supercurvature(const Superconnection& A);

// tr_s(Σ_{k≤n} R_A^k / k!) where n is the variable count.  Every term of the
// supercurvature of a combined superconnection carries holomorphic form
// degree exactly one, so higher powers vanish identically and the truncated
// sum equals the full exponential.
Form chern_character(const Superconnection& A);

}  // namespace skz
