#pragma once

// Exact solver for ring-linear systems over the truncated polynomial ring:
// finitely many unknown series x_j, constraints sum_j c_j * x_j = rhs read as
// series identities up to a target order.  Expanding per monomial yields one
// exact rational linear system; we compute the reduced echelon solution with
// columns ordered graded-lexicographically (low degree first) and free
// variables set to zero, which both minimizes low-degree support and makes
// the assignment canonical: it depends only on the system, never on equation
// order.

#include <string>
#include <utility>
#include <vector>

#include "superkoszul/ring.hpp"

namespace skz {

struct SolverInconsistency : RingError {
  int degree;
  std::string equation;
  std::string monomial;
  Rational residual;
  SolverInconsistency(int deg, std::string eq, std::string mono, Rational res)
      : RingError("inconsistent linear system at degree " + std::to_string(deg) +
                  ": equation '" + eq + "' monomial " + mono + " has residual " + res.str()),
        degree(deg),
        equation(std::move(eq)),
        monomial(std::move(mono)),
        residual(std::move(res)) {}
};

class GradedLinearSystem {
 public:
  GradedLinearSystem(const RingSpec& ring, int num_unknowns)
      : ring_(ring), num_unknowns_(num_unknowns) {}

  // lhs: (unknown index, ring coefficient) pairs, summed; the label names the
  // equation in inconsistency witnesses.
  void add_equation(std::string label, std::vector<std::pair<int, TruncatedSeries>> lhs,
                    TruncatedSeries rhs);

  // Order up to which the constraints are imposed: min of the ring truncation
  // and every coefficient/rhs valid order.
  int target_order() const;

  // Canonical assignment; throws SolverInconsistency if no solution exists
  // up to target_order().  Each returned series claims validity only to
  // target_order() minus the lowest degree among its own coefficients in the
  // system: beyond that, no equation within the truncation constrains the
  // unknown, so the zero fill there is a representative choice, not data.
  std::vector<TruncatedSeries> solve() const;

 private:
  struct Equation {
    std::string label;
    std::vector<std::pair<int, TruncatedSeries>> lhs;
    TruncatedSeries rhs;
  };
  RingSpec ring_;
  int num_unknowns_;
  std::vector<Equation> equations_;
};

}  // namespace skz
