#pragma once

// Shared recursive-descent front end for the expression grammar:
//   rational literals p or p/q, variables z<k>/w<k>, form generators
//   dz<k>/dw<k>, operators + - * ^, unary minus, parentheses, insignificant
//   whitespace.  '^' takes an integer exponent; a negative exponent is only
//   meaningful on unit bases and is resolved by the evaluators.
//
// The parser produces an AST; the series evaluator lives in ring.cpp and the
// form evaluator in forms.cpp.

#include <cstddef>
#include <memory>
#include <string>

#include "superkoszul/rational.hpp"
#include "superkoszul/ring.hpp"

namespace skz::detail {

struct ExprNode;
using ExprPtr = std::unique_ptr<ExprNode>;

struct ExprNode {
  enum class Kind { Number, Var, FormAtom, Neg, Add, Sub, Mul, Div, Pow };
  Kind kind;
  std::size_t offset = 0;  // byte offset in the source text, for diagnostics

  Rational number;              // Number
  VarKind var_kind = VarKind::Z;  // Var / FormAtom
  int var_index = 0;            // Var / FormAtom (1-based)
  int exponent = 0;             // Pow

  ExprPtr lhs, rhs;  // children (lhs only for Neg/Pow)
};

// Throws ParseError on malformed input.
ExprPtr parse_expression(const std::string& text);

}  // namespace skz::detail
