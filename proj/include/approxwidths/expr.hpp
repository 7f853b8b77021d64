#pragma once

// Arithmetic expressions in x and k for defining function families.
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := unary ('^' factor)?
//   unary  := '-' unary | atom
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//
// Note that unary minus binds tighter than '^': "-x^2" is (-x)^2.

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "approxwidths/error.hpp"
#include "approxwidths/spaces.hpp"

namespace approxwidths {

enum class ExprKind { number, variable, constant, negate, binary, call };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::number;
  double number = 0.0;  ///< literal value, or the value of a named constant
  char op = 0;          ///< '+', '-', '*', '/', '^' for binary nodes
  std::string name;     ///< variable, constant or function name
  std::vector<ExprPtr> args;
  std::size_t position = 0;  ///< offset of the node in the source text
};

class ParseError : public PreconditionError {
public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

class EvalError : public PreconditionError {
public:
  EvalError(const std::string& message, std::string locus);
  /// Printed form of the failing subexpression.
  const std::string& locus() const { return locus_; }

private:
  std::string locus_;
};

ExprPtr parse(std::string_view text);

/// Normalized text; parse(print(e)) reproduces e.
std::string print(const Expr& e);

double evaluate(const Expr& e, double x, double k);

/// One element per k, sampling the expression at the grid nodes.
/// For seq_lp the node values become the sequence entries.
std::vector<Element> materialize_family(const Expr& e, const std::vector<double>& ks,
                                        const GridPtr& grid, SpaceKind kind, double p = 2.0);

}  // namespace approxwidths
