#pragma once

#include <memory>
#include <span>
#include <string>

#include "varidescent/grid.hpp"

namespace varidescent {

/// Syntax error with the byte offset where parsing failed.
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t offset)
      : Error(msg + " at offset " + std::to_string(offset)), offset(offset) {}
  std::size_t offset;
};

/// Parsed analytic expression over x1..xn, pi, and the functions
/// sin cos exp log abs. Immutable after parsing.
///
/// Grammar (left-associative binary operators, ^ binds tightest):
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := ('-')? power
///   power  := atom ('^' factor)?
///   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
class AnalyticExpr {
 public:
  AnalyticExpr() = default;

  double evaluate(std::span<const double> x) const;
  /// Canonical fully parenthesized rendering; parse(print(e)) is a fixed point.
  std::string print() const;
  /// Highest coordinate index referenced (0 for constant expressions).
  int max_variable() const;
  bool empty() const { return root_ == nullptr; }

  struct Node;

 private:
  friend AnalyticExpr parse_expression(const std::string&, int);
  friend AnalyticExpr zero_expression();
  std::shared_ptr<const Node> root_;
};

/// Parses `source` against coordinates x1..x<rank>; identifiers outside that
/// range are unknown-identifier errors.
AnalyticExpr parse_expression(const std::string& source, int rank);

/// Convenience: expression that evaluates to 0 everywhere.
AnalyticExpr zero_expression();

/// Pointwise evaluation of an expression at node or cell coordinates.
GridFunction sample_expression(const AnalyticExpr& expr, const UniformGrid& grid,
                               Placement placement);

/// Samples one expression per component into a d-component field.
GridFunction sample_expressions(std::span<const AnalyticExpr> exprs,
                                const UniformGrid& grid, Placement placement);

}  // namespace varidescent
