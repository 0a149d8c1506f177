#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evi {

// Immutable value-expression AST. Copies share structure; equality is
// structural. Variable nodes carry a name and, after bind(), a column index
// for the fast span-based evaluation path.
class Expression {
 public:
  enum class Kind { Number, Variable, Negate, Add, Subtract, Multiply, Divide, Call };
  enum class Function { Min, Max, Exp, Ln, Pow, Abs };

  static Expression number(double value);
  static Expression variable(std::string name);
  static Expression negate(Expression operand);
  static Expression binary(Kind kind, Expression lhs, Expression rhs);
  static Expression call(Function function, std::vector<Expression> args);

  Kind kind() const;
  double number_value() const;
  const std::string& variable_name() const;
  /// Column index of a bound variable node, or -1 when unbound.
  int variable_index() const;
  Function function() const;
  std::span<const Expression> operands() const;

  /// Evaluates against named values. Throws EvalError on a missing variable,
  /// division by zero, ln of a non-positive argument, or a non-finite result.
  double evaluate(const std::map<std::string, double, std::less<>>& assignment) const;
  /// Evaluates a bound expression against values in model variable order.
  double evaluate(std::span<const double> values) const;

  /// Resolves every variable reference to its index in `names`; throws
  /// ModelError naming the first unresolved reference.
  Expression bind(std::span<const std::string> names) const;
  bool is_bound() const;

  /// Distinct variable names referenced, in first-occurrence order.
  std::vector<std::string> variables() const;

  /// Minimal-parenthesis rendering that parses back to an equal tree.
  std::string to_string() const;

  /// Structural equality; ignores binding state.
  bool operator==(const Expression& other) const;

  struct Node;

 private:
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

std::string_view function_name(Expression::Function function);

/// Parses the value-expression grammar:
///   expr    := term (("+"|"-") term)*
///   term    := factor (("*"|"/") factor)*
///   factor  := "-" factor | primary
///   primary := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"
/// Throws ParseError with the character offset of the problem.
Expression parse_expression(std::string_view text);

}  // namespace evi
