#include "evi/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "evi/error.hpp"

namespace evi {

struct Expression::Node {
  Kind kind = Kind::Number;
  double value = 0.0;
  std::string name;
  int index = -1;
  Function function = Function::Min;
  std::vector<Expression> children;
};

namespace {

std::shared_ptr<Expression::Node> make_node(Expression::Kind kind) {
  auto node = std::make_shared<Expression::Node>();
  node->kind = kind;
  return node;
}

bool is_binary(Expression::Kind kind) {
  using K = Expression::Kind;
  return kind == K::Add || kind == K::Subtract || kind == K::Multiply || kind == K::Divide;
}

double finite_or_throw(double value, const char* op) {
  if (!std::isfinite(value)) {
    throw EvalError(EvalErrorKind::NonFinite, std::string("non-finite result from ") + op);
  }
  return value;
}

template <typename Lookup>
double eval_node(const Expression& e, const Lookup& lookup) {
  using K = Expression::Kind;
  using F = Expression::Function;
  const auto ops = e.operands();
  switch (e.kind()) {
    case K::Number:
      return e.number_value();
    case K::Variable:
      return lookup(e);
    case K::Negate:
      return -eval_node(ops[0], lookup);
    case K::Add:
      return finite_or_throw(eval_node(ops[0], lookup) + eval_node(ops[1], lookup), "+");
    case K::Subtract:
      return finite_or_throw(eval_node(ops[0], lookup) - eval_node(ops[1], lookup), "-");
    case K::Multiply:
      return finite_or_throw(eval_node(ops[0], lookup) * eval_node(ops[1], lookup), "*");
    case K::Divide: {
      const double num = eval_node(ops[0], lookup);
      const double den = eval_node(ops[1], lookup);
      if (den == 0.0) throw EvalError(EvalErrorKind::DivisionByZero, "division by zero");
      return finite_or_throw(num / den, "/");
    }
    case K::Call:
      break;
  }
  switch (e.function()) {
    case F::Min:
    case F::Max: {
      double acc = eval_node(ops[0], lookup);
      for (std::size_t i = 1; i < ops.size(); ++i) {
        const double v = eval_node(ops[i], lookup);
        acc = e.function() == F::Min ? std::min(acc, v) : std::max(acc, v);
      }
      return acc;
    }
    case F::Exp:
      return finite_or_throw(std::exp(eval_node(ops[0], lookup)), "exp");
    case F::Ln: {
      const double x = eval_node(ops[0], lookup);
      if (!(x > 0.0)) throw EvalError(EvalErrorKind::LogDomain, "ln of non-positive argument");
      return std::log(x);
    }
    case F::Pow:
      return finite_or_throw(std::pow(eval_node(ops[0], lookup), eval_node(ops[1], lookup)), "pow");
    case F::Abs:
      return std::abs(eval_node(ops[0], lookup));
  }
  return 0.0;
}

// Binding level used by the printer: higher binds tighter.
int precedence(const Expression& e) {
  using K = Expression::Kind;
  switch (e.kind()) {
    case K::Add:
    case K::Subtract:
      return 1;
    case K::Multiply:
    case K::Divide:
      return 2;
    case K::Negate:
      return 3;
    default:
      return 4;
  }
}

void print(const Expression& e, std::string& out) {
  using K = Expression::Kind;
  auto wrapped = [&out](const Expression& child, bool parens) {
    if (parens) out += '(';
    print(child, out);
    if (parens) out += ')';
  };
  const auto ops = e.operands();
  switch (e.kind()) {
    case K::Number: {
      char buf[64];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, e.number_value());
      out.append(buf, end);
      return;
    }
    case K::Variable:
      out += e.variable_name();
      return;
    case K::Negate:
      out += '-';
      wrapped(ops[0], precedence(ops[0]) < 3);
      return;
    case K::Call:
      out += function_name(e.function());
      out += '(';
      for (std::size_t i = 0; i < ops.size(); ++i) {
        if (i) out += ", ";
        print(ops[i], out);
      }
      out += ')';
      return;
    default:
      break;
  }
  const int p = precedence(e);
  wrapped(ops[0], precedence(ops[0]) < p);
  switch (e.kind()) {
    case K::Add:
      out += " + ";
      break;
    case K::Subtract:
      out += " - ";
      break;
    case K::Multiply:
      out += " * ";
      break;
    default:
      out += " / ";
      break;
  }
  wrapped(ops[1], precedence(ops[1]) <= p);
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expression parse() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError(pos_, "empty expression");
    Expression e = expr();
    skip_space();
    if (pos_ != text_.size()) throw ParseError(pos_, "unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  Expression expr() {
    Expression lhs = term();
    while (true) {
      skip_space();
      if (accept('+')) {
        lhs = Expression::binary(Expression::Kind::Add, lhs, term());
      } else if (accept('-')) {
        lhs = Expression::binary(Expression::Kind::Subtract, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expression term() {
    Expression lhs = factor();
    while (true) {
      skip_space();
      if (accept('*')) {
        lhs = Expression::binary(Expression::Kind::Multiply, lhs, factor());
      } else if (accept('/')) {
        lhs = Expression::binary(Expression::Kind::Divide, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  Expression factor() {
    skip_space();
    if (accept('-')) return Expression::negate(factor());
    return primary();
  }

  Expression primary() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError(pos_, "unexpected end of expression");
    const char c = text_[pos_];
    if (accept('(')) {
      Expression inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(pos_, "unexpected '" + std::string(1, c) + "'");
  }

  Expression number() {
    const std::size_t start = pos_;
    auto digits = [this] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError(start, "malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw ParseError(start, "malformed exponent");
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_ || !std::isfinite(value)) {
      throw ParseError(start, "number out of range");
    }
    return Expression::number(value);
  }

  Expression identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    std::string name(text_.substr(start, pos_ - start));
    skip_space();
    if (!accept('(')) return Expression::variable(std::move(name));

    static const std::pair<std::string_view, Expression::Function> kFunctions[] = {
        {"min", Expression::Function::Min}, {"max", Expression::Function::Max},
        {"exp", Expression::Function::Exp}, {"ln", Expression::Function::Ln},
        {"pow", Expression::Function::Pow}, {"abs", Expression::Function::Abs}};
    const auto it = std::find_if(std::begin(kFunctions), std::end(kFunctions),
                                 [&](const auto& f) { return f.first == name; });
    if (it == std::end(kFunctions)) throw ParseError(start, "unknown function '" + name + "'");

    std::vector<Expression> args{expr()};
    skip_space();
    while (accept(',')) {
      args.push_back(expr());
      skip_space();
    }
    expect(')');

    const auto f = it->second;
    const std::size_t arity = f == Expression::Function::Pow ? 2 : 1;
    const bool variadic = f == Expression::Function::Min || f == Expression::Function::Max;
    if (variadic ? args.size() < 1 : args.size() != arity) {
      throw ParseError(start, name + " expects " + std::to_string(arity) + " argument(s), got " +
                                  std::to_string(args.size()));
    }
    return Expression::call(f, std::move(args));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_space();
    if (!accept(c)) throw ParseError(pos_, std::string("expected '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::number(double value) {
  if (!std::isfinite(value)) throw ModelError("", "numeric literal must be finite");
  auto node = make_node(Kind::Number);
  node->value = value;
  return Expression(std::move(node));
}

Expression Expression::variable(std::string name) {
  auto node = make_node(Kind::Variable);
  node->name = std::move(name);
  return Expression(std::move(node));
}

Expression Expression::negate(Expression operand) {
  auto node = make_node(Kind::Negate);
  node->children.push_back(std::move(operand));
  return Expression(std::move(node));
}

Expression Expression::binary(Kind kind, Expression lhs, Expression rhs) {
  if (!is_binary(kind)) throw ModelError("", "not a binary operator kind");
  auto node = make_node(kind);
  node->children = {std::move(lhs), std::move(rhs)};
  return Expression(std::move(node));
}

Expression Expression::call(Function function, std::vector<Expression> args) {
  const bool variadic = function == Function::Min || function == Function::Max;
  const std::size_t arity = function == Function::Pow ? 2 : 1;
  if (variadic ? args.empty() : args.size() != arity) {
    throw ModelError("", std::string(function_name(function)) + ": wrong argument count");
  }
  auto node = make_node(Kind::Call);
  node->function = function;
  node->children = std::move(args);
  return Expression(std::move(node));
}

Expression::Kind Expression::kind() const { return node_->kind; }
double Expression::number_value() const { return node_->value; }
const std::string& Expression::variable_name() const { return node_->name; }
int Expression::variable_index() const { return node_->index; }
Expression::Function Expression::function() const { return node_->function; }
std::span<const Expression> Expression::operands() const { return node_->children; }

double Expression::evaluate(const std::map<std::string, double, std::less<>>& assignment) const {
  return eval_node(*this, [&assignment](const Expression& v) {
    const auto it = assignment.find(v.variable_name());
    if (it == assignment.end()) {
      throw EvalError(EvalErrorKind::MissingVariable, "missing variable '" + v.variable_name() + "'");
    }
    return it->second;
  });
}

double Expression::evaluate(std::span<const double> values) const {
  return eval_node(*this, [values](const Expression& v) {
    const int i = v.variable_index();
    if (i < 0 || static_cast<std::size_t>(i) >= values.size()) {
      throw EvalError(EvalErrorKind::MissingVariable, "missing variable '" + v.variable_name() + "'");
    }
    return values[static_cast<std::size_t>(i)];
  });
}

Expression Expression::bind(std::span<const std::string> names) const {
  if (node_->kind == Kind::Variable) {
    const auto it = std::find(names.begin(), names.end(), node_->name);
    if (it == names.end()) throw ModelError("", "unresolved variable reference '" + node_->name + "'");
    auto node = std::make_shared<Node>(*node_);
    node->index = static_cast<int>(it - names.begin());
    return Expression(std::move(node));
  }
  if (node_->children.empty()) return *this;
  auto node = std::make_shared<Node>(*node_);
  for (auto& child : node->children) child = child.bind(names);
  return Expression(std::move(node));
}

bool Expression::is_bound() const {
  if (node_->kind == Kind::Variable) return node_->index >= 0;
  return std::all_of(node_->children.begin(), node_->children.end(),
                     [](const Expression& c) { return c.is_bound(); });
}

std::vector<std::string> Expression::variables() const {
  std::vector<std::string> out;
  auto walk = [&out](const Expression& e, auto& self) -> void {
    if (e.kind() == Kind::Variable) {
      if (std::find(out.begin(), out.end(), e.variable_name()) == out.end()) {
        out.push_back(e.variable_name());
      }
      return;
    }
    for (const auto& c : e.operands()) self(c, self);
  };
  walk(*this, walk);
  return out;
}

std::string Expression::to_string() const {
  std::string out;
  print(*this, out);
  return out;
}

bool Expression::operator==(const Expression& other) const {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::Number:
      return a.value == b.value;
    case Kind::Variable:
      return a.name == b.name;
    case Kind::Call:
      if (a.function != b.function) return false;
      break;
    default:
      break;
  }
  return a.children == b.children;
}

std::string_view function_name(Expression::Function function) {
  switch (function) {
    case Expression::Function::Min:
      return "min";
    case Expression::Function::Max:
      return "max";
    case Expression::Function::Exp:
      return "exp";
    case Expression::Function::Ln:
      return "ln";
    case Expression::Function::Pow:
      return "pow";
    case Expression::Function::Abs:
      return "abs";
  }
  return "?";
}

Expression parse_expression(std::string_view text) { return Parser(text).parse(); }

}  // namespace evi
