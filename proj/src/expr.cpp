#include "varidescent/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace varidescent {

namespace {

enum class NodeKind { Number, Variable, Pi, Unary, Binary, Call };

}  // namespace

struct AnalyticExpr::Node {
  NodeKind kind;
  double number = 0.0;
  int variable = 0;          // 0-based axis for Variable
  char op = 0;               // + - * / ^ for Binary, '-' for Unary
  std::string func;          // sin cos exp log abs for Call
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const AnalyticExpr::Node>;
using Node = AnalyticExpr::Node;

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Number;
  n->number = v;
  return n;
}

class Parser {
 public:
  Parser(const std::string& src, int rank) : src_(src), rank_(rank) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
    NodePtr e = expr();
    skip_ws();
    if (pos_ < src_.size())
      throw ParseError(std::string("unexpected character '") + src_[pos_] + "'",
                       pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = binary('+', lhs, term());
      else if (accept('-'))
        lhs = binary('-', lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (accept('*'))
        lhs = binary('*', lhs, factor());
      else if (accept('/'))
        lhs = binary('/', lhs, factor());
      else
        return lhs;
    }
  }

  NodePtr factor() {
    if (accept('-')) {
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Unary;
      n->op = '-';
      n->lhs = power();
      return n;
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return binary('^', base, factor());
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("expected operand", pos_);
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    std::size_t consumed = 0;
    double v;
    try {
      v = std::stod(src_.substr(start), &consumed);
    } catch (const std::exception&) {
      throw ParseError("malformed number", start);
    }
    pos_ = start + consumed;
    return make_number(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string name = src_.substr(start, pos_ - start);
    if (name == "pi") {
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Pi;
      return n;
    }
    if (name == "sin" || name == "cos" || name == "exp" || name == "log" ||
        name == "abs") {
      if (!accept('(')) throw ParseError("expected '(' after " + name, pos_);
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Call;
      n->func = name;
      n->lhs = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return n;
    }
    if (name.size() >= 2 && name[0] == 'x') {
      bool digits = true;
      for (std::size_t i = 1; i < name.size(); ++i)
        digits = digits && std::isdigit(static_cast<unsigned char>(name[i]));
      if (digits) {
        const int axis = std::stoi(name.substr(1));
        if (axis < 1 || axis > rank_)
          throw ParseError("unknown identifier '" + name + "' (rank is " +
                               std::to_string(rank_) + ")",
                           start);
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Variable;
        n->variable = axis - 1;
        return n;
      }
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }

  NodePtr binary(char op, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Binary;
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
  }

  const std::string& src_;
  int rank_;
  std::size_t pos_ = 0;
};

double eval_node(const Node& n, std::span<const double> x) {
  switch (n.kind) {
    case NodeKind::Number:
      return n.number;
    case NodeKind::Pi:
      return std::numbers::pi;
    case NodeKind::Variable:
      return x[static_cast<std::size_t>(n.variable)];
    case NodeKind::Unary:
      return -eval_node(*n.lhs, x);
    case NodeKind::Binary: {
      const double a = eval_node(*n.lhs, x);
      const double b = eval_node(*n.rhs, x);
      switch (n.op) {
        case '+':
          return a + b;
        case '-':
          return a - b;
        case '*':
          return a * b;
        case '/':
          return a / b;
        case '^':
          return std::pow(a, b);
      }
      return 0.0;
    }
    case NodeKind::Call: {
      const double a = eval_node(*n.lhs, x);
      if (n.func == "sin") return std::sin(a);
      if (n.func == "cos") return std::cos(a);
      if (n.func == "exp") return std::exp(a);
      if (n.func == "log") return std::log(a);
      return std::abs(a);
    }
  }
  return 0.0;
}

void print_node(const Node& n, std::ostringstream& out) {
  switch (n.kind) {
    case NodeKind::Number:
      out.precision(17);
      out << n.number;
      break;
    case NodeKind::Pi:
      out << "pi";
      break;
    case NodeKind::Variable:
      out << 'x' << (n.variable + 1);
      break;
    case NodeKind::Unary:
      out << "(-";
      print_node(*n.lhs, out);
      out << ')';
      break;
    case NodeKind::Binary:
      out << '(';
      print_node(*n.lhs, out);
      out << n.op;
      print_node(*n.rhs, out);
      out << ')';
      break;
    case NodeKind::Call:
      out << n.func << '(';
      print_node(*n.lhs, out);
      out << ')';
      break;
  }
}

int max_var_node(const Node& n) {
  switch (n.kind) {
    case NodeKind::Variable:
      return n.variable + 1;
    case NodeKind::Unary:
    case NodeKind::Call:
      return max_var_node(*n.lhs);
    case NodeKind::Binary:
      return std::max(max_var_node(*n.lhs), max_var_node(*n.rhs));
    default:
      return 0;
  }
}

}  // namespace

double AnalyticExpr::evaluate(std::span<const double> x) const {
  if (!root_) throw Error("AnalyticExpr: evaluating empty expression");
  return eval_node(*root_, x);
}

std::string AnalyticExpr::print() const {
  if (!root_) return "";
  std::ostringstream out;
  print_node(*root_, out);
  return out.str();
}

int AnalyticExpr::max_variable() const { return root_ ? max_var_node(*root_) : 0; }

AnalyticExpr parse_expression(const std::string& source, int rank) {
  AnalyticExpr e;
  e.root_ = Parser(source, rank).parse();
  return e;
}

AnalyticExpr zero_expression() {
  AnalyticExpr e;
  e.root_ = make_number(0.0);
  return e;
}

GridFunction sample_expression(const AnalyticExpr& expr, const UniformGrid& grid,
                               Placement placement) {
  const AnalyticExpr exprs[] = {expr};
  return sample_expressions(exprs, grid, placement);
}

GridFunction sample_expressions(std::span<const AnalyticExpr> exprs,
                                const UniformGrid& grid, Placement placement) {
  for (const AnalyticExpr& e : exprs)
    if (e.max_variable() > grid.rank())
      throw Error("sample_expression: expression references x" +
                  std::to_string(e.max_variable()) + " on a rank-" +
                  std::to_string(grid.rank()) + " grid");
  GridFunction out(grid, placement, static_cast<int>(exprs.size()));
  std::array<double, kMaxRank> x{};
  const std::size_t points = out.point_count();
  for (std::size_t p = 0; p < points; ++p) {
    out.point_coords(p, std::span<double>(x.data(), static_cast<std::size_t>(grid.rank())));
    for (int c = 0; c < out.components(); ++c)
      out.at(p, c) = exprs[static_cast<std::size_t>(c)].evaluate(
          std::span<const double>(x.data(), static_cast<std::size_t>(grid.rank())));
  }
  out.require_finite("sample_expression");
  return out;
}

}  // namespace varidescent
