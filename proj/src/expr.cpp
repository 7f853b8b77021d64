#include "approxwidths/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace approxwidths {

ParseError::ParseError(const std::string& message, std::size_t position)
    : PreconditionError(message + " at position " + std::to_string(position)),
      position_(position) {}

EvalError::EvalError(const std::string& message, std::string locus)
    : PreconditionError(message + " in '" + locus + "'"), locus_(std::move(locus)) {}

namespace {

constexpr const char* kFunctions[] = {"sin", "cos", "tan", "exp", "log", "abs", "sqrt"};

bool is_function(const std::string& s) {
  for (const char* f : kFunctions)
    if (s == f) return true;
  return false;
}

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

class Parser {
public:
  explicit Parser(std::string_view text) : s_(text) {}

  ExprPtr run() {
    ExprPtr e = expr();
    skip();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' ||
                                s_[pos_] == '\r'))
      ++pos_;
  }

  // ASCII '-' or U+2212.
  bool minus() {
    skip();
    if (pos_ < s_.size() && s_[pos_] == '-') {
      ++pos_;
      return true;
    }
    if (s_.substr(pos_, 3) == "\xE2\x88\x92") {
      pos_ += 3;
      return true;
    }
    return false;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr binary(char op, ExprPtr l, ExprPtr r, std::size_t at) {
    Expr e;
    e.kind = ExprKind::binary;
    e.op = op;
    e.args = {std::move(l), std::move(r)};
    e.position = at;
    return make(std::move(e));
  }

  ExprPtr expr() {
    ExprPtr left = term();
    while (true) {
      skip();
      const std::size_t at = pos_;
      if (accept('+')) left = binary('+', left, term(), at);
      else if (minus()) left = binary('-', left, term(), at);
      else return left;
    }
  }

  ExprPtr term() {
    ExprPtr left = factor();
    while (true) {
      skip();
      const std::size_t at = pos_;
      if (accept('*')) left = binary('*', left, factor(), at);
      else if (accept('/')) left = binary('/', left, factor(), at);
      else return left;
    }
  }

  ExprPtr factor() {
    ExprPtr base = unary();
    skip();
    const std::size_t at = pos_;
    if (accept('^')) return binary('^', base, factor(), at);
    return base;
  }

  ExprPtr unary() {
    skip();
    const std::size_t at = pos_;
    if (minus()) {
      Expr e;
      e.kind = ExprKind::negate;
      e.args = {unary()};
      e.position = at;
      return make(std::move(e));
    }
    return atom();
  }

  ExprPtr atom() {
    skip();
    const std::size_t at = pos_;
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (accept('(')) {
      ExprPtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
        ++end;
      std::string id(s_.substr(pos_, end - pos_));
      pos_ = end;
      Expr e;
      e.position = at;
      e.name = id;
      if (is_function(id)) {
        if (!accept('(')) fail("function '" + id + "' takes one argument in parentheses");
        e.kind = ExprKind::call;
        e.args = {expr()};
        if (accept(',')) fail("function '" + id + "' takes exactly one argument");
        if (!accept(')')) fail("expected ')' after the argument of '" + id + "'");
        return make(std::move(e));
      }
      if (id == "x" || id == "k") {
        e.kind = ExprKind::variable;
      } else if (id == "pi") {
        e.kind = ExprKind::constant;
        e.number = std::numbers::pi;
      } else if (id == "e") {
        e.kind = ExprKind::constant;
        e.number = std::numbers::e;
      } else {
        pos_ = at;
        fail("unknown identifier '" + id + "'");
      }
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') fail("'" + id + "' is not a function");
      return make(std::move(e));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  ExprPtr number() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    const auto digits = [&] {
      const std::size_t start = end;
      while (end < s_.size() && s_[end] >= '0' && s_[end] <= '9') ++end;
      return end > start;
    };
    bool any = digits();
    if (end < s_.size() && s_[end] == '.') {
      ++end;
      any = digits() || any;
    }
    if (!any) fail("malformed number");
    if (end < s_.size() && (s_[end] == 'e' || s_[end] == 'E')) {
      std::size_t save = end;
      ++end;
      if (end < s_.size() && (s_[end] == '+' || s_[end] == '-')) ++end;
      if (!digits()) end = save;
    }
    double v = 0.0;
    const auto res = std::from_chars(s_.data() + at, s_.data() + end, v);
    if (res.ec != std::errc() || res.ptr != s_.data() + end || !std::isfinite(v))
      fail("malformed number");
    pos_ = end;
    Expr e;
    e.kind = ExprKind::number;
    e.number = v;
    e.position = at;
    return make(std::move(e));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::binary:
      switch (e.op) {
        case '+':
        case '-': return 1;
        case '*':
        case '/': return 2;
        default: return 4;
      }
    case ExprKind::negate: return 3;
    default: return 5;
  }
}

std::string wrap(const Expr& e, bool paren) {
  return paren ? "(" + print(e) + ")" : print(e);
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

ExprPtr parse(std::string_view text) { return Parser(text).run(); }

std::string print(const Expr& e) {
  switch (e.kind) {
    case ExprKind::number: return format_number(e.number);
    case ExprKind::variable:
    case ExprKind::constant: return e.name;
    case ExprKind::call: return e.name + "(" + print(*e.args[0]) + ")";
    case ExprKind::negate: return "-" + wrap(*e.args[0], e.args[0]->kind == ExprKind::binary);
    case ExprKind::binary: {
      const Expr& l = *e.args[0];
      const Expr& r = *e.args[1];
      const int p = precedence(e);
      std::string ls, rs;
      if (e.op == '^') {
        ls = wrap(l, l.kind == ExprKind::binary);
        rs = wrap(r, precedence(r) < 3);
      } else {
        ls = wrap(l, precedence(l) < p);
        rs = wrap(r, precedence(r) <= p);
      }
      const char* sep = p == 1 ? " " : "";
      return ls + sep + std::string(1, e.op) + sep + rs;
    }
  }
  return "";
}

double evaluate(const Expr& e, double x, double k) {
  const auto check = [&](double v) {
    if (!std::isfinite(v)) throw EvalError("non-finite result", print(e));
    return v;
  };
  switch (e.kind) {
    case ExprKind::number:
    case ExprKind::constant: return e.number;
    case ExprKind::variable: return e.name == "x" ? x : k;
    case ExprKind::negate: return -evaluate(*e.args[0], x, k);
    case ExprKind::binary: {
      const double a = evaluate(*e.args[0], x, k);
      const double b = evaluate(*e.args[1], x, k);
      switch (e.op) {
        case '+': return check(a + b);
        case '-': return check(a - b);
        case '*': return check(a * b);
        case '/':
          if (b == 0.0) throw EvalError("division by zero", print(e));
          return check(a / b);
        default:
          if (a < 0.0 && b != std::trunc(b))
            throw EvalError("negative base with non-integer exponent", print(e));
          if (a == 0.0 && b < 0.0) throw EvalError("zero raised to a negative power", print(e));
          return check(std::pow(a, b));
      }
    }
    case ExprKind::call: {
      const double a = evaluate(*e.args[0], x, k);
      const std::string& f = e.name;
      if (f == "sin") return check(std::sin(a));
      if (f == "cos") return check(std::cos(a));
      if (f == "tan") return check(std::tan(a));
      if (f == "exp") return check(std::exp(a));
      if (f == "abs") return std::abs(a);
      if (f == "log") {
        if (a <= 0.0) throw EvalError("log of a non-positive value", print(e));
        return check(std::log(a));
      }
      if (a < 0.0) throw EvalError("sqrt of a negative value", print(e));
      return std::sqrt(a);
    }
  }
  return 0.0;
}

std::vector<Element> materialize_family(const Expr& e, const std::vector<double>& ks,
                                        const GridPtr& grid, SpaceKind kind, double p) {
  detail::require(!ks.empty(), "materialize_family: empty k-list");
  detail::require(grid != nullptr, "materialize_family: grid required");
  std::vector<Element> out;
  out.reserve(ks.size());
  for (std::size_t j = 0; j < ks.size(); ++j) {
    VectorXd v(grid->size());
    for (Index i = 0; i < grid->size(); ++i) {
      try {
        v(i) = evaluate(e, grid->node(i), ks[j]);
      } catch (const EvalError& err) {
        throw EvalError(std::string(err.what()) + " (k index " + std::to_string(j) +
                            ", node index " + std::to_string(i) + ")",
                        err.locus());
      }
    }
    switch (kind) {
      case SpaceKind::grid_sup: out.push_back(Element::grid_sup(grid, std::move(v))); break;
      case SpaceKind::grid_lp: out.push_back(Element::grid_lp(grid, std::move(v), p)); break;
      case SpaceKind::seq_lp: out.push_back(Element::seq_lp(std::move(v), p)); break;
    }
  }
  return out;
}

}  // namespace approxwidths
