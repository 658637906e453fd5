#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fbvp/errors.hpp"

namespace fbvp {

// Minimal arithmetic expression over named variables: numbers, + - * /,
// unary minus, parentheses, and the functions abs, pow, min, max. Parsed
// once into a flat postfix-ordered node list; evaluation is allocation-free
// and safe for concurrent use.
class Expression {
 public:
  static Expression parse(const std::string& text,
                          std::vector<std::string> variables) {
    Parser p(text, variables);
    Expression e;
    e.vars_ = std::move(variables);
    e.nodes_ = p.run();
    return e;
  }

  double eval(const std::vector<double>& args) const {
    std::vector<double> v(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      switch (n.op) {
        case Op::Const: v[i] = n.value; break;
        case Op::Var: v[i] = args[static_cast<std::size_t>(n.a)]; break;
        case Op::Add: v[i] = v[n.a] + v[n.b]; break;
        case Op::Sub: v[i] = v[n.a] - v[n.b]; break;
        case Op::Mul: v[i] = v[n.a] * v[n.b]; break;
        case Op::Div: v[i] = v[n.a] / v[n.b]; break;
        case Op::Neg: v[i] = -v[n.a]; break;
        case Op::Abs: v[i] = std::abs(v[n.a]); break;
        case Op::Pow: v[i] = std::pow(v[n.a], v[n.b]); break;
        case Op::Min: v[i] = std::min(v[n.a], v[n.b]); break;
        case Op::Max: v[i] = std::max(v[n.a], v[n.b]); break;
      }
    }
    return v.back();
  }

  const std::vector<std::string>& variables() const { return vars_; }

 private:
  enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Abs, Pow, Min, Max };

  struct Node {
    Op op;
    double value = 0.0;
    int a = -1;
    int b = -1;
  };

  class Parser {
   public:
    Parser(const std::string& text, const std::vector<std::string>& vars)
        : text_(text), vars_(vars) {}

    std::vector<Node> run() {
      const int root = parse_expr();
      skip_ws();
      if (pos_ != text_.size()) fail("unexpected trailing input");
      (void)root;
      return std::move(nodes_);
    }

   private:
    int parse_expr() {
      int lhs = parse_term();
      for (;;) {
        skip_ws();
        if (accept('+')) {
          lhs = emit({Op::Add, 0.0, lhs, parse_term()});
        } else if (accept('-')) {
          lhs = emit({Op::Sub, 0.0, lhs, parse_term()});
        } else {
          return lhs;
        }
      }
    }

    int parse_term() {
      int lhs = parse_unary();
      for (;;) {
        skip_ws();
        if (accept('*')) {
          lhs = emit({Op::Mul, 0.0, lhs, parse_unary()});
        } else if (accept('/')) {
          lhs = emit({Op::Div, 0.0, lhs, parse_unary()});
        } else {
          return lhs;
        }
      }
    }

    int parse_unary() {
      skip_ws();
      if (accept('-')) return emit({Op::Neg, 0.0, parse_unary(), -1});
      return parse_primary();
    }

    int parse_primary() {
      skip_ws();
      if (pos_ >= text_.size()) fail("unexpected end of expression");
      const char c = text_[pos_];
      if (accept('(')) {
        const int e = parse_expr();
        expect(')');
        return e;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t consumed = 0;
        double value = 0.0;
        try {
          value = std::stod(text_.substr(pos_), &consumed);
        } catch (const std::exception&) {
          fail("malformed number");
        }
        pos_ += consumed;
        return emit({Op::Const, value, -1, -1});
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const std::string name = read_identifier();
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '(') {
          ++pos_;
          if (name == "abs") {
            const int a = parse_expr();
            expect(')');
            return emit({Op::Abs, 0.0, a, -1});
          }
          Op op;
          if (name == "pow") {
            op = Op::Pow;
          } else if (name == "min") {
            op = Op::Min;
          } else if (name == "max") {
            op = Op::Max;
          } else {
            fail("unknown function '" + name + "'");
            return -1;
          }
          const int a = parse_expr();
          expect(',');
          const int b = parse_expr();
          expect(')');
          return emit({op, 0.0, a, b});
        }
        const auto it = std::find(vars_.begin(), vars_.end(), name);
        if (it == vars_.end()) fail("unknown variable '" + name + "'");
        return emit(
            {Op::Var, 0.0, static_cast<int>(it - vars_.begin()), -1});
      }
      fail(std::string("unexpected character '") + c + "'");
      return -1;
    }

    std::string read_identifier() {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        ++pos_;
      return text_.substr(start, pos_ - start);
    }

    void skip_ws() {
      while (pos_ < text_.size() &&
             std::isspace(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    }

    bool accept(char c) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == c) {
        ++pos_;
        return true;
      }
      return false;
    }

    void expect(char c) {
      if (!accept(c))
        fail(std::string("expected '") + c + "'");
    }

    [[noreturn]] void fail(const std::string& why) {
      throw ConfigError("expression error at position " +
                        std::to_string(pos_) + ": " + why);
    }

    int emit(Node n) {
      nodes_.push_back(n);
      return static_cast<int>(nodes_.size()) - 1;
    }

    const std::string& text_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
    std::vector<Node> nodes_;
  };

  std::vector<std::string> vars_;
  std::vector<Node> nodes_;
};

}  // namespace fbvp
