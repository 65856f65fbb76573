#pragma once

#include <functional>
#include <memory>
#include <string>

#include "pidelab/common.hpp"

namespace pidelab {

using CoeffExpr = std::function<double(const Vec&)>;

/// Small arithmetic expression grammar for coefficient fields:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := unary ('^' factor)?
///   unary  := '-' unary | primary
///   primary:= number | ident | func '(' expr {',' expr} ')' | '(' expr ')'
/// Variables x (alias x1), x1..x3; constants pi, e; functions sin, cos, tan,
/// exp, log, sqrt, abs, sign, floor, pow, min, max.
class ExpressionParser {
  public:
    static CoeffExpr parse(const std::string& src) {
        ExpressionParser p(src);
        CoeffExpr e = p.expr();
        p.skip_ws();
        if (p.pos_ != p.src_.size())
            throw std::invalid_argument("expression: trailing input at position " +
                                        std::to_string(p.pos_) + " in '" + src + "'");
        return e;
    }

  private:
    explicit ExpressionParser(std::string src) : src_(std::move(src)) {}

    std::string src_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    CoeffExpr expr() {
        CoeffExpr left = term();
        for (;;) {
            if (eat('+')) {
                CoeffExpr right = term();
                left = [left, right](const Vec& x) { return left(x) + right(x); };
            } else if (eat('-')) {
                CoeffExpr right = term();
                left = [left, right](const Vec& x) { return left(x) - right(x); };
            } else {
                return left;
            }
        }
    }

    CoeffExpr term() {
        CoeffExpr left = factor();
        for (;;) {
            if (eat('*')) {
                CoeffExpr right = factor();
                left = [left, right](const Vec& x) { return left(x) * right(x); };
            } else if (eat('/')) {
                CoeffExpr right = factor();
                left = [left, right](const Vec& x) { return left(x) / right(x); };
            } else {
                return left;
            }
        }
    }

    CoeffExpr factor() {
        // unary minus binds outside the power: -x^2 == -(x^2)
        if (eat('-')) {
            CoeffExpr e = factor();
            return [e](const Vec& x) { return -e(x); };
        }
        CoeffExpr base = primary();
        if (eat('^')) {
            CoeffExpr ex = factor();  // right associative
            return [base, ex](const Vec& x) { return std::pow(base(x), ex(x)); };
        }
        return base;
    }

    CoeffExpr primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw std::invalid_argument("expression: unexpected end");
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
        if (eat('(')) {
            CoeffExpr e = expr();
            if (!eat(')')) throw std::invalid_argument("expression: expected ')'");
            return e;
        }
        throw std::invalid_argument(std::string("expression: unexpected character '") + c + "'");
    }

    CoeffExpr number() {
        size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' ||
                src_[pos_] == 'e' || src_[pos_] == 'E' ||
                ((src_[pos_] == '+' || src_[pos_] == '-') && pos_ > start &&
                 (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E'))))
            ++pos_;
        double v = std::stod(src_.substr(start, pos_ - start));
        return [v](const Vec&) { return v; };
    }

    std::vector<CoeffExpr> args() {
        std::vector<CoeffExpr> a;
        if (!eat('(')) throw std::invalid_argument("expression: expected '('");
        a.push_back(expr());
        while (eat(',')) a.push_back(expr());
        if (!eat(')')) throw std::invalid_argument("expression: expected ')'");
        return a;
    }

    CoeffExpr ident() {
        size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                      src_[pos_] == '_'))
            ++pos_;
        std::string name = src_.substr(start, pos_ - start);
        if (name == "pi") return [](const Vec&) { return kPi; };
        if (name == "e") return [](const Vec&) { return std::exp(1.0); };
        if (name == "x" || name == "x1") return [](const Vec& x) { return x[0]; };
        if (name == "x2") return [](const Vec& x) { return x.dim > 1 ? x[1] : 0.0; };
        if (name == "x3") return [](const Vec& x) { return x.dim > 2 ? x[2] : 0.0; };

        auto unary_fn = [&](double (*f)(double)) {
            auto a = args();
            if (a.size() != 1) throw std::invalid_argument("expression: " + name + " takes 1 arg");
            CoeffExpr g = a[0];
            return CoeffExpr([f, g](const Vec& x) { return f(g(x)); });
        };
        if (name == "sin") return unary_fn([](double t) { return std::sin(t); });
        if (name == "cos") return unary_fn([](double t) { return std::cos(t); });
        if (name == "tan") return unary_fn([](double t) { return std::tan(t); });
        if (name == "exp") return unary_fn([](double t) { return std::exp(t); });
        if (name == "log") return unary_fn([](double t) { return std::log(t); });
        if (name == "sqrt") return unary_fn([](double t) { return std::sqrt(t); });
        if (name == "abs") return unary_fn([](double t) { return std::abs(t); });
        if (name == "floor") return unary_fn([](double t) { return std::floor(t); });
        if (name == "sign")
            return unary_fn([](double t) { return t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0); });
        if (name == "pow" || name == "min" || name == "max") {
            auto a = args();
            if (a.size() != 2) throw std::invalid_argument("expression: " + name + " takes 2 args");
            CoeffExpr g = a[0], h = a[1];
            if (name == "pow") return CoeffExpr([g, h](const Vec& x) { return std::pow(g(x), h(x)); });
            if (name == "min")
                return CoeffExpr([g, h](const Vec& x) { return std::min(g(x), h(x)); });
            return CoeffExpr([g, h](const Vec& x) { return std::max(g(x), h(x)); });
        }
        throw std::invalid_argument("expression: unknown identifier '" + name + "'");
    }
};

inline CoeffExpr parse_expression(const std::string& src) { return ExpressionParser::parse(src); }

}  // namespace pidelab
