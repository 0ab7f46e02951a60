#include "nplace/history_expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "nplace/errors.hpp"

namespace nplace {

namespace {

struct Dual {
    double v;
    double d;
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }

}  // namespace

struct HistoryExpr::Node {
    enum class Kind { number, var, neg, add, sub, mul, div, sin, cos, exp } kind = Kind::number;
    double number = 0.0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;

    Dual eval(double t) const {
        switch (kind) {
            case Kind::number: return {number, 0.0};
            case Kind::var: return {t, 1.0};
            case Kind::neg: {
                const Dual x = lhs->eval(t);
                return {-x.v, -x.d};
            }
            case Kind::add: return lhs->eval(t) + rhs->eval(t);
            case Kind::sub: return lhs->eval(t) - rhs->eval(t);
            case Kind::mul: return lhs->eval(t) * rhs->eval(t);
            case Kind::div: return lhs->eval(t) / rhs->eval(t);
            case Kind::sin: {
                const Dual x = lhs->eval(t);
                return {std::sin(x.v), std::cos(x.v) * x.d};
            }
            case Kind::cos: {
                const Dual x = lhs->eval(t);
                return {std::cos(x.v), -std::sin(x.v) * x.d};
            }
            case Kind::exp: {
                const Dual x = lhs->eval(t);
                const double e = std::exp(x.v);
                return {e, e * x.d};
            }
        }
        return {0.0, 0.0};
    }
};

namespace {

using Node = HistoryExpr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind k, NodePtr l = nullptr, NodePtr r = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse_all() {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw InvalidArgument("history expression: " + what + " at column " + std::to_string(pos_ + 1));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make(Node::Kind::add, lhs, term());
            } else if (accept('-')) {
                lhs = make(Node::Kind::sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make(Node::Kind::mul, lhs, unary());
            } else if (accept('/')) {
                lhs = make(Node::Kind::div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Node::Kind::neg, unary());
        if (accept('+')) return unary();
        return primary();
    }

    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "t") return make(Node::Kind::var);
            Node::Kind k;
            if (name == "sin") {
                k = Node::Kind::sin;
            } else if (name == "cos") {
                k = Node::Kind::cos;
            } else if (name == "exp") {
                k = Node::Kind::exp;
            } else {
                pos_ = start;
                fail("unknown identifier '" + name + "'");
            }
            expect('(');
            NodePtr arg = expr();
            expect(')');
            return make(k, arg);
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const char* first = s_.data() + pos_;
        const char* last = s_.data() + s_.size();
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || !std::isfinite(v)) fail("malformed number");
        pos_ += static_cast<std::size_t>(ptr - first);
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::number;
        n->number = v;
        return n;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

HistoryExpr HistoryExpr::parse(const std::string& text) {
    HistoryExpr h;
    h.root_ = Parser(text).parse_all();
    h.source_ = text;
    return h;
}

double HistoryExpr::value(double t) const { return root_->eval(t).v; }

double HistoryExpr::derivative(double t) const { return root_->eval(t).d; }

}  // namespace nplace
