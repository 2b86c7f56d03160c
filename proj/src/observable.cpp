#include "ergodic/observable.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "ergodic/errors.hpp"

namespace ergodic {

struct Observable::Node {
    enum class Op { Const, CoordX, CoordY, LogDeriv, Indicator, Add, Sub, Mul };
    Op op = Op::Const;
    double value = 0.0;
    double a = 0.0, b = 0.0; // indicator bounds
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Observable::Node;
using NodePtr = std::shared_ptr<const Node>;

struct Parser {
    const std::string& s;
    std::size_t pos = 0;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool consume(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    bool consume_word(const std::string& w) {
        skip();
        if (s.compare(pos, w.size(), w) == 0) {
            pos += w.size();
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw OutOfRange("observable parse error at position " + std::to_string(pos) + ": " + what);
    }

    NodePtr expr() {
        NodePtr n = term();
        for (;;) {
            if (consume('+')) {
                auto out = std::make_shared<Node>();
                out->op = Node::Op::Add;
                out->lhs = n;
                out->rhs = term();
                n = out;
            } else if (consume('-')) {
                auto out = std::make_shared<Node>();
                out->op = Node::Op::Sub;
                out->lhs = n;
                out->rhs = term();
                n = out;
            } else {
                return n;
            }
        }
    }

    NodePtr term() {
        NodePtr n = factor();
        while (consume('*')) {
            auto out = std::make_shared<Node>();
            out->op = Node::Op::Mul;
            out->lhs = n;
            out->rhs = factor();
            n = out;
        }
        return n;
    }

    double number() {
        skip();
        char* end = nullptr;
        const double v = std::strtod(s.c_str() + pos, &end);
        if (end == s.c_str() + pos) fail("expected a number");
        pos = static_cast<std::size_t>(end - s.c_str());
        return v;
    }

    NodePtr factor() {
        skip();
        if (consume('(')) {
            NodePtr n = expr();
            if (!consume(')')) fail("expected ')'");
            return n;
        }
        if (consume_word("logderiv")) {
            auto n = std::make_shared<Node>();
            n->op = Node::Op::LogDeriv;
            return n;
        }
        if (consume_word("ind")) {
            if (!consume('(')) fail("expected '(' after ind");
            auto n = std::make_shared<Node>();
            n->op = Node::Op::Indicator;
            n->a = number();
            if (!consume(',')) fail("expected ',' in ind(a,b)");
            n->b = number();
            if (!consume(')')) fail("expected ')' in ind(a,b)");
            return n;
        }
        if (pos < s.size() && s[pos] == 'x' &&
            (pos + 1 == s.size() || !std::isalnum(static_cast<unsigned char>(s[pos + 1])))) {
            ++pos;
            auto n = std::make_shared<Node>();
            n->op = Node::Op::CoordX;
            return n;
        }
        if (pos < s.size() && s[pos] == 'y' &&
            (pos + 1 == s.size() || !std::isalnum(static_cast<unsigned char>(s[pos + 1])))) {
            ++pos;
            auto n = std::make_shared<Node>();
            n->op = Node::Op::CoordY;
            return n;
        }
        auto n = std::make_shared<Node>();
        n->op = Node::Op::Const;
        n->value = number();
        return n;
    }
};

double eval_node(const Node& n, double x, double y, const Map1D* map) {
    switch (n.op) {
        case Node::Op::Const: return n.value;
        case Node::Op::CoordX: return x;
        case Node::Op::CoordY: return y;
        case Node::Op::LogDeriv:
            if (!map) throw OutOfRange("logderiv observable needs a 1D map");
            return std::log(std::fabs(map->deriv(x)));
        case Node::Op::Indicator: return (x >= n.a && x < n.b) ? 1.0 : 0.0;
        case Node::Op::Add: return eval_node(*n.lhs, x, y, map) + eval_node(*n.rhs, x, y, map);
        case Node::Op::Sub: return eval_node(*n.lhs, x, y, map) - eval_node(*n.rhs, x, y, map);
        case Node::Op::Mul: return eval_node(*n.lhs, x, y, map) * eval_node(*n.rhs, x, y, map);
    }
    return 0.0;
}

} // namespace

Observable Observable::parse(const std::string& text) {
    Parser p{text};
    Observable obs;
    obs.text_ = text;
    obs.root_ = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
    return obs;
}

double Observable::eval(double x, double y, const Map1D* map) const {
    return eval_node(*root_, x, y, map);
}

} // namespace ergodic
