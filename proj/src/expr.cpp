#include "tqs/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace tqs {

struct Expression::Node {
    enum class Op { kConst, kP, kQ, kAdd, kSub, kMul, kDiv, kNeg, kSin, kCos };
    Op op;
    double value = 0.0;
    std::shared_ptr<const Node> a, b;

    double eval(double p, double q) const {
        switch (op) {
        case Op::kConst: return value;
        case Op::kP: return p;
        case Op::kQ: return q;
        case Op::kAdd: return a->eval(p, q) + b->eval(p, q);
        case Op::kSub: return a->eval(p, q) - b->eval(p, q);
        case Op::kMul: return a->eval(p, q) * b->eval(p, q);
        case Op::kDiv: return a->eval(p, q) / b->eval(p, q);
        case Op::kNeg: return -a->eval(p, q);
        case Op::kSin: return std::sin(a->eval(p, q));
        case Op::kCos: return std::cos(a->eval(p, q));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->value = v;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != s_.size())
            fail("trailing characters");
        return e;
    }

private:
    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            skip_ws();
            if (accept('+'))
                lhs = make(Op::kAdd, lhs, term());
            else if (accept('-'))
                lhs = make(Op::kSub, lhs, term());
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            skip_ws();
            if (accept('*'))
                lhs = make(Op::kMul, lhs, factor());
            else if (accept('/'))
                lhs = make(Op::kDiv, lhs, factor());
            else
                return lhs;
        }
    }

    NodePtr factor() {
        skip_ws();
        if (accept('-'))
            return make(Op::kNeg, factor());
        if (accept('+'))
            return factor();
        return primary();
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= s_.size())
            fail("unexpected end of expression");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            const double v = std::strtod(s_.c_str() + pos_, &end);
            pos_ = size_t(end - s_.c_str());
            return make(Op::kConst, nullptr, nullptr, v);
        }
        if (accept('(')) {
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string name;
            while (pos_ < s_.size() &&
                   std::isalpha(static_cast<unsigned char>(s_[pos_])))
                name.push_back(s_[pos_++]);
            if (name == "p")
                return make(Op::kP);
            if (name == "q")
                return make(Op::kQ);
            if (name == "pi")
                return make(Op::kConst, nullptr, nullptr, M_PI);
            if (name == "sin" || name == "cos") {
                expect('(');
                NodePtr arg = expr();
                expect(')');
                return make(name == "sin" ? Op::kSin : Op::kCos, arg);
            }
            fail("unknown identifier '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
        return nullptr;
    }

    void skip_ws() {
        while (pos_ < s_.size() &&
               std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c))
            fail(std::string("expected '") + c + "'");
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw std::invalid_argument("expression error at position " +
                                    std::to_string(pos_) + ": " + msg);
    }

    const std::string& s_;
    size_t pos_ = 0;
};

} // namespace

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.root_ = Parser(text).parse();
    e.text_ = text;
    return e;
}

double Expression::eval(double p, double q) const {
    if (!root_)
        throw std::logic_error("empty expression");
    return root_->eval(p, q);
}

} // namespace tqs
