#pragma once

#include <memory>
#include <string>

namespace tqs {

// Arithmetic expressions over the torus coordinates p and q: numeric
// literals, pi, sin, cos, + - * /, unary minus and parentheses.
class Expression {
public:
    static Expression parse(const std::string& text);

    double eval(double p, double q) const;

    const std::string& text() const { return text_; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

} // namespace tqs
