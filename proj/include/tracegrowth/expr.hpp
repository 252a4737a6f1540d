#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace tracegrowth::expr {

/// Compiled arithmetic expression over a fixed list of variable names.
/// Grammar: + - * / ^ (right associative), unary minus, parentheses,
/// numbers, the constant pi and sin cos tan exp log sqrt sinh cosh tanh abs.
class Expression {
public:
    /// Throws InvalidConfig on syntax errors and unknown names.
    static Expression parse(const std::string& text, std::vector<std::string> variables);

    double operator()(std::span<const double> values) const { return eval_(values.data()); }
    const std::string& text() const { return text_; }
    /// True when the variable occurs in the expression.
    bool uses(const std::string& name) const;

private:
    std::string text_;
    std::vector<std::string> variables_;
    std::vector<bool> used_;
    std::function<double(const double*)> eval_;
};

} // namespace tracegrowth::expr
