#include "tracegrowth/expr.hpp"

#include "tracegrowth/error.hpp"

#include <boost/fusion/include/adapt_struct.hpp>
#include <boost/spirit/home/x3.hpp>
#include <boost/spirit/home/x3/support/ast/variant.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace tracegrowth::expr {

namespace ast {

namespace x3 = boost::spirit::x3;

struct signed_;
struct call;
struct expression;

struct operand : x3::variant<double, std::string, x3::forward_ast<signed_>, x3::forward_ast<call>,
                             x3::forward_ast<expression>> {
    using base_type::base_type;
    using base_type::operator=;
};

struct signed_ {
    char sign;
    operand rhs;
};

struct operation {
    char op;
    operand rhs;
};

struct expression {
    operand first;
    std::vector<operation> rest;
};

struct call {
    std::string name;
    expression arg;
};

} // namespace ast
} // namespace tracegrowth::expr

BOOST_FUSION_ADAPT_STRUCT(tracegrowth::expr::ast::signed_, sign, rhs)
BOOST_FUSION_ADAPT_STRUCT(tracegrowth::expr::ast::operation, op, rhs)
BOOST_FUSION_ADAPT_STRUCT(tracegrowth::expr::ast::expression, first, rest)
BOOST_FUSION_ADAPT_STRUCT(tracegrowth::expr::ast::call, name, arg)

namespace tracegrowth::expr {

namespace grammar {

namespace x3 = boost::spirit::x3;

x3::rule<class additive, ast::expression> const additive = "additive";
x3::rule<class multiplicative, ast::expression> const multiplicative = "multiplicative";
x3::rule<class power, ast::expression> const power = "power";
x3::rule<class unary, ast::operand> const unary = "unary";
x3::rule<class primary, ast::operand> const primary = "primary";
x3::rule<class identifier, std::string> const identifier = "identifier";
x3::rule<class call, ast::call> const call = "call";
x3::rule<class negated, ast::signed_> const negated = "negated";

auto const identifier_def = x3::lexeme[x3::alpha >> *(x3::alnum | x3::char_('_'))];
auto const additive_def = multiplicative >> *(x3::char_("+-") >> multiplicative);
auto const multiplicative_def = unary >> *(x3::char_("*/") >> unary);
auto const unary_def = negated | power;
auto const negated_def = x3::char_("+-") >> unary;
auto const power_def = primary >> *(x3::char_('^') >> unary);
auto const call_def = identifier >> '(' >> additive >> ')';
auto const primary_def = x3::double_ | call | identifier | ('(' >> additive >> ')');

BOOST_SPIRIT_DEFINE(additive, multiplicative, power, unary, primary, identifier, call, negated)

} // namespace grammar

namespace {

using Fn = std::function<double(const double*)>;

struct Compiler {
    const std::vector<std::string>& variables;
    std::vector<bool>& used;

    Fn operator()(double v) const {
        return [v](const double*) { return v; };
    }

    Fn operator()(const std::string& name) const {
        if (name == "pi") return [](const double*) { return M_PI; };
        const auto it = std::find(variables.begin(), variables.end(), name);
        if (it == variables.end()) throw Error(ErrorCode::InvalidConfig, "unknown name '" + name + "' in expression");
        const auto i = static_cast<std::size_t>(it - variables.begin());
        used[i] = true;
        return [i](const double* x) { return x[i]; };
    }

    Fn operator()(const ast::signed_& s) const {
        Fn rhs = boost::apply_visitor(*this, s.rhs);
        if (s.sign == '+') return rhs;
        return [rhs](const double* x) { return -rhs(x); };
    }

    Fn operator()(const ast::call& c) const {
        static const std::map<std::string, double (*)(double)> table{
            {"sin", [](double v) { return std::sin(v); }},   {"cos", [](double v) { return std::cos(v); }},
            {"tan", [](double v) { return std::tan(v); }},   {"exp", [](double v) { return std::exp(v); }},
            {"log", [](double v) { return std::log(v); }},   {"sqrt", [](double v) { return std::sqrt(v); }},
            {"sinh", [](double v) { return std::sinh(v); }}, {"cosh", [](double v) { return std::cosh(v); }},
            {"tanh", [](double v) { return std::tanh(v); }}, {"abs", [](double v) { return std::abs(v); }},
        };
        const auto it = table.find(c.name);
        if (it == table.end()) throw Error(ErrorCode::InvalidConfig, "unknown function '" + c.name + "'");
        Fn arg = (*this)(c.arg);
        auto f = it->second;
        return [f, arg](const double* x) { return f(arg(x)); };
    }

    Fn operator()(const ast::expression& e) const {
        std::vector<Fn> terms{boost::apply_visitor(*this, e.first)};
        std::vector<char> ops;
        for (const auto& op : e.rest) {
            terms.push_back(boost::apply_visitor(*this, op.rhs));
            ops.push_back(op.op);
        }
        if (!ops.empty() && ops.front() == '^') {
            // right associative
            Fn acc = terms.back();
            for (std::size_t i = terms.size() - 1; i-- > 0;) {
                Fn base = terms[i];
                acc = [base, acc](const double* x) { return std::pow(base(x), acc(x)); };
            }
            return acc;
        }
        Fn acc = terms.front();
        for (std::size_t i = 0; i < ops.size(); ++i) {
            Fn rhs = terms[i + 1];
            switch (ops[i]) {
                case '+': acc = [acc, rhs](const double* x) { return acc(x) + rhs(x); }; break;
                case '-': acc = [acc, rhs](const double* x) { return acc(x) - rhs(x); }; break;
                case '*': acc = [acc, rhs](const double* x) { return acc(x) * rhs(x); }; break;
                default: acc = [acc, rhs](const double* x) { return acc(x) / rhs(x); }; break;
            }
        }
        return acc;
    }
};

} // namespace

Expression Expression::parse(const std::string& text, std::vector<std::string> variables) {
    namespace x3 = boost::spirit::x3;
    ast::expression tree;
    auto first = text.begin();
    const bool ok = x3::phrase_parse(first, text.end(), grammar::additive, x3::space, tree);
    if (!ok || first != text.end()) {
        throw Error(ErrorCode::InvalidConfig, "cannot parse expression '" + text + "' near position " +
                                                  std::to_string(first - text.begin()));
    }
    Expression e;
    e.text_ = text;
    e.variables_ = std::move(variables);
    e.used_.assign(e.variables_.size(), false);
    e.eval_ = Compiler{e.variables_, e.used_}(tree);
    return e;
}

bool Expression::uses(const std::string& name) const {
    const auto it = std::find(variables_.begin(), variables_.end(), name);
    return it != variables_.end() && used_[static_cast<std::size_t>(it - variables_.begin())];
}

} // namespace tracegrowth::expr
