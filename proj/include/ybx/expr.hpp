#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ybx/tensor.hpp"

namespace ybx {

// Real-valued variable bindings.
using Env = std::map<std::string, double, std::less<>>;

enum class Builtin { sin, cos, tan, sinh, cosh, tanh, exp, log, sqrt, sn, cn, dn };

std::string_view builtin_name(Builtin b);
int builtin_arity(Builtin b);

struct ExprNode;

class Expr {
public:
    Expr() = default;
    explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

    const ExprNode& node() const { return *node_; }
    bool empty() const noexcept { return node_ == nullptr; }

    friend bool operator==(const Expr& a, const Expr& b);

private:
    std::shared_ptr<const ExprNode> node_;
};

struct Literal {
    Complex value;
};
struct Variable {
    std::string name;
};
struct Unary {
    char op;  // '-' or '+'
    Expr operand;
};
struct Binary {
    char op;  // + - * / ^
    Expr lhs, rhs;
};
struct Call {
    Builtin fn;
    std::vector<Expr> args;
};

struct ExprNode {
    std::variant<Literal, Variable, Unary, Binary, Call> v;
};

Expr parse(std::string_view text);
Complex eval(const Expr& e, const Env& env);
std::set<std::string> free_vars(const Expr& e);

// Fully parenthesized form; parse(to_string(e)) == e.
std::string to_string(const Expr& e);

Expr make_literal(Complex value);

}  // namespace ybx
