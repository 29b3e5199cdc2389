#include "ybx/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "ybx/ellip.hpp"
#include "ybx/error.hpp"

namespace ybx {

namespace {

struct BuiltinInfo {
    Builtin fn;
    std::string_view name;
    int arity;
};

constexpr std::array<BuiltinInfo, 12> kBuiltins{{
    {Builtin::sin, "sin", 1},   {Builtin::cos, "cos", 1},   {Builtin::tan, "tan", 1},
    {Builtin::sinh, "sinh", 1}, {Builtin::cosh, "cosh", 1}, {Builtin::tanh, "tanh", 1},
    {Builtin::exp, "exp", 1},   {Builtin::log, "log", 1},   {Builtin::sqrt, "sqrt", 1},
    {Builtin::sn, "sn", 2},     {Builtin::cn, "cn", 2},     {Builtin::dn, "dn", 2},
}};

const BuiltinInfo* find_builtin(std::string_view name) {
    for (const auto& b : kBuiltins)
        if (b.name == name) return &b;
    return nullptr;
}

Expr make(ExprNode n) { return Expr(std::make_shared<const ExprNode>(std::move(n))); }

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    Expr run() {
        if (s_.find_first_not_of(" \t\r\n") == std::string_view::npos)
            throw ParseError("empty expression", 0);
        Expr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
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
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    Expr expr() {
        Expr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = make({Binary{'+', lhs, term()}});
            else if (accept('-'))
                lhs = make({Binary{'-', lhs, term()}});
            else
                return lhs;
        }
    }

    Expr term() {
        Expr lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = make({Binary{'*', lhs, unary()}});
            else if (accept('/'))
                lhs = make({Binary{'/', lhs, unary()}});
            else
                return lhs;
        }
    }

    Expr unary() {
        if (accept('-')) return make({Unary{'-', unary()}});
        if (accept('+')) return make({Unary{'+', unary()}});
        return power();
    }

    Expr power() {
        Expr base = primary();
        // right-associative; the exponent may carry its own sign
        if (accept('^')) return make({Binary{'^', base, unary()}});
        return base;
    }

    Expr primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail(std::string("unexpected '") + c + "'");
    }

    Expr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t nd = digits();
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            nd += digits();
        }
        if (nd == 0) {
            pos_ = start;
            fail("malformed number");
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (digits() == 0) fail("malformed exponent");
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (ec != std::errc{} || ptr != s_.data() + pos_ || !std::isfinite(v)) {
            pos_ = start;
            fail("numeric literal out of range");
        }
        return make({Literal{v}});
    }

    Expr identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        const std::string_view name = s_.substr(start, pos_ - start);

        skip_ws();
        const bool call = pos_ < s_.size() && s_[pos_] == '(';
        if (!call) {
            if (name == "pi") return make({Literal{std::numbers::pi}});
            if (name == "i") return make({Literal{Complex{0.0, 1.0}}});
            if (find_builtin(name)) {
                pos_ = start;
                fail("function '" + std::string(name) + "' used without arguments");
            }
            return make({Variable{std::string(name)}});
        }

        const BuiltinInfo* info = find_builtin(name);
        if (!info) {
            pos_ = start;
            fail("unknown function '" + std::string(name) + "'");
        }
        ++pos_;  // '('
        std::vector<Expr> args;
        if (!accept(')')) {
            do {
                args.push_back(expr());
            } while (accept(','));
            expect(')');
        }
        if (static_cast<int>(args.size()) != info->arity) {
            pos_ = start;
            fail(std::string(info->name) + " expects " + std::to_string(info->arity) +
                 " argument(s), got " + std::to_string(args.size()));
        }
        return make({Call{info->fn, std::move(args)}});
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

// Replace -0.0 imaginary parts so branch cuts follow the principal convention.
Complex tidy(Complex z) { return z.imag() == 0.0 ? Complex{z.real(), 0.0} : z; }

double real_arg(Complex z, std::string_view fn) {
    if (std::abs(z.imag()) > 1e-14 * std::max(1.0, std::abs(z.real())))
        throw DomainError(std::string(fn) + ": argument must be real");
    return z.real();
}

Complex power(Complex b, Complex e) {
    if (b.imag() == 0.0 && e.imag() == 0.0) {
        const double x = b.real(), y = e.real();
        if (x >= 0.0 || std::trunc(y) == y) return std::pow(x, y);
    }
    return std::pow(tidy(b), e);
}

Complex apply_builtin(Builtin fn, const std::vector<Complex>& a) {
    switch (fn) {
        case Builtin::sin: return std::sin(a[0]);
        case Builtin::cos: return std::cos(a[0]);
        case Builtin::tan: return std::tan(a[0]);
        case Builtin::sinh: return std::sinh(a[0]);
        case Builtin::cosh: return std::cosh(a[0]);
        case Builtin::tanh: return std::tanh(a[0]);
        case Builtin::exp: return std::exp(a[0]);
        case Builtin::log:
            if (a[0] == Complex{}) throw DomainError("log of zero");
            return std::log(tidy(a[0]));
        case Builtin::sqrt: return std::sqrt(tidy(a[0]));
        case Builtin::sn: return jacobi(real_arg(a[0], "sn"), real_arg(a[1], "sn")).sn;
        case Builtin::cn: return jacobi(real_arg(a[0], "cn"), real_arg(a[1], "cn")).cn;
        case Builtin::dn: return jacobi(real_arg(a[0], "dn"), real_arg(a[1], "dn")).dn;
    }
    throw DomainError("unknown builtin");
}

void format_real(std::string& out, double x) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    out.append(buf.data(), ptr);
}

void print(std::string& out, const Expr& e) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Literal>) {
                const Complex z = n.value;
                if (z.imag() == 0.0) {
                    format_real(out, z.real());
                } else if (z.real() == 0.0 && z.imag() == 1.0) {
                    out += 'i';
                } else {
                    out += '(';
                    format_real(out, z.real());
                    out += '+';
                    format_real(out, z.imag());
                    out += "*i)";
                }
            } else if constexpr (std::is_same_v<T, Variable>) {
                out += n.name;
            } else if constexpr (std::is_same_v<T, Unary>) {
                out += '(';
                out += n.op;
                print(out, n.operand);
                out += ')';
            } else if constexpr (std::is_same_v<T, Binary>) {
                out += '(';
                print(out, n.lhs);
                out += ' ';
                out += n.op;
                out += ' ';
                print(out, n.rhs);
                out += ')';
            } else {
                out += builtin_name(n.fn);
                out += '(';
                for (std::size_t i = 0; i < n.args.size(); ++i) {
                    if (i) out += ", ";
                    print(out, n.args[i]);
                }
                out += ')';
            }
        },
        e.node().v);
}

void collect(const Expr& e, std::set<std::string>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Variable>) {
                out.insert(n.name);
            } else if constexpr (std::is_same_v<T, Unary>) {
                collect(n.operand, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                collect(n.lhs, out);
                collect(n.rhs, out);
            } else if constexpr (std::is_same_v<T, Call>) {
                for (const auto& a : n.args) collect(a, out);
            }
        },
        e.node().v);
}

}  // namespace

std::string_view builtin_name(Builtin b) {
    for (const auto& info : kBuiltins)
        if (info.fn == b) return info.name;
    return "?";
}

int builtin_arity(Builtin b) {
    for (const auto& info : kBuiltins)
        if (info.fn == b) return info.arity;
    return 0;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    const auto& va = a.node_->v;
    const auto& vb = b.node_->v;
    if (va.index() != vb.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(vb);
            if constexpr (std::is_same_v<T, Literal>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, Variable>) {
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, Unary>) {
                return x.op == y.op && x.operand == y.operand;
            } else if constexpr (std::is_same_v<T, Binary>) {
                return x.op == y.op && x.lhs == y.lhs && x.rhs == y.rhs;
            } else {
                return x.fn == y.fn && x.args == y.args;
            }
        },
        va);
}

Expr parse(std::string_view text) { return Parser(text).run(); }

Expr make_literal(Complex value) { return make({Literal{value}}); }

Complex eval(const Expr& e, const Env& env) {
    return std::visit(
        [&](const auto& n) -> Complex {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Literal>) {
                return n.value;
            } else if constexpr (std::is_same_v<T, Variable>) {
                auto it = env.find(n.name);
                if (it == env.end()) throw DomainError("unbound variable '" + n.name + "'");
                return it->second;
            } else if constexpr (std::is_same_v<T, Unary>) {
                const Complex x = eval(n.operand, env);
                return n.op == '-' ? -x : x;
            } else if constexpr (std::is_same_v<T, Binary>) {
                const Complex x = eval(n.lhs, env);
                const Complex y = eval(n.rhs, env);
                switch (n.op) {
                    case '+': return x + y;
                    case '-': return x - y;
                    case '*': return x * y;
                    case '/':
                        if (y == Complex{}) throw DomainError("division by zero");
                        if (y.imag() == 0.0) return x / y.real();
                        return x / y;
                    default: return power(x, y);
                }
            } else {
                std::vector<Complex> args;
                args.reserve(n.args.size());
                for (const auto& a : n.args) args.push_back(eval(a, env));
                return apply_builtin(n.fn, args);
            }
        },
        e.node().v);
}

std::set<std::string> free_vars(const Expr& e) {
    std::set<std::string> out;
    collect(e, out);
    return out;
}

std::string to_string(const Expr& e) {
    std::string out;
    print(out, e);
    return out;
}

}  // namespace ybx
