#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ybx/ellip.hpp"
#include "ybx/error.hpp"
#include "ybx/expr.hpp"

using namespace ybx;

namespace {
Complex ev(std::string_view s, const Env& env = {}) { return eval(parse(s), env); }
}

TEST_CASE("precedence and associativity") {
    CHECK(ev("1+2*3") == 7.0);
    CHECK(ev("(1+2)*3") == 9.0);
    CHECK(ev("2^3^2") == 512.0);
    CHECK(ev("-2^2") == -4.0);
    CHECK(ev("2^-1") == 0.5);
    CHECK(ev("8/4/2") == 1.0);
    CHECK(ev("1-2-3") == -4.0);
    CHECK(ev("--3") == 3.0);
}

TEST_CASE("variables, constants and builtins") {
    const Env env{{"u", 0.3}, {"p", 1.5}};
    CHECK(ev("sinh(u)/sinh(u+0.7)", env).real() == doctest::Approx(std::sinh(0.3) / std::sinh(1.0)));
    CHECK(ev("sn(u, 0.6)", env).real() == jacobi(0.3, 0.6).sn);
    CHECK(ev("cn(u, 0.6)*dn(u, 0.6)", env).real() == doctest::Approx(jacobi(0.3, 0.6).cn * jacobi(0.3, 0.6).dn));
    CHECK(ev("pi").real() == std::numbers::pi);
    CHECK(ev("i*i") == Complex(-1.0, 0.0));
    CHECK(ev("exp(i*pi)").real() == doctest::Approx(-1.0));
    CHECK(ev("sqrt(-4)") == Complex(0.0, 2.0));
    CHECK(ev("1.5e-3") == 0.0015);
    CHECK(ev("p^2", env).real() == doctest::Approx(2.25));
}

TEST_CASE("free variables and printing") {
    const auto e = parse("a*sin(u) + b^2 - pi");
    CHECK(free_vars(e) == std::set<std::string>{"a", "b", "u"});
    for (const char* s : {"a*sin(u)+b^2-pi", "-x^2", "2^3^2", "1/(1+exp(-u))", "sn(u,0.3)*i", "0.1+1e-20"}) {
        const auto x = parse(s);
        CHECK(parse(to_string(x)) == x);
    }
    CHECK_FALSE(parse("1+2") == parse("2+1"));
}

TEST_CASE("parse errors carry offsets") {
    auto offset_of = [](std::string_view s) -> std::size_t {
        try {
            parse(s);
        } catch (const ParseError& e) {
            return e.offset();
        }
        return std::string::npos;
    };
    CHECK(offset_of("1+") == 2);
    CHECK(offset_of("foo(1)") == 0);
    CHECK(offset_of("u + sin") == 4);
    CHECK(offset_of("sin(1,2)") != std::string::npos);
    CHECK(offset_of("(1+2") == 4);
    CHECK(offset_of("1 2") == 2);
    CHECK(offset_of("2 $ 3") == 2);
    CHECK(offset_of("") == 0);
}

TEST_CASE("evaluation errors") {
    CHECK_THROWS_AS(ev("u+1"), DomainError);
    CHECK_THROWS_AS(ev("1/0"), DomainError);
    CHECK_THROWS_AS(ev("log(0)"), DomainError);
    CHECK_THROWS_AS(ev("sn(i, 0.5)"), DomainError);
    CHECK_THROWS_AS(ev("sn(1, 1.2)"), DomainError);
}
