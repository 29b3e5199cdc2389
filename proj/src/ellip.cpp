#include "ybx/ellip.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "ybx/error.hpp"

namespace ybx {

namespace {

constexpr int kMaxLanden = 32;
constexpr double kLandenStop = 1e-15;

void check_modulus(double k) {
    if (!(k >= 0.0 && k < 1.0))
        throw DomainError("elliptic modulus must satisfy 0 <= k < 1, got " + std::to_string(k));
}

}  // namespace

EllipticTriple jacobi(double u, double k) {
    check_modulus(k);
    if (!std::isfinite(u)) throw DomainError("jacobi: non-finite argument");
    if (k == 0.0) return {std::sin(u), std::cos(u), 1.0};

    // descending Landen / AGM sequence
    std::array<double, kMaxLanden + 1> a{}, c{};
    a[0] = 1.0;
    double b = std::sqrt(1.0 - k * k);
    c[0] = k;
    int n = 0;
    while (std::abs(c[n]) >= kLandenStop) {
        if (n == kMaxLanden) throw ConvergenceError("jacobi: Landen recursion did not converge");
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = std::sqrt(a[n] * b);
        ++n;
    }
    double phi = std::ldexp(a[n] * u, n);
    for (int j = n; j > 0; --j) phi = 0.5 * (phi + std::asin(c[j] / a[j] * std::sin(phi)));

    const double s = std::sin(phi);
    return {s, std::cos(phi), std::sqrt(1.0 - k * k * s * s)};
}

double complete_K(double k) {
    check_modulus(k);
    double a = 1.0, b = std::sqrt(1.0 - k * k);
    for (int i = 0; i < kMaxLanden; ++i) {
        if (std::abs(a - b) < kLandenStop * a) return std::numbers::pi / (a + b);
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    throw ConvergenceError("complete_K: AGM did not converge");
}

Complex e_fn(double u, double k) {
    const auto t = jacobi(u, k);
    return {t.cn, t.sn};
}

}  // namespace ybx
