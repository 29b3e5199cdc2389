#include "ybx/classify.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "ybx/error.hpp"
#include "ybx/verify.hpp"

namespace ybx {

namespace {

using Vec5 = std::array<Complex, 5>;

Vec5 as_vec(const NormalizedElements& e) { return {e.a1, e.a2, e.b1, e.b2, e.d}; }

Vec5 stencil(const std::function<Vec5(double)>& f, double h) {
    const Vec5 m2 = f(-2 * h), m1 = f(-h), p1 = f(h), p2 = f(2 * h);
    Vec5 out;
    for (int i = 0; i < 5; ++i) out[i] = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h);
    return out;
}

bool near(Complex x, Complex y, double tol) {
    return std::abs(x - y) <= tol * std::max(std::abs(x), std::abs(y));
}

// 0 on the boundary x = y, 1 when far from it
double margin(Complex x, Complex y) {
    const double s = std::max(std::abs(x), std::abs(y));
    return s == 0.0 ? 0.0 : std::abs(x - y) / (2.0 * s);
}

std::map<std::string, Complex> derivative_constants(Branch b, const DerivativeData& dd) {
    switch (b) {
        case Branch::A: return {{"d0", -2.0 * dd.a1p / dd.dp}};
        case Branch::B_xxz:
        case Branch::B_ff: {
            std::map<std::string, Complex> c{{"Delta", (dd.a1p + dd.a2p) / dd.b1p}};
            if (b == Branch::B_xxz) c["k"] = dd.b2p / dd.b1p;
            return c;
        }
        case Branch::C_xyz: return {{"k", dd.dp / dd.b1p}, {"Delta", dd.a1p / dd.b1p}};
        case Branch::C_ff2: return {};
        case Branch::D_sym: return {{"x0", dd.a1p / dd.b1p}, {"f0", dd.dp / dd.b1p}};
        case Branch::D_colored: return {{"x_f", (dd.a1p - dd.a2p) / (2.0 * dd.dp)}};
        case Branch::E_general:
            return {{"x_f", (dd.a1p - dd.a2p) / (2.0 * dd.dp)}, {"xbar0", (dd.b1p + dd.b2p) / (2.0 * dd.dp)}};
        default: throw ClassificationError("presets have no derivative classification");
    }
}

// Least-squares theta for y = theta * x over samples.
class Fit {
public:
    void add(Complex x, Complex y) { num_ += std::conj(x) * y, den_ += std::norm(x); }
    Complex value() const {
        return den_ > 0.0 ? num_ / den_ : Complex(std::numeric_limits<double>::quiet_NaN());
    }

private:
    Complex num_{};
    double den_ = 0.0;
};

}  // namespace

DerivativeData derivatives_at_zero(const RMatrixModel& model, std::vector<double> direction, double h) {
    if (!(h > 0.0)) throw DomainError("derivative step must be positive");
    const auto& coords = model.coordinates();
    const std::size_t dim = coords.names.size();
    if (direction.empty()) {
        direction.assign(dim, 0.0);
        direction[0] = 1.0;
    }
    if (direction.size() != dim) throw DimensionError("direction length does not match the coordinates");
    double norm = 0.0;
    for (double x : direction) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw DomainError("direction must be nonzero");
    for (double& x : direction) x /= norm;

    const SpectralPoint& zero = coords.zero;
    auto at = [&](double t) {
        SpectralPoint p = zero;
        for (std::size_t i = 0; i < dim; ++i) p.set(coords.names[i], zero.at(coords.names[i]) + t * direction[i]);
        return as_vec(normalize(EightVertexElements::from_matrix(model.evaluate(p, zero))));
    };

    const Vec5 d1 = stencil(at, h), d2 = stencil(at, h / 2);
    Vec5 best;
    double scale = 1.0, err = 0.0;
    for (int i = 0; i < 5; ++i) {
        best[i] = (16.0 * d2[i] - d1[i]) / 15.0;
        scale = std::max(scale, std::abs(best[i]));
    }
    for (int i = 0; i < 5; ++i) err = std::max(err, std::abs(d1[i] - d2[i]) / scale);
    if (!(err <= 1e-6)) throw ConvergenceError("derivative estimates at h and h/2 disagree");

    DerivativeData dd;
    dd.a1p = best[0], dd.a2p = best[1], dd.b1p = best[2], dd.b2p = best[3], dd.dp = best[4];
    dd.direction = direction;
    dd.error_estimate = err;

    // second derivatives without evaluating at t = 0, where closed forms may be 0/0
    const Vec5 p1 = at(h), m1 = at(-h), p2 = at(2 * h), m2 = at(-2 * h);
    ElementDerivatives sec;
    Complex* out[] = {&sec.a1, &sec.a2, &sec.b1, &sec.b2, &sec.d};
    for (int i = 0; i < 5; ++i) *out[i] = (p2[i] + m2[i] - p1[i] - m1[i]) / (3.0 * h * h);
    dd.higher = sec;

    // identically-zero flags from a few sampled points
    Sampler s(coords, 7);
    bool dz = true, bz = true;
    int seen = 0;
    for (int i = 0; i < 40 && seen < 8; ++i) {
        try {
            const auto e = EightVertexElements::from_matrix(model.evaluate(s.draw(), zero));
            dz = dz && std::abs(e.d1) < 1e-14 && std::abs(e.d2) < 1e-14;
            bz = bz && std::abs(e.b1) < 1e-14 && std::abs(e.b2) < 1e-14;
            ++seen;
        } catch (const SingularPoint&) {
        }
    }
    dd.d_identically_zero = seen > 0 && dz;
    dd.b_identically_zero = seen > 0 && bz;
    return dd;
}

ClassificationReport classify(const DerivativeData& dd, double tol) {
    for (Complex x : {dd.a1p, dd.a2p, dd.b1p, dd.b2p, dd.dp})
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) throw DomainError("derivative data not finite");
    if (std::max({std::abs(dd.a1p), std::abs(dd.a2p), std::abs(dd.b1p), std::abs(dd.b2p), std::abs(dd.dp)}) < tol)
        throw ClassificationError("all first derivatives vanish at the normalization point; "
                                  "reparameterize or inspect higher derivatives");

    ClassificationReport rep;
    auto finish = [&](Branch b) {
        rep.branch = b;
        rep.constants = derivative_constants(b, dd);
        if (b == Branch::D_colored || b == Branch::E_general) rep.x_f_definition = "(a1'-a2')/(2d')";
        return rep;
    };

    if (dd.d_identically_zero && std::abs(dd.dp) < tol) {
        const Complex delta = (dd.a1p + dd.a2p) / dd.b1p;
        rep.confidence["Delta"] = std::abs(delta);
        return finish(std::abs(delta) > tol ? Branch::B_xxz : Branch::B_ff);
    }
    if (dd.b_identically_zero) return finish(Branch::A);

    const double as = std::max(std::abs(dd.a1p), std::abs(dd.a2p));
    rep.degenerate = as < tol;
    rep.confidence["a1'=a2'"] = margin(dd.a1p, dd.a2p);
    rep.confidence["a1'=-a2'"] = margin(dd.a1p, -dd.a2p);
    rep.confidence["b1'=b2'"] = margin(dd.b1p, dd.b2p);
    rep.confidence["b1'=-b2'"] = margin(dd.b1p, -dd.b2p);

    if (rep.degenerate || near(dd.a1p, dd.a2p, tol)) {
        if (near(dd.b1p, dd.b2p, tol)) return finish(Branch::C_xyz);
        if (near(dd.b1p, -dd.b2p, tol)) return finish(Branch::C_ff2);
        throw ClassificationError("a1' = a2' but b1' is neither b2' nor -b2'");
    }
    if (near(dd.a1p, -dd.a2p, tol)) {
        if (near(dd.b1p, dd.b2p, tol)) return finish(Branch::D_sym);
        if (near(dd.b1p, -dd.b2p, tol)) return finish(Branch::D_colored);
        return finish(Branch::E_general);
    }
    throw ClassificationError("a1' is neither a2' nor -a2'; not an eight-vertex branch");
}

RecoveredConstants recover_constants(const RMatrixModel& model, Branch branch, int samples, std::uint64_t seed,
                                     double max_gap) {
    if (model.n() != 2) throw DimensionError("classification needs a 4x4 model");
    RecoveredConstants rc;
    rc.from_derivatives = derivative_constants(branch, derivatives_at_zero(model));
    // implied by the branch rather than free
    if (branch == Branch::D_colored) rc.from_derivatives["xbar0"] = 0.0;

    std::map<std::string, Fit> fits;
    Sampler s(model.coordinates(), seed);
    const auto& zero = model.coordinates().zero;
    for (int i = 0, tries = 0; i < samples; ++tries) {
        if (tries > 10 * samples) throw Error("resample cap exceeded");
        NormalizedElements e;
        try {
            e = normalize(EightVertexElements::from_matrix(model.evaluate(s.draw(), zero)));
        } catch (const SingularPoint&) {
            continue;
        }
        ++i;
        const Complex one = 1.0;
        switch (branch) {
            case Branch::A: fits["d0"].add(e.d, -(e.a1 * e.a1 - e.d * e.d - one)); break;
            case Branch::B_xxz:
                fits["Delta"].add(e.a1 * e.b1, e.a1 * e.a2 + e.b1 * e.b2 - one);
                fits["k"].add(e.a1 * e.b1, e.a2 * e.b2);
                break;
            case Branch::B_ff: fits["Delta"].add(e.a1 * e.b1, e.a1 * e.a2 + e.b1 * e.b2 - one); break;
            case Branch::C_xyz:
                fits["k"].add(e.a1 * e.b1, e.d);
                fits["Delta"].add(2.0 * e.a1 * e.b1, e.a1 * e.a1 + e.b1 * e.b1 - one - e.d * e.d);
                break;
            case Branch::C_ff2: break;
            case Branch::D_sym:
                fits["f0"].add(e.b1 * (e.a1 * e.a1 + e.a2 * e.a2), 2.0 * e.a2 * e.d);
                fits["x_f"].add(4.0 * e.d * e.a2 * e.a2, (e.a1 * e.a1 - e.a2 * e.a2) * (e.a2 * e.a2 + e.b1 * e.b1));
                break;
            case Branch::D_colored:
            case Branch::E_general:
                fits["x_f"].add(4.0 * e.d, e.a1 * e.a1 - e.a2 * e.a2 - e.b1 * e.b1 + e.b2 * e.b2);
                fits["xbar0"].add(2.0 * e.d, e.a2 * e.b1 + e.a1 * e.b2);
                break;
            default: throw ClassificationError("presets have no constant recovery");
        }
    }
    for (const auto& [name, f] : fits) rc.from_least_squares[name] = f.value();
    if (branch == Branch::D_sym) {
        const Complex f0 = rc.from_least_squares["f0"];
        rc.from_least_squares["x0"] = rc.from_least_squares["x_f"] * f0;
        rc.from_least_squares.erase("x_f");
    }

    for (const auto& [name, v] : rc.from_derivatives) {
        const auto it = rc.from_least_squares.find(name);
        if (it == rc.from_least_squares.end()) continue;
        const double g = std::abs(v - it->second) / std::max(1.0, std::abs(v));
        rc.gap = std::isnan(g) ? std::numeric_limits<double>::infinity() : std::max(rc.gap, g);
    }
    if (rc.gap > max_gap)
        throw ClassificationError("derivative and least-squares constants disagree (gap " + std::to_string(rc.gap) +
                                  "); the branch tag is likely wrong");
    return rc;
}

}  // namespace ybx
