#include "ybx/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>

#include "ybx/error.hpp"
#include "ybx/r22.hpp"
#include "ybx/r33.hpp"

namespace ybx {

namespace {

constexpr double kFloor = 1e-300;

// Running maximum for one named check.
class Tracker {
public:
    Tracker(std::string name, double tol) { r_.name = std::move(name), r_.tolerance = tol; }

    // residual measured against a term magnitude `scale`
    void record(double abs, double scale, const std::string& where) {
        const double rel = abs / std::max(scale, kFloor);
        if (std::isnan(abs) || rel > r_.max_rel || first_) {
            if (std::isnan(abs) || rel >= r_.max_rel || first_) r_.argmax = where;
            r_.max_rel = std::isnan(rel) ? std::numeric_limits<double>::infinity() : std::max(r_.max_rel, rel);
        }
        r_.max_abs = std::isnan(abs) ? std::numeric_limits<double>::infinity() : std::max(r_.max_abs, abs);
        first_ = false;
    }
    // absolute-style residual: relative to max(1, scale)
    void record_abs(Complex residual, double scale, const std::string& where) {
        record(std::abs(residual), std::max(1.0, scale), where);
    }

    CheckResult& result() { return r_; }

private:
    CheckResult r_;
    bool first_ = true;
};

// Mean and spread of a quantity that should be constant.
class Constancy {
public:
    void add(Complex x, const std::string& where) {
        values_.push_back(x);
        where_.push_back(where);
    }

    void emit(ResidualReport& rep, const std::string& name, std::optional<Complex> expected,
              const ToleranceConfig& tol) const {
        if (values_.empty()) return;
        Complex mean{};
        for (auto x : values_) mean += x;
        mean /= double(values_.size());
        double var = 0.0, worst = -1.0;
        std::size_t iw = 0;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            const double d = std::abs(values_[i] - mean);
            var += d * d;
            if (d > worst) worst = d, iw = i;
        }
        const double sd = std::sqrt(var / double(values_.size()));
        CheckResult c;
        c.name = name + ".constancy";
        c.max_abs = sd;
        c.max_rel = sd / std::max(1.0, std::abs(mean));
        c.tolerance = tol.constancy_std;
        c.argmax = where_[iw];
        c.extra["mean_re"] = mean.real();
        c.extra["mean_im"] = mean.imag();
        rep.add(c);
        if (expected) {
            CheckResult v;
            v.name = name + ".value";
            v.max_abs = std::abs(mean - *expected);
            v.max_rel = v.max_abs / std::max(1.0, std::abs(*expected));
            v.tolerance = tol.constancy_std;
            v.extra["expected_re"] = expected->real();
            v.extra["expected_im"] = expected->imag();
            rep.add(v);
        }
    }

private:
    std::vector<Complex> values_;
    std::vector<std::string> where_;
};

std::string describe(const std::vector<SpectralPoint>& pts) {
    static const char* names[] = {"u", "v", "w"};
    std::string out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) out += "; ";
        out += (pts.size() == 2 && i == 1 ? "w" : names[std::min<std::size_t>(i, 2)]);
        out += "=" + pts[i].describe();
    }
    return out;
}

// Draws `arity` points per sample and runs `body`, redrawing on singular points.
void sweep(const RMatrixModel& model, int samples, std::uint64_t seed, int arity,
           const std::function<void(const std::vector<SpectralPoint>&)>& body, int& resamples) {
    if (samples < 1) throw ConfigError("samples must be at least 1");
    Sampler sampler(model.coordinates(), seed);
    const int cap = 10 * samples;
    for (int i = 0; i < samples;) {
        std::vector<SpectralPoint> pts;
        for (int k = 0; k < arity; ++k) pts.push_back(sampler.draw());
        try {
            body(pts);
            ++i;
        } catch (const SingularPoint&) {
            if (++resamples > cap)
                throw Error("resample cap exceeded: the singular locus dominates the sampling box");
        }
    }
}

double mag(std::initializer_list<Complex> terms) {
    double m = 0.0;
    for (auto t : terms) m = std::max(m, std::abs(t));
    return m;
}

}  // namespace

void ToleranceConfig::validate() const {
    for (double t : {ybe_rel, identity_abs, constraint_abs, constancy_std})
        if (!(t > 0.0)) throw ConfigError("tolerances must be positive");
}

void ResidualReport::add(CheckResult r) {
    r.pass = !r.asserted || (!std::isnan(r.max_rel) && r.max_rel <= r.tolerance);
    pass = pass && r.pass;
    checks.push_back(std::move(r));
}

void ResidualReport::merge(const ResidualReport& other) {
    for (const auto& c : other.checks) {
        checks.push_back(c);
        pass = pass && c.pass;
    }
    resample_count += other.resample_count;
    samples = std::max(samples, other.samples);
}

const CheckResult* ResidualReport::find(std::string_view name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

Sampler::Sampler(const Coordinates& coords, std::uint64_t seed) : coords_(coords), rng_(seed) {}

double Sampler::uniform() { return double(rng_() >> 11) * 0x1.0p-53; }

SpectralPoint Sampler::draw() {
    Env env;
    for (const auto& name : coords_.names) {
        const auto& iv = coords_.box.at(name);
        const double z = coords_.zero.at(name);
        double x;
        do {
            x = iv.lo + (iv.hi - iv.lo) * uniform();
        } while (std::abs(x - z) < kAvoid);
        env[name] = x;
    }
    return SpectralPoint(std::move(env));
}

std::uint64_t default_seed(std::optional<std::uint64_t> explicit_seed) {
    if (explicit_seed) return *explicit_seed;
    if (const char* env = std::getenv("YBX_SEED")) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && end != env) return v;
        throw ConfigError("YBX_SEED must be a non-negative integer");
    }
    return 42;
}

ResidualReport check_ybe(const RMatrixModel& model, int samples, std::uint64_t seed, const ToleranceConfig& tol) {
    ResidualReport rep;
    rep.family = model.family();
    rep.samples = samples;
    Tracker t("ybe", tol.ybe_rel);
    sweep(model, samples, seed, 3, [&](const auto& p) {
        const auto r = ybe_residual(model, p[0], p[1], p[2]);
        t.record(r.abs, r.abs / std::max(r.rel, kFloor), describe(p));
    }, rep.resample_count);
    rep.add(t.result());
    return rep;
}

std::vector<SpectralPoint> sample_grid(const RMatrixModel& model, int count, std::uint64_t seed) {
    Sampler s(model.coordinates(), seed);
    std::vector<SpectralPoint> out;
    for (int i = 0; i < count; ++i) out.push_back(s.draw());
    return out;
}

ResidualReport check_normalization(const RMatrixModel& model, const std::vector<SpectralPoint>& grid,
                                   const ToleranceConfig& tol) {
    ResidualReport rep;
    rep.family = model.family();
    rep.samples = static_cast<int>(grid.size());
    Tracker t("normalization", tol.identity_abs);
    const auto id = ComplexMatrix::identity(static_cast<std::size_t>(model.n() * model.n()));
    for (const auto& u : grid) {
        try {
            const Complex s = model.coincident_scalar(u);
            const auto m = model.check(u, u) * (1.0 / s);
            t.record(max_abs_diff(m, id), 1.0, describe({u}));
        } catch (const SingularPoint&) {
            ++rep.resample_count;
        }
    }
    rep.add(t.result());
    return rep;
}

ResidualReport check_unitarity(const RMatrixModel& model, int samples, std::uint64_t seed, const ToleranceConfig& tol) {
    ResidualReport rep;
    rep.family = model.family();
    rep.samples = samples;
    Tracker off("unitarity.offdiag", tol.constraint_abs);
    Tracker diag("unitarity.diag_spread", tol.constraint_abs);
    Complex scalar{};
    sweep(model, samples, seed, 2, [&](const auto& p) {
        const auto m = model.check(p[0], p[1]) * model.check(p[1], p[0]);
        double o = 0.0, spread = 0.0;
        for (std::size_t r = 0; r < m.dim(); ++r)
            for (std::size_t c = 0; c < m.dim(); ++c) {
                if (r != c) o = std::max(o, std::abs(m(r, c)));
                else spread = std::max(spread, std::abs(m(r, r) - m(0, 0)));
            }
        const double scale = std::max(1.0, std::abs(m(0, 0)));
        off.record(o, scale, describe(p));
        diag.record(spread, scale, describe(p));
        scalar = m(0, 0);
    }, rep.resample_count);
    off.result().extra["last_scalar_re"] = scalar.real();
    off.result().extra["last_scalar_im"] = scalar.imag();
    rep.add(off.result());
    rep.add(diag.result());
    return rep;
}

ResidualReport check_free_fermion(const RMatrixModel& model, int samples, std::uint64_t seed, const ToleranceConfig& tol) {
    if (model.n() != 2) throw DimensionError("free-fermion check needs a 4x4 model");
    ResidualReport rep;
    rep.family = model.family();
    rep.samples = samples;
    Tracker t("free_fermion", tol.constraint_abs);
    bool asserted = true;
    sweep(model, samples, seed, 2, [&](const auto& p) {
        const auto e = EightVertexElements::from_matrix(model.evaluate(p[0], p[1]));
        const Complex raw = e.a1 * e.a2 + e.b1 * e.b2 - e.c1 * e.c2 - e.d1 * e.d2;
        const auto expected = model.free_fermion_defect(e);
        if (!expected) asserted = false;
        const Complex res = raw - expected.value_or(Complex{});
        t.record_abs(res, mag({e.a1 * e.a2, e.b1 * e.b2, e.c1 * e.c2, e.d1 * e.d2}), describe(p));
    }, rep.resample_count);
    t.result().asserted = asserted;
    if (!asserted) t.result().note = "no closed form for this branch; residual reported only";
    rep.add(t.result());
    return rep;
}

namespace {

using Elem = NormalizedElements;

// Applies `f` to elementary (u, 0) and full (u, w) elements.
struct ConstraintRun {
    const RMatrixModel& model;
    int samples;
    std::uint64_t seed;
    const ToleranceConfig& tol;
    ResidualReport& rep;

    void elementary(const std::string& name, const std::function<std::pair<Complex, double>(const Elem&, const SpectralPoint&)>& f) {
        Tracker t(name + ".elementary", tol.constraint_abs);
        sweep(model, samples, seed, 1, [&](const auto& p) {
            const auto e = normalize(EightVertexElements::from_matrix(model.evaluate(p[0], model.coordinates().zero)));
            const auto [res, scale] = f(e, p[0]);
            t.record_abs(res, scale, describe(p));
        }, rep.resample_count);
        rep.add(t.result());
    }

    void full(const std::string& name,
              const std::function<std::pair<Complex, double>(const EightVertexElements&, const SpectralPoint&, const SpectralPoint&)>& f) {
        Tracker t(name + ".full", tol.constraint_abs);
        sweep(model, samples, seed + 1, 2, [&](const auto& p) {
            const auto e = EightVertexElements::from_matrix(model.evaluate(p[0], p[1]));
            const auto [res, scale] = f(e, p[0], p[1]);
            t.record_abs(res, scale, describe(p));
        }, rep.resample_count);
        rep.add(t.result());
    }

    void elementary_constant(const std::string& name, std::optional<Complex> expected,
                             const std::function<Complex(const Elem&)>& f) {
        Constancy c;
        sweep(model, samples, seed + 2, 1, [&](const auto& p) {
            const auto e = normalize(EightVertexElements::from_matrix(model.evaluate(p[0], model.coordinates().zero)));
            c.add(f(e), describe(p));
        }, rep.resample_count);
        c.emit(rep, name, expected, tol);
    }

    void free_fermion_full() {
        full("fre", [](const EightVertexElements& e, const auto&, const auto&) {
            return std::pair{e.a1 * e.a2 + e.b1 * e.b2 - e.c1 * e.c2 - e.d1 * e.d2,
                             mag({e.a1 * e.a2, e.b1 * e.b2, e.c1 * e.c2, e.d1 * e.d2})};
        });
    }
};

double cst(const FamilySpec& s, std::string_view n) {
    auto it = s.constants.find(n);
    if (it != s.constants.end()) return it->second;
    const auto& d = schema(s.branch).defaults;
    return d.at(std::string(n));
}

}  // namespace

ResidualReport check_constraints(const RMatrixModel& model, int samples, std::uint64_t seed, const ToleranceConfig& tol) {
    if (model.n() == 3) return check_r33_relations(model, samples, seed, tol);
    ResidualReport rep;
    rep.family = model.family();
    rep.samples = samples;
    const FamilySpec* spec = model.family_spec();
    if (!spec) return rep;
    ConstraintRun run{model, samples, seed, tol, rep};
    const auto ec = model.expected_constants();

    switch (spec->branch) {
        case Branch::A: {
            const double d0 = cst(*spec, "d0");
            run.elementary("yr3", [&](const Elem& e, const auto&) {
                return std::pair{e.a1 * e.a1 - e.d * e.d - 1.0 + e.d * d0, mag({e.a1 * e.a1, e.d * e.d, e.d * d0})};
            });
            run.full("yr3", [&](const EightVertexElements& e, const auto&, const auto&) {
                return std::pair{e.a1 * e.a1 - e.d1 * e.d1 - 1.0 + e.d1 * d0, mag({e.a1 * e.a1, e.d1 * e.d1, e.d1 * d0})};
            });
            break;
        }
        case Branch::B_xxz: {
            const double u0 = cst(*spec, "u0"), c0 = cst(*spec, "c0");
            run.elementary_constant("abc.Delta", ec.at("Delta"), [](const Elem& e) {
                return (e.a1 * e.a2 + e.b1 * e.b2 - 1.0) / (e.b1 * e.a1);
            });
            run.elementary_constant("abx.k", ec.at("k"), [](const Elem& e) { return (e.a2 * e.b2) / (e.a1 * e.b1); });
            run.full("abce", [&](const EightVertexElements& e, const auto&, const auto&) {
                const Complex lhs = (e.a1 * e.a2 + e.b1 * e.b2 - e.c1 * e.c2) / (2.0 * std::sqrt(e.a1 * e.b1 * e.a2 * e.b2));
                return std::pair{Complex(std::abs(lhs) - std::abs(std::cos(u0))), 1.0};
            });
            run.full("abxe", [&](const EightVertexElements& e, const auto&, const SpectralPoint& w) {
                const double q = w.at("p");
                const Complex lhs = e.a2 * e.b2 * q * q * q * q, rhs = c0 * c0 * e.a1 * e.b1;
                return std::pair{lhs - rhs, mag({lhs, rhs})};
            });
            break;
        }
        case Branch::B_ff:
            run.elementary("abc", [](const Elem& e, const auto&) {
                return std::pair{e.a1 * e.a2 + e.b1 * e.b2 - 1.0, mag({e.a1 * e.a2, e.b1 * e.b2})};
            });
            run.free_fermion_full();
            break;
        case Branch::C_xyz: {
            const Complex K = ec.at("k"), Delta = ec.at("Delta");
            run.elementary("dk", [&](const Elem& e, const auto&) {
                return std::pair{e.d - K * e.a1 * e.b1, mag({e.d, K * e.a1 * e.b1})};
            });
            run.elementary("abdelta", [&](const Elem& e, const auto&) {
                const Complex lhs = e.a1 * e.a1 + e.b1 * e.b1 - 1.0 - e.d * e.d;
                return std::pair{lhs - 2.0 * Delta * e.a1 * e.b1, mag({e.a1 * e.a1, e.b1 * e.b1, e.d * e.d})};
            });
            run.full("abdelta", [&](const EightVertexElements& e, const auto&, const auto&) {
                const Complex lhs = e.a1 * e.a1 + e.b1 * e.b1 - e.c1 * e.c2 - e.d1 * e.d2;
                return std::pair{lhs - 2.0 * Delta * e.a1 * e.b1, mag({e.a1 * e.a1, e.b1 * e.b1, e.d1 * e.d2})};
            });
            break;
        }
        case Branch::C_ff2:
            run.elementary("a-bc", [](const Elem& e, const auto&) {
                return std::pair{e.a1 * e.a1 - e.b1 * e.b1 - e.d * e.d - 1.0, mag({e.a1 * e.a1, e.b1 * e.b1, e.d * e.d})};
            });
            run.full("a-bc", [](const EightVertexElements& e, const auto&, const auto&) {
                return std::pair{e.a1 * e.a1 - e.b1 * e.b1 - e.d1 * e.d1 - 1.0, mag({e.a1 * e.a1, e.b1 * e.b1, e.d1 * e.d1})};
            });
            break;
        case Branch::D_sym: {
            const double f0 = cst(*spec, "f0"), xf = cst(*spec, "x0") / f0;
            run.elementary("a1b1", [](const Elem& e, const auto&) {
                const Complex l = e.a1 * (e.b1 * e.b1 + e.a2 * e.a2), r = e.a2 * (1.0 + e.d * e.d);
                return std::pair{l - r, mag({l, r})};
            });
            run.elementary("a2b2", [&](const Elem& e, const auto&) {
                const Complex l = f0 * e.b1 * (e.a1 * e.a1 + e.a2 * e.a2), r = 2.0 * e.a2 * e.d;
                return std::pair{l - r, mag({l, r})};
            });
            run.elementary("abxf", [&](const Elem& e, const auto&) {
                const Complex l = 4.0 * xf * e.d * e.a2 * e.a2;
                const Complex r = (e.a1 * e.a1 - e.a2 * e.a2) * (e.a2 * e.a2 + e.b1 * e.b1);
                return std::pair{l - r, mag({l, r})};
            });
            run.elementary("fre", [](const Elem& e, const auto&) {
                return std::pair{e.a1 * e.a2 + e.b1 * e.b2 - 1.0 - e.d * e.d, mag({e.a1 * e.a2, e.b1 * e.b2, e.d * e.d})};
            });
            run.elementary("a1b1_eq_a2b2", [](const Elem& e, const auto&) {
                return std::pair{e.a1 * e.b1 - e.a2 * e.b2, mag({e.a1 * e.b1, e.a2 * e.b2})};
            });
            run.free_fermion_full();
            break;
        }
        case Branch::D_colored:
        case Branch::E_general: {
            const double xf = cst(*spec, "x_f");
            const double xb = spec->branch == Branch::E_general ? cst(*spec, "xbar0") : 0.0;
            run.elementary("relatx", [&](const Elem& e, const auto&) {
                const Complex l = 4.0 * xf * e.d, r = e.a1 * e.a1 - e.a2 * e.a2 - e.b1 * e.b1 + e.b2 * e.b2;
                return std::pair{l - r, mag({l, e.a1 * e.a1, e.a2 * e.a2, e.b1 * e.b1, e.b2 * e.b2})};
            });
            run.elementary("relatz", [&](const Elem& e, const auto&) {
                const Complex l = 2.0 * xb * e.d, r = e.a2 * e.b1 + e.a1 * e.b2;
                return std::pair{l - r, mag({l, e.a2 * e.b1, e.a1 * e.b2})};
            });
            run.elementary("relatw", [](const Elem& e, const auto&) {
                return std::pair{e.a1 * e.a2 + e.b1 * e.b2 - 1.0 - e.d * e.d, mag({e.a1 * e.a2, e.b1 * e.b2, e.d * e.d})};
            });
            run.free_fermion_full();
            break;
        }
        case Branch::preset_xyz8v: {
            const Complex Delta = ec.at("Delta");
            run.full("ybezi", [&](const EightVertexElements& e, const auto&, const auto&) {
                const Complex lhs = e.a1 * e.a1 + e.b1 * e.b1 - e.c1 * e.c2 - e.d1 * e.d2;
                return std::pair{lhs - 2.0 * Delta * e.a1 * e.b1, mag({e.a1 * e.a1, e.b1 * e.b1, e.d1 * e.d2})};
            });
            break;
        }
        case Branch::preset_ising:
            run.full("b1_eq_b2", [](const EightVertexElements& e, const auto&, const auto&) {
                return std::pair{e.b1 - e.b2, mag({e.b1, e.b2})};
            });
            run.free_fermion_full();
            break;
        case Branch::preset_ff2p:
        case Branch::preset_colored: run.free_fermion_full(); break;
    }
    return rep;
}

std::vector<Complex> independent_equations(const RMatrixModel& model, const SpectralPoint& u,
                                           const SpectralPoint& v, const SpectralPoint& w) {
    struct F {
        Complex a, ax, b, bx, d;
    };
    auto el = [&](const SpectralPoint& x, const SpectralPoint& y) {
        const auto m = model.evaluate(x, y);
        return F{m(0, 0), m(3, 3), m(1, 1), m(2, 2), m(0, 3)};
    };
    const F f12 = el(u, v), f13 = el(u, w), f23 = el(v, w);
    const Complex a12 = f12.a, ax12 = f12.ax, b12 = f12.b, bx12 = f12.bx, d12 = f12.d;
    const Complex a13 = f13.a, ax13 = f13.ax, b13 = f13.b, bx13 = f13.bx, d13 = f13.d;
    const Complex a23 = f23.a, ax23 = f23.ax, b23 = f23.b, bx23 = f23.bx, d23 = f23.d;
    return {
        a12 * a23 - a13 - b23 * bx12 + ax13 * d12 * d23,
        a12 * d13 - ax12 * d23 - a13 * a23 * d12 + bx13 * bx23 * d12,
        a12 * b13 - a13 * b12 - b23 + bx23 * d12 * d13,
        a23 * bx13 - bx12 - a13 * bx23 + b12 * d13 * d23,
        a23 * d13 - ax23 * d12 - a12 * a13 * d23 + b12 * b13 * d23,
        bx13 * d12 - b13 * d23 + a12 * b23 * d13 - a23 * bx12 * d13,
    };
}

ResidualReport check_independent_eqs(const RMatrixModel& model, int samples, std::uint64_t seed, const ToleranceConfig& tol) {
    if (model.n() != 2 || !model.unit_c_symmetric_d())
        throw DomainError("independent equations need a 4x4 model with c = 1 and d1 = d2");
    ResidualReport rep;
    rep.family = model.family();
    rep.samples = samples;

    std::vector<Tracker> eqs;
    for (int i = 1; i <= 6; ++i) eqs.emplace_back("independent_eq" + std::to_string(i), tol.ybe_rel);
    Tracker condit("condit_symmetry", tol.constraint_abs);
    Tracker implication("implication", tol.ybe_rel);
    int premises = 0;
    EightVertexElements probe;
    probe.b1 = probe.b2 = probe.d1 = probe.d2 = 1.0;
    const bool ff = model.free_fermion_defect(probe) == Complex{};

    sweep(model, samples, seed, 3, [&](const auto& p) {
        const auto res = independent_equations(model, p[0], p[1], p[2]);
        const std::string where = describe(p);
        bool six_ok = true;
        for (std::size_t i = 0; i < 6; ++i) {
            eqs[i].record_abs(res[i], 1.0, where);
            six_ok = six_ok && std::abs(res[i]) <= tol.ybe_rel;
        }
        // (condit): a1(u,w) = a2(w,u), b_i(u,w) = -b_i(w,u), d(u,w) = -d(w,u)
        bool sym_ok = true;
        for (auto [x, y] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
            const auto e = EightVertexElements::from_matrix(model.evaluate(p[x], p[y]));
            const auto r = EightVertexElements::from_matrix(model.evaluate(p[y], p[x]));
            const double dev = std::max({std::abs(e.a1 - r.a2), std::abs(e.b1 + r.b1), std::abs(e.b2 + r.b2),
                                         std::abs(e.d1 + r.d1)});
            condit.record(dev, std::max(1.0, mag({e.a1, e.b1, e.b2, e.d1})), where);
            sym_ok = sym_ok && dev <= tol.constraint_abs * std::max(1.0, mag({e.a1, e.b1, e.b2, e.d1}));
        }
        if (six_ok && sym_ok) {
            ++premises;
            const auto y = ybe_residual(model, p[0], p[1], p[2]);
            implication.record(y.rel, 1.0, where);
        }
    }, rep.resample_count);

    for (auto& e : eqs) rep.add(e.result());
    condit.result().asserted = ff;
    if (!ff) condit.result().note = "reported only for non-free-fermionic branches";
    rep.add(condit.result());
    implication.result().extra["premise_samples"] = premises;
    rep.add(implication.result());
    return rep;
}

DeterminantFactors consistency_determinant(const RMatrixModel& model, const SpectralPoint& u,
                                           const SpectralPoint& v, const SpectralPoint& w) {
    if (model.n() != 2) throw DimensionError("consistency determinant needs a 4x4 model");
    const auto A = EightVertexElements::from_matrix(model.evaluate(u, v));
    const auto B = EightVertexElements::from_matrix(model.evaluate(u, w));
    DeterminantFactors f;
    const Complex t1 = A.a1 * B.a2 * A.b1 * B.b2, t2 = B.a1 * A.a2 * B.b1 * A.b2;
    f.factor1 = t1 - t2;
    f.factor2 = A.a1 * A.a2 + A.b1 * A.b2 - A.c1 * A.c2;
    const bool z1 = std::abs(f.factor1) <= 1e-9 * std::max(1.0, mag({t1, t2}));
    const bool z2 = std::abs(f.factor2) <= 1e-9 * std::max(1.0, mag({A.a1 * A.a2, A.b1 * A.b2, A.c1 * A.c2}));
    f.winner = z1 && z2 ? "both" : z1 ? "factor1" : z2 ? "factor2" : "none";
    return f;
}

ResidualReport check_r33_relations(const RMatrixModel& model, int samples, std::uint64_t seed, const ToleranceConfig& tol) {
    if (model.n() != 3) throw DimensionError("r33 relations need a 9x9 model");
    ResidualReport rep;
    rep.family = model.family();
    rep.samples = samples;
    using FV = FifteenVertexElements;
    auto el = [&](const SpectralPoint& x, const SpectralPoint& y) { return FV::from_matrix(model.evaluate(x, y)); };
    const auto& zero = model.coordinates().zero;

    std::map<std::string, Tracker> tr;
    auto track = [&](const std::string& name, Complex l, Complex r, const std::string& where) {
        auto [it, _] = tr.try_emplace(name, name, tol.constraint_abs);
        it->second.record(std::abs(l - r), std::max(1.0, mag({l, r})), where);
    };

    sweep(model, samples, seed, 3, [&](const auto& p) {
        const FV f12 = el(p[0], p[1]), f13 = el(p[0], p[2]), f23 = el(p[1], p[2]);
        const std::string where = describe(p);
        // (eqc), i = 1, 2, 3
        track("eqc1", f12.c1 * f23.c1 * f13.cb1, f13.c1 * f12.cb1 * f23.cb1, where);
        track("eqc2", f12.c2 * f23.c2 * f13.cb2, f13.c2 * f12.cb2 * f23.cb2, where);
        track("eqc3", f12.c3 * f23.c3 * f13.cb3, f13.c3 * f12.cb3 * f23.cb3, where);
        track("eqx1", f23.c2 * f12.b1 * f13.b3, f23.c2 * f13.b1 * f12.b3, where);
        track("eqx2", f23.c3 * f12.bb1 * f13.b2, f23.c3 * f13.bb1 * f12.b2, where);
        track("eqx3", f23.c1 * f12.bb3 * f13.bb2, f23.c1 * f13.bb3 * f12.bb2, where);
        track("eqbc1", f12.c1 * f23.b3 * f13.b2, f12.c1 * f13.b3 * f23.b2, where);
        track("eqbc2", f12.cb2 * f23.bb1 * f13.bb3, f12.cb2 * f13.bb1 * f23.bb3, where);
        track("eqbc3", f12.c3 * f23.b1 * f13.bb2, f12.c3 * f13.b1 * f23.bb2, where);

        // (constr): full ratios against elementary ones, cross-multiplied
        const FV full = el(p[0], p[2]), eu = el(p[0], zero), ew = el(p[2], zero);
        track("constr.c1", full.cb1 * eu.c1 * ew.cb1, full.c1 * eu.cb1 * ew.c1, where);
        track("constr.c2", full.cb2 * eu.c2 * ew.cb2, full.c2 * eu.cb2 * ew.c2, where);
        track("constr.c3", full.cb3 * eu.c3 * ew.cb3, full.c3 * eu.cb3 * ew.c3, where);
        track("constr.bb1_b2", full.bb1 * eu.b2, eu.bb1 * full.b2, where);
        track("constr.bb2_bb3", full.bb2 * eu.bb3, eu.bb2 * full.bb3, where);
        track("constr.b3_b1", full.b3 * eu.b1, eu.b3 * full.b1, where);
        // elementary proportionalities: ratio at u equals ratio at w
        track("constr.bb2_b1", eu.bb2 * ew.b1, ew.bb2 * eu.b1, where);
        track("constr.b3_b2", eu.b3 * ew.b2, ew.b3 * eu.b2, where);
        track("constr.bb3_bb1", eu.bb3 * ew.bb1, ew.bb3 * eu.bb1, where);
    }, rep.resample_count);

    static const char* order[] = {"eqc1", "eqc2", "eqc3", "eqx1", "eqx2", "eqx3", "eqbc1", "eqbc2", "eqbc3",
                                  "constr.c1", "constr.c2", "constr.c3", "constr.bb1_b2", "constr.bb2_bb3",
                                  "constr.b3_b1", "constr.bb2_b1", "constr.b3_b2", "constr.bb3_bb1"};
    for (const char* n : order) rep.add(tr.at(n).result());
    return rep;
}

ResidualReport run_suite(const RMatrixModel& model, int samples, std::uint64_t seed, const ToleranceConfig& tol) {
    tol.validate();
    ResidualReport rep = check_ybe(model, samples, seed, tol);
    rep.merge(check_normalization(model, sample_grid(model, 20, seed + 100), tol));
    rep.merge(check_unitarity(model, std::max(1, samples / 2), seed + 200, tol));
    if (model.n() == 2) {
        rep.merge(check_free_fermion(model, samples, seed + 300, tol));
        rep.merge(check_constraints(model, std::max(1, samples / 2), seed + 400, tol));
        if (model.unit_c_symmetric_d()) rep.merge(check_independent_eqs(model, samples, seed + 500, tol));
    } else {
        rep.merge(check_r33_relations(model, samples, seed + 400, tol));
    }
    return rep;
}

}  // namespace ybx
