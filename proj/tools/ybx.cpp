// ybx: verify, classify and inspect R-matrix configs.
// Exit codes: 0 pass, 1 violation or runtime failure, 2 usage/config error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ybx/classify.hpp"
#include "ybx/config.hpp"
#include "ybx/error.hpp"
#include "ybx/r33.hpp"
#include "ybx/verify.hpp"

namespace {

using namespace ybx;
using nlohmann::json;

struct Options {
    std::string config;
    std::optional<int> samples;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol_ybe, tol_constraint;
    std::string report;
    std::string at;
    std::string out;
    bool quiet = false;
    bool check_form = false;
};

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << '\n';
}

std::string fmt_complex(Complex z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%+.9e%+.9ei", z.real(), z.imag());
    return buf;
}

void print_matrix(const ComplexMatrix& m) {
    for (std::size_t r = 0; r < m.dim(); ++r) {
        for (std::size_t c = 0; c < m.dim(); ++c) std::printf(" %34s", fmt_complex(m(r, c)).c_str());
        std::printf("\n");
    }
}

// "u=0.5,p=1;w=0.2,p=1.1": points separated by ';'. In the second point
// "w" names the coordinate u.
std::vector<SpectralPoint> parse_points(const std::string& text, const Coordinates& coords) {
    std::vector<SpectralPoint> pts;
    std::stringstream ss(text);
    std::string seg;
    while (std::getline(ss, seg, ';')) {
        if (pts.size() == 1) {
            std::string fixed;
            std::stringstream items(seg);
            std::string item;
            while (std::getline(items, item, ',')) {
                if (item.rfind("w=", 0) == 0) item = "u=" + item.substr(2);
                fixed += (fixed.empty() ? "" : ",") + item;
            }
            seg = fixed;
        }
        pts.push_back(parse_point(seg, coords));
    }
    if (pts.empty()) throw ConfigError("--at needs at least one point");
    return pts;
}

Config load(const Options& o) {
    Config cfg = load_config(o.config);
    if (o.samples) {
        if (*o.samples < 1) throw ConfigError("--samples must be positive");
        cfg.sampling.samples = *o.samples;
    }
    if (o.seed) cfg.sampling.seed = o.seed;
    if (o.tol_ybe) cfg.sampling.tolerances.ybe_rel = *o.tol_ybe;
    if (o.tol_constraint) cfg.sampling.tolerances.constraint_abs = *o.tol_constraint;
    cfg.sampling.tolerances.validate();
    return cfg;
}

int cmd_verify(const Options& o) {
    const Config cfg = load(o);
    const auto model = build(cfg);
    const auto seed = default_seed(cfg.sampling.seed);
    const auto rep = run_suite(*model, cfg.sampling.samples, seed, cfg.sampling.tolerances);
    if (!o.quiet) {
        std::printf("%s  samples=%d seed=%llu resampled=%d\n", rep.family.c_str(), rep.samples,
                    static_cast<unsigned long long>(seed), rep.resample_count);
        for (const auto& c : rep.checks) {
            std::printf("  %-4s %-28s max_rel=%.3e tol=%.1e%s\n", !c.asserted ? "info" : c.pass ? "ok" : "FAIL",
                        c.name.c_str(), c.max_rel, c.tolerance, c.pass ? "" : ("  at " + c.argmax).c_str());
        }
        std::printf("%s\n", rep.pass ? "PASS" : "FAIL");
    }
    if (!o.report.empty()) {
        json fields = to_json(rep);
        fields["seed"] = seed;
        write_json(o.report, make_report(cfg, fields, rep.pass));
    }
    return rep.pass ? 0 : 1;
}

int cmd_classify(const Options& o) {
    const Config cfg = load(o);
    if (cfg.is_r33) throw ConfigError("classify handles 4x4 models only");
    const auto model = build(cfg);
    ClassificationReport rep;
    try {
        rep = classify(derivatives_at_zero(*model, cfg.direction));
    } catch (const ClassificationError& e) {
        std::fprintf(stderr, "warning: %s\n", e.what());
        return 1;
    }
    std::string line(branch_name(rep.branch));
    for (const auto& [k, v] : rep.constants) {
        char buf[96];
        if (std::abs(v.imag()) <= 1e-12 * std::max(1.0, std::abs(v.real())))
            std::snprintf(buf, sizeof buf, ", %s=%.10g", k.c_str(), v.real());
        else
            std::snprintf(buf, sizeof buf, ", %s=%.10g%+.10gi", k.c_str(), v.real(), v.imag());
        line += buf;
    }
    if (!o.quiet) {
        std::printf("%s\n", line.c_str());
        if (rep.degenerate) std::printf("note: degenerate first derivatives (overlap case)\n");
    }
    if (!o.report.empty()) write_json(o.report, make_report(cfg, {{"classification", to_json(rep)}}, true));
    return 0;
}

int cmd_print(const Options& o) {
    const Config cfg = load(o);
    const auto model = build(cfg);
    const auto pts = parse_points(o.at, model->coordinates());
    if (pts.size() != 2) throw ConfigError("--at needs two points: \"u=...;w=...\"");
    ComplexMatrix m(1);
    try {
        m = o.check_form ? model->check(pts[0], pts[1]) : model->evaluate(pts[0], pts[1]);
    } catch (const SingularPoint& e) {
        std::fprintf(stderr, "singular point: %s\n", e.what());
        return 1;
    }
    if (!o.quiet) print_matrix(m);
    if (!o.out.empty()) write_json(o.out, to_json(m));
    return 0;
}

int cmd_hamiltonian(const Options& o) {
    const Config cfg = load(o);
    if (!cfg.is_r33) throw ConfigError("hamiltonian needs an r33 config");
    const auto model = build(cfg);
    const auto pts = parse_points(o.at.empty() ? "u=0" : o.at, model->coordinates());
    const auto h = extract_hamiltonian(*model, pts[0]);
    const auto a = analytic_hamiltonian(cfg.r33, pts[0]);
    const double dev = max_abs_diff(h, a);
    if (!o.quiet) {
        std::printf("H (finite differences):\n");
        print_matrix(h);
        std::printf("[P + (x_f-1) Pbar] / (1 + u(1-x_f)):\n");
        print_matrix(a);
        std::printf("max deviation %.3e\n", dev);
    }
    if (!o.report.empty())
        write_json(o.report, make_report(cfg, {{"hamiltonian", to_json(h)}, {"analytic", to_json(a)},
                                               {"max_deviation", dev}}, dev < 1e-7));
    return dev < 1e-7 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Yang-Baxter solution verifier and classifier"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("config", o.config, "JSON config")->required();
        sub->add_option("--samples", o.samples, "random samples per check");
        sub->add_option("--seed", o.seed, "RNG seed (default: YBX_SEED or 42)");
        sub->add_option("--tol-ybe", o.tol_ybe, "relative YBE tolerance");
        sub->add_option("--tol-constraint", o.tol_constraint, "constraint residual tolerance");
        sub->add_option("--report", o.report, "write a JSON report");
        sub->add_flag("--quiet", o.quiet, "suppress text output");
    };
    auto* verify = app.add_subcommand("verify", "run the verification suite");
    common(verify);
    auto* cls = app.add_subcommand("classify", "identify the branch from derivatives at the zero point");
    common(cls);
    auto* print = app.add_subcommand("print", "print R(u,w)");
    common(print);
    print->add_option("--at", o.at, "points, e.g. \"u=0.5;w=0.2\"")->required();
    print->add_option("--out", o.out, "write the matrix as JSON");
    print->add_flag("--check", o.check_form, "print R P instead of R");
    auto* ham = app.add_subcommand("hamiltonian", "extract the local Hamiltonian of an r33 config");
    common(ham);
    ham->add_option("--at", o.at, "point, e.g. \"u=0.3\"");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*verify) return cmd_verify(o);
        if (*cls) return cmd_classify(o);
        if (*print) return cmd_print(o);
        if (*ham) return cmd_hamiltonian(o);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
