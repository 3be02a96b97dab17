#include "quadsurf/criteria.hpp"
#include "quadsurf/experiments.hpp"
#include "quadsurf/extension.hpp"
#include "quadsurf/parallel.hpp"
#include "quadsurf/pencil.hpp"
#include "quadsurf/polyparse.hpp"
#include "quadsurf/presets.hpp"
#include "quadsurf/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

using namespace quadsurf;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInternal = 1, kSpec = 2, kInconsistent = 3, kAssertion = 4, kResource = 5 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string pair_text;
    std::string preset;
    int threads = 0;
    double memory_cap_mib = 1024;
    bool json_out = false;
    bool assert_mode = false;
    std::string out_dir;
    std::uint64_t seed = 0;
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Pairs named by --pair (text or @file) or --preset, with a display name.
std::vector<std::pair<std::string, QuadPair>> resolve_pairs(const Common &c, const std::string &default_preset) {
    if (!c.pair_text.empty() && !c.preset.empty()) throw UsageError("--pair and --preset are mutually exclusive");
    std::vector<std::pair<std::string, QuadPair>> out;
    if (!c.pair_text.empty()) {
        if (c.pair_text[0] == '@') {
            for (const auto &p : parse_pair_file(read_file(c.pair_text.substr(1)))) out.emplace_back("custom", p);
            if (out.empty()) throw UsageError("pair file " + c.pair_text.substr(1) + " contains no pairs");
        } else {
            out.emplace_back("custom", parse_pair(c.pair_text));
        }
        return out;
    }
    std::string name = c.preset.empty() ? default_preset : c.preset;
    if (name.empty()) throw UsageError("one of --pair or --preset is required");
    auto preset = find_preset(name);
    if (!preset) throw UsageError("unknown preset '" + name + "'");
    out.emplace_back(preset->name, preset->pair);
    return out;
}

std::pair<std::string, QuadPair> resolve_single(const Common &c, const std::string &default_preset) {
    auto pairs = resolve_pairs(c, default_preset);
    if (pairs.size() != 1) throw UsageError("this command takes exactly one pair");
    return pairs.front();
}

int thread_budget(const Common &c) {
    if (c.threads < 0) throw UsageError("--threads must be at least 1");
    return c.threads > 0 ? c.threads : default_thread_count();
}

std::size_t memory_cap(const Common &c) {
    if (!(c.memory_cap_mib >= 64)) throw UsageError("--memory-cap must be at least 64 MiB");
    return static_cast<std::size_t>(c.memory_cap_mib * 1024 * 1024);
}

std::vector<double> parse_reals(const std::string &text) {
    std::vector<double> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception &) {
            throw UsageError("'" + item + "' is not a number");
        }
        if (used != item.size() || !std::isfinite(v)) throw UsageError("'" + item + "' is not a finite number");
        out.push_back(v);
    }
    return out;
}

// box:[a,b]^3 | box:[a,b]x[c,d]x[e,f] | box:a,b,c,d,e,f
// gauss:c,w | gauss:c1,c2,c3,w1,w2,w3
// file:<path> | knapp:R[:twisted|flat]
FunctionSpec parse_function(const std::string &spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) throw InvalidFunction("function spec '" + spec + "' has no kind prefix");
    std::string kind = spec.substr(0, colon), body = spec.substr(colon + 1);
    if (kind == "box") {
        static const std::regex interval(R"(\[\s*([^,\]]+)\s*,\s*([^\]]+)\s*\])");
        std::vector<double> v;
        if (body.find('[') != std::string::npos) {
            std::smatch m;
            std::string rest = body;
            std::vector<std::pair<double, double>> iv;
            while (std::regex_search(rest, m, interval)) {
                auto a = parse_reals(m[1].str()), b = parse_reals(m[2].str());
                iv.emplace_back(a.at(0), b.at(0));
                rest = m.suffix().str();
                if (!rest.empty() && (rest[0] == 'x' || rest[0] == '*')) rest = rest.substr(1);
            }
            if (iv.size() == 1 && (rest == "^3" || rest == "³")) iv.assign(3, iv[0]);
            else if (!rest.empty() || iv.size() != 3) throw InvalidFunction("cannot read box '" + body + "'");
            for (auto [a, b] : iv) {
                v.push_back(a);
                v.push_back(b);
            }
        } else {
            v = parse_reals(body);
        }
        if (v.size() != 6) throw InvalidFunction("a box needs three intervals");
        Box3 b{{v[0], v[2], v[4]}, {v[1], v[3], v[5]}};
        for (int i = 0; i < 3; ++i)
            if (!(b.hi[i] > b.lo[i])) throw InvalidFunction("box intervals must have lo < hi");
        return BoxIndicator{b};
    }
    if (kind == "gauss") {
        auto v = parse_reals(body);
        Gaussian g;
        if (v.size() == 2) {
            g.center = {v[0], v[0], v[0]};
            g.widths = {v[1], v[1], v[1]};
        } else if (v.size() == 6) {
            g.center = {v[0], v[1], v[2]};
            g.widths = {v[3], v[4], v[5]};
        } else {
            throw InvalidFunction("gauss takes c,w or c1,c2,c3,w1,w2,w3");
        }
        for (double w : g.widths)
            if (!(w > 0)) throw InvalidFunction("Gaussian widths must be positive");
        return g;
    }
    if (kind == "file") return read_grid_samples(body);
    if (kind == "knapp") {
        KnappConfig config = KnappConfig::Twisted;
        auto sep = body.find(':');
        if (sep != std::string::npos) {
            std::string name = body.substr(sep + 1);
            if (name == "flat") config = KnappConfig::Flat;
            else if (name != "twisted") throw InvalidFunction("Knapp configuration must be twisted or flat");
            body = body.substr(0, sep);
        }
        auto v = parse_reals(body);
        if (v.size() != 1 || !(v[0] >= 1)) throw InvalidFunction("knapp:R needs a single R >= 1");
        return BoxIndicator{knapp_function_box(config, v[0])};
    }
    throw InvalidFunction("unknown function kind '" + kind + "'");
}

void write_outputs(const Common &c, const ExperimentReport &report, const std::string &stem) {
    if (c.out_dir.empty()) return;
    std::filesystem::create_directories(c.out_dir);
    std::ofstream csv(std::filesystem::path(c.out_dir) / (stem + ".csv"), std::ios::binary);
    write_csv(csv, report);
    std::ofstream js(std::filesystem::path(c.out_dir) / (stem + ".json"), std::ios::binary);
    js << to_json(report).dump(2) << '\n';
    if (!csv || !js) throw std::runtime_error("cannot write results to " + c.out_dir);
}

void print_summary(const ExperimentReport &report) {
    for (const auto &s : report.series) {
        std::printf("%s", s.experiment.c_str());
        if (!std::isnan(s.q)) std::printf(" q=%g", s.q);
        if (s.fit)
            std::printf(" slope=%.6f predicted=%.6f intercept=%.6f max_residual=%.3e points=%d\n", s.fit->slope,
                        s.predicted_slope, s.fit->intercept, s.fit->max_residual, s.fit->n_points);
        else
            std::printf(" (no fit)\n");
    }
    for (const auto &[k, v] : report.extras) std::printf("  %s = %.10g\n", k.c_str(), v);
}

int finish(const Common &c, const ExperimentReport &report, const std::string &stem, const CheckResult &check) {
    write_outputs(c, report, stem);
    if (c.json_out) {
        json j = to_json(report);
        if (c.assert_mode) j["assertion"] = {{"pass", check.pass}, {"detail", check.detail}};
        std::cout << j.dump(2) << '\n';
    } else {
        print_summary(report);
        if (c.assert_mode) std::printf("assert: %s (%s)\n", check.pass ? "pass" : "FAIL", check.detail.c_str());
    }
    return c.assert_mode && !check.pass ? kAssertion : kOk;
}

void add_common(CLI::App *app, Common &c, bool experiment) {
    app->add_option("--pair", c.pair_text, "pair text \"P = ...; Q = ...\" or @file");
    app->add_option("--preset", c.preset, "normal-form preset name");
    app->add_flag("--json", c.json_out, "print JSON instead of text");
    if (!experiment) return;
    app->add_option("--out", c.out_dir, "directory for CSV and JSON results");
    app->add_flag("--assert", c.assert_mode, "exit 4 when the expected tolerance fails");
    app->add_option("--seed", c.seed, "random seed");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quadratic surface classification and restriction experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    Common c;
    app.add_option("--threads", c.threads, "worker threads (default: QUADSURF_THREADS, else all cores)");
    app.add_option("--memory-cap", c.memory_cap_mib, "memory cap for grids in MiB (>= 64)");

    auto *classify_cmd = app.add_subcommand("classify", "classify a pair of quadratic forms");
    add_common(classify_cmd, c, false);

    auto *eval_cmd = app.add_subcommand("eval", "evaluate the extension operator at one point");
    add_common(eval_cmd, c, false);
    std::string f_spec = "box:[0,1]^3";
    std::string x_text = "0,0,0,0,0";
    int grid = 256;
    eval_cmd->add_option("--f", f_spec, "box:..., gauss:..., file:<path> or knapp:R[:twisted|flat]");
    eval_cmd->add_option("--x", x_text, "five comma-separated coordinates x1..x5");
    eval_cmd->add_option("--grid", grid, "midpoint grid size N per axis");

    ExperimentParams ep;
    std::string R_text = "16,32,64,128";

    auto *knapp_cmd = app.add_subcommand("knapp", "Knapp-example scaling of the region L^q norm");
    add_common(knapp_cmd, c, true);
    KnappOptions ko;
    std::string knapp_config;
    knapp_cmd->add_option("--q", ep.q, "target exponent q");
    knapp_cmd->add_option("--p", ep.p, "source exponent p");
    knapp_cmd->add_option("--R", R_text, "comma-separated R values");
    knapp_cmd->add_option("--grid", ep.N, "midpoint grid size N per axis");
    knapp_cmd->add_option("--nodes", ko.nodes_per_axis, "region nodes per axis");
    knapp_cmd->add_option("--config", knapp_config, "twisted or flat (default from the class)")
        ->check(CLI::IsMember({"twisted", "flat"}));

    auto *sq_cmd = app.add_subcommand("squarefn", "scaling of the square-function integral");
    add_common(sq_cmd, c, true);
    SquareFnOptions so;
    std::string q_text = "4";
    std::string sq_R_text = "16,32,64";
    int midpoint_nodes = 0;
    sq_cmd->add_option("--q", q_text, "comma-separated exponents q >= 2");
    sq_cmd->add_option("--R", sq_R_text, "comma-separated integer R values");
    sq_cmd->add_option("--window", so.window, "(x4, x5) window |x4| <= Y R, |x5| <= Y R^2");
    sq_cmd->add_option("--grading", so.grading, "inner (x4, x5) panel is window/(grading R)");
    sq_cmd->add_option("--nodes-per-panel", so.nodes_per_panel, "Gauss-Legendre nodes per (x4, x5) panel");
    sq_cmd->add_option("--midpoint-nodes", midpoint_nodes, "use an n x n midpoint (x4, x5) grid instead");
    sq_cmd->add_option("--spacing", so.spacing_fraction, "x' spacing as a fraction of the dual box length");
    sq_cmd->add_option("--margin", so.margin, "x' patch margin in dual box lengths");
    sq_cmd->add_option("--mc-trials", so.mc_trials, "random-sign trials for the Khintchine cross-check");
    sq_cmd->add_option("--budget", ep.N, "Gauss-Legendre node budget per axis");

    auto *decay_cmd = app.add_subcommand("decay", "Fourier decay of the surface measure");
    add_common(decay_cmd, c, true);
    DecayParams dp;
    std::string radii_text;
    decay_cmd->add_option("--radii", radii_text, "comma-separated radii (default 13 from 10 to 1000)");
    decay_cmd->add_option("--directions", dp.n_directions, "number of directions on S^4");
    decay_cmd->add_option("--budget", dp.N, "Gauss-Legendre node budget per axis");

    auto *jac_cmd = app.add_subcommand("jacobian", "exact Jacobian identities of the sum maps");
    jac_cmd->add_flag("--json", c.json_out, "print JSON instead of text");
    jac_cmd->add_option("--out", c.out_dir, "directory for CSV and JSON results");
    jac_cmd->add_flag("--assert", c.assert_mode, "exit 4 unless the relative error is exactly 0");
    jac_cmd->add_option("--seed", c.seed, "random seed");
    std::string jcase = "twisted";
    int samples = 200;
    jac_cmd->add_option("--case", jcase, "twisted or flat")->check(CLI::IsMember({"twisted", "flat"}));
    jac_cmd->add_option("--samples", samples, "number of nondegenerate samples");

    auto *bil_cmd = app.add_subcommand("bilinear", "bilinear L^4 saturation against the exact oracle");
    bil_cmd->add_flag("--json", c.json_out, "print JSON instead of text");
    bil_cmd->add_option("--out", c.out_dir, "directory for CSV and JSON results");
    bil_cmd->add_flag("--assert", c.assert_mode, "exit 4 unless monotone and within 10% below the oracle");
    BilinearParams bp;
    std::string T_text = "2,4,8,16,32";
    std::string spacing_text;
    bil_cmd->add_option("--T", T_text, "comma-separated half-widths T");
    bil_cmd->add_option("--a1", bp.boxes.a1, "xi1 offset of Q1");
    bil_cmd->add_option("--a2", bp.boxes.a2, "xi1 offset of Q2");
    bil_cmd->add_option("--b1", bp.boxes.b1, "xi3 offset of Q1");
    bil_cmd->add_option("--b2", bp.boxes.b2, "xi3 offset of Q2");
    bil_cmd->add_option("--l1", bp.boxes.l1, "xi1 side length");
    bil_cmd->add_option("--l2", bp.boxes.l2, "xi3 side length");
    bil_cmd->add_option("--amplitude1", bp.amplitude1, "amplitude of f1");
    bil_cmd->add_option("--amplitude2", bp.amplitude2, "amplitude of f2");
    bil_cmd->add_option("--spacing", spacing_text, "five comma-separated node spacings");
    bil_cmd->add_option("--budget", bp.N, "Gauss-Legendre node budget per axis");
    bil_cmd->add_option("--oracle-order", bp.oracle_order, "Gauss-Legendre order of the oracle");
    bil_cmd->add_option("--oracle-panels", bp.oracle_panels, "panels per axis of the oracle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kSpec;
    }

    try {
        memory_cap(c);
        if (classify_cmd->parsed()) {
            auto pairs = resolve_pairs(c, "");
            json all = json::array();
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                ClassificationCertificate cert = classify(pairs[i].second);
                if (c.json_out) {
                    json j = to_json(cert);
                    j["pair"] = format_pair(pairs[i].second);
                    all.push_back(j);
                } else {
                    if (i > 0) std::cout << '\n';
                    std::cout << "pair  " << format_pair(pairs[i].second) << '\n' << certificate_table(cert);
                }
            }
            if (c.json_out) std::cout << (all.size() == 1 ? all[0] : all).dump(2) << '\n';
            return kOk;
        }

        if (eval_cmd->parsed()) {
            auto [name, pair] = resolve_single(c, "");
            FunctionSpec f = parse_function(f_spec);
            auto xs = parse_reals(x_text);
            if (xs.size() != 5) throw UsageError("--x needs exactly five coordinates");
            if (grid < 2) throw UsageError("--grid must be at least 2");
            EvalPoint x{{xs[0], xs[1], xs[2]}, xs[3], xs[4]};
            SurfaceSpec s = SurfaceSpec::from_pair(pair);
            bool in_window = in_validity_window(s, x, grid);
            if (!in_window)
                std::cerr << "warning: x lies outside the validity window |x|*side <= N/4 for N = " << grid
                          << "; increase --grid\n";
            cplx v = evaluate_point(s, f, x, grid);
            if (c.json_out) {
                json j = {{"surface", name}, {"pair", format_pair(pair)}, {"f", f_spec}, {"x", xs},
                          {"re", v.real()}, {"im", v.imag()}, {"abs", std::abs(v)}, {"grid", grid},
                          {"in_validity_window", in_window}};
                std::cout << j.dump(2) << '\n';
            } else {
                std::printf("E f(x) = %.15e %+.15e i\n|E f(x)| = %.15e\n", v.real(), v.imag(), std::abs(v));
                std::printf("quadrature: midpoint, N = %d per axis, in validity window: %s\n", grid,
                            in_window ? "yes" : "no");
            }
            return kOk;
        }

        if (knapp_cmd->parsed()) {
            auto [name, pair] = resolve_single(c, "dfail-twisted");
            ep.surface_name = name;
            ep.pair = pair;
            ep.R_list = parse_reals(R_text);
            ep.seed = c.seed;
            ep.threads = thread_budget(c);
            ep.memory_cap_bytes = memory_cap(c);
            if (!knapp_config.empty())
                ko.config = knapp_config == "flat" ? KnappConfig::Flat : KnappConfig::Twisted;
            ExperimentReport rep = knapp_scan(ep, ko);
            return finish(c, rep, "knapp", check_knapp(rep));
        }

        if (sq_cmd->parsed()) {
            auto [name, pair] = resolve_single(c, "dfail-twisted");
            ep.surface_name = name;
            ep.pair = pair;
            ep.R_list = parse_reals(sq_R_text);
            ep.seed = c.seed;
            ep.threads = thread_budget(c);
            ep.memory_cap_bytes = memory_cap(c);
            so.q_list = parse_reals(q_text);
            if (midpoint_nodes > 0) {
                so.graded = false;
                so.nodes_x45 = midpoint_nodes;
            }
            ExperimentReport rep = square_function_scan(ep, so);
            return finish(c, rep, "squarefn", check_square_function(rep));
        }

        if (decay_cmd->parsed()) {
            auto [name, pair] = resolve_single(c, "cm-oberlin");
            dp.surface_name = name;
            dp.pair = pair;
            if (!radii_text.empty()) dp.radii = parse_reals(radii_text);
            dp.threads = thread_budget(c);
            ExperimentReport rep = decay_scan(dp);
            return finish(c, rep, "decay", check_decay(rep));
        }

        if (jac_cmd->parsed()) {
            JacobianCase jc = jcase == "flat" ? JacobianCase::Flat : JacobianCase::Twisted;
            JacobianResult r = jacobian_check(jc, samples, c.seed);
            ExperimentReport rep;
            rep.experiment = "jacobian";
            rep.surface = jc == JacobianCase::Flat ? "r0" : "dfail-twisted";
            Series s;
            s.experiment = "jacobian-" + to_string(jc);
            s.surface = rep.surface;
            s.rows.push_back({static_cast<double>(r.samples), to_double(r.max_relative_error), kNaN,
                              "max_relative_error=" + to_string(r.max_relative_error)});
            rep.series = {s};
            rep.extras = {{"samples", static_cast<double>(r.samples)},
                          {"degenerate", static_cast<double>(r.degenerate)},
                          {"max_relative_error", to_double(r.max_relative_error)}};
            return finish(c, rep, "jacobian", check_jacobian(r));
        }

        if (bil_cmd->parsed()) {
            bp.T_list = parse_reals(T_text);
            if (!spacing_text.empty()) {
                auto h = parse_reals(spacing_text);
                if (h.size() != 5) throw UsageError("--spacing needs five values");
                std::copy(h.begin(), h.end(), bp.spacing.begin());
            }
            bp.threads = thread_budget(c);
            ExperimentReport rep = bilinear_l4_check(bp);
            return finish(c, rep, "bilinear", check_bilinear(rep));
        }
    } catch (const InconsistentInvariants &e) {
        std::cerr << "error: inconsistent invariants: " << e.what() << '\n';
        return kInconsistent;
    } catch (const GridTooLarge &e) {
        std::cerr << "error: resource cap: " << e.what() << '\n';
        return kResource;
    } catch (const std::bad_alloc &) {
        std::cerr << "error: resource cap: out of memory\n";
        return kResource;
    } catch (const ParseError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSpec;
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSpec;
    } catch (const ExtensionError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSpec;
    } catch (const ExperimentError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSpec;
    } catch (const FailsPrecondition &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSpec;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSpec;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInternal;
    }
    return kOk;
}
