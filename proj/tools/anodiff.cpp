// Command-line driver: run, sweep, verify, convergence, demo-cvt.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "anodiff/anodiff.hpp"

namespace fs = std::filesystem;
using namespace anodiff;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNumerical = 2;

fs::path output_dir(const std::string& flag, const std::string& fallback_leaf) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("ANODIFF_OUTPUT_DIR"); env && *env) return fs::path(env) / fallback_leaf;
    return fs::path("out") / fallback_leaf;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

void print_summary_line(const std::string& label, const RunSummary& s) {
    std::printf("%-24s peak=%.6g at t=%.3f  final=%.6g  final/peak=%.4f  guard margin=%.3f\n", label.c_str(),
                s.peak, s.peak_time, s.final_value, s.ratio, s.stability.margin());
}

int cmd_run(const std::string& cfg, const std::vector<std::string>& sets, const std::string& out_flag) {
    const Scenario sc = load_scenario_file(cfg, sets);
    const RunOutputs out = run_simulation(sc);
    const fs::path dir = output_dir(out_flag, stem_of(cfg));
    write_outputs(sc, out, dir);
    print_summary_line(sc.name, out.summary);
    std::printf("outputs written to %s\n", dir.string().c_str());
    return kExitOk;
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> v;
    std::string tok;
    std::istringstream ss(text);
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("--values: '" + tok + "' is not a number");
        }
    }
    if (v.empty()) throw ConfigError("--values must list at least one number");
    return v;
}

int cmd_sweep(const std::string& cfg, const std::vector<std::string>& sets, const std::string& param,
              const std::string& values, std::size_t threads, const std::string& out_flag) {
    const Scenario base = load_scenario_file(cfg, sets);
    const auto members = run_sweep(base, param, parse_values(values), threads);
    const fs::path dir = output_dir(out_flag, stem_of(cfg) + "_sweep_" + param);

    nlohmann::json table = nlohmann::json::array();
    std::ptrdiff_t best = -1;
    bool any_failed = false;
    for (std::size_t k = 0; k < members.size(); ++k) {
        const auto& m = members[k];
        const std::string label = param + "=" + format_short(m.value);
        if (!m.outputs) {
            any_failed = true;
            std::printf("%-24s FAILED: %s\n", label.c_str(), m.error.c_str());
            table.push_back({{"value", m.value}, {"error", m.error}});
            continue;
        }
        write_outputs(m.scenario, *m.outputs, dir / (param + "_" + format_short(m.value)));
        print_summary_line(label, m.outputs->summary);
        nlohmann::json row = summary_json(m.scenario, *m.outputs);
        row["value"] = m.value;
        table.push_back(row);
        if (best < 0 || m.outputs->summary.final_value < members[best].outputs->summary.final_value) {
            best = static_cast<std::ptrdiff_t>(k);
        }
    }
    nlohmann::json doc{{"parameter", param}, {"members", table}};
    if (best >= 0) {
        doc["argmin_final"] = members[best].value;
        std::printf("argmin of final aggregate: %s=%s\n", param.c_str(), format_short(members[best].value).c_str());
    }
    fs::create_directories(dir);
    std::ofstream(dir / "sweep_summary.json") << doc.dump(2) << '\n';
    std::printf("outputs written to %s\n", dir.string().c_str());
    return any_failed ? kExitNumerical : kExitOk;
}

int cmd_verify(const VerificationSpec& spec, const std::string& out_flag) {
    const VerificationCase c = spec.c;
    const double order = spec.order;
    const std::size_t n = spec.setup.n_intervals;
    const double tau = spec.setup.tau;
    const VerificationResult r = run_verification(c, order, spec.setup);
    std::printf("case=%s order=%.6g h=1/%zu tau=%.6g t=%.6g max_error=%.6e l2_error=%.6e\n", case_name(c), order, n,
                tau, r.t, r.report.max_error, r.report.l2_error);
    if (!out_flag.empty()) {
        const fs::path dir = out_flag;
        fs::create_directories(dir);
        write_snapshot_csv((dir / "numerical.csv").string(), r.numerical, r.t);
        write_snapshot_csv((dir / "exact.csv").string(), r.exact, r.t);
        nlohmann::json j{{"case", case_name(c)},        {"order", order},
                         {"n_intervals", n},            {"tau", tau},
                         {"t", r.t},                    {"max_error", r.report.max_error},
                         {"l2_error", r.report.l2_error}};
        std::ofstream(dir / "error_report.json") << j.dump(2) << '\n';
    }
    return kExitOk;
}

void print_study(const ConvergenceReport& rep) {
    std::printf("case=%s order=%.6g refine=%s\n", case_name(rep.c), rep.order,
                rep.axis == RefinementAxis::Space ? "space" : "time");
    for (std::size_t k = 0; k < rep.levels.size(); ++k) {
        const auto& lv = rep.levels[k];
        std::printf("  h=1/%-4zu tau=%-10.6g max=%.6e l2=%.6e", lv.level.n_intervals, lv.level.tau,
                    lv.errors.max_error, lv.errors.l2_error);
        if (k > 0) std::printf("  order=%.3f", rep.pairwise_orders[k - 1]);
        std::printf("\n");
    }
    std::printf("  fitted order %.3f\n", rep.fitted_order);
}

int cmd_convergence(const std::string& case_name_in, double order, const std::string& axis) {
    const VerificationCase c = parse_case(case_name_in);
    if (axis != "space" && axis != "time") throw ConfigError("--refine must be space or time");
    if (axis == "time") {
        if (c != VerificationCase::Appendix1) throw ConfigError("temporal studies are defined for appendix1 only");
        print_study(temporal_study(order));
    } else if (c == VerificationCase::Appendix1 || c == VerificationCase::SteadyBumpTfde) {
        print_study(spatial_study_tfde(order));
    } else if (c == VerificationCase::SteadyParabolaSfde) {
        print_study(spatial_study_sfde(order, c));
    } else {
        print_study(spatial_study_sfde(order));
    }
    return kExitOk;
}

int cmd_demo_cvt(std::size_t actuators, std::size_t iterations, std::uint64_t seed) {
    if (actuators == 0) throw ConfigError("--actuators must be positive");
    const Grid2D grid = make_grid(31, 31);
    const SensorMesh mesh = make_sensor_mesh(29, grid);
    // Two Gaussian hot spots.
    const Field density = Field::from_function(grid, [](double x, double y) {
        return std::exp(-((x - 0.75) * (x - 0.75) + (y - 0.3) * (y - 0.3)) / 0.02) +
               0.5 * std::exp(-((x - 0.25) * (x - 0.25) + (y - 0.7) * (y - 0.7)) / 0.05);
    });
    const Measurement m = sample_measurements(density, mesh, 0.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point> gens;
    for (std::size_t a = 0; a < actuators; ++a) gens.push_back({u(rng), u(rng)});
    for (std::size_t it = 0; it <= iterations; ++it) {
        const LloydResult r = lloyd_step(gens, mesh, m);
        std::printf("iter %3zu cost=%.9e max_move=%.3e\n", it, cvt_cost(r.partition, m, mesh, gens),
                    r.max_displacement);
        if (r.converged) break;
        gens = r.targets;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional pest-diffusion simulator with CVT-guided actuators"};
    app.require_subcommand(1, 1);

    std::string cfg;
    std::vector<std::string> sets;
    std::string out;
    std::size_t threads = 1;

    auto* run = app.add_subcommand("run", "run one scenario");
    run->add_option("config", cfg, "scenario file")->required();
    run->add_option("--set", sets, "override section.key=value (repeatable)");
    run->add_option("--out", out, "output directory");

    std::string param;
    std::string values;
    auto* sweep = app.add_subcommand("sweep", "run one scenario per parameter value");
    sweep->add_option("config", cfg, "scenario file")->required();
    sweep->add_option("--param", param, "alpha, beta, k_p, k_v or gamma")->required();
    sweep->add_option("--values", values, "comma-separated values")->required();
    sweep->add_option("--set", sets, "override section.key=value (repeatable)");
    sweep->add_option("--out", out, "output directory");
    sweep->add_option("--threads", threads, "maximum concurrent runs")->check(CLI::PositiveNumber);

    std::string vcase = "appendix1";
    double alpha = 0.7;
    double beta = 1.7;
    std::size_t n = 20;
    double tau = 1.0 / 250.0;
    auto* verify = app.add_subcommand("verify", "manufactured-solution error at one resolution");
    verify->add_option("config", cfg, "optional [verification] file; flags below are then ignored");
    verify->add_option("--set", sets, "override section.key=value (with a config file)");
    verify->add_option("--case", vcase, "appendix1, appendix2, bump-tfde, bump-sfde or parabola-sfde");
    auto* va = verify->add_option("--alpha", alpha, "time order (time-fractional cases)");
    auto* vb = verify->add_option("--beta", beta, "space order (space-fractional cases)");
    verify->add_option("--n", n, "intervals per side");
    verify->add_option("--tau", tau, "time step");
    verify->add_option("--out", out, "directory for numerical.csv, exact.csv, error_report.json");
    va->excludes(vb);

    std::string refine = "space";
    auto* conv = app.add_subcommand("convergence", "refinement study and observed orders");
    conv->add_option("--case", vcase, "appendix1, appendix2, bump-tfde, bump-sfde or parabola-sfde");
    auto* ca = conv->add_option("--alpha", alpha, "time order");
    auto* cb = conv->add_option("--beta", beta, "space order");
    conv->add_option("--refine", refine, "space or time");
    ca->excludes(cb);

    std::size_t n_act = 4;
    std::size_t iters = 30;
    std::uint64_t seed = 1;
    auto* demo = app.add_subcommand("demo-cvt", "Lloyd iterations on a synthetic density");
    demo->add_option("--actuators", n_act, "number of generators");
    demo->add_option("--iterations", iters, "maximum Lloyd iterations");
    demo->add_option("--seed", seed, "seed for the initial generators");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: %s\n%s", e.what(), app.help().c_str());
        return kExitInvalid;
    }

    try {
        const auto order_for = [&](const std::string& c) {
            return is_time_fractional(parse_case(c)) ? alpha : beta;
        };
        if (*run) return cmd_run(cfg, sets, out);
        if (*sweep) return cmd_sweep(cfg, sets, param, values, threads, out);
        if (*verify) {
            VerificationSpec spec;
            if (!cfg.empty()) {
                spec = load_verification_file(cfg, sets);
            } else {
                spec.c = parse_case(vcase);
                spec.order = order_for(vcase);
                spec.setup = {n, tau, -1.0};
            }
            return cmd_verify(spec, out);
        }
        if (*conv) return cmd_convergence(vcase, order_for(vcase), refine);
        if (*demo) return cmd_demo_cvt(n_act, iters, seed);
    } catch (const StabilityError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const BlowUpError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const SingularityError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalid;
    }
    return kExitInvalid;
}
