#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "anodiff/actuation.hpp"
#include "anodiff/config.hpp"
#include "anodiff/coverage.hpp"
#include "anodiff/error.hpp"
#include "anodiff/grid.hpp"
#include "anodiff/sensing.hpp"
#include "anodiff/solver.hpp"

namespace anodiff {

enum class CvtMode { Centralized, Distributed };

struct ActuatorFleet {
    bool enabled = true;
    std::vector<Point> initial_positions;
    ControlGains gains;
    SprayParams spray;
    double v_max = 2.0;
    double start_time = 0.4;
    CvtMode cvt = CvtMode::Centralized;
    RadiusState radius;  // template for every actuator in distributed mode
};

struct Timing {
    double t_end = 6.0;
    double tau = 0.002;
    double control_period = 0.1;

    std::size_t steps() const { return static_cast<std::size_t>(std::llround(t_end / tau)); }
    std::size_t steps_per_period() const {
        return static_cast<std::size_t>(std::llround(control_period / tau));
    }
    std::size_t step_at(double t) const { return static_cast<std::size_t>(std::llround(t / tau)); }
};

/// Full description of one simulation run.
struct Scenario {
    std::string name;
    FractionalParams params;
    std::size_t nx = 31;
    std::size_t ny = 31;
    Rect domain;
    BoundaryCondition bc = BoundaryCondition::neumann(0.0, 0.0);
    std::vector<PointSource> sources;
    ActuatorFleet actuators;
    std::size_t sensors_per_side = 29;
    NoiseModel noise;
    Timing timing;
    std::vector<double> snapshot_times;
    std::uint64_t seed = 0;

    Grid2D grid() const { return make_grid(nx, ny, domain); }

    /// Checks every cross-field constraint; throws ConfigError/ParameterError.
    void validate() const {
        params.validate();
        const Grid2D g = grid();
        if (!(timing.tau > 0.0) || !(timing.t_end >= 0.0)) {
            throw ConfigError("timing.tau must be positive and timing.t_end non-negative");
        }
        const auto is_multiple = [](double value, double step) {
            const double r = value / step;
            return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, std::abs(r));
        };
        if (!is_multiple(timing.t_end, timing.tau)) {
            throw ConfigError("timing.t_end must be an integer multiple of timing.tau");
        }
        if (!(timing.control_period > 0.0) || !is_multiple(timing.control_period, timing.tau)) {
            throw ConfigError("timing.control_period (" + format_short(timing.control_period) +
                              ") must be a positive integer multiple of timing.tau (" +
                              format_short(timing.tau) + ")");
        }
        for (const double s : snapshot_times) {
            if (s < 0.0 || s > timing.t_end + 1e-12) {
                throw ConfigError("output.snapshot_times entry " + format_short(s) + " lies outside [0, t_end]");
            }
            if (!is_multiple(s, timing.tau)) {
                throw ConfigError("output.snapshot_times entry " + format_short(s) +
                                  " is not a multiple of timing.tau");
            }
        }
        for (const auto& s : sources) {
            if (!g.domain().contains(s.position)) {
                throw ConfigError("source.positions entry (" + format_short(s.position.x) + ", " +
                                  format_short(s.position.y) + ") lies outside the domain");
            }
        }
        if (params.model == Model::SpaceFractional && !bc.is_homogeneous_dirichlet()) {
            throw ConfigError("boundary: the space_fractional model requires dirichlet with value = 0");
        }
        if (sensors_per_side == 0 || sensors_per_side > std::min(nx, ny) - 2) {
            throw ConfigError("sensors.per_side must be between 1 and " + std::to_string(std::min(nx, ny) - 2));
        }
        if (noise.sigma < 0.0) throw ConfigError("sensors.noise_sigma must be non-negative");
        if (actuators.enabled) {
            if (actuators.initial_positions.empty()) {
                throw ConfigError("actuators.positions must list at least one actuator when enabled");
            }
            for (const auto& p : actuators.initial_positions) {
                if (!g.domain().contains(p)) throw ConfigError("actuators.positions entry lies outside the domain");
            }
            actuators.gains.validate();
            actuators.spray.validate();
            if (!(actuators.v_max > 0.0)) throw ConfigError("actuators.v_max must be positive");
            if (actuators.start_time < 0.0) throw ConfigError("actuators.start_time must be non-negative");
            const RadiusState& r = actuators.radius;
            if (!(r.radius > 0.0) || !(r.delta_r > 0.0) || !(r.min_radius > 0.0)) {
                throw ConfigError("actuators radius settings must be positive");
            }
        }
    }
};

namespace detail {

inline Model parse_model(ConfigReader& cfg) {
    const std::string t = cfg.require_string("model.type");
    if (t == "time_fractional") return Model::TimeFractional;
    if (t == "space_fractional") return Model::SpaceFractional;
    throw ConfigError(cfg.where("model.type") + ": expected time_fractional or space_fractional, got '" + t + "'");
}

}  // namespace detail

/// Builds and validates a Scenario from a parsed document. Unknown keys are errors.
inline Scenario scenario_from_document(const ConfigDocument& doc) {
    ConfigReader cfg(doc);
    Scenario s;
    s.name = cfg.get_string("scenario.name", "scenario");

    s.params.model = detail::parse_model(cfg);
    if (s.params.model == Model::TimeFractional) {
        s.params.alpha = cfg.require_double("model.alpha");
        s.params.beta = cfg.get_double("model.beta", 2.0);
    } else {
        s.params.beta = cfg.require_double("model.beta");
        s.params.alpha = cfg.get_double("model.alpha", 1.0);
    }
    s.params.k_alpha = cfg.get_double("model.k_alpha", 0.01);
    s.params.k_beta = cfg.get_double("model.k_beta", 0.01);
    s.params.memory_window = cfg.get_size("model.memory_window", 0);

    s.nx = cfg.get_size("grid.nx", 31);
    s.ny = cfg.get_size("grid.ny", s.nx);
    s.domain.x_min = cfg.get_double("grid.x_min", 0.0);
    s.domain.x_max = cfg.get_double("grid.x_max", 1.0);
    s.domain.y_min = cfg.get_double("grid.y_min", 0.0);
    s.domain.y_max = cfg.get_double("grid.y_max", 1.0);

    const std::string bc = cfg.require_string("boundary.type");
    if (bc == "dirichlet") {
        s.bc = BoundaryCondition::dirichlet(cfg.get_double("boundary.value", 0.0));
    } else if (bc == "neumann") {
        const double c1 = cfg.get_double("boundary.c1", 0.0);
        s.bc = BoundaryCondition::neumann(c1, cfg.get_double("boundary.c2", 0.0));
    } else {
        throw ConfigError(cfg.where("boundary.type") + ": expected dirichlet or neumann, got '" + bc + "'");
    }

    const auto src_pos = cfg.get_points("source.positions", {});
    const auto amps = cfg.get_doubles("source.amplitude", {20.0});
    const auto decays = cfg.get_doubles("source.decay", {1.0});
    const auto pick = [&](const std::vector<double>& v, std::size_t k, const char* key) {
        if (v.size() == 1) return v[0];
        if (v.size() != src_pos.size()) {
            throw ConfigError(std::string(key) + ": give one value or one per source position");
        }
        return v[k];
    };
    for (std::size_t k = 0; k < src_pos.size(); ++k) {
        s.sources.push_back({src_pos[k], pick(amps, k, "source.amplitude"), pick(decays, k, "source.decay")});
    }

    auto& fleet = s.actuators;
    fleet.enabled = cfg.get_bool("actuators.enabled", true);
    fleet.initial_positions = cfg.get_points("actuators.positions", {});
    fleet.gains.k_p = cfg.get_double("actuators.k_p", 6.0);
    fleet.gains.k_v = cfg.get_double("actuators.k_v", 1.0);
    fleet.v_max = cfg.get_double("actuators.v_max", 2.0);
    fleet.start_time = cfg.get_double("actuators.start_time", 0.4);
    fleet.cvt = cfg.get_bool("actuators.distributed", false) ? CvtMode::Distributed : CvtMode::Centralized;
    fleet.radius.radius = cfg.get_double("actuators.initial_radius", 0.1);
    fleet.radius.delta_r = cfg.get_double("actuators.delta_r", 0.05);
    fleet.radius.min_radius = cfg.get_double("actuators.min_radius", 0.05);

    fleet.spray.gamma = cfg.get_double("spray.gamma", 1.0);
    fleet.spray.max_rate = cfg.get_double("spray.max_rate", 50.0);
    fleet.spray.sigma = cfg.get_double("spray.sigma", 0.08);

    s.sensors_per_side = cfg.get_size("sensors.per_side", s.nx >= 3 ? std::min(s.nx, s.ny) - 2 : 1);
    s.noise.sigma = cfg.get_double("sensors.noise_sigma", 0.0);

    s.timing.t_end = cfg.require_double("timing.t_end");
    s.timing.tau = cfg.require_double("timing.tau");
    s.timing.control_period = cfg.get_double("timing.control_period", 0.1);
    s.params.tau = s.timing.tau;

    s.snapshot_times = cfg.get_doubles("output.snapshot_times", {});
    s.seed = cfg.get_size("run.seed", 0);
    s.noise.seed = s.seed;

    cfg.reject_unknown();
    s.actuators.radius.max_radius = s.grid().domain().diameter();
    s.validate();
    return s;
}

inline Scenario load_scenario(std::string_view text, const std::vector<std::string>& overrides = {}) {
    ConfigDocument doc = ConfigDocument::parse(text);
    for (const auto& o : overrides) doc.apply_override(o);
    return scenario_from_document(doc);
}

inline Scenario load_scenario_file(const std::string& path, const std::vector<std::string>& overrides = {}) {
    ConfigDocument doc = ConfigDocument::load_file(path);
    for (const auto& o : overrides) doc.apply_override(o);
    try {
        return scenario_from_document(doc);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

struct TimeseriesRow {
    double t;
    double total;
};

struct TrajectoryRow {
    double t;
    std::size_t id;
    Point p;
    Vec2 v;
    Point target;
    double release_amp;
};

struct CostRow {
    double t;
    double cost;
};

struct Snapshot {
    double t;
    Field field;
    std::vector<std::size_t> owner;  // partition of the sensor mesh at that time
};

struct RunSummary {
    double peak = 0.0;
    double peak_time = 0.0;
    double final_value = 0.0;
    double final_time = 0.0;
    double ratio = 0.0;  // final / peak
    bool monotone_after_peak = true;
    StabilityReport stability;
    std::size_t steps = 0;
    std::size_t speed_cap_hits = 0;
    double wall_seconds = 0.0;
};

struct RunOutputs {
    std::vector<TimeseriesRow> timeseries;
    std::vector<TrajectoryRow> trajectories;
    std::vector<CostRow> cost;
    std::vector<Snapshot> snapshots;
    std::vector<Point> sensor_positions;
    RunSummary summary;
};

namespace detail {

inline RunSummary summarize(const std::vector<TimeseriesRow>& ts) {
    RunSummary s;
    if (ts.empty()) return s;
    std::size_t peak = 0;
    for (std::size_t k = 1; k < ts.size(); ++k) {
        if (ts[k].total > ts[peak].total) peak = k;
    }
    s.peak = ts[peak].total;
    s.peak_time = ts[peak].t;
    s.final_value = ts.back().total;
    s.final_time = ts.back().t;
    s.ratio = s.peak > 0.0 ? s.final_value / s.peak : 0.0;
    for (std::size_t k = peak + 1; k < ts.size(); ++k) {
        if (ts[k].total > ts[k - 1].total) s.monotone_after_peak = false;
    }
    return s;
}

}  // namespace detail

/// Runs the coupled simulation: PDE stepping, sensing and CVT every control
/// period, actuator motion and spraying from the actuation start time on.
inline RunOutputs run_simulation(const Scenario& sc) {
    const auto wall_start = std::chrono::steady_clock::now();
    sc.validate();
    const Grid2D grid = sc.grid();
    RunOutputs out;
    out.summary.stability = stability_guard(sc.params, grid);

    const SensorMesh mesh = make_sensor_mesh(sc.sensors_per_side, grid);
    out.sensor_positions = mesh.positions;
    std::mt19937_64 rng(sc.seed);

    SolverState state(Field(grid), sc.params);
    const std::size_t n_steps = sc.timing.steps();
    const std::size_t period = sc.timing.steps_per_period();
    const std::size_t start_step = static_cast<std::size_t>(std::ceil(sc.actuators.start_time / sc.timing.tau - 1e-9));
    std::vector<std::size_t> snapshot_steps;
    for (const double t : sc.snapshot_times) snapshot_steps.push_back(sc.timing.step_at(t));

    const bool fleet_on = sc.actuators.enabled;
    std::vector<ActuatorState> fleet;
    std::vector<Point> positions;
    std::vector<RadiusState> radii;
    if (fleet_on) {
        for (std::size_t a = 0; a < sc.actuators.initial_positions.size(); ++a) {
            const Point p = sc.actuators.initial_positions[a];
            fleet.push_back({a, p, {}, p});
        }
        radii.assign(fleet.size(), sc.actuators.radius);
    }
    const auto refresh_positions = [&] {
        positions.clear();
        for (const auto& a : fleet) positions.push_back(a.p);
    };

    Measurement measurement = sample_measurements(state.field, mesh, 0.0, sc.noise, rng);
    std::vector<std::size_t> owner;
    std::vector<double> amplitudes;
    const Field no_control(grid);

    for (std::size_t n = 0; n <= n_steps; ++n) {
        const double t = static_cast<double>(n) * sc.timing.tau;
        const bool active = fleet_on && n >= start_step;

        if (n % period == 0) {
            measurement = sample_measurements(state.field, mesh, t, sc.noise, rng);
            out.timeseries.push_back({t, aggregate_total(measurement)});
            if (fleet_on) {
                refresh_positions();
                LloydResult lr = sc.actuators.cvt == CvtMode::Distributed
                                     ? distributed_lloyd_step(positions, mesh, measurement, radii)
                                     : lloyd_step(positions, mesh, measurement);
                if (active) {
                    for (std::size_t a = 0; a < fleet.size(); ++a) fleet[a].target = lr.targets[a];
                }
                out.cost.push_back({t, cvt_cost(lr.partition, measurement, mesh, positions)});
                owner = lr.partition.owner;
                for (std::size_t a = 0; a < fleet.size(); ++a) {
                    const double amp = active ? release_amplitude(fleet[a], measurement, mesh, sc.actuators.spray) : 0.0;
                    out.trajectories.push_back({t, a, fleet[a].p, fleet[a].v, fleet[a].target, amp});
                }
            }
        }
        if (std::find(snapshot_steps.begin(), snapshot_steps.end(), n) != snapshot_steps.end()) {
            out.snapshots.push_back({t, state.field, owner});
        }
        if (n == n_steps) break;

        const Field f_d = rasterize_sources(sc.sources, grid, t);
        if (active) {
            const Field f_c = release_field(fleet, measurement, mesh, sc.actuators.spray, grid, &amplitudes);
            step(state, sc.params, f_d, f_c, sc.bc, /*clamp_nonnegative=*/true);
            for (auto& a : fleet) {
                const Vec2 acc = control_accel(a, sc.actuators.gains);
                if (integrate_actuator(a, acc, sc.timing.tau, grid.domain(), sc.actuators.v_max)) {
                    ++out.summary.speed_cap_hits;
                }
            }
        } else {
            step(state, sc.params, f_d, no_control, sc.bc);
        }
    }

    const RunSummary s = detail::summarize(out.timeseries);
    out.summary.peak = s.peak;
    out.summary.peak_time = s.peak_time;
    out.summary.final_value = s.final_value;
    out.summary.final_time = s.final_time;
    out.summary.ratio = s.ratio;
    out.summary.monotone_after_peak = s.monotone_after_peak;
    out.summary.steps = n_steps;
    out.summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return out;
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

inline std::string time_label(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", t);
    return buf;
}

inline nlohmann::json summary_json(const Scenario& sc, const RunOutputs& out) {
    const RunSummary& s = out.summary;
    return {
        {"scenario", sc.name},
        {"model", model_name(sc.params.model)},
        {"order", sc.params.model == Model::TimeFractional ? sc.params.alpha : sc.params.beta},
        {"peak", s.peak},
        {"peak_time", s.peak_time},
        {"final", s.final_value},
        {"final_time", s.final_time},
        {"ratio", s.ratio},
        {"monotone_after_peak", s.monotone_after_peak},
        {"guard", {{"quantity", s.stability.quantity}, {"limit", s.stability.limit}, {"margin", s.stability.margin()}}},
        {"steps", s.steps},
        {"speed_cap_hits", s.speed_cap_hits},
        {"wall_time_s", s.wall_seconds},
    };
}

/// Writes timeseries.csv, trajectories.csv, cost.csv, snapshots/, partitions/
/// and summary.json into `dir`.
inline void write_outputs(const Scenario& sc, const RunOutputs& out, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir / "snapshots", ec);
    if (!ec) fs::create_directories(dir / "partitions", ec);
    if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

    const auto open = [](const fs::path& p) {
        std::ofstream f(p);
        if (!f) throw Error("cannot open " + p.string() + " for writing");
        return f;
    };
    {
        auto f = open(dir / "timeseries.csv");
        f << "t,total\n";
        for (const auto& r : out.timeseries) f << format_double(r.t) << ',' << format_double(r.total) << '\n';
    }
    {
        auto f = open(dir / "trajectories.csv");
        f << "t,id,x,y,vx,vy,target_x,target_y,release_amp\n";
        for (const auto& r : out.trajectories) {
            f << format_double(r.t) << ',' << r.id << ',' << format_double(r.p.x) << ',' << format_double(r.p.y)
              << ',' << format_double(r.v.x) << ',' << format_double(r.v.y) << ',' << format_double(r.target.x)
              << ',' << format_double(r.target.y) << ',' << format_double(r.release_amp) << '\n';
        }
    }
    {
        auto f = open(dir / "cost.csv");
        f << "t,cvt_cost\n";
        for (const auto& r : out.cost) f << format_double(r.t) << ',' << format_double(r.cost) << '\n';
    }
    for (const auto& snap : out.snapshots) {
        write_snapshot_csv((dir / "snapshots" / ("t_" + time_label(snap.t) + ".csv")).string(), snap.field, snap.t);
        if (snap.owner.empty()) continue;
        auto f = open(dir / "partitions" / ("t_" + time_label(snap.t) + ".csv"));
        f << "sensor_index,owner,x,y\n";
        for (std::size_t s = 0; s < snap.owner.size(); ++s) {
            f << s << ',' << snap.owner[s] << ',' << format_double(out.sensor_positions[s].x) << ','
              << format_double(out.sensor_positions[s].y) << '\n';
        }
    }
    auto f = open(dir / "summary.json");
    f << summary_json(sc, out).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// Maps a sweep parameter name to its config key.
inline std::string sweep_key(const std::string& parameter) {
    if (parameter == "alpha") return "model.alpha";
    if (parameter == "beta") return "model.beta";
    if (parameter == "k_p") return "actuators.k_p";
    if (parameter == "k_v") return "actuators.k_v";
    if (parameter == "gamma") return "spray.gamma";
    throw ConfigError("unknown sweep parameter '" + parameter + "' (expected alpha, beta, k_p, k_v or gamma)");
}

inline void set_sweep_parameter(Scenario& s, const std::string& parameter, double value) {
    sweep_key(parameter);
    if (parameter == "alpha") s.params.alpha = value;
    if (parameter == "beta") s.params.beta = value;
    if (parameter == "k_p") s.actuators.gains.k_p = value;
    if (parameter == "k_v") s.actuators.gains.k_v = value;
    if (parameter == "gamma") s.actuators.spray.gamma = value;
}

struct SweepMember {
    double value = 0.0;
    Scenario scenario;
    std::optional<RunOutputs> outputs;
    std::string error;  // non-empty when the member failed
};

/// Runs one independent simulation per value, at most `threads` at a time.
/// A failing member records its error without affecting the others.
inline std::vector<SweepMember> run_sweep(const Scenario& base, const std::string& parameter,
                                          const std::vector<double>& values, std::size_t threads = 1) {
    sweep_key(parameter);
    std::vector<SweepMember> members;
    for (const double v : values) {
        Scenario s = base;
        set_sweep_parameter(s, parameter, v);
        s.name = base.name + "_" + parameter + "_" + format_short(v);
        members.push_back({v, std::move(s), std::nullopt, {}});
    }
    const auto run_member = [](SweepMember& m) {
        try {
            m.outputs = run_simulation(m.scenario);
        } catch (const Error& e) {
            m.error = e.what();
        }
    };
    threads = std::max<std::size_t>(threads, 1);
    for (std::size_t first = 0; first < members.size(); first += threads) {
        std::vector<std::future<void>> batch;
        const std::size_t last = std::min(members.size(), first + threads);
        for (std::size_t k = first; k < last; ++k) {
            batch.push_back(std::async(std::launch::async, run_member, std::ref(members[k])));
        }
        for (auto& f : batch) f.get();
    }
    return members;
}

}  // namespace anodiff
