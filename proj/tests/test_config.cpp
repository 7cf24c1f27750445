#include <gtest/gtest.h>

#include <string>

#include "anodiff/config.hpp"
#include "anodiff/scenario.hpp"

using namespace anodiff;

namespace {

const char* kMinimal = R"(
[model]
type = time_fractional
alpha = 0.7

[boundary]
type = neumann

[source]
positions = 0.8 0.2

[actuators]
positions = 0.33 0.33; 0.66 0.66

[timing]
t_end = 1
tau = 0.002
)";

std::string message_of(const std::string& text, const std::vector<std::string>& overrides = {}) {
    try {
        load_scenario(text, overrides);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(ConfigDocument, ParsesSectionsAndComments) {
    const auto doc = ConfigDocument::parse("; leading comment\n[a]\n# note\nx = 1\n\n[b]\ny=two words\n");
    ASSERT_TRUE(doc.has("a.x"));
    EXPECT_EQ(doc.entries().at("a.x"), "1");
    EXPECT_EQ(doc.entries().at("b.y"), "two words");
    EXPECT_EQ(doc.entries().size(), 2u);
}

TEST(ConfigDocument, SyntaxErrorsCarryLineNumbers) {
    const auto msg = [](const char* text) {
        try {
            ConfigDocument::parse(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_EQ(msg("[a]\nx = 1\ngarbage\n"), "config line 3: '=' character not found in line");
    EXPECT_EQ(msg("[a\n"), "config line 1: unmatched '['");
    EXPECT_EQ(msg("[a]\nx=1\nx=2\n"), "config line 3: duplicate key name");
    EXPECT_EQ(msg("x = 1\n"), "key 'x' appears before any [section]");
}

TEST(ConfigDocument, Overrides) {
    auto doc = ConfigDocument::parse("[model]\nalpha = 0.7\n");
    doc.apply_override("model.alpha=0.8");
    doc.apply_override(" run.seed = 3 ");
    EXPECT_EQ(doc.entries().at("model.alpha"), "0.8");
    EXPECT_EQ(doc.entries().at("run.seed"), "3");
    EXPECT_THROW(doc.apply_override("model.alpha"), ConfigError);
    EXPECT_THROW(doc.apply_override("alpha=1"), ConfigError);
}

TEST(ConfigDocument, MissingFile) {
    EXPECT_THROW(ConfigDocument::load_file("/nonexistent/file.cfg"), ConfigError);
}

TEST(ConfigReader, TypedValues) {
    const auto doc = ConfigDocument::parse(
        "[s]\nd = 2.5\nn = 7\nb = yes\nlist = 1, 2 3\npts = 0.1 0.2; 0.3,0.4\nbad = 1.5x\nneg = -3\n");
    ConfigReader r(doc);
    EXPECT_EQ(r.require_double("s.d"), 2.5);
    EXPECT_EQ(r.get_size("s.n", 0), 7u);
    EXPECT_TRUE(r.get_bool("s.b", false));
    EXPECT_EQ(r.get_doubles("s.list", {}), (std::vector<double>{1, 2, 3}));
    const auto pts = r.get_points("s.pts", {});
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[1].x, 0.3);
    EXPECT_EQ(pts[1].y, 0.4);
    EXPECT_EQ(r.get_double("s.missing", 9.0), 9.0);
    try {
        r.get_double("s.bad", 0.0);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(std::string(e.what()), "s.bad: expected a number, got '1.5x'");
    }
    EXPECT_THROW(r.get_size("s.neg", 0), ConfigError);
    EXPECT_THROW(r.require_string("s.absent"), ConfigError);
}

TEST(ConfigReader, RejectsUnknownKeys) {
    const auto doc = ConfigDocument::parse("[s]\nused = 1\ntypo = 2\n");
    ConfigReader r(doc);
    r.get_double("s.used", 0.0);
    try {
        r.reject_unknown();
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(std::string(e.what()), "s.typo: unknown key 's.typo'");
    }
}

TEST(LoadScenario, MinimalConfigUsesDefaults) {
    const Scenario s = load_scenario(kMinimal);
    EXPECT_EQ(s.name, "scenario");
    EXPECT_EQ(s.nx, 31u);
    EXPECT_EQ(s.sensors_per_side, 29u);
    EXPECT_EQ(s.actuators.gains.k_p, 6.0);
    EXPECT_EQ(s.actuators.spray.gamma, 1.0);
    EXPECT_EQ(s.actuators.spray.sigma, 0.08);
    EXPECT_EQ(s.actuators.start_time, 0.4);
    EXPECT_EQ(s.timing.control_period, 0.1);
    EXPECT_EQ(s.actuators.cvt, CvtMode::Centralized);
    EXPECT_DOUBLE_EQ(s.actuators.radius.max_radius, std::sqrt(2.0));
    ASSERT_EQ(s.sources.size(), 1u);
    EXPECT_EQ(s.sources[0].amplitude, 20.0);
}

TEST(LoadScenario, ShortControlPeriodIsValid) {
    const Scenario s = load_scenario(kMinimal, {"timing.control_period=0.05"});
    EXPECT_EQ(s.timing.steps_per_period(), 25u);
}

TEST(LoadScenario, PeriodMismatch) {
    EXPECT_NE(message_of(kMinimal, {"timing.control_period=0.005"}).find("timing.control_period"),
              std::string::npos);
}

TEST(LoadScenario, ErrorsNameTheKey) {
    EXPECT_NE(message_of(kMinimal, {"model.alhpa=0.5"}).find("model.alhpa"), std::string::npos);
    EXPECT_NE(message_of(kMinimal, {"model.type=fractional"}).find("model.type"), std::string::npos);
    EXPECT_NE(message_of(kMinimal, {"grid.nx=abc"}).find("grid.nx"), std::string::npos);
    EXPECT_NE(message_of(kMinimal, {"sensors.per_side=30"}).find("sensors.per_side"), std::string::npos);
    EXPECT_NE(message_of(kMinimal, {"source.positions=1.5 0.5"}).find("source.positions"), std::string::npos);
    EXPECT_NE(message_of(kMinimal, {"output.snapshot_times=2"}).find("output.snapshot_times"), std::string::npos);
    EXPECT_NE(message_of(kMinimal, {"actuators.k_p=0"}).find("k_p"), std::string::npos);
    EXPECT_NE(message_of(kMinimal, {"model.alpha=1.5"}).find("alpha"), std::string::npos);
}

TEST(LoadScenario, MissingRequiredKey) {
    EXPECT_EQ(message_of("[model]\ntype = time_fractional\nalpha = 0.7\n[boundary]\ntype = neumann\n"),
              "missing required key 'timing.t_end'");
}

TEST(LoadScenario, SpaceFractionalNeedsHomogeneousDirichlet) {
    const std::string text = std::string(kMinimal) + "";
    EXPECT_NE(message_of(text, {"model.type=space_fractional", "model.beta=1.7"}).find("dirichlet"),
              std::string::npos);
    EXPECT_NO_THROW(load_scenario(text, {"model.type=space_fractional", "model.beta=1.7", "boundary.type=dirichlet"}));
}

TEST(LoadScenario, PerSourceAmplitudes) {
    const Scenario s = load_scenario(kMinimal, {"source.positions=0.1 0.1; 0.9 0.9", "source.amplitude=5, 7"});
    ASSERT_EQ(s.sources.size(), 2u);
    EXPECT_EQ(s.sources[1].amplitude, 7.0);
    EXPECT_THROW(load_scenario(kMinimal, {"source.positions=0.1 0.1; 0.9 0.9", "source.amplitude=1,2,3"}),
                 ConfigError);
}

TEST(LoadScenario, DistributedFlag) {
    EXPECT_EQ(load_scenario(kMinimal, {"actuators.distributed=true"}).actuators.cvt, CvtMode::Distributed);
}

TEST(LoadScenario, BundledExampleOne) {
    const Scenario s = load_scenario_file(std::string(ANODIFF_SCENARIO_DIR) + "/example1.cfg");
    EXPECT_EQ(s.params.model, Model::TimeFractional);
    EXPECT_EQ(s.params.alpha, 0.7);
    EXPECT_EQ(s.sources[0].position.x, 0.8);
    EXPECT_EQ(s.sources[0].position.y, 0.2);
    EXPECT_EQ(s.actuators.initial_positions.size(), 4u);
    EXPECT_EQ(s.bc.kind, BoundaryCondition::Kind::Neumann);
    EXPECT_EQ(s.timing.t_end, 6.0);
    EXPECT_EQ(s.snapshot_times.size(), 6u);
}

TEST(LoadScenario, BundledExampleTwo) {
    const Scenario s = load_scenario_file(std::string(ANODIFF_SCENARIO_DIR) + "/example2.cfg");
    EXPECT_EQ(s.params.model, Model::SpaceFractional);
    EXPECT_EQ(s.params.beta, 1.7);
    EXPECT_EQ(s.sources[0].position.x, 0.75);
    EXPECT_EQ(s.sources[0].position.y, 0.35);
    EXPECT_TRUE(s.bc.is_homogeneous_dirichlet());
    EXPECT_EQ(s.timing.t_end, 4.0);
}

TEST(LoadScenario, FileErrorsCarryThePath) {
    try {
        load_scenario_file(std::string(ANODIFF_SCENARIO_DIR) + "/example1.cfg", {"model.bogus=1"});
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("example1.cfg: "), std::string::npos);
    }
}
