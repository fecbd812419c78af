#include "rmnl/config.hpp"

#include <gtest/gtest.h>

#include <string>

#include "rmnl/experiment.hpp"

namespace rmnl {
namespace {

constexpr const char* kMinimal =
    "# minimal\n"
    "n = 20\n"
    "k = 3\n"
    "t = 5000\n"
    "eps = 0.05   # outliers\n"
    "policy = active_elim\n";

TEST(ParseConfig, MinimalFileWithDefaults) {
  const ExperimentConfig c = resolve_config(parse_config_text(kMinimal, "min.cfg"));
  EXPECT_EQ(c.n, 20);
  EXPECT_EQ(c.k, 3);
  EXPECT_EQ(c.t, 5000);
  EXPECT_EQ(c.eps, 0.05);
  EXPECT_EQ(c.resolved_eps_bar(), 0.05);
  EXPECT_EQ(c.policies, std::vector<PolicyKind>({PolicyKind::kActiveElim}));
  EXPECT_EQ(c.trials, 20);
  EXPECT_EQ(c.seed, 0u);
  EXPECT_EQ(c.adversary, AdversaryKind::kFrontLoaded);
  EXPECT_FALSE(c.explore_scale.has_value());
}

TEST(ParseConfig, OriginsCarryLineNumbers) {
  const ConfigMap m = parse_config_text(kMinimal, "min.cfg");
  EXPECT_EQ(m.at("eps").origin, "min.cfg:5");
  EXPECT_EQ(m.at("eps").value, "0.05");
}

TEST(ParseConfig, MalformedLinesAndDuplicates) {
  try {
    parse_config_text("n = 3\nbogus line\n", "f.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("f.cfg:2"), std::string::npos);
  }
  try {
    parse_config_text("n = 3\n\nn = 4\n", "f.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("f.cfg:3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

std::string error_of(const std::string& text) {
  try {
    resolve_config(parse_config_text(text, "c.cfg"));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ResolveConfig, MissingRequiredFieldIsNamed) {
  EXPECT_EQ(error_of("n = 5\nk = 2\nt = 10\npolicy = ts\n"), "missing required field 'eps'");
  EXPECT_EQ(error_of("n = 5\nk = 2\nt = 10\neps = 0\n"), "missing required field 'policy'");
}

TEST(ResolveConfig, RejectsBadValuesWithLine) {
  const std::string base = "n = 5\nk = 2\nt = 10\npolicy = ts\n";
  EXPECT_NE(error_of(base + "eps = 1.0\n").find("c.cfg:5: eps"), std::string::npos);
  EXPECT_NE(error_of(base + "eps = abc\n").find("expected a number"), std::string::npos);
  EXPECT_NE(error_of(base + "eps = 0\ncolour = red\n").find("unknown key 'colour'"),
            std::string::npos);
  EXPECT_NE(error_of("n = 5\nk = 5\nt = 10\neps = 0\npolicy = ts\n").find("k"), std::string::npos);
  EXPECT_NE(error_of("n = 5\nk = 2\nt = 10\neps = 0\npolicy = greedy\n").find("unknown policy"),
            std::string::npos);
  EXPECT_NE(error_of("n = 50\nk = 2\nt = 10\neps = 0\npolicy = adaptive\n").find("t >= n"),
            std::string::npos);
  EXPECT_NE(error_of(base + "eps = 0\ntrials = 0\n").find("trials"), std::string::npos);
  EXPECT_NE(error_of(base + "eps = 0\nfull_trace = maybe\n").find("true or false"),
            std::string::npos);
}

TEST(ResolveConfig, PolicyListsAndScales) {
  const ExperimentConfig c = resolve_config(parse_config_text(
      "n = 5\nk = 2\nt = 100\neps = 0.1\neps_bar = 0.2\npolicy = all\n"
      "explore_scale = 0.5\nadaptive_explore_scale = auto\nadversary = adaptive_hook\n"
      "out = \"my dir\"\nfull_trace = true\n",
      "c.cfg"));
  EXPECT_EQ(c.policies.size(), 4u);
  EXPECT_EQ(c.resolved_eps_bar(), 0.2);
  EXPECT_EQ(c.explore_scale, 0.5);
  EXPECT_FALSE(c.adaptive_explore_scale.has_value());
  EXPECT_EQ(c.adversary, AdversaryKind::kAdaptiveHook);
  EXPECT_EQ(c.out, "my dir");
  EXPECT_TRUE(c.full_trace);
  const ExperimentConfig two =
      resolve_config(parse_config_text("n = 5\nk = 2\nt = 100\neps = 0\npolicy = ucb, ts\n", "x"));
  EXPECT_EQ(two.policies, std::vector<PolicyKind>({PolicyKind::kUcb, PolicyKind::kTs}));
}

TEST(ConfigText, RoundTrips) {
  Rng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    ExperimentConfig c;
    c.n = 2 + static_cast<int>(uniform_index(rng, 500));
    c.k = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(c.n - 1)));
    c.t = c.n + static_cast<int>(uniform_index(rng, 100000));
    c.eps = uniform01(rng) * 0.99;
    if (uniform01(rng) < 0.5) c.eps_bar = uniform01(rng);
    if (uniform01(rng) < 0.5) c.explore_scale = uniform01(rng);
    if (uniform01(rng) < 0.5) c.adaptive_explore_scale = uniform01(rng) * 3;
    const PolicyKind all[] = {PolicyKind::kActiveElim, PolicyKind::kAdaptive, PolicyKind::kUcb,
                              PolicyKind::kTs};
    c.policies.push_back(all[uniform_index(rng, 4)]);
    if (uniform01(rng) < 0.5) c.policies.push_back(all[uniform_index(rng, 4)]);
    c.adversary = static_cast<AdversaryKind>(uniform_index(rng, 3));
    c.trials = 1 + static_cast<int>(uniform_index(rng, 100));
    c.seed = rng() >> 2;
    c.out = "out/run" + std::to_string(rep);
    c.full_trace = uniform01(rng) < 0.5;
    c.checkpoints = 1 + static_cast<int>(uniform_index(rng, 100));
    c.ucb_c1 = uniform01(rng) * 48;
    c.ucb_margin = uniform01(rng);
    c.delta = 1e-9 + uniform01(rng) * 1e-3;
    const std::string text = to_config_text(c);
    EXPECT_EQ(resolve_config(parse_config_text(text, "echo")), c) << text;
  }
}

TEST(ExplorationScale, AutoGivesSixtyFourthOfHorizon) {
  ExperimentConfig c;
  c.n = 100;
  c.k = 10;
  c.t = 20000;
  EXPECT_NEAR(elimination_t0(c.n, c.k, c.t, resolved_elimination_scale(c)), 20000 / 64.0, 1.0);
  EXPECT_NEAR(adaptive_t0(c.k, c.t, resolved_adaptive_scale(c)), 20000 / 64.0, 1.0);
  c.explore_scale = 1.0;
  EXPECT_EQ(resolved_elimination_scale(c), 1.0);
}

}  // namespace
}  // namespace rmnl
