#include <string>

#include <gtest/gtest.h>

#include "l4norm/config.hpp"

using namespace l4norm;

TEST(Config, ParsesFlatAssignmentsWithComments) {
  const auto c = parse_config("# run\nmu = 0.01\n\nepsilon=1e-3  # radiation\ncd=1e4\nstages=b1,h3\ntol.h3=1e-9\n");
  ASSERT_TRUE(c.mu);
  EXPECT_DOUBLE_EQ(*c.mu, 0.01);
  EXPECT_DOUBLE_EQ(*c.epsilon, 1e-3);
  EXPECT_EQ(c.stages, (std::set<Stage>{Stage::B1, Stage::H3}));
  EXPECT_DOUBLE_EQ(c.tolerances.at(Stage::H3), 1e-9);
}

TEST(Config, UnknownKeysAreRejected) {
  EXPECT_THROW(parse_config("mu=0.01\nmass=3\n"), ConfigError);
  EXPECT_THROW(parse_config("tol.h4=1e-3\n"), ConfigError);
  EXPECT_THROW(parse_config("mu 0.01\n"), ConfigError);
}

TEST(Config, MalformedValuesAreRejected) {
  EXPECT_THROW(parse_config("mu=0.01x\n"), ConfigError);
  EXPECT_THROW(parse_config("mu=nan\n"), ConfigError);
  EXPECT_THROW(parse_config("branch=L3\n"), ConfigError);
  EXPECT_THROW(parse_config("stages=b1,b9\n"), ConfigError);
  EXPECT_THROW(parse_config("format=json\n"), ConfigError);
  EXPECT_THROW(parse_config("tol.b2=-1\n"), ConfigError);
}

TEST(Config, NormalizedFormRoundTrips) {
  const auto c = parse_config(
      "stages=h3,equilibria\nmu=0.0100\nq1=0.999\ncd=1e4\nbranch=L5\ntol.b2=1e-8\nformat=csv\n"
      "cubic=printed\nb1_reading=consistent\nout=runs/a\na2=0.002\n");
  const auto n = c.normalized();
  EXPECT_EQ(parse_config(n).normalized(), n);
  EXPECT_NE(n.find("stages=equilibria,h3\n"), std::string::npos);
  EXPECT_NE(n.find("mu=0.01\n"), std::string::npos);
}

TEST(Config, LaterAssignmentsOverride) {
  auto c = parse_config("mu=0.01\n");
  c.set("mu", "0.02");
  EXPECT_DOUBLE_EQ(*c.mu, 0.02);
}

TEST(Config, ParameterResolution) {
  EXPECT_THROW(parse_config("epsilon=1e-3\n").params(), ConfigError);
  EXPECT_THROW(parse_config("mu=0.01\nepsilon=1e-3\n").params(), ConfigError);
  EXPECT_THROW(parse_config("mu=0.01\nq1=0.99\nepsilon=0.02\ncd=1e4\n").params(), ConfigError);
  EXPECT_THROW(parse_config("mu=0.01\nepsilon=1e-3\ncd=1e4\nw1=1e-4\n").params(), ConfigError);
  EXPECT_THROW(parse_config("mu=0.7\n").params(), ParameterError);
  const auto p = parse_config("mu=0.01\nq1=0.99\ncd=1e4\n").params();
  EXPECT_DOUBLE_EQ(p.W1(), 0.99 * 0.01 / 1e4);
  const auto w = parse_config("mu=0.01\nepsilon=1e-3\nw1=1e-4\n").params();
  EXPECT_DOUBLE_EQ(w.W1(), 1e-4);
  EXPECT_DOUBLE_EQ(parse_config("mu=0.01\n").params().W1(), 0.0);
}

TEST(Config, PipelineOptionsCarryOverrides) {
  const auto o = parse_config("mu=0.01\nstages=b2\ntol.b2=1e-7\nb1_reading=printed\n").pipeline_options();
  EXPECT_EQ(o.last_stage(), Stage::B2);
  EXPECT_DOUBLE_EQ(o.tol(Stage::B2), 1e-7);
  EXPECT_DOUBLE_EQ(o.tol(Stage::H3), 1e-8);
  ASSERT_TRUE(o.reading);
  EXPECT_EQ(*o.reading, B1Reading::Printed);
}
