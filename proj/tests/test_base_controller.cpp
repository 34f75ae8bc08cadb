#include <gtest/gtest.h>

#include <random>

#include "hfcfdt/base_controller.hpp"
#include "oracles.hpp"

using namespace hfcfdt;
using bfc::RuleTable;
using bfc::Term;

TEST(RuleTable, MatchesTranscription) {
  const auto table = oracle::rule_table();
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 7; ++c) {
      const Term e = bfc::kSevenTerms[c];
      const Term edot = bfc::parse_term(std::string(oracle::kTableRows[r]).substr(0, 2));
      EXPECT_EQ(bfc::to_string(RuleTable::lookup(e, edot)), oracle::kTerms[static_cast<std::size_t>(table[r][c])])
          << "e=" << bfc::to_string(e) << " edot=" << bfc::to_string(edot);
    }
  }
}

TEST(RuleTable, Examples) {
  EXPECT_EQ(RuleTable::lookup("ZO", "ZO"), Term::ZO);
  EXPECT_EQ(RuleTable::lookup("PL", "PL"), Term::PL);
  EXPECT_EQ(RuleTable::lookup("NS", "NL"), Term::NM);
}

TEST(RuleTable, UnknownTerms) {
  EXPECT_THROW(RuleTable::lookup("XX", "ZO"), ConfigError);
  EXPECT_THROW(RuleTable::lookup(Term::ZO, Term::NM), ConfigError);  // e-dot has no NM row
}

TEST(Bfc, InputsArePartitions) {
  const auto cfg = bfc::BfcConfig::standard();
  EXPECT_EQ(cfg.error.size(), 7u);
  EXPECT_EQ(cfg.error_rate.size(), 5u);
  EXPECT_LT(cfg.error.partition_defect(10001), 1e-9);
  EXPECT_LT(cfg.error_rate.partition_defect(10001), 1e-9);
  EXPECT_DOUBLE_EQ(cfg.error.lo(), -cfg.error.hi());
  EXPECT_DOUBLE_EQ(cfg.error_rate.lo(), -cfg.error_rate.hi());
}

TEST(Bfc, Examples) {
  const bfc::BaseController c;
  const auto zero = c.evaluate(0, 0);
  EXPECT_NEAR(zero.u_motor, 0.0, 1e-12);
  EXPECT_NEAR(zero.u_servo, 0.0, 1e-12);
  const double pos = c.infer(1, 0);
  EXPECT_GT(pos, 0.0);
  EXPECT_NEAR(pos, oracle::bfc(1, 0), 1e-6);
  const double neg = c.infer(-1, 1);
  EXPECT_LT(neg, 0.0);
  EXPECT_NEAR(neg, oracle::bfc(-1, 1), 1e-6);
  EXPECT_GT(c.infer(1, 1), 0.0);
  EXPECT_LT(c.infer(-1, -1), 0.0);
}

TEST(Bfc, MatchesDenseGridOracle) {
  const bfc::BaseController c;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int i = 0; i < 1000; ++i) {
    const double e = u(rng), edot = u(rng);
    const double got = c.infer(e, edot);
    ASSERT_NEAR(got, oracle::bfc(e, edot), 1e-6) << e << ", " << edot;
    ASSERT_GE(got, -1.0);
    ASSERT_LE(got, 1.0);
  }
}

TEST(Bfc, ActuatorMapping) {
  const bfc::BaseController c(bfc::BfcConfig::standard({10.0, 5.0}));
  auto a = c.map_to_actuators({0, 0});
  EXPECT_DOUBLE_EQ(a.p_motor, 5.0);
  EXPECT_DOUBLE_EQ(a.v_servo, 0.0);
  a = c.map_to_actuators({1, 1});
  EXPECT_DOUBLE_EQ(a.p_motor, 10.0);
  EXPECT_DOUBLE_EQ(a.v_servo, 5.0);
  a = c.map_to_actuators({-1, -1});
  EXPECT_DOUBLE_EQ(a.p_motor, 0.0);
  EXPECT_DOUBLE_EQ(a.v_servo, -5.0);
}

TEST(Bfc, RejectsMismatchedTermCounts) {
  auto cfg = bfc::BfcConfig::standard();
  cfg.error_rate = fuzzy::LinguisticVariable::uniform_triangles("edot", -1, 1, {"NL", "ZO", "PL"});
  EXPECT_THROW(bfc::BaseController{cfg}, ConfigError);
}
