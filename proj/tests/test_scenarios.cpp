#include <gtest/gtest.h>

#include <ostream>

#include "drl/scenarios.hpp"

namespace drl {

void PrintTo(const Scenario& s, std::ostream* os) { *os << s.name; }

namespace {

class ScenarioTest : public ::testing::TestWithParam<Scenario> {};

TEST_P(ScenarioTest, MeetsItsExpectations) {
  const auto outcome = GetParam().run();
  std::string failures;
  for (const auto& f : outcome.failures) failures += "\n  " + f;
  EXPECT_TRUE(outcome.passed) << failures;
  EXPECT_TRUE(outcome.failures.empty());
}

INSTANTIATE_TEST_SUITE_P(Workloads, ScenarioTest, ::testing::ValuesIn(workload_scenarios()),
                         [](const auto& info) {
                           std::string name;
                           for (char ch : info.param.name) name += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
                           return name;
                         });

TEST(Scenarios, LookupByName) {
  const auto all = workload_scenarios();
  ASSERT_FALSE(all.empty());
  EXPECT_NE(find_scenario(all.front().name), nullptr);
  EXPECT_EQ(find_scenario("no-such-scenario"), nullptr);
}

}  // namespace
}  // namespace drl
