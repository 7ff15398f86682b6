#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fal/schedule.hpp"

using namespace fal::schedule;

TEST_CASE("linear decay over 220 iterations") {
  const auto s = AlphaSchedule::linear_decay(1.0, 0.0, 11);
  CHECK(alpha_at(s, 0, 220) == 1.0);
  CHECK(alpha_at(s, 19, 220) == 1.0);
  CHECK(alpha_at(s, 20, 220) == 0.9);
  CHECK(alpha_at(s, 219, 220) == 0.0);
  for (std::size_t t = 0; t < 220; ++t) CHECK(alpha_at(s, t, 220) == alpha_at(s, (t / 20) * 20, 220));
}

TEST_CASE("fixed schedule") {
  const auto s = AlphaSchedule::fixed(0.6);
  for (std::size_t t : {0u, 5u, 99u}) CHECK(alpha_at(s, t, 100) == 0.6);
}

TEST_CASE("budget below the number of plateaus") {
  const auto s = AlphaSchedule::linear_decay(1.0, 0.0, 11);
  const double expected[] = {1.0, 0.9, 0.8, 0.7, 0.6};
  for (std::size_t t = 0; t < 5; ++t) CHECK(alpha_at(s, t, 5) == expected[t]);
}

TEST_CASE("remainder iterations stay on the last plateau") {
  const auto s = AlphaSchedule::linear_decay(1.0, 0.0, 11);
  CHECK(alpha_at(s, 109, 120) == 0.0);
  CHECK(alpha_at(s, 119, 120) == 0.0);
  CHECK(alpha_at(s, 99, 120) == 0.1);
}

TEST_CASE("out of range iteration") {
  const auto s = AlphaSchedule::linear_decay();
  CHECK_THROWS(alpha_at(s, 10, 10));
  CHECK_THROWS(alpha_at(s, 0, 0));
}

TEST_CASE("json round trip and validation") {
  const auto s = AlphaSchedule::from_json(nlohmann::json::parse(R"({"kind": "linear_decay", "hi": 0.8, "lo": 0.2, "steps": 4})"));
  CHECK(s.hi == 0.8);
  CHECK(s.steps == 4);
  CHECK(alpha_at(s, 0, 8) == 0.8);
  CHECK(alpha_at(s, 7, 8) == 0.2);
  const auto back = AlphaSchedule::from_json(s.to_json());
  CHECK(back.lo == s.lo);
  CHECK(AlphaSchedule::from_json(nlohmann::json::parse(R"({"kind": "fixed", "value": 0.3})")).value == 0.3);
  CHECK_THROWS(AlphaSchedule::from_json(nlohmann::json::parse(R"({"kind": "cosine"})")));
  CHECK_THROWS(AlphaSchedule::fixed(1.5));
}
