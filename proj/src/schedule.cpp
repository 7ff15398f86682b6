#include "fal/schedule.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fal::schedule {
namespace {
void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string("alpha schedule: ") + what + " must lie in [0, 1]");
}
}  // namespace

AlphaSchedule AlphaSchedule::fixed(double alpha) {
  check_unit(alpha, "value");
  AlphaSchedule s;
  s.kind = Kind::Fixed;
  s.value = alpha;
  return s;
}

AlphaSchedule AlphaSchedule::linear_decay(double hi, double lo, std::size_t steps) {
  check_unit(hi, "hi");
  check_unit(lo, "lo");
  if (steps < 2) throw std::invalid_argument("alpha schedule: linear_decay needs at least 2 steps");
  AlphaSchedule s;
  s.kind = Kind::LinearDecay;
  s.hi = hi;
  s.lo = lo;
  s.steps = steps;
  return s;
}

AlphaSchedule AlphaSchedule::from_json(const nlohmann::json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "fixed") return fixed(j.at("value").get<double>());
    if (kind == "linear_decay")
      return linear_decay(j.value("hi", 1.0), j.value("lo", 0.0), j.value("steps", std::size_t{11}));
    throw std::invalid_argument("alpha schedule: unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("alpha schedule: ") + e.what());
  }
}

nlohmann::json AlphaSchedule::to_json() const {
  if (kind == Kind::Fixed) return {{"kind", "fixed"}, {"value", value}};
  return {{"kind", "linear_decay"}, {"hi", hi}, {"lo", lo}, {"steps", steps}};
}

double alpha_at(const AlphaSchedule& s, std::size_t t, std::size_t budget) {
  if (budget == 0) throw std::invalid_argument("alpha_at: budget must be at least 1");
  if (t >= budget) throw std::out_of_range("alpha_at: iteration " + std::to_string(t) + " outside budget");
  if (s.kind == AlphaSchedule::Kind::Fixed) return s.value;
  const std::size_t width = std::max<std::size_t>(1, budget / s.steps);
  const std::size_t step = std::min(t / width, s.steps - 1);
  if (step == 0) return s.hi;
  if (step == s.steps - 1) return s.lo;
  // Weighted form keeps plateau values correctly rounded (1 - 3 * 0.1 is not 0.7).
  const double last = static_cast<double>(s.steps - 1);
  return (s.hi * (last - static_cast<double>(step)) + s.lo * static_cast<double>(step)) / last;
}

}  // namespace fal::schedule
