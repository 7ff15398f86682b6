#pragma once

#include <cstddef>

#include <json.hpp>

namespace fal::schedule {

/// Trade-off weight alpha_t on the entropy term, either constant or a linear
/// staircase from `hi` to `lo` over `steps` equal-width plateaus.
struct AlphaSchedule {
  enum class Kind { Fixed, LinearDecay };

  Kind kind = Kind::LinearDecay;
  double value = 1.0;  // Fixed
  double hi = 1.0;     // LinearDecay
  double lo = 0.0;
  std::size_t steps = 11;

  static AlphaSchedule fixed(double alpha);
  static AlphaSchedule linear_decay(double hi = 1.0, double lo = 0.0, std::size_t steps = 11);

  /// {"kind": "fixed", "value": 0.6} or
  /// {"kind": "linear_decay", "hi": 1.0, "lo": 0.0, "steps": 11}
  static AlphaSchedule from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// alpha for iteration t (from 0) of a run with budget B. Plateaus are
/// floor(B / steps) wide (at least 1); the last plateau absorbs the remainder.
double alpha_at(const AlphaSchedule& s, std::size_t t, std::size_t budget);

}  // namespace fal::schedule
