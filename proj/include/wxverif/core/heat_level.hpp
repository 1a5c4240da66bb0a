#pragma once

#include "wxverif/core/errors.hpp"

#include <cmath>
#include <span>

namespace wxverif {

/// MeteoSwiss heat warning level from three consecutive daily means.
enum class HeatLevel : int { kLevel1 = 1, kLevel2 = 2, kLevel3 = 3, kLevel4 = 4 };

inline int to_int(HeatLevel l) { return static_cast<int>(l); }

inline HeatLevel heat_level_from_int(int level) {
  require(level >= 1 && level <= 4, "heat level must be in 1..4");
  return static_cast<HeatLevel>(level);
}

/// Temperature thresholds (degC) of the warning criteria. Overridable since
/// heat events have no universal definition.
struct HeatThresholds {
  double warm = 25.0;
  double hot = 27.0;

  friend bool operator==(const HeatThresholds&, const HeatThresholds&) = default;
};

/// Level 1: all days below `warm`. Level 2: one or two days at or above
/// `warm`. Level 3: all three at or above `warm`, at least one below `hot`.
/// Level 4: all three at or above `hot`. Comparisons are exact.
inline HeatLevel classify_heat_level(std::span<const double> temps, HeatThresholds th = {}) {
  require(temps.size() == 3, "classify_heat_level: expects three daily means");
  int warm_days = 0;
  int hot_days = 0;
  for (double t : temps) {
    require(std::isfinite(t), "classify_heat_level: temperatures must be finite");
    warm_days += t >= th.warm;
    hot_days += t >= th.hot;
  }
  if (warm_days == 0) return HeatLevel::kLevel1;
  if (warm_days < 3) return HeatLevel::kLevel2;
  if (hot_days == 3) return HeatLevel::kLevel4;
  return HeatLevel::kLevel3;
}

}  // namespace wxverif
