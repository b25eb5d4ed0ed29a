#pragma once

#include <algorithm>
#include <cmath>

namespace pbf {

/// Scan path of a beam or measurement window center. x sweeps [x_min, x_max]
/// sinusoidally so the turnarounds have zero speed; y optionally advances
/// linearly over [0, t_final] (the hatch direction). Units mm, mm/s, s.
struct RasterPath {
  double x_min = 0.0, x_max = 0.0;
  double v = 0.0;  // nominal scan speed along x
  double y0 = 0.0, y1 = 0.0;
  double t_final = 0.0;  // 0 disables the y sweep

  double x(double t) const {
    const double span = x_max - x_min;
    if (span <= 0.0 || v <= 0.0) return x_min;
    return 0.5 * span * std::sin(v * M_PI * t / span - M_PI / 2.0) + 0.5 * (x_min + x_max);
  }

  double y(double t) const {
    if (t_final <= 0.0) return y0;
    const double s = std::clamp(t / t_final, 0.0, 1.0);
    return y0 + (y1 - y0) * s;
  }

  // Peak speeds, used to calibrate ramp widths of time-varying system maps.
  double max_speed_x() const { return (x_max > x_min) ? v * M_PI / 2.0 : 0.0; }
  double max_speed_y() const { return (t_final > 0.0) ? std::abs(y1 - y0) / t_final : 0.0; }
};

}  // namespace pbf
