#include "groundwave/angles.hpp"

#include <cmath>

namespace groundwave {

double rad_to_deg(double rad) {
  const double deg = rad * (180.0 / std::numbers::pi);
  const double whole = std::round(deg);
  if (std::abs(deg - whole) < 1e-9) {
    return whole;
  }
  return deg;
}

double wrap_degrees(double deg) {
  double wrapped = std::fmod(deg, 360.0);
  if (wrapped <= -180.0) {
    wrapped += 360.0;
  } else if (wrapped > 180.0) {
    wrapped -= 360.0;
  }
  return wrapped;
}

}  // namespace groundwave
