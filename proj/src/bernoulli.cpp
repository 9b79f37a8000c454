#include <cmath>

#include "femdd/discretization.hpp"
#include "femdd/error.hpp"
#include "format.hpp"

namespace femdd {

double bernoulli_series(double z) {
  const double z2 = z * z;
  return 1.0 - 0.5 * z + z2 / 12.0 - z2 * z2 / 720.0;
}

double bernoulli_exact(double z) {
  // expm1 keeps full relative accuracy near zero and saturates at -1 for
  // large negative arguments, so no branch on the sign is needed.
  return z / std::expm1(z);
}

double bernoulli(double z) {
  if (!(std::abs(z) <= 700.0)) throw RangeError("Bernoulli argument " + format_short(z) + " outside [-700, 700]");
  if (std::abs(z) < kBernoulliSeriesThreshold) return bernoulli_series(z);
  return bernoulli_exact(z);
}

}  // namespace femdd
