#pragma once

// Test-only reference: the law of S_n by summing over every sign sequence
// X_1..X_n, each weighted by the literal recall rule (a uniformly chosen past
// step is copied with probability p and negated otherwise). Exponential in n,
// and deliberately shares no code with the library.

#include <cstdint>
#include <map>

namespace erwlab::testing {

inline std::map<int, double> brute_force_law(double p, double s, int n) {
  std::map<int, double> law;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double prob = ((mask & 1u) != 0) ? s : 1.0 - s;
    int ups = (mask & 1u) != 0 ? 1 : 0;
    for (int k = 1; k < n && prob > 0.0; ++k) {
      const bool up = ((mask >> k) & 1u) != 0;
      const int same = up ? ups : k - ups;
      const int other = k - same;
      prob *= (same * p + other * (1.0 - p)) / k;
      ups += up ? 1 : 0;
    }
    law[2 * ups - n] += prob;
  }
  return law;
}

}  // namespace erwlab::testing
