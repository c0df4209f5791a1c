#pragma once

#include <cstdint>
#include <string_view>

namespace erwlab {

enum class Regime { Diffusive, Marginal, Superdiffusive };

std::string_view to_string(Regime regime) noexcept;

/// Classification against the critical value 3/4. 0.75 is exactly
/// representable, so the comparison on a double is exact for that double.
Regime classify_regime(double p);

/// Classification on the decimal text itself, e.g. "0.7500000000000000001" is
/// Superdiffusive even though it rounds to 0.75 as a double. Accepts an
/// optional sign, digits with one optional '.', and an optional exponent.
Regime classify_regime(std::string_view decimal);

/// Parses a decimal memory parameter; throws std::invalid_argument on
/// malformed text.
double parse_decimal(std::string_view decimal);

/// Single-walk scale: sqrt(n), sqrt(n log n) or n^(2p-1).
double walk_normalizer(Regime regime, double p, std::int64_t n);

/// Scale of the difference of two independent walks:
/// sqrt(n log log n), sqrt(n log n log log log n) or n^(2p-1).
double diff_normalizer(Regime regime, double p, std::int64_t n);

/// Smallest n accepted by diff_normalizer for the regime.
std::int64_t diff_normalizer_min_n(Regime regime) noexcept;

/// a.s. limsup of +-(S_n - S'_n) / diff_normalizer for the two LIL regimes:
/// 2/sqrt(3-4p) (diffusive) and 2 (marginal). Throws RegimeError otherwise.
double lil_constant(Regime regime, double p);

}  // namespace erwlab
