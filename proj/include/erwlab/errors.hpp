#pragma once

#include <stdexcept>
#include <string>

namespace erwlab {

// Error taxonomy shared by the core and mapped one-to-one onto the C status
// codes in erwlab.h.

/// A normalizer or statistic evaluated outside its mathematical domain.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A size outside the supported range (for example the oracle cap).
class RangeError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

/// horizon * replicas exceeds the configured step budget.
class BudgetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An operation requested for a memory parameter in the wrong regime.
class RegimeError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace erwlab
