#pragma once

#include <stdexcept>
#include <string>

namespace bdbridge {

// Violated precondition or invariant (bad state, malformed path, bad spec).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// Exact integer capacity exceeded.
class CapacityError : public std::overflow_error {
  public:
    using std::overflow_error::overflow_error;
};

// Requested case is outside what an algorithm supports.
class UnsupportedError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Rejection sampler gave up; carries the observed acceptance rate.
class RejectionLimitError : public std::runtime_error {
  public:
    RejectionLimitError(const std::string& what, double acceptance_rate)
        : std::runtime_error(what), acceptance_rate_(acceptance_rate) {}

    double acceptance_rate() const noexcept { return acceptance_rate_; }

  private:
    double acceptance_rate_;
};

// Malformed input file.
class IngestError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace bdbridge
