#pragma once

#include <stdexcept>
#include <string>

namespace cpca {

// Base class for failures raised anywhere in the pipeline. The orchestrator
// fills in `stage` before rethrowing so callers can tell which stage failed.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    std::string stage;
};

// The agents' constraint intervals have empty (or degenerate) intersection.
class EmptyIntersection : public Error {
  public:
    using Error::Error;
};

// The adaptive fit reached the degree cap without meeting the error bound.
class DegreeCapExceeded : public Error {
  public:
    using Error::Error;
};

// Consensus iterations hit the safety round cap before the stopping test passed.
class RoundCapExceeded : public Error {
  public:
    using Error::Error;
};

// Random graph sampling failed to produce a connected graph.
class NotConnectedAfterRetries : public Error {
  public:
    using Error::Error;
};

// The SDP solver did not return an optimal certificate.
class SolverFailure : public Error {
  public:
    SolverFailure(const std::string& msg, double condition_estimate)
        : Error(msg), condition_estimate(condition_estimate) {}
    double condition_estimate;
};

}  // namespace cpca
