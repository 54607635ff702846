#pragma once

#include <stdexcept>
#include <string>

namespace cns {

/// Rejected input: a precondition or parameter constraint failed.
/// CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
  public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Solver produced non-finite values and halted.
/// CLI maps this to exit code 3.
class SolverHaltError : public std::runtime_error {
  public:
    SolverHaltError(const std::string& what, double time) : std::runtime_error(what), halt_time(time) {}
    double halt_time;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

}  // namespace cns
