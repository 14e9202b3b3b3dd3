#pragma once

#include <chrono>

#include "recourse/problem.hpp"

namespace recourse::detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline CounterfactualResult stamped(CounterfactualResult r, const Stopwatch& sw) {
  r.wall_time_seconds = sw.seconds();
  return r;
}

}  // namespace recourse::detail
