#pragma once

#include <chrono>

namespace cskit {

using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  Stopwatch() : start_(Clock::now()) {}

  double seconds() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

 private:
  Clock::time_point start_;
};

// Nominal tick of the monotonic clock in seconds.
inline double clock_resolution_seconds() {
  return static_cast<double>(Clock::period::num) /
         static_cast<double>(Clock::period::den);
}

}  // namespace cskit
