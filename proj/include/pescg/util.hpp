#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pescg {

/// Error type for all domain-level failures (parse errors, cap overruns,
/// inconsistent inputs).  Numerical solver failures carry their own status
/// enum instead; this exception always means "the caller gave us something
/// we refuse to process".
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Mathematical (nonnegative) remainder: mod(x, m) is in {0, ..., m-1}
/// for every integer x and m > 0.
inline int64_t mod(int64_t x, int64_t m) {
  int64_t r = x % m;
  return r < 0 ? r + m : r;
}

/// Shared tolerances, pinned once.
namespace tol {
inline constexpr double feasibility = 1e-9;   // LP feasibility tolerance
inline constexpr double pricing = 1e-7;       // column improving iff rc < -pricing
inline constexpr double objective = 1e-6;     // objective comparisons in checks
inline constexpr double integrality = 1e-6;   // x in {0,1} within this
}  // namespace tol

/// Deterministic 64-bit RNG (xorshift*), so seeded runs are reproducible
/// across platforms and standard library versions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545f4914f6cdd1dull;
  }

  /// Uniform in [0, n).
  uint64_t below(uint64_t n) { return next() % n; }

  /// Uniform double in [0, 1).
  double uniform() { return (next() >> 11) * (1.0 / 9007199254740992.0); }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  uint64_t state_;
};

}  // namespace pescg
