#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace gapcert {

using cplx = std::complex<double>;

// Bad input: unknown model name, malformed region, invalid parameters.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Hilbert-space dimension exceeds the configured memory budget.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure: eigensolver non-convergence, ambiguous kernel,
// disagreeing dual-route results.
struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic random source. mt19937_64 has a standard-pinned output
// sequence; the Gaussian is a hand-rolled Box-Muller so results do not
// depend on the standard library's distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {
    // 53-bit mantissa double in [0,1)
    return (gen_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t integer() { return gen_(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  cplx cgaussian() { return {gaussian(), gaussian()}; }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Directed rounding for certification arithmetic: every factor of a
// certified lower bound is rounded toward zero after each operation.
inline double round_down(double x) {
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}
inline double round_up(double x) {
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}

}  // namespace gapcert
