#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "expdec/errors.hpp"

namespace expdec {

enum class Mode { desk, paper };

inline const char *mode_name(Mode m) { return m == Mode::desk ? "desk" : "paper"; }

/// Game and flow parameters.
///
/// paper mode keeps the literal parameter relations (c = 1/(phi Z) an integer
/// above 1000, h = 1000 c log2 m, phi < 1/log2 m) and turns on the strict
/// accounting assertions. desk mode keeps the functional shape of every
/// Theta(.) choice at sizes where the literal constants would demand an
/// infeasible phi:
///   T = ceil(log2^2 m), Z = ceil(log2 m), c = max(2, floor(1/(phi Z))),
///   d = smallest power of two >= log2 m, h = ceil(10 c log2 m).
struct Params {
  double phi = 0.1;
  int T = 1;          // round budget
  long long Z = 1;    // divisor in c = 1/(phi Z)
  long long c = 2;    // uniform integer edge capacity
  int d = 2;          // lazy-walk denominator, a power of two
  long long h = 1;    // unit-flow height
  Mode mode = Mode::desk;
  std::uint64_t seed = 0;

  int rst_min_k = 16;   // below this the source/target selection refuses
  int oracle_cap = 64;  // dense-matrix oracles refuse above this many edges

  static double log2_clamped(long long m) { return std::max(1.0, std::log2(std::max<long long>(m, 1))); }

  static int pow2_at_least(double x) {
    int d = 2;
    while (d < x) d *= 2;
    return d;
  }

  static Params desk(double phi, long long m, std::uint64_t seed) {
    Params p;
    p.phi = phi;
    p.mode = Mode::desk;
    p.seed = seed;
    const double L = log2_clamped(m);
    p.T = static_cast<int>(std::ceil(L * L));
    p.Z = static_cast<long long>(std::ceil(L));
    p.c = std::max<long long>(2, static_cast<long long>(std::floor(1.0 / (phi * static_cast<double>(p.Z)))));
    p.d = pow2_at_least(L);
    p.h = static_cast<long long>(std::ceil(10.0 * static_cast<double>(p.c) * L));
    p.validate(m);
    return p;
  }

  /// phi must satisfy phi < 1/log2 m and 1/(phi Z) must be an integer > 1000.
  static Params paper(double phi, long long m, std::uint64_t seed, double z_const = 1.0,
                      double t_const = 1.0) {
    Params p;
    p.phi = phi;
    p.mode = Mode::paper;
    p.seed = seed;
    const double L = log2_clamped(m);
    p.T = static_cast<int>(std::ceil(t_const * L * L));
    p.Z = static_cast<long long>(std::ceil(z_const * L));
    p.c = static_cast<long long>(std::llround(1.0 / (phi * static_cast<double>(p.Z))));
    p.d = pow2_at_least(L);
    p.h = static_cast<long long>(std::ceil(1000.0 * static_cast<double>(p.c) * L));
    p.validate(m);
    return p;
  }

  void validate(long long m) const {
    require_input(phi > 0.0 && phi < 1.0, "phi must be in (0,1)");
    require_input(T >= 1, "T must be >= 1");
    require_input(c >= 2, "capacity c must be an integer >= 2");
    require_input(d >= 2 && (d & (d - 1)) == 0, "d must be a power of two >= 2");
    require_input(h >= 1, "height h must be >= 1");
    require_input(Z >= 1, "Z must be >= 1");
    if (mode == Mode::paper) {
      const double L = log2_clamped(m);
      require_input(phi < 1.0 / L, "paper mode requires phi < 1/log2 m");
      require_input(c > 1000, "paper mode requires c > 1000");
      const double exact = static_cast<double>(c) * phi * static_cast<double>(Z);
      require_input(std::abs(exact - 1.0) <= 1e-9, "paper mode requires c = 1/(phi Z) exactly");
    }
  }
};

} // namespace expdec
