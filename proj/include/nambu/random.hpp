#pragma once

#include <cstdint>
#include <random>

#include "nambu/poly.hpp"

namespace nambu {

/// Seeded generator for random polynomial inputs. Draws use raw modulo on
/// mt19937_64 output so sequences are identical across standard libraries.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform-ish integer in [lo, hi].
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool coin() { return next() & 1u; }

  /// Small nonzero rational p/q with |p| <= 3, 1 <= q <= 2.
  Rat coefficient();
  /// Polynomial with at most `max_terms` terms of total degree <= degree.
  Poly poly(const Chart& chart, unsigned degree, unsigned max_terms = 3);
  /// Monomial of total degree <= degree.
  Monomial monomial(std::size_t dimension, unsigned degree);

 private:
  std::mt19937_64 engine_;
};

}  // namespace nambu
