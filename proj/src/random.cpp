#include "nambu/random.hpp"

namespace nambu {

Rat Sampler::coefficient() {
  std::int64_t p = 0;
  while (p == 0) p = range(-3, 3);
  return Rat(p, range(1, 2));
}

Monomial Sampler::monomial(std::size_t dimension, unsigned degree) {
  Monomial m;
  const unsigned total = static_cast<unsigned>(range(0, degree));
  for (unsigned k = 0; k < total; ++k) {
    const std::size_t i = static_cast<std::size_t>(range(0, static_cast<std::int64_t>(dimension) - 1));
    m.set_exponent(i, m.exponent(i) + 1);
  }
  return m;
}

Poly Sampler::poly(const Chart& chart, unsigned degree, unsigned max_terms) {
  PolyBuilder b(chart);
  const unsigned terms = static_cast<unsigned>(range(1, max_terms));
  for (unsigned k = 0; k < terms; ++k) b.add(monomial(chart.dimension(), degree), coefficient());
  return b.build();
}

}  // namespace nambu
