#pragma once
// Reference implementations used to cross-check the engine. They are
// deliberately naive: dense exponent vectors, GMP rationals, no sharing.

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <vector>

#include "nambu/poly.hpp"

namespace oracle {

using Exps = std::vector<unsigned>;

struct DensePoly {
  std::size_t dim = 0;
  std::map<Exps, mpq_class> terms;

  static DensePoly from(const nambu::Poly& p, std::size_t dim) {
    DensePoly d;
    d.dim = dim;
    for (const auto& t : p.terms()) {
      Exps e(dim);
      for (std::size_t i = 0; i < dim; ++i) e[i] = t.mono.exponent(i);
      d.terms[e] += t.coef.to_mpq();
    }
    d.prune();
    return d;
  }

  void prune() {
    for (auto it = terms.begin(); it != terms.end();) {
      it = it->second == 0 ? terms.erase(it) : std::next(it);
    }
  }

  friend DensePoly operator+(DensePoly a, const DensePoly& b) {
    for (const auto& [e, c] : b.terms) a.terms[e] += c;
    a.prune();
    return a;
  }
  friend DensePoly operator*(const DensePoly& a, const DensePoly& b) {
    DensePoly out;
    out.dim = a.dim;
    for (const auto& [ea, ca] : a.terms) {
      for (const auto& [eb, cb] : b.terms) {
        Exps e(a.dim);
        for (std::size_t i = 0; i < a.dim; ++i) e[i] = ea[i] + eb[i];
        out.terms[e] += ca * cb;
      }
    }
    out.prune();
    return out;
  }
  DensePoly derivative(std::size_t i) const {
    DensePoly out;
    out.dim = dim;
    for (const auto& [e, c] : terms) {
      if (e[i] == 0) continue;
      Exps f = e;
      f[i] -= 1;
      out.terms[f] += c * e[i];
    }
    out.prune();
    return out;
  }
  friend bool operator==(const DensePoly& a, const DensePoly& b) { return a.terms == b.terms; }
};

/// Value of a polynomial at a point computed by plain Horner-free summation.
inline mpq_class eval(const DensePoly& p, const std::vector<mpq_class>& x) {
  mpq_class s = 0;
  for (const auto& [e, c] : p.terms) {
    mpq_class v = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (unsigned k = 0; k < e[i]; ++k) v *= x[i];
    }
    s += v;
  }
  return s;
}

/// Determinant by permutation expansion (small sizes only).
template <class T>
T permutation_det(const std::vector<std::vector<T>>& m) {
  const std::size_t n = m.size();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  T total{};
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
    }
    T term = m[0][perm[0]];
    for (std::size_t i = 1; i < n; ++i) term = term * m[i][perm[i]];
    if (inversions % 2) {
      total = total - term;
    } else {
      total = total + term;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

}  // namespace oracle
