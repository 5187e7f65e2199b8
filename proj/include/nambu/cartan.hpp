#pragma once

#include "nambu/exterior.hpp"

namespace nambu {

/// Exterior derivative of a k-form.
Form de_rham_d(const Form& omega);

/// L_X on forms, by d iota_X + iota_X d.
Form lie_derivative(const MultiVec& x, const Form& omega);
/// L_X on multivectors, as the bracket [X, T].
MultiVec lie_derivative(const MultiVec& x, const MultiVec& t);

/// Schouten-Nijenhuis bracket of grades p and q (p + q >= 1).
///
/// Conventions: [X, T] = L_X T for vector fields X, graded skew-symmetry
/// [P, Q] = -(-1)^{(p-1)(q-1)} [Q, P], and [P, f] = (-1)^{p-1} iota_{df} P.
MultiVec schouten(const MultiVec& p, const MultiVec& q);

/// Coefficientwise partial derivative of a field.
template <FieldKind K>
SkewField<K> coefficient_derivative(const SkewField<K>& t, std::size_t i) {
  return t.map_coefficients([i](const Poly& c) { return c.derivative(i); });
}

}  // namespace nambu
