#include "nambu/cartan.hpp"

#include "nambu/error.hpp"

namespace nambu {

Form de_rham_d(const Form& omega) {
  const Chart& chart = omega.chart();
  Form out(chart, omega.grade() + 1);
  std::vector<std::size_t> idx;
  for (const auto& [m, p] : omega.components()) {
    const auto rest = mask_indices(m);
    for (std::size_t i = 0; i < chart.dimension(); ++i) {
      if (m & (IndexMask{1} << i)) continue;
      Poly c = p.derivative(i);
      if (c.is_zero()) continue;
      idx.assign(1, i);
      idx.insert(idx.end(), rest.begin(), rest.end());
      out.add_term(idx, c);
    }
  }
  return out;
}

Form lie_derivative(const MultiVec& x, const Form& omega) {
  if (x.grade() != 1) throw Error("Lie derivative along a field of grade " + std::to_string(x.grade()));
  Form out = interior<FieldKind::Form>(x, de_rham_d(omega));
  if (omega.grade() > 0) out += de_rham_d(interior<FieldKind::Form>(x, omega));
  return out;
}

MultiVec lie_derivative(const MultiVec& x, const MultiVec& t) {
  if (x.grade() != 1) throw Error("Lie derivative along a field of grade " + std::to_string(x.grade()));
  return schouten(x, t);
}

namespace {

// Right derivative P <- d/dxi_i = (-1)^{p-1} iota_{dx_i} P.
MultiVec right_derivative(const MultiVec& p, const Form& dx_i) {
  MultiVec r = interior<FieldKind::Vector>(dx_i, p);
  if ((p.grade() - 1) % 2) r = -r;
  return r;
}

}  // namespace

MultiVec schouten(const MultiVec& p, const MultiVec& q) {
  if (p.grade() + q.grade() == 0) throw Error("Schouten bracket of two functions is undefined");
  const Chart& chart = p.chart().valid() ? p.chart() : q.chart();
  if (p.chart().valid() && q.chart().valid()) require_same_chart(p.chart(), q.chart());
  const unsigned pg = p.grade(), qg = q.grade();
  MultiVec out(chart, pg + qg - 1);
  if (p.is_zero() || q.is_zero()) return out;
  const bool twist = ((pg + 1) * (qg + 1)) % 2 == 1;  // (p-1)(q-1) odd
  for (std::size_t i = 0; i < chart.dimension(); ++i) {
    const Form dx = Form::basis(chart, i);
    if (pg > 0) {
      MultiVec rp = right_derivative(p, dx);
      if (!rp.is_zero()) {
        MultiVec dq = coefficient_derivative(q, i);
        if (!dq.is_zero()) out += wedge(rp, dq);
      }
    }
    if (qg > 0) {
      MultiVec rq = right_derivative(q, dx);
      if (!rq.is_zero()) {
        MultiVec dp = coefficient_derivative(p, i);
        if (!dp.is_zero()) {
          MultiVec t = wedge(rq, dp);
          if (twist) {
            out += t;
          } else {
            out -= t;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace nambu
