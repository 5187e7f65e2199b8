#include "nambu/poly.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "nambu/error.hpp"

namespace nambu {

Monomial Monomial::variable(std::size_t i, unsigned power) {
  Monomial m;
  m.set_exponent(i, power);
  return m;
}

void Monomial::set_exponent(std::size_t i, unsigned e) {
  if (i >= kMaxCoords) throw Error("coordinate index out of range");
  if (e > 255) throw Error("exponent exceeds 255");
  const unsigned old = exponent(i);
  std::uint64_t& w = words_[i / 8];
  w &= ~(std::uint64_t{0xff} << shift(i));
  w |= std::uint64_t{e} << shift(i);
  degree_ = degree_ - old + e;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.degree_ = a.degree_ + b.degree_;
  if (out.degree_ <= 255) {
    // No byte can carry into its neighbour.
    for (std::size_t k = 0; k < out.words_.size(); ++k) out.words_[k] = a.words_[k] + b.words_[k];
    return out;
  }
  for (std::size_t i = 0; i < kMaxCoords; ++i) {
    const unsigned e = a.exponent(i) + b.exponent(i);
    if (e > 255) throw Error("exponent exceeds 255");
    if (e) out.words_[i / 8] |= std::uint64_t{e} << Monomial::shift(i);
  }
  return out;
}

std::size_t Monomial::hash() const {
  std::size_t h = degree_;
  for (auto w : words_) h = h * 0x9e3779b97f4a7c15ull ^ (w + (h >> 7));
  return h;
}

namespace {

void canonicalize(std::vector<Term>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.mono > b.mono; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < terms.size();) {
    std::size_t j = i + 1;
    Rat c = std::move(terms[i].coef);
    while (j < terms.size() && terms[j].mono == terms[i].mono) c += terms[j++].coef;
    if (!c.is_zero()) {
      terms[out].mono = terms[i].mono;
      terms[out].coef = std::move(c);
      ++out;
    }
    i = j;
  }
  terms.resize(out);
}

// Merges two canonical term lists, scaling the second by `sign`.
std::vector<Term> merge(std::span<const Term> a, std::span<const Term> b, int sign) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].mono > b[j].mono)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].mono > a[i].mono) {
      out.push_back(sign > 0 ? b[j] : Term{b[j].mono, -b[j].coef});
      ++j;
    } else {
      Rat c = sign > 0 ? a[i].coef + b[j].coef : a[i].coef - b[j].coef;
      if (!c.is_zero()) out.push_back({a[i].mono, std::move(c)});
      ++i;
      ++j;
    }
  }
  return out;
}

const Chart& pick_chart(const Poly& a, const Poly& b) {
  if (!a.chart().valid()) return b.chart();
  if (!b.chart().valid()) return a.chart();
  require_same_chart(a.chart(), b.chart());
  return a.chart();
}

}  // namespace

Poly::Poly(Chart chart, const Rat& constant) : chart_(std::move(chart)) {
  if (!constant.is_zero()) terms_.push_back({Monomial{}, constant});
}

Poly Poly::coordinate(const Chart& chart, std::size_t i) {
  if (i >= chart.dimension()) throw Error("coordinate index out of range for chart '" + chart.name() + "'");
  return monomial(chart, Monomial::variable(i), Rat(1));
}

Poly Poly::coordinate(const Chart& chart, std::string_view name) {
  return coordinate(chart, chart.require_index(name));
}

Poly Poly::monomial(const Chart& chart, const Monomial& m, const Rat& coef) {
  Poly p(chart);
  if (!coef.is_zero()) p.terms_.push_back({m, coef});
  return p;
}

Poly Poly::from_terms(const Chart& chart, std::vector<Term> terms) {
  Poly p(chart);
  canonicalize(terms);
  p.terms_ = std::move(terms);
  return p;
}

Rat Poly::constant_term() const {
  if (!terms_.empty() && terms_.back().mono.is_one()) return terms_.back().coef;
  return Rat(0);
}

bool Poly::depends_on(std::size_t i) const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [i](const Term& t) { return t.mono.exponent(i) != 0; });
}

Poly Poly::operator-() const {
  Poly out(chart_);
  out.terms_.reserve(terms_.size());
  for (const auto& t : terms_) out.terms_.push_back({t.mono, -t.coef});
  return out;
}

Poly& Poly::operator+=(const Poly& rhs) {
  chart_ = pick_chart(*this, rhs);
  if (rhs.terms_.empty()) return *this;
  if (terms_.empty()) {
    terms_ = rhs.terms_;
    return *this;
  }
  terms_ = merge(terms_, rhs.terms_, 1);
  return *this;
}

Poly& Poly::operator-=(const Poly& rhs) {
  chart_ = pick_chart(*this, rhs);
  if (rhs.terms_.empty()) return *this;
  terms_ = merge(terms_, rhs.terms_, -1);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  PolyBuilder builder(pick_chart(a, b));
  builder.add_product(a, b);
  return builder.build();
}

Poly& Poly::operator*=(const Poly& rhs) { return *this = *this * rhs; }

Poly& Poly::operator*=(const Rat& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  if (c.is_one()) return *this;
  for (auto& t : terms_) t.coef *= c;
  return *this;
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  if (a.chart_.valid() && b.chart_.valid() && !(a.chart_ == b.chart_)) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (!(a.terms_[i].mono == b.terms_[i].mono) || !(a.terms_[i].coef == b.terms_[i].coef)) {
      return false;
    }
  }
  return true;
}

Poly Poly::pow(unsigned e) const {
  Poly result(chart_, Rat(1));
  Poly base = *this;
  while (e) {
    if (e & 1u) result *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return result;
}

Poly Poly::derivative(std::size_t i) const {
  if (i >= chart_.dimension()) throw Error("coordinate index out of range for chart '" + chart_.name() + "'");
  Poly out(chart_);
  for (const auto& t : terms_) {
    const unsigned e = t.mono.exponent(i);
    if (e == 0) continue;
    Monomial m = t.mono;
    m.set_exponent(i, e - 1);
    out.terms_.push_back({m, t.coef * Rat(static_cast<std::int64_t>(e))});
  }
  // Lowering one exponent preserves the relative grlex order of the survivors.
  return out;
}

Poly Poly::derivative(std::string_view coord) const { return derivative(chart_.require_index(coord)); }

Rat Poly::evaluate(std::span<const Rat> point) const {
  if (point.size() != chart_.dimension()) {
    throw Error("point has " + std::to_string(point.size()) + " entries, chart '" + chart_.name() +
                "' has dimension " + std::to_string(chart_.dimension()));
  }
  Rat sum(0);
  for (const auto& t : terms_) {
    Rat v = t.coef;
    for (std::size_t i = 0; i < point.size() && !v.is_zero(); ++i) {
      for (unsigned e = t.mono.exponent(i); e > 0; --e) v *= point[i];
    }
    sum += v;
  }
  return sum;
}

std::string monomial_to_string(const Chart& chart, const Monomial& m) {
  if (m.is_one()) return "1";
  std::string out;
  for (std::size_t i = 0; i < chart.dimension(); ++i) {
    const unsigned e = m.exponent(i);
    if (!e) continue;
    if (!out.empty()) out += '*';
    out += chart.coord(i);
    if (e > 1) out += '^' + std::to_string(e);
  }
  return out;
}

std::string Poly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : terms_) {
    const bool neg = t.coef.sign() < 0;
    const Rat mag = neg ? -t.coef : t.coef;
    if (first) {
      if (neg) out += '-';
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;
    if (t.mono.is_one()) {
      out += mag.to_string();
    } else {
      if (!mag.is_one()) out += mag.to_string() + "*";
      out += monomial_to_string(chart_, t.mono);
    }
  }
  return out;
}

void PolyBuilder::add(const Monomial& m, const Rat& c) {
  if (!c.is_zero()) terms_.push_back({m, c});
}

void PolyBuilder::add(const Poly& p) {
  if (p.chart().valid()) require_same_chart(chart_, p.chart());
  terms_.insert(terms_.end(), p.terms().begin(), p.terms().end());
}

void PolyBuilder::add_scaled(const Poly& p, const Rat& c) {
  if (c.is_zero() || p.is_zero()) return;
  require_same_chart(chart_, p.chart());
  for (const auto& t : p.terms()) terms_.push_back({t.mono, t.coef * c});
}

void PolyBuilder::add_product(const Poly& a, const Poly& b, int sign) {
  if (a.is_zero() || b.is_zero()) return;
  require_same_chart(chart_, a.chart());
  require_same_chart(chart_, b.chart());
  terms_.reserve(terms_.size() + a.size() * b.size());
  for (const auto& s : a.terms()) {
    const Rat cs = sign < 0 ? -s.coef : s.coef;
    for (const auto& t : b.terms()) terms_.push_back({s.mono * t.mono, cs * t.coef});
  }
}

bool PolyBuilder::sums_to_zero() {
  canonicalize(terms_);
  return terms_.empty();
}

Poly PolyBuilder::build() {
  Poly p = Poly::from_terms(chart_, std::move(terms_));
  terms_.clear();
  return p;
}

Poly substitute(const Poly& p, std::span<const Poly> images, const Chart& target) {
  const Chart& src = p.chart();
  if (images.size() != src.dimension()) {
    throw Error("incomplete assignment: chart '" + src.name() + "' has " +
                std::to_string(src.dimension()) + " coordinates, " + std::to_string(images.size()) +
                " images given");
  }
  for (const auto& img : images) {
    if (img.chart().valid()) require_same_chart(target, img.chart());
  }
  // powers[i][e] = images[i]^e, filled on demand.
  std::vector<std::vector<Poly>> powers(images.size());
  auto power = [&](std::size_t i, unsigned e) -> const Poly& {
    auto& row = powers[i];
    if (row.empty()) row.emplace_back(target, Rat(1));
    while (row.size() <= e) row.push_back(row.back() * images[i]);
    return row[e];
  };
  PolyBuilder builder(target);
  for (const auto& t : p.terms()) {
    Poly acc(target, t.coef);
    for (std::size_t i = 0; i < src.dimension() && !acc.is_zero(); ++i) {
      const unsigned e = t.mono.exponent(i);
      if (e) acc *= power(i, e);
    }
    builder.add(acc);
  }
  return builder.build();
}

Poly substitute(const Poly& p, std::span<const Poly> images) {
  for (const auto& img : images) {
    if (img.chart().valid()) return substitute(p, images, img.chart());
  }
  throw Error("substitute: no target chart among the images");
}

}  // namespace nambu
