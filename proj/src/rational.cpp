#include "nambu/rational.hpp"

#include <limits>
#include <ostream>

#include "nambu/error.hpp"

namespace nambu {
namespace {

using u128 = unsigned __int128;

u128 abs128(__int128 v) { return v < 0 ? u128(-(v + 1)) + 1 : u128(v); }

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits64(__int128 v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

mpz_class to_mpz(__int128 v) {
  const bool neg = v < 0;
  u128 mag = abs128(v);
  mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(mag >> 64)));
  mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(mag)));
  mpz_class out = (hi << 64) + lo;
  return neg ? mpz_class(-out) : out;
}

bool mpz_fits64(const mpz_class& z) { return z.fits_slong_p(); }

}  // namespace

Rat::Rat(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error("division by zero in rational literal");
  normalize_small(num, den);
}

Rat::Rat(const mpq_class& value) { assign_big(value); }

Rat::Rat(const Rat& other) : num_(other.num_), den_(other.den_) {
  if (other.big_) big_ = std::make_unique<mpq_class>(*other.big_);
}

Rat& Rat::operator=(const Rat& other) {
  if (this == &other) return *this;
  num_ = other.num_;
  den_ = other.den_;
  big_ = other.big_ ? std::make_unique<mpq_class>(*other.big_) : nullptr;
  return *this;
}

Rat Rat::parse(std::string_view text) {
  std::string s(text);
  mpq_class q;
  if (q.set_str(s, 10) != 0 || s.empty()) {
    throw Error("malformed rational literal '" + s + "'");
  }
  if (q.get_den() == 0) throw Error("division by zero in rational literal");
  q.canonicalize();
  return Rat(q);
}

void Rat::normalize_small(__int128 num, __int128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  u128 g = gcd128(abs128(num), u128(den));
  if (g > 1) {
    num /= static_cast<__int128>(g);
    den /= static_cast<__int128>(g);
  }
  if (fits64(num) && fits64(den)) {
    big_.reset();
    num_ = static_cast<std::int64_t>(num);
    den_ = static_cast<std::int64_t>(den);
    return;
  }
  mpq_class q;
  q.get_num() = to_mpz(num);
  q.get_den() = to_mpz(den);
  num_ = 0;
  den_ = 1;
  big_ = std::make_unique<mpq_class>(std::move(q));
}

void Rat::assign_big(mpq_class value) {
  const mpz_class& n = value.get_num();
  const mpz_class& d = value.get_den();
  if (mpz_fits64(n) && mpz_fits64(d)) {
    big_.reset();
    num_ = n.get_si();
    den_ = d.get_si();
    return;
  }
  num_ = 0;
  den_ = 1;
  big_ = std::make_unique<mpq_class>(std::move(value));
}

bool Rat::is_integer() const { return big_ ? big_->get_den() == 1 : den_ == 1; }

int Rat::sign() const {
  if (big_) return sgn(*big_);
  return (num_ > 0) - (num_ < 0);
}

mpq_class Rat::to_mpq() const {
  if (big_) return *big_;
  mpq_class q;
  q.get_num() = mpz_class(static_cast<long>(num_));
  q.get_den() = mpz_class(static_cast<long>(den_));
  return q;
}

std::string Rat::to_string() const {
  if (big_) return big_->get_str(10);
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::string Rat::numerator_string() const {
  return big_ ? big_->get_num().get_str(10) : std::to_string(num_);
}

std::string Rat::denominator_string() const {
  return big_ ? big_->get_den().get_str(10) : std::to_string(den_);
}

Rat Rat::operator-() const {
  Rat out;
  if (big_) {
    out.assign_big(-*big_);
  } else {
    out.normalize_small(-static_cast<__int128>(num_), den_);
  }
  return out;
}

Rat& Rat::operator+=(const Rat& rhs) {
  if (!big_ && !rhs.big_) {
    if (den_ == 1 && rhs.den_ == 1) {
      std::int64_t r;
      if (!__builtin_add_overflow(num_, rhs.num_, &r)) {
        num_ = r;
        return *this;
      }
    }
    const __int128 n = static_cast<__int128>(num_) * rhs.den_ +
                       static_cast<__int128>(rhs.num_) * den_;
    const __int128 d = static_cast<__int128>(den_) * rhs.den_;
    normalize_small(n, d);
    return *this;
  }
  assign_big(to_mpq() + rhs.to_mpq());
  return *this;
}

Rat& Rat::operator-=(const Rat& rhs) {
  if (!big_ && !rhs.big_) {
    if (den_ == 1 && rhs.den_ == 1) {
      std::int64_t r;
      if (!__builtin_sub_overflow(num_, rhs.num_, &r)) {
        num_ = r;
        return *this;
      }
    }
    const __int128 n = static_cast<__int128>(num_) * rhs.den_ -
                       static_cast<__int128>(rhs.num_) * den_;
    const __int128 d = static_cast<__int128>(den_) * rhs.den_;
    normalize_small(n, d);
    return *this;
  }
  assign_big(to_mpq() - rhs.to_mpq());
  return *this;
}

Rat& Rat::operator*=(const Rat& rhs) {
  if (!big_ && !rhs.big_) {
    if (den_ == 1 && rhs.den_ == 1) {
      std::int64_t r;
      if (!__builtin_mul_overflow(num_, rhs.num_, &r)) {
        num_ = r;
        return *this;
      }
    }
    const __int128 n = static_cast<__int128>(num_) * rhs.num_;
    const __int128 d = static_cast<__int128>(den_) * rhs.den_;
    normalize_small(n, d);
    return *this;
  }
  assign_big(to_mpq() * rhs.to_mpq());
  return *this;
}

Rat& Rat::operator/=(const Rat& rhs) {
  if (rhs.is_zero()) throw Error("division by zero");
  if (!big_ && !rhs.big_) {
    const __int128 n = static_cast<__int128>(num_) * rhs.den_;
    const __int128 d = static_cast<__int128>(den_) * rhs.num_;
    normalize_small(n, d);
    return *this;
  }
  assign_big(to_mpq() / rhs.to_mpq());
  return *this;
}

bool operator==(const Rat& a, const Rat& b) {
  if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
  if (a.big_ && b.big_) return *a.big_ == *b.big_;
  return false;  // a promoted value never fits the inline form
}

std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
  if (!a.big_ && !b.big_) {
    const __int128 l = static_cast<__int128>(a.num_) * b.den_;
    const __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l <=> r;
  }
  const int c = cmp(a.to_mpq(), b.to_mpq());
  return c <=> 0;
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.to_string(); }

}  // namespace nambu
