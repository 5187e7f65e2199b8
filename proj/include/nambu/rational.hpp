#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace nambu {

/// Exact rational number in lowest terms with a positive denominator.
///
/// Values that fit in 64-bit numerator/denominator are kept inline; anything
/// larger is promoted to a GMP rational. Both representations are canonical,
/// so equality never depends on which one a value happens to use.
class Rat {
 public:
  Rat() = default;
  Rat(std::int64_t value) : num_(value) {}  // NOLINT(google-explicit-constructor)
  Rat(std::int64_t num, std::int64_t den);
  explicit Rat(const mpq_class& value);

  Rat(const Rat& other);
  Rat(Rat&& other) noexcept = default;
  Rat& operator=(const Rat& other);
  Rat& operator=(Rat&& other) noexcept = default;
  ~Rat() = default;

  /// Parses `p`, `-p` or `p/q` (decimal integers, q != 0).
  static Rat parse(std::string_view text);

  bool is_zero() const { return !big_ && num_ == 0; }
  bool is_one() const { return !big_ && num_ == 1 && den_ == 1; }
  bool is_integer() const;
  int sign() const;

  mpq_class to_mpq() const;
  std::string to_string() const;

  Rat operator-() const;
  Rat& operator+=(const Rat& rhs);
  Rat& operator-=(const Rat& rhs);
  Rat& operator*=(const Rat& rhs);
  Rat& operator/=(const Rat& rhs);

  friend Rat operator+(Rat lhs, const Rat& rhs) { return lhs += rhs; }
  friend Rat operator-(Rat lhs, const Rat& rhs) { return lhs -= rhs; }
  friend Rat operator*(Rat lhs, const Rat& rhs) { return lhs *= rhs; }
  friend Rat operator/(Rat lhs, const Rat& rhs) { return lhs /= rhs; }

  friend bool operator==(const Rat& a, const Rat& b);
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b);

  /// Numerator and denominator as decimal strings (denominator > 0).
  std::string numerator_string() const;
  std::string denominator_string() const;

 private:
  void assign_big(mpq_class value);
  void normalize_small(__int128 num, __int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::unique_ptr<mpq_class> big_;
};

std::ostream& operator<<(std::ostream& os, const Rat& r);

}  // namespace nambu
