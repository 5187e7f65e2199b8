#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nambu {

/// Largest chart dimension supported by the packed monomial/multi-index
/// representations.
inline constexpr std::size_t kMaxCoords = 32;

/// A polynomial coordinate chart: an ordered list of distinct coordinate
/// names. Charts are interned, so copies are a pointer and structural
/// equality (same ordered coordinates) is a pointer comparison.
class Chart {
 public:
  Chart() = default;
  Chart(std::string name, std::vector<std::string> coords);

  bool valid() const { return data_ != nullptr; }
  const std::string& name() const;
  std::span<const std::string> coords() const;
  std::size_t dimension() const { return data_ ? coords().size() : 0; }
  const std::string& coord(std::size_t i) const { return coords()[i]; }

  std::optional<std::size_t> index_of(std::string_view coord) const;
  /// Like index_of but throws `Error` naming the chart.
  std::size_t require_index(std::string_view coord) const;

  /// Same chart with a different display name (identity unchanged).
  Chart renamed(std::string name) const;

  friend bool operator==(const Chart& a, const Chart& b);

  struct Data;

 private:
  explicit Chart(const Data* data) : data_(data) {}
  const Data* data_ = nullptr;
};

/// Concatenates charts; a coordinate that collides with an earlier one is
/// primed (`x` -> `x'`, and again if needed) until it is unique.
/// `offsets[i]` receives the position of block i's first coordinate.
Chart product_chart(std::span<const Chart> blocks, std::string name,
                    std::vector<std::size_t>* offsets = nullptr);

/// Throws `Error("incompatible charts")` unless a == b.
void require_same_chart(const Chart& a, const Chart& b);

}  // namespace nambu
