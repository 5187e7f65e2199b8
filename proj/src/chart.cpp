#include "nambu/chart.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <utility>

#include "nambu/error.hpp"

namespace nambu {

using CoordList = std::vector<std::string>;

struct Chart::Data {
  std::string name;
  const CoordList* coords;
};

namespace {

struct Registry {
  std::mutex mutex;
  std::map<CoordList, std::unique_ptr<CoordList>> coord_lists;
  std::map<std::pair<std::string, const CoordList*>, std::unique_ptr<Chart::Data>> charts;
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

Chart::Chart(std::string name, std::vector<std::string> coords) {
  if (coords.empty()) throw Error("chart '" + name + "' must have at least one coordinate");
  if (coords.size() > kMaxCoords) {
    throw Error("chart '" + name + "' exceeds the supported dimension " +
                std::to_string(kMaxCoords));
  }
  std::set<std::string> seen;
  for (const auto& c : coords) {
    if (c.empty()) throw Error("empty coordinate name in chart '" + name + "'");
    if (!seen.insert(c).second) {
      throw Error("duplicate coordinate '" + c + "' in chart '" + name + "'");
    }
  }
  Registry& reg = registry();
  std::lock_guard lock(reg.mutex);
  auto& list = reg.coord_lists[coords];
  if (!list) list = std::make_unique<CoordList>(std::move(coords));
  auto& data = reg.charts[{name, list.get()}];
  if (!data) data = std::make_unique<Data>(Data{std::move(name), list.get()});
  data_ = data.get();
}

const std::string& Chart::name() const {
  static const std::string kNone = "<none>";
  return data_ ? data_->name : kNone;
}

std::span<const std::string> Chart::coords() const {
  if (!data_) return {};
  return *data_->coords;
}

std::optional<std::size_t> Chart::index_of(std::string_view coord) const {
  const auto cs = coords();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (cs[i] == coord) return i;
  }
  return std::nullopt;
}

std::size_t Chart::require_index(std::string_view coord) const {
  if (auto i = index_of(coord)) return *i;
  throw Error("unknown coordinate '" + std::string(coord) + "' on chart '" + name() + "'");
}

Chart Chart::renamed(std::string name) const {
  return Chart(std::move(name), CoordList(coords().begin(), coords().end()));
}

bool operator==(const Chart& a, const Chart& b) {
  if (a.data_ == b.data_) return true;
  if (!a.data_ || !b.data_) return false;
  return a.data_->coords == b.data_->coords;
}

Chart product_chart(std::span<const Chart> blocks, std::string name,
                    std::vector<std::size_t>* offsets) {
  CoordList coords;
  std::set<std::string> used;
  if (offsets) offsets->clear();
  for (const Chart& block : blocks) {
    if (offsets) offsets->push_back(coords.size());
    for (const auto& c : block.coords()) {
      std::string fresh = c;
      while (used.count(fresh)) fresh += "'";
      used.insert(fresh);
      coords.push_back(std::move(fresh));
    }
  }
  return Chart(std::move(name), std::move(coords));
}

void require_same_chart(const Chart& a, const Chart& b) {
  if (!(a == b)) {
    throw Error("incompatible charts: '" + a.name() + "' vs '" + b.name() + "'");
  }
}

}  // namespace nambu
