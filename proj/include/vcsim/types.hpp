#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace vcsim {

/// Simulation time, in hours.
using Hours = double;

/// Boxes for finished goods, kilograms for raw materials.
using Quantity = double;

using OrderId = std::int64_t;

/// Name of a chain participant ("retailer", "firm", "supplier2", ...).
struct ActorId {
  std::string value;

  ActorId() = default;
  ActorId(std::string v) : value(std::move(v)) {}
  ActorId(const char *v) : value(v) {}

  bool empty() const noexcept { return value.empty(); }
  const std::string &str() const noexcept { return value; }

  friend auto operator<=>(const ActorId &, const ActorId &) = default;
  friend bool operator==(const ActorId &, const ActorId &) = default;
};

enum class ItemKind : std::uint8_t { kProduct, kRaw };

/// A stock-keeping unit: finished product `P<id>` or raw material `R<id>`.
struct Item {
  ItemKind kind = ItemKind::kProduct;
  int id = 0;

  static constexpr Item product(int id) { return Item{ItemKind::kProduct, id}; }
  static constexpr Item raw(int id) { return Item{ItemKind::kRaw, id}; }

  bool is_product() const noexcept { return kind == ItemKind::kProduct; }
  bool is_raw() const noexcept { return kind == ItemKind::kRaw; }

  friend auto operator<=>(const Item &, const Item &) = default;
  friend bool operator==(const Item &, const Item &) = default;
};

std::string to_string(const Item &item);
std::string_view to_string(ItemKind kind);

/// 64-bit FNV-1a; used for trace payload digests, scenario digests and
/// substream seeding. Not a security primitive.
constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t hash = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value);

/// Shortest round-trip decimal rendering of a double.
std::string format_number(double value);

} // namespace vcsim

template <> struct std::hash<vcsim::ActorId> {
  std::size_t operator()(const vcsim::ActorId &a) const noexcept {
    return std::hash<std::string>{}(a.value);
  }
};
