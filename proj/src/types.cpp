#include "vcsim/types.hpp"

#include <charconv>
#include <cstdio>

namespace vcsim {

std::string_view to_string(ItemKind kind) {
  return kind == ItemKind::kProduct ? "product" : "raw";
}

std::string to_string(const Item &item) {
  return (item.is_product() ? "P" : "R") + std::to_string(item.id);
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string format_number(double value) {
  if (value == 0.0)
    return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

} // namespace vcsim
