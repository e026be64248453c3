// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace webpf {

/// Dense id of an interned, normalized resource string.
struct PageId {
  std::uint32_t value = 0;
  friend auto operator<=>(const PageId&, const PageId&) = default;
};

/// An ordered run of page visits (a transaction, a rule head or tail).
using Sequence = std::vector<PageId>;

/// Bijective resource <-> PageId table. Ids are assigned in first-seen order,
/// so the mapping is stable for a given input order.
class PageTable {
 public:
  PageId intern(std::string_view resource);
  std::optional<PageId> find(std::string_view resource) const;
  const std::string& name(PageId id) const;
  std::size_t size() const { return names_.size(); }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> ids_;
};

}  // namespace webpf

template <>
struct std::hash<webpf::PageId> {
  std::size_t operator()(const webpf::PageId& id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
