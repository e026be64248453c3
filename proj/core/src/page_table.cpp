// SPDX-License-Identifier: Apache-2.0
#include "webpf/page_table.hpp"

#include <stdexcept>

namespace webpf {

PageId PageTable::intern(std::string_view resource) {
  if (auto it = ids_.find(resource); it != ids_.end()) return PageId{it->second};
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(resource);
  ids_.emplace(names_.back(), id);
  return PageId{id};
}

std::optional<PageId> PageTable::find(std::string_view resource) const {
  if (auto it = ids_.find(resource); it != ids_.end()) return PageId{it->second};
  return std::nullopt;
}

const std::string& PageTable::name(PageId id) const {
  if (id.value >= names_.size()) throw std::out_of_range("unknown page id " + std::to_string(id.value));
  return names_[id.value];
}

}  // namespace webpf
