// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace webpf {

/// An IPv4 or IPv6 address. IPv4 is stored in the first four bytes.
struct IpAddress {
  bool v6 = false;
  std::array<std::uint8_t, 16> bytes{};

  static std::optional<IpAddress> parse(std::string_view text);
  std::size_t bit_width() const { return v6 ? 128 : 32; }
  friend bool operator==(const IpAddress&, const IpAddress&) = default;
};

class CidrRange {
 public:
  /// "10.1.0.0/16", "2001:db8::/32"; a bare address is a host route.
  /// Throws std::invalid_argument.
  static CidrRange parse(std::string_view text);

  bool contains(const IpAddress& ip) const;
  bool overlaps(const CidrRange& other) const;
  const IpAddress& network() const { return network_; }
  std::size_t prefix_length() const { return prefix_; }
  std::string to_string() const;

 private:
  IpAddress network_;
  std::size_t prefix_ = 0;
};

}  // namespace webpf
