// SPDX-License-Identifier: Apache-2.0
#include "webpf/cidr.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace webpf {

namespace {

bool prefix_equal(const IpAddress& a, const IpAddress& b, std::size_t bits) {
  for (std::size_t i = 0; i < bits / 8; ++i) {
    if (a.bytes[i] != b.bytes[i]) return false;
  }
  if (const std::size_t rem = bits % 8; rem != 0) {
    const auto mask = static_cast<std::uint8_t>(0xFF << (8 - rem));
    if ((a.bytes[bits / 8] & mask) != (b.bytes[bits / 8] & mask)) return false;
  }
  return true;
}

}  // namespace

std::optional<IpAddress> IpAddress::parse(std::string_view text) {
  const std::string s(text);
  IpAddress ip;
  if (inet_pton(AF_INET, s.c_str(), ip.bytes.data()) == 1) return ip;
  ip.v6 = true;
  if (inet_pton(AF_INET6, s.c_str(), ip.bytes.data()) == 1) return ip;
  return std::nullopt;
}

CidrRange CidrRange::parse(std::string_view text) {
  const auto slash = text.find('/');
  const auto ip = IpAddress::parse(text.substr(0, slash));
  if (!ip) throw std::invalid_argument("invalid CIDR address '" + std::string(text) + "'");
  CidrRange r;
  r.network_ = *ip;
  r.prefix_ = ip->bit_width();
  if (slash != std::string_view::npos) {
    const auto len = text.substr(slash + 1);
    auto [p, ec] = std::from_chars(len.data(), len.data() + len.size(), r.prefix_);
    if (len.empty() || ec != std::errc{} || p != len.data() + len.size() || r.prefix_ > ip->bit_width()) {
      throw std::invalid_argument("invalid CIDR prefix length in '" + std::string(text) + "'");
    }
  }
  // Zero host bits.
  for (std::size_t bit = r.prefix_; bit < r.network_.bit_width(); ++bit) {
    r.network_.bytes[bit / 8] &= static_cast<std::uint8_t>(~(0x80 >> (bit % 8)));
  }
  return r;
}

bool CidrRange::contains(const IpAddress& ip) const {
  return ip.v6 == network_.v6 && prefix_equal(ip, network_, prefix_);
}

bool CidrRange::overlaps(const CidrRange& other) const {
  return network_.v6 == other.network_.v6 &&
         prefix_equal(network_, other.network_, std::min(prefix_, other.prefix_));
}

std::string CidrRange::to_string() const {
  char buf[INET6_ADDRSTRLEN] = {};
  inet_ntop(network_.v6 ? AF_INET6 : AF_INET, network_.bytes.data(), buf, sizeof buf);
  return std::string(buf) + "/" + std::to_string(prefix_);
}

}  // namespace webpf
