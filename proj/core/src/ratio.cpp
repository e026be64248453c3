// SPDX-License-Identifier: Apache-2.0
#include "webpf/ratio.hpp"

#include <charconv>
#include <numeric>
#include <stdexcept>

namespace webpf {

namespace {

__extension__ typedef unsigned __int128 u128;

std::uint64_t parse_u64(std::string_view s, std::string_view whole) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
    throw std::invalid_argument("invalid ratio: '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

Ratio::Ratio(std::uint64_t num, std::uint64_t den) : num_(num), den_(den) {
  if (den == 0) throw std::invalid_argument("ratio with zero denominator");
}

Ratio Ratio::reduced() const {
  const std::uint64_t g = std::gcd(num_, den_);
  return g == 0 ? Ratio{0, 1} : Ratio{num_ / g, den_ / g};
}

std::string Ratio::to_string() const { return std::to_string(num_) + "/" + std::to_string(den_); }

Ratio Ratio::parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Ratio{parse_u64(text.substr(0, slash), text), parse_u64(text.substr(slash + 1), text)};
  }
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return Ratio{parse_u64(text, text), 1};
  std::string_view whole = text.substr(0, dot);
  std::string_view frac = text.substr(dot + 1);
  if (frac.empty() || frac.size() > 18) throw std::invalid_argument("invalid ratio: '" + std::string(text) + "'");
  std::uint64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  const std::uint64_t w = whole.empty() ? 0 : parse_u64(whole, text);
  const std::uint64_t f = parse_u64(frac, text);
  return Ratio{w * den + f, den};
}

bool operator==(const Ratio& a, const Ratio& b) {
  return static_cast<u128>(a.num_) * b.den_ == static_cast<u128>(b.num_) * a.den_;
}

std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
  return static_cast<u128>(a.num_) * b.den_ <=> static_cast<u128>(b.num_) * a.den_;
}

}  // namespace webpf
