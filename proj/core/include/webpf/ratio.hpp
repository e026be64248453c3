// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace webpf {

/// Exact non-negative rational. Numerator and denominator are kept as given
/// (not reduced) so that a confidence can be checked against the counts it
/// came from; comparisons are by value.
class Ratio {
 public:
  constexpr Ratio() = default;
  Ratio(std::uint64_t num, std::uint64_t den);

  std::uint64_t num() const { return num_; }
  std::uint64_t den() const { return den_; }

  Ratio reduced() const;
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Same numerator and denominator, not just the same value.
  bool identical(const Ratio& other) const { return num_ == other.num_ && den_ == other.den_; }

  /// "num/den".
  std::string to_string() const;

  /// Accepts "n/d", an integer, or a plain decimal such as "0.65" (converted
  /// exactly to 65/100).
  static Ratio parse(std::string_view text);

  friend bool operator==(const Ratio& a, const Ratio& b);
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b);

 private:
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
};

}  // namespace webpf
