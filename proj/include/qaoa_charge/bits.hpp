// Copyright 2026 The qaoa-charge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace qcharge {

/// Binary assignment indexed by variable/qubit: b[i] is variable i.
using BitVector = std::vector<std::uint8_t>;

/// Text rendering convention for bitstrings and Pauli strings.
///   device:   rightmost character is qubit 0
///   variable: leftmost character is qubit 0
enum class BitOrder { device, variable };

inline std::string to_string(BitOrder order) {
  return order == BitOrder::device ? "device" : "variable";
}

inline BitOrder parse_bit_order(std::string_view text) {
  if (text == "device") return BitOrder::device;
  if (text == "variable") return BitOrder::variable;
  throw ValidationError("unknown bit order '" + std::string(text) + "'");
}

/// Bits of a basis index: bit i of m is b_i.
inline BitVector bits_of_index(std::uint64_t m, std::size_t n) {
  BitVector b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>((m >> i) & 1U);
  return b;
}

inline std::uint64_t index_of_bits(const BitVector& b) {
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i]) m |= std::uint64_t{1} << i;
  }
  return m;
}

inline std::string render_bits(const BitVector& b, BitOrder order) {
  std::string s(b.size(), '0');
  const std::size_t n = b.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t pos = order == BitOrder::device ? n - 1 - i : i;
    s[pos] = b[i] ? '1' : '0';
  }
  return s;
}

inline std::string render_index(std::uint64_t m, std::size_t n, BitOrder order) {
  return render_bits(bits_of_index(m, n), order);
}

inline BitVector parse_bits(std::string_view s, BitOrder order) {
  const std::size_t n = s.size();
  BitVector b(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const char c = s[pos];
    if (c != '0' && c != '1') {
      throw ValidationError("bitstring '" + std::string(s) + "' contains '" + c + "'");
    }
    const std::size_t i = order == BitOrder::device ? n - 1 - pos : pos;
    b[i] = c == '1' ? 1 : 0;
  }
  return b;
}

/// Re-renders a bitstring given in one order into the other.
inline std::string convert_bitstring(std::string_view s, BitOrder from, BitOrder to) {
  if (from == to) return std::string(s);
  return std::string(s.rbegin(), s.rend());
}

inline void require_binary(const BitVector& b, std::size_t n) {
  detail::require(b.size() == n, "bit vector has length " + std::to_string(b.size()) +
                                      ", expected " + std::to_string(n));
  for (auto v : b) detail::require(v == 0 || v == 1, "bit vector entry is not 0/1");
}

}  // namespace qcharge
