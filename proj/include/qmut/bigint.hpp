#pragma once

#include <cstdint>
#include <iterator>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace qmut {

/// Signed arbitrary-precision integer used for exchange-matrix entries and
/// arrow multiplicities.
using Multiplicity = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline int sign(const Multiplicity& v) { return v.sign(); }

/// Parses a base-10 integer with an optional leading '-'. Returns false on any
/// malformed input instead of throwing.
inline bool parse_decimal(std::string_view text, Multiplicity& out) {
  if (text.empty()) return false;
  std::size_t pos = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  if (pos == text.size()) return false;
  Multiplicity value = 0;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c < '0' || c > '9') return false;
    value *= 10;
    value += c - '0';
  }
  out = negative ? Multiplicity(-value) : value;
  return true;
}

inline std::string to_decimal(const Multiplicity& v) { return v.str(); }

/// Appends a self-delimiting byte encoding of `v`: one sign byte
/// (0 = zero, 1 = positive, 2 = negative), a 4-byte big-endian length, then
/// the big-endian magnitude. Equal values always encode to equal bytes.
inline void append_encoded(std::string& out, const Multiplicity& v) {
  const int s = v.sign();
  out.push_back(static_cast<char>(s == 0 ? 0 : (s > 0 ? 1 : 2)));
  std::vector<unsigned char> mag;
  if (s != 0) {
    const Multiplicity magnitude = boost::multiprecision::abs(v);
    boost::multiprecision::export_bits(magnitude, std::back_inserter(mag), 8, true);
  }
  const auto len = static_cast<std::uint32_t>(mag.size());
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((len >> shift) & 0xFF));
  out.append(mag.begin(), mag.end());
}

inline std::string to_hex(std::string_view bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    hex.push_back(digits[c >> 4]);
    hex.push_back(digits[c & 0xF]);
  }
  return hex;
}

/// 2^64, the default multiplicity ceiling for searches.
inline Multiplicity two_pow_64() { return Multiplicity(1) << 64; }

/// Rounds an exact rational to the nearest double.
inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace qmut
