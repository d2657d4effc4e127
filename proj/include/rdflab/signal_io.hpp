#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>

#include "rdflab/signal.hpp"

namespace rdflab {

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

inline double parse_double(const std::string& token) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  detail::require(res.ec == std::errc{} && res.ptr == token.data() + token.size(), "bad number '" + token + "'");
  return v;
}

// Text record: N on the first line, then one "re im" pair per line.
inline void write_signal_text(std::ostream& out, const Signal& f) {
  out << f.size() << '\n';
  for (const auto& v : f.values()) out << format_double(v.real()) << ' ' << format_double(v.imag()) << '\n';
}

inline Signal read_signal_text(std::istream& in) {
  std::string token;
  detail::require(static_cast<bool>(in >> token), "signal record is empty");
  const long n = std::stol(token);
  detail::require(n > 0 && is_power_of_two(n), "signal length is not a power of two");
  std::vector<cd> values(static_cast<std::size_t>(n));
  for (auto& v : values) {
    std::string re, im;
    detail::require(static_cast<bool>(in >> re >> im), "signal record truncated");
    v = {parse_double(re), parse_double(im)};
  }
  return Signal(std::move(values));
}

namespace detail {

inline void put_u64_le(std::ostream& out, std::uint64_t x) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((x >> (8 * i)) & 0xff);
  out.write(b.data(), 8);
}

inline std::uint64_t get_u64_le(std::istream& in) {
  std::array<unsigned char, 8> b{};
  in.read(reinterpret_cast<char*>(b.data()), 8);
  require(in.gcount() == 8, "binary signal record truncated");
  std::uint64_t x = 0;
  for (int i = 7; i >= 0; --i) x = (x << 8) | b[static_cast<std::size_t>(i)];
  return x;
}

}  // namespace detail

// Binary record: N as little-endian uint64, then N (re, im) little-endian float64 pairs.
inline void write_signal_binary(std::ostream& out, const Signal& f) {
  detail::put_u64_le(out, static_cast<std::uint64_t>(f.size()));
  for (const auto& v : f.values()) {
    detail::put_u64_le(out, std::bit_cast<std::uint64_t>(v.real()));
    detail::put_u64_le(out, std::bit_cast<std::uint64_t>(v.imag()));
  }
}

inline Signal read_signal_binary(std::istream& in) {
  const auto n = detail::get_u64_le(in);
  detail::require(n > 0 && n <= (1u << 30) && is_power_of_two(static_cast<std::int64_t>(n)),
                  "binary signal length is not a power of two");
  std::vector<cd> values(n);
  for (auto& v : values) {
    const double re = std::bit_cast<double>(detail::get_u64_le(in));
    const double im = std::bit_cast<double>(detail::get_u64_le(in));
    v = {re, im};
  }
  return Signal(std::move(values));
}

}  // namespace rdflab
