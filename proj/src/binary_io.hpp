#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace aia::detail {

template <class T>
void write_pod(std::ostream& out, const T& value) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_pod(std::istream& in) {
  static_assert(std::is_trivially_copyable_v<T>);
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("unexpected end of model stream");
  return value;
}

inline void write_doubles(std::ostream& out, const std::vector<double>& values) {
  write_pod<std::uint64_t>(out, values.size());
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
}

inline std::vector<double> read_doubles(std::istream& in, std::uint64_t max_size) {
  const auto size = read_pod<std::uint64_t>(in);
  if (size > max_size) throw std::runtime_error("corrupt model stream: array too large");
  std::vector<double> values(size);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(size * sizeof(double)));
  if (!in) throw std::runtime_error("unexpected end of model stream");
  return values;
}

inline void write_magic(std::ostream& out, std::string_view magic, std::uint32_t version) {
  out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
  write_pod(out, version);
}

inline void expect_magic(std::istream& in, std::string_view magic, std::uint32_t version) {
  std::string got(magic.size(), '\0');
  in.read(got.data(), static_cast<std::streamsize>(got.size()));
  if (!in || got != magic) {
    throw std::runtime_error("not a " + std::string(magic) + " stream");
  }
  const auto v = read_pod<std::uint32_t>(in);
  if (v != version) {
    throw std::runtime_error(std::string(magic) + " version " + std::to_string(v) +
                             " is not supported (expected " + std::to_string(version) + ")");
  }
}

}  // namespace aia::detail
