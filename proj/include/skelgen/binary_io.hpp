#pragma once

#include <bit>
#include <type_traits>
#include <utility>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

// Little-endian scalar helpers shared by the binary file formats.
namespace skelgen::binary {

template <typename T>
void write_le(std::ostream& os, T value) {
    static_assert(std::is_arithmetic_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
            std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
        }
    }
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream& is, const char* what) {
    static_assert(std::is_arithmetic_v<T>);
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
        throw std::runtime_error(std::string("unexpected end of file while reading ") + what);
    }
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
            std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
        }
    }
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

inline void write_string(std::ostream& os, const std::string& s) {
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& is, const char* what, std::uint32_t max_len = 1u << 24) {
    const auto n = read_le<std::uint32_t>(is, what);
    if (n > max_len) {
        throw std::runtime_error(std::string("implausible string length while reading ") + what);
    }
    std::string s(n, '\0');
    if (n > 0 && !is.read(s.data(), n)) {
        throw std::runtime_error(std::string("unexpected end of file while reading ") + what);
    }
    return s;
}

}  // namespace skelgen::binary
