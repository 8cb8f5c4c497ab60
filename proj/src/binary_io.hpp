#pragma once

// Little-endian primitive I/O shared by the index and embedding formats.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "leser/error.hpp"

namespace leser::detail {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

template <typename T>
    requires std::is_arithmetic_v<T>
void write_le(std::ostream& out, T value) {
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    out.write(bytes.data(), bytes.size());
}

template <typename T>
    requires std::is_arithmetic_v<T>
bool read_le(std::istream& in, T& value) {
    std::array<char, sizeof(T)> bytes;
    if (!in.read(bytes.data(), bytes.size())) {
        return false;
    }
    std::memcpy(&value, bytes.data(), sizeof(T));
    return true;
}

inline bool read_bytes(std::istream& in, std::string& out, std::size_t n) {
    out.resize(n);
    return n == 0 || static_cast<bool>(in.read(out.data(), static_cast<std::streamsize>(n)));
}

inline void write_short_string(std::ostream& out, const std::string& s) {
    if (s.size() > UINT16_MAX) {
        throw InvalidArgument("string longer than 65535 bytes: " + s.substr(0, 32) + "...");
    }
    write_le<std::uint16_t>(out, static_cast<std::uint16_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline bool read_short_string(std::istream& in, std::string& s) {
    std::uint16_t len = 0;
    return read_le(in, len) && read_bytes(in, s, len);
}

}  // namespace leser::detail
