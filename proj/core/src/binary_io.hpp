// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

// Little-endian primitives shared by the binary file formats.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string_view>

#include "cubeprog/error.hpp"

namespace cubeprog::detail {

inline void putU32(std::ostream& os, std::uint32_t v) {
  const char bytes[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
                         char((v >> 24) & 0xff)};
  os.write(bytes, 4);
}

inline void putF32(std::ostream& os, float f) { putU32(os, std::bit_cast<std::uint32_t>(f)); }

inline void putMagic(std::ostream& os, std::string_view magic) {
  os.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

inline std::uint32_t getU32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw FormatError("unexpected end of file");
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

inline float getF32(std::istream& is) { return std::bit_cast<float>(getU32(is)); }

inline void expectMagic(std::istream& is, std::string_view magic) {
  char buf[8] = {};
  if (!is.read(buf, static_cast<std::streamsize>(magic.size())) ||
      std::string_view(buf, magic.size()) != magic)
    throw FormatError("bad magic, expected '" + std::string(magic) + "'");
}

}  // namespace cubeprog::detail
