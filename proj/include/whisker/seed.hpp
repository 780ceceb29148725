#pragma once

// Seed fan-out and content hashing, both on SHA-256.

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <openssl/sha.h>

#include "whisker/errors.hpp"

namespace whisker {

using Sha256Digest = std::array<unsigned char, SHA256_DIGEST_LENGTH>;

inline Sha256Digest sha256(std::string_view bytes) {
  Sha256Digest out{};
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), out.data());
  return out;
}

inline std::string to_hex(const Sha256Digest& digest) {
  std::string hex;
  hex.reserve(2 * digest.size());
  char buf[3];
  for (unsigned char b : digest) {
    std::snprintf(buf, sizeof buf, "%02x", b);
    hex += buf;
  }
  return hex;
}

inline std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "' for hashing");
  std::ostringstream ss;
  ss << in.rdbuf();
  return to_hex(sha256(ss.str()));
}

/// Child seed for one purpose: first 8 bytes (big-endian) of
/// SHA-256(master as 8 little-endian bytes || purpose). Independent purposes
/// never share a stream, so adding a new purpose leaves the others unchanged.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose) {
  std::string msg(8, '\0');
  for (int i = 0; i < 8; ++i) msg[i] = static_cast<char>((master >> (8 * i)) & 0xffu);
  msg.append(purpose);
  const Sha256Digest d = sha256(msg);
  std::uint64_t seed = 0;
  for (int i = 0; i < 8; ++i) seed = (seed << 8) | d[i];
  return seed;
}

}  // namespace whisker
