#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hypolib {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a; turns a purpose tag into a stream selector.
constexpr std::uint64_t tag_hash(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Independent generator for (seed, purpose, index); no global state.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) {
  return std::mt19937_64(splitmix64(splitmix64(seed ^ tag_hash(tag)) + index));
}

}  // namespace hypolib
