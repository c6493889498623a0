#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace sparsemine {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

/// 64-bit FNV-1a. Pass the previous result as `state` to hash incrementally.
inline std::uint64_t fnv1a64(std::span<const std::byte> bytes, std::uint64_t state = kFnvOffset) {
  for (std::byte b : bytes) {
    state ^= static_cast<std::uint64_t>(b);
    state *= kFnvPrime;
  }
  return state;
}

inline std::uint64_t fnv1a64(std::string_view text, std::uint64_t state = kFnvOffset) {
  return fnv1a64(std::as_bytes(std::span(text.data(), text.size())), state);
}

}  // namespace sparsemine
