#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace va {

/// Raised when an argument lies outside the domain of an operation
/// (n = 0 networks, p <= 0.5 bounds, D >= |S| for MDS, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An identified natural-language string taking part in a sort or clustering run.
struct Item {
  std::string id;
  std::string text;

  Item() = default;
  Item(std::string id_, std::string text_);

  friend bool operator==(const Item&, const Item&) = default;
};

/// The natural-language comparison criterion interpolated into every prompt.
class Criteria {
 public:
  explicit Criteria(std::string text);

  const std::string& text() const noexcept { return text_; }

  /// Stable 64-bit digest of the text, used in cache keys.
  std::uint64_t digest() const noexcept { return digest_; }

 private:
  std::string text_;
  std::uint64_t digest_;
};

/// FNV-1a over raw bytes. Stable across platforms and runs.
constexpr std::uint64_t fnv1a(std::string_view bytes,
                              std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive combination of two hashes.
constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) noexcept {
  return splitmix64(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

/// Maps a uniform 64-bit word to [0, bound) by multiply-shift. Unlike
/// uniform_int_distribution this gives the same stream on every standard library.
constexpr std::uint64_t bounded_draw(std::uint64_t word, std::uint64_t bound) noexcept {
  __extension__ using u128 = unsigned __int128;
  return static_cast<std::uint64_t>((static_cast<u128>(word) * bound) >> 64);
}

std::string to_hex(std::uint64_t v);

}  // namespace va
