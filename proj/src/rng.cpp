#include "forge/rng.hpp"

#include <stdexcept>

namespace forge::rng {

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::string_view> labels) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  for (std::string_view label : labels) {
    std::uint64_t len = label.size();
    char len_bytes[8];
    for (int i = 0; i < 8; ++i) len_bytes[i] = static_cast<char>((len >> (8 * i)) & 0xff);
    h = fnv1a(std::string_view(len_bytes, 8), h);
    h = fnv1a(label, h);
    h = mix64(h);
  }
  return h;
}

std::uint64_t Stream::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

std::uint64_t Stream::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Stream::below: bound must be positive");
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = next();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = next();
      m = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

bool Stream::bernoulli(const Rational& p) {
  if (p.numerator() <= 0) return false;
  if (p.numerator() >= p.denominator()) return true;
  auto den = static_cast<std::uint64_t>(p.denominator());
  return below(den) < static_cast<std::uint64_t>(p.numerator());
}

}  // namespace forge::rng
