#include "evlnoise/random.hpp"

#include <sodium.h>

#include <array>
#include <vector>

namespace evlnoise {
namespace {

void append_le(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base_seed,
                          std::initializer_list<std::uint64_t> key) {
  // Little-endian serialization keeps the derivation independent of host byte
  // order.
  std::vector<unsigned char> message;
  message.reserve(8 * (key.size() + 1));
  append_le(message, base_seed);
  for (auto word : key) append_le(message, word);

  static const int sodium_ready = sodium_init();
  (void)sodium_ready;

  std::array<unsigned char, 8> digest{};
  crypto_generichash(digest.data(), digest.size(), message.data(), message.size(),
                     nullptr, 0);
  std::uint64_t seed = 0;
  for (int i = 7; i >= 0; --i) seed = (seed << 8) | digest[static_cast<std::size_t>(i)];
  return seed;
}

}  // namespace evlnoise
