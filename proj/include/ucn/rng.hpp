// Seedable RNG with purpose-derived substreams.
//
// All randomness in the simulator flows through one master seed. Substreams
// are derived by hashing a purpose label (and an optional index) into the
// seed, so layout generation, exploration, replay sampling and quit orders
// stay independently reproducible no matter which of them run.
//
// Draws are hand-rolled on top of mt19937_64 instead of <random>
// distributions because distribution output is implementation-defined and
// tests freeze exact values.

#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ucn {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

  // Substream for an independent purpose. Does not consume generator state.
  Rng derive(std::string_view purpose, std::uint64_t index = 0) const {
    std::uint64_t s = seed_ ^ fnv1a64(purpose);
    s = splitmix64(s + index * 0x9e3779b97f4a7c15ULL);
    return Rng(s);
  }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1), 53-bit mantissa.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n). Lemire's multiply-with-rejection.
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("Rng::uniform_int: n must be > 0");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t threshold = (-bound) % bound;
    for (;;) {
      const std::uint64_t x = gen_();
      const __uint128_t m = static_cast<__uint128_t>(x) * bound;
      if (static_cast<std::uint64_t>(m) >= threshold)
        return static_cast<int>(m >> 64);
    }
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i)
      std::swap(v[i], v[static_cast<std::size_t>(uniform_int(i + 1))]);
  }

  std::vector<int> permutation(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    shuffle(p);
    return p;
  }

  // Floyd's without-replacement sample of k indices from [0, n),
  // returned in ascending order.
  std::vector<int> sample_indices(int n, int k) {
    if (k > n) throw std::invalid_argument("Rng::sample_indices: k > n");
    std::vector<bool> chosen(static_cast<std::size_t>(n), false);
    for (int j = n - k; j < n; ++j) {
      const int t = uniform_int(j + 1);
      if (chosen[static_cast<std::size_t>(t)])
        chosen[static_cast<std::size_t>(j)] = true;
      else
        chosen[static_cast<std::size_t>(t)] = true;
    }
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i)
      if (chosen[static_cast<std::size_t>(i)]) out.push_back(i);
    return out;
  }

  std::uint64_t seed() const { return seed_; }

  // Textual engine state, exact round trip.
  std::string state() const {
    std::ostringstream os;
    os << seed_ << ' ' << gen_;
    return os.str();
  }

  void set_state(const std::string& s) {
    std::istringstream is(s);
    if (!(is >> seed_ >> gen_))
      throw std::runtime_error("Rng::set_state: malformed state string");
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace ucn
