#ifndef IPS_RNG_HPP
#define IPS_RNG_HPP

#include <cmath>
#include <cstdint>

namespace ips {

// Splitmix64 generator. Self-contained so that streams are identical across
// platforms and standard library versions; replica streams are derived from
// a master seed by a counter (split()).
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0,1]; safe as a log() argument.
  double uniform_pos() { return ((next_u64() >> 11) + 1) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  // Uniform integer in [0, n).
  uint64_t below(uint64_t n) { return next_u64() % n; }

  // Independent stream for replica i.
  static Rng split(uint64_t master, uint64_t i) {
    Rng mix(master ^ (0xa0761d6478bd642fULL * (i + 1)));
    mix.next_u64();
    return Rng(mix.next_u64());
  }

 private:
  uint64_t state_;
};

}  // namespace ips

#endif
