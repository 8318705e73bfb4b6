#include "semidev/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace semidev {

namespace {

// Domain-separation constants for sub-stream/fork derivation. Arbitrary but
// fixed: changing any of them changes every emitted random sequence.
constexpr std::uint64_t kDomainW1 = 0x57315731aa11aa11ull;
constexpr std::uint64_t kDomainW2 = 0x5732573244224422ull;
constexpr std::uint64_t kDomainGauss = 0x6a755353d5d5d5d5ull;
constexpr std::uint64_t kDomainFork = 0xf0f0c3c396969696ull;

std::mt19937_64 seeded_engine(std::uint64_t seed) {
  // Expand the 64-bit seed into a full warm-up sequence; seed_seq's
  // generate() is specified exactly by the standard, so this is portable.
  std::uint64_t s = seed;
  std::seed_seq seq{mix64(s += 0x9e3779b97f4a7c15ull), mix64(s += 0x9e3779b97f4a7c15ull),
                    mix64(s += 0x9e3779b97f4a7c15ull), mix64(s += 0x9e3779b97f4a7c15ull)};
  return std::mt19937_64(seq);
}

}  // namespace

std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : gen_(seeded_engine(seed)) {}

std::uint64_t Rng::next_u64() { return gen_(); }

double Rng::uniform01() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 shifted into (0,1] so log() is finite.
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

void Rng::fill_normal(std::vector<double>& out, std::size_t n) {
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = normal();
}

std::vector<double> Rng::normal_vector(std::size_t n) {
  std::vector<double> out;
  fill_normal(out, n);
  return out;
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::index: n must be >= 1");
  // Fixed-point multiply; deterministic, bias O(n / 2^64).
  const unsigned __int128 wide = static_cast<unsigned __int128>(gen_()) * n;
  return static_cast<std::size_t>(wide >> 64);
}

RandomStreams::RandomStreams(std::uint64_t master_seed)
    : master_(master_seed),
      w1_(mix64(master_seed ^ kDomainW1)),
      w2_(mix64(master_seed ^ kDomainW2)),
      gauss_(mix64(master_seed ^ kDomainGauss)) {}

RandomStreams RandomStreams::fork(std::uint64_t index) const {
  return RandomStreams(mix64(master_ ^ kDomainFork ^ mix64(index)));
}

std::vector<double> gaussian_vector(RandomStreams& streams, std::size_t dim) {
  if (dim < 1) throw std::invalid_argument("gaussian_vector: dim must be >= 1");
  return streams.gauss().normal_vector(dim);
}

}  // namespace semidev
