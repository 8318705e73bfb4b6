#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace semidev {

// splitmix64 finalizer; used for all seed derivation so that sub-streams and
// forks are decorrelated even for adjacent master seeds.
std::uint64_t mix64(std::uint64_t z) noexcept;

// Deterministic normal/uniform source. Gaussian variates come from an
// explicit Box-Muller transform over mt19937_64 words: the standard pins the
// mt19937_64 sequence but not std::normal_distribution's algorithm, and
// byte-identical output across runs is a hard requirement here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform01();  // [0, 1), 53-bit resolution
  double normal();
  void fill_normal(std::vector<double>& out, std::size_t n);
  std::vector<double> normal_vector(std::size_t n);
  std::size_t index(std::size_t n);  // uniform over {0, ..., n-1}, n >= 1

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Master seed plus three independently derived sub-streams: two scenario
// streams and one Gaussian perturbation stream. fork(i) derives a child
// instance (replication i, diagnostic batch i, ...) that is independent of
// the parent and of every other index.
class RandomStreams {
 public:
  explicit RandomStreams(std::uint64_t master_seed);

  std::uint64_t master_seed() const noexcept { return master_; }
  Rng& w1() noexcept { return w1_; }
  Rng& w2() noexcept { return w2_; }
  Rng& gauss() noexcept { return gauss_; }

  RandomStreams fork(std::uint64_t index) const;

 private:
  std::uint64_t master_;
  Rng w1_;
  Rng w2_;
  Rng gauss_;
};

// dim i.i.d. N(0,1) components from the gauss sub-stream; throws on dim < 1.
std::vector<double> gaussian_vector(RandomStreams& streams, std::size_t dim);

}  // namespace semidev
