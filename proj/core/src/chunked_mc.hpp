#pragma once

// Internal: deterministic parallel Monte Carlo reduction. The sample count is
// split into a chunk layout that depends only on K; every chunk owns an Rng
// derived from (base seed, chunk index), and partial sums are combined in
// chunk order. The result is byte-identical no matter how many worker
// threads execute the chunks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <thread>
#include <vector>

#include "semidev/rng.hpp"

namespace semidev::detail {

inline std::size_t chunk_count(std::size_t K) {
  const std::size_t by_size = (K + 4095) / 4096;
  return std::max<std::size_t>(1, std::min<std::size_t>(64, by_size));
}

// Runs fn(chunk_index) for every chunk, spreading chunks over worker threads.
template <class Fn>
void for_each_chunk(std::size_t chunks, Fn&& fn) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(chunks, hw);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t c = t; c < chunks; c += workers) fn(c);
    });
  }
  for (auto& th : pool) th.join();
}

inline Rng chunk_rng(std::uint64_t base, std::size_t chunk) {
  return Rng(mix64(base ^ mix64(0xC4A11C00ull + chunk)));
}

struct ScalarStats {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// body: (Rng&) -> double, one sample per call.
template <class Body>
ScalarStats mc_scalar(std::uint64_t base, std::size_t K, Body&& body) {
  const std::size_t chunks = chunk_count(K);
  std::vector<double> sums(chunks, 0.0), sqs(chunks, 0.0);
  for_each_chunk(chunks, [&](std::size_t c) {
    Rng rng = chunk_rng(base, c);
    const std::size_t lo = c * K / chunks;
    const std::size_t hi = (c + 1) * K / chunks;
    double s = 0.0, q = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      const double v = body(rng);
      s += v;
      q += v * v;
    }
    sums[c] = s;
    sqs[c] = q;
  });
  double sum = 0.0, sq = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    sum += sums[c];
    sq += sqs[c];
  }
  const double n = static_cast<double>(K);
  const double mean = sum / n;
  const double var = std::max(0.0, (sq - n * mean * mean) / std::max(1.0, n - 1.0));
  return {mean, std::sqrt(var / n)};
}

struct VectorStats {
  std::vector<double> mean;
  std::vector<double> stderr_;
};

// body: (Rng&, std::vector<double>& out) fills one dim-sized sample.
template <class Body>
VectorStats mc_vector(std::uint64_t base, std::size_t K, std::size_t dim, Body&& body) {
  const std::size_t chunks = chunk_count(K);
  std::vector<std::vector<double>> sums(chunks), sqs(chunks);
  for_each_chunk(chunks, [&](std::size_t c) {
    Rng rng = chunk_rng(base, c);
    const std::size_t lo = c * K / chunks;
    const std::size_t hi = (c + 1) * K / chunks;
    std::vector<double> s(dim, 0.0), q(dim, 0.0), sample(dim, 0.0);
    for (std::size_t k = lo; k < hi; ++k) {
      body(rng, sample);
      for (std::size_t i = 0; i < dim; ++i) {
        s[i] += sample[i];
        q[i] += sample[i] * sample[i];
      }
    }
    sums[c] = std::move(s);
    sqs[c] = std::move(q);
  });
  std::vector<double> sum(dim, 0.0), sq(dim, 0.0);
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t i = 0; i < dim; ++i) {
      sum[i] += sums[c][i];
      sq[i] += sqs[c][i];
    }
  }
  VectorStats out;
  out.mean.resize(dim);
  out.stderr_.resize(dim);
  const double n = static_cast<double>(K);
  for (std::size_t i = 0; i < dim; ++i) {
    out.mean[i] = sum[i] / n;
    const double var =
        std::max(0.0, (sq[i] - n * out.mean[i] * out.mean[i]) / std::max(1.0, n - 1.0));
    out.stderr_[i] = std::sqrt(var / n);
  }
  return out;
}

}  // namespace semidev::detail
