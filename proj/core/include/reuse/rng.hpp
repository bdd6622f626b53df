#pragma once

#include <cstdint>
#include <span>

// Deterministic stream-keyed randomness.
//
// Every stochastic operation in the library draws from its own stream, derived
// by folding a purpose tag plus caller-chosen keys (ids, iteration numbers,
// coordinate hashes) into a root seed. No stream ever shares sequential state
// with another, so evaluation order and worker count cannot change any draw.

namespace reuse {

// splitmix64 finalizer (public domain constants).
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

// Folds one key into a stream state. The +1 keeps key 0 from being a no-op.
constexpr std::uint64_t fold_key(std::uint64_t h, std::uint64_t k) {
  return mix64(h + 0x9E3779B97F4A7C15ull * (k + 1));
}

// Purpose tags for stream derivation. Values are part of the reproducibility
// contract: reordering them changes every seeded output.
enum class Stream : std::uint64_t {
  prior_init = 1,
  immigration = 2,
  offspring = 3,
  operator_choice = 4,
  mutation = 5,
  crossover = 6,
  fitness_eval = 7,
  pool_decode = 8,
  decode = 9,
  stage_noise = 10,
  funnel = 11,
  chem_axis = 12,
  landscape = 13,
  experiment = 14,
};

constexpr std::uint64_t derive_seed(std::uint64_t root, Stream purpose,
                                    std::uint64_t a = 0, std::uint64_t b = 0,
                                    std::uint64_t c = 0) {
  std::uint64_t h = fold_key(root, static_cast<std::uint64_t>(purpose));
  h = fold_key(h, a);
  h = fold_key(h, b);
  return fold_key(h, c);
}

// Hash of a coordinate vector's bit pattern. Used to key content-addressed
// streams (decode perturbations, evaluator noise) so that value-identical
// inputs always see identical draws.
std::uint64_t hash_coords(std::span<const double> coords);

// Small deterministic generator over one derived stream. Not std::uniform_*
// based: the exact draw sequence is pinned by this code, not by the standard
// library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t stream_seed) : state_(stream_seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; second value of each pair is cached.
  double gaussian();

  // Uniform integer in [0, n), n > 0. Multiply-shift; bias is < 2^-32 for the
  // small n used here.
  std::uint64_t uniform_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
  double cached_gaussian_ = 0.0;
  bool has_cached_ = false;
};

inline Rng derive_rng(std::uint64_t root, Stream purpose, std::uint64_t a = 0,
                      std::uint64_t b = 0, std::uint64_t c = 0) {
  return Rng(derive_seed(root, purpose, a, b, c));
}

// Per-run id allocator. Latent and candidate ids are separate sequences, both
// starting at 0 and strictly increasing in creation order. Blocks can be
// reserved up front so parallel decode keeps ids deterministic.
struct IdSource {
  std::uint64_t next_latent = 0;
  std::uint64_t next_candidate = 0;

  std::uint64_t reserve_latents(std::uint64_t n) {
    std::uint64_t first = next_latent;
    next_latent += n;
    return first;
  }
  std::uint64_t reserve_candidates(std::uint64_t n) {
    std::uint64_t first = next_candidate;
    next_candidate += n;
    return first;
  }
};

}  // namespace reuse
