#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "reuse/rng.hpp"
#include "reuse/types.hpp"

// Synthetic frozen generator. Decoding is a pure function of (latent, task,
// k, seed): the draw stream is keyed by the latent's coordinate bits, so two
// value-identical latents decode to identical families up to candidate ids.

namespace reuse {

// Analytic affinity surface. quadratic_bowl peaks at center with value
// `scale`; multi_basin adds a mirrored bowl at -center.
double landscape_value(const LandscapeSpec& spec, std::span<const double> z);

double sigmoid(double x);

// Bit j is the sign of coordinate (j mod d) of the latent, XOR-folded with a
// fixed hash of j so repeated coordinates do not produce constant runs.
Fingerprint fingerprint_of(std::span<const double> latent);

std::vector<LatentPoint> sample_prior(const PriorSpec& prior,
                                      std::uint64_t rng_seed, std::size_t count,
                                      IdSource& ids);

// Decodes k candidates with ids first_id .. first_id + k - 1.
std::vector<Candidate> decode_family_at(const LatentPoint& z,
                                        const TaskContext& ctx, std::size_t k,
                                        std::uint64_t rng_seed,
                                        CandidateId first_id);

std::vector<Candidate> decode_family(const LatentPoint& z, const TaskContext& ctx,
                                     std::size_t k, std::uint64_t rng_seed,
                                     IdSource& ids);

}  // namespace reuse
