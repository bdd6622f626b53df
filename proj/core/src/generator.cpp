#include "reuse/generator.hpp"

#include <cmath>
#include <stdexcept>

namespace reuse {

namespace {

double bowl(std::span<const double> center, double scale, bool mirrored,
            std::span<const double> z) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < center.size(); ++i) {
    double c = mirrored ? -center[i] : center[i];
    double diff = z[i] - c;
    d2 += diff * diff;
  }
  return scale * std::exp(-d2 / static_cast<double>(center.size()));
}

}  // namespace

double landscape_value(const LandscapeSpec& spec, std::span<const double> z) {
  if (z.size() != spec.center.size())
    throw input_error("landscape_value: dimension mismatch");
  double v = bowl(spec.center, spec.scale, false, z);
  if (spec.kind == LandscapeKind::multi_basin)
    v += bowl(spec.center, spec.scale, true, z);
  return v;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Fingerprint fingerprint_of(std::span<const double> latent) {
  if (latent.empty()) return {};
  std::uint64_t bits = 0;
  for (unsigned j = 0; j < 64; ++j) {
    bool sign_bit = latent[j % latent.size()] >= 0.0;
    bool hash_bit = (mix64(0xF1A9'00D5ull + j) & 1ull) != 0;
    if (sign_bit != hash_bit) bits |= (1ull << j);
  }
  return {bits};
}

std::vector<LatentPoint> sample_prior(const PriorSpec& prior,
                                      std::uint64_t rng_seed, std::size_t count,
                                      IdSource& ids) {
  if (prior.mode == PriorMode::anchor_mixture && prior.anchors.empty())
    throw config_error("sample_prior: anchor_mixture prior has no anchors");
  if (prior.sigma < 0)
    throw config_error("sample_prior: prior sigma must be >= 0");

  std::size_t dim = prior.dim;
  if (prior.mode == PriorMode::anchor_mixture) dim = prior.anchors[0].size();

  std::vector<LatentPoint> out;
  out.reserve(count);
  Rng rng = derive_rng(rng_seed, Stream::prior_init);
  for (std::size_t i = 0; i < count; ++i) {
    LatentPoint z;
    z.coords.assign(dim, 0.0);
    if (prior.mode == PriorMode::anchor_mixture) {
      const auto& anchor = prior.anchors[rng.uniform_below(prior.anchors.size())];
      if (anchor.size() != dim)
        throw config_error("sample_prior: anchors must share one dimension");
      z.coords = anchor;
    }
    for (auto& c : z.coords) c += prior.sigma * rng.gaussian();
    z.id = ids.reserve_latents(1);
    out.push_back(std::move(z));
  }
  return out;
}

std::vector<Candidate> decode_family_at(const LatentPoint& z,
                                        const TaskContext& ctx, std::size_t k,
                                        std::uint64_t rng_seed,
                                        CandidateId first_id) {
  if (k == 0) throw input_error("decode_family: k must be >= 1");
  if (z.coords.size() != ctx.landscape_a.center.size())
    throw input_error("decode_family: latent dimension mismatch");
  if (ctx.chem_qed_axis.size() != z.coords.size() ||
      ctx.chem_sa_axis.size() != z.coords.size())
    throw input_error("decode_family: task chemistry axes missing or wrong size");

  // Content-keyed stream: identical coords, k and seed give identical
  // families in every field except the assigned ids.
  Rng rng = derive_rng(rng_seed, Stream::decode, hash_coords(z.coords), k);
  double sigma_dec =
      0.5 * (ctx.landscape_a.noise_sigma + ctx.landscape_b.noise_sigma);

  std::vector<Candidate> family;
  family.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    Candidate m;
    m.latent.resize(z.coords.size());
    for (std::size_t i = 0; i < z.coords.size(); ++i)
      m.latent[i] = z.coords[i] + sigma_dec * rng.gaussian();
    double qx = 0.0, sx = 0.0;
    for (std::size_t i = 0; i < m.latent.size(); ++i) {
      qx += ctx.chem_qed_axis[i] * m.latent[i];
      sx += ctx.chem_sa_axis[i] * m.latent[i];
    }
    m.qed_like = sigmoid(qx);
    m.sa_like = sigmoid(sx);
    m.valid = rng.uniform() >= ctx.invalid_prob;
    m.features = fingerprint_of(m.latent);
    m.origin_latent = z.id;
    m.id = first_id + j;
    family.push_back(std::move(m));
  }
  return family;
}

std::vector<Candidate> decode_family(const LatentPoint& z, const TaskContext& ctx,
                                     std::size_t k, std::uint64_t rng_seed,
                                     IdSource& ids) {
  return decode_family_at(z, ctx, k, rng_seed, ids.reserve_candidates(k));
}

}  // namespace reuse
