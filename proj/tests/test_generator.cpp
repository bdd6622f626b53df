#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "reuse/generator.hpp"

using namespace reuse;

namespace {

LandscapeSpec bowl_at(std::vector<double> center, double scale) {
  LandscapeSpec spec;
  spec.center = std::move(center);
  spec.scale = scale;
  return spec;
}

TaskContext small_task(double decode_sigma, double invalid_prob = 0.0) {
  TaskContext ctx;
  ctx.landscape_a = bowl_at({1.0, 0.0, 0.0, 0.0}, 5.0);
  ctx.landscape_b = bowl_at({-1.0, 0.0, 0.0, 0.0}, 5.0);
  ctx.landscape_a.noise_sigma = decode_sigma;
  ctx.landscape_b.noise_sigma = decode_sigma;
  ctx.prior.dim = 4;
  ctx.invalid_prob = invalid_prob;
  ctx.chem_qed_axis = chemistry_axis(3, 0, 4);
  ctx.chem_sa_axis = chemistry_axis(3, 1, 4);
  return ctx;
}

}  // namespace

TEST_CASE("landscape_value peaks at the center with the configured scale") {
  LandscapeSpec spec = bowl_at({1.0, 2.0, 0.0}, 4.0);
  std::vector<double> center{1.0, 2.0, 0.0};
  CHECK(landscape_value(spec, center) == 4.0);

  // One unit off along a single coordinate: scale * exp(-1/d).
  std::vector<double> off{2.0, 2.0, 0.0};
  CHECK(landscape_value(spec, off) ==
        doctest::Approx(4.0 * std::exp(-1.0 / 3.0)).epsilon(1e-12));
  CHECK(landscape_value(spec, off) < landscape_value(spec, center));
}

TEST_CASE("multi_basin adds a mirrored bowl") {
  LandscapeSpec spec = bowl_at({1.0, 0.0, 0.0, 0.0}, 2.0);
  spec.kind = LandscapeKind::multi_basin;
  std::vector<double> at_center{1.0, 0.0, 0.0, 0.0};
  std::vector<double> at_mirror{-1.0, 0.0, 0.0, 0.0};
  // Peak value plus the far bowl's tail, symmetric across the two basins.
  double expected = 2.0 + 2.0 * std::exp(-4.0 / 4.0);
  CHECK(landscape_value(spec, at_center) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(landscape_value(spec, at_mirror) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("landscape_value rejects a dimension mismatch") {
  LandscapeSpec spec = bowl_at({0.0, 0.0}, 1.0);
  std::vector<double> z{0.0, 0.0, 0.0};
  CHECK_THROWS_AS((void)landscape_value(spec, z), input_error);
}

TEST_CASE("sigmoid midpoint and symmetry") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(3.0) + sigmoid(-3.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sigmoid(10.0) > 0.9999);
}

TEST_CASE("fingerprint_of depends only on coordinate signs") {
  std::vector<double> a{1.0, -2.0, 0.5};
  std::vector<double> b{3.5, -0.1, 7.0};  // same sign pattern
  std::vector<double> c{-1.0, -2.0, 0.5};
  CHECK(fingerprint_of(a) == fingerprint_of(b));
  CHECK_FALSE(fingerprint_of(a) == fingerprint_of(c));
  CHECK(fingerprint_of(std::vector<double>{}).bits == 0);
  // The hash fold keeps constant-sign latents from mapping to all-zero bits.
  std::vector<double> pos{1.0, 1.0};
  CHECK(fingerprint_of(pos).bits != 0);
  CHECK(fingerprint_of(pos).bits != ~0ull);
}

TEST_CASE("sample_prior draws seeded gaussian latents with sequential ids") {
  PriorSpec prior;
  prior.mode = PriorMode::gaussian;
  prior.sigma = 1.0;
  prior.dim = 6;

  IdSource ids;
  ids.reserve_latents(4);  // offset the sequence
  std::vector<LatentPoint> draws = sample_prior(prior, 11, 5, ids);
  REQUIRE(draws.size() == 5);
  for (std::size_t i = 0; i < draws.size(); ++i) {
    CHECK(draws[i].coords.size() == 6);
    CHECK(draws[i].id == 4 + i);
  }

  IdSource ids2;
  std::vector<LatentPoint> again = sample_prior(prior, 11, 5, ids2);
  for (std::size_t i = 0; i < draws.size(); ++i)
    CHECK(draws[i].coords == again[i].coords);

  // Scale: sigma 0 collapses every draw to the origin.
  prior.sigma = 0.0;
  IdSource ids3;
  for (const LatentPoint& z : sample_prior(prior, 1, 3, ids3))
    for (double c : z.coords) CHECK(c == 0.0);
}

TEST_CASE("anchor_mixture prior centers draws on anchors") {
  PriorSpec prior;
  prior.mode = PriorMode::anchor_mixture;
  prior.sigma = 0.0;
  prior.anchors = {{1.0, 1.0}, {-1.0, 2.0}};

  IdSource ids;
  std::vector<LatentPoint> draws = sample_prior(prior, 5, 40, ids);
  bool saw_first = false, saw_second = false;
  for (const LatentPoint& z : draws) {
    bool first = z.coords == prior.anchors[0];
    bool second = z.coords == prior.anchors[1];
    CHECK((first || second));
    saw_first = saw_first || first;
    saw_second = saw_second || second;
  }
  CHECK(saw_first);
  CHECK(saw_second);
}

TEST_CASE("sample_prior rejects bad priors") {
  PriorSpec no_anchors;
  no_anchors.mode = PriorMode::anchor_mixture;
  IdSource ids;
  CHECK_THROWS_AS((void)sample_prior(no_anchors, 1, 1, ids), config_error);

  PriorSpec ragged;
  ragged.mode = PriorMode::anchor_mixture;
  ragged.anchors = {{1.0, 1.0}, {1.0}};
  CHECK_THROWS_AS((void)sample_prior(ragged, 1, 16, ids), config_error);

  PriorSpec negative;
  negative.sigma = -1.0;
  CHECK_THROWS_AS((void)sample_prior(negative, 1, 1, ids), config_error);
}

TEST_CASE("decode_family repeats bit-identically for one seed") {
  TaskContext ctx = small_task(0.4, 0.1);
  LatentPoint z;
  z.coords = {0.3, -0.2, 0.9, 0.0};
  z.id = 2;

  IdSource ids_a, ids_b;
  std::vector<Candidate> fam_a = decode_family(z, ctx, 8, 17, ids_a);
  std::vector<Candidate> fam_b = decode_family(z, ctx, 8, 17, ids_b);
  REQUIRE(fam_a.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(fam_a[i].latent == fam_b[i].latent);
    CHECK(fam_a[i].qed_like == fam_b[i].qed_like);
    CHECK(fam_a[i].sa_like == fam_b[i].sa_like);
    CHECK(fam_a[i].valid == fam_b[i].valid);
    CHECK(fam_a[i].features == fam_b[i].features);
    CHECK(fam_a[i].id == i);
    CHECK(fam_a[i].origin_latent == 2);
  }
}

TEST_CASE("decode streams key on latent content, not on the latent id") {
  TaskContext ctx = small_task(0.4, 0.1);
  LatentPoint z1, z2;
  z1.coords = {0.3, -0.2, 0.9, 0.0};
  z1.id = 5;
  z2.coords = z1.coords;
  z2.id = 900;

  std::vector<Candidate> fam1 = decode_family_at(z1, ctx, 6, 17, 100);
  std::vector<Candidate> fam2 = decode_family_at(z2, ctx, 6, 17, 200);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(fam1[i].latent == fam2[i].latent);
    CHECK(fam1[i].qed_like == fam2[i].qed_like);
    CHECK(fam1[i].valid == fam2[i].valid);
    CHECK(fam1[i].id == 100 + i);
    CHECK(fam2[i].id == 200 + i);
    CHECK(fam1[i].origin_latent == 5);
    CHECK(fam2[i].origin_latent == 900);
  }

  // Different content, same seed: different draws.
  LatentPoint z3;
  z3.coords = {0.3, -0.2, 0.9, 0.001};
  std::vector<Candidate> fam3 = decode_family_at(z3, ctx, 6, 17, 300);
  CHECK(fam1[0].latent != fam3[0].latent);
}

TEST_CASE("zero decode noise reproduces the latent exactly") {
  TaskContext ctx = small_task(0.0);
  LatentPoint z;
  z.coords = ctx.landscape_a.center;  // sit on the bowl peak
  IdSource ids;
  std::vector<Candidate> fam = decode_family(z, ctx, 3, 9, ids);
  for (const Candidate& m : fam) {
    CHECK(m.latent == z.coords);
    CHECK(landscape_value(ctx.landscape_a, m.latent) == ctx.landscape_a.scale);
  }
}

TEST_CASE("invalid_prob drives the validity flag to its extremes") {
  LatentPoint z;
  z.coords = {0.0, 0.0, 0.0, 0.0};
  IdSource ids;
  TaskContext never = small_task(0.3, 0.0);
  for (const Candidate& m : decode_family(z, never, 50, 3, ids))
    CHECK(m.valid);
  TaskContext always = small_task(0.3, 1.0);
  for (const Candidate& m : decode_family(z, always, 50, 3, ids))
    CHECK_FALSE(m.valid);
}

TEST_CASE("decode_family rejects malformed requests") {
  TaskContext ctx = small_task(0.2);
  LatentPoint z;
  z.coords = {0.0, 0.0, 0.0, 0.0};
  IdSource ids;
  CHECK_THROWS_AS((void)decode_family(z, ctx, 0, 1, ids), input_error);

  LatentPoint wrong_dim;
  wrong_dim.coords = {0.0, 0.0};
  CHECK_THROWS_AS((void)decode_family(wrong_dim, ctx, 2, 1, ids), input_error);

  TaskContext no_axes = ctx;
  no_axes.chem_qed_axis.clear();
  CHECK_THROWS_AS((void)decode_family(z, no_axes, 2, 1, ids), input_error);
}
