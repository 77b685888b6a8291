#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fwfc/gmm.hpp"

using namespace fwfc;

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

GmmBank one_pixel_bank(Band band, double scale_ratio = 1.0) {
  return GmmBank(1, 1, band, 1, GmmParams{}, scale_ratio);
}

Plane one_value(double x) {
  Plane p(1, 1);
  p.values[0] = x;
  return p;
}

}  // namespace

TEST_CASE("init_bank scales reference variances proportionally") {
  GmmParams params;
  const GmmBank bank = init_bank(4, 4, Band::H, 2, params, 0.04);
  CHECK(bank.var_init_scaled() == doctest::Approx(225.0 * 0.04));  // = 9
  CHECK(bank.var_min_scaled() == doctest::Approx(16.0 * 0.04));
  CHECK(bank.var_max_scaled() == doctest::Approx(1125.0 * 0.04));

  const GmmBank identity = init_bank(4, 4, Band::A, 1, params, 1.0);
  CHECK(identity.var_init_scaled() == doctest::Approx(225.0));

  CHECK_THROWS_AS(init_bank(4, 4, Band::A, 1, params, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(init_bank(0, 4, Band::A, 1, params, 1.0), std::invalid_argument);
}

TEST_CASE("first sample seeds a single full-weight component") {
  GmmBank bank = one_pixel_bank(Band::H);
  bank.update(one_value(7.0));
  const auto comps = bank.components_at(0, 0);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].weight == doctest::Approx(1.0));
  CHECK(comps[0].mean == doctest::Approx(7.0));
  CHECK(comps[0].var == doctest::Approx(225.0 + 0.05 * 49.0));  // boosted init
}

TEST_CASE("detail banks boost variance bounds with the component mean") {
  const GmmBank h = one_pixel_bank(Band::H);
  CHECK(h.effective_var_min(10.0) == doctest::Approx(16.0 + 0.05 * 100.0));
  const GmmBank a = one_pixel_bank(Band::A);
  CHECK(a.effective_var_min(10.0) == doctest::Approx(16.0));  // no boost on A
}

TEST_CASE("zero innovation keeps the mean and decays the variance") {
  GmmBank bank = one_pixel_bank(Band::A);
  const GaussianComponent seed{1.0, 100.0, 25.0};
  bank.update(one_value(100.0));  // create, then overwrite with the fixture
  bank.set_components_at(0, 0, std::span<const GaussianComponent>(&seed, 1));
  double prev_var = 25.0;
  for (int i = 0; i < 200; ++i) {
    bank.update(one_value(100.0));
    const auto comps = bank.components_at(0, 0);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].mean == doctest::Approx(100.0));
    CHECK(comps[0].var <= prev_var + 1e-12);
    prev_var = comps[0].var;
  }
  CHECK(prev_var == doctest::Approx(16.0));  // sits on var_min
}

TEST_CASE("an observation outside the gate creates a new component") {
  GmmBank bank = one_pixel_bank(Band::A);
  bank.update(one_value(0.0));
  const GaussianComponent seed{1.0, 0.0, 4.0};
  bank.set_components_at(0, 0, std::span<const GaussianComponent>(&seed, 1));
  bank.update(one_value(100.0));  // (100-0)^2 = 10000 > 9 * 4
  const auto comps = bank.components_at(0, 0);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].mean == doctest::Approx(0.0));
  CHECK(comps[1].mean == doctest::Approx(100.0));
  CHECK(comps[1].weight == doctest::Approx(0.005).epsilon(1e-3));
  CHECK(comps[0].weight > comps[1].weight);
}

TEST_CASE("weights stay sorted, nonnegative, and normalized under random updates") {
  std::mt19937 rng(99);
  std::normal_distribution<double> base(50.0, 10.0);
  std::uniform_real_distribution<double> jump(-200.0, 200.0);
  for (Band band : {Band::A, Band::H}) {
    GmmBank bank = one_pixel_bank(band);
    for (int i = 0; i < 2000; ++i) {
      const double x = (rng() % 5 == 0) ? jump(rng) : base(rng);
      bank.update(one_value(band == Band::A ? std::clamp(x, 0.0, 255.0) : x));
      const auto comps = bank.components_at(0, 0);
      REQUIRE(!comps.empty());
      double sum = 0.0;
      for (std::size_t k = 0; k < comps.size(); ++k) {
        CHECK(comps[k].weight >= 0.0);
        if (k > 0) CHECK(comps[k - 1].weight >= comps[k].weight);
        CHECK(comps[k].var >= bank.effective_var_min(comps[k].mean) - 1e-12);
        CHECK(comps[k].var <= bank.effective_var_max(comps[k].mean) + 1e-12);
        sum += comps[k].weight;
      }
      CHECK(std::fabs(sum - 1.0) <= 1e-6);
      CHECK(comps.size() <= 5);
    }
  }
}

TEST_CASE("mixture converges on a stationary stream") {
  GmmBank bank = one_pixel_bank(Band::A);
  std::mt19937 rng(2024);
  std::normal_distribution<double> dist(100.0, 5.0);
  for (int i = 0; i < 1000; ++i) bank.update(one_value(dist(rng)));
  const auto comps = bank.components_at(0, 0);
  REQUIRE(!comps.empty());
  CHECK(std::fabs(comps[0].mean - 100.0) <= 1.0);
  CHECK(std::fabs(std::sqrt(comps[0].var) - 5.0) <= 1.0);
}

TEST_CASE("background likelihood uses the weight-ordered prefix") {
  GmmBank bank = one_pixel_bank(Band::A);
  bank.update(one_value(0.0));
  const GaussianComponent single{1.0, 0.0, 1.0};
  bank.set_components_at(0, 0, std::span<const GaussianComponent>(&single, 1));
  CHECK(bank.background_likelihood(one_value(0.0)).values[0] ==
        doctest::Approx(kInvSqrt2Pi).epsilon(1e-9));

  GmmParams params;
  params.background_ratio = 0.2;
  GmmBank two(1, 1, Band::A, 1, params, 1.0);
  two.update(one_value(0.0));
  const GaussianComponent pair[2] = {{0.9, 0.0, 1.0}, {0.1, 50.0, 1.0}};
  two.set_components_at(0, 0, std::span<const GaussianComponent>(pair, 2));
  // 0.9 > 1 - 0.2 already, so only the dominant component counts
  const double d = two.background_likelihood(one_value(50.0)).values[0];
  CHECK(d == doctest::Approx(0.9 * kInvSqrt2Pi * std::exp(-0.5 * 2500.0)));
  CHECK(d < 1e-100);
}

TEST_CASE("background likelihood bounds") {
  std::mt19937 rng(5);
  GmmBank bank = one_pixel_bank(Band::H);
  std::normal_distribution<double> dist(0.0, 3.0);
  std::uniform_real_distribution<double> jump(-150.0, 150.0);
  for (int i = 0; i < 500; ++i)
    bank.update(one_value(rng() % 7 == 0 ? jump(rng) : dist(rng)));
  const auto comps = bank.components_at(0, 0);

  // density at the dominant mean is at least its own term
  const double at_mode = bank.background_likelihood(one_value(comps[0].mean)).values[0];
  CHECK(at_mode >= comps[0].weight * kInvSqrt2Pi / std::sqrt(comps[0].var) - 1e-12);

  // density anywhere is bounded by the variance floor
  double bound = 0.0;
  for (const auto& c : comps)
    bound += c.weight * kInvSqrt2Pi / std::sqrt(bank.effective_var_min(c.mean));
  for (double x : {-100.0, -5.0, 0.0, 2.5, 77.0}) {
    CHECK(bank.background_likelihood(one_value(x)).values[0] <= bound + 1e-12);
  }
}

TEST_CASE("foreground likelihood shapes") {
  ForegroundModel h{Band::H, 1, 1.0, 1.0 / 256.0};
  CHECK(h.density(0.0) == doctest::Approx(kInvSqrt2Pi));
  CHECK(h.density(3.0) == doctest::Approx(0.004431848411938008));
  CHECK(h.density(-3.0) == doctest::Approx(h.density(3.0)));
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    CHECK(h.density(x) == doctest::Approx(h.density(-x)));
  }

  ForegroundModel a{Band::A, 1, 1.0, 1.0 / 256.0};
  Plane plane(4, 4, 123.0);
  const Plane out = foreground_likelihood(a, plane, Band::A);
  for (double v : out.values) CHECK(v == doctest::Approx(0.00390625));

  CHECK_THROWS_AS(foreground_likelihood(h, plane, Band::V), std::invalid_argument);
}

TEST_CASE("band statistics pool over calibration frames") {
  // constant video: zero detail energy everywhere
  const std::vector<Frame> constant(3, Frame(32, 32, 90));
  const BandStatsTable table = calibrate_band_stats(constant, 3);
  for (int level = 1; level <= 3; ++level)
    for (Band band : kDetailBands) CHECK(table.at(band, level) == 0.0);

  // single frame: pooled value equals the plane deviation
  std::mt19937 rng(12);
  Frame f(32, 32);
  for (auto& s : f.samples) s = static_cast<std::uint8_t>(rng() % 256);
  const BandStatsTable single = calibrate_band_stats({f}, 2);
  const Pyramid pyr = decompose(f, 2);
  for (int level = 1; level <= 2; ++level)
    for (Band band : kAllBands)
      CHECK(single.at(band, level) == doctest::Approx(plane_std(pyr.at(level, band))));

  // two zero-mean frames with deviations 3 and 4 pool to sqrt(12.5)
  Frame f3(32, 32), f4(32, 32);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      f3.at(i, j) = static_cast<std::uint8_t>(j % 2 == 0 ? 125 : 131);
      f4.at(i, j) = static_cast<std::uint8_t>(j % 2 == 0 ? 124 : 132);
    }
  const BandStatsTable pooled = calibrate_band_stats({f3, f4}, 1);
  CHECK(pooled.sigma_image == doctest::Approx(std::sqrt(12.5)));

  CHECK_THROWS(calibrate_band_stats({}, 2));
}

TEST_CASE("noise sigma estimation") {
  CHECK(estimate_noise_sigma(Plane(16, 16, 0.0), Band::D, 1) == 0.0);
  CHECK(estimate_noise_sigma(Plane(16, 16, 3.0), Band::D, 1) ==
        doctest::Approx(3.0 / 0.6745));

  std::mt19937 rng(31415);
  std::normal_distribution<double> dist(0.0, 2.0);
  Plane gauss(100, 100);
  for (auto& v : gauss.values) v = dist(rng);
  const double est = estimate_noise_sigma(gauss, Band::D, 1);
  CHECK(est >= 1.9);
  CHECK(est <= 2.1);

  CHECK_THROWS_AS(estimate_noise_sigma(gauss, Band::H, 1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_noise_sigma(gauss, Band::D, 2), std::invalid_argument);
}

TEST_CASE("bank serialization round-trip") {
  std::mt19937 rng(77);
  GmmBank bank(6, 5, Band::V, 3, GmmParams{}, 0.25);
  std::normal_distribution<double> dist(0.0, 4.0);
  Plane plane(6, 5);
  for (int step = 0; step < 50; ++step) {
    for (auto& v : plane.values) v = dist(rng);
    bank.update(plane);
  }
  std::stringstream buffer;
  bank.save(buffer);
  const GmmBank back = GmmBank::load(buffer);
  CHECK(back.width() == bank.width());
  CHECK(back.band() == bank.band());
  CHECK(back.level() == bank.level());
  CHECK(back.scale_ratio() == bank.scale_ratio());
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 6; ++j) {
      const auto a = bank.components_at(i, j);
      const auto b = back.components_at(i, j);
      REQUIRE(a.size() == b.size());
      for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].weight == b[k].weight);
        CHECK(a[k].mean == b[k].mean);
        CHECK(a[k].var == b[k].var);
      }
    }
  }
}
