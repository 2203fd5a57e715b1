#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "frugal_snn/error.hpp"
#include "frugal_snn/eval.hpp"
#include "test_util.hpp"

using namespace frugal_snn;
using namespace frugal_snn::eval;

namespace {

// Maximum one-to-one matching by exhaustive search over every assignment.
std::size_t brute_force_hits(const std::vector<double>& a, const std::vector<double>& b,
                             double window, std::size_t i = 0, std::uint32_t used = 0) {
  if (i == a.size()) return 0;
  std::size_t best = brute_force_hits(a, b, window, i + 1, used);  // a[i] unmatched
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (used & (1u << j)) continue;
    if (std::abs(a[i] - b[j]) <= window)
      best = std::max(best, 1 + brute_force_hits(a, b, window, i + 1, used | (1u << j)));
  }
  return best;
}

std::vector<double> bits_to_times(std::uint32_t bits, std::size_t n) {
  std::vector<double> t;
  for (std::size_t k = 0; k < n; ++k)
    if (bits & (1u << k)) t.push_back(static_cast<double>(k));
  return t;
}

SpikeRaster shifted(const SpikeRaster& r, int by) {
  std::vector<SpikeEvent> ev;
  for (auto e : r.events()) {
    const long t = static_cast<long>(e.t) + by;
    if (t >= 0 && t < static_cast<long>(r.timesteps())) ev.push_back({e.train, static_cast<Timestep>(t)});
  }
  return SpikeRaster::from_events(r.trains(), r.timesteps(), r.timestep_ms(), ev);
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("coincidence windows per preset") {
    CHECK(coincidence_window_ms("artificial") == 400);
    CHECK(coincidence_window_ms("vowel") == 400);
    CHECK(coincidence_window_ms("neural") == 2500);
    CHECK_THROWS_AS(coincidence_window_ms("x"), ConfigError);
  }

  TEST_CASE("smoothing examples") {
    const auto r = SpikeRaster::from_events(3, 200, 1.0, {{1, 100}, {2, 100}});
    const auto s = smooth_raster(r);
    CHECK(std::all_of(s[0].begin(), s[0].end(), [](double v) { return v == 0.0; }));
    CHECK(std::abs(std::accumulate(s[1].begin(), s[1].end(), 0.0) - 1.0) < 1e-9);
    CHECK(s[1] == s[2]);
    CHECK_THROWS_AS(smooth_raster(r, {30, 3.0}), InvalidArgument);
  }

  TEST_CASE("pairing examples") {
    const auto truth = SpikeRaster::from_events(
        3, 600, 1.0, {{0, 50}, {0, 300}, {1, 120}, {1, 400}, {2, 200}, {2, 520}});
    const auto id = match_pairs(truth, truth, 400.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(id[i] == i);
    const auto later = match_pairs(truth, shifted(truth, 5), 10.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(later[i] == i);

    // Output 0 silent, output 1 carries truth 0: truth 0 must pair with 1.
    const auto out = SpikeRaster::from_events(2, 600, 1.0, {{1, 52}, {1, 301}});
    const auto p = match_pairs(truth, out, 400.0);
    CHECK(p[0] == 1u);
    CHECK_THROWS_AS(match_pairs(truth, SpikeRaster(2, 599, 1.0), 400.0), InvalidArgument);
  }

  TEST_CASE("f_score examples") {
    const std::vector<double> a{10, 20, 30};
    CHECK(f_score(a, a, 1.0) == 1.0);
    const std::vector<double> far{100, 200};
    CHECK(f_score(a, far, 5.0) == 0.0);
    CHECK(f_score({}, {}, 5.0) == 1.0);
    std::vector<double> t(10), o(10);
    for (int k = 0; k < 10; ++k) {
      t[k] = 100.0 * k;
      o[k] = 100.0 * k + (k < 8 ? 1.0 : 50.0);
    }
    CHECK(f_score(t, o, 10.0) == doctest::Approx(0.8));
  }

  TEST_CASE("global F examples") {
    const auto truth = SpikeRaster::from_events(2, 1000, 1.0, {{0, 100}, {0, 500}, {1, 300}});
    const std::vector<std::optional<std::size_t>> pairs{0, 1};
    CHECK(global_f(truth, truth, pairs, 10.0) == 1.0);

    std::vector<SpikeEvent> ev = truth.events();
    for (Timestep t = 0; t < 1000; t += 50) ev.push_back({2, t});
    const auto noisy = SpikeRaster::from_events(3, 1000, 1.0, ev);
    CHECK(global_f(truth, noisy, pairs, 10.0) < 1.0);
    CHECK(global_f(truth, SpikeRaster(3, 1000, 1.0), pairs, 10.0) == 0.0);
  }

  TEST_CASE("confusion matrix examples") {
    const auto truth = SpikeRaster::from_events(2, 1000, 1.0, {{0, 100}, {0, 500}, {1, 300}});
    const auto c = confusion_matrix(truth, truth, 10.0);
    CHECK(c == std::vector<std::vector<std::size_t>>{{2, 0}, {0, 1}});
    const auto zero = confusion_matrix(truth, SpikeRaster(3, 1000, 1.0), 10.0);
    for (const auto& row : zero) CHECK(std::all_of(row.begin(), row.end(), [](auto v) { return v == 0; }));
    const auto one = confusion_matrix(truth, SpikeRaster::from_events(2, 1000, 1.0, {{1, 305}}), 10.0);
    CHECK(one == std::vector<std::vector<std::size_t>>{{0, 0}, {0, 1}});
  }

  TEST_CASE("greedy hit count equals brute-force optimum, exhaustively") {
    // Every pair of spike sets on an 8-slot grid, for several windows.
    for (double window : {0.0, 1.0, 2.0}) {
      for (std::uint32_t x = 0; x < 256; ++x) {
        const auto a = bits_to_times(x, 8);
        for (std::uint32_t y = 0; y < 256; ++y) {
          const auto b = bits_to_times(y, 8);
          REQUIRE(hit_count(a, b, window) == brute_force_hits(a, b, window));
        }
      }
    }
    // Random real-valued instances with up to 8 spikes per train.
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (int trial = 0; trial < 20000; ++trial) {
      std::vector<double> a(rng() % 9), b(rng() % 9);
      for (auto& v : a) v = u(rng);
      for (auto& v : b) v = u(rng);
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      REQUIRE(hit_count(a, b, 4.0) == brute_force_hits(a, b, 4.0));
    }
  }

  TEST_CASE("F is symmetric, bounded by 1, and invariant to small shifts") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 5000.0);
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<double> a(rng() % 20), b(rng() % 20);
      for (auto& v : a) v = u(rng);
      for (auto& v : b) v = u(rng);
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      const double f = f_score(a, b, 100.0);
      REQUIRE(f == f_score(b, a, 100.0));
      REQUIRE(f >= 0.0);
      REQUIRE(f <= 1.0);
    }
    // Truth spikes spaced beyond twice the window: a constant shift within
    // the window keeps every hit.
    std::vector<double> t{100, 1000, 2000, 3000}, o{120, 990, 2050, 4500};
    const double base = f_score(t, o, 100.0);
    for (double d : {-40.0, 0.0, 45.0}) {
      std::vector<double> s = t;
      for (auto& v : s) v += d;
      CHECK(f_score(t, s, 100.0) == 1.0);
    }
    CHECK(base == doctest::Approx(0.75));
  }

  TEST_CASE("evaluate: report invariants on random rasters") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto truth = test_util::random_raster(4, 3000, 0.002, seed, 3.0);
      const auto out = test_util::random_raster(6, 3000, 0.003, seed + 100, 3.0);
      const auto rep = evaluate(truth, out, 400.0);
      CHECK(rep.f_global >= 0.0);
      CHECK(rep.f_global <= 1.0);
      for (double f : rep.f_per_pair) CHECK((f >= 0.0 && f <= 1.0));
      // Entries are per-pair one-to-one counts, so each is bounded by both
      // trains' spike counts.
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
          CHECK(rep.confusion[i][j] <= rep.truth_counts[i]);
          CHECK(rep.confusion[i][j] <= rep.output_counts[j]);
        }
    }
    const auto truth = SpikeRaster::from_events(2, 100, 1.0, {{0, 10}, {1, 50}});
    const auto rep = evaluate(truth, truth, 5.0);
    CHECK(rep.f_global == 1.0);
    CHECK(rep.distinct_firing() == 2);
  }
}
