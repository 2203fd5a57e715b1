#include <doctest.h>

#include <random>

#include "frugal_snn/error.hpp"
#include "frugal_snn/plasticity.hpp"
#include "test_util.hpp"

using namespace frugal_snn;
using namespace frugal_snn::plasticity;
using doctest::Approx;

TEST_SUITE("plasticity") {
  TEST_CASE("preset constants") {
    const auto s = StdpParams::preset("artificial");
    CHECK(s.w_ltp == -0.1);
    CHECK(s.w_ltd == 0.06);
    CHECK(s.w_lateral_potentiation == -0.001);
    CHECK(s.w_lateral_inhibition == 0.0002);
    CHECK(s.t_stdp_ms == 500);
    CHECK(StdpParams::preset("vowel").t_stdp_ms == 500);
    CHECK(StdpParams::preset("neural").t_stdp_ms == 8000);
    CHECK(IpParams::preset("artificial").f_th_post == 0.01);
    CHECK(IpParams::preset("artificial").dth_pair == 0.001);
    CHECK(IpParams::preset("vowel").f_th_post == 0.01);
    CHECK(IpParams::preset("vowel").dth_pair == Approx(0.006).epsilon(1e-15));
    CHECK(IpParams::preset("neural").f_th_post == 0.5);
    CHECK(IpParams::preset("neural").dth_pair == Approx(0.05).epsilon(1e-15));
    CHECK(IpParams::preset("neural").th_min == 20);
    CHECK(IpParams::preset("neural").th_max == 3500);
    CHECK_THROWS_AS(StdpParams::preset("x"), ConfigError);
  }

  TEST_CASE("recent_activity window is (t_post - T, t_post]") {
    // 1 ms steps, T = 10 ms: window covers timesteps 11..20 for t_post = 20.
    const auto r = SpikeRaster::from_events(3, 30, 1.0, {{0, 20}, {1, 10}, {2, 11}});
    const auto flags = recent_activity(r, 20, 10.0);
    CHECK(flags == std::vector<std::uint8_t>{1, 0, 1});
    CHECK(recent_activity(SpikeRaster(4, 30, 1.0), 20, 10.0) == std::vector<std::uint8_t>(4, 0));
    CHECK(window_steps(500.0, 3.0) == 167);
    CHECK(window_steps(500.0, 2.0) == 250);
    CHECK(window_steps(8000.0, 10.0) == 800);
  }

  TEST_CASE("window counts match a brute-force count") {
    const auto r = test_util::random_raster(11, 400, 0.15, 4, 3.0);
    for (Timestep t : {0u, 5u, 166u, 167u, 250u, 399u}) {
      const auto counts = window_counts(r, t, 500.0);
      const auto flags = recent_activity(r, t, 500.0);
      for (TrainIndex i = 0; i < 11; ++i) {
        std::uint32_t expect = 0;
        for (Timestep s = 0; s <= t; ++s)
          if (static_cast<double>(t - s) * 3.0 < 500.0 && r.contains(i, s)) ++expect;
        CHECK(counts[i] == expect);
        CHECK(flags[i] == (expect > 0));
      }
    }
  }

  TEST_CASE("classical STDP examples") {
    SynapseMatrix w(3, 2, -0.5);
    w.at(1, 0) = -0.02;
    w.at(2, 0) = -1.0;
    const std::vector<std::uint8_t> flags{1, 0, 1};
    apply_classical_stdp(w, 0, flags, {});
    CHECK(w.at(0, 0) == Approx(-0.6).epsilon(1e-15));
    CHECK(w.at(1, 0) == 0.0);
    CHECK(w.at(2, 0) == -1.0);
    CHECK(w.at(0, 1) == -0.5);  // other columns untouched
  }

  TEST_CASE("lateral STDP examples") {
    SynapseMatrix w(2, 3, -0.5);
    const std::vector<std::uint8_t> flags{1, 0};
    apply_lateral_stdp(w, 1, flags, {});
    CHECK(w.at(0, 0) == Approx(-0.4998).epsilon(1e-15));
    CHECK(w.at(0, 1) == Approx(-0.501).epsilon(1e-15));
    CHECK(w.at(0, 2) == Approx(-0.4998).epsilon(1e-15));
    for (std::size_t j = 0; j < 3; ++j) CHECK(w.at(1, j) == -0.5);
  }

  TEST_CASE("winner on an active train moves by exactly -0.101") {
    SynapseMatrix w(1, 2, -0.4);
    const std::vector<std::uint8_t> flags{1};
    apply_classical_stdp(w, 0, flags, {});
    apply_lateral_stdp(w, 0, flags, {});
    CHECK(w.at(0, 0) == Approx(-0.501).epsilon(1e-14));
  }

  TEST_CASE("IP examples") {
    SynapseMatrix w(1, 1, -1.0);
    lts::LtsNeuronState s;
    s.th = 20;
    const std::vector<std::uint32_t> none{0};
    CHECK(apply_ip(s, w, 0, none, IpParams::preset("artificial")) == 20);
    s.th = 1000;
    CHECK(apply_ip(s, w, 0, none, IpParams::preset("neural")) == 500);
    s.th = 100;
    const std::vector<std::uint32_t> many{1000};
    CHECK(apply_ip(s, w, 0, many, IpParams::preset("vowel")) == Approx(105.0).epsilon(1e-12));
    CHECK(s.th == Approx(105.0).epsilon(1e-12));
  }

  TEST_CASE("IP scales by |w| and clips at the ceiling") {
    SynapseMatrix w(2, 1, -0.5);
    w.at(1, 0) = -0.25;
    lts::LtsNeuronState s;
    s.th = 100;
    const std::vector<std::uint32_t> counts{10, 20};
    IpParams p;
    p.f_th_post = 0.1;
    p.dth_pair = 1.0;
    CHECK(apply_ip(s, w, 0, counts, p) == Approx(90.0 + 10 * 0.5 + 20 * 0.25));
    s.th = 3000;
    const std::vector<std::uint32_t> huge{100000, 0};
    CHECK(apply_ip(s, w, 0, huge, p) == 3500);
  }

  TEST_CASE("IP raster overload agrees with explicit counts") {
    const auto r = test_util::random_raster(20, 300, 0.2, 8, 2.0);
    const auto w = SynapseMatrix::random(20, 3, 5);
    const auto p = IpParams::preset("vowel");
    lts::LtsNeuronState a, b;
    a.th = b.th = 333.0;
    apply_ip(a, w, 2, r, 299, p, 500.0);
    apply_ip(b, w, 2, window_counts(r, 299, 500.0), p);
    CHECK(a.th == b.th);
  }

  TEST_CASE("IP equilibrium matches fixed-point iteration") {
    // n_s window spikes through saturated weights each time the neuron fires.
    for (const auto* name : {"artificial", "vowel", "neural"}) {
      CAPTURE(name);
      const auto p = IpParams::preset(name);
      for (std::uint32_t n_s : {10u, 1000u, 20000u, 200000u}) {
        SynapseMatrix w(1, 1, -1.0);
        const std::vector<std::uint32_t> counts{n_s};
        lts::LtsNeuronState s;
        double oracle = s.th;
        for (int k = 0; k < 5000; ++k) {
          apply_ip(s, w, 0, counts, p);
          oracle = std::clamp(oracle - p.f_th_post * oracle + p.dth_pair * n_s, p.th_min, p.th_max);
        }
        CHECK(s.th == Approx(oracle).epsilon(1e-9));
        const double th_star = std::clamp(p.dth_pair * n_s / p.f_th_post, p.th_min, p.th_max);
        CHECK(s.th == Approx(th_star).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("random weights are seeded and lie in (-1, 0)") {
    const auto a = SynapseMatrix::random(100, 10, 42);
    CHECK(a == SynapseMatrix::random(100, 10, 42));
    CHECK_FALSE(a == SynapseMatrix::random(100, 10, 43));
    double sum = 0.0;
    for (double v : a.data()) {
      CHECK(v > -1.0);
      CHECK(v < 0.0);
      sum += v;
    }
    CHECK(sum / 1000.0 == Approx(-0.5).epsilon(0.1));
  }

  TEST_CASE("weights and thresholds stay clipped after 1e4 random events") {
    std::mt19937_64 rng(9);
    auto w = SynapseMatrix::random(50, 6, 1);
    std::vector<lts::LtsNeuronState> states(6);
    StdpParams sp;
    sp.w_ltp = -0.4;
    sp.w_ltd = 0.3;
    const auto ip = IpParams::preset("neural");
    for (int e = 0; e < 10000; ++e) {
      const std::size_t winner = rng() % 6;
      std::vector<std::uint8_t> flags(50);
      std::vector<std::uint32_t> counts(50);
      for (std::size_t i = 0; i < 50; ++i) {
        counts[i] = (rng() % 3 == 0) ? static_cast<std::uint32_t>(rng() % 4000) : 0;
        flags[i] = counts[i] > 0;
      }
      apply_classical_stdp(w, winner, flags, sp);
      apply_lateral_stdp(w, winner, flags, sp);
      apply_ip(states[winner], w, winner, counts, ip);
      for (double v : w.data()) REQUIRE((v >= -1.0 && v <= 0.0));
      for (const auto& s : states) REQUIRE((s.th >= 20.0 && s.th <= 3500.0));
    }
  }

  TEST_CASE("weight CSV round-trip is bitwise") {
    test_util::TempDir dir;
    const auto w = SynapseMatrix::random(13, 4, 77);
    save_weights_csv(w, dir / "w.csv");
    CHECK(load_weights_csv(dir / "w.csv") == w);
    CHECK(test_util::read_file(dir / "w.csv").rfind("train,0,1,2,3\n", 0) == 0);
  }
}
