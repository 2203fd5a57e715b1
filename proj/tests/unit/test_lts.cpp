#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "frugal_snn/error.hpp"
#include "frugal_snn/lts.hpp"

using namespace frugal_snn;
using doctest::Approx;

namespace {

using Vec2 = std::array<double, 2>;

Vec2 derivative(const Vec2& x, double i_stim, const lts::LtsParams& p) {
  const double f = x[0] < 0.0 ? p.alpha_n * x[0] : p.alpha_p;
  return {(-x[0] + x[1] + p.g * i_stim) / p.tau_m_ms, p.epsilon * (-x[1] + f) / p.tau_m_ms};
}

// Classical fourth-order Runge-Kutta over `steps` substeps of h.
Vec2 rk4(Vec2 x, double i_stim, const lts::LtsParams& p, double h, int steps) {
  for (int n = 0; n < steps; ++n) {
    const auto k1 = derivative(x, i_stim, p);
    const auto k2 = derivative({x[0] + h / 2 * k1[0], x[1] + h / 2 * k1[1]}, i_stim, p);
    const auto k3 = derivative({x[0] + h / 2 * k2[0], x[1] + h / 2 * k2[1]}, i_stim, p);
    const auto k4 = derivative({x[0] + h * k3[0], x[1] + h * k3[1]}, i_stim, p);
    for (int d = 0; d < 2; ++d) x[d] += h / 6 * (k1[d] + 2 * k2[d] + 2 * k3[d] + k4[d]);
  }
  return x;
}

// Exact solution of the linear (V < 0) system x' = A x + b by eigen-decomposition.
struct LinearSolution {
  double l1, l2;
  Vec2 e1, e2, xs;
  double c1, c2;

  LinearSolution(const lts::LtsParams& p, double i_stim, Vec2 x0) {
    const double a = -1.0 / p.tau_m_ms, b = 1.0 / p.tau_m_ms;
    const double c = p.epsilon * p.alpha_n / p.tau_m_ms, d = -p.epsilon / p.tau_m_ms;
    const double tr = a + d, det = a * d - b * c;
    const double disc = std::sqrt(tr * tr / 4 - det);
    REQUIRE(tr * tr / 4 - det > 0.0);  // real eigenvalues for the presets used
    l1 = tr / 2 + disc;
    l2 = tr / 2 - disc;
    e1 = {b, l1 - a};
    e2 = {b, l2 - a};
    // Fixed point: A xs = -(g i / tau, 0).
    const double r0 = -p.g * i_stim / p.tau_m_ms;
    xs = {(r0 * d) / det, (-c * r0) / det};
    const double y0 = x0[0] - xs[0], y1 = x0[1] - xs[1];
    const double den = e1[0] * e2[1] - e2[0] * e1[1];
    c1 = (y0 * e2[1] - e2[0] * y1) / den;
    c2 = (e1[0] * y1 - y0 * e1[1]) / den;
  }

  Vec2 at(double t) const {
    const double a = c1 * std::exp(l1 * t), b = c2 * std::exp(l2 * t);
    return {xs[0] + a * e1[0] + b * e2[0], xs[1] + a * e1[1] + b * e2[1]};
  }
};

}  // namespace

TEST_SUITE("lts") {
  TEST_CASE("preset constants") {
    const auto a = lts::LtsParams::artificial();
    CHECK(a.tau_m_ms == 15);
    CHECK(a.epsilon == 0.001);
    CHECK(a.alpha_n == -200);
    CHECK(a.alpha_p == -10);
    CHECK(a.g == 100);
    const auto v = lts::LtsParams::vowel();
    CHECK(v.epsilon == 0.01);
    CHECK(v.tau_m_ms == 15);
    const auto n = lts::LtsParams::neural();
    CHECK(n.tau_m_ms == 50);
    CHECK(n.epsilon == 0.001);
    CHECK(lts::LtsParams::preset("neural") == n);
    CHECK_THROWS_AS(lts::LtsParams::preset("bogus"), ConfigError);
    lts::LtsParams bad;
    bad.dt_ms = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }

  TEST_CASE("step from rest takes the alpha_p branch at v = 0") {
    const auto p = lts::LtsParams::artificial();
    lts::LtsNeuronState s;
    lts::step(s, 0.0, p);
    CHECK(s.v == 0.0);
    CHECK(s.q == Approx(1.0 * 0.001 / 15.0 * -10.0).epsilon(1e-15));
    CHECK(s.last_dv == 0.0);
  }

  TEST_CASE("constant inhibition reaches the analytic fixed point") {
    const auto p = lts::LtsParams::artificial();
    lts::LtsNeuronState s;
    for (int t = 0; t < 200'000; ++t) lts::step(s, -1.0, p);
    const double v_star = -100.0 / 201.0;
    CHECK(std::abs(s.v - v_star) <= 0.01 * std::abs(v_star));
    CHECK(s.q == Approx(-200.0 * v_star).epsilon(0.01));
  }

  TEST_CASE("rebound: removing inhibition drives v upward through zero") {
    for (const auto* name : {"artificial", "vowel", "neural"}) {
      CAPTURE(name);
      const auto p = lts::LtsParams::preset(name);
      lts::LtsNeuronState s;
      // At least 5 tau_m, and long enough for the slow adaptation mode to settle.
      const int inhibit = static_cast<int>(std::ceil(5 * p.tau_m_ms / p.epsilon / p.dt_ms));
      for (int t = 0; t < inhibit; ++t) lts::step(s, -1.0, p);
      REQUIRE(s.v < 0.0);
      bool crossed = false;
      const int window = static_cast<int>(std::ceil(10 * p.tau_m_ms / p.dt_ms));
      for (int t = 0; t < window && !crossed; ++t) {
        const double before = s.v;
        lts::step(s, 0.0, p);
        crossed = before < 0.0 && s.v >= 0.0;
      }
      CHECK(crossed);
    }
  }

  TEST_CASE("Euler converges to a fine-step RK4 reference at first order") {
    // Relative error: max |v_euler - v_ref| over max |v_ref| along 1000 ms of
    // inhibition from rest.
    auto error_at = [](lts::LtsParams p, double dt) {
      p.dt_ms = dt;
      const int steps = static_cast<int>(std::lround(1000.0 / dt));
      const int sub = static_cast<int>(std::lround(dt / 0.01));
      lts::LtsNeuronState s;
      Vec2 ref{0.0, 0.0};
      double max_err = 0.0, max_ref = 0.0;
      for (int t = 0; t < steps; ++t) {
        lts::step(s, -1.0, p);
        ref = rk4(ref, -1.0, p, dt / sub, sub);
        max_err = std::max(max_err, std::abs(s.v - ref[0]));
        max_ref = std::max(max_ref, std::abs(ref[0]));
      }
      return max_err / max_ref;
    };
    CHECK(error_at(lts::LtsParams::neural(), 1.0) <= 0.01);
    const auto art = lts::LtsParams::artificial();
    const double e1 = error_at(art, 1.0), e05 = error_at(art, 0.5), e025 = error_at(art, 0.25);
    CHECK(e05 <= 0.01);
    CHECK(e1 / e05 == Approx(2.0).epsilon(0.1));
    CHECK(e05 / e025 == Approx(2.0).epsilon(0.1));
  }

  TEST_CASE("linear regime matches the eigen-decomposition closed form") {
    for (const auto* name : {"artificial", "neural"}) {
      CAPTURE(name);
      auto p = lts::LtsParams::preset(name);
      p.dt_ms = std::string(name) == "neural" ? 1.0 : 0.5;
      const Vec2 x0{-0.05, 0.0};
      const LinearSolution exact(p, -1.0, x0);
      lts::LtsNeuronState s;
      s.v = x0[0];
      double max_err = 0.0, max_ref = 0.0;
      const int steps = static_cast<int>(std::lround(1000.0 / p.dt_ms));
      for (int t = 1; t <= steps; ++t) {
        lts::step(s, -1.0, p);
        REQUIRE(s.v < 0.0);
        const auto x = exact.at(t * p.dt_ms);
        max_err = std::max(max_err, std::abs(s.v - x[0]));
        max_ref = std::max(max_ref, std::abs(x[0]));
      }
      CHECK(max_err / max_ref <= 0.01);
      CHECK(exact.xs[0] == Approx(p.g * -1.0 / (1.0 - p.alpha_n)).epsilon(1e-12));
    }
  }

  TEST_CASE("bounded input keeps the state finite over 1e6 steps") {
    for (const auto* name : {"artificial", "vowel", "neural"}) {
      CAPTURE(name);
      const auto p = lts::LtsParams::preset(name);
      std::mt19937_64 rng(1);
      std::uniform_real_distribution<double> u(-2.0, 0.0);
      lts::LtsNeuronState s;
      double peak = 0.0;
      for (int t = 0; t < 1'000'000; ++t) {
        lts::step(s, (t / 997) % 2 ? u(rng) : 0.0, p);
        peak = std::max({peak, std::abs(s.v), std::abs(s.q)});
      }
      CHECK(std::isfinite(peak));
      CHECK(peak < 1e4);
    }
  }

  TEST_CASE("last_dv is the exact difference of consecutive v") {
    const auto p = lts::LtsParams::vowel();
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3.0, 0.0);
    lts::LtsNeuronState s;
    for (int t = 0; t < 10000; ++t) {
      const double before = s.v;
      lts::step(s, u(rng), p);
      CHECK(s.last_dv == s.v - before);
    }
  }

  TEST_CASE("reset clears v, q and last_dv and keeps th") {
    lts::LtsNeuronState s{1.5, -3.0, 157.3, 0.2};
    lts::reset(s);
    CHECK(s.v == 0.0);
    CHECK(s.q == 0.0);
    CHECK(s.last_dv == 0.0);
    CHECK(s.th == 157.3);
    const auto once = s;
    lts::reset(s);
    CHECK(s == once);
  }
}
