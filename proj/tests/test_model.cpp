#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "collapse/model.hpp"
#include "collapse/rng.hpp"

using namespace collapse;
using Catch::Approx;

namespace {

// Literal term-by-term transcription of the two-state coupling expression,
// kept independent of coupling_general on purpose.
int coupling_oracle(int alpha_n, int alpha_other) {
  const auto heaviside = [](double v) { return v > 0.0 ? 1 : 0; };
  const int sum_pos = heaviside(alpha_other);
  const int sum_not_neg = 1 - heaviside(-alpha_other);
  return (1 - 2 * sum_pos) * alpha_n +
         (1 - sum_pos) * heaviside(sum_not_neg) * (1 - alpha_n);
}

// Scalar RK4 for dx/dt = rate * x(1 - x^2) / 2 (tau_r = 1), independent of
// the production integrator; cross-checks the closed form.
double rk4_weight(double x0, int rate, double t_end, int steps) {
  const double h = t_end / steps;
  const auto f = [&](double x) { return rate * x * (1.0 - x * x) / 2.0; };
  double x = x0;
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(x);
    const double k2 = f(x + 0.5 * h * k1);
    const double k3 = f(x + 0.5 * h * k2);
    const double k4 = f(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

}  // namespace

TEST_CASE("heaviside convention") {
  CHECK(heaviside_plus(0.0) == 0);
  CHECK(heaviside_plus(-0.0) == 0);
  CHECK(heaviside_plus(1e-300) == 1);
  CHECK(heaviside_plus(-1e-300) == 0);
  CHECK(heaviside_plus(2.0) == 1);
}

TEST_CASE("branch_sign") {
  CHECK(branch_sign(0.0) == +1);
  CHECK(branch_sign(std::numbers::pi) == -1);
  CHECK_THROWS_AS(branch_sign(std::numbers::pi / 2.0), DegeneratePhase);
  CHECK_THROWS_AS(branch_sign(0.0, 0.0), std::invalid_argument);

  SECTION("agrees with the sign of cos away from the singularity") {
    SplitMix64 rng{42};
    for (int i = 0; i < 2000; ++i) {
      const double theta = kTwoPi * rng.next_double();
      if (std::abs(std::cos(theta)) < 1e-9) continue;
      CHECK(branch_sign(theta) == (std::cos(theta) > 0.0 ? +1 : -1));
    }
  }
}

TEST_CASE("shift_phase") {
  CHECK(shift_phase(0.0, 0.5) == 0.0);
  CHECK(shift_phase(std::numbers::pi, 0.5) == Approx(std::numbers::pi / 2.0));
  CHECK(shift_phase(std::numbers::pi, 0.75) ==
        Approx(std::numbers::pi / 4.0).margin(1e-15));
  // result is deliberately not reduced mod 2*pi
  CHECK(shift_phase(0.0, 1.0) == Approx(-std::numbers::pi / 2.0));
  CHECK_THROWS_AS(shift_phase(-0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(shift_phase(kTwoPi, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(shift_phase(0.0, 1.5), std::invalid_argument);
}

TEST_CASE("coupling truth table") {
  struct Row {
    int a1, a2, rate1, rate2;
  };
  // full truth table: anticorrelated signs collapse, correlated ones do not
  const Row rows[] = {
      {+1, -1, +1, -1},
      {-1, +1, -1, +1},
      {+1, +1, -1, -1},
      {-1, -1, +1, +1},
  };
  for (const Row& row : rows) {
    BranchSigns signs;
    signs.alpha = {row.a1, row.a2};
    const CouplingResult result = coupling(signs);
    CAPTURE(row.a1, row.a2);
    CHECK(result.rate[0] == row.rate1);
    CHECK(result.rate[1] == row.rate2);
    CHECK(result.f[0] == coupling_oracle(row.a1, row.a2));
    CHECK(result.f[1] == coupling_oracle(row.a2, row.a1));
    CHECK(result.rate[0] == result.f[0] * row.a1);
    CHECK(result.rate[1] == result.f[1] * row.a2);
  }

  SECTION("rates are signs for two states") {
    for (int a1 : {-1, +1})
      for (int a2 : {-1, +1}) {
        const auto rate = coupling({{a1, a2}}).rate;
        CHECK((rate[0] == -1 || rate[0] == +1));
        CHECK((rate[1] == -1 || rate[1] == +1));
      }
  }

  CHECK_THROWS_AS(coupling({{0, 1}}), std::invalid_argument);
}

TEST_CASE("closed_form_x") {
  SECTION("identity at t = 0") {
    SplitMix64 rng{7};
    for (int i = 0; i < 500; ++i) {
      const double x0 = 1e-6 + (1.0 - 2e-6) * rng.next_double();
      for (int rate : {-1, +1})
        CHECK(closed_form_x(x0, rate, 0.0, 1.0) == Approx(x0).margin(1e-14));
    }
    CHECK(closed_form_x(1.0, +1, 0.0, 1.0) == 1.0);
  }

  SECTION("frozen values, tau_r scaling") {
    CHECK(closed_form_x(0.6, +1, 2.0, 1.0) ==
          Approx(0.8978107504719887).margin(1e-12));
    CHECK(closed_form_x(0.6, -1, 2.0, 1.0) ==
          Approx(0.2659715595064699).margin(1e-12));
    // only t/tau_r matters
    CHECK(closed_form_x(0.6, +1, 2e-14, 1e-14) ==
          Approx(0.8978107504719887).margin(1e-12));
  }

  SECTION("independent RK4 cross-check") {
    for (int rate : {-1, +1}) {
      const double expected = closed_form_x(0.6, rate, 2.0, 1.0);
      CHECK(rk4_weight(0.6, rate, 2.0, 20000) ==
            Approx(expected).margin(1e-10));
    }
  }

  SECTION("x0 = 1 is a fixed point") {
    for (int rate : {-1, +1})
      for (double t : {0.0, 0.5, 10.0, 300.0})
        CHECK(closed_form_x(1.0, rate, t, 1.0) == 1.0);
  }

  SECTION("x0 = 0 behaviour") {
    CHECK(closed_form_x(0.0, -1, 3.0, 1.0) == 0.0);
    CHECK_THROWS_AS(closed_form_x(0.0, +1, 3.0, 1.0), InvalidInitialWeight);
  }

  SECTION("strict monotonicity in t") {
    SplitMix64 rng{11};
    for (int i = 0; i < 200; ++i) {
      const double x0 = 0.01 + 0.98 * rng.next_double();
      double prev_up = 0.0, prev_down = 1.0;
      bool first = true;
      for (double t = 0.0; t <= 5.0; t += 0.25) {
        const double up = closed_form_x(x0, +1, t, 1.0);
        const double down = closed_form_x(x0, -1, t, 1.0);
        if (!first) {
          CHECK(up > prev_up);
          CHECK(down < prev_down);
        }
        prev_up = up;
        prev_down = down;
        first = false;
      }
    }
  }

  SECTION("preconditions") {
    CHECK_THROWS_AS(closed_form_x(0.5, 0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(closed_form_x(0.5, +1, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(closed_form_x(0.5, +1, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(closed_form_x(1.5, +1, 1.0, 1.0), std::invalid_argument);
  }
}

TEST_CASE("q observable") {
  TwoStateConfig config;
  config.x0 = {0.5, 0.5};
  config.tau_r = 1.0;

  CHECK(q_of_t(config, {{+1, -1}}, 0.0) == 0.0);
  CHECK(q_of_t(config, {{+1, -1}}, 10.0) ==
        Approx(0.9960417809823833).margin(1e-12));

  SECTION("mirror symmetry of the two sign orders") {
    for (double t : {0.1, 1.0, 5.0, 20.0})
      CHECK(q_of_t(config, {{-1, +1}}, t) ==
            Approx(-q_of_t(config, {{+1, -1}}, t)).margin(1e-15));
  }

  SECTION("sign-argmax consistency") {
    for (double t = 0.01; t <= 10.0; t *= 2.0) {
      const double x1 = closed_form_x(0.5, +1, t, 1.0);
      const double x2 = closed_form_x(0.5, -1, t, 1.0);
      CHECK(x1 > x2);
    }
  }

  SECTION("normalization holds only asymptotically") {
    const auto sum_at = [&](double t) {
      return closed_form_x(0.5, +1, t, 1.0) + closed_form_x(0.5, -1, t, 1.0);
    };
    CHECK(std::abs(sum_at(50.0) - 1.0) < 1e-6);
    double max_dev = 0.0;
    for (double t = 0.05; t <= 5.0; t += 0.05)
      max_dev = std::max(max_dev, std::abs(sum_at(t) - 1.0));
    CHECK(max_dev > 1e-3);  // the transient is real
  }
}

TEST_CASE("TwoStateConfig validation") {
  TwoStateConfig config;
  config.x0 = {0.6, 0.6};
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.x0 = {0.6, 0.4};
  config.tau_r = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.tau_r = 1e-14;
  CHECK_NOTHROW(config.validate());
}

TEST_CASE("coupling_general beyond two states") {
  // three states, all positive: every component must decay
  const std::array<int, 3> all_pos = {+1, +1, +1};
  const auto f3 = coupling_general(std::span<const int>(all_pos));
  for (int n = 0; n < 3; ++n) CHECK(f3[n] * all_pos[n] < 0);

  // one positive among three: it is the survivor
  const std::array<int, 3> one_pos = {+1, -1, -1};
  const auto f1 = coupling_general(std::span<const int>(one_pos));
  CHECK(f1[0] * one_pos[0] == +1);
  CHECK(f1[1] * one_pos[1] == -1);
  CHECK(f1[2] * one_pos[2] == -1);
}
