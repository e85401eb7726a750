#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include "boundcount/exact_counter.hpp"

namespace bc = boundcount;
using std::numbers::pi;

namespace {

bc::Potential builtin(bc::PotentialKind k, double g, double R = 1.0) {
  return bc::make_builtin(k, {{"g", g}, {"R", R}});
}

bc::Potential morse(double g, double alpha) {
  return bc::make_builtin(bc::PotentialKind::morse, {{"g", g}, {"R", 1.0}, {"alpha", alpha}});
}

// Zeros of j_{l-1} in (0, g), counted by sign changes on a fine grid; for
// l = 0, j_{-1}(x) = cos(x)/x.
int square_well_oracle(double g, int ell) {
  auto f = [ell](double x) {
    return ell == 0 ? std::cos(x) / x : boost::math::sph_bessel(static_cast<unsigned>(ell - 1), x);
  };
  int zeros = 0;
  const int n = 20000;
  double prev = f(g * 1e-6);
  for (int i = 1; i <= n; ++i) {
    const double cur = f(g * i / n);
    if ((prev < 0) != (cur < 0)) ++zeros;
    prev = cur;
  }
  return zeros;
}

// The S-wave zero-energy solution of -g^2 e^{-r} is J0(2g e^{-r/2}); its
// zeros in r > 0 are the zeros of J0 below 2g.
int exponential_s_wave_oracle(double g) {
  int n = 0;
  while (boost::math::cyl_bessel_j_zero(0.0, n + 1) < 2.0 * g) ++n;
  return n;
}

// Plain RK4 shooting of u'' = (V + l(l+1)/r^2) u at E = 0 with u ~ r^(l+1),
// geometric steps near the origin, then zeros of the free continuation
// A r^(l+1) + B r^(-l) beyond the end.
int shooting_oracle(const bc::Potential& p, int ell, double r_end, double h_max) {
  const double c = ell * (ell + 1.0);
  auto acc = [&](double r, double u) { return (p.value(r) + c / (r * r)) * u; };
  double r = 1e-7;
  double u = std::pow(r, ell + 1), du = (ell + 1) * std::pow(r, ell);
  int zeros = 0;
  while (r < r_end) {
    const double h = std::min({h_max, 0.02 * r, r_end - r});
    const double k1u = du, k1v = acc(r, u);
    const double k2u = du + 0.5 * h * k1v, k2v = acc(r + 0.5 * h, u + 0.5 * h * k1u);
    const double k3u = du + 0.5 * h * k2v, k3v = acc(r + 0.5 * h, u + 0.5 * h * k2u);
    const double k4u = du + h * k3v, k4v = acc(r + h, u + h * k3u);
    const double un = u + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
    du += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    if ((un < 0) != (u < 0)) ++zeros;
    u = un;
    r += h;
    // Keep the amplitude bounded; only signs matter.
    const double s = std::abs(u) + std::abs(du) * r;
    if (s > 1e100 || s < 1e-100) {
      u /= s;
      du /= s;
    }
  }
  const double A = (ell * u + r * du) / ((2.0 * ell + 1.0) * std::pow(r, ell + 1));
  if (A * u < 0) ++zeros;
  return zeros;
}

}  // namespace

TEST(SquareWell, MatchesSphericalBesselZeros) {
  for (double g : {0.9, 1.6, 3.3, 4.7, 7.9, 12.2, 20.5})
    for (int ell = 0; ell <= 4; ++ell)
      EXPECT_EQ(bc::count_partial_wave(builtin(bc::PotentialKind::square_well, g), ell).N,
                square_well_oracle(g, ell))
          << "g=" << g << " l=" << ell;
}

TEST(SquareWell, ScalesWithRadius) {
  const auto p = builtin(bc::PotentialKind::square_well, 7.9, 3.0);
  EXPECT_EQ(bc::count_partial_wave(p, 1).N, square_well_oracle(7.9, 1));
}

TEST(Exponential, SWaveMatchesBesselZeros) {
  for (double g : {0.5, 1.3, 2.0, 3.7, 6.1, 9.9, 15.2, 30.4})
    EXPECT_EQ(bc::count_partial_wave(builtin(bc::PotentialKind::exponential, g), 0).N,
              exponential_s_wave_oracle(g))
        << "g=" << g;
}

TEST(Morse, DeepWellsFollowTheHarmonicLadder) {
  for (double alpha : {1.0, 2.0})
    for (double g : {1.2, 2.3, 4.9, 7.1, 10.3, 17.6})
      EXPECT_EQ(bc::count_partial_wave(morse(g, alpha), 0).N, static_cast<int>(std::floor(g + 0.5)))
          << "alpha=" << alpha << " g=" << g;
}

TEST(Morse, ShallowOriginMatchesShooting) {
  for (double g : {2.2, 5.7, 9.1})
    for (int ell : {0, 1, 3}) {
      const auto p = morse(g, 0.2);
      EXPECT_EQ(bc::count_partial_wave(p, ell).N, shooting_oracle(p, ell, 40.0, 1e-3))
          << "g=" << g << " l=" << ell;
    }
}

TEST(Yukawa, MatchesShooting) {
  for (double g : {1.4, 3.8, 7.3})
    for (int ell : {0, 1, 2}) {
      const auto p = builtin(bc::PotentialKind::yukawa, g);
      EXPECT_EQ(bc::count_partial_wave(p, ell).N, shooting_oracle(p, ell, 40.0, 1e-3))
          << "g=" << g << " l=" << ell;
    }
}

TEST(Expression, AgreesWithBuiltin) {
  const auto e = bc::parse_potential_spec("expr:'-g^2*exp(-r)':g=6.1");
  EXPECT_EQ(bc::count_partial_wave(e, 0).N, exponential_s_wave_oracle(6.1));
  EXPECT_EQ(bc::count_partial_wave(e, 2).N,
            bc::count_partial_wave(builtin(bc::PotentialKind::exponential, 6.1), 2).N);
}

TEST(Totals, SumOverChannels) {
  const auto p = builtin(bc::PotentialKind::square_well, 7.9);
  std::vector<int> per_ell;
  const long n = bc::total_count(p, {}, &per_ell);
  long expected = 0;
  int L = -1;
  for (int ell = 0; ell < 20; ++ell) {
    const int k = square_well_oracle(7.9, ell);
    expected += (2 * ell + 1) * k;
    if (k > 0) L = ell;
  }
  EXPECT_EQ(n, expected);
  EXPECT_EQ(bc::find_L_exact(p), L);
  ASSERT_EQ(static_cast<int>(per_ell.size()), L + 1);
  for (int ell = 0; ell <= L; ++ell) EXPECT_EQ(per_ell[ell], square_well_oracle(7.9, ell));
}

TEST(Totals, NoBoundStates) {
  // Below the first zero of J0, 2g < 2.405, nothing binds.
  const auto p = builtin(bc::PotentialKind::exponential, 1.1);
  EXPECT_EQ(bc::find_L_exact(p), -1);
  EXPECT_EQ(bc::total_count(p), 0);
  const auto repulsive = bc::parse_potential_spec("expr:'exp(-r)'");
  EXPECT_EQ(bc::find_L_exact(repulsive), -1);
}

TEST(Phase, TraceCrossesMultiplesOfPi) {
  const auto p = builtin(bc::PotentialKind::exponential, 6.1);
  bc::CountOptions opt;
  opt.trace_dr = 0.25;
  const bc::CountResult c = bc::count_partial_wave(p, 0, {}, opt);
  ASSERT_FALSE(c.solution.trace.empty());
  // The node angle starts at 0 and ends between N pi and (N+1) pi.
  EXPECT_NEAR(c.solution.trace.front().y, 0.0, 1e-6);
  const double last = c.solution.trace.back().y;
  EXPECT_GE(last, (c.N - 1) * pi);
  EXPECT_LE(last, (c.N + 1) * pi);
  EXPECT_GT(c.solution.steps, 0);
}

TEST(Phase, ThresholdMarginFlagsNearZeroEnergyStates) {
  // 2g equal to the second zero of J0 puts a state exactly at threshold.
  const double g = 0.5 * boost::math::cyl_bessel_j_zero(0.0, 2);
  const bc::PhaseSolution far = bc::integrate_phase(builtin(bc::PotentialKind::exponential, 3.3), 0, 60.0, 1e-6, {});
  const bc::PhaseSolution near = bc::integrate_phase(builtin(bc::PotentialKind::exponential, g), 0, 60.0, 1e-6, {});
  EXPECT_LT(near.threshold_margin, 1e-4);
  EXPECT_GT(far.threshold_margin, 1e-2);
}

TEST(Windows, MorseNegativeRegion) {
  const auto w = bc::negative_windows(morse(3.0, 2.0));
  ASSERT_EQ(w.windows.size(), 1u);
  EXPECT_NEAR(w.windows[0].a, 2.0 - std::log(2.0), 1e-9);
  EXPECT_TRUE(std::isinf(w.windows[0].b));
  EXPECT_TRUE(w.windows[0].zero_at_a);
}

TEST(Functionals, ExponentialClosedForms) {
  // S = (2/pi) int g e^{-r/2} = 4g/pi; sigma = (2/pi) max r g e^{-r/2} = 4g/(e pi) at r = 2.
  const double g = 5.0;
  const bc::SpectralFunctionals f = bc::spectral_functionals(builtin(bc::PotentialKind::exponential, g), 0, false);
  EXPECT_NEAR(f.S, 4.0 * g / pi, 1e-9);
  EXPECT_NEAR(f.phase_total, 2.0 * g, 1e-9);
  EXPECT_NEAR(f.sigma, 4.0 * g / (std::exp(1.0) * pi), 1e-9);
  EXPECT_NEAR(f.r_sigma, 2.0, 1e-5);
  // Phase reaches pi/2 from the origin at g(2 - 2e^{-p/2}) = pi/2.
  ASSERT_TRUE(f.p);
  EXPECT_NEAR(*f.p, -2.0 * std::log(1.0 - pi / (4.0 * g)), 1e-7);
  ASSERT_TRUE(f.q);
  EXPECT_NEAR(*f.q, -2.0 * std::log(pi / (4.0 * g)), 1e-7);
}

TEST(Functionals, YukawaSigma) {
  // r |V|^{1/2} = g sqrt(r) e^{-r/2}, maximal at r = 1: sigma = 2g/(sqrt(e) pi).
  const double g = 4.0;
  const bc::SpectralFunctionals f = bc::spectral_functionals(builtin(bc::PotentialKind::yukawa, g), 0, false);
  EXPECT_NEAR(f.sigma, 2.0 * g / (std::sqrt(std::exp(1.0)) * pi), 1e-9);
  EXPECT_NEAR(f.r_sigma, 1.0, 1e-5);
  // S = (2/pi) g int r^{-1/2} e^{-r/2} = (2/pi) g sqrt(2 pi).
  EXPECT_NEAR(f.S, 2.0 / pi * g * std::sqrt(2.0 * pi), 1e-8);
}

TEST(Functionals, SquareWellEffectiveChannel) {
  // V_eff = -g^2 + 2/r^2 on r < 1: negative for r > sqrt(2)/g.
  const double g = 6.0;
  const bc::SpectralFunctionals f =
      bc::spectral_functionals(builtin(bc::PotentialKind::square_well, g), 1, true);
  const double a = std::sqrt(2.0) / g;
  // int_a^1 sqrt(g^2 - 2/r^2) dr, closed form with k = sqrt(2).
  auto F = [g](double r) {
    const double s = std::sqrt(g * g * r * r - 2.0);
    return s - std::sqrt(2.0) * std::atan(s / std::sqrt(2.0));
  };
  EXPECT_NEAR(f.phase_total, F(1.0) - F(a), 1e-8);
  EXPECT_TRUE(f.effective);
}
