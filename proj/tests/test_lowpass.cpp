#include "doctest.h"

#include "chairsynth/lowpass.hpp"
#include "chairsynth/rng.hpp"

#include <cmath>

using namespace chairsynth;

namespace {

// Amplitude of the best-fit sinusoid at frequency f over samples [lo, hi).
double fitted_amplitude(const std::vector<double>& x, double f, double fs, std::size_t lo,
                        std::size_t hi) {
  double ss = 0, sc = 0, cc = 0, xs = 0, xc = 0;
  for (std::size_t t = lo; t < hi; ++t) {
    const double w = 2.0 * kPi * f * static_cast<double>(t) / fs;
    const double s = std::sin(w);
    const double c = std::cos(w);
    ss += s * s;
    sc += s * c;
    cc += c * c;
    xs += x[t] * s;
    xc += x[t] * c;
  }
  const double det = ss * cc - sc * sc;
  const double a = (xs * cc - xc * sc) / det;
  const double b = (xc * ss - xs * sc) / det;
  return std::hypot(a, b);
}

std::vector<double> tone(double f, double fs, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) {
    x[t] = std::sin(2.0 * kPi * f * static_cast<double>(t) / fs);
  }
  return x;
}

// Forward-backward magnitude of a bilinear-transformed 4th-order Butterworth.
double analytic_gain(double f, double fc, double fs) {
  const double r = std::tan(kPi * f / fs) / std::tan(kPi * fc / fs);
  return 1.0 / (1.0 + std::pow(r, 8));
}

}  // namespace

TEST_CASE("sections have unit DC gain") {
  for (const double fs : {20.0, 60.0, 120.0}) {
    const auto sos = butterworth4_lowpass(5.0, fs);
    double g = 1.0;
    for (const auto& s : sos) {
      g *= (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    }
    CHECK(g == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("constant signal passes unchanged") {
  const auto sos = butterworth4_lowpass(5.0, 20.0);
  const std::vector<double> x(57, 3.25);
  const auto y = filtfilt(sos, x);
  for (const double v : y) {
    CHECK(std::abs(v - 3.25) < 1e-9);
  }
}

TEST_CASE("tone gains at 60 fps with a 5 Hz cutoff") {
  const double fs = 60.0;
  const auto sos = butterworth4_lowpass(5.0, fs);
  const std::size_t n = 1200;
  const auto y1 = filtfilt(sos, tone(1.0, fs, n));
  const double g1 = fitted_amplitude(y1, 1.0, fs, 200, n - 200);
  CHECK(g1 >= 0.99);
  CHECK(g1 <= 1.01);
  const auto y10 = filtfilt(sos, tone(10.0, fs, n));
  const double g10 = fitted_amplitude(y10, 10.0, fs, 200, n - 200);
  CHECK(g10 <= 0.05);
  CHECK(g10 == doctest::Approx(analytic_gain(10.0, 5.0, fs)).epsilon(0.02));
}

TEST_CASE("gain matches the analytic response across the band") {
  const double fs = 60.0;
  const auto sos = butterworth4_lowpass(5.0, fs);
  for (const double f : {0.5, 2.0, 4.0, 5.0, 6.0, 8.0}) {
    const auto y = filtfilt(sos, tone(f, fs, 2400));
    const double g = fitted_amplitude(y, f, fs, 400, 2000);
    CHECK(g == doctest::Approx(analytic_gain(f, 5.0, fs)).epsilon(1e-3));
  }
  const auto y = filtfilt(sos, tone(5.0, fs, 2400));
  CHECK(fitted_amplitude(y, 5.0, fs, 400, 2000) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("impulse response is symmetric") {
  const auto sos = butterworth4_lowpass(5.0, 60.0);
  std::vector<double> x(401, 0.0);
  x[200] = 1.0;
  const auto y = filtfilt(sos, x);
  for (std::size_t k = 1; k < 200; ++k) {
    CHECK(std::abs(y[200 - k] - y[200 + k]) < 1e-9);
  }
  CHECK(y[200] > y[199]);
}

TEST_CASE("filtering is linear") {
  Rng rng(7);
  const auto sos = butterworth4_lowpass(5.0, 20.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 10 + rng.below(200);
    std::vector<double> a(n), b(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.uniform(-1, 1);
      b[i] = rng.uniform(-5, 5);
      ab[i] = a[i] + b[i];
    }
    const auto fa = filtfilt(sos, a);
    const auto fb = filtfilt(sos, b);
    const auto fab = filtfilt(sos, ab);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(fab[i] - (fa[i] + fb[i])) < 1e-9);
    }
  }
}

TEST_CASE("interleaved channels filter independently") {
  Rng rng(11);
  const auto sos = butterworth4_lowpass(5.0, 30.0);
  const std::size_t nt = 90;
  const std::size_t nch = 7;
  std::vector<double> data(nt * nch);
  for (auto& v : data) {
    v = rng.normal(0, 1);
  }
  const auto all = filtfilt(sos, data, nt, nch);
  for (std::size_t c = 0; c < nch; ++c) {
    std::vector<double> ch(nt);
    for (std::size_t t = 0; t < nt; ++t) {
      ch[t] = data[t * nch + c];
    }
    const auto one = filtfilt(sos, ch);
    for (std::size_t t = 0; t < nt; ++t) {
      CHECK(one[t] == all[t * nch + c]);
    }
  }
}

TEST_CASE("motion filtering") {
  const auto s = default_skeleton();
  MotionSequence m;
  m.frame_rate = 20.0;
  for (int f = 0; f < 40; ++f) {
    m.frames.push_back(s.rest_positions());
  }
  SUBCASE("still clip is unchanged") {
    const auto out = lowpass_filter(m);
    REQUIRE(out.size() == m.size());
    for (std::size_t f = 0; f < m.size(); ++f) {
      for (std::size_t j = 0; j < s.size(); ++j) {
        CHECK((out.frames[f][j] - m.frames[f][j]).norm() < 1e-9);
      }
    }
  }
  SUBCASE("single frame keeps its pose") {
    m.frames.resize(1);
    const auto out = lowpass_filter(m);
    REQUIRE(out.size() == 1);
    for (std::size_t j = 0; j < s.size(); ++j) {
      CHECK((out.frames[0][j] - m.frames[0][j]).norm() < 1e-12);
    }
  }
  SUBCASE("cutoff at or above Nyquist is rejected") {
    m.frame_rate = 10.0;
    CHECK_THROWS_AS(lowpass_filter(m, 5.0), InvalidArgument);
    m.frame_rate = 9.0;
    CHECK_THROWS_AS(lowpass_filter(m, 5.0), InvalidArgument);
  }
}
