#include "chairsynth/lowpass.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace chairsynth {

std::array<simd::Biquad, 2> butterworth4_lowpass(double cutoff_hz, double sample_rate) {
  if (!(cutoff_hz > 0.0) || !(sample_rate > 2.0 * cutoff_hz)) {
    throw InvalidArgument("low-pass needs 0 < cutoff < sample_rate / 2 (cutoff " +
                          std::to_string(cutoff_hz) + " Hz, rate " + std::to_string(sample_rate) +
                          " Hz)");
  }
  constexpr int kOrder = 4;
  const double fs2 = 2.0 * sample_rate;
  const double warped = fs2 * std::tan(kPi * cutoff_hz / sample_rate);
  std::array<simd::Biquad, 2> out{};
  for (int k = 0; k < kOrder / 2; ++k) {
    const double theta = kPi * (2.0 * k + kOrder + 1) / (2.0 * kOrder);
    const std::complex<double> s = warped * std::polar(1.0, theta);
    const std::complex<double> z = (fs2 + s) / (fs2 - s);
    simd::Biquad q{};
    q.a1 = -2.0 * z.real();
    q.a2 = std::norm(z);
    const double g = (1.0 + q.a1 + q.a2) / 4.0;
    q.b0 = g;
    q.b1 = 2.0 * g;
    q.b2 = g;
    // Steady state of the transposed direct form under a unit step.
    const double dc = (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
    q.zi2 = q.b2 - q.a2 * dc;
    q.zi1 = q.b1 - q.a1 * dc + q.zi2;
    out[k] = q;
  }
  return out;
}

std::vector<double> filtfilt(const std::array<simd::Biquad, 2>& sos, const std::vector<double>& data,
                             std::size_t nt, std::size_t nch) {
  if (data.size() != nt * nch) {
    throw InvalidArgument("filtfilt: buffer size does not match nt * nch");
  }
  if (nt == 0) {
    return {};
  }
  const std::size_t pad = std::min<std::size_t>(15, nt - 1);
  const std::size_t ne = nt + 2 * pad;
  std::vector<double> ext(ne * nch);
  auto at = [&](std::size_t t, std::size_t c) { return data[t * nch + c]; };
  for (std::size_t c = 0; c < nch; ++c) {
    const double first = at(0, c);
    const double last = at(nt - 1, c);
    for (std::size_t i = 0; i < pad; ++i) {
      ext[i * nch + c] = 2.0 * first - at(pad - i, c);
      ext[(pad + nt + i) * nch + c] = 2.0 * last - at(nt - 2 - i, c);
    }
    for (std::size_t t = 0; t < nt; ++t) {
      ext[(pad + t) * nch + c] = at(t, c);
    }
  }
  const auto& k = simd::kernels();
  k.biquad_cascade(sos.data(), sos.size(), ext.data(), ne, nch);
  auto reverse_rows = [&]() {
    for (std::size_t a = 0, b = ne - 1; a < b; ++a, --b) {
      std::swap_ranges(ext.begin() + a * nch, ext.begin() + (a + 1) * nch, ext.begin() + b * nch);
    }
  };
  reverse_rows();
  k.biquad_cascade(sos.data(), sos.size(), ext.data(), ne, nch);
  reverse_rows();
  return std::vector<double>(ext.begin() + pad * nch, ext.begin() + (pad + nt) * nch);
}

std::vector<double> filtfilt(const std::array<simd::Biquad, 2>& sos, const std::vector<double>& x) {
  return filtfilt(sos, x, x.size(), 1);
}

MotionSequence lowpass_filter(const MotionSequence& seq, double cutoff_hz) {
  if (!(seq.frame_rate > 2.0 * cutoff_hz)) {
    throw InvalidArgument("frame rate " + std::to_string(seq.frame_rate) +
                          " fps is at or below twice the " + std::to_string(cutoff_hz) +
                          " Hz cutoff");
  }
  if (seq.frames.empty()) {
    return seq;
  }
  const auto sos = butterworth4_lowpass(cutoff_hz, seq.frame_rate);
  const std::size_t nt = seq.frames.size();
  const std::size_t nj = seq.frames.front().size();
  const std::size_t nch = nj * 3;
  std::vector<double> buf(nt * nch);
  for (std::size_t t = 0; t < nt; ++t) {
    if (seq.frames[t].size() != nj) {
      throw InvalidArgument("frame " + std::to_string(t) + " has a different joint count");
    }
    for (std::size_t j = 0; j < nj; ++j) {
      for (int d = 0; d < 3; ++d) {
        buf[t * nch + j * 3 + d] = seq.frames[t][j][d];
      }
    }
  }
  const auto y = filtfilt(sos, buf, nt, nch);
  MotionSequence out = seq;
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t j = 0; j < nj; ++j) {
      out.frames[t][j] = Vec3(y[t * nch + j * 3], y[t * nch + j * 3 + 1], y[t * nch + j * 3 + 2]);
    }
  }
  return out;
}

}  // namespace chairsynth
