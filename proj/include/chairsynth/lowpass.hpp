#pragma once

#include "chairsynth/motion.hpp"
#include "chairsynth/simd/kernels.hpp"

#include <array>
#include <vector>

namespace chairsynth {

constexpr double kDefaultCutoffHz = 5.0;

// 4th-order Butterworth low-pass as two unit-DC-gain sections.
std::array<simd::Biquad, 2> butterworth4_lowpass(double cutoff_hz, double sample_rate);

// Zero-phase forward-backward filtering of interleaved channels
// (data[t * nch + c]) with odd-reflection padding. Returns a new buffer.
std::vector<double> filtfilt(const std::array<simd::Biquad, 2>& sos, const std::vector<double>& data,
                             std::size_t nt, std::size_t nch);
std::vector<double> filtfilt(const std::array<simd::Biquad, 2>& sos, const std::vector<double>& x);

// Throws InvalidArgument unless frame_rate > 2 * cutoff_hz.
MotionSequence lowpass_filter(const MotionSequence& seq, double cutoff_hz = kDefaultCutoffHz);

}  // namespace chairsynth
