#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace chairsynth::simd {

enum class Isa { Scalar, Avx2 };

bool isa_available(Isa isa);
// Best available ISA unless one was forced with set_isa.
Isa active_isa();
// Throws InvalidArgument when the ISA is not available on this machine.
void set_isa(Isa isa);
void reset_isa();
std::string_view isa_name(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

// One second-order section of a direct-form-II-transposed cascade. zi1/zi2 are
// the steady-state initial conditions for a unit step.
struct Biquad {
  double b0, b1, b2, a1, a2;
  double zi1, zi2;
};

// Filters `nch` interleaved channels (data[t * nch + c]) in place through the
// cascade. Each channel's state starts at zi scaled by its first sample.
using BiquadCascadeFn = void (*)(const Biquad* sections, std::size_t nsec, double* data,
                                 std::size_t nt, std::size_t nch);

// Structure-of-arrays batch of affine solids. Each solid is the image of a
// canonical shape under p = c + A q; the batch stores M = inverse(A) and c.
// Sizes are padded to a multiple of 4 with entries that never hit.
struct SolidBatch {
  std::vector<double> m[9];  // row-major inverse map
  std::vector<double> c[3];
  std::vector<double> h;  // capsule half-length in canonical units (0 for spheres)
  std::size_t count = 0;  // real entries; the rest is padding

  std::size_t padded() const { return h.size(); }
  void clear();
  void push(const double inv[9], const double center[3], double half_length);
  void finalize();  // pads to a multiple of 4
};

struct RayQuery {
  double o[3];
  double d[3];
  double tmax;
  // One byte per batch entry (padded length); nonzero entries are ignored.
  const std::uint8_t* skip;
};

// Smallest entry parameter, clamped below at 0, over solids the ray segment
// [0, tmax) touches. +inf when nothing is hit.
using NearestFn = double (*)(const SolidBatch& batch, const RayQuery& ray);

struct KernelTable {
  BiquadCascadeFn biquad_cascade;
  NearestFn nearest_box;
  NearestFn nearest_capsule;  // spheres are capsules with h = 0
  NearestFn nearest_cylinder;
};

const KernelTable& kernels();
const KernelTable& kernels_for(Isa isa);

namespace scalar {
extern const KernelTable table;
}
#if defined(CHAIRSYNTH_HAVE_AVX2)
namespace avx2 {
extern const KernelTable table;
}
#endif

}  // namespace chairsynth::simd
