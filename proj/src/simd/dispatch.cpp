#include "chairsynth/simd/kernels.hpp"

#include "chairsynth/common.hpp"

#include <atomic>
#include <limits>

namespace chairsynth::simd {

namespace {

std::atomic<int> forced{-1};

Isa detect() {
#if defined(CHAIRSYNTH_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2")) {
    return Isa::Avx2;
  }
#endif
  return Isa::Scalar;
}

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(CHAIRSYNTH_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  const int f = forced.load(std::memory_order_relaxed);
  return f < 0 ? detect() : static_cast<Isa>(f);
}

void set_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw InvalidArgument("instruction set '" + std::string(isa_name(isa)) +
                          "' is not available on this machine");
  }
  forced.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void reset_isa() { forced.store(-1, std::memory_order_relaxed); }

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

std::optional<Isa> parse_isa(std::string_view name) {
  if (name == "scalar") {
    return Isa::Scalar;
  }
  if (name == "avx2") {
    return Isa::Avx2;
  }
  return std::nullopt;
}

const KernelTable& kernels_for(Isa isa) {
#if defined(CHAIRSYNTH_HAVE_AVX2)
  if (isa == Isa::Avx2) {
    return avx2::table;
  }
#endif
  (void)isa;
  return scalar::table;
}

const KernelTable& kernels() { return kernels_for(active_isa()); }

void SolidBatch::clear() {
  for (auto& v : m) {
    v.clear();
  }
  for (auto& v : c) {
    v.clear();
  }
  h.clear();
  count = 0;
}

void SolidBatch::push(const double inv[9], const double center[3], double half_length) {
  for (int i = 0; i < 9; ++i) {
    m[i].push_back(inv[i]);
  }
  for (int i = 0; i < 3; ++i) {
    c[i].push_back(center[i]);
  }
  h.push_back(half_length);
  count = h.size();
}

void SolidBatch::finalize() {
  // Padding solids are tiny and far away so no finite ray segment reaches them.
  const double far = 1e30;
  const double inv[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  const double center[3] = {far, far, far};
  const std::size_t real = count;
  while (h.size() % 4 != 0) {
    push(inv, center, 0.0);
  }
  count = real;
}

}  // namespace chairsynth::simd
