#include "chairsynth/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <cstring>
#include <limits>

namespace chairsynth::simd::avx2 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kParallelEps = 1e-15;
constexpr double kParallelEps2 = 1e-30;

using V = __m256d;

inline V splat(double x) { return _mm256_set1_pd(x); }
inline V vabs(V x) { return _mm256_andnot_pd(splat(-0.0), x); }
inline V sel(V mask, V yes, V no) { return _mm256_blendv_pd(no, yes, mask); }
inline V lt(V a, V b) { return _mm256_cmp_pd(a, b, _CMP_LT_OQ); }
inline V le(V a, V b) { return _mm256_cmp_pd(a, b, _CMP_LE_OQ); }
inline V gt(V a, V b) { return _mm256_cmp_pd(a, b, _CMP_GT_OQ); }
inline V ge(V a, V b) { return _mm256_cmp_pd(a, b, _CMP_GE_OQ); }

struct Interval {
  V lo;
  V hi;
};

struct Local {
  V o[3];
  V d[3];
};

inline Local to_local(const SolidBatch& b, std::size_t i, const RayQuery& r) {
  const V p0 = _mm256_sub_pd(splat(r.o[0]), _mm256_loadu_pd(&b.c[0][i]));
  const V p1 = _mm256_sub_pd(splat(r.o[1]), _mm256_loadu_pd(&b.c[1][i]));
  const V p2 = _mm256_sub_pd(splat(r.o[2]), _mm256_loadu_pd(&b.c[2][i]));
  const V d0 = splat(r.d[0]);
  const V d1 = splat(r.d[1]);
  const V d2 = splat(r.d[2]);
  Local l;
  for (int k = 0; k < 3; ++k) {
    const V m0 = _mm256_loadu_pd(&b.m[3 * k][i]);
    const V m1 = _mm256_loadu_pd(&b.m[3 * k + 1][i]);
    const V m2 = _mm256_loadu_pd(&b.m[3 * k + 2][i]);
    l.o[k] = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(m0, p0), _mm256_mul_pd(m1, p1)),
                           _mm256_mul_pd(m2, p2));
    l.d[k] = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(m0, d0), _mm256_mul_pd(m1, d1)),
                           _mm256_mul_pd(m2, d2));
  }
  return l;
}

inline Interval slab(V o, V d, V half) {
  const V parallel = lt(vabs(d), splat(kParallelEps));
  const V ds = sel(parallel, splat(1.0), d);
  const V nhalf = _mm256_sub_pd(_mm256_setzero_pd(), half);
  const V t0 = _mm256_div_pd(_mm256_sub_pd(nhalf, o), ds);
  const V t1 = _mm256_div_pd(_mm256_sub_pd(half, o), ds);
  const V inside = le(vabs(o), half);
  const V lo = _mm256_min_pd(t0, t1);
  const V hi = _mm256_max_pd(t0, t1);
  const V plo = sel(inside, splat(-kInf), splat(kInf));
  const V phi = sel(inside, splat(kInf), splat(-kInf));
  return {sel(parallel, plo, lo), sel(parallel, phi, hi)};
}

inline Interval cylinder_piece(const Local& l, V h) {
  const V a = _mm256_add_pd(_mm256_mul_pd(l.d[0], l.d[0]), _mm256_mul_pd(l.d[2], l.d[2]));
  const V b = _mm256_add_pd(_mm256_mul_pd(l.o[0], l.d[0]), _mm256_mul_pd(l.o[2], l.d[2]));
  const V c = _mm256_sub_pd(
      _mm256_add_pd(_mm256_mul_pd(l.o[0], l.o[0]), _mm256_mul_pd(l.o[2], l.o[2])), splat(1.0));
  const V disc = _mm256_sub_pd(_mm256_mul_pd(b, b), _mm256_mul_pd(a, c));
  const V parallel = lt(a, splat(kParallelEps2));
  const V as = sel(parallel, splat(1.0), a);
  const V sq = _mm256_sqrt_pd(_mm256_max_pd(disc, _mm256_setzero_pd()));
  const V nb = _mm256_sub_pd(_mm256_setzero_pd(), b);
  const V r0 = _mm256_div_pd(_mm256_sub_pd(nb, sq), as);
  const V r1 = _mm256_div_pd(_mm256_add_pd(nb, sq), as);
  const V hit = ge(disc, _mm256_setzero_pd());
  const V inside = le(c, _mm256_setzero_pd());
  const V rlo = sel(parallel, sel(inside, splat(-kInf), splat(kInf)), sel(hit, r0, splat(kInf)));
  const V rhi = sel(parallel, sel(inside, splat(kInf), splat(-kInf)), sel(hit, r1, splat(-kInf)));
  const Interval s = slab(l.o[1], l.d[1], h);
  const V lo = _mm256_max_pd(rlo, s.lo);
  const V hi = _mm256_min_pd(rhi, s.hi);
  const V empty = gt(lo, hi);
  return {sel(empty, splat(kInf), lo), sel(empty, splat(-kInf), hi)};
}

inline Interval sphere(const Local& l, V ey) {
  const V qy = _mm256_sub_pd(l.o[1], ey);
  const V a = _mm256_add_pd(
      _mm256_add_pd(_mm256_mul_pd(l.d[0], l.d[0]), _mm256_mul_pd(l.d[1], l.d[1])),
      _mm256_mul_pd(l.d[2], l.d[2]));
  const V b = _mm256_add_pd(
      _mm256_add_pd(_mm256_mul_pd(l.d[0], l.o[0]), _mm256_mul_pd(l.d[1], qy)),
      _mm256_mul_pd(l.d[2], l.o[2]));
  const V c = _mm256_sub_pd(
      _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(l.o[0], l.o[0]), _mm256_mul_pd(qy, qy)),
                    _mm256_mul_pd(l.o[2], l.o[2])),
      splat(1.0));
  const V disc = _mm256_sub_pd(_mm256_mul_pd(b, b), _mm256_mul_pd(a, c));
  const V sq = _mm256_sqrt_pd(_mm256_max_pd(disc, _mm256_setzero_pd()));
  const V nb = _mm256_sub_pd(_mm256_setzero_pd(), b);
  const V t0 = _mm256_div_pd(_mm256_sub_pd(nb, sq), a);
  const V t1 = _mm256_div_pd(_mm256_add_pd(nb, sq), a);
  const V hit = ge(disc, _mm256_setzero_pd());
  return {sel(hit, t0, splat(kInf)), sel(hit, t1, splat(-kInf))};
}

inline V skip_mask(const RayQuery& r, std::size_t i) {
  std::uint32_t bytes;
  std::memcpy(&bytes, r.skip + i, sizeof bytes);
  const __m256i wide = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(static_cast<int>(bytes)));
  return _mm256_castsi256_pd(_mm256_cmpeq_epi64(wide, _mm256_setzero_si256()));
}

inline V entry(Interval iv, const RayQuery& r, std::size_t i) {
  V hit = le(iv.lo, iv.hi);
  hit = _mm256_and_pd(hit, lt(iv.lo, splat(r.tmax)));
  hit = _mm256_and_pd(hit, gt(iv.hi, _mm256_setzero_pd()));
  hit = _mm256_and_pd(hit, skip_mask(r, i));
  return sel(hit, _mm256_max_pd(iv.lo, _mm256_setzero_pd()), splat(kInf));
}

inline double hmin(V v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  double best = lanes[0];
  for (int k = 1; k < 4; ++k) {
    best = lanes[k] < best ? lanes[k] : best;
  }
  return best;
}

double nearest_box(const SolidBatch& b, const RayQuery& r) {
  V best = splat(kInf);
  const V one = splat(1.0);
  for (std::size_t i = 0; i < b.padded(); i += 4) {
    const Local l = to_local(b, i, r);
    const Interval x = slab(l.o[0], l.d[0], one);
    const Interval y = slab(l.o[1], l.d[1], one);
    const Interval z = slab(l.o[2], l.d[2], one);
    const Interval iv{_mm256_max_pd(_mm256_max_pd(x.lo, y.lo), z.lo),
                      _mm256_min_pd(_mm256_min_pd(x.hi, y.hi), z.hi)};
    best = _mm256_min_pd(best, entry(iv, r, i));
  }
  return hmin(best);
}

double nearest_capsule(const SolidBatch& b, const RayQuery& r) {
  V best = splat(kInf);
  for (std::size_t i = 0; i < b.padded(); i += 4) {
    const Local l = to_local(b, i, r);
    const V h = _mm256_loadu_pd(&b.h[i]);
    const Interval cyl = cylinder_piece(l, h);
    const Interval top = sphere(l, h);
    const Interval bot = sphere(l, _mm256_sub_pd(_mm256_setzero_pd(), h));
    const Interval iv{_mm256_min_pd(_mm256_min_pd(cyl.lo, top.lo), bot.lo),
                      _mm256_max_pd(_mm256_max_pd(cyl.hi, top.hi), bot.hi)};
    best = _mm256_min_pd(best, entry(iv, r, i));
  }
  return hmin(best);
}

double nearest_cylinder(const SolidBatch& b, const RayQuery& r) {
  V best = splat(kInf);
  for (std::size_t i = 0; i < b.padded(); i += 4) {
    const Local l = to_local(b, i, r);
    best = _mm256_min_pd(best, entry(cylinder_piece(l, splat(1.0)), r, i));
  }
  return hmin(best);
}

void biquad_cascade(const Biquad* sections, std::size_t nsec, double* data, std::size_t nt,
                    std::size_t nch) {
  if (nt == 0) {
    return;
  }
  const std::size_t vec_end = nch - nch % 4;
  for (std::size_t s = 0; s < nsec; ++s) {
    const Biquad& q = sections[s];
    const V b0 = splat(q.b0), b1 = splat(q.b1), b2 = splat(q.b2);
    const V a1 = splat(q.a1), a2 = splat(q.a2);
    for (std::size_t ch = 0; ch < vec_end; ch += 4) {
      const V x0 = _mm256_loadu_pd(data + ch);
      V z1 = _mm256_mul_pd(splat(q.zi1), x0);
      V z2 = _mm256_mul_pd(splat(q.zi2), x0);
      for (std::size_t t = 0; t < nt; ++t) {
        double* p = data + t * nch + ch;
        const V x = _mm256_loadu_pd(p);
        const V y = _mm256_add_pd(_mm256_mul_pd(b0, x), z1);
        z1 = _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(b1, x), _mm256_mul_pd(a1, y)), z2);
        z2 = _mm256_sub_pd(_mm256_mul_pd(b2, x), _mm256_mul_pd(a2, y));
        _mm256_storeu_pd(p, y);
      }
    }
    for (std::size_t ch = vec_end; ch < nch; ++ch) {
      const double x0 = data[ch];
      double z1 = q.zi1 * x0;
      double z2 = q.zi2 * x0;
      for (std::size_t t = 0; t < nt; ++t) {
        double& v = data[t * nch + ch];
        const double x = v;
        const double y = q.b0 * x + z1;
        z1 = (q.b1 * x - q.a1 * y) + z2;
        z2 = q.b2 * x - q.a2 * y;
        v = y;
      }
    }
  }
}

}  // namespace

const KernelTable table = {biquad_cascade, nearest_box, nearest_capsule, nearest_cylinder};

}  // namespace chairsynth::simd::avx2
