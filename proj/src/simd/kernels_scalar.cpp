#include "chairsynth/simd/kernels.hpp"

#include <cmath>
#include <limits>

// Reference kernels. The AVX2 versions mirror these operation for operation;
// keep both in sync so results stay bit-identical.

namespace chairsynth::simd::scalar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kParallelEps = 1e-15;
constexpr double kParallelEps2 = 1e-30;

inline double vmin(double a, double b) { return a < b ? a : b; }
inline double vmax(double a, double b) { return a > b ? a : b; }

struct Interval {
  double lo;
  double hi;
};

struct Local {
  double o[3];
  double d[3];
};

inline Local to_local(const SolidBatch& b, std::size_t i, const RayQuery& r) {
  const double p0 = r.o[0] - b.c[0][i];
  const double p1 = r.o[1] - b.c[1][i];
  const double p2 = r.o[2] - b.c[2][i];
  Local l;
  for (int k = 0; k < 3; ++k) {
    const double m0 = b.m[3 * k][i];
    const double m1 = b.m[3 * k + 1][i];
    const double m2 = b.m[3 * k + 2][i];
    l.o[k] = (m0 * p0 + m1 * p1) + m2 * p2;
    l.d[k] = (m0 * r.d[0] + m1 * r.d[1]) + m2 * r.d[2];
  }
  return l;
}

// |o + t d| <= half along one axis.
inline Interval slab(double o, double d, double half) {
  const bool parallel = std::fabs(d) < kParallelEps;
  const double ds = parallel ? 1.0 : d;
  const double t0 = (-half - o) / ds;
  const double t1 = (half - o) / ds;
  const bool inside = std::fabs(o) <= half;
  const double lo = vmin(t0, t1);
  const double hi = vmax(t0, t1);
  return {parallel ? (inside ? -kInf : kInf) : lo, parallel ? (inside ? kInf : -kInf) : hi};
}

// Infinite unit cylinder about Y intersected with |y| <= h.
inline Interval cylinder_piece(const Local& l, double h) {
  const double a = l.d[0] * l.d[0] + l.d[2] * l.d[2];
  const double b = l.o[0] * l.d[0] + l.o[2] * l.d[2];
  const double c = (l.o[0] * l.o[0] + l.o[2] * l.o[2]) - 1.0;
  const double disc = b * b - a * c;
  const bool parallel = a < kParallelEps2;
  const double as = parallel ? 1.0 : a;
  const double sq = std::sqrt(vmax(disc, 0.0));
  const double r0 = (-b - sq) / as;
  const double r1 = (-b + sq) / as;
  const bool hit = disc >= 0.0;
  const bool inside = c <= 0.0;
  const double rlo = parallel ? (inside ? -kInf : kInf) : (hit ? r0 : kInf);
  const double rhi = parallel ? (inside ? kInf : -kInf) : (hit ? r1 : -kInf);
  const Interval s = slab(l.o[1], l.d[1], h);
  const double lo = vmax(rlo, s.lo);
  const double hi = vmin(rhi, s.hi);
  const bool empty = lo > hi;
  return {empty ? kInf : lo, empty ? -kInf : hi};
}

// Unit sphere centred at (0, ey, 0).
inline Interval sphere(const Local& l, double ey) {
  const double qy = l.o[1] - ey;
  const double a = (l.d[0] * l.d[0] + l.d[1] * l.d[1]) + l.d[2] * l.d[2];
  const double b = (l.d[0] * l.o[0] + l.d[1] * qy) + l.d[2] * l.o[2];
  const double c = ((l.o[0] * l.o[0] + qy * qy) + l.o[2] * l.o[2]) - 1.0;
  const double disc = b * b - a * c;
  const double sq = std::sqrt(vmax(disc, 0.0));
  const double t0 = (-b - sq) / a;
  const double t1 = (-b + sq) / a;
  const bool hit = disc >= 0.0;
  return {hit ? t0 : kInf, hit ? t1 : -kInf};
}

inline double entry(Interval iv, const RayQuery& r, std::size_t i) {
  const bool hit = iv.lo <= iv.hi && iv.lo < r.tmax && iv.hi > 0.0 && r.skip[i] == 0;
  return hit ? vmax(iv.lo, 0.0) : kInf;
}

double nearest_box(const SolidBatch& b, const RayQuery& r) {
  double best = kInf;
  for (std::size_t i = 0; i < b.padded(); ++i) {
    const Local l = to_local(b, i, r);
    const Interval x = slab(l.o[0], l.d[0], 1.0);
    const Interval y = slab(l.o[1], l.d[1], 1.0);
    const Interval z = slab(l.o[2], l.d[2], 1.0);
    const Interval iv{vmax(vmax(x.lo, y.lo), z.lo), vmin(vmin(x.hi, y.hi), z.hi)};
    best = vmin(best, entry(iv, r, i));
  }
  return best;
}

double nearest_capsule(const SolidBatch& b, const RayQuery& r) {
  double best = kInf;
  for (std::size_t i = 0; i < b.padded(); ++i) {
    const Local l = to_local(b, i, r);
    const double h = b.h[i];
    const Interval cyl = cylinder_piece(l, h);
    const Interval top = sphere(l, h);
    const Interval bot = sphere(l, -h);
    const Interval iv{vmin(vmin(cyl.lo, top.lo), bot.lo), vmax(vmax(cyl.hi, top.hi), bot.hi)};
    best = vmin(best, entry(iv, r, i));
  }
  return best;
}

double nearest_cylinder(const SolidBatch& b, const RayQuery& r) {
  double best = kInf;
  for (std::size_t i = 0; i < b.padded(); ++i) {
    const Local l = to_local(b, i, r);
    best = vmin(best, entry(cylinder_piece(l, 1.0), r, i));
  }
  return best;
}

void biquad_cascade(const Biquad* sections, std::size_t nsec, double* data, std::size_t nt,
                    std::size_t nch) {
  if (nt == 0) {
    return;
  }
  for (std::size_t s = 0; s < nsec; ++s) {
    const Biquad& q = sections[s];
    for (std::size_t ch = 0; ch < nch; ++ch) {
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

}  // namespace chairsynth::simd::scalar
