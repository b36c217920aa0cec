// AVX2 variants. Each function mirrors its scalar counterpart in
// scalar_math.hpp operation for operation; leftovers that do not fill a
// full vector are handed to the scalar table.
#include "kernels_impl.hpp"
#include "mdrate/kernels/philox.hpp"
#include "scalar_math.hpp"

#include <immintrin.h>

#include <array>

namespace mdrate::kernels::avx2 {
namespace {

inline __m256d bcast(double v) { return _mm256_set1_pd(v); }

inline __m256d horner8(const double (&k)[8], __m256d x) {
  __m256d r = bcast(k[7]);
  for (int i = 6; i >= 0; --i) r = _mm256_add_pd(_mm256_mul_pd(r, x), bcast(k[i]));
  return r;
}

inline __m256d vlog(__m256d x) {
  namespace c = ref::c;
  const __m256d zero = _mm256_setzero_pd();
  const __m256d is_nan_or_neg = _mm256_or_pd(_mm256_cmp_pd(x, x, _CMP_UNORD_Q),
                                             _mm256_cmp_pd(x, zero, _CMP_LT_OQ));
  const __m256d is_zero = _mm256_cmp_pd(x, zero, _CMP_EQ_OQ);
  const __m256d is_inf = _mm256_cmp_pd(x, bcast(std::numeric_limits<double>::infinity()),
                                       _CMP_EQ_OQ);

  const __m256d sub = _mm256_cmp_pd(x, bcast(c::kMinNormal), _CMP_LT_OQ);
  x = _mm256_blendv_pd(x, _mm256_mul_pd(x, bcast(c::kTwo54)), sub);
  const __m256d bias = _mm256_blendv_pd(zero, bcast(54.0), sub);

  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000ll);
  const __m256d biased =
      _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(_mm256_srli_epi64(bits, 52), magic)),
                    bcast(0x1.0p52));
  __m256d e = _mm256_sub_pd(_mm256_sub_pd(biased, bcast(1023.0)), bias);
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffll)),
                      _mm256_set1_epi64x(0x3ff0000000000000ll)));
  const __m256d big = _mm256_cmp_pd(m, bcast(c::kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, bcast(0.5)), big);
  e = _mm256_blendv_pd(e, _mm256_add_pd(e, bcast(1.0)), big);

  const __m256d f = _mm256_sub_pd(m, bcast(1.0));
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(bcast(2.0), f));
  const __m256d z = _mm256_mul_pd(s, s);
  const __m256d w = _mm256_mul_pd(z, z);
  const __m256d t1 = _mm256_mul_pd(
      w, _mm256_add_pd(bcast(c::kLg2),
                       _mm256_mul_pd(w, _mm256_add_pd(bcast(c::kLg4),
                                                      _mm256_mul_pd(w, bcast(c::kLg6))))));
  const __m256d t2 = _mm256_mul_pd(
      z, _mm256_add_pd(
             bcast(c::kLg1),
             _mm256_mul_pd(
                 w, _mm256_add_pd(
                        bcast(c::kLg3),
                        _mm256_mul_pd(w, _mm256_add_pd(bcast(c::kLg5),
                                                       _mm256_mul_pd(w, bcast(c::kLg7))))))));
  const __m256d r = _mm256_add_pd(t2, t1);
  const __m256d hfsq = _mm256_mul_pd(_mm256_mul_pd(bcast(0.5), f), f);
  const __m256d inner = _mm256_add_pd(_mm256_mul_pd(s, _mm256_add_pd(hfsq, r)),
                                      _mm256_mul_pd(e, bcast(c::kLn2Lo)));
  __m256d out = _mm256_sub_pd(_mm256_mul_pd(e, bcast(c::kLn2Hi)),
                              _mm256_sub_pd(_mm256_sub_pd(hfsq, inner), f));

  out = _mm256_blendv_pd(out, bcast(std::numeric_limits<double>::infinity()), is_inf);
  out = _mm256_blendv_pd(out, bcast(-std::numeric_limits<double>::infinity()), is_zero);
  out = _mm256_blendv_pd(out, bcast(std::numeric_limits<double>::quiet_NaN()), is_nan_or_neg);
  return out;
}

inline __m256d vexp(__m256d x_in) {
  namespace c = ref::c;
  const __m256d is_nan = _mm256_cmp_pd(x_in, x_in, _CMP_UNORD_Q);
  const __m256d over = _mm256_cmp_pd(x_in, bcast(c::kExpOverflow), _CMP_GT_OQ);
  const __m256d under = _mm256_cmp_pd(x_in, bcast(c::kExpUnderflow), _CMP_LT_OQ);
  const __m256d x = _mm256_max_pd(_mm256_min_pd(x_in, bcast(c::kExpOverflow)),
                                  bcast(c::kExpUnderflow));

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, bcast(c::kInvLn2)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d hi = _mm256_sub_pd(x, _mm256_mul_pd(k, bcast(c::kLn2Hi)));
  const __m256d lo = _mm256_mul_pd(k, bcast(c::kLn2Lo));
  const __m256d r = _mm256_sub_pd(hi, lo);
  const __m256d t = _mm256_mul_pd(r, r);
  __m256d poly = _mm256_add_pd(bcast(c::kP4), _mm256_mul_pd(t, bcast(c::kP5)));
  poly = _mm256_add_pd(bcast(c::kP3), _mm256_mul_pd(t, poly));
  poly = _mm256_add_pd(bcast(c::kP2), _mm256_mul_pd(t, poly));
  poly = _mm256_add_pd(bcast(c::kP1), _mm256_mul_pd(t, poly));
  const __m256d cc = _mm256_sub_pd(r, _mm256_mul_pd(t, poly));
  const __m256d frac = _mm256_div_pd(_mm256_mul_pd(r, cc), _mm256_sub_pd(bcast(2.0), cc));
  const __m256d y = _mm256_sub_pd(bcast(1.0), _mm256_sub_pd(_mm256_sub_pd(lo, frac), hi));

  const __m128i ki = _mm256_cvtpd_epi32(k);
  const __m128i k1 = _mm_srai_epi32(ki, 1);
  const __m128i k2 = _mm_sub_epi32(ki, k1);
  const __m256i bias = _mm256_set1_epi64x(1023);
  const __m256d s1 = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(k1), bias), 52));
  const __m256d s2 = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(k2), bias), 52));
  __m256d out = _mm256_mul_pd(_mm256_mul_pd(y, s1), s2);

  out = _mm256_blendv_pd(out, bcast(std::numeric_limits<double>::infinity()), over);
  out = _mm256_blendv_pd(out, _mm256_setzero_pd(), under);
  out = _mm256_blendv_pd(out, x_in, is_nan);
  return out;
}

inline __m256d vnormal_quantile(__m256d u) {
  namespace c = ref::c;
  const __m256d q = _mm256_sub_pd(u, bcast(0.5));
  const __m256d absq = _mm256_andnot_pd(bcast(-0.0), q);
  const __m256d central = _mm256_cmp_pd(absq, bcast(0.425), _CMP_LE_OQ);
  const __m256d rc = _mm256_sub_pd(bcast(0.180625), _mm256_mul_pd(q, q));
  const __m256d vc = _mm256_div_pd(_mm256_mul_pd(q, horner8(c::kA, rc)), horner8(c::kB, rc));

  const __m256d neg = _mm256_cmp_pd(q, _mm256_setzero_pd(), _CMP_LT_OQ);
  __m256d r = _mm256_blendv_pd(_mm256_sub_pd(bcast(1.0), u), u, neg);
  r = _mm256_sqrt_pd(_mm256_xor_pd(vlog(r), bcast(-0.0)));
  const __m256d near = _mm256_cmp_pd(r, bcast(5.0), _CMP_LE_OQ);
  const __m256d r1 = _mm256_sub_pd(r, bcast(1.6));
  const __m256d v1 = _mm256_div_pd(horner8(c::kC, r1), horner8(c::kD, r1));
  const __m256d r2 = _mm256_sub_pd(r, bcast(5.0));
  const __m256d v2 = _mm256_div_pd(horner8(c::kE, r2), horner8(c::kF, r2));
  __m256d vt = _mm256_blendv_pd(v2, v1, near);
  vt = _mm256_blendv_pd(vt, _mm256_xor_pd(vt, bcast(-0.0)), neg);
  return _mm256_blendv_pd(vt, vc, central);
}

// Eight Philox blocks at once, one 32-bit lane per block.
inline void mulhilo8(__m256i a, std::uint32_t m, __m256i& hi, __m256i& lo) {
  const __m256i mv = _mm256_set1_epi32(static_cast<int>(m));
  const __m256i even = _mm256_mul_epu32(a, mv);
  const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), mv);
  lo = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0b10101010);
  hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0b10101010);
}

inline __m256d u64_to_unit(__m256i bits) {
  // 2^52 + (bits >> 12) is exact, so subtracting 2^52 recovers the integer.
  const __m256d d = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(_mm256_srli_epi64(bits, 12),
                                          _mm256_set1_epi64x(0x4330000000000000ll))),
      bcast(0x1.0p52));
  return _mm256_mul_pd(_mm256_add_pd(d, bcast(0.5)), bcast(0x1.0p-52));
}

void philox8(StreamKey key, std::uint64_t block, double* out) {
  alignas(32) std::array<std::uint32_t, 8> c0, c1;
  for (int i = 0; i < 8; ++i) {
    const std::uint64_t b = block + static_cast<std::uint64_t>(i);
    c0[i] = static_cast<std::uint32_t>(b);
    c1[i] = static_cast<std::uint32_t>(b >> 32);
  }
  __m256i x0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(c0.data()));
  __m256i x1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(c1.data()));
  __m256i x2 = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(key.stream)));
  __m256i x3 = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(key.stream >> 32)));
  std::uint32_t k0 = static_cast<std::uint32_t>(key.seed);
  std::uint32_t k1 = static_cast<std::uint32_t>(key.seed >> 32);
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k0 += kPhiloxW0;
      k1 += kPhiloxW1;
    }
    __m256i hi0, lo0, hi1, lo1;
    mulhilo8(x0, kPhiloxM0, hi0, lo0);
    mulhilo8(x2, kPhiloxM1, hi1, lo1);
    const __m256i y0 = _mm256_xor_si256(_mm256_xor_si256(hi1, x1),
                                        _mm256_set1_epi32(static_cast<int>(k0)));
    const __m256i y2 = _mm256_xor_si256(_mm256_xor_si256(hi0, x3),
                                        _mm256_set1_epi32(static_cast<int>(k1)));
    x0 = y0;
    x1 = lo1;
    x2 = y2;
    x3 = lo0;
  }
  // Lane i of (x0,x1) is word pair 0 of block i; (x2,x3) is pair 1.
  const __m256d a_lo = u64_to_unit(_mm256_unpacklo_epi32(x1, x0));  // blocks 0,1,4,5
  const __m256d a_hi = u64_to_unit(_mm256_unpackhi_epi32(x1, x0));  // blocks 2,3,6,7
  const __m256d b_lo = u64_to_unit(_mm256_unpacklo_epi32(x3, x2));
  const __m256d b_hi = u64_to_unit(_mm256_unpackhi_epi32(x3, x2));
  const __m256d p01 = _mm256_unpacklo_pd(a_lo, b_lo);  // b0 pair | b4 pair
  const __m256d p15 = _mm256_unpackhi_pd(a_lo, b_lo);  // b1 pair | b5 pair
  const __m256d p23 = _mm256_unpacklo_pd(a_hi, b_hi);  // b2 pair | b6 pair
  const __m256d p37 = _mm256_unpackhi_pd(a_hi, b_hi);  // b3 pair | b7 pair
  _mm256_storeu_pd(out + 0, _mm256_permute2f128_pd(p01, p15, 0x20));
  _mm256_storeu_pd(out + 4, _mm256_permute2f128_pd(p23, p37, 0x20));
  _mm256_storeu_pd(out + 8, _mm256_permute2f128_pd(p01, p15, 0x31));
  _mm256_storeu_pd(out + 12, _mm256_permute2f128_pd(p23, p37, 0x31));
}

template <typename F>
inline std::size_t map4(std::span<const double> in, std::span<double> out, F f) {
  const std::size_t n4 = in.size() - in.size() % 4;
  for (std::size_t i = 0; i < n4; i += 4) _mm256_storeu_pd(&out[i], f(_mm256_loadu_pd(&in[i])));
  return n4;
}

}  // namespace

void uniforms(StreamKey key, std::uint64_t first_block, std::span<double> out) {
  const std::size_t n16 = out.size() - out.size() % 16;
  for (std::size_t i = 0; i < n16; i += 16) philox8(key, first_block + i / 2, &out[i]);
  kScalarTable.uniforms(key, first_block + n16 / 2, out.subspan(n16));
}

void log(std::span<const double> in, std::span<double> out) {
  const std::size_t n = map4(in, out, vlog);
  kScalarTable.log(in.subspan(n), out.subspan(n));
}

void exp(std::span<const double> in, std::span<double> out) {
  const std::size_t n = map4(in, out, vexp);
  kScalarTable.exp(in.subspan(n), out.subspan(n));
}

void normal_quantile(std::span<const double> u, std::span<double> out, double mu, double sigma) {
  const __m256d m = bcast(mu), s = bcast(sigma);
  const std::size_t n = map4(u, out, [&](__m256d v) {
    return _mm256_add_pd(m, _mm256_mul_pd(s, vnormal_quantile(v)));
  });
  kScalarTable.normal_quantile(u.subspan(n), out.subspan(n), mu, sigma);
}

void pareto_quantile(std::span<const double> u, std::span<double> out, double scale,
                     double alpha) {
  const __m256d sc = bcast(scale), al = bcast(alpha);
  const std::size_t n = map4(u, out, [&](__m256d v) {
    const __m256d l = vlog(_mm256_sub_pd(bcast(1.0), v));
    return _mm256_mul_pd(sc, vexp(_mm256_div_pd(_mm256_xor_pd(l, bcast(-0.0)), al)));
  });
  kScalarTable.pareto_quantile(u.subspan(n), out.subspan(n), scale, alpha);
}

void two_point(std::span<const double> u, std::span<double> out, double p_low, double low,
               double high) {
  const __m256d p = bcast(p_low), lo = bcast(low), hi = bcast(high);
  const std::size_t n = map4(u, out, [&](__m256d v) {
    return _mm256_blendv_pd(hi, lo, _mm256_cmp_pd(v, p, _CMP_LE_OQ));
  });
  kScalarTable.two_point(u.subspan(n), out.subspan(n), p_low, low, high);
}

double sum(std::span<const double> in) {
  const std::size_t n8 = in.size() - in.size() % 8;
  __m256d a = _mm256_setzero_pd(), b = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n8; i += 8) {
    a = _mm256_add_pd(a, _mm256_loadu_pd(&in[i]));
    b = _mm256_add_pd(b, _mm256_loadu_pd(&in[i + 4]));
  }
  alignas(32) std::array<double, 4> s;
  _mm256_store_pd(s.data(), _mm256_add_pd(a, b));
  double total = (s[0] + s[1]) + (s[2] + s[3]);
  for (std::size_t i = n8; i < in.size(); ++i) total += in[i];
  return total;
}

}  // namespace mdrate::kernels::avx2

namespace mdrate::kernels {

const Table kAvx2Table = {Isa::avx2,
                          avx2::uniforms,
                          avx2::log,
                          avx2::exp,
                          avx2::normal_quantile,
                          avx2::pareto_quantile,
                          avx2::two_point,
                          avx2::sum};

}  // namespace mdrate::kernels
