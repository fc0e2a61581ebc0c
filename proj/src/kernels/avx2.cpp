#include <immintrin.h>

#include <cmath>
#include <limits>

#include "reslab/kernels/kernels.hpp"

namespace reslab::kernels::avx2 {

void sturm_count(std::span<const double> diag, std::span<const double> energies,
                 std::span<std::int64_t> counts) {
  const std::size_t m = energies.size();
  const std::size_t vec_end = m - m % 4;
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d tiny = _mm256_set1_pd(kSturmTinyPivot);
  for (std::size_t e = 0; e < vec_end; e += 4) {
    const __m256d E = _mm256_loadu_pd(&energies[e]);
    __m256i neg = _mm256_setzero_si256();
    __m256d q = one;
    for (std::size_t n = 0; n < diag.size(); ++n) {
      const __m256d shifted = _mm256_sub_pd(_mm256_set1_pd(diag[n]), E);
      q = n == 0 ? shifted : _mm256_sub_pd(shifted, _mm256_div_pd(one, q));
      q = _mm256_blendv_pd(q, tiny, _mm256_cmp_pd(q, zero, _CMP_EQ_OQ));
      neg = _mm256_sub_epi64(neg, _mm256_castpd_si256(_mm256_cmp_pd(q, zero, _CMP_LT_OQ)));
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(&counts[e]), neg);
  }
  if (vec_end < m) {
    scalar::sturm_count(diag, energies.subspan(vec_end), counts.subspan(vec_end));
  }
}

void transfer_log_growth(std::span<const double> diag, std::span<const double> energies,
                         std::span<double> log_growth) {
  const std::size_t m = energies.size();
  const std::size_t vec_end = m - m % 4;
  for (std::size_t e = 0; e < vec_end; e += 4) {
    const __m256d E = _mm256_loadu_pd(&energies[e]);
    __m256d a = _mm256_set1_pd(1.0), b = _mm256_setzero_pd();
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    alignas(32) double nrm[4];
    for (std::size_t n = 0; n < diag.size(); ++n) {
      const __m256d t = _mm256_sub_pd(_mm256_mul_pd(_mm256_sub_pd(E, _mm256_set1_pd(diag[n])), a), b);
      b = a;
      a = t;
      if ((n + 1) % kLyapunovRenormEvery == 0) {
        const __m256d r = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b)));
        a = _mm256_div_pd(a, r);
        b = _mm256_div_pd(b, r);
        _mm256_store_pd(nrm, r);
        for (int l = 0; l < 4; ++l) acc[l] += std::log(nrm[l]);
      }
    }
    _mm256_store_pd(nrm, _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b))));
    for (int l = 0; l < 4; ++l) log_growth[e + static_cast<std::size_t>(l)] = acc[l] + std::log(nrm[l]);
  }
  if (vec_end < m) {
    scalar::transfer_log_growth(diag, energies.subspan(vec_end), log_growth.subspan(vec_end));
  }
}

void inverse_distance_sums(const double* re, const double* im, std::size_t n,
                           std::span<const std::uint32_t> idx, double* s_re, double* s_im,
                           double* min_d2) {
  const std::size_t blocks = n / 4;
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  const __m256i lane_offsets = _mm256_set_epi64x(3, 2, 1, 0);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const std::size_t i = idx[k];
    const __m256d zr = _mm256_set1_pd(re[i]), zi = _mm256_set1_pd(im[i]);
    const __m256i self_index = _mm256_set1_epi64x(static_cast<long long>(i));
    __m256d ar = zero, ai = zero, mn = inf;
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t j = 4 * b;
      const __m256d dr = _mm256_sub_pd(zr, _mm256_loadu_pd(re + j));
      const __m256d di = _mm256_sub_pd(zi, _mm256_loadu_pd(im + j));
      __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dr, dr), _mm256_mul_pd(di, di));
      const __m256i jv = _mm256_add_epi64(_mm256_set1_epi64x(static_cast<long long>(j)), lane_offsets);
      const __m256d self = _mm256_castsi256_pd(_mm256_cmpeq_epi64(jv, self_index));
      const __m256d d2_safe = _mm256_blendv_pd(d2, one, self);
      const __m256d inv = _mm256_div_pd(one, d2_safe);
      const __m256d cr = _mm256_blendv_pd(_mm256_mul_pd(dr, inv), zero, self);
      const __m256d ci = _mm256_blendv_pd(_mm256_mul_pd(_mm256_sub_pd(zero, di), inv), zero, self);
      ar = _mm256_add_pd(ar, cr);
      ai = _mm256_add_pd(ai, ci);
      d2 = _mm256_blendv_pd(d2, inf, self);
      mn = _mm256_min_pd(d2, mn);
    }
    alignas(32) double lr[4], li[4], lm[4];
    _mm256_store_pd(lr, ar);
    _mm256_store_pd(li, ai);
    _mm256_store_pd(lm, mn);
    for (std::size_t j = 4 * blocks; j < n; ++j) {
      const std::size_t lane = j - 4 * blocks;
      const double dr = re[i] - re[j];
      const double di = im[i] - im[j];
      double d2 = dr * dr + di * di;
      const bool self = j == i;
      if (self) d2 = 1.0;
      const double inv = 1.0 / d2;
      lr[lane] += self ? 0.0 : dr * inv;
      li[lane] += self ? 0.0 : (-di) * inv;
      if (!self && d2 < lm[lane]) lm[lane] = d2;
    }
    s_re[k] = (lr[0] + lr[1]) + (lr[2] + lr[3]);
    s_im[k] = (li[0] + li[1]) + (li[2] + li[3]);
    min_d2[k] = std::min(std::min(lm[0], lm[1]), std::min(lm[2], lm[3]));
  }
}

}  // namespace reslab::kernels::avx2
