#include <cmath>
#include <limits>

#include "reslab/kernels/kernels.hpp"

namespace reslab::kernels::scalar {

void sturm_count(std::span<const double> diag, std::span<const double> energies,
                 std::span<std::int64_t> counts) {
  for (std::size_t e = 0; e < energies.size(); ++e) {
    const double E = energies[e];
    std::int64_t neg = 0;
    double q = 1.0;
    for (std::size_t n = 0; n < diag.size(); ++n) {
      q = n == 0 ? diag[n] - E : (diag[n] - E) - 1.0 / q;
      if (q == 0.0) q = kSturmTinyPivot;
      neg += q < 0.0 ? 1 : 0;
    }
    counts[e] = neg;
  }
}

void transfer_log_growth(std::span<const double> diag, std::span<const double> energies,
                         std::span<double> log_growth) {
  for (std::size_t e = 0; e < energies.size(); ++e) {
    const double E = energies[e];
    double a = 1.0, b = 0.0, acc = 0.0;
    for (std::size_t n = 0; n < diag.size(); ++n) {
      const double t = (E - diag[n]) * a - b;
      b = a;
      a = t;
      if ((n + 1) % kLyapunovRenormEvery == 0) {
        const double nrm = std::sqrt(a * a + b * b);
        a = a / nrm;
        b = b / nrm;
        acc += std::log(nrm);
      }
    }
    acc += std::log(std::sqrt(a * a + b * b));
    log_growth[e] = acc;
  }
}

void inverse_distance_sums(const double* re, const double* im, std::size_t n,
                           std::span<const std::uint32_t> idx, double* s_re, double* s_im,
                           double* min_d2) {
  // Four interleaved accumulators, matching the vector lane layout.
  const std::size_t blocks = n / 4;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const std::size_t i = idx[k];
    const double zr = re[i], zi = im[i];
    double ar[4] = {0.0, 0.0, 0.0, 0.0};
    double ai[4] = {0.0, 0.0, 0.0, 0.0};
    double mn[4];
    for (double& m : mn) m = std::numeric_limits<double>::infinity();
    auto add = [&](std::size_t lane, std::size_t j) {
      const double dr = zr - re[j];
      const double di = zi - im[j];
      double d2 = dr * dr + di * di;
      const bool self = j == i;
      if (self) d2 = 1.0;
      const double inv = 1.0 / d2;
      ar[lane] += self ? 0.0 : dr * inv;
      ai[lane] += self ? 0.0 : (-di) * inv;
      if (!self && d2 < mn[lane]) mn[lane] = d2;
    };
    for (std::size_t b = 0; b < blocks; ++b) {
      for (std::size_t lane = 0; lane < 4; ++lane) add(lane, 4 * b + lane);
    }
    for (std::size_t j = 4 * blocks; j < n; ++j) add(j - 4 * blocks, j);
    s_re[k] = (ar[0] + ar[1]) + (ar[2] + ar[3]);
    s_im[k] = (ai[0] + ai[1]) + (ai[2] + ai[3]);
    min_d2[k] = std::min(std::min(mn[0], mn[1]), std::min(mn[2], mn[3]));
  }
}

}  // namespace reslab::kernels::scalar
