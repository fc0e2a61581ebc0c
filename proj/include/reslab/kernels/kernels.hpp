#pragma once

/// Double-precision inner loops with a scalar reference and vector variants
/// selected at runtime.
///
/// Every variant performs the same IEEE operations in the same order per
/// lane (no FMA contraction, identical reduction tree), so results are
/// bit-identical across ISAs. The equivalence tests rely on this.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace reslab::kernels {

enum class Isa { Scalar, Avx2 };

/// Pivot used in place of an exactly-zero Sturm pivot.
inline constexpr double kSturmTinyPivot = 1e-300;
/// Transfer iterations between renormalizations.
inline constexpr std::size_t kLyapunovRenormEvery = 8;

struct KernelTable {
  Isa isa;
  /// counts[e] = #{negative pivots of tridiag(1, diag - energies[e], 1)}, i.e.
  /// the number of eigenvalues of the Jacobi matrix below energies[e].
  void (*sturm_count)(std::span<const double> diag, std::span<const double> energies,
                      std::span<std::int64_t> counts);
  /// log_growth[e] = log ||(u(N), u(N-1))|| for u(n+1) = (E - diag[n]) u(n) - u(n-1),
  /// u(0) = 1, u(-1) = 0, accumulated with periodic renormalization.
  void (*transfer_log_growth)(std::span<const double> diag, std::span<const double> energies,
                              std::span<double> log_growth);
  /// For each i in idx: s[k] = sum_{j != i} 1 / (z_i - z_j) and min_d2[k] =
  /// min_{j != i} |z_i - z_j|^2 over the n points (re, im).
  void (*inverse_distance_sums)(const double* re, const double* im, std::size_t n,
                                std::span<const std::uint32_t> idx, double* s_re, double* s_im,
                                double* min_d2);
};

bool isa_available(Isa isa);
std::string_view isa_name(Isa isa);
const KernelTable& table(Isa isa);
/// Best available ISA unless RESLAB_KERNELS=scalar is set.
const KernelTable& active();

namespace scalar {
void sturm_count(std::span<const double>, std::span<const double>, std::span<std::int64_t>);
void transfer_log_growth(std::span<const double>, std::span<const double>, std::span<double>);
void inverse_distance_sums(const double*, const double*, std::size_t, std::span<const std::uint32_t>,
                           double*, double*, double*);
}  // namespace scalar

#if defined(RESLAB_HAVE_AVX2)
namespace avx2 {
void sturm_count(std::span<const double>, std::span<const double>, std::span<std::int64_t>);
void transfer_log_growth(std::span<const double>, std::span<const double>, std::span<double>);
void inverse_distance_sums(const double*, const double*, std::size_t, std::span<const std::uint32_t>,
                           double*, double*, double*);
}  // namespace avx2
#endif

}  // namespace reslab::kernels
