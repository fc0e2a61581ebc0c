#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <cstring>
#include <vector>

#include "reslab/kernels/kernels.hpp"
#include "reslab/model.hpp"

using namespace reslab;
namespace k = reslab::kernels;

namespace {

std::vector<double> energies(int n, double lo, double hi) {
  std::vector<double> e;
  for (int i = 0; i < n; ++i) e.push_back(lo + (hi - lo) * i / (n - 1));
  return e;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("sturm counts agree with dense eigenvalues") {
  const Potential v = sample_random({3.0}, 60, 5);
  const int n = 61;
  Eigen::VectorXd d(n), off = Eigen::VectorXd::Ones(n - 1);
  for (int i = 0; i < n; ++i) d[i] = v[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, off, Eigen::EigenvaluesOnly);
  const auto E = energies(37, -2.5, 5.5);
  std::vector<std::int64_t> counts(E.size());
  k::scalar::sturm_count(v.values(), E, counts);
  for (std::size_t i = 0; i < E.size(); ++i) {
    std::int64_t below = 0;
    for (int j = 0; j < n; ++j) below += es.eigenvalues()[j] < E[i];
    CHECK(counts[i] == below);
  }
}

TEST_CASE("transfer growth matches a direct recursion") {
  const Potential v = sample_random({1.0}, 40, 2);
  const std::vector<double> E{-1.0, 0.3, 2.7};
  std::vector<double> g(E.size());
  k::scalar::transfer_log_growth(v.values(), E, g);
  for (std::size_t i = 0; i < E.size(); ++i) {
    long double u = 1.0L, um = 0.0L;
    for (double x : v.values()) {
      const long double up = (E[i] - x) * u - um;
      um = u;
      u = up;
    }
    CHECK(g[i] == doctest::Approx(0.5 * std::log(static_cast<double>(u * u + um * um))).epsilon(1e-10));
  }
}

TEST_CASE("vector kernels are bit-identical to scalar") {
  if (!k::isa_available(k::Isa::Avx2)) {
    MESSAGE("AVX2 not available; only the scalar table is exercised");
    return;
  }
  const auto& s = k::table(k::Isa::Scalar);
  const auto& a = k::table(k::Isa::Avx2);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Potential v = sample_random({4.0}, 200 + static_cast<int>(seed) * 37, seed);
    // odd sizes exercise the vector tails
    const auto E = energies(53 + static_cast<int>(seed), -2.2, 6.3);
    std::vector<std::int64_t> cs(E.size()), ca(E.size());
    s.sturm_count(v.values(), E, cs);
    a.sturm_count(v.values(), E, ca);
    CHECK(cs == ca);
    std::vector<double> gs(E.size()), ga(E.size());
    s.transfer_log_growth(v.values(), E, gs);
    a.transfer_log_growth(v.values(), E, ga);
    for (std::size_t i = 0; i < E.size(); ++i) CHECK(same_bits(gs[i], ga[i]));

    const std::size_t n = 101 + seed;
    std::vector<double> re(n), im(n);
    CounterRng rng(seed, 9);
    for (std::size_t i = 0; i < n; ++i) {
      re[i] = 4.0 * rng.next_uniform() - 2.0;
      im[i] = 4.0 * rng.next_uniform() - 2.0;
    }
    std::vector<std::uint32_t> idx;
    for (std::uint32_t i = 0; i < n; i += 3) idx.push_back(i);
    std::vector<double> sr(idx.size()), si(idx.size()), sm(idx.size()), ar(idx.size()), ai(idx.size()),
        am(idx.size());
    s.inverse_distance_sums(re.data(), im.data(), n, idx, sr.data(), si.data(), sm.data());
    a.inverse_distance_sums(re.data(), im.data(), n, idx, ar.data(), ai.data(), am.data());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      CHECK(same_bits(sr[i], ar[i]));
      CHECK(same_bits(si[i], ai[i]));
      CHECK(same_bits(sm[i], am[i]));
    }
  }
}

TEST_CASE("inverse distance sums match a direct loop") {
  const std::vector<double> re{0.0, 1.0, -0.5, 2.0}, im{0.0, 1.0, 0.25, -1.0};
  const std::vector<std::uint32_t> idx{0, 2};
  std::vector<double> sr(2), si(2), sm(2);
  k::scalar::inverse_distance_sums(re.data(), im.data(), re.size(), idx, sr.data(), si.data(), sm.data());
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const std::complex<double> zi(re[idx[t]], im[idx[t]]);
    std::complex<double> sum = 0.0;
    double md = 1e300;
    for (std::size_t j = 0; j < re.size(); ++j) {
      if (j == idx[t]) continue;
      const std::complex<double> d = zi - std::complex<double>(re[j], im[j]);
      sum += 1.0 / d;
      md = std::min(md, std::norm(d));
    }
    CHECK(sr[t] == doctest::Approx(sum.real()));
    CHECK(si[t] == doctest::Approx(sum.imag()));
    CHECK(sm[t] == doctest::Approx(md));
  }
}
