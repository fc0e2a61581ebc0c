#pragma once

/// Potentials, box configuration and reproducible randomness for the
/// half-line operator H_L = -Delta + V 1_[0,L] with Dirichlet condition at 0.

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace reslab {

/// Uniform law on [0, W]; density 1/W.
struct UniformDist {
  double width = 1.0;

  double density_bound() const { return 1.0 / width; }
};

struct FreeKind {};

struct PeriodicKind {
  std::vector<double> cell;
};

struct RandomKind {
  UniformDist dist;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  /// true when the sequence is stored reversed, V(n) = omega_{L-n}
  bool reversed = false;
};

using PotentialKind = std::variant<FreeKind, PeriodicKind, RandomKind>;

class Potential {
 public:
  Potential(std::vector<double> values, PotentialKind kind);

  std::span<const double> values() const { return values_; }
  double operator[](std::size_t n) const { return values_[n]; }
  /// Box endpoint L; values cover 0..L.
  int box_end() const { return static_cast<int>(values_.size()) - 1; }
  const PotentialKind& kind() const { return kind_; }
  /// Bound B with max |V| <= B (default max(2, W) for random potentials).
  double bound() const { return bound_; }
  /// Stable 64-bit FNV-1a digest of the values, hex encoded.
  std::string hash() const;
  std::string describe() const;

 private:
  std::vector<double> values_;
  PotentialKind kind_;
  double bound_ = 0.0;
};

struct BoxConfig {
  int L = 0;
  long precision_bits = 256;

  void validate() const;
};

Potential make_free(int L);
/// values(n) = cell(n mod p), 0 <= n <= L.
Potential make_periodic(std::span<const double> cell, int L);
/// L+1 i.i.d. uniform draws, a pure function of (seed, stream).
Potential sample_random(UniformDist dist, int L, std::uint64_t seed, std::uint64_t stream = 0);
/// Reversed random potential V(n) = omega_{L-n}: the first L+1 draws of the
/// (seed, stream) sequence laid out so omega_0 sits at the exit site L.
Potential sample_random_reversed(UniformDist dist, int L, std::uint64_t seed,
                                 std::uint64_t stream = 0);

/// Counter-based generator: draw n of stream (seed, stream) is a pure function
/// of the triple, so ensemble members are independent and replayable.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform double in [0, 1) from the top 53 bits of draw `counter`.
  double uniform(std::uint64_t counter) const;

  /// Sequential interface.
  double next_uniform() { return uniform(counter_++); }
  std::uint64_t next_bits() { return bits(counter_++); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

template <typename Scalar>
using Mat2 = std::array<std::array<Scalar, 2>, 2>;

/// One-step transfer matrix [[E - v, -1], [1, 0]]; det = 1.
template <typename Scalar>
Mat2<Scalar> transfer_matrix(Scalar E, double v) {
  return {{{E - Scalar(v), Scalar(-1)}, {Scalar(1), Scalar(0)}}};
}

nlohmann::json to_json(const Potential& v);
/// Rebuilds from {kind, params, values?}; random kinds are regenerated from
/// (seed, stream) and checked against stored values when present.
Potential potential_from_json(const nlohmann::json& j);

}  // namespace reslab
