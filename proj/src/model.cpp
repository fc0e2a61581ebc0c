#include "reslab/model.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace reslab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

Potential::Potential(std::vector<double> values, PotentialKind kind)
    : values_(std::move(values)), kind_(std::move(kind)) {
  if (values_.empty()) throw std::invalid_argument("potential must cover at least site 0");
  for (double x : values_) {
    if (!std::isfinite(x)) throw std::invalid_argument("potential values must be finite");
  }
  double b = std::max(2.0, max_abs(values_));
  if (const auto* r = std::get_if<RandomKind>(&kind_)) b = std::max(2.0, r->dist.width);
  if (const auto* p = std::get_if<PeriodicKind>(&kind_)) b = std::max(2.0, max_abs(p->cell));
  bound_ = b;
  assert(max_abs(values_) <= bound_);
}

std::string Potential::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double x : values_) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof(double));
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string Potential::describe() const {
  std::ostringstream os;
  if (std::holds_alternative<FreeKind>(kind_)) {
    os << "free";
  } else if (const auto* p = std::get_if<PeriodicKind>(&kind_)) {
    os << "periodic[";
    for (std::size_t i = 0; i < p->cell.size(); ++i) os << (i ? "," : "") << p->cell[i];
    os << "]";
  } else if (const auto* r = std::get_if<RandomKind>(&kind_)) {
    os << "uniform[0," << r->dist.width << "] seed=" << r->seed << " stream=" << r->stream;
    if (r->reversed) os << " reversed";
  }
  os << " L=" << box_end();
  return os.str();
}

void BoxConfig::validate() const {
  if (L < 0) throw std::invalid_argument("box endpoint L must be >= 0");
  if (precision_bits < 53) throw std::invalid_argument("precision_bits must be >= 53");
}

Potential make_free(int L) {
  if (L < 0) throw std::invalid_argument("box endpoint L must be >= 0");
  return Potential(std::vector<double>(static_cast<std::size_t>(L) + 1, 0.0), FreeKind{});
}

Potential make_periodic(std::span<const double> cell, int L) {
  if (cell.empty()) throw std::invalid_argument("periodic cell must not be empty");
  if (L < 0) throw std::invalid_argument("box endpoint L must be >= 0");
  std::vector<double> v(static_cast<std::size_t>(L) + 1);
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = cell[n % cell.size()];
  return Potential(std::move(v), PeriodicKind{{cell.begin(), cell.end()}});
}

Potential sample_random(UniformDist dist, int L, std::uint64_t seed, std::uint64_t stream) {
  if (L < 0) throw std::invalid_argument("box endpoint L must be >= 0");
  if (!(dist.width > 0.0)) throw std::invalid_argument("uniform width must be > 0");
  CounterRng rng(seed, stream);
  std::vector<double> v(static_cast<std::size_t>(L) + 1);
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = dist.width * rng.uniform(n);
  return Potential(std::move(v), RandomKind{dist, seed, stream, false});
}

Potential sample_random_reversed(UniformDist dist, int L, std::uint64_t seed, std::uint64_t stream) {
  Potential fwd = sample_random(dist, L, seed, stream);
  std::vector<double> v(fwd.values().rbegin(), fwd.values().rend());
  return Potential(std::move(v), RandomKind{dist, seed, stream, true});
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(seed ^ splitmix64(stream ^ 0x5851f42d4c957f2dULL))) {}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return splitmix64(key_ + splitmix64(counter));
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

nlohmann::json to_json(const Potential& v) {
  nlohmann::json j;
  j["L"] = v.box_end();
  j["bound"] = v.bound();
  j["hash"] = v.hash();
  const auto& kind = v.kind();
  if (std::holds_alternative<FreeKind>(kind)) {
    j["kind"] = "free";
    j["params"] = nlohmann::json::object();
  } else if (const auto* p = std::get_if<PeriodicKind>(&kind)) {
    j["kind"] = "periodic";
    j["params"] = {{"cell", p->cell}};
  } else if (const auto* r = std::get_if<RandomKind>(&kind)) {
    j["kind"] = "random";
    j["params"] = {{"dist", "uniform"}, {"width", r->dist.width}, {"seed", r->seed},
                   {"stream", r->stream}, {"reversed", r->reversed}};
  }
  j["values"] = std::vector<double>(v.values().begin(), v.values().end());
  return j;
}

Potential potential_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int L = j.at("L").get<int>();
  const auto& params = j.at("params");
  Potential out = [&]() {
    if (kind == "free") return make_free(L);
    if (kind == "periodic") {
      auto cell = params.at("cell").get<std::vector<double>>();
      return make_periodic(cell, L);
    }
    if (kind == "random") {
      UniformDist d{params.at("width").get<double>()};
      auto seed = params.at("seed").get<std::uint64_t>();
      auto stream = params.value("stream", std::uint64_t{0});
      return params.value("reversed", false) ? sample_random_reversed(d, L, seed, stream)
                                             : sample_random(d, L, seed, stream);
    }
    throw std::invalid_argument("unknown potential kind: " + kind);
  }();
  if (j.contains("values")) {
    auto stored = j.at("values").get<std::vector<double>>();
    if (!std::equal(stored.begin(), stored.end(), out.values().begin(), out.values().end())) {
      throw std::runtime_error("stored potential values do not match regenerated values");
    }
  }
  return out;
}

}  // namespace reslab
