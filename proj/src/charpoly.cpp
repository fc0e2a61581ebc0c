#include "reslab/charpoly.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numbers>
#include <sstream>

namespace reslab {

namespace {

long max_exponent(const std::vector<mp::Real>& c) {
  long e = LONG_MIN;
  for (const auto& x : c) e = std::max(e, x.exponent());
  return e;
}

}  // namespace

LaurentPoly::LaurentPoly(int min_deg, std::vector<mp::Real> coeffs)
    : bits_(coeffs.empty() ? 256 : coeffs.front().precision()),
      min_deg_(min_deg),
      coeffs_(std::move(coeffs)) {
  trim();
}

LaurentPoly LaurentPoly::monomial(int k, double c, mp::Bits bits) {
  std::vector<mp::Real> v;
  v.emplace_back(c, bits);
  LaurentPoly p(k, std::move(v));
  p.bits_ = bits;
  return p;
}

mp::Real LaurentPoly::coeff(int k) const {
  if (is_zero() || k < min_deg_ || k > max_deg()) return mp::Real(bits_);
  return coeffs_[static_cast<std::size_t>(k - min_deg_)];
}

void LaurentPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
  std::size_t lead = 0;
  while (lead < coeffs_.size() && coeffs_[lead].is_zero()) ++lead;
  if (lead > 0) {
    coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(lead));
    min_deg_ += static_cast<int>(lead);
  }
  if (coeffs_.empty()) min_deg_ = 0;
}

LaurentPoly LaurentPoly::shifted(int k) const {
  LaurentPoly r(*this);
  if (!r.is_zero()) r.min_deg_ += k;
  return r;
}

mp::Complex LaurentPoly::eval(const mp::Complex& lambda) const {
  mp::Complex acc(bits_);
  if (is_zero()) return acc;
  mp::Real t0(bits_), t1(bits_);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    mp::raw::mul(acc, acc, lambda, t0, t1);
    acc.re() += *it;
  }
  // multiply by lambda^{min_deg}
  mp::Complex scale(1.0, 0.0, bits_);
  mp::Complex base = min_deg_ >= 0 ? lambda : mp::Complex(1.0, 0.0, bits_) / lambda;
  for (int i = 0; i < std::abs(min_deg_); ++i) scale = scale * base;
  return acc * scale;
}

namespace {

LaurentPoly combine(const LaurentPoly& a, const LaurentPoly& b, bool subtract) {
  const mp::Bits bits = std::max(a.precision(), b.precision());
  if (a.is_zero() && b.is_zero()) return LaurentPoly(bits);
  const int lo = a.is_zero() ? b.min_deg() : b.is_zero() ? a.min_deg() : std::min(a.min_deg(), b.min_deg());
  const int hi = a.is_zero() ? b.max_deg() : b.is_zero() ? a.max_deg() : std::max(a.max_deg(), b.max_deg());
  std::vector<mp::Real> c;
  c.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int k = lo; k <= hi; ++k) {
    mp::Real x(bits);
    mp::Real ca = a.coeff(k), cb = b.coeff(k);
    if (subtract) {
      mpfr_sub(x.get(), ca.get(), cb.get(), MPFR_RNDN);
    } else {
      mpfr_add(x.get(), ca.get(), cb.get(), MPFR_RNDN);
    }
    c.push_back(std::move(x));
  }
  LaurentPoly r(lo, std::move(c));
  return r.is_zero() ? LaurentPoly(bits) : r;
}

}  // namespace

LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) { return combine(a, b, false); }
LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) { return combine(a, b, true); }

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
  const mp::Bits bits = std::max(a.precision(), b.precision());
  if (a.is_zero() || b.is_zero()) return LaurentPoly(bits);
  const std::size_t n = a.coeffs().size() + b.coeffs().size() - 1;
  std::vector<mp::Real> c;
  c.reserve(n);
  for (std::size_t i = 0; i < n; ++i) c.emplace_back(bits);
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs().size(); ++j) {
      mpfr_fma(c[i + j].get(), a.coeffs()[i].get(), b.coeffs()[j].get(), c[i + j].get(), MPFR_RNDN);
    }
  }
  LaurentPoly r(a.min_deg() + b.min_deg(), std::move(c));
  return r.is_zero() ? LaurentPoly(bits) : r;
}

long CharPoly::growth_bits() const { return std::max(0L, max_exponent(coeffs)); }

long recommended_precision(double rho_hat, int L) {
  const double bits = 4.0 * std::max(0.0, rho_hat) * L / std::numbers::ln2 + 64.0;
  return std::max(256L, static_cast<long>(std::ceil(bits)));
}

namespace {

/// Dense buffer for u(n), exponent k stored at k + offset.
struct Rolling {
  int offset;
  std::vector<mp::Real> prev, cur, next;

  Rolling(int L, mp::Bits bits) : offset(L + 2) {
    const std::size_t n = 2 * static_cast<std::size_t>(L + 2) + 1;
    for (std::size_t i = 0; i < n; ++i) {
      prev.emplace_back(bits);
      cur.emplace_back(bits);
      next.emplace_back(bits);
    }
    mpfr_set_ui(cur[static_cast<std::size_t>(offset)].get(), 1, MPFR_RNDN);  // u(0) = 1
  }

  /// next = (lambda + 1/lambda - v) cur - prev, where cur = u(n) spans [-n, n].
  void step(int n, double v, mp::Real& scratch) {
    mpfr_set_d(scratch.get(), v, MPFR_RNDN);
    for (int k = -(n + 1); k <= n + 1; ++k) {
      auto& out = next[static_cast<std::size_t>(k + offset)];
      const auto at = [&](std::vector<mp::Real>& buf, int e) -> mpfr_ptr {
        return buf[static_cast<std::size_t>(e + offset)].get();
      };
      // out = cur[k-1] + cur[k+1] - v cur[k] - prev[k]; entries outside the
      // support are zero because the buffers start zeroed and are recycled
      // only after being overwritten on a wider range.
      mpfr_add(out.get(), at(cur, k - 1), at(cur, k + 1), MPFR_RNDN);
      mpfr_sub(out.get(), out.get(), at(prev, k), MPFR_RNDN);
      mpfr_fms(out.get(), scratch.get(), at(cur, k), out.get(), MPFR_RNDN);
      mpfr_neg(out.get(), out.get(), MPFR_RNDN);
    }
    std::swap(prev, cur);
    std::swap(cur, next);
  }

  LaurentPoly snapshot(int n) const {
    std::vector<mp::Real> c(cur.begin() + (offset - n), cur.begin() + (offset + n + 1));
    return LaurentPoly(-n, std::move(c));
  }
};

}  // namespace

std::vector<LaurentPoly> dirichlet_solutions(const Potential& v, const BoxConfig& cfg) {
  cfg.validate();
  if (v.box_end() < cfg.L) throw std::invalid_argument("potential does not cover 0..L");
  const auto bits = static_cast<mp::Bits>(cfg.precision_bits);
  Rolling r(cfg.L, bits);
  mp::Real scratch(bits);
  std::vector<LaurentPoly> out;
  out.push_back(r.snapshot(0));
  for (int n = 0; n <= cfg.L; ++n) {
    r.step(n, v[static_cast<std::size_t>(n)], scratch);
    out.push_back(r.snapshot(n + 1));
  }
  return out;
}

CharPoly build_charpoly(const Potential& v, const BoxConfig& cfg) {
  cfg.validate();
  if (v.box_end() < cfg.L) throw std::invalid_argument("potential does not cover 0..L");
  const int L = cfg.L;
  const auto bits = static_cast<mp::Bits>(cfg.precision_bits);
  Rolling r(L, bits);
  mp::Real scratch(bits);
  for (int n = 0; n <= L; ++n) r.step(n, v[static_cast<std::size_t>(n)], scratch);
  // now r.prev = u(L), r.cur = u(L+1)
  const long u_growth = std::max(max_exponent(r.prev), max_exponent(r.cur));

  // coefficient m of p: u(L+1)[m-L-1] - u(L)[m-L-2], m = 0..2L+2
  CharPoly p;
  p.L = L;
  p.potential_hash = v.hash();
  p.precision = bits;
  p.coeffs.reserve(static_cast<std::size_t>(2 * L + 3));
  for (int m = 0; m <= 2 * L + 2; ++m) {
    mp::Real c(bits);
    const int k1 = m - L - 1, k0 = m - L - 2;
    mpfr_set(c.get(), r.cur[static_cast<std::size_t>(k1 + r.offset)].get(), MPFR_RNDN);
    if (k0 >= -L) mpfr_sub(c.get(), c.get(), r.prev[static_cast<std::size_t>(k0 + r.offset)].get(), MPFR_RNDN);
    p.coeffs.push_back(std::move(c));
  }

  const long growth = std::max(u_growth, p.growth_bits());
  if (growth + kPrecisionGuardBits > static_cast<long>(bits)) {
    const long need = ((growth + kPrecisionGuardBits + 63) / 64) * 64 + 64;
    std::ostringstream os;
    os << "precision underflow: coefficient range spans ~" << growth << " bits, precision_bits="
       << bits << " leaves fewer than " << kPrecisionGuardBits << " guard bits; rerun with precision_bits >= " << need;
    throw PrecisionError(os.str(), need);
  }

  // Degenerate tail (e.g. V(L) = 0): drop top coefficients that cancelled to
  // zero or to rounding level.
  const long cutoff = growth - static_cast<long>(bits) + 16;
  while (p.coeffs.size() > 1) {
    const auto& top = p.coeffs.back();
    if (top.is_zero() || top.exponent() < cutoff) {
      p.coeffs.pop_back();
    } else {
      break;
    }
  }

  if (mpfr_cmp_ui(p.coeffs[0].get(), 1) != 0) {
    mp::Real c0 = p.coeffs[0];
    for (auto& c : p.coeffs) c /= c0;
    p.normalization = c0.hex();
  }
  return p;
}

mp::Complex eval_charpoly(const CharPoly& p, const mp::Complex& lambda) {
  mp::Complex acc(p.precision);
  mp::Real t0(p.precision), t1(p.precision);
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
    mp::raw::mul(acc, acc, lambda, t0, t1);
    acc.re() += *it;
  }
  return acc;
}

ValueAndDerivative eval_charpoly_with_derivative(const CharPoly& p, const mp::Complex& lambda) {
  mp::Complex f(p.precision), df(p.precision);
  mp::Real t0(p.precision), t1(p.precision);
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
    mp::raw::mul(df, df, lambda, t0, t1);
    df += f;
    mp::raw::mul(f, f, lambda, t0, t1);
    f.re() += *it;
  }
  return {std::move(f), std::move(df)};
}

mp::Complex eval_transfer(const Potential& v, const mp::Complex& lambda, mp::Bits bits) {
  const int L = v.box_end();
  const mp::Complex one(1.0, 0.0, bits);
  const mp::Complex z = lambda + one / lambda;
  mp::Complex prev(bits), cur(1.0, 0.0, bits);
  for (int n = 0; n <= L; ++n) {
    mp::Complex shifted = z;
    shifted.re() -= mp::Real(v[static_cast<std::size_t>(n)], bits);
    mp::Complex next = shifted * cur - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  mp::Complex result = cur - lambda * prev;
  for (int i = 0; i <= L; ++i) result = result * lambda;
  return result;
}

std::string to_hex_dump(const CharPoly& p) {
  std::ostringstream os;
  os << "# reslab-charpoly v1 L=" << p.L << " degree=" << p.degree() << " precision=" << p.precision
     << " hash=" << p.potential_hash << " normalization=" << p.normalization << "\n";
  for (const auto& c : p.coeffs) os << c.hex() << "\n";
  return os.str();
}

CharPoly from_hex_dump(const std::string& text) {
  std::istringstream is(text);
  std::string header;
  std::getline(is, header);
  if (header.rfind("# reslab-charpoly v1", 0) != 0) throw std::invalid_argument("not a charpoly dump");
  CharPoly p;
  int degree = -1;
  std::istringstream hs(header.substr(20));
  std::string field;
  while (hs >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = field.substr(0, eq), val = field.substr(eq + 1);
    if (key == "L") p.L = std::stoi(val);
    else if (key == "degree") degree = std::stoi(val);
    else if (key == "precision") p.precision = std::stol(val);
    else if (key == "hash") p.potential_hash = val;
    else if (key == "normalization") p.normalization = val;
  }
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    p.coeffs.push_back(mp::Real::parse(line, p.precision));
  }
  if (static_cast<int>(p.coeffs.size()) != degree + 1) throw std::invalid_argument("charpoly dump degree mismatch");
  return p;
}

}  // namespace reslab
