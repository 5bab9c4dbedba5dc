#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ucalc/error.hpp"

namespace ucalc {

/// Backend selector. Zp is the mixed-radix ring Z_p (pi = p, digits carry);
/// FpT is the carry-free power-series ring F_p[[t]] (pi = t, digits add mod p).
enum class Backend { Zp, FpT };

struct FieldParams {
  Backend backend = Backend::Zp;
  std::int64_t p = 2;
  int precision = 32;  // N: significant unit digits carried by every Scalar
  friend bool operator==(const FieldParams&, const FieldParams&) = default;
};

using Digit = std::int32_t;
using Digits = std::vector<Digit>;

namespace detail {

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace detail

inline void validate(const FieldParams& par) {
  if (!detail::is_prime(par.p)) throw DomainError("p must be prime, got " + std::to_string(par.p));
  if (par.p > (std::int64_t{1} << 20)) throw DomainError("p too large");
  if (par.precision < 1 || par.precision > 4096)
    throw DomainError("precision must be in [1, 4096]");
}

inline void require_same(const FieldParams& a, const FieldParams& b) {
  if (!(a == b)) throw DomainError("mismatched FieldParams");
}

inline const char* backend_name(Backend b) { return b == Backend::Zp ? "zp" : "fpt"; }

namespace detail {

// w <- a + b over a common digit window. Zp carries; carry out of the window
// is discarded (the window is all that is known).
inline void add_windows(const FieldParams& par, Digits& a, const Digits& b) {
  const std::int64_t p = par.p;
  if (par.backend == Backend::Zp) {
    std::int64_t carry = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::int64_t t = std::int64_t{a[i]} + (i < b.size() ? b[i] : 0) + carry;
      a[i] = static_cast<Digit>(t % p);
      carry = t / p;
    }
  } else {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
      a[i] = static_cast<Digit>((a[i] + b[i]) % p);
  }
}

// a <- a - b over a common window, mod pi^|a| (borrow wraps, which is exact
// p-adically: low digits of a difference depend only on low digits).
inline void sub_windows(const FieldParams& par, Digits& a, const Digits& b) {
  const std::int64_t p = par.p;
  if (par.backend == Backend::Zp) {
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::int64_t t = std::int64_t{a[i]} - (i < b.size() ? b[i] : 0) - borrow;
      borrow = 0;
      while (t < 0) {
        t += p;
        ++borrow;
      }
      a[i] = static_cast<Digit>(t);
    }
  } else {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
      a[i] = static_cast<Digit>(((a[i] - b[i]) % p + p) % p);
  }
}

inline Digits mul_windows(const FieldParams& par, const Digits& a, const Digits& b,
                          std::size_t len) {
  const std::int64_t p = par.p;
  std::vector<std::int64_t> acc(len, 0);
  for (std::size_t i = 0; i < a.size() && i < len; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size() && i + j < len; ++j)
      acc[i + j] += std::int64_t{a[i]} * b[j];
  }
  Digits out(len, 0);
  if (par.backend == Backend::Zp) {
    std::int64_t carry = 0;
    for (std::size_t i = 0; i < len; ++i) {
      std::int64_t t = acc[i] + carry;
      out[i] = static_cast<Digit>(t % p);
      carry = t / p;
    }
  } else {
    for (std::size_t i = 0; i < len; ++i) out[i] = static_cast<Digit>(acc[i] % p);
  }
  return out;
}

inline Digit inv_mod_p(std::int64_t a, std::int64_t p) {
  std::int64_t t = 0, nt = 1, r = p, nr = a % p;
  while (nr != 0) {
    std::int64_t q = r / nr;
    std::swap(t -= q * nt, nt);
    std::swap(r -= q * nr, nr);
  }
  return static_cast<Digit>(((t % p) + p) % p);
}

// Newton inverse of a unit digit vector: u*w = 1 mod pi^len.
inline Digits inv_windows(const FieldParams& par, const Digits& u, std::size_t len) {
  Digits w{inv_mod_p(u[0], par.p)};
  std::size_t k = 1;
  while (k < len) {
    std::size_t k2 = std::min(2 * k, len);
    Digits uw = mul_windows(par, u, w, k2);
    Digits two(k2, 0);
    two[0] = static_cast<Digit>(2 % par.p);
    if (par.backend == Backend::Zp && par.p == 2) {
      two.assign(k2, 0);
      if (k2 > 1) two[1] = 1;  // 2 = pi in Z_2
    }
    sub_windows(par, two, uw);
    w = mul_windows(par, w, two, k2);
    k = k2;
  }
  w.resize(len);
  return w;
}

}  // namespace detail

enum class ScalarKind { Zero, NonZero, BelowPrecision };

/// Exact absolute value |x| = q^exp (q = p here), or 0.
struct AbsValue {
  bool is_zero = true;
  int exp = 0;

  static AbsValue zero() { return {}; }
  static AbsValue q_pow(int e) { return {false, e}; }

  friend bool operator==(const AbsValue&, const AbsValue&) = default;
  friend bool operator<(const AbsValue& a, const AbsValue& b) {
    if (a.is_zero) return !b.is_zero;
    if (b.is_zero) return false;
    return a.exp < b.exp;
  }
  friend bool operator<=(const AbsValue& a, const AbsValue& b) { return a < b || a == b; }

  AbsValue scaled(const AbsValue& o) const {  // |x*y|
    if (is_zero || o.is_zero) return zero();
    return q_pow(exp + o.exp);
  }

  std::string to_string(std::int64_t q) const {
    if (is_zero) return "0";
    if (exp == 0) return "1";
    int e = exp < 0 ? -exp : exp;
    long double bits = e * std::log2l(static_cast<long double>(q));
    if (bits > 120) return "q^" + std::to_string(exp);
    unsigned __int128 v = 1;
    for (int i = 0; i < e; ++i) v *= static_cast<unsigned __int128>(q);
    std::string digits;
    while (v > 0) {
      digits.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
      v /= 10;
    }
    std::reverse(digits.begin(), digits.end());
    return exp > 0 ? digits : "1/" + digits;
  }
};

/// A field element at finite precision: pi^v * (unit of `precision()` known
/// digits), exact zero, or "zero at precision cap" (all tracked digits
/// cancelled; only |x| <= q^{-cap} is known).
class Scalar {
public:
  Scalar() = default;

  static Scalar zero(const FieldParams& par) {
    Scalar s;
    s.par_ = par;
    s.kind_ = ScalarKind::Zero;
    return s;
  }

  static Scalar below_precision(const FieldParams& par, int cap) {
    Scalar s;
    s.par_ = par;
    s.kind_ = ScalarKind::BelowPrecision;
    s.v_ = cap;
    return s;
  }

  /// Normalizing constructor: `window` holds the known digits of the value
  /// starting at pi^v. All-zero windows give BelowPrecision(v + |window|).
  static Scalar make(const FieldParams& par, int v, Digits window) {
    std::size_t nz = 0;
    while (nz < window.size() && window[nz] == 0) ++nz;
    if (nz == window.size())
      return below_precision(par, v + static_cast<int>(window.size()));
    window.erase(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(nz));
    if (window.size() > static_cast<std::size_t>(par.precision))
      window.resize(static_cast<std::size_t>(par.precision));
    Scalar s;
    s.par_ = par;
    s.kind_ = ScalarKind::NonZero;
    s.v_ = v + static_cast<int>(nz);
    s.unit_ = std::move(window);
    return s;
  }

  /// Exact digit-list input (parser, tests). All-zero lists are rejected;
  /// exact zero must be constructed as the literal zero.
  static Scalar from_digits(const FieldParams& par, int v, Digits ds) {
    if (ds.empty()) throw DomainError("empty digit list");
    for (Digit d : ds)
      if (d < 0 || d >= par.p) throw DomainError("digit out of range");
    bool all_zero = std::all_of(ds.begin(), ds.end(), [](Digit d) { return d == 0; });
    if (all_zero) throw DomainError("all-zero digit list; write the literal 0 instead");
    return make(par, v, std::move(ds));
  }

  static Scalar from_int(const FieldParams& par, std::int64_t k) {
    if (k == 0) return zero(par);
    if (par.backend == Backend::FpT) {
      std::int64_t d = ((k % par.p) + par.p) % par.p;
      if (d == 0) return zero(par);  // exact: char p kills multiples of p
      Digits ds(static_cast<std::size_t>(par.precision), 0);
      ds[0] = static_cast<Digit>(d);
      return make(par, 0, std::move(ds));
    }
    int v = 0;
    while (k % par.p == 0) {
      k /= par.p;
      ++v;
    }
    Digits ds(static_cast<std::size_t>(par.precision), 0);
    std::int64_t rest = k;
    for (int i = 0; i < par.precision; ++i) {
      std::int64_t d = ((rest % par.p) + par.p) % par.p;
      ds[static_cast<std::size_t>(i)] = static_cast<Digit>(d);
      rest = (rest - d) / par.p;
    }
    return make(par, v, std::move(ds));
  }

  static Scalar one(const FieldParams& par) { return from_int(par, 1); }
  static Scalar uniformizer(const FieldParams& par) {
    Digits ds(static_cast<std::size_t>(par.precision), 0);
    ds[0] = 1;
    return make(par, 1, std::move(ds));
  }

  ScalarKind kind() const { return kind_; }
  bool is_exact_zero() const { return kind_ == ScalarKind::Zero; }
  bool is_nonzero() const { return kind_ == ScalarKind::NonZero; }
  /// True when no nonzero digit is tracked (exact zero or below precision).
  bool vanishes() const { return kind_ != ScalarKind::NonZero; }

  const FieldParams& params() const { return par_; }

  /// Valuation; nullopt encodes +infinity (exact zero).
  std::optional<int> valuation() const {
    if (kind_ == ScalarKind::Zero) return std::nullopt;
    if (kind_ == ScalarKind::BelowPrecision)
      throw PrecisionExhausted("valuation of a value known only below precision q^-" +
                               std::to_string(v_));
    return v_;
  }

  int valuation_or_throw() const {
    auto v = valuation();
    if (!v) throw DomainError("valuation of exact zero");
    return *v;
  }

  /// Significant digits (NonZero) — the "remaining precision" every op reports.
  int precision() const {
    if (kind_ != ScalarKind::NonZero) throw DomainError("precision of a vanishing scalar");
    return static_cast<int>(unit_.size());
  }

  /// BelowPrecision bound: |x| <= q^{-cap()}.
  int cap() const {
    if (kind_ != ScalarKind::BelowPrecision) throw DomainError("cap of a tracked scalar");
    return v_;
  }

  const Digits& unit() const { return unit_; }
  Digit unit_digit(std::size_t i) const { return i < unit_.size() ? unit_[i] : 0; }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    if (!(a.par_ == b.par_) || a.kind_ != b.kind_) return false;
    switch (a.kind_) {
      case ScalarKind::Zero:
        return true;
      case ScalarKind::BelowPrecision:
        return a.v_ == b.v_;
      case ScalarKind::NonZero:
        return a.v_ == b.v_ && a.unit_ == b.unit_;
    }
    return false;
  }

private:
  FieldParams par_{};
  ScalarKind kind_ = ScalarKind::Zero;
  int v_ = 0;  // valuation (NonZero) or cap (BelowPrecision)
  Digits unit_{};
};

inline AbsValue abs_of(const Scalar& s) {
  if (s.is_exact_zero()) return AbsValue::zero();
  if (s.kind() == ScalarKind::BelowPrecision)
    throw PrecisionExhausted("absolute value known only as a bound q^-" + std::to_string(s.cap()));
  return AbsValue::q_pow(-s.valuation_or_throw());
}

/// Upper bound on |s| that is defined for every kind.
inline AbsValue abs_bound(const Scalar& s) {
  if (s.is_exact_zero()) return AbsValue::zero();
  if (s.kind() == ScalarKind::BelowPrecision) return AbsValue::q_pow(-s.cap());
  return AbsValue::q_pow(-s.valuation_or_throw());
}

inline Scalar neg(const Scalar& a) {
  if (a.vanishes()) return a;
  const FieldParams& par = a.params();
  Digits w(a.unit().size(), 0);
  detail::sub_windows(par, w, a.unit());
  return Scalar::make(par, a.valuation_or_throw(), std::move(w));
}

inline Scalar add(const Scalar& a, const Scalar& b) {
  require_same(a.params(), b.params());
  const FieldParams& par = a.params();
  if (a.is_exact_zero()) return b;
  if (b.is_exact_zero()) return a;
  if (a.kind() == ScalarKind::BelowPrecision && b.kind() == ScalarKind::BelowPrecision)
    return Scalar::below_precision(par, std::min(a.cap(), b.cap()));
  if (a.kind() == ScalarKind::BelowPrecision || b.kind() == ScalarKind::BelowPrecision) {
    const Scalar& x = a.is_nonzero() ? a : b;
    int cap = (a.is_nonzero() ? b : a).cap();
    int vx = x.valuation_or_throw();
    if (vx >= cap) return Scalar::below_precision(par, cap);
    int known = std::min(vx + x.precision(), cap);
    Digits w(static_cast<std::size_t>(known - vx), 0);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = x.unit_digit(i);
    return Scalar::make(par, vx, std::move(w));
  }
  int va = a.valuation_or_throw(), vb = b.valuation_or_throw();
  int v = std::min(va, vb);
  int known = std::min(va + a.precision(), vb + b.precision());
  Digits w(static_cast<std::size_t>(known - v), 0);
  Digits wb(w.size(), 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    int pos = v + static_cast<int>(i);
    if (pos >= va) w[i] = a.unit_digit(static_cast<std::size_t>(pos - va));
    if (pos >= vb) wb[i] = b.unit_digit(static_cast<std::size_t>(pos - vb));
  }
  detail::add_windows(par, w, wb);
  return Scalar::make(par, v, std::move(w));
}

inline Scalar sub(const Scalar& a, const Scalar& b) {
  // x - x is exactly zero whatever the tracked precision; only cancellation
  // between distinct representations degrades to BelowPrecision.
  if (a == b && a.is_nonzero()) return Scalar::zero(a.params());
  return add(a, neg(b));
}

inline Scalar mul(const Scalar& a, const Scalar& b) {
  require_same(a.params(), b.params());
  const FieldParams& par = a.params();
  if (a.is_exact_zero() || b.is_exact_zero()) return Scalar::zero(par);
  if (a.kind() == ScalarKind::BelowPrecision || b.kind() == ScalarKind::BelowPrecision) {
    int ca = a.is_nonzero() ? a.valuation_or_throw() : a.cap();
    int cb = b.is_nonzero() ? b.valuation_or_throw() : b.cap();
    return Scalar::below_precision(par, ca + cb);
  }
  std::size_t prec = static_cast<std::size_t>(std::min(a.precision(), b.precision()));
  Digits w = detail::mul_windows(par, a.unit(), b.unit(), prec);
  return Scalar::make(par, a.valuation_or_throw() + b.valuation_or_throw(), std::move(w));
}

inline Scalar inv(const Scalar& a) {
  const FieldParams& par = a.params();
  if (a.is_exact_zero()) throw DomainError("division by exact zero");
  if (a.kind() == ScalarKind::BelowPrecision)
    throw PrecisionExhausted("division by a value indistinguishable from zero (bound q^-" +
                             std::to_string(a.cap()) + ")");
  Digits w = detail::inv_windows(par, a.unit(), static_cast<std::size_t>(a.precision()));
  return Scalar::make(par, -a.valuation_or_throw(), std::move(w));
}

inline Scalar div(const Scalar& a, const Scalar& b) {
  require_same(a.params(), b.params());
  if (b.is_exact_zero()) throw DomainError("division by exact zero");
  if (b.kind() == ScalarKind::BelowPrecision)
    throw PrecisionExhausted("division by a value indistinguishable from zero (bound q^-" +
                             std::to_string(b.cap()) + ")");
  if (a.is_exact_zero()) return a;
  if (a.kind() == ScalarKind::BelowPrecision)
    return Scalar::below_precision(a.params(), a.cap() - b.valuation_or_throw());
  return mul(a, inv(b));
}

inline Scalar pow(const Scalar& a, int e) {
  if (e < 0) return inv(pow(a, -e));
  const FieldParams& par = a.params();
  Scalar acc = Scalar::one(par);
  if (e == 0) return acc;
  if (a.is_exact_zero()) return a;
  if (a.kind() == ScalarKind::BelowPrecision)
    return Scalar::below_precision(par, a.cap() * e);
  Scalar base = a;
  while (e > 0) {
    if (e & 1) acc = mul(acc, base);
    e >>= 1;
    if (e) base = mul(base, base);
  }
  return acc;
}

/// Exact j! as a Scalar. Over F_p[[t]] this requires j <= p-1.
inline Scalar factorial_scalar(const FieldParams& par, int j) {
  if (j < 0) throw DomainError("factorial of a negative integer");
  if (par.backend == Backend::FpT && j >= par.p)
    throw CharacteristicViolation("j! vanishes in characteristic p for j=" + std::to_string(j) +
                                  " >= p=" + std::to_string(par.p));
  Scalar acc = Scalar::one(par);
  for (int i = 2; i <= j; ++i) acc = mul(acc, Scalar::from_int(par, i));
  return acc;
}

inline Scalar binomial_scalar(const FieldParams& par, int n, int k) {
  if (k < 0 || k > n) return Scalar::zero(par);
  std::int64_t c = 1;
  for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
  return Scalar::from_int(par, c);
}

/// True when a and b agree on every digit both track: a - b has no
/// significant digit left ("equal at tracked precision").
inline bool indistinguishable(const Scalar& a, const Scalar& b) { return sub(a, b).vanishes(); }

/// The value modulo pi^k: digits at positions below k, or zero-at-precision-k
/// when nothing survives.
inline Scalar truncated_at(const Scalar& s, int k) {
  const FieldParams& par = s.params();
  if (s.is_exact_zero()) return s;
  if (s.kind() == ScalarKind::BelowPrecision)
    return Scalar::below_precision(par, std::min(s.cap(), k));
  int v = s.valuation_or_throw();
  if (v >= k) return Scalar::below_precision(par, k);
  int keep = std::min(s.precision(), k - v);
  Digits ds(s.unit().begin(), s.unit().begin() + keep);
  return Scalar::make(par, v, std::move(ds));
}

/// A point of R, held exactly as its first N pi-adic digits (an element of
/// the depth-N representative grid).
class RingElem {
public:
  RingElem() = default;

  static RingElem zero_point(const FieldParams& par) {
    RingElem x;
    x.par_ = par;
    x.d_.assign(static_cast<std::size_t>(par.precision), 0);
    return x;
  }

  static RingElem from_digits(const FieldParams& par, Digits ds) {
    if (ds.size() > static_cast<std::size_t>(par.precision))
      throw DomainError("point has more digits than the working precision");
    for (Digit d : ds)
      if (d < 0 || d >= par.p) throw DomainError("digit out of range");
    RingElem x = zero_point(par);
    std::copy(ds.begin(), ds.end(), x.d_.begin());
    return x;
  }

  static RingElem from_int(const FieldParams& par, std::int64_t k) {
    RingElem x = zero_point(par);
    if (par.backend == Backend::FpT) {
      x.d_[0] = static_cast<Digit>(((k % par.p) + par.p) % par.p);
      return x;
    }
    std::int64_t rest = k;
    for (int i = 0; i < par.precision; ++i) {
      std::int64_t d = ((rest % par.p) + par.p) % par.p;
      x.d_[static_cast<std::size_t>(i)] = static_cast<Digit>(d);
      rest = (rest - d) / par.p;
    }
    return x;
  }

  const FieldParams& params() const { return par_; }
  const Digits& digits() const { return d_; }
  Digit digit(std::size_t i) const { return i < d_.size() ? d_[i] : 0; }
  void set_digit(std::size_t i, Digit v) {
    if (i >= d_.size()) throw DomainError("digit index beyond working precision");
    if (v < 0 || v >= par_.p) throw DomainError("digit out of range");
    d_[i] = v;
  }

  /// x_m of the paper: the truncation keeping digits below position m.
  RingElem truncated(int m) const {
    RingElem x = *this;
    for (std::size_t i = static_cast<std::size_t>(std::max(m, 0)); i < x.d_.size(); ++i)
      x.d_[i] = 0;
    return x;
  }

  friend bool operator==(const RingElem&, const RingElem&) = default;

private:
  FieldParams par_{};
  Digits d_{};
};

/// x - y, exact: Zero iff x == y, otherwise a full-precision Scalar.
inline Scalar ring_sub(const RingElem& x, const RingElem& y) {
  require_same(x.params(), y.params());
  const FieldParams& par = x.params();
  if (x == y) return Scalar::zero(par);
  std::size_t n = static_cast<std::size_t>(par.precision);
  Digits w(2 * n, 0);
  std::copy(x.digits().begin(), x.digits().end(), w.begin());
  Digits wy(2 * n, 0);
  std::copy(y.digits().begin(), y.digits().end(), wy.begin());
  detail::sub_windows(par, w, wy);
  return Scalar::make(par, 0, std::move(w));
}

inline Scalar ring_to_scalar(const RingElem& x) {
  return ring_sub(x, RingElem::zero_point(x.params()));
}

}  // namespace ucalc
