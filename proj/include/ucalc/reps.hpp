#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ucalc/field.hpp"

namespace ucalc {

/// A representative r in R = U_m R_m: a finite digit string with nonzero top
/// digit (canonical form), or the empty string for r = 0. Canonical form makes
/// l(r), r_- and equality structural.
class Rep {
public:
  Rep() = default;

  static Rep from_digits(const FieldParams& par, Digits ds) {
    for (Digit d : ds)
      if (d < 0 || d >= par.p) throw DomainError("rep digit out of range");
    while (!ds.empty() && ds.back() == 0) ds.pop_back();
    Rep r;
    r.d_ = std::move(ds);
    return r;
  }

  static Rep from_int(const FieldParams& par, std::int64_t k) {
    if (k < 0) throw DomainError("representatives are indexed by nonnegative integers");
    Digits ds;
    while (k > 0) {
      ds.push_back(static_cast<Digit>(k % par.p));
      k /= par.p;
    }
    Rep r;
    r.d_ = std::move(ds);
    return r;
  }

  /// Digits already known valid; only canonicalizes.
  static Rep from_canonical(Digits ds) {
    while (!ds.empty() && ds.back() == 0) ds.pop_back();
    Rep r;
    r.d_ = std::move(ds);
    return r;
  }

  int length() const { return static_cast<int>(d_.size()); }  // l(r)
  bool is_zero() const { return d_.empty(); }
  const Digits& digits() const { return d_; }
  Digit digit(std::size_t i) const { return i < d_.size() ? d_[i] : 0; }

  friend bool operator==(const Rep&, const Rep&) = default;

private:
  Digits d_{};
};

/// Canonical order: by length, then lexicographic on digits (low index first).
struct RepLess {
  bool operator()(const Rep& a, const Rep& b) const {
    if (a.length() != b.length()) return a.length() < b.length();
    return a.digits() < b.digits();
  }
};

/// r_-: drop the top pi-power term.
inline Rep predecessor(const Rep& r) {
  if (r.is_zero()) throw DomainError("predecessor of r = 0");
  Digits ds = r.digits();
  ds.pop_back();
  return Rep::from_canonical(std::move(ds));
}

/// gamma_r = 1 if r = 0, else r - r_- (a single digit times pi^{l(r)-1}).
inline Scalar gamma(const FieldParams& par, const Rep& r) {
  if (r.is_zero()) return Scalar::one(par);
  Digits ds(static_cast<std::size_t>(par.precision), 0);
  ds[0] = r.digits().back();
  return Scalar::make(par, r.length() - 1, std::move(ds));
}

inline RingElem to_ring(const FieldParams& par, const Rep& r) {
  if (r.length() > par.precision)
    throw DomainError("rep deeper than the working precision");
  return RingElem::from_digits(par, r.digits());
}

/// r <| x : |x - r| <= q^{-l(r)}, i.e. the first l(r) digits of x are r's.
inline bool precedes(const Rep& r, const RingElem& x) {
  if (r.length() > x.params().precision) return false;
  for (int i = 0; i < r.length(); ++i)
    if (x.digit(static_cast<std::size_t>(i)) != r.digit(static_cast<std::size_t>(i)))
      return false;
  return true;
}

/// r <| s between representatives (zero-extended digit comparison).
inline bool precedes(const Rep& r, const Rep& s) {
  for (int i = 0; i < r.length(); ++i)
    if (s.digit(static_cast<std::size_t>(i)) != r.digit(static_cast<std::size_t>(i)))
      return false;
  return true;
}

/// All of R_m in canonical (length, lex) order; p^m elements.
inline std::vector<Rep> enumerate_reps(const FieldParams& par, int m) {
  if (m < 0) throw DomainError("negative depth");
  std::vector<Rep> out;
  out.push_back(Rep());
  for (int len = 1; len <= m; ++len) {
    Digits ds(static_cast<std::size_t>(len), 0);
    while (true) {
      if (ds.back() != 0) out.push_back(Rep::from_digits(par, ds));
      // lexicographic successor: digits compare from index 0, so bump the tail
      int i = len - 1;
      while (i >= 0 && ds[static_cast<std::size_t>(i)] == par.p - 1) {
        ds[static_cast<std::size_t>(i)] = 0;
        --i;
      }
      if (i < 0) break;
      ++ds[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

/// The unique chain y = t_1 <| t_2 <| ... <| t_k = x with (t_j)_- = t_{j-1}.
inline std::vector<Rep> chain(const Rep& y, const Rep& x) {
  if (x == y) throw DomainError("chain endpoints must differ");
  std::vector<Rep> back;
  Rep t = x;
  while (!(t == y)) {
    back.push_back(t);
    if (t.is_zero() || t.length() <= y.length())
      throw DomainError("chain requires y <| x");
    t = predecessor(t);
  }
  back.push_back(y);
  return {back.rbegin(), back.rend()};
}

/// z: the common initial part of the pi-adic expansions of x and y.
inline Rep common_prefix(const Rep& x, const Rep& y) {
  if (x == y) throw DomainError("common_prefix requires distinct points");
  Digits ds;
  int n = std::max(x.length(), y.length());
  for (int i = 0; i < n; ++i) {
    auto ix = static_cast<std::size_t>(i);
    if (x.digit(ix) != y.digit(ix)) break;
    ds.push_back(x.digit(ix));
  }
  return Rep::from_canonical(std::move(ds));
}

/// First m digits of a point, canonicalized (the leaf index containing x).
inline Rep ring_prefix(const RingElem& x, int m) {
  Digits ds;
  for (int i = 0; i < m; ++i) ds.push_back(x.digit(static_cast<std::size_t>(i)));
  return Rep::from_canonical(std::move(ds));
}

inline std::string rep_to_string(const Rep& r) {
  std::string s;
  for (int i = 0; i < r.length(); ++i) {
    if (i) s += ',';
    s += std::to_string(r.digit(static_cast<std::size_t>(i)));
  }
  return s;
}

}  // namespace ucalc
