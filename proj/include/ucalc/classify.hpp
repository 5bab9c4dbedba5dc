#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ucalc/calculus.hpp"
#include "ucalc/field.hpp"
#include "ucalc/function.hpp"
#include "ucalc/reps.hpp"

namespace ucalc {

/// sgn(x) in K^x / K^+: two elements are equivalent iff |1 - x/y| < 1,
/// i.e. valuations and leading digits agree.
struct SignClass {
  int valuation = 0;
  Digit leading = 1;

  static SignClass of(const Scalar& s) {
    if (!s.is_nonzero()) throw DomainError("sign class of a vanishing value");
    return SignClass{s.valuation_or_throw(), s.unit()[0]};
  }

  friend bool operator==(const SignClass&, const SignClass&) = default;

  std::string to_string() const {
    return "(v=" + std::to_string(valuation) + ", lead=" + std::to_string(leading) + ")";
  }
};

enum class Answer { Yes, No, Inconclusive };

struct Verdict {
  Answer answer = Answer::Inconclusive;
  std::optional<Rep> witness_rep;
  std::optional<std::pair<Rep, Rep>> witness_pair;
  int depth_checked = 0;
  std::string detail;

  std::string to_string() const {
    std::string s = "answer=";
    s += answer == Answer::Yes ? "yes" : answer == Answer::No ? "no" : "inconclusive";
    s += " witness=";
    if (witness_rep)
      s += "r=" + rep_to_string(*witness_rep);
    else if (witness_pair)
      s += "(r=" + rep_to_string(witness_pair->first) + ";r=" + rep_to_string(witness_pair->second) + ")";
    else
      s += "-";
    s += " depth=" + std::to_string(depth_checked);
    if (!detail.empty()) s += " " + detail;
    return s;
  }
};

namespace detail {

// |t| < 1, decided exactly; refuses rather than guesses when only a bound
// coarser than 1 is known.
inline bool abs_below_one(const Scalar& t) {
  if (t.is_exact_zero()) return true;
  if (t.kind() == ScalarKind::BelowPrecision) {
    if (t.cap() >= 1) return true;
    throw PrecisionExhausted("cannot decide |t| < 1 from a q^-" + std::to_string(t.cap()) +
                             " bound");
  }
  return t.valuation_or_throw() >= 1;
}

struct LeafSlope {
  Rep leaf;
  Scalar slope;        // degree-1 Taylor coefficient; exact zero when absent
  bool slope_tracked;  // false when only a below-precision bound remained
};

// Per-leaf tail data. The infinite part of every section-5 criterion is
// decided by the leaf slope, which requires the leaf polynomials to have
// degree <= 1.
inline std::vector<LeafSlope> leaf_slopes(const CnCombo& f) {
  const FieldParams& par = f.params();
  const int floor = std::max(1, par.precision / 2);
  std::vector<LeafSlope> out;
  for (const LeafPoly& lp : leaf_normal_form(f)) {
    for (std::size_t k = 2; k < lp.coeff.size(); ++k) {
      const Scalar& a = lp.coeff[k];
      if (a.is_nonzero())
        throw UnsupportedDegree("leaf r=" + rep_to_string(lp.leaf) +
                                " has polynomial degree > 1; tail closure undefined");
      if (!a.is_exact_zero() && a.cap() < floor)
        throw PrecisionExhausted("leaf coefficient bound too coarse; increase precision");
    }
    LeafSlope ls;
    ls.leaf = lp.leaf;
    if (lp.coeff.size() > 1) {
      const Scalar& a1 = lp.coeff[1];
      if (a1.is_nonzero()) {
        ls.slope = a1;
        ls.slope_tracked = true;
      } else {
        if (!a1.is_exact_zero() && a1.cap() < floor)
          throw PrecisionExhausted("leaf slope bound too coarse; increase precision");
        ls.slope = Scalar::zero(par);
        ls.slope_tracked = !a1.is_exact_zero() ? false : true;
      }
    } else {
      ls.slope = Scalar::zero(par);
      ls.slope_tracked = true;
    }
    out.push_back(std::move(ls));
  }
  return out;
}

// A representative strictly below the leaf whose level-0 coefficient is the
// leaf slope times gamma: leaf digits, zero-padded to the combo depth, then
// one extra nonzero digit two levels down.
inline Rep deep_child(const Rep& leaf, int combo_depth) {
  Digits ds = leaf.digits();
  ds.resize(static_cast<std::size_t>(combo_depth) + 1, 0);
  ds.push_back(1);
  return Rep::from_canonical(std::move(ds));
}

// b_r = f(r) - f(r_-) for every r in R_m \ {0}, canonical order.
inline std::vector<std::pair<Rep, Scalar>> explicit_coeffs(const CnCombo& f, int m) {
  const FieldParams& par = f.params();
  std::vector<std::pair<Rep, Scalar>> out;
  for (const Rep& r : enumerate_reps(par, m)) {
    if (r.is_zero()) continue;
    Scalar br = sub(eval(f, to_ring(par, r)), eval(f, to_ring(par, predecessor(r))));
    out.emplace_back(r, br);
  }
  return out;
}

}  // namespace detail

/// Monotone of type sgn(s): |s^{-1} b_r(f) gamma_r^{-1} - 1| < 1 for every
/// r in R_+, decided exactly via the explicit window R_{m+1} plus the leaf
/// slopes (which give b_r = c_eff gamma_r below the stored depth).
inline Verdict monotone_type(const CnCombo& f, const Scalar& s) {
  if (f.level() < 1)
    throw DomainError("classifiers need a combo at level >= 1 (re-express lower levels first)");
  if (!s.is_nonzero()) throw DomainError("type scalar s must be nonzero");
  const FieldParams& par = f.params();
  const int window = f.depth() + 1;
  Scalar s_inv = inv(s);
  Verdict v;
  v.depth_checked = window;
  for (const auto& [r, br] : detail::explicit_coeffs(f, window)) {
    Scalar ratio = div(br, gamma(par, r));
    Scalar t = sub(mul(s_inv, ratio), Scalar::one(par));
    if (!detail::abs_below_one(t)) {
      v.answer = Answer::No;
      v.witness_rep = r;
      v.detail = "ratio class " + (ratio.is_nonzero() ? SignClass::of(ratio).to_string()
                                                      : std::string("(vanishing)"));
      return v;
    }
  }
  for (const auto& ls : detail::leaf_slopes(f)) {
    Scalar t = sub(mul(s_inv, ls.slope), Scalar::one(par));
    if (!detail::abs_below_one(t)) {
      v.answer = Answer::No;
      v.witness_rep = detail::deep_child(ls.leaf, f.depth());
      v.detail = "leaf slope fails below depth " + std::to_string(f.depth());
      return v;
    }
  }
  v.answer = Answer::Yes;
  return v;
}

inline Verdict is_increasing(const CnCombo& f) { return monotone_type(f, Scalar::one(f.params())); }

/// |b_r(f) gamma_r^{-1}| < 1 for all r in R_+ (strict everywhere).
inline Verdict is_pseudocontraction(const CnCombo& f) {
  if (f.level() < 1)
    throw DomainError("classifiers need a combo at level >= 1 (re-express lower levels first)");
  const FieldParams& par = f.params();
  const int window = f.depth() + 1;
  Verdict v;
  v.depth_checked = window;
  for (const auto& [r, br] : detail::explicit_coeffs(f, window)) {
    Scalar ratio = div(br, gamma(par, r));
    if (!detail::abs_below_one(ratio)) {
      v.answer = Answer::No;
      v.witness_rep = r;
      return v;
    }
  }
  for (const auto& ls : detail::leaf_slopes(f)) {
    if (!detail::abs_below_one(ls.slope)) {
      v.answer = Answer::No;
      v.witness_rep = detail::deep_child(ls.leaf, f.depth());
      return v;
    }
  }
  v.answer = Answer::Yes;
  return v;
}

/// Isometry: |b_r gamma_r^{-1}| = 1 everywhere on R_+, and sibling pairs
/// (equal predecessors) satisfy |b_{r1} - b_{r2}| = |r1 - r2|. Explicit over
/// R_{m+1}; the leaf condition |c_eff| = 1 forces both below the window.
inline Verdict is_isometry(const CnCombo& f) {
  if (f.level() < 1)
    throw DomainError("classifiers need a combo at level >= 1 (re-express lower levels first)");
  const FieldParams& par = f.params();
  const int window = f.depth() + 1;
  Verdict v;
  v.depth_checked = window;
  auto coeffs = detail::explicit_coeffs(f, window);
  for (const auto& [r, br] : coeffs) {
    Scalar ratio = div(br, gamma(par, r));
    bool unit = ratio.is_nonzero() && ratio.valuation_or_throw() == 0;
    if (!unit) {
      v.answer = Answer::No;
      v.witness_rep = r;
      v.detail = "|b_r gamma_r^-1| != 1";
      return v;
    }
  }
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    for (std::size_t k = i + 1; k < coeffs.size(); ++k) {
      const Rep& r1 = coeffs[i].first;
      const Rep& r2 = coeffs[k].first;
      if (!(predecessor(r1) == predecessor(r2))) continue;
      Scalar diff = sub(coeffs[i].second, coeffs[k].second);
      Scalar dist = ring_sub(to_ring(par, r1), to_ring(par, r2));
      bool ok = diff.is_nonzero() &&
                diff.valuation_or_throw() == dist.valuation_or_throw();
      if (!ok) {
        v.answer = Answer::No;
        v.witness_pair = std::make_pair(r1, r2);
        v.detail = "|b_{r1} - b_{r2}| != |r1 - r2| for siblings";
        return v;
      }
    }
  }
  for (const auto& ls : detail::leaf_slopes(f)) {
    bool unit = ls.slope.is_nonzero() && ls.slope.valuation_or_throw() == 0;
    if (!unit) {
      v.answer = Answer::No;
      v.witness_rep = detail::deep_child(ls.leaf, f.depth());
      v.detail = "leaf slope is not a unit";
      return v;
    }
  }
  v.answer = Answer::Yes;
  return v;
}

/// f' = 0 with f in C^n: for a finite combo this holds iff every leaf is
/// constant (then only finitely many b_r are nonzero and the tail ratios
/// vanish identically).
inline Verdict is_derivative_zero(const CnCombo& f, int n) {
  if (n < 1) throw DomainError("derivative-zero order must be >= 1");
  const FieldParams& par = f.params();
  const int floor = std::max(1, par.precision / 2);
  Verdict v;
  v.depth_checked = f.depth();
  for (const LeafPoly& lp : leaf_normal_form(f)) {
    bool constant = true;
    for (std::size_t k = 1; k < lp.coeff.size() && constant; ++k) {
      const Scalar& a = lp.coeff[k];
      if (a.is_nonzero()) constant = false;
      if (!a.is_nonzero() && !a.is_exact_zero() && a.cap() < floor)
        throw PrecisionExhausted("leaf coefficient bound too coarse; increase precision");
    }
    if (constant) continue;
    // find a concrete child whose wavelet coefficient is verifiably nonzero
    for (int d = f.depth() + 1; d + 1 <= par.precision; ++d) {
      for (Digit a = 1; a < par.p; ++a) {
        Digits ds = lp.leaf.digits();
        ds.resize(static_cast<std::size_t>(d), 0);
        ds.push_back(a);
        Rep child = Rep::from_canonical(std::move(ds));
        Scalar br = sub(eval(f, to_ring(par, child)), eval(f, to_ring(par, predecessor(child))));
        if (br.is_nonzero()) {
          v.answer = Answer::No;
          v.witness_rep = child;
          v.detail = "leaf r=" + rep_to_string(lp.leaf) + " is not locally constant";
          return v;
        }
      }
      if (d > f.depth() + 3) break;  // a nonzero difference exists within a few levels
    }
    v.answer = Answer::No;
    v.witness_rep = detail::deep_child(lp.leaf, f.depth());
    v.detail = "leaf r=" + rep_to_string(lp.leaf) + " is not locally constant";
    return v;
  }
  v.answer = Answer::Yes;
  return v;
}

/// Finite-depth form of the degree-raising criterion: along the chain
/// r(d) = a + pi^d, every b^{n,j} gamma^{-1} sequence must be Cauchy within
/// q^{-tol_k} over the window and the stabilized values must satisfy the
/// binomial proportionality against the j = 0 limit.
inline Verdict cnplus1_limit_test(const FieldParams& par, const CoeffStream& stream, const Rep& a,
                                  int m0, int m1, int tol_k) {
  const int n = stream.level;
  if (n < 0) throw DomainError("negative stream level");
  int lo = std::max(m0, a.length());
  Verdict v;
  v.depth_checked = m1;
  if (m1 + 1 > par.precision)
    throw PrecisionExhausted("depth window reaches beyond the working precision");
  if (m1 - lo < 2) {
    v.answer = Answer::Inconclusive;
    v.detail = "window too short to stabilize";
    return v;
  }

  auto chain_rep = [&](int d) {
    Digits ds = a.digits();
    ds.resize(static_cast<std::size_t>(d), 0);
    ds.push_back(1);
    return Rep::from_canonical(std::move(ds));
  };

  std::vector<std::vector<Scalar>> seq(static_cast<std::size_t>(n) + 1);
  for (int d = lo; d <= m1; ++d) {
    Rep r = chain_rep(d);
    Scalar ginv = inv(gamma(par, r));
    for (int j = 0; j <= n; ++j)
      seq[static_cast<std::size_t>(j)].push_back(mul(stream.rule(r, j), ginv));
  }

  auto small = [&](const Scalar& d) {
    if (d.is_exact_zero()) return true;
    if (d.kind() == ScalarKind::BelowPrecision) return d.cap() >= tol_k;
    return d.valuation_or_throw() >= tol_k;
  };

  std::vector<Scalar> limits;
  for (int j = 0; j <= n; ++j) {
    const auto& xs = seq[static_cast<std::size_t>(j)];
    bool all_small = true;
    AbsValue first_diff = AbsValue::zero(), last_diff = AbsValue::zero();
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      Scalar d = sub(xs[i + 1], xs[i]);
      AbsValue bound = abs_bound(d);
      if (i == 0) first_diff = bound;
      last_diff = bound;
      if (!small(d)) all_small = false;
    }
    if (!all_small) {
      if (!(last_diff < first_diff) && AbsValue::q_pow(-tol_k) < last_diff) {
        v.answer = Answer::No;
        v.witness_pair = std::make_pair(chain_rep(m1 - 1), chain_rep(m1));
        v.detail = "sequence j=" + std::to_string(j) + " is not Cauchy at tolerance q^-" +
                   std::to_string(tol_k);
        return v;
      }
      v.answer = Answer::Inconclusive;
      v.detail = "sequence j=" + std::to_string(j) + " still shrinking at the window end";
      return v;
    }
    limits.push_back(xs.back());
  }

  for (int j = 0; j <= n; ++j) {
    Scalar want = mul(binomial_scalar(par, n + 1, j), limits[0]);
    Scalar d = sub(limits[static_cast<std::size_t>(j)], want);
    if (!small(d)) {
      v.answer = Answer::No;
      v.witness_rep = chain_rep(m1);
      v.detail = "binomial proportionality fails at j=" + std::to_string(j);
      return v;
    }
  }
  v.answer = Answer::Yes;
  std::string lim = limits[0].is_nonzero()
                        ? "q^" + std::to_string(-limits[0].valuation_or_throw())
                        : "0";
  v.detail = "limit |.|=" + lim;
  return v;
}

}  // namespace ucalc
