#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <thread>
#include <vector>

#include "ucalc/field.hpp"
#include "ucalc/function.hpp"
#include "ucalc/reps.hpp"

namespace ucalc {

/// an ordered tuple of evaluation points; difference quotients require the
/// entries pairwise distinct.
using Tuple = std::vector<RingElem>;

inline bool pairwise_distinct(const Tuple& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (xs[i] == xs[j]) return false;
  return true;
}

namespace detail {

template <class F>
Scalar difference_quotient_impl(const FieldParams& par, F&& value, const Tuple& xs) {
  if (xs.empty()) throw DomainError("difference quotient of an empty tuple");
  if (!pairwise_distinct(xs)) throw DomainError("repeated points in difference-quotient tuple");
  std::vector<Scalar> t;
  t.reserve(xs.size());
  for (const RingElem& x : xs) {
    require_same(par, x.params());
    t.push_back(value(x));
  }
  for (std::size_t width = 1; width < xs.size(); ++width)
    for (std::size_t i = 0; i + width < xs.size(); ++i)
      t[i] = div(sub(t[i], t[i + 1]), ring_sub(xs[i], xs[i + width]));
  return t[0];
}

}  // namespace detail

/// k-th difference quotient on a (k+1)-tuple of pairwise-distinct points.
inline Scalar difference_quotient(const CnCombo& f, const Tuple& xs) {
  return detail::difference_quotient_impl(f.params(),
                                          [&](const RingElem& x) { return eval(f, x); }, xs);
}

inline Scalar difference_quotient(const Evaluator& f, const Tuple& xs) {
  if (xs.empty()) throw DomainError("difference quotient of an empty tuple");
  return detail::difference_quotient_impl(xs.front().params(), f.fn, xs);
}

namespace detail {

inline CnCombo hasse_derivative_unchecked(const CnCombo& f, int j) {
  const FieldParams& par = f.params();
  int level = std::max(f.level() - j, 0);
  CnCombo out(par, level, f.depth());
  if (j > f.level()) return out;
  for (const auto& [key, c] : f.terms()) {
    if (key.j < j) continue;
    out.set_term(key.r, key.j - j, mul(c, binomial_scalar(par, key.j, j)));
  }
  return out;
}

}  // namespace detail

/// D_j f: the j-th Hasse derivative (f^{(j)} / j!), computed term-wise.
inline CnCombo hasse_derivative(const CnCombo& f, int j) {
  if (j < 0 || j > f.level()) throw DomainError("hasse_derivative order outside [0, level]");
  if (f.params().backend == Backend::FpT && j > f.params().p - 1)
    throw CharacteristicViolation("Hasse derivative of order >= p over F_p[[t]]");
  return detail::hasse_derivative_unchecked(f, j);
}

namespace detail {

inline LeafPoly leaf_poly_at(const CnCombo& f, const Rep& leaf) {
  const FieldParams& par = f.params();
  LeafPoly lp;
  lp.leaf = leaf;
  lp.depth = f.depth();
  lp.coeff.assign(static_cast<std::size_t>(f.level()) + 1, Scalar::zero(par));
  RingElem s_pt = to_ring(par, leaf);
  for (const auto& [key, c] : f.terms()) {
    if (!precedes(key.r, leaf)) continue;
    Scalar base = mul(c, pow(gamma(par, key.r), f.level() - key.j));
    Scalar shift = ring_sub(s_pt, to_ring(par, key.r));
    for (int i = 0; i <= key.j; ++i) {
      Scalar contrib = mul(base, binomial_scalar(par, key.j, i));
      contrib = mul(contrib, pow(shift, key.j - i));
      auto& slot = lp.coeff[static_cast<std::size_t>(i)];
      slot = add(slot, contrib);
    }
  }
  return lp;
}

// Taylor coefficients of the leaf polynomial recentered at y.
inline std::vector<Scalar> recentered_coeffs(const FieldParams& par, const LeafPoly& lp,
                                             const RingElem& y) {
  Scalar shift = ring_sub(y, to_ring(par, lp.leaf));
  std::vector<Scalar> b(lp.coeff.size(), Scalar::zero(par));
  for (std::size_t k = 0; k < b.size(); ++k) {
    Scalar acc = Scalar::zero(par);
    for (std::size_t i = k; i < lp.coeff.size(); ++i) {
      const Scalar& a = lp.coeff[i];
      if (a.is_exact_zero()) continue;
      Scalar c = mul(a, binomial_scalar(par, static_cast<int>(i), static_cast<int>(k)));
      acc = add(acc, mul(c, pow(shift, static_cast<int>(i - k))));
    }
    b[k] = acc;
  }
  return b;
}

inline bool same_leaf(const RingElem& x, const RingElem& y, int depth) {
  for (int i = 0; i < depth; ++i)
    if (x.digit(static_cast<std::size_t>(i)) != y.digit(static_cast<std::size_t>(i))) return false;
  return true;
}

}  // namespace detail

/// psi_j f(x,y) = (f(x) - sum_{l<=j} (x-y)^l D_l f(y)) / (x-y)^{j+1}.
/// Inside a common leaf the combo is one polynomial, so the quotient is the
/// literal upper Taylor tail: sum_{k>j} b_k (x-y)^{k-j-1}. That path is exact
/// and makes vanishing coefficients structurally zero; across leaves the
/// recursive form (psi_{j-1} - D_j f(y)) / (x-y) is used on exact evaluations.
inline Scalar remainder_quotient(const CnCombo& f, int j, const RingElem& x, const RingElem& y) {
  require_same(f.params(), x.params());
  require_same(f.params(), y.params());
  if (x == y) throw DomainError("remainder_quotient requires x != y");
  if (j < 0) throw DomainError("negative remainder order");
  const FieldParams& par = f.params();
  if (detail::same_leaf(x, y, f.depth())) {
    LeafPoly lp = detail::leaf_poly_at(f, ring_prefix(x, f.depth()));
    std::vector<Scalar> b = detail::recentered_coeffs(par, lp, y);
    Scalar dx = ring_sub(x, y);
    Scalar acc = Scalar::zero(par);
    for (std::size_t k = static_cast<std::size_t>(j) + 1; k < b.size(); ++k) {
      if (b[k].is_exact_zero()) continue;
      acc = add(acc, mul(b[k], pow(dx, static_cast<int>(k) - j - 1)));
    }
    return acc;
  }
  Scalar dx = ring_sub(x, y);
  Scalar cur = div(sub(eval(f, x), eval(f, y)), dx);
  for (int l = 1; l <= j; ++l)
    cur = div(sub(cur, eval(detail::hasse_derivative_unchecked(f, l), y)), dx);
  return cur;
}

/// The (n+1)-st difference quotient with x repeated j times and y repeated
/// n+2-j times. Repeated nodes are resolved through the Hasse derivatives of
/// the combo (two-point Hermite recursion), so only combos support it. n may
/// differ from the combo level (combos are smooth at every order).
inline Scalar clustered_quotient(const CnCombo& f, int n, int j, const RingElem& x,
                                 const RingElem& y) {
  if (n < 0) throw DomainError("negative clustering order");
  if (j < 1 || j > n + 1) throw DomainError("clustered_quotient index outside [1, n+1]");
  if (x == y) throw DomainError("clustered_quotient requires x != y");
  const FieldParams& par = f.params();
  int rows = j, cols = n + 2 - j;
  std::vector<Scalar> dx_vals, dy_vals;
  for (int i = 0; i < std::max(rows, cols); ++i) {
    CnCombo di = detail::hasse_derivative_unchecked(f, i);
    if (i < rows) dx_vals.push_back(eval(di, x));
    if (i < cols) dy_vals.push_back(eval(di, y));
  }
  Scalar dxy = ring_sub(x, y);
  // T[i][k]: quotient on (x repeated i, y repeated k); T[i][0] = D_{i-1}f(x).
  std::vector<std::vector<Scalar>> T(static_cast<std::size_t>(rows) + 1,
                                     std::vector<Scalar>(static_cast<std::size_t>(cols) + 1,
                                                         Scalar::zero(par)));
  for (int i = 1; i <= rows; ++i) T[static_cast<std::size_t>(i)][0] = dx_vals[static_cast<std::size_t>(i - 1)];
  for (int k = 1; k <= cols; ++k) T[0][static_cast<std::size_t>(k)] = dy_vals[static_cast<std::size_t>(k - 1)];
  for (int i = 1; i <= rows; ++i)
    for (int k = 1; k <= cols; ++k)
      T[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
          div(sub(T[static_cast<std::size_t>(i)][static_cast<std::size_t>(k - 1)],
                  T[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)]),
              dxy);
  return T[static_cast<std::size_t>(rows)][static_cast<std::size_t>(cols)];
}

/// Coefficient table mirroring CnCombo keys; zeros are implicit. Coefficients
/// that cancel below precision are dropped but their bounds are tracked so
/// that sups can refuse to answer when a dropped entry could matter.
class CoeffTable {
public:
  CoeffTable(const FieldParams& par, int level, int depth)
      : par_(par), level_(level), depth_(depth) {
    if (level < 0 || depth < 0) throw DomainError("negative level or depth");
  }

  const FieldParams& params() const { return par_; }
  int level() const { return level_; }
  int depth() const { return depth_; }
  const TermMap& entries() const { return entries_; }

  void set_entry(const Rep& r, int j, const Scalar& b) {
    if (j < 0 || j > level_) throw DomainError("entry degree outside [0, level]");
    if (r.length() > depth_) throw DomainError("entry deeper than the table depth");
    if (b.is_exact_zero()) {
      entries_.erase(TermKey{r, j});
      return;
    }
    if (b.kind() == ScalarKind::BelowPrecision) {
      int floor = std::max(1, par_.precision / 2);
      if (b.cap() < floor)
        throw PrecisionExhausted("coefficient cancelled with only a q^-" +
                                 std::to_string(b.cap()) +
                                 " bound; increase the working precision");
      int weight = r.is_zero() ? 0 : r.length() - 1;
      AbsValue ratio = AbsValue::q_pow(-b.cap() + weight);
      AbsValue raw = AbsValue::q_pow(-b.cap());
      if (dropped_ratio_ < ratio) dropped_ratio_ = ratio;
      if (dropped_value_ < raw) dropped_value_ = raw;
      entries_.erase(TermKey{r, j});
      return;
    }
    entries_[TermKey{r, j}] = b;
  }

  Scalar entry(const Rep& r, int j) const {
    auto it = entries_.find(TermKey{r, j});
    return it == entries_.end() ? Scalar::zero(par_) : it->second;
  }

  /// Largest possible |b_r gamma_r^{-1}| among dropped below-precision entries.
  AbsValue dropped_ratio_bound() const { return dropped_ratio_; }
  AbsValue dropped_value_bound() const { return dropped_value_; }

private:
  FieldParams par_;
  int level_;
  int depth_;
  TermMap entries_;
  AbsValue dropped_ratio_ = AbsValue::zero();
  AbsValue dropped_value_ = AbsValue::zero();
};

/// Level-0 wavelet coefficients over R_m: b_0 = f(0), b_r = f(r) - f(r_-).
inline CoeffTable expand_level0(const Evaluator& f, const FieldParams& par, int m) {
  CoeffTable t(par, 0, m);
  RingElem origin = RingElem::zero_point(par);
  for (const Rep& r : enumerate_reps(par, m)) {
    if (r.is_zero())
      t.set_entry(r, 0, f(origin));
    else
      t.set_entry(r, 0, sub(f(to_ring(par, r)), f(to_ring(par, predecessor(r)))));
  }
  return t;
}

inline CoeffTable expand_level0(const CnCombo& f, int m) {
  return expand_level0(evaluator_of(f), f.params(), m);
}

/// Level-n coefficients b_r^{n,j} = D_j f(0) at r = 0, gamma_r *
/// psi_{n-j} D_j f (r, r_-) otherwise. Exact and finitely supported whenever
/// n >= f.level(); for n < f.level() the table is the depth-d window of an
/// infinite expansion.
inline CoeffTable extract_coeffs(const CnCombo& f, int n, int depth = -1) {
  const FieldParams& par = f.params();
  if (n < 0) throw DomainError("negative target level");
  if (par.backend == Backend::FpT && n > par.p - 1)
    throw CharacteristicViolation("target level n=" + std::to_string(n) +
                                  " needs n <= p-1 over F_p[[t]]");
  if (depth < 0) depth = f.depth();
  if (depth > par.precision) throw DomainError("table depth exceeds working precision");
  std::vector<CnCombo> dj;
  for (int j = 0; j <= n; ++j) dj.push_back(detail::hasse_derivative_unchecked(f, j));
  CoeffTable t(par, n, depth);
  RingElem origin = RingElem::zero_point(par);
  for (const Rep& r : enumerate_reps(par, depth)) {
    if (r.is_zero()) {
      for (int j = 0; j <= n; ++j) t.set_entry(r, j, eval(dj[static_cast<std::size_t>(j)], origin));
      continue;
    }
    RingElem xr = to_ring(par, r);
    RingElem xrm = to_ring(par, predecessor(r));
    Scalar g = gamma(par, r);
    for (int j = 0; j <= n; ++j)
      t.set_entry(r, j, mul(g, remainder_quotient(dj[static_cast<std::size_t>(j)], n - j, xr, xrm)));
  }
  return t;
}

/// The combo whose coefficients are exactly the table entries.
inline CnCombo rebuild(const CoeffTable& t) {
  CnCombo f(t.params(), t.level(), t.depth());
  for (const auto& [key, b] : t.entries()) f.set_term(key.r, key.j, b);
  return f;
}

namespace detail {

// D_n f(r) for every r in R_m, via prefix sums of the top coefficient row.
inline std::map<Rep, Scalar, RepLess> top_row_prefix_sums(const CoeffTable& t, int row) {
  std::map<Rep, Scalar, RepLess> out;
  for (const Rep& r : enumerate_reps(t.params(), t.depth())) {
    Scalar s = t.entry(r, row);
    if (!r.is_zero()) s = add(out.at(predecessor(r)), s);
    out.emplace(r, s);
  }
  return out;
}

}  // namespace detail

/// Change of basis one level down:
/// b_r^{n-1,j} = gamma_r (b_r^{n,j} + C(n,j) sum_{r' <| r_-} b_{r'}^{n,n}),
/// plus b_0^{n-1,j} = b_0^{n,j}.
inline CoeffTable lower_basis(const CoeffTable& t) {
  int n = t.level();
  if (n < 1) throw DomainError("lower_basis needs a level >= 1 table");
  const FieldParams& par = t.params();
  auto dn = detail::top_row_prefix_sums(t, n);
  CoeffTable out(par, n - 1, t.depth());
  for (const Rep& r : enumerate_reps(par, t.depth())) {
    if (r.is_zero()) {
      for (int j = 0; j <= n - 1; ++j) out.set_entry(r, j, t.entry(r, j));
      continue;
    }
    Scalar g = gamma(par, r);
    const Scalar& s = dn.at(predecessor(r));
    for (int j = 0; j <= n - 1; ++j) {
      Scalar v = add(t.entry(r, j), mul(binomial_scalar(par, n, j), s));
      out.set_entry(r, j, mul(g, v));
    }
  }
  return out;
}

/// Inverse of lower_basis given the level-0 expansion of D_n f.
inline CoeffTable raise_basis(const CoeffTable& t, const CoeffTable& dn) {
  require_same(t.params(), dn.params());
  if (dn.level() != 0) throw DomainError("raise_basis needs a level-0 derivative table");
  if (dn.depth() != t.depth()) throw DomainError("inconsistent table depths");
  int n = t.level() + 1;
  const FieldParams& par = t.params();
  auto sums = detail::top_row_prefix_sums(dn, 0);
  CoeffTable out(par, n, t.depth());
  for (const Rep& r : enumerate_reps(par, t.depth())) {
    out.set_entry(r, n, dn.entry(r, 0));
    if (r.is_zero()) {
      for (int j = 0; j <= n - 1; ++j) out.set_entry(r, j, t.entry(r, j));
      continue;
    }
    Scalar ginv = inv(gamma(par, r));
    const Scalar& s = sums.at(predecessor(r));
    for (int j = 0; j <= n - 1; ++j) {
      Scalar v = sub(mul(t.entry(r, j), ginv), mul(binomial_scalar(par, n, j), s));
      out.set_entry(r, j, v);
    }
  }
  return out;
}

/// Antiderivation: maps the level n-1 basis term with degree j onto degree
/// j+1 divided by j+1, which is the closed form of the digit-sum definition.
inline CnCombo antiderive(const CnCombo& f, int n) {
  const FieldParams& par = f.params();
  if (n < 1) throw DomainError("antiderivation order must be >= 1");
  if (f.level() != n - 1) throw DomainError("antiderive expects a combo at level n-1");
  if (par.backend == Backend::FpT && n > par.p - 1)
    throw CharacteristicViolation("antiderivation order n=" + std::to_string(n) +
                                  " needs n <= p-1 over F_p[[t]]");
  CnCombo out(par, n, f.depth());
  for (const auto& [key, c] : f.terms())
    out.set_term(key.r, key.j + 1, div(c, Scalar::from_int(par, key.j + 1)));
  return out;
}

/// The digit-sum route: P_n f(x) as the telescoping sum over the pi-adic
/// truncations x_m of x. Exact for points of the working grid (the sum is
/// finite). Used to cross-check the closed form above.
inline Scalar antiderive_digit_sum(const CnCombo& f, int n, const RingElem& x) {
  const FieldParams& par = f.params();
  if (n < 1) throw DomainError("antiderivation order must be >= 1");
  if (f.level() != n - 1) throw DomainError("antiderive expects a combo at level n-1");
  if (par.backend == Backend::FpT && n > par.p - 1)
    throw CharacteristicViolation("antiderivation order needs n <= p-1 over F_p[[t]]");
  std::vector<CnCombo> dj;
  for (int j = 0; j <= n - 1; ++j) dj.push_back(detail::hasse_derivative_unchecked(f, j));
  Scalar acc = Scalar::zero(par);
  for (int m = 0; m < par.precision; ++m) {
    Digit d = x.digit(static_cast<std::size_t>(m));
    if (d == 0) continue;  // x_{m+1} = x_m
    Digits step_digits(static_cast<std::size_t>(par.precision), 0);
    step_digits[0] = d;
    Scalar step = Scalar::make(par, m, std::move(step_digits));  // x_{m+1} - x_m
    RingElem xm = x.truncated(m);
    for (int j = 0; j <= n - 1; ++j) {
      Scalar term = div(eval(dj[static_cast<std::size_t>(j)], xm), Scalar::from_int(par, j + 1));
      acc = add(acc, mul(term, pow(step, j + 1)));
    }
  }
  return acc;
}

/// n! * P_n ... P_1 applied to a level-0 combo; maps chi_r to (x-r)^n chi_r.
inline CnCombo iterated_antiderive(const CnCombo& f0, int n) {
  if (f0.level() != 0) throw DomainError("iterated_antiderive expects a level-0 combo");
  CnCombo g = f0;
  for (int k = 1; k <= n; ++k) g = antiderive(g, k);
  return combo_scale(factorial_scalar(f0.params(), n), g);
}

/// Worst-case significant-digit loss of a depth-d difference-quotient tower:
/// every division by a gamma-sized difference costs up to d digits, n times,
/// plus the valuation of n! from Hasse normalizations.
inline void ensure_precision(const FieldParams& par, int n, int probe_depth) {
  int vfact = 0;
  if (par.backend == Backend::Zp)
    for (std::int64_t q = par.p; q <= n; q *= par.p) vfact += static_cast<int>(n / q);
  int needed = n * std::max(probe_depth, 1) + n * vfact + 2;
  if (par.precision < needed)
    throw PrecisionExhausted("level " + std::to_string(n) + " at depth " +
                             std::to_string(probe_depth) + " requires precision N >= " +
                             std::to_string(needed) + "; configured N = " +
                             std::to_string(par.precision));
}

namespace detail {

inline AbsValue table_ratio_sup(const CoeffTable& t, bool include_zero_rep) {
  AbsValue best = AbsValue::zero();
  for (const auto& [key, b] : t.entries()) {
    if (key.r.is_zero() && !include_zero_rep) continue;
    int weight = key.r.is_zero() ? 0 : key.r.length() - 1;
    AbsValue v = AbsValue::q_pow(abs_of(b).exp + weight);
    if (best < v) best = v;
  }
  AbsValue dropped = t.dropped_ratio_bound();
  if (!dropped.is_zero && !(dropped < best))
    throw PrecisionExhausted("norm sup undecided: a cancelled coefficient bound q^" +
                             std::to_string(dropped.exp) + " reaches the candidate maximum");
  return best;
}

}  // namespace detail

/// |f|_n: sup over the level n-1 table of |b_r^{n-1,j} gamma_r^{-1}|.
/// Supports combos at level <= n. At level n the table is evaluated one
/// level deeper than the combo: the depth m+1 rows carry the leaf values
/// C(n,j) D_n f(leaf), which complete the sup; deeper rows repeat them.
inline AbsValue cn_norm(const CnCombo& f, int n) {
  const FieldParams& par = f.params();
  if (n < 1) throw DomainError("cn_norm index must be >= 1");
  if (par.backend == Backend::FpT && n > par.p - 1)
    throw CharacteristicViolation("cn_norm index n=" + std::to_string(n) +
                                  " needs n <= p-1 over F_p[[t]]");
  if (f.level() > n)
    throw UnsupportedLevel("cn_norm supports combos at level <= n");
  int depth = f.depth() + (f.level() == n ? 1 : 0);
  ensure_precision(par, n, depth);
  CoeffTable t = extract_coeffs(f, n - 1, depth);
  return detail::table_ratio_sup(t, true);
}

/// A_f: the same sup restricted to r in R_+ (Lipschitz constant of order n).
inline AbsValue lipschitz_constant(const CnCombo& f, int n) {
  const FieldParams& par = f.params();
  if (n < 1) throw DomainError("lipschitz order must be >= 1");
  if (par.backend == Backend::FpT && n > par.p - 1)
    throw CharacteristicViolation("lipschitz order n=" + std::to_string(n) +
                                  " needs n <= p-1 over F_p[[t]]");
  if (f.level() > n)
    throw UnsupportedLevel("lipschitz_constant supports combos at level <= n");
  int depth = f.depth() + (f.level() == n ? 1 : 0);
  ensure_precision(par, n, depth);
  CoeffTable t = extract_coeffs(f, n - 1, depth);
  return detail::table_ratio_sup(t, false);
}

/// Sup norm of a level-0 combo: max |b_r| (the chi basis is orthonormal).
inline AbsValue sup_norm_level0(const CnCombo& f) {
  if (f.level() != 0) throw DomainError("sup_norm_level0 expects a level-0 combo");
  AbsValue best = AbsValue::zero();
  for (const auto& [key, b] : f.terms()) {
    (void)key;
    AbsValue v = abs_of(b);
    if (best < v) best = v;
  }
  return best;
}

struct SupSearchReport {
  AbsValue value = AbsValue::zero();
  std::vector<AbsValue> per_order;  // index j: sup over distinct (j+1)-tuples
  bool exhaustive = true;
  std::uint64_t seed = 0;
  std::uint64_t tuples_evaluated = 0;
  int probe_depth = 0;
};

namespace detail {

struct ChunkMax {
  AbsValue best = AbsValue::zero();
  AbsValue skipped = AbsValue::zero();  // largest bound among vanishing values
  std::uint64_t count = 0;
};

inline void consider(ChunkMax& acc, const Scalar& v, int bp_floor) {
  ++acc.count;
  if (v.is_nonzero()) {
    AbsValue a = abs_of(v);
    if (acc.best < a) acc.best = a;
    return;
  }
  if (v.is_exact_zero()) return;
  if (v.cap() < bp_floor)
    throw PrecisionExhausted("brute-force value cancelled with only a q^-" +
                             std::to_string(v.cap()) + " bound; increase precision");
  AbsValue bound = AbsValue::q_pow(-v.cap());
  if (acc.skipped < bound) acc.skipped = bound;
}

}  // namespace detail

/// max_{0<=j<=n} sup |Phi_j f| over pairwise-distinct tuples drawn from the
/// depth-m' grid. Exhaustive when the ordered-tuple count fits the budget,
/// otherwise seeded uniform sampling (the seed is reported). Monotone
/// nondecreasing in m' and bounded by cn_norm(f, n).
inline SupSearchReport cn_norm_bruteforce(const CnCombo& f, int n, int probe_depth,
                                          std::uint64_t budget = 1000000,
                                          bool allow_sampling = true, std::uint64_t seed = 0,
                                          int threads = 1) {
  const FieldParams& par = f.params();
  if (n < 0) throw DomainError("negative order");
  if (probe_depth < f.depth()) throw DomainError("probe depth below the combo depth");
  ensure_precision(par, n, probe_depth);
  if (threads < 1) threads = 1;
  const int bp_floor = std::max(1, par.precision / 2);

  std::vector<RingElem> grid;
  for (const Rep& r : enumerate_reps(par, probe_depth)) grid.push_back(to_ring(par, r));
  const std::uint64_t P = grid.size();

  // grid values and inverted pairwise differences, computed once
  std::vector<Scalar> fvals;
  fvals.reserve(grid.size());
  for (const RingElem& x : grid) fvals.push_back(eval(f, x));
  std::vector<Scalar> inv_diff(grid.size() * grid.size(), Scalar::zero(par));
  for (std::size_t a = 0; a < grid.size(); ++a)
    for (std::size_t b = 0; b < grid.size(); ++b)
      if (a != b) inv_diff[a * grid.size() + b] = inv(ring_sub(grid[a], grid[b]));

  SupSearchReport rep;
  rep.seed = seed;
  rep.probe_depth = probe_depth;
  rep.per_order.assign(static_cast<std::size_t>(n) + 1, AbsValue::zero());

  for (int j = 0; j <= n; ++j) {
    const int k = j + 1;
    std::uint64_t ordered = 1;
    for (int i = 0; i < k; ++i) ordered *= (P - static_cast<std::uint64_t>(i));
    std::uint64_t power = 1;
    for (int i = 0; i < k; ++i) power *= P;

    auto eval_tuple = [&](const std::vector<std::size_t>& idx, detail::ChunkMax& acc) {
      std::vector<Scalar> t;
      t.reserve(idx.size());
      for (std::size_t id : idx) t.push_back(fvals[id]);
      for (std::size_t width = 1; width < idx.size(); ++width)
        for (std::size_t i = 0; i + width < idx.size(); ++i)
          t[i] = mul(sub(t[i], t[i + 1]), inv_diff[idx[i] * grid.size() + idx[i + width]]);
      detail::consider(acc, t[0], bp_floor);
    };

    std::vector<detail::ChunkMax> results;
    if (ordered <= budget) {
      // enumerate the full power grid and skip tuples with repeats
      std::uint64_t total = power;
      std::uint64_t nthreads = std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), total);
      results.assign(static_cast<std::size_t>(nthreads), {});
      auto work = [&](std::uint64_t lo, std::uint64_t hi, detail::ChunkMax& out) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(k));
        for (std::uint64_t code = lo; code < hi; ++code) {
          std::uint64_t c = code;
          bool distinct = true;
          for (int i = 0; i < k; ++i) {
            idx[static_cast<std::size_t>(i)] = static_cast<std::size_t>(c % P);
            c /= P;
          }
          for (int a = 0; a < k && distinct; ++a)
            for (int b = a + 1; b < k; ++b)
              if (idx[static_cast<std::size_t>(a)] == idx[static_cast<std::size_t>(b)]) {
                distinct = false;
                break;
              }
          if (distinct) eval_tuple(idx, out);
        }
      };
      std::vector<std::thread> pool;
      std::uint64_t chunk = (total + nthreads - 1) / nthreads;
      for (std::uint64_t tix = 0; tix < nthreads; ++tix) {
        std::uint64_t lo = tix * chunk, hi = std::min(total, lo + chunk);
        pool.emplace_back(work, lo, hi, std::ref(results[static_cast<std::size_t>(tix)]));
      }
      for (auto& th : pool) th.join();
    } else {
      if (!allow_sampling)
        throw BudgetExceeded("tuple count " + std::to_string(ordered) + " exceeds budget " +
                             std::to_string(budget) + " and sampling is disabled");
      rep.exhaustive = false;
      // deterministic sample list, generated up front
      std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(j)));
      std::vector<std::size_t> flat;
      flat.reserve(static_cast<std::size_t>(budget) * static_cast<std::size_t>(k));
      std::vector<std::size_t> idx(static_cast<std::size_t>(k));
      for (std::uint64_t s = 0; s < budget; ++s) {
        while (true) {
          for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = static_cast<std::size_t>(rng() % P);
          bool distinct = true;
          for (int a = 0; a < k && distinct; ++a)
            for (int b = a + 1; b < k; ++b)
              if (idx[static_cast<std::size_t>(a)] == idx[static_cast<std::size_t>(b)]) {
                distinct = false;
                break;
              }
          if (distinct) break;
        }
        flat.insert(flat.end(), idx.begin(), idx.end());
      }
      std::uint64_t total = budget;
      std::uint64_t nthreads = std::min<std::uint64_t>(static_cast<std::uint64_t>(threads),
                                                       std::max<std::uint64_t>(total, 1));
      results.assign(static_cast<std::size_t>(nthreads), {});
      auto work = [&](std::uint64_t lo, std::uint64_t hi, detail::ChunkMax& out) {
        std::vector<std::size_t> tup(static_cast<std::size_t>(k));
        for (std::uint64_t s = lo; s < hi; ++s) {
          for (int i = 0; i < k; ++i)
            tup[static_cast<std::size_t>(i)] =
                flat[static_cast<std::size_t>(s) * static_cast<std::size_t>(k) +
                     static_cast<std::size_t>(i)];
          eval_tuple(tup, out);
        }
      };
      std::vector<std::thread> pool;
      std::uint64_t chunk = (total + nthreads - 1) / nthreads;
      for (std::uint64_t tix = 0; tix < nthreads; ++tix) {
        std::uint64_t lo = tix * chunk, hi = std::min(total, lo + chunk);
        pool.emplace_back(work, lo, hi, std::ref(results[static_cast<std::size_t>(tix)]));
      }
      for (auto& th : pool) th.join();
    }

    detail::ChunkMax merged;
    for (const auto& r : results) {
      if (merged.best < r.best) merged.best = r.best;
      if (merged.skipped < r.skipped) merged.skipped = r.skipped;
      merged.count += r.count;
    }
    if (!merged.skipped.is_zero && !(merged.skipped < merged.best) && !merged.best.is_zero)
      throw PrecisionExhausted("brute-force sup undecided by cancelled values");
    rep.per_order[static_cast<std::size_t>(j)] = merged.best;
    rep.tuples_evaluated += merged.count;
    if (rep.value < merged.best) rep.value = merged.best;
  }
  return rep;
}

struct ConvergenceReport {
  Scalar value;
  bool converged = false;
  int stabilized_depth = 0;
  int window_lo = 0;
  int window_hi = 0;
  std::vector<Scalar> trace;
};

/// Finite-depth estimate of D_j f(a) for a black-box evaluator: j-th
/// difference quotients on pairwise-distinct tuples a_d + i*pi^d collapsing
/// onto a, with a Cauchy check at tolerance q^{-tol_k}.
inline ConvergenceReport estimate_derivative(const Evaluator& f, int j, const RingElem& a,
                                             int depth_lo, int depth_hi, int tol_k) {
  if (j < 1) throw DomainError("estimate_derivative needs j >= 1");
  if (depth_lo < 0 || depth_lo > depth_hi) throw DomainError("bad depth window");
  const FieldParams& par = a.params();
  int digit_span = 1;
  {
    std::int64_t cap = par.p;
    while (cap < j + 1) {
      cap *= par.p;
      ++digit_span;
    }
  }
  if (depth_hi + digit_span > par.precision)
    throw PrecisionExhausted("depth window reaches beyond the working precision");

  ConvergenceReport rep;
  rep.window_lo = depth_lo;
  rep.window_hi = depth_hi;
  for (int d = depth_lo; d <= depth_hi; ++d) {
    Tuple xs;
    for (int i = 0; i <= j; ++i) {
      RingElem x = a.truncated(d);
      std::int64_t v = i;
      for (int pos = 0; v > 0; ++pos, v /= par.p)
        x.set_digit(static_cast<std::size_t>(d + pos), static_cast<Digit>(v % par.p));
      xs.push_back(x);
    }
    rep.trace.push_back(difference_quotient(f, xs));
  }
  if (rep.trace.size() < 2)
    throw NoConvergence("depth window too short for a Cauchy check");
  auto within_tol = [&](const Scalar& d) {
    if (d.is_exact_zero()) return true;
    if (d.kind() == ScalarKind::BelowPrecision) return d.cap() >= tol_k;
    return d.valuation_or_throw() >= tol_k;
  };
  int stable_from = -1;
  for (std::size_t i = 0; i + 1 < rep.trace.size(); ++i) {
    if (within_tol(sub(rep.trace[i + 1], rep.trace[i]))) {
      if (stable_from < 0) stable_from = static_cast<int>(i);
    } else {
      stable_from = -1;
    }
  }
  if (stable_from < 0)
    throw NoConvergence("difference-quotient values did not stabilize to q^-" +
                        std::to_string(tol_k) + " within the depth window");
  rep.converged = true;
  rep.stabilized_depth = depth_lo + stable_from;
  // the samples only pin the limit modulo pi^tol; report exactly that much
  rep.value = truncated_at(rep.trace.back(), tol_k);
  return rep;
}

}  // namespace ucalc
