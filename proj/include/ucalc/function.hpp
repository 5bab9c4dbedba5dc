#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "ucalc/field.hpp"
#include "ucalc/reps.hpp"

namespace ucalc {

struct TermKey {
  Rep r;
  int j = 0;
};

struct TermKeyLess {
  bool operator()(const TermKey& a, const TermKey& b) const {
    RepLess less;
    if (less(a.r, b.r)) return true;
    if (less(b.r, a.r)) return false;
    return a.j < b.j;
  }
};

using TermMap = std::map<TermKey, Scalar, TermKeyLess>;

/// f(x) = sum c_{r,j} gamma_r^{n-j} (x-r)^j chi_r(x), finitely supported over
/// r in R_m, 0 <= j <= n. Stored coefficients are always nonzero.
class CnCombo {
public:
  CnCombo(const FieldParams& par, int level, int depth) : par_(par), level_(level), depth_(depth) {
    validate(par);
    if (level < 0) throw DomainError("negative level");
    if (depth < 0) throw DomainError("negative depth");
    if (depth > par.precision)
      throw DomainError("depth exceeds the working precision");
    if (par.backend == Backend::FpT && level > par.p - 1)
      throw CharacteristicViolation("level n=" + std::to_string(level) +
                                    " needs n <= p-1 over F_p[[t]]");
  }

  const FieldParams& params() const { return par_; }
  int level() const { return level_; }
  int depth() const { return depth_; }
  const TermMap& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void set_term(const Rep& r, int j, const Scalar& c) {
    require_same(par_, c.params());
    if (j < 0 || j > level_) throw DomainError("term degree outside [0, level]");
    if (r.length() > depth_) throw DomainError("term deeper than the declared depth");
    if (c.is_exact_zero()) {
      terms_.erase(TermKey{r, j});
      return;
    }
    if (c.kind() == ScalarKind::BelowPrecision)
      throw PrecisionExhausted("coefficient known only below precision");
    terms_[TermKey{r, j}] = c;
  }

  Scalar coefficient(const Rep& r, int j) const {
    auto it = terms_.find(TermKey{r, j});
    return it == terms_.end() ? Scalar::zero(par_) : it->second;
  }

  /// Same function, deeper declared depth (terms unchanged).
  CnCombo padded_to(int depth) const {
    if (depth < depth_) throw DomainError("cannot shrink depth");
    CnCombo out(par_, level_, depth);
    out.terms_ = terms_;
    return out;
  }

private:
  FieldParams par_;
  int level_;
  int depth_;
  TermMap terms_;
};

/// chi_r(x): 1 on the disk D_r, else 0.
inline Scalar chi_eval(const FieldParams& par, const Rep& r, const RingElem& x) {
  return precedes(r, x) ? Scalar::one(par) : Scalar::zero(par);
}

inline Scalar eval(const CnCombo& f, const RingElem& x) {
  require_same(f.params(), x.params());
  const FieldParams& par = f.params();
  Scalar acc = Scalar::zero(par);
  for (const auto& [key, c] : f.terms()) {
    if (!precedes(key.r, x)) continue;
    Scalar g = gamma(par, key.r);
    Scalar term = mul(c, pow(g, f.level() - key.j));
    if (key.j > 0) term = mul(term, pow(ring_sub(x, to_ring(par, key.r)), key.j));
    acc = add(acc, term);
  }
  return acc;
}

inline CnCombo combo_add(const CnCombo& f, const CnCombo& g) {
  require_same(f.params(), g.params());
  if (f.level() != g.level()) throw DomainError("combo_add requires equal levels");
  int depth = std::max(f.depth(), g.depth());
  CnCombo out(f.params(), f.level(), depth);
  for (const auto& [key, c] : f.terms()) out.set_term(key.r, key.j, c);
  for (const auto& [key, c] : g.terms()) {
    Scalar s = add(out.coefficient(key.r, key.j), c);
    if (s.kind() == ScalarKind::BelowPrecision)
      out.set_term(key.r, key.j, Scalar::zero(f.params()));  // cancelled at precision
    else
      out.set_term(key.r, key.j, s);
  }
  return out;
}

inline CnCombo combo_scale(const Scalar& c, const CnCombo& f) {
  require_same(f.params(), c.params());
  CnCombo out(f.params(), f.level(), f.depth());
  if (c.is_exact_zero()) return out;
  for (const auto& [key, v] : f.terms()) out.set_term(key.r, key.j, mul(c, v));
  return out;
}

inline bool combo_equal(const CnCombo& f, const CnCombo& g) {
  if (!(f.params() == g.params()) || f.level() != g.level()) return false;
  if (f.terms().size() != g.terms().size()) return false;
  TermKeyLess less;
  auto it = g.terms().begin();
  for (auto fit = f.terms().begin(); fit != f.terms().end(); ++fit, ++it) {
    if (less(fit->first, it->first) || less(it->first, fit->first)) return false;
    if (!(fit->second == it->second)) return false;
  }
  return true;
}

/// Coefficient-wise agreement at tracked precision (used where computed
/// combos are compared against exactly-constructed ones).
inline bool combo_agrees(const CnCombo& f, const CnCombo& g) {
  if (!(f.params() == g.params()) || f.level() != g.level()) return false;
  auto check = [](const CnCombo& a, const CnCombo& b) {
    for (const auto& [key, c] : a.terms())
      if (!indistinguishable(c, b.coefficient(key.r, key.j))) return false;
    return true;
  };
  return check(f, g) && check(g, f);
}

/// The polynomial sum a_i (x - leaf)^i representing f on one depth-m disk.
struct LeafPoly {
  Rep leaf;
  int depth = 0;
  std::vector<Scalar> coeff;  // indices 0..level; entries may be exact zero

  int degree() const {
    for (int i = static_cast<int>(coeff.size()) - 1; i >= 0; --i)
      if (coeff[static_cast<std::size_t>(i)].is_nonzero()) return i;
    return -1;  // zero polynomial
  }
};

inline Scalar leaf_eval(const FieldParams& par, const LeafPoly& lp, const RingElem& x) {
  Scalar acc = Scalar::zero(par);
  Scalar dx = ring_sub(x, to_ring(par, lp.leaf));
  for (std::size_t i = 0; i < lp.coeff.size(); ++i) {
    const Scalar& a = lp.coeff[i];
    if (a.is_exact_zero()) continue;
    acc = add(acc, mul(a, pow(dx, static_cast<int>(i))));
  }
  return acc;
}

/// Taylor recentering of every term onto each depth-m disk:
/// (x-r)^j = sum_i C(j,i) (s-r)^{j-i} (x-s)^i on D_s.
inline std::vector<LeafPoly> leaf_normal_form(const CnCombo& f) {
  const FieldParams& par = f.params();
  std::vector<LeafPoly> out;
  std::vector<Rep> leaves = enumerate_reps(par, f.depth());
  out.reserve(leaves.size());
  for (const Rep& s : leaves) {
    LeafPoly lp;
    lp.leaf = s;
    lp.depth = f.depth();
    lp.coeff.assign(static_cast<std::size_t>(f.level()) + 1, Scalar::zero(par));
    RingElem s_pt = to_ring(par, s);
    for (const auto& [key, c] : f.terms()) {
      if (!precedes(key.r, s)) continue;
      Scalar base = mul(c, pow(gamma(par, key.r), f.level() - key.j));
      Scalar shift = ring_sub(s_pt, to_ring(par, key.r));  // s - r, exact
      for (int i = 0; i <= key.j; ++i) {
        Scalar contrib = mul(base, binomial_scalar(par, key.j, i));
        contrib = mul(contrib, pow(shift, key.j - i));
        auto& slot = lp.coeff[static_cast<std::size_t>(i)];
        slot = add(slot, contrib);
      }
    }
    out.push_back(std::move(lp));
  }
  return out;
}

/// Black-box input path: a pure evaluation capability plus the smoothness
/// level the caller asserts about it.
struct Evaluator {
  int smoothness = 0;
  std::function<Scalar(const RingElem&)> fn;

  Scalar operator()(const RingElem& x) const { return fn(x); }
};

inline Evaluator evaluator_of(const CnCombo& f) {
  return Evaluator{f.level(), [f](const RingElem& x) { return eval(f, x); }};
}

/// A total rule (r, j) -> b-coefficient, for limit-criterion experiments at
/// arbitrary depth.
struct CoeffStream {
  int level = 0;
  std::function<Scalar(const Rep&, int)> rule;
};

}  // namespace ucalc
