#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ucalc/calculus.hpp"
#include "ucalc/classify.hpp"
#include "ucalc/field.hpp"
#include "ucalc/function.hpp"
#include "ucalc/io.hpp"
#include "ucalc/reps.hpp"

namespace ucalc::verify {

/// Deterministic generator: fixed engine semantics, modulo draws. The slight
/// modulo bias is irrelevant for test-instance generation and keeps output
/// byte-identical across platforms, unlike std::uniform_int_distribution.
class RandGen {
public:
  explicit RandGen(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t u64() { return eng_(); }
  std::uint64_t below(std::uint64_t n) { return n ? eng_() % n : 0; }
  int range(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

private:
  std::mt19937_64 eng_;
};

inline Scalar random_unit(const FieldParams& par, RandGen& rng, int vmin = 0, int vmax = 2) {
  Digits ds(static_cast<std::size_t>(par.precision));
  ds[0] = static_cast<Digit>(1 + rng.below(static_cast<std::uint64_t>(par.p - 1)));
  for (std::size_t i = 1; i < ds.size(); ++i)
    ds[i] = static_cast<Digit>(rng.below(static_cast<std::uint64_t>(par.p)));
  return Scalar::from_digits(par, rng.range(vmin, vmax), std::move(ds));
}

inline CnCombo random_combo(const FieldParams& par, RandGen& rng, int level, int depth,
                            int terms, int max_j = -1) {
  CnCombo f(par, level, depth);
  auto reps = enumerate_reps(par, depth);
  if (max_j < 0) max_j = level;
  for (int t = 0; t < terms; ++t) {
    const Rep& r = reps[static_cast<std::size_t>(rng.below(reps.size()))];
    int j = rng.range(0, max_j);
    f.set_term(r, j, random_unit(par, rng));
  }
  return f;
}

inline std::vector<RingElem> distinct_grid_points(const FieldParams& par, RandGen& rng,
                                                  std::size_t count, int depth) {
  std::vector<RingElem> out;
  while (out.size() < count) {
    Digits ds;
    for (int i = 0; i < depth; ++i)
      ds.push_back(static_cast<Digit>(rng.below(static_cast<std::uint64_t>(par.p))));
    RingElem x = RingElem::from_digits(par, ds);
    bool dup = false;
    for (const auto& y : out) dup = dup || y == x;
    if (!dup) out.push_back(x);
  }
  return out;
}

struct SuiteResult {
  std::string name;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  std::string first_failure;
};

struct VerifyConfig {
  FieldParams par{Backend::Zp, 3, 48};
  std::uint64_t seed = 1;
  std::uint64_t trials = 32;  // instances per suite and level
  int probe = 4;
  std::uint64_t budget = 1000000;
  int threads = 1;
};

namespace detail {

class Suite {
public:
  explicit Suite(std::string name) { result_.name = std::move(name); }

  void record(bool ok, const std::function<std::string()>& note) {
    ++result_.trials;
    if (!ok) {
      if (result_.failures == 0) result_.first_failure = note();
      ++result_.failures;
    }
  }
  void record(bool ok) {
    record(ok, [] { return std::string("assertion"); });
  }

  SuiteResult take() { return std::move(result_); }

private:
  SuiteResult result_;
};

inline std::vector<int> allowed_levels(const FieldParams& par, int cap = 3) {
  std::vector<int> out;
  for (int n = 1; n <= cap; ++n) {
    if (par.backend == Backend::FpT && n > par.p - 1) break;
    out.push_back(n);
  }
  return out;
}

}  // namespace detail

/// Runs every invariant suite with seeded random instances. Deterministic per
/// (params, seed, trials, probe, budget); independent of the thread count.
inline std::vector<SuiteResult> run_suites(const VerifyConfig& cfg) {
  const FieldParams& par = cfg.par;
  validate(par);
  std::vector<SuiteResult> out;
  const std::uint64_t T = cfg.trials;
  const auto levels = detail::allowed_levels(par);

  auto grid_pts = [&](RandGen& rng, std::size_t k, int depth) {
    return distinct_grid_points(par, rng, k, depth);
  };

  {  // scalar arithmetic: ultrametric, multiplicativity, div/mul round trip
    detail::Suite s("scalar-ultrametric");
    RandGen rng(cfg.seed ^ 0x01);
    for (std::uint64_t t = 0; t < T; ++t) {
      Scalar a = random_unit(par, rng), b = random_unit(par, rng);
      AbsValue ma = abs_of(a), mb = abs_of(b);
      AbsValue mx = ma < mb ? mb : ma;
      bool ok = abs_bound(add(a, b)) <= mx;
      if (!(ma == mb)) ok = ok && abs_bound(add(a, b)) == mx;
      ok = ok && abs_of(mul(a, b)) == AbsValue::q_pow(ma.exp + mb.exp);
      ok = ok && indistinguishable(div(mul(a, b), b), a);
      s.record(ok, [&] { return io::serialize_scalar(a) + " ; " + io::serialize_scalar(b); });
    }
    out.push_back(s.take());
  }

  {  // serialize . parse = identity on canonical scalar forms
    detail::Suite s("scalar-roundtrip");
    RandGen rng(cfg.seed ^ 0x02);
    for (std::uint64_t t = 0; t < T; ++t) {
      Scalar a = random_unit(par, rng, -3, 3);
      bool ok = io::parse_scalar(par, io::serialize_scalar(a)) == a;
      s.record(ok, [&] { return io::serialize_scalar(a); });
    }
    out.push_back(s.take());
  }

  {  // representative lattice invariants
    detail::Suite s("rep-lattice");
    RandGen rng(cfg.seed ^ 0x03);
    auto all = enumerate_reps(par, 3);
    for (std::uint64_t t = 0; t < T; ++t) {
      const Rep& r = all[static_cast<std::size_t>(rng.below(all.size()))];
      bool ok = true;
      if (!r.is_zero()) {
        ok = ok && precedes(predecessor(r), to_ring(par, r));
        ok = ok && gamma(par, r).valuation_or_throw() == r.length() - 1;
        auto ch = chain(Rep(), r);
        for (std::size_t i = 1; i < ch.size(); ++i) {
          ok = ok && predecessor(ch[i]) == ch[i - 1];
          ok = ok && ch[i].length() > ch[i - 1].length();
        }
      }
      const Rep& y = all[static_cast<std::size_t>(rng.below(all.size()))];
      if (!(y == r)) {
        Rep z = common_prefix(r, y);
        AbsValue d = abs_of(ring_sub(to_ring(par, r), to_ring(par, y)));
        AbsValue zx = abs_bound(ring_sub(to_ring(par, z), to_ring(par, r)));
        AbsValue zy = abs_bound(ring_sub(to_ring(par, z), to_ring(par, y)));
        ok = ok && d == (zx < zy ? zy : zx);
      }
      s.record(ok, [&] { return "r=" + rep_to_string(r); });
    }
    out.push_back(s.take());
  }

  {  // eval is linear
    detail::Suite s("combo-linearity");
    RandGen rng(cfg.seed ^ 0x04);
    for (std::uint64_t t = 0; t < T; ++t) {
      int n = levels.empty() ? 1 : levels[static_cast<std::size_t>(rng.below(levels.size()))];
      CnCombo f = random_combo(par, rng, n, 2, 4);
      CnCombo g = random_combo(par, rng, n, 2, 4);
      CnCombo fg = combo_add(f, g);
      RingElem x = grid_pts(rng, 1, cfg.probe)[0];
      bool ok = indistinguishable(eval(fg, x), add(eval(f, x), eval(g, x)));
      s.record(ok, [&] { return "x in grid depth " + std::to_string(cfg.probe); });
    }
    out.push_back(s.take());
  }

  {  // leaf normal form evaluates like the combo
    detail::Suite s("leaf-normal-form");
    RandGen rng(cfg.seed ^ 0x05);
    for (std::uint64_t t = 0; t < T; ++t) {
      int n = levels.empty() ? 1 : levels[static_cast<std::size_t>(rng.below(levels.size()))];
      CnCombo f = random_combo(par, rng, n, 2, 5);
      auto leaves = leaf_normal_form(f);
      RingElem x = grid_pts(rng, 1, cfg.probe)[0];
      Rep home = ring_prefix(x, f.depth());
      bool ok = true;
      for (const auto& lp : leaves) {
        if (!(lp.leaf == home)) continue;
        ok = ok && indistinguishable(leaf_eval(par, lp, x), eval(f, x));
      }
      s.record(ok);
    }
    out.push_back(s.take());
  }

  {  // difference quotients are symmetric in their arguments
    detail::Suite s("quotient-symmetry");
    RandGen rng(cfg.seed ^ 0x06);
    for (std::uint64_t t = 0; t < T; ++t) {
      int n = levels.empty() ? 1 : levels[static_cast<std::size_t>(rng.below(levels.size()))];
      int k = rng.range(1, 3);
      CnCombo f = random_combo(par, rng, n, 2, 4);
      Tuple xs = grid_pts(rng, static_cast<std::size_t>(k) + 1, cfg.probe);
      Scalar base = difference_quotient(f, xs);
      Tuple perm = xs;
      bool ok = true;
      std::sort(perm.begin(), perm.end(), [](const RingElem& a, const RingElem& b) {
        return a.digits() < b.digits();
      });
      do {
        ok = ok && indistinguishable(difference_quotient(f, perm), base);
      } while (std::next_permutation(perm.begin(), perm.end(),
                                     [](const RingElem& a, const RingElem& b) {
                                       return a.digits() < b.digits();
                                     }));
      s.record(ok);
    }
    out.push_back(s.take());
  }

  {  // coefficient extraction reconstructs the function
    detail::Suite s("reconstruction");
    RandGen rng(cfg.seed ^ 0x07);
    for (std::uint64_t t = 0; t < T; ++t) {
      int n = levels.empty() ? 1 : levels[static_cast<std::size_t>(rng.below(levels.size()))];
      CnCombo f = random_combo(par, rng, n, 2, 5);
      CnCombo g = rebuild(extract_coeffs(f, n));
      bool ok = true;
      for (int i = 0; i < 24; ++i) {
        RingElem x = grid_pts(rng, 1, cfg.probe)[0];
        ok = ok && indistinguishable(eval(g, x), eval(f, x));
      }
      s.record(ok);
    }
    out.push_back(s.take());
  }

  {  // the basis is orthonormal: |sum c e|_n = max |c|
    detail::Suite s("orthonormality");
    RandGen rng(cfg.seed ^ 0x08);
    for (std::uint64_t t = 0; t < T; ++t) {
      for (int n : levels) {
        CnCombo f = random_combo(par, rng, n, 2, 5);
        if (f.empty()) continue;
        AbsValue want = AbsValue::zero();
        for (const auto& [key, c] : f.terms()) {
          (void)key;
          if (want < abs_of(c)) want = abs_of(c);
        }
        AbsValue got = cn_norm(f, n);
        s.record(got == want, [&] {
          return "n=" + std::to_string(n) + " got " + got.to_string(par.p) + " want " +
                 want.to_string(par.p);
        });
      }
    }
    out.push_back(s.take());
  }

  {  // Hasse derivatives compose with binomial factors
    detail::Suite s("hasse-composition");
    RandGen rng(cfg.seed ^ 0x09);
    for (std::uint64_t t = 0; t < T; ++t) {
      for (int n : levels) {
        CnCombo f = random_combo(par, rng, n, 2, 5);
        for (int j = 0; j <= n; ++j) {
          CnCombo lhs = hasse_derivative(hasse_derivative(f, n - j), j);
          CnCombo rhs = combo_scale(binomial_scalar(par, n, j), hasse_derivative(f, n));
          s.record(combo_agrees(lhs, rhs),
                   [&] { return "n=" + std::to_string(n) + " j=" + std::to_string(j); });
        }
      }
    }
    out.push_back(s.take());
  }

  {  // three-point remainder decomposition
    detail::Suite s("remainder-three-point");
    RandGen rng(cfg.seed ^ 0x0a);
    for (std::uint64_t t = 0; t < T; ++t) {
      for (int n : levels) {
        CnCombo f = random_combo(par, rng, n, 2, 4);
        auto pts = grid_pts(rng, 3, cfg.probe);
        const RingElem &x = pts[0], &y = pts[1], &z = pts[2];
        Scalar xy = ring_sub(x, y), xz = ring_sub(x, z), yz = ring_sub(y, z);
        Scalar lhs = remainder_quotient(f, n, x, y);
        Scalar rhs = mul(pow(div(xz, xy), n + 1), remainder_quotient(f, n, x, z));
        for (int l = 0; l <= n; ++l) {
          Scalar w = pow(div(yz, xy), n + 1 - l);
          rhs = sub(rhs, mul(w, remainder_quotient(ucalc::detail::hasse_derivative_unchecked(f, l),
                                                    n - l, y, z)));
        }
        s.record(indistinguishable(lhs, rhs), [&] { return "n=" + std::to_string(n); });
      }
    }
    out.push_back(s.take());
  }

  {  // chain decomposition of the remainder quotient + partition of unity
    detail::Suite schain("remainder-chain");
    detail::Suite spart("chain-partition");
    RandGen rng(cfg.seed ^ 0x0b);
    auto deep = enumerate_reps(par, std::min(4, par.precision - 1));
    for (std::uint64_t t = 0; t < T; ++t) {
      for (int n : levels) {
        CnCombo f = random_combo(par, rng, n, 2, 4);
        // random chain t_1 <| ... <| t_m with m >= 3
        Rep x;
        do {
          x = deep[static_cast<std::size_t>(rng.below(deep.size()))];
        } while (x.length() < 2);
        auto ch = chain(Rep(), x);
        std::vector<RingElem> ts;
        for (const Rep& r : ch) ts.push_back(to_ring(par, r));
        std::size_t m = ts.size();
        Scalar span = ring_sub(ts[m - 1], ts[0]);
        Scalar lhs = remainder_quotient(f, n, ts[m - 1], ts[0]);
        Scalar rhs = Scalar::zero(par);
        Scalar weight_sum = Scalar::zero(par);
        for (std::size_t jj = 1; jj < m; ++jj) {
          Scalar lam = pow(div(ring_sub(ts[jj], ts[jj - 1]), span), n + 1);
          rhs = add(rhs, mul(lam, remainder_quotient(f, n, ts[jj], ts[jj - 1])));
          weight_sum = add(weight_sum, lam);
        }
        for (int l = 1; l <= n; ++l) {
          for (std::size_t jj = 2; jj < m; ++jj) {
            Scalar mu = div(mul(pow(ring_sub(ts[jj], ts[jj - 1]), l),
                                pow(ring_sub(ts[jj - 1], ts[0]), n + 1 - l)),
                            pow(span, n + 1));
            rhs = add(rhs, mul(mu, remainder_quotient(
                                       ucalc::detail::hasse_derivative_unchecked(f, l), n - l,
                                       ts[jj - 1], ts[0])));
            weight_sum = add(weight_sum, mul(binomial_scalar(par, n + 1, l), mu));
          }
        }
        schain.record(indistinguishable(lhs, rhs),
                      [&] { return "n=" + std::to_string(n) + " m=" + std::to_string(m); });
        spart.record(indistinguishable(weight_sum, Scalar::one(par)),
                     [&] { return "n=" + std::to_string(n) + " m=" + std::to_string(m); });
      }
    }
    out.push_back(schain.take());
    out.push_back(spart.take());
  }

  {  // clustered-quotient expansion of psi_{n-j} D_j
    detail::Suite s("clustered-expansion");
    RandGen rng(cfg.seed ^ 0x0c);
    for (std::uint64_t t = 0; t < T; ++t) {
      for (int n : levels) {
        CnCombo f = random_combo(par, rng, n, 2, 4);
        auto pts = grid_pts(rng, 2, cfg.probe);
        for (int j = 1; j <= n; ++j) {
          Scalar lhs = remainder_quotient(ucalc::detail::hasse_derivative_unchecked(f, j), n - j,
                                          pts[0], pts[1]);
          Scalar rhs = Scalar::zero(par);
          for (int i = 1; i <= j + 1; ++i)
            rhs = add(rhs, mul(binomial_scalar(par, n + 1 - i, n - j),
                               clustered_quotient(f, n, i, pts[0], pts[1])));
          s.record(indistinguishable(lhs, rhs),
                   [&] { return "n=" + std::to_string(n) + " j=" + std::to_string(j); });
        }
      }
    }
    out.push_back(s.take());
  }

  {  // antiderivation: telescope, digit-sum agreement, inverse, norm bound
    detail::Suite stel("antiderive-telescope");
    detail::Suite sdig("antiderive-digit-sum");
    detail::Suite sinv("antiderive-inverse");
    detail::Suite snorm("antiderive-norm");
    RandGen rng(cfg.seed ^ 0x0d);
    for (std::uint64_t t = 0; t < T; ++t) {
      for (int n : levels) {
        CnCombo f = random_combo(par, rng, n - 1, 2, 4);
        CnCombo pf = antiderive(f, n);
        // telescope over R_3
        bool tok = true;
        for (const Rep& r : enumerate_reps(par, 3)) {
          if (r.is_zero()) continue;
          RingElem xr = to_ring(par, r), xm = to_ring(par, predecessor(r));
          Scalar lhs = sub(eval(pf, xr), eval(pf, xm));
          Scalar rhs = Scalar::zero(par);
          Scalar g = gamma(par, r);
          for (int j = 1; j <= n; ++j) {
            Scalar term = div(pow(g, j), Scalar::from_int(par, j));
            rhs = add(rhs, mul(term, eval(ucalc::detail::hasse_derivative_unchecked(f, j - 1), xm)));
          }
          tok = tok && indistinguishable(lhs, rhs);
        }
        stel.record(tok, [&] { return "n=" + std::to_string(n); });

        bool dok = true;
        for (int i = 0; i < 8; ++i) {
          RingElem x = grid_pts(rng, 1, cfg.probe)[0];
          dok = dok && indistinguishable(eval(pf, x), antiderive_digit_sum(f, n, x));
        }
        sdig.record(dok, [&] { return "n=" + std::to_string(n); });

        sinv.record(combo_agrees(hasse_derivative(pf, 1), f),
                    [&] { return "n=" + std::to_string(n); });

        AbsValue lhsn = cn_norm(pf, n);
        AbsValue rhsn = f.empty() ? AbsValue::zero()
                                  : [&] {
                                      AbsValue base = n - 1 == 0
                                                          ? sup_norm_level0(f)
                                                          : cn_norm(f, n - 1);
                                      return base.scaled(abs_of(inv(factorial_scalar(par, n))));
                                    }();
        snorm.record(lhsn <= rhsn || (lhsn.is_zero && rhsn.is_zero),
                     [&] { return "n=" + std::to_string(n); });
      }
    }
    out.push_back(stel.take());
    out.push_back(sdig.take());
    out.push_back(sinv.take());
    out.push_back(snorm.take());
  }

  {  // |T_n f|_n = |f|_sup
    detail::Suite s("lift-norm");
    RandGen rng(cfg.seed ^ 0x0e);
    for (std::uint64_t t = 0; t < T; ++t) {
      for (int n : levels) {
        CnCombo f0 = random_combo(par, rng, 0, 2, 4);
        CnCombo lift = iterated_antiderive(f0, n);
        s.record(cn_norm(lift, n) == sup_norm_level0(f0),
                 [&] { return "n=" + std::to_string(n); });
      }
    }
    out.push_back(s.take());
  }

  {  // |D_k f|_sup <= sup_r |psi_{k-1} f(r, r_-)| <= |f|_k at probe depth
    detail::Suite s("derivative-sup");
    RandGen rng(cfg.seed ^ 0x0f);
    int mid_depth = std::min(cfg.probe + 2, par.precision - 1);
    for (std::uint64_t t = 0; t < T; ++t) {
      for (int k : levels) {
        CnCombo f = random_combo(par, rng, k, 2, 4);
        CnCombo dk = hasse_derivative(f, k);
        AbsValue lhs = AbsValue::zero();
        for (const Rep& r : enumerate_reps(par, cfg.probe)) {
          AbsValue v = abs_bound(eval(dk, to_ring(par, r)));
          if (lhs < v) lhs = v;
        }
        AbsValue mid = AbsValue::zero();
        for (const Rep& r : enumerate_reps(par, mid_depth)) {
          if (r.is_zero()) continue;
          AbsValue v = abs_bound(
              remainder_quotient(f, k - 1, to_ring(par, r), to_ring(par, predecessor(r))));
          if (mid < v) mid = v;
        }
        AbsValue rhs = cn_norm(f, k);
        s.record(lhs <= mid && mid <= rhs, [&] {
          return "k=" + std::to_string(k) + " " + lhs.to_string(par.p) + " / " +
                 mid.to_string(par.p) + " / " + rhs.to_string(par.p);
        });
      }
    }
    out.push_back(s.take());
  }

  {  // brute-force C^n norm: monotone in depth, bounded by, then equal to |f|_n
    detail::Suite s("norm-brute");
    RandGen rng(cfg.seed ^ 0x10);
    std::uint64_t reps = std::max<std::uint64_t>(1, T / 8);
    int brute_depth = par.p >= 5 ? 0 : 1;  // keeps the tuple grids exhaustive
    for (std::uint64_t t = 0; t < reps; ++t) {
      for (int n : levels) {
        CnCombo f = random_combo(par, rng, n, brute_depth, 3);
        AbsValue want = cn_norm(f, n);
        auto r1 = cn_norm_bruteforce(f, n, f.depth() + 1, cfg.budget, true, cfg.seed,
                                     cfg.threads);
        auto r2 = cn_norm_bruteforce(f, n, f.depth() + 2, cfg.budget, true, cfg.seed,
                                     cfg.threads);
        bool ok = r1.value <= r2.value && r2.value <= want;
        if (r2.exhaustive) ok = ok && r2.value == want;  // sampling only lower-bounds
        s.record(ok, [&] {
          return "n=" + std::to_string(n) + " brute " + r2.value.to_string(par.p) + " norm " +
                 want.to_string(par.p);
        });
      }
    }
    out.push_back(s.take());
  }

  {  // coefficients of a level-n combo vanish exactly below its depth
    detail::Suite s("deep-vanishing");
    RandGen rng(cfg.seed ^ 0x11);
    for (std::uint64_t t = 0; t < T; ++t) {
      for (int n : levels) {
        CnCombo f = random_combo(par, rng, n, 1, 3);
        CoeffTable tb = extract_coeffs(f, n, std::min(f.depth() + 2, par.precision - 1));
        bool ok = true;
        for (const auto& [key, b] : tb.entries()) {
          (void)b;
          ok = ok && key.r.length() <= f.depth();
        }
        // and the vanishing is structural, not a cancellation artifact
        Digits ds(static_cast<std::size_t>(f.depth() + 1), 0);
        ds.back() = 1;
        Rep deep = Rep::from_canonical(std::move(ds));
        for (int j = 0; j <= n; ++j) {
          Scalar b = remainder_quotient(ucalc::detail::hasse_derivative_unchecked(f, j), n - j,
                                        to_ring(par, deep), to_ring(par, predecessor(deep)));
          ok = ok && b.is_exact_zero();
        }
        s.record(ok, [&] { return "n=" + std::to_string(n); });
      }
    }
    out.push_back(s.take());
  }

  {  // raise_basis inverts lower_basis; lower_basis matches direct extraction
    detail::Suite s("basis-roundtrip");
    RandGen rng(cfg.seed ^ 0x12);
    for (std::uint64_t t = 0; t < T; ++t) {
      for (int n : levels) {
        CnCombo f = random_combo(par, rng, n, 2, 4);
        CoeffTable tab = extract_coeffs(f, n);
        CoeffTable low = lower_basis(tab);
        CoeffTable direct = extract_coeffs(f, n - 1);
        bool ok = true;
        for (const auto& [key, b] : low.entries())
          ok = ok && indistinguishable(b, direct.entry(key.r, key.j));
        for (const auto& [key, b] : direct.entries())
          ok = ok && indistinguishable(b, low.entry(key.r, key.j));
        CoeffTable dn = expand_level0(hasse_derivative(f, n), f.depth());
        CoeffTable back = raise_basis(low, dn);
        for (const auto& [key, b] : tab.entries())
          ok = ok && indistinguishable(b, back.entry(key.r, key.j));
        for (const auto& [key, b] : back.entries())
          ok = ok && indistinguishable(b, tab.entry(key.r, key.j));
        s.record(ok, [&] { return "n=" + std::to_string(n); });
      }
    }
    out.push_back(s.take());
  }

  {  // classifiers agree with exhaustive pairwise checks
    detail::Suite s("classifier-sound");
    RandGen rng(cfg.seed ^ 0x13);
    int pair_depth = par.p <= 3 ? 4 : 3;
    auto pair_reps = enumerate_reps(par, std::min(pair_depth, par.precision - 1));
    for (std::uint64_t t = 0; t < T; ++t) {
      // mix of near-identity perturbations and free level-1 combos
      CnCombo f(par, 1, 1);
      f.set_term(Rep(), 1, Scalar::one(par));
      int extras = rng.range(0, 2);
      for (int e = 0; e < extras; ++e) {
        auto reps = enumerate_reps(par, 1);
        f.set_term(reps[static_cast<std::size_t>(rng.below(reps.size()))], 0,
                   random_unit(par, rng, 0, 1));
      }
      if (rng.below(2) == 0) f = random_combo(par, rng, 1, 1, 3);
      if (f.empty()) f.set_term(Rep(), 1, Scalar::one(par));

      Verdict inc = is_increasing(f);
      bool brute_inc = true;
      for (std::size_t i = 0; i < pair_reps.size() && brute_inc; ++i)
        for (std::size_t k2 = i + 1; k2 < pair_reps.size(); ++k2) {
          Tuple xs{to_ring(par, pair_reps[i]), to_ring(par, pair_reps[k2])};
          Scalar q = difference_quotient(f, xs);
          Scalar d = sub(q, Scalar::one(par));
          bool below = d.vanishes() || (d.is_nonzero() && d.valuation_or_throw() >= 1);
          if (!below) {
            brute_inc = false;
            break;
          }
        }
      s.record((inc.answer == Answer::Yes) == brute_inc,
               [&] { return "increasing mismatch: " + inc.to_string(); });

      Verdict iso = is_isometry(f);
      if (iso.answer == Answer::Yes) {
        bool ok = true;
        for (std::size_t i = 0; i < pair_reps.size() && ok; ++i)
          for (std::size_t k2 = i + 1; k2 < pair_reps.size(); ++k2) {
            RingElem a = to_ring(par, pair_reps[i]), b = to_ring(par, pair_reps[k2]);
            AbsValue lhs = abs_bound(sub(eval(f, a), eval(f, b)));
            AbsValue rhs = abs_of(ring_sub(a, b));
            if (!(lhs == rhs)) {
              ok = false;
              break;
            }
          }
        s.record(ok, [&] { return "isometry verdict unsound"; });
      } else if (iso.answer == Answer::No && iso.witness_pair) {
        RingElem a = to_ring(par, iso.witness_pair->first);
        RingElem b = to_ring(par, iso.witness_pair->second);
        AbsValue lhs = abs_bound(sub(eval(f, a), eval(f, b)));
        AbsValue rhs = abs_of(ring_sub(a, b));
        s.record(!(lhs == rhs), [&] { return "isometry witness does not violate"; });
      } else if (iso.answer == Answer::No && iso.witness_rep) {
        const Rep& w = *iso.witness_rep;
        RingElem a = to_ring(par, w), b = to_ring(par, predecessor(w));
        AbsValue lhs = abs_bound(sub(eval(f, a), eval(f, b)));
        AbsValue rhs = abs_of(ring_sub(a, b));
        s.record(!(lhs == rhs), [&] { return "isometry witness does not violate"; });
      }

      if (inc.answer == Answer::Yes)
        s.record(is_isometry(f).answer == Answer::Yes,
                 [&] { return "increasing but not isometry"; });

      Verdict pc = is_pseudocontraction(f);
      if (pc.answer == Answer::Yes)
        s.record(lipschitz_constant(f, 1) < AbsValue::q_pow(0),
                 [&] { return "pseudocontraction with A_f >= 1"; });
      if (inc.answer == Answer::No && inc.witness_rep) {
        const Rep& w = *inc.witness_rep;
        Tuple xs{to_ring(par, w), to_ring(par, predecessor(w))};
        Scalar d = sub(difference_quotient(f, xs), Scalar::one(par));
        bool below = d.vanishes() || (d.is_nonzero() && d.valuation_or_throw() >= 1);
        s.record(!below, [&] { return "increasing witness does not violate"; });
      }
    }
    out.push_back(s.take());
  }

  {  // finite-depth degree-raising criterion on coefficient streams
    detail::Suite s("limit-criterion");
    RandGen rng(cfg.seed ^ 0x14);
    int m1 = std::min(cfg.probe + 2, par.precision - 2);
    for (std::uint64_t t = 0; t < T; ++t) {
      // stream of f(x) = x at level 0: ratios are constantly 1
      CoeffStream ident{0, [&](const Rep& r, int) -> Scalar {
                          return r.is_zero() ? Scalar::zero(par) : gamma(par, r);
                        }};
      Rep a = enumerate_reps(par, 2)[static_cast<std::size_t>(
          rng.below(enumerate_reps(par, 2).size()))];
      Verdict v = cnplus1_limit_test(par, ident, a, 1, m1, 3);
      s.record(v.answer == Answer::Yes, [&] { return "identity stream: " + v.to_string(); });

      // alternating-by-parity stream is not Cauchy
      CoeffStream alt{0, [&](const Rep& r, int) -> Scalar {
                        if (r.is_zero()) return Scalar::zero(par);
                        int c = (r.length() % 2 == 0) ? 2 % static_cast<int>(par.p) : 1;
                        if (c == 0) c = 1;
                        return mul(Scalar::from_int(par, c), gamma(par, r));
                      }};
      Verdict va = cnplus1_limit_test(par, alt, a, 1, m1, 3);
      s.record(va.answer == Answer::No && va.witness_pair.has_value(),
               [&] { return "alternating stream: " + va.to_string(); });

      // zero stream converges to 0
      CoeffStream zero{0, [&](const Rep&, int) { return Scalar::zero(par); }};
      Verdict vz = cnplus1_limit_test(par, zero, a, 1, m1, 3);
      s.record(vz.answer == Answer::Yes, [&] { return "zero stream: " + vz.to_string(); });

      // stream of a genuine level-n combo satisfies the binomial relation
      if (!levels.empty()) {
        int n = levels[static_cast<std::size_t>(rng.below(levels.size()))];
        CnCombo f = random_combo(par, rng, n, 1, 3);
        std::vector<CnCombo> dj;
        for (int j = 0; j <= n; ++j) dj.push_back(ucalc::detail::hasse_derivative_unchecked(f, j));
        CoeffStream st{n, [&, dj](const Rep& r, int j) -> Scalar {
                         if (r.is_zero()) return eval(dj[static_cast<std::size_t>(j)],
                                                      RingElem::zero_point(par));
                         return mul(gamma(par, r),
                                    remainder_quotient(dj[static_cast<std::size_t>(j)], n - j,
                                                       to_ring(par, r),
                                                       to_ring(par, predecessor(r))));
                       }};
        Verdict vc = cnplus1_limit_test(par, st, a, 1, m1, 3);
        s.record(vc.answer == Answer::Yes, [&] { return "combo stream: " + vc.to_string(); });
      }
    }
    out.push_back(s.take());
  }

  return out;
}

inline std::string format_suite_line(const SuiteResult& r) {
  std::string line = "suite " + r.name + " trials=" + std::to_string(r.trials) +
                     " failures=" + std::to_string(r.failures);
  if (r.failures > 0) line += " first=" + r.first_failure;
  return line;
}

}  // namespace ucalc::verify
