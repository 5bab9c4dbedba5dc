#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ucalc/calculus.hpp"
#include "ucalc/function.hpp"

using namespace ucalc;

namespace {

FieldParams zp(std::int64_t p, int prec = 24) { return FieldParams{Backend::Zp, p, prec}; }

// f(x) = x as a level-1 combo: (x - 0) chi_0.
CnCombo identity_fn(const FieldParams& par, int depth = 0) {
  CnCombo f(par, 1, depth);
  f.set_term(Rep(), 1, Scalar::one(par));
  return f;
}

RingElem random_point(const FieldParams& par, std::mt19937_64& rng, int depth) {
  Digits ds;
  for (int i = 0; i < depth; ++i)
    ds.push_back(static_cast<Digit>(rng() % static_cast<std::uint64_t>(par.p)));
  return RingElem::from_digits(par, ds);
}

}  // namespace

TEST_CASE("chi evaluation") {
  auto par = zp(3);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 30; ++i)
    CHECK(chi_eval(par, Rep(), random_point(par, rng, 6)) == Scalar::one(par));
  CHECK(chi_eval(par, Rep::from_int(par, 1), RingElem::from_int(par, 4)) == Scalar::one(par));
  CHECK(chi_eval(par, Rep::from_int(par, 1), RingElem::from_int(par, 2)) == Scalar::zero(par));
}

TEST_CASE("chi is constant on deeper disks") {
  for (std::int64_t p : {2, 3}) {
    auto par = zp(p);
    auto all = enumerate_reps(par, 3);
    for (const Rep& r : all) {
      for (const Rep& s : all) {
        if (s.length() < r.length()) continue;
        // all points of the depth-3 grid inside D_s give the same chi_r value
        Scalar first = Scalar::zero(par);
        bool seen = false;
        for (const Rep& x : all) {
          if (!precedes(s, to_ring(par, x))) continue;
          Scalar v = chi_eval(par, r, to_ring(par, x));
          if (!seen) {
            first = v;
            seen = true;
          } else {
            CHECK(v == first);
          }
        }
      }
    }
  }
}

TEST_CASE("eval") {
  auto par = zp(3);
  CnCombo chi0(par, 0, 0);
  chi0.set_term(Rep(), 0, Scalar::one(par));
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i)
    CHECK(eval(chi0, random_point(par, rng, 8)) == Scalar::one(par));

  CnCombo f = identity_fn(par);
  CHECK(eval(f, RingElem::from_int(par, 5)) == Scalar::from_int(par, 5));

  // gamma_1 chi_1 vanishes off D_1
  CnCombo g(par, 1, 1);
  g.set_term(Rep::from_int(par, 1), 0, Scalar::one(par));
  CHECK(eval(g, RingElem::from_int(par, 2)).is_exact_zero());
  CHECK(eval(g, RingElem::from_int(par, 4)) == Scalar::one(par));
}

TEST_CASE("constructor guards") {
  auto par = zp(3);
  CHECK_THROWS_AS(CnCombo(FieldParams{Backend::FpT, 3, 16}, 3, 0), CharacteristicViolation);
  CHECK_NOTHROW(CnCombo(FieldParams{Backend::FpT, 3, 16}, 2, 0));
  CnCombo f(par, 1, 1);
  CHECK_THROWS_AS(f.set_term(Rep(), 2, Scalar::one(par)), DomainError);
  CHECK_THROWS_AS(f.set_term(Rep::from_int(par, 4), 0, Scalar::one(par)), DomainError);
  f.set_term(Rep(), 0, Scalar::one(par));
  f.set_term(Rep(), 0, Scalar::zero(par));  // erases
  CHECK(f.empty());
}

TEST_CASE("combos form a vector space under eval") {
  auto par = zp(3, 20);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    CnCombo f(par, 2, 2), g(par, 2, 2);
    auto reps = enumerate_reps(par, 2);
    for (int t = 0; t < 5; ++t) {
      const Rep& r = reps[rng() % reps.size()];
      int j = static_cast<int>(rng() % 3);
      auto mk = [&] {
        Digits ds(static_cast<std::size_t>(par.precision));
        ds[0] = static_cast<Digit>(1 + rng() % 2);
        for (std::size_t i = 1; i < ds.size(); ++i)
          ds[i] = static_cast<Digit>(rng() % 3);
        return Scalar::from_digits(par, static_cast<int>(rng() % 3), std::move(ds));
      };
      f.set_term(r, j, mk());
      g.set_term(r, j, mk());
    }
    CnCombo s = combo_add(f, g);
    for (int i = 0; i < 20; ++i) {
      RingElem x = random_point(par, rng, 6);
      CHECK(indistinguishable(eval(s, x), add(eval(f, x), eval(g, x))));
    }
  }
}

TEST_CASE("leaf normal form: constants") {
  auto par = zp(2);
  CnCombo chi0(par, 0, 1);
  chi0.set_term(Rep(), 0, Scalar::one(par));
  auto leaves = leaf_normal_form(chi0);
  REQUIRE(leaves.size() == 2);
  for (const auto& lp : leaves) {
    REQUIRE(lp.coeff.size() == 1);
    CHECK(lp.coeff[0] == Scalar::one(par));
  }
}

TEST_CASE("leaf normal form: recentering x") {
  auto par = zp(3);
  CnCombo f = identity_fn(par).padded_to(1);
  auto leaves = leaf_normal_form(f);
  REQUIRE(leaves.size() == 3);
  for (const auto& lp : leaves) {
    CHECK(indistinguishable(lp.coeff[0], ring_to_scalar(to_ring(par, lp.leaf))));
    CHECK(lp.coeff[1] == Scalar::one(par));
  }
}

TEST_CASE("leaf normal form: sum of contributions") {
  auto par = zp(3);
  CnCombo f(par, 1, 1);
  f.set_term(Rep::from_int(par, 1), 0, Scalar::one(par));  // chi_1 (gamma_1 = 1)
  f.set_term(Rep(), 1, Scalar::one(par));                  // (x-0) chi_0
  for (const auto& lp : leaf_normal_form(f)) {
    if (lp.leaf == Rep::from_int(par, 1)) {
      CHECK(indistinguishable(lp.coeff[0], Scalar::from_int(par, 2)));
      CHECK(lp.coeff[1] == Scalar::one(par));
    }
  }
}

TEST_CASE("leaf normal form evaluates like the combo") {
  auto par = zp(3, 24);
  std::mt19937_64 rng(5);
  CnCombo f(par, 2, 2);
  auto reps = enumerate_reps(par, 2);
  for (int t = 0; t < 6; ++t) {
    Digits ds(static_cast<std::size_t>(par.precision));
    ds[0] = static_cast<Digit>(1 + rng() % 2);
    for (std::size_t i = 1; i < ds.size(); ++i) ds[i] = static_cast<Digit>(rng() % 3);
    f.set_term(reps[rng() % reps.size()], static_cast<int>(rng() % 3),
               Scalar::from_digits(par, 0, std::move(ds)));
  }
  auto leaves = leaf_normal_form(f);
  for (const auto& lp : leaves) {
    for (int i = 0; i < 25; ++i) {
      RingElem x = random_point(par, rng, 8);
      if (!precedes(lp.leaf, x)) continue;
      // force x into the leaf by overwriting the first depth digits
      for (int d = 0; d < f.depth(); ++d)
        x.set_digit(static_cast<std::size_t>(d), lp.leaf.digit(static_cast<std::size_t>(d)));
      CHECK(indistinguishable(leaf_eval(par, lp, x), eval(f, x)));
    }
  }
}

TEST_CASE("evaluator wraps combos") {
  auto par = zp(3);
  CnCombo f = identity_fn(par);
  Evaluator e = evaluator_of(f);
  CHECK(e.smoothness == 1);
  CHECK(e(RingElem::from_int(par, 7)) == Scalar::from_int(par, 7));
}
