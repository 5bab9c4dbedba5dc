#include <catch2/catch_amalgamated.hpp>

#include "ucalc/calculus.hpp"
#include "ucalc/verify.hpp"

using namespace ucalc;

namespace {

FieldParams zp(std::int64_t p, int prec = 32) { return FieldParams{Backend::Zp, p, prec}; }
FieldParams fpt(std::int64_t p, int prec = 32) { return FieldParams{Backend::FpT, p, prec}; }

// x^2 as a level-2 combo at depth 0.
CnCombo squared(const FieldParams& par) {
  CnCombo f(par, 2, 0);
  f.set_term(Rep(), 2, Scalar::one(par));
  return f;
}

CnCombo identity_fn(const FieldParams& par, int depth = 0) {
  CnCombo f(par, 1, depth);
  f.set_term(Rep(), 1, Scalar::one(par));
  return f;
}

RingElem pt(const FieldParams& par, std::int64_t k) { return RingElem::from_int(par, k); }

}  // namespace

TEST_CASE("difference quotients of x^2") {
  auto par = zp(3);
  CnCombo f = squared(par);
  CHECK(indistinguishable(difference_quotient(f, {pt(par, 1), pt(par, 2)}),
                          Scalar::from_int(par, 3)));
  // order zero is evaluation
  CHECK(difference_quotient(f, {pt(par, 5)}) == eval(f, pt(par, 5)));
  // second quotient of a quadratic is 1, any distinct triple
  verify::RandGen rng(3);
  for (int i = 0; i < 20; ++i) {
    auto xs = verify::distinct_grid_points(par, rng, 3, 5);
    CHECK(indistinguishable(difference_quotient(f, xs), Scalar::one(par)));
  }
  CHECK_THROWS_AS(difference_quotient(f, {pt(par, 1), pt(par, 1)}), DomainError);
}

TEST_CASE("remainder quotients") {
  auto par = zp(3);
  CnCombo f = squared(par);
  verify::RandGen rng(4);
  for (int i = 0; i < 20; ++i) {
    auto xs = verify::distinct_grid_points(par, rng, 2, 5);
    // the order-1 remainder quotient of a quadratic is its top coefficient
    CHECK(indistinguishable(remainder_quotient(f, 1, xs[0], xs[1]), Scalar::one(par)));
    // order 0 is the first difference quotient
    CHECK(indistinguishable(remainder_quotient(f, 0, xs[0], xs[1]),
                            difference_quotient(f, xs)));
  }
  // constants have vanishing remainder quotients of every order
  CnCombo c(par, 1, 0);
  c.set_term(Rep(), 0, Scalar::from_int(par, 7));
  for (int j = 0; j <= 1; ++j)
    CHECK(remainder_quotient(c, j, pt(par, 1), pt(par, 2)).vanishes());
  CHECK_THROWS_AS(remainder_quotient(f, 0, pt(par, 1), pt(par, 1)), DomainError);
}

TEST_CASE("clustered quotients") {
  auto par = zp(3);
  CnCombo f = squared(par);
  verify::RandGen rng(5);
  for (int i = 0; i < 20; ++i) {
    auto xs = verify::distinct_grid_points(par, rng, 2, 5);
    // the j = 1 clustering coincides with the plain remainder quotient
    CHECK(indistinguishable(clustered_quotient(f, 2, 1, xs[0], xs[1]),
                            remainder_quotient(f, 2, xs[0], xs[1])));
  }
  // x^2 at clustering order 1, full split: the second difference quotient, 1
  CHECK(indistinguishable(clustered_quotient(f, 1, 2, pt(par, 1), pt(par, 2)),
                          Scalar::one(par)));
  // n = 0: the only clustering is the first difference quotient
  CnCombo chi0(par, 0, 0);
  chi0.set_term(Rep(), 0, Scalar::one(par));
  CHECK(clustered_quotient(chi0, 0, 1, pt(par, 1), pt(par, 2)).vanishes());
  CHECK_THROWS_AS(clustered_quotient(f, 2, 4, pt(par, 1), pt(par, 2)), DomainError);
}

TEST_CASE("hasse derivatives") {
  auto par = zp(3);
  CnCombo f = identity_fn(par);
  CnCombo d1 = hasse_derivative(f, 1);
  CHECK(d1.level() == 0);
  CHECK(d1.coefficient(Rep(), 0) == Scalar::one(par));

  // chi_r is locally constant: derivatives vanish (level >= 1 representation)
  CnCombo chi1(par, 1, 1);
  chi1.set_term(Rep::from_int(par, 1), 0, Scalar::one(par));  // gamma_1 chi_1, gamma_1 = 1
  CHECK(hasse_derivative(chi1, 1).empty());

  CnCombo sq(par, 2, 1);
  Rep r2 = Rep::from_int(par, 2);
  sq.set_term(r2, 2, Scalar::one(par));  // (x-2)^2 chi_2
  CnCombo d2 = hasse_derivative(sq, 2);
  CHECK(d2.coefficient(r2, 0) == Scalar::one(par));
  CHECK(d2.terms().size() == 1);

  CHECK_THROWS_AS(hasse_derivative(f, 2), DomainError);
  CHECK(combo_equal(hasse_derivative(f, 0), f));
}

TEST_CASE("level-0 expansion") {
  auto par = zp(3);
  // chi_1 at depth 2
  CnCombo chi1(par, 1, 1);
  chi1.set_term(Rep::from_int(par, 1), 0, Scalar::one(par));
  CoeffTable t = expand_level0(chi1, 2);
  CHECK(t.entry(Rep(), 0).is_exact_zero());
  CHECK(t.entry(Rep::from_int(par, 1), 0) == Scalar::one(par));
  CHECK(t.entry(Rep::from_int(par, 2), 0).is_exact_zero());
  for (const Rep& r : enumerate_reps(par, 2))
    if (r.length() == 2) CHECK(t.entry(r, 0).vanishes());

  // constants: only the r = 0 coefficient
  CnCombo c(par, 0, 0);
  c.set_term(Rep(), 0, Scalar::from_int(par, 5));
  CoeffTable tc = expand_level0(c, 2);
  CHECK(tc.entries().size() == 1);
  CHECK(tc.entry(Rep(), 0) == Scalar::from_int(par, 5));

  // f = x: b_r = gamma_r
  CoeffTable tx = expand_level0(identity_fn(par), 1);
  CHECK(tx.entry(Rep(), 0).is_exact_zero());
  CHECK(indistinguishable(tx.entry(Rep::from_int(par, 1), 0), Scalar::one(par)));
  CHECK(indistinguishable(tx.entry(Rep::from_int(par, 2), 0), Scalar::from_int(par, 2)));
}

TEST_CASE("coefficient extraction") {
  auto par = zp(3);
  // f = x at level 1: only b_0^{1,1} = 1
  CoeffTable t = extract_coeffs(identity_fn(par, 1), 1);
  CHECK(t.entries().size() == 1);
  CHECK(t.entry(Rep(), 1) == Scalar::one(par));

  // constants at any level: only b_0^{n,0}
  for (int n = 1; n <= 3; ++n) {
    CnCombo c(par, 0, 1);
    c.set_term(Rep(), 0, Scalar::one(par));
    CoeffTable tc = extract_coeffs(c, n);
    CHECK(tc.entries().size() == 1);
    CHECK(tc.entry(Rep(), 0) == Scalar::one(par));
  }

  CHECK_THROWS_AS(extract_coeffs(CnCombo(fpt(5, 32), 1, 0), 5), CharacteristicViolation);
}

TEST_CASE("monomial lift coefficient pattern") {
  // the level n-1 coefficients of T_n chi_{r0} are C(n,j) gamma_r exactly
  // when r0 <| r_-, vanish otherwise and at r = 0.
  for (std::int64_t p : {2, 3}) {
    auto par = zp(p);
    for (int n = 1; n <= 3; ++n) {
      for (std::int64_t r0i : {0, 1}) {
        Rep r0 = Rep::from_int(par, r0i);
        CnCombo chi(par, 0, std::max(1, r0.length()));
        chi.set_term(r0, 0, Scalar::one(par));
        CnCombo lift = iterated_antiderive(chi, n);

        // the lift is (x - r0)^n chi_{r0}
        CHECK(lift.terms().size() == 1);
        CHECK(indistinguishable(lift.coefficient(r0, n), Scalar::one(par)));

        CoeffTable low = extract_coeffs(lift, n - 1, 3);
        for (const Rep& r : enumerate_reps(par, 3)) {
          for (int j = 0; j <= n - 1; ++j) {
            Scalar got = low.entry(r, j);
            if (!r.is_zero() && precedes(r0, predecessor(r))) {
              Scalar want = mul(binomial_scalar(par, n, j), gamma(par, r));
              CHECK(indistinguishable(got, want));
            } else {
              CHECK(got.vanishes());
            }
          }
        }

        // and b^{n,n}_{r0} = 1 at its own level
        CoeffTable own = extract_coeffs(lift, n);
        CHECK(indistinguishable(own.entry(r0, n), Scalar::one(par)));
      }
    }
  }
}

TEST_CASE("basis lowering and raising, worked example") {
  auto par = zp(3);
  CnCombo f = identity_fn(par, 1);
  CoeffTable level1 = extract_coeffs(f, 1);
  CoeffTable level0 = lower_basis(level1);
  // b_r = gamma_r over R_+, 0 at the root
  for (const Rep& r : enumerate_reps(par, 1)) {
    if (r.is_zero())
      CHECK(level0.entry(r, 0).vanishes());
    else
      CHECK(indistinguishable(level0.entry(r, 0), gamma(par, r)));
  }
  // cross-check against the direct level-0 expansion
  CoeffTable direct = expand_level0(f, 1);
  for (const Rep& r : enumerate_reps(par, 1))
    CHECK(indistinguishable(level0.entry(r, 0), direct.entry(r, 0)));

  CoeffTable dn = expand_level0(hasse_derivative(f, 1), 1);
  CHECK(dn.entry(Rep(), 0) == Scalar::one(par));
  CoeffTable raised = raise_basis(level0, dn);
  CHECK(raised.entries().size() == 1);
  CHECK(indistinguishable(raised.entry(Rep(), 1), Scalar::one(par)));

  // all-zero tables map to all-zero tables
  CoeffTable z(par, 2, 1);
  CHECK(lower_basis(z).entries().empty());

  CHECK_THROWS_AS(raise_basis(level0, CoeffTable(par, 0, 2)), DomainError);
}

TEST_CASE("antiderivation closed form") {
  auto par = zp(3);
  // the order-1 antiderivative of chi_0 is x chi_0
  CnCombo chi0(par, 0, 0);
  chi0.set_term(Rep(), 0, Scalar::one(par));
  CnCombo p1 = antiderive(chi0, 1);
  CHECK(p1.terms().size() == 1);
  CHECK(p1.coefficient(Rep(), 1) == Scalar::one(par));

  // order 2 on (x-r) chi_r gives (x-r)^2 chi_r / 2
  Rep r1 = Rep::from_int(par, 1);
  CnCombo lin(par, 1, 1);
  lin.set_term(r1, 1, Scalar::one(par));
  CnCombo p2 = antiderive(lin, 2);
  CHECK(p2.terms().size() == 1);
  CHECK(p2.coefficient(r1, 2) == div(Scalar::one(par), Scalar::from_int(par, 2)));

  // linearity: the zero combo maps to the zero combo
  CHECK(antiderive(CnCombo(par, 1, 0), 2).empty());

  CHECK_THROWS_AS(antiderive(chi0, 2), DomainError);  // level must be n-1
  CHECK_THROWS_AS(antiderive(CnCombo(fpt(3, 32), 2, 0), 3), CharacteristicViolation);
}

TEST_CASE("monomial lift basics") {
  auto par = zp(5);
  CnCombo f0(par, 0, 1);
  Rep r = Rep::from_int(par, 3);
  f0.set_term(r, 0, Scalar::one(par));
  for (int n = 0; n <= 3; ++n) {
    CnCombo lift = iterated_antiderive(f0, n);
    CHECK(lift.terms().size() == 1);
    CHECK(indistinguishable(lift.coefficient(r, n), Scalar::one(par)));
  }
}

TEST_CASE("norms") {
  auto par = zp(3);
  CHECK(cn_norm(identity_fn(par), 1) == AbsValue::q_pow(0));
  CHECK(cn_norm(CnCombo(par, 1, 0), 1) == AbsValue::zero());
  // f = pi x
  CnCombo pix(par, 1, 0);
  pix.set_term(Rep(), 1, Scalar::uniformizer(par));
  CHECK(cn_norm(pix, 1) == AbsValue::q_pow(-1));
  // norm index above the combo level
  CHECK(cn_norm(identity_fn(par), 3) == AbsValue::q_pow(0));
  CHECK_THROWS_AS(cn_norm(squared(par), 1), UnsupportedLevel);
  CHECK_THROWS_AS(cn_norm(identity_fn(par), 0), DomainError);
  CHECK_THROWS_AS(cn_norm(CnCombo(fpt(3, 32), 2, 0), 3), CharacteristicViolation);
}

TEST_CASE("brute-force norm") {
  auto par = zp(3);
  CnCombo f = identity_fn(par);
  for (int probe = 1; probe <= 4; ++probe) {
    auto rep = cn_norm_bruteforce(f, 1, probe);
    CHECK(rep.value == AbsValue::q_pow(0));
    CHECK(rep.exhaustive);
  }
  CHECK(cn_norm_bruteforce(CnCombo(par, 1, 0), 1, 2).value == AbsValue::zero());

  // random level-1 combos at depth 2, probe depth 4: equality with cn_norm
  verify::RandGen rng(99);
  for (int i = 0; i < 6; ++i) {
    CnCombo g = verify::random_combo(par, rng, 1, 2, 4);
    auto rep = cn_norm_bruteforce(g, 1, 4);
    REQUIRE(rep.exhaustive);
    CHECK(rep.value == cn_norm(g, 1));
  }

  CHECK_THROWS_AS(cn_norm_bruteforce(f, 1, 4, 10, false), BudgetExceeded);
}

TEST_CASE("sampled brute force is a deterministic lower bound") {
  auto par = zp(3);
  verify::RandGen rng(123);
  CnCombo f = verify::random_combo(par, rng, 2, 1, 3);
  auto a = cn_norm_bruteforce(f, 2, 3, 2000, true, 77, 1);
  auto b = cn_norm_bruteforce(f, 2, 3, 2000, true, 77, 4);
  CHECK_FALSE(a.exhaustive);
  CHECK(a.value == b.value);  // same seed, any thread count
  CHECK(a.seed == 77);
  CHECK(a.value <= cn_norm(f, 2));
}

TEST_CASE("lipschitz constants") {
  auto par = zp(3);
  CHECK(lipschitz_constant(identity_fn(par), 1) == AbsValue::q_pow(0));
  CnCombo chi1(par, 1, 1);
  chi1.set_term(Rep::from_int(par, 1), 0, Scalar::one(par));
  CHECK(lipschitz_constant(chi1, 1) == AbsValue::q_pow(0));
  CHECK(lipschitz_constant(CnCombo(par, 1, 0), 1) == AbsValue::zero());
  // constants: A_f = 0 although |f|_1 = |c| > 0
  CnCombo c(par, 1, 0);
  c.set_term(Rep(), 0, Scalar::from_int(par, 7));
  CHECK(lipschitz_constant(c, 1) == AbsValue::zero());
  CHECK(cn_norm(c, 1) == AbsValue::q_pow(0));
}

TEST_CASE("lipschitz equals the exhaustive quotient sup") {
  for (std::int64_t p : {2, 3}) {
    auto par = zp(p);
    verify::RandGen rng(17);
    for (int n = 1; n <= 2; ++n) {
      for (int i = 0; i < 4; ++i) {
        CnCombo f = verify::random_combo(par, rng, n, 1, 3);
        auto rep = cn_norm_bruteforce(f, n, 3);
        REQUIRE(rep.exhaustive);
        CHECK(rep.per_order[static_cast<std::size_t>(n)] == lipschitz_constant(f, n));
      }
    }
  }
}

TEST_CASE("derivative estimation") {
  auto par = zp(3);
  Evaluator sq{2, [par](const RingElem& x) {
                 Scalar v = ring_to_scalar(x);
                 return mul(v, v);
               }};
  auto rep = estimate_derivative(sq, 1, RingElem::zero_point(par), 2, 8, 4);
  CHECK(rep.converged);
  CHECK(rep.value.vanishes());  // f'(0) = 0 modulo the requested tolerance

  Evaluator c{1, [par](const RingElem&) { return Scalar::from_int(par, 9); }};
  auto repc = estimate_derivative(c, 1, pt(par, 4), 2, 6, 6);
  CHECK(repc.converged);
  CHECK(repc.value.vanishes());
  CHECK(repc.stabilized_depth == 2);  // constants stabilize immediately

  Evaluator cube{3, [par](const RingElem& x) {
                   Scalar v = ring_to_scalar(x);
                   return mul(v, mul(v, v));
                 }};
  auto rep3 = estimate_derivative(cube, 2, pt(par, 1), 2, 9, 4);
  CHECK(rep3.converged);
  // symbolic cross-check: the order-2 Hasse derivative of x^3 at 1 is 3
  CHECK(indistinguishable(rep3.value, Scalar::from_int(par, 3)));

  // digit-parity dither never stabilizes
  Evaluator rough{0, [par](const RingElem& x) {
                    int s = 0;
                    for (int i = 0; i < par.precision; ++i)
                      s += x.digit(static_cast<std::size_t>(i));
                    return s % 2 ? Scalar::one(par) : Scalar::zero(par);
                  }};
  CHECK_THROWS_AS(estimate_derivative(rough, 1, RingElem::zero_point(par), 1, 6, 3),
                  NoConvergence);
}

TEST_CASE("precision guard names the required precision") {
  auto par = zp(3, 6);
  CnCombo f = identity_fn(par, 1);
  try {
    cn_norm_bruteforce(f, 3, 4);
    FAIL("expected PrecisionExhausted");
  } catch (const PrecisionExhausted& e) {
    std::string msg = e.what();
    CHECK(msg.find("requires precision N >=") != std::string::npos);
    CHECK(e.exit_code() == 4);
  }
}

TEST_CASE("deep coefficients of a level-n combo vanish structurally") {
  auto par = zp(3);
  verify::RandGen rng(23);
  for (int n = 1; n <= 2; ++n) {
    CnCombo f = verify::random_combo(par, rng, n, 1, 3);
    CoeffTable t = extract_coeffs(f, n, 3);
    for (const auto& [key, b] : t.entries()) {
      (void)b;
      CHECK(key.r.length() <= f.depth());
    }
    // structural zero, not a cancellation artifact
    Rep deep = Rep::from_digits(par, {0, 0, 1});
    for (int j = 0; j <= n; ++j) {
      CnCombo dj = hasse_derivative(f, std::min(j, f.level()));
      Scalar b = remainder_quotient(dj, n - j, to_ring(par, deep),
                                    to_ring(par, predecessor(deep)));
      CHECK(b.is_exact_zero());
    }
  }
}
