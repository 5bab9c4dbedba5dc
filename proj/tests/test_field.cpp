#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ucalc/field.hpp"

using namespace ucalc;

namespace {

FieldParams zp(std::int64_t p, int prec = 16) { return FieldParams{Backend::Zp, p, prec}; }
FieldParams fpt(std::int64_t p, int prec = 16) { return FieldParams{Backend::FpT, p, prec}; }

Scalar random_unit(const FieldParams& par, std::mt19937_64& rng, int vmin = 0, int vmax = 3) {
  Digits ds(static_cast<std::size_t>(par.precision));
  ds[0] = static_cast<Digit>(1 + rng() % static_cast<std::uint64_t>(par.p - 1));
  for (std::size_t i = 1; i < ds.size(); ++i)
    ds[i] = static_cast<Digit>(rng() % static_cast<std::uint64_t>(par.p));
  int v = vmin + static_cast<int>(rng() % static_cast<std::uint64_t>(vmax - vmin + 1));
  return Scalar::from_digits(par, v, std::move(ds));
}

}  // namespace

TEST_CASE("integer embedding and addition") {
  auto par = zp(3);
  Scalar five = Scalar::from_int(par, 5);
  Scalar four = Scalar::from_int(par, 4);
  Scalar nine = add(five, four);
  REQUIRE(nine.is_nonzero());
  CHECK(nine.valuation_or_throw() == 2);  // 9 = pi^2 in Z_3
  CHECK(nine.unit()[0] == 1);
  CHECK(indistinguishable(nine, Scalar::from_int(par, 9)));
  CHECK(nine.precision() == par.precision - 2);  // the carry ate two known positions

  CHECK(add(five, Scalar::zero(par)) == five);
  CHECK(add(Scalar::zero(par), five) == five);
}

TEST_CASE("carry-free addition over F_p[[t]]") {
  auto par = fpt(3, 8);
  Scalar a = Scalar::from_digits(par, 0, {1, 2});
  Scalar b = Scalar::from_digits(par, 0, {2, 2});
  Scalar s = add(a, b);
  REQUIRE(s.is_nonzero());
  CHECK(s.valuation_or_throw() == 1);  // (1+2t) + (2+2t) = t
  CHECK(s.unit()[0] == 1);
}

TEST_CASE("division by modular inversion") {
  auto par = zp(3, 4);
  Scalar half = div(Scalar::one(par), Scalar::from_int(par, 2));
  REQUIRE(half.is_nonzero());
  CHECK(half.valuation_or_throw() == 0);
  CHECK(half.unit() == Digits{2, 1, 1, 1});  // 2 * 41 = 82 = 1 mod 81

  auto parN = zp(5, 20);
  std::mt19937_64 rng(42);
  for (int i = 0; i < 50; ++i) {
    Scalar a = random_unit(parN, rng);
    CHECK(div(a, a) == Scalar::one(parN));
  }
}

TEST_CASE("valuation bookkeeping through division") {
  auto par = zp(3);
  Scalar nine = Scalar::from_int(par, 9);
  CHECK(nine.valuation_or_throw() == 2);
  CHECK(nine.unit()[0] == 1);
  Scalar third = div(nine, Scalar::from_int(par, 3));
  CHECK(third.valuation_or_throw() == 1);
  CHECK(third.unit()[0] == 1);
}

TEST_CASE("valuation and absolute value") {
  auto par = zp(3);
  CHECK(*Scalar::from_int(par, 9).valuation() == 2);
  CHECK(abs_of(Scalar::from_int(par, 9)) == AbsValue::q_pow(-2));
  CHECK(*Scalar::one(par).valuation() == 0);
  CHECK(abs_of(Scalar::one(par)) == AbsValue::q_pow(0));
  CHECK_FALSE(Scalar::zero(par).valuation().has_value());  // +infinity
  CHECK(abs_of(Scalar::zero(par)).is_zero);
  CHECK(abs_of(Scalar::uniformizer(par)) == AbsValue::q_pow(-1));
}

TEST_CASE("absolute value rendering") {
  CHECK(AbsValue::zero().to_string(3) == "0");
  CHECK(AbsValue::q_pow(0).to_string(3) == "1");
  CHECK(AbsValue::q_pow(2).to_string(3) == "9");
  CHECK(AbsValue::q_pow(-1).to_string(3) == "1/3");
  CHECK(AbsValue::q_pow(-2).to_string(5) == "1/25");
}

TEST_CASE("factorial scalar") {
  auto par = zp(3);
  CHECK(factorial_scalar(par, 0) == Scalar::one(par));
  Scalar six = factorial_scalar(par, 3);
  CHECK(six == Scalar::from_int(par, 6));
  CHECK(six.valuation_or_throw() == 1);
  CHECK_THROWS_AS(factorial_scalar(fpt(3), 3), CharacteristicViolation);
  CHECK(factorial_scalar(fpt(3), 2) == Scalar::from_int(fpt(3), 2));
}

TEST_CASE("factorial valuation matches the digit-sum formula") {
  // independent oracle: v_p(j!) = sum_i floor(j / p^i)
  for (std::int64_t p : {2, 3, 5}) {
    auto par = zp(p, 40);
    for (int j = 1; j <= 12; ++j) {
      int expect = 0;
      for (std::int64_t q = p; q <= j; q *= p) expect += static_cast<int>(j / q);
      CHECK(factorial_scalar(par, j).valuation_or_throw() == expect);
    }
  }
}

TEST_CASE("ultrametric inequality and multiplicativity") {
  std::mt19937_64 rng(7);
  for (const auto& par : {zp(2, 12), zp(3, 12), fpt(3, 12), fpt(5, 12)}) {
    for (int i = 0; i < 200; ++i) {
      Scalar a = random_unit(par, rng);
      Scalar b = random_unit(par, rng);
      AbsValue sum = abs_bound(add(a, b));
      AbsValue ma = abs_of(a), mb = abs_of(b);
      AbsValue mx = ma < mb ? mb : ma;
      CHECK(sum <= mx);
      if (!(ma == mb)) CHECK(sum == mx);
      CHECK(abs_of(mul(a, b)) == AbsValue::q_pow(ma.exp + mb.exp));
    }
  }
}

TEST_CASE("div mul round trip at tracked precision") {
  std::mt19937_64 rng(11);
  for (const auto& par : {zp(3, 14), fpt(3, 14)}) {
    for (int i = 0; i < 100; ++i) {
      Scalar a = random_unit(par, rng);
      Scalar b = random_unit(par, rng);
      CHECK(indistinguishable(div(mul(a, b), b), a));
    }
  }
}

TEST_CASE("structural difference is exact zero, true cancellation is not") {
  auto par = zp(3, 6);
  Scalar five = Scalar::from_int(par, 5);
  CHECK(sub(five, five).is_exact_zero());

  Scalar a = Scalar::from_digits(par, 0, {1, 2});
  Scalar b = Scalar::from_digits(par, 0, {1, 2, 1});
  Scalar d = sub(a, b);
  CHECK(d.kind() == ScalarKind::BelowPrecision);
  CHECK(d.cap() == 2);  // both tracked to pi^2 only
}

TEST_CASE("cancellation shortens significant precision") {
  auto par = zp(3, 10);
  Scalar a = add(Scalar::one(par), pow(Scalar::uniformizer(par), 3));
  Scalar tail = sub(a, Scalar::one(par));
  REQUIRE(tail.is_nonzero());
  CHECK(tail.valuation_or_throw() == 3);
  CHECK(tail.precision() == 7);  // 10 known positions, 3 eaten by cancellation
  CHECK(indistinguishable(tail, pow(Scalar::uniformizer(par), 3)));
}

TEST_CASE("division errors") {
  auto par = zp(3);
  CHECK_THROWS_AS(div(Scalar::one(par), Scalar::zero(par)), DomainError);
  Scalar bp = Scalar::below_precision(par, 8);
  CHECK_THROWS_AS(div(Scalar::one(par), bp), PrecisionExhausted);
  CHECK_THROWS_AS(bp.valuation(), PrecisionExhausted);
}

TEST_CASE("mismatched field parameters are rejected") {
  CHECK_THROWS_AS(add(Scalar::one(zp(3)), Scalar::one(zp(5))), DomainError);
  CHECK_THROWS_AS(add(Scalar::one(zp(3)), Scalar::one(fpt(3))), DomainError);
}

TEST_CASE("ring points subtract exactly") {
  auto par = zp(3, 8);
  RingElem x = RingElem::from_int(par, 5);
  RingElem y = RingElem::from_int(par, 2);
  Scalar d = ring_sub(x, y);
  CHECK(d == Scalar::from_int(par, 3));
  CHECK(ring_sub(x, x).is_exact_zero());
  // negative differences keep full precision
  Scalar neg_d = ring_sub(y, x);
  REQUIRE(neg_d.is_nonzero());
  CHECK(neg_d.valuation_or_throw() == 1);
  CHECK(neg_d.precision() == par.precision);
  CHECK(indistinguishable(neg_d, Scalar::from_int(par, -3)));
}

TEST_CASE("field parameter validation") {
  CHECK_THROWS_AS(validate(FieldParams{Backend::Zp, 4, 8}), DomainError);
  CHECK_THROWS_AS(validate(FieldParams{Backend::Zp, 3, 0}), DomainError);
  CHECK_NOTHROW(validate(FieldParams{Backend::FpT, 2, 1}));
}
