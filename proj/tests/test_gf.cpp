#include <doctest.h>

#include <set>

#include "quadpencil/gf.hpp"

using namespace qp;

namespace {

// Schoolbook product of digit vectors followed by long division, kept separate
// from the library's reduction loop.
FE naive_mul(const Field& K, FE a, FE b) {
  const auto p = K.p();
  const int m = K.m();
  auto da = K.digits(a), db = K.digits(b);
  std::vector<long long> pr(2 * m, 0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) pr[i + j] = (pr[i + j] + static_cast<long long>(da[i] * db[j])) % p;
  const auto& f = K.modulus();
  for (int k = 2 * m - 1; k >= m; --k) {
    long long c = pr[k] % static_cast<long long>(p);
    for (int j = 0; j <= m; ++j) {
      pr[k - m + j] -= c * static_cast<long long>(f[j]);
      pr[k - m + j] %= static_cast<long long>(p);
      if (pr[k - m + j] < 0) pr[k - m + j] += p;
    }
  }
  std::vector<std::uint64_t> d(m);
  for (int i = 0; i < m; ++i) d[i] = static_cast<std::uint64_t>(pr[i]);
  return K.from_digits(d);
}

}  // namespace

TEST_CASE("field construction") {
  Field f32(2, 5, {1, 0, 1, 0, 0, 1});
  CHECK(f32.order() == 32);
  Field f37(37, 1);
  CHECK(f37.order() == 37);
  CHECK_THROWS_AS(Field(6, 1), Error);
  try {
    Field(6, 1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotPrime);
  }
  try {
    Field(2, 2, {1, 0, 1});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ReducibleModulus);
  }
  // default modulus for GF(32) is the smallest irreducible by encoding
  Field d32(2, 5);
  CHECK(d32.modulus() == std::vector<std::uint64_t>{1, 0, 1, 0, 0, 1});
  Field d9(3, 2);
  CHECK(d9.modulus() == std::vector<std::uint64_t>{1, 0, 1});
}

TEST_CASE("field axioms against a schoolbook multiplier") {
  Rng rng(1);
  for (auto [p, m] : std::vector<std::pair<int, int>>{{2, 5}, {3, 2}, {5, 3}, {2, 8}, {7, 4}, {2, 20}, {37, 1}, {3, 13}}) {
    Field K(p, m);
    std::uniform_int_distribution<FE> d(0, K.order() - 1);
    for (int t = 0; t < 300; ++t) {
      FE a = d(rng), b = d(rng), c = d(rng);
      CHECK(K.mul(a, b) == naive_mul(K, a, b));
      CHECK(K.mul(a, K.add(b, c)) == K.add(K.mul(a, b), K.mul(a, c)));
      CHECK(K.mul(K.mul(a, b), c) == K.mul(a, K.mul(b, c)));
      CHECK(K.add(a, K.neg(a)) == 0);
      CHECK(K.sub(K.add(a, b), b) == a);
      if (a) CHECK(K.mul(a, K.inv(a)) == 1);
      CHECK(K.frobenius(K.add(a, b)) == K.add(K.frobenius(a), K.frobenius(b)));
      CHECK(K.frobenius(K.mul(a, b)) == K.mul(K.frobenius(a), K.frobenius(b)));
      if (K.is_square(a)) CHECK(K.mul(K.sqrt(a), K.sqrt(a)) == a);
    }
  }
}

TEST_CASE("squares and square roots") {
  Field f5(5, 1), f7(7, 1), f9(3, 2), f32(2, 5, {1, 0, 1, 0, 0, 1});
  CHECK_FALSE(f5.is_square(2));
  CHECK(f5.is_square(4));
  for (FE a = 0; a < 32; ++a) {
    CHECK(f32.is_square(a));
    CHECK(f32.mul(f32.sqrt(a), f32.sqrt(a)) == a);
  }
  CHECK(f9.sqrt(1) == 1);
  FE g = f32.gen();
  CHECK(f32.sqrt(g) == f32.pow(g, 16));
  CHECK_THROWS_AS(f7.sqrt(3), Error);
  // the canonical root has the smaller encoding
  for (FE a = 1; a < 7; ++a)
    if (f7.is_square(a)) CHECK(f7.sqrt(a) <= f7.neg(f7.sqrt(a)));
  // large field exercising Tonelli-Shanks
  Field big(1000003, 1);
  for (FE a = 1; a < 2000; ++a)
    if (big.is_square(a)) CHECK(big.mul(big.sqrt(a), big.sqrt(a)) == a);
}

TEST_CASE("trace and primitive element") {
  Field f32(2, 5);
  int ones = 0;
  for (FE a = 0; a < 32; ++a) ones += f32.trace(a) == 1;
  CHECK(ones == 16);
  std::set<FE> seen;
  FE x = 1;
  for (int i = 0; i < 31; ++i) {
    seen.insert(x);
    x = f32.mul(x, f32.primitive());
  }
  CHECK(seen.size() == 31);
}

TEST_CASE("polynomial roots") {
  Field f37(37, 1);
  Poly f{f37.from_int(-6), 11, f37.from_int(-6), 1};  // (t-1)(t-2)(t-3)
  poly::trim(f);
  CHECK(poly::roots(f37, f) == std::vector<FE>{1, 2, 3});
  // Cantor-Zassenhaus path on a large field
  Field big(2, 20);
  Rng rng(3);
  std::uniform_int_distribution<FE> d(0, big.order() - 1);
  std::vector<FE> want;
  Poly g{1};
  for (int i = 0; i < 5; ++i) {
    FE r = d(rng);
    want.push_back(r);
    g = poly::mul(big, g, Poly{r, 1});
  }
  std::sort(want.begin(), want.end());
  want.erase(std::unique(want.begin(), want.end()), want.end());
  CHECK(poly::roots(big, g) == want);
  Field bigp(1000003, 1);
  Poly h = poly::mul(bigp, Poly{5, 1}, poly::mul(bigp, Poly{7, 1}, Poly{2, 0, 1}));
  auto rs = poly::roots(bigp, h);
  for (auto r : rs) CHECK(poly::eval(bigp, h, r) == 0);
  CHECK(rs.size() >= 2);
}

TEST_CASE("binary form roots") {
  Field f5(5, 1);
  // x^2 - y^2
  auto r1 = binary_form_roots(f5, {1, 0, f5.from_int(-1)}, 2);
  REQUIRE(r1.size() == 2);
  CHECK(r1[0].degree == 1);
  CHECK(r1[0].b == 1);
  CHECK(r1[1].b == 4);
  // x^2 + y^2 splits over GF(5) since 2^2 = -1
  auto r2 = binary_form_roots(f5, {1, 0, 1}, 2);
  REQUIRE(r2.size() == 2);
  CHECK((r2[0].degree == 1 && r2[0].b == 2));
  CHECK((r2[1].degree == 1 && r2[1].b == 3));
  // x^2 - 2y^2: 2 is a nonsquare mod 5, two conjugate roots over GF(25)
  auto r2b = binary_form_roots(f5, {1, 0, f5.from_int(-2)}, 2);
  REQUIRE(r2b.size() == 2);
  for (auto& r : r2b) {
    CHECK(r.degree == 2);
    CHECK(r.field.order() == 25);
    CHECK(r.mult == 1);
    CHECK(eval_binary(r.field, {1, 0, r.field.from_int(-2)}, r.a, r.b) == 0);
  }
  // 4xy over GF(3): roots (1:0) and (0:1)
  Field f3(3, 1);
  auto r3 = binary_form_roots(f3, {0, 1, 0}, 2);
  REQUIRE(r3.size() == 2);
  CHECK((r3[0].a == 1 && r3[0].b == 0));
  CHECK((r3[1].a == 0 && r3[1].b == 1));
  CHECK_THROWS_AS(binary_form_roots(f3, {0, 0, 0}, 2), Error);
  // multiplicities: x (x - y)^3 y^2 over GF(7) in degree 6
  Field f7(7, 1);
  Poly g = poly::mul(f7, Poly{0, 1}, poly::mul(f7, Poly{1, 6}, poly::mul(f7, Poly{1, 6}, Poly{1, 6})));
  std::vector<FE> F(7, 0);
  for (size_t i = 0; i < g.size(); ++i) F[i] = g[i];
  int total = 0;
  for (auto& r : binary_form_roots(f7, F, 6)) total += r.mult;
  CHECK(total == 6);
}

TEST_CASE("binary form roots: counts over extensions") {
  Rng rng(5);
  for (auto [p, m] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {2, 2}, {5, 1}, {2, 5}}) {
    Field K(p, m);
    std::uniform_int_distribution<FE> d(0, K.order() - 1);
    for (int t = 0; t < 30; ++t) {
      std::vector<FE> F(7);
      for (auto& c : F) c = d(rng);
      if (std::all_of(F.begin(), F.end(), [](FE c) { return c == 0; })) continue;
      int total = 0;
      for (auto& r : binary_form_roots(K, F, 6)) {
        total += r.mult;
        Extension E = extension(K, r.degree);
        std::vector<FE> Fe(F.size());
        for (size_t i = 0; i < F.size(); ++i) Fe[i] = E.embed(F[i]);
        CHECK(eval_binary(r.field, Fe, r.a, r.b) == 0);
      }
      CHECK(total == 6);
    }
  }
}

TEST_CASE("extension embedding is a ring map") {
  Field K(2, 5);
  Extension E = extension(K, 2);
  for (FE a = 0; a < 32; ++a)
    for (FE b = 0; b < 32; b += 3) {
      CHECK(E.embed(K.mul(a, b)) == E.ext.mul(E.embed(a), E.embed(b)));
      CHECK(E.embed(K.add(a, b)) == E.ext.add(E.embed(a), E.embed(b)));
    }
}

TEST_CASE("galois ring") {
  Field f32(2, 5, {1, 0, 1, 0, 0, 1});
  Ring R(f32, 40);
  FE a = f32.from_digits({1, 0, 1, 0, 0});
  RE x = R.lift(f32, a);
  CHECK(x.c[0] == 1);
  CHECK(x.c[2] == 1);
  CHECK(R.reduce(x) == a);
  Field f3(3, 1);
  Ring R9(f3, 2);
  CHECK(R9.reduce(R9.from_int(7)) == 1);
  Field other(2, 5, {1, 0, 0, 1, 0, 1});
  CHECK_THROWS_AS(R.lift(other, 1), Error);

  Rng rng(7);
  Ring R37(Field(37, 1), 40);
  for (const Ring* rr : {&R, &R37}) {
    const Ring& S = *rr;
    std::uniform_int_distribution<int> dv(0, 45);
    std::uniform_int_distribution<FE> du(1, S.residue().order() - 1);
    for (int t = 0; t < 200; ++t) {
      int v1 = dv(rng), v2 = dv(rng);
      RE u1 = S.add(S.lift(S.residue(), du(rng)), S.mul_pi(S.lift(S.residue(), du(rng)), 1));
      RE u2 = S.lift(S.residue(), du(rng));
      RE x1 = S.mul_pi(u1, v1), x2 = S.mul_pi(u2, v2);
      CHECK(S.valuation(S.mul(x1, x2)) == std::min(std::min(v1, S.N()) + std::min(v2, S.N()), S.N()));
      CHECK(S.eq(S.mul(u1, S.inv(u1)), S.one()));
      CHECK(S.eq(S.mul(S.mul(u1, u2), x1), S.mul(u1, S.mul(u2, x1))));
    }
  }
}
