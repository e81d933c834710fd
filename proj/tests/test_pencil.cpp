#include <doctest.h>

#include "quadpencil/brute.hpp"
#include "quadpencil/pencil.hpp"
#include "support.hpp"

using namespace qp;
using namespace qp::testing;

namespace {

// Product of binary linear forms (a_i x + b_i y), coefficient of x^(n-i) y^i at i.
std::vector<FE> product_of_linear(const Field& K, const std::vector<std::pair<FE, FE>>& fs) {
  std::vector<FE> P{1};
  for (auto [a, b] : fs) {
    std::vector<FE> Q(P.size() + 1, 0);
    for (size_t i = 0; i < P.size(); ++i) {
      Q[i] = K.add(Q[i], K.mul(P[i], a));
      Q[i + 1] = K.add(Q[i + 1], K.mul(P[i], b));
    }
    P = Q;
  }
  return P;
}

bool squarefree(const Field& K, const std::vector<FE>& F) {
  bool zero = true;
  for (auto c : F) zero = zero && c == 0;
  if (zero) return false;
  int total = 0;
  for (auto& r : binary_form_roots(K, F, static_cast<int>(F.size()) - 1)) {
    if (r.mult > 1) return false;
    total += r.mult;
  }
  return total == static_cast<int>(F.size()) - 1;
}

BinaryKind kind_by_zeros(const Field& K, const FForm& s) {
  int z = brute_projective_zeros(K, s);
  if (z == 2) return BinaryKind::Hyperbolic;
  if (z == 0) return BinaryKind::Anisotropic;
  return BinaryKind::Repeated;
}

// Characteristic 2, four variables, r = 3 < R = 4 (generically). Without the
// link term: q1 = q1'(X1..X3), q2 = q2'(X1..X3) + X4^2. With it:
// q1 = l3^2 + X3 l1, q2 = l4^2 + X3 (l2 + X4) + X4^2.
std::pair<FForm, FForm> planted_r3_pencil(const Field& K, bool link, Rng& rng) {
  FForm q1, q2;
  if (!link) {
    FForm q1p;
    do q1p = random_form(K, 3, rng);
    while (rank_of(K, q1p) != 3);
    q1 = resize_form(K, q1p, 4);
    q2 = resize_form(K, random_form(K, 3, rng), 4);
  } else {
    q1 = zero_form(K, 4);
    q2 = zero_form(K, 4);
    FE a = random_elem(K, rng), b = random_elem(K, rng), c = random_elem(K, rng), d = random_elem(K, rng);
    coef(q1, 0, 0) = K.mul(a, a);
    coef(q1, 1, 1) = K.mul(b, b);
    coef(q2, 0, 0) = K.mul(c, c);
    coef(q2, 1, 1) = K.mul(d, d);
    for (int j = 0; j < 3; ++j) {
      coef(q1, j, 2) = random_elem(K, rng);
      coef(q2, j, 2) = random_elem(K, rng);
    }
    coef(q2, 2, 3) = 1;
  }
  coef(q2, 3, 3) = 1;
  FMat T = random_invertible(K, 4, rng);
  return {substitute(K, q1, T), substitute(K, q2, T)};
}

}  // namespace

TEST_CASE("pencil_F examples") {
  Field f37(37, 1), f5(5, 1);
  FForm q1 = zero_form(f37, 8), q2 = zero_form(f37, 8);
  std::vector<std::pair<FE, FE>> lin;
  for (int i = 0; i < 8; ++i) {
    coef(q1, i, i) = 1;
    coef(q2, i, i) = i + 1;
    lin.push_back({2, f37.from_int(2 * (i + 1))});
  }
  CHECK(pencil_F(f37, q1, q2) == product_of_linear(f37, lin));

  FForm h = make_form(f5, 2, {{0, 1, 1}});
  CHECK(pencil_F(f5, h, h) == std::vector<FE>{4, 3, 4});  // -(x+y)^2
  CHECK(pencil_F(f5, make_form(f5, 2, {{0, 0, 1}}), make_form(f5, 2, {{1, 1, 1}})) == std::vector<FE>{0, 4, 0});
}

TEST_CASE("pencil_F in characteristic 2 with n odd is the half-determinant form") {
  Field f8(2, 3);
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    FForm q1 = random_form(f8, 3, rng), q2 = random_form(f8, 3, rng);
    auto F = pencil_F(f8, q1, q2);
    REQUIRE(F.size() == 4);
    for (FE x = 0; x < 8; ++x)
      for (FE y = 0; y < 8; ++y) CHECK(eval_binary(f8, F, x, y) == half_det(f8, combine(f8, x, q1, y, q2)));
  }
}

TEST_CASE("invariant examples") {
  Field f5(5, 1), f2(2, 1), f4(2, 2), f37(37, 1);
  FForm a = make_form(f5, 3, {{0, 1, 1}}), b = make_form(f5, 3, {{0, 2, 1}});
  CHECK(small_r(f5, a, b) == 2);
  CHECK(big_R(f5, a, b) == 3);
  CHECK(r_min(f5, a, b) == 2);
  for (const Field& K : {f2, f4, Field(2, 5)}) {
    FForm x1 = make_form(K, 2, {{0, 0, 1}}), x2 = make_form(K, 2, {{1, 1, 1}});
    CHECK(small_r(K, x1, x2) == 1);
    CHECK(big_R(K, x1, x2) == 2);
    CHECK(r_min(K, x1, x2) == 1);
  }
  Rng rng(3);
  for (int k = 0; k <= 5; ++k) {
    FForm q = random_low_rank_form(f37, 6, k, rng);
    CHECK(big_R(f37, q, q) == k);
    CHECK(small_r(f37, q, q) == k);
  }
  FForm z = zero_form(f37, 4);
  CHECK(invariants(f37, z, z).r == 0);
  CHECK(invariants(f37, z, z).r_min == 0);
}

TEST_CASE("random nonsingular pairs with squarefree F have r = n and r_min = n - 1") {
  Rng rng(5);
  for (std::uint64_t p : {3, 5, 37}) {
    Field K(p, 1);
    for (int n : {4, 6, 8}) {
      int seen = 0;
      for (int t = 0; t < 40 && seen < 8; ++t) {
        FForm q1 = random_form(K, n, rng), q2 = random_form(K, n, rng);
        auto F = pencil_F(K, q1, q2);
        if (!squarefree(K, F)) continue;
        ++seen;
        CHECK(small_r(K, q1, q2) == n);
        CHECK(r_min(K, q1, q2) == n - 1);
      }
      CHECK(seen > 0);
    }
  }
}

TEST_CASE("a planted singular common point gives F a repeated factor") {
  Field K(37, 1);
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    // Both forms vanish at e1 with gradients proportional: no X1^2 term, and
    // the X1 X_j coefficients of q2 are a multiple of those of q1.
    FForm q1 = random_form(K, 6, rng), q2 = random_form(K, 6, rng);
    coef(q1, 0, 0) = coef(q2, 0, 0) = 0;
    FE lam = random_elem(K, rng);
    for (int j = 1; j < 6; ++j) coef(q2, 0, j) = K.mul(lam, coef(q1, 0, j));
    FMat T = random_invertible(K, 6, rng);
    q1 = substitute(K, q1, T);
    q2 = substitute(K, q2, T);
    auto F = pencil_F(K, q1, q2);
    bool zero = true;
    for (auto c : F) zero = zero && c == 0;
    if (zero) continue;
    CHECK_FALSE(squarefree(K, F));
  }
}

TEST_CASE("invariants agree with enumeration on every 3-variable pencil over GF(2)") {
  Field f2(2, 1);
  for (std::uint64_t c1 = 0; c1 < 64; ++c1)
    for (std::uint64_t c2 = 0; c2 < 64; ++c2) {
      FForm q1 = form_from_code(f2, 3, c1), q2 = form_from_code(f2, 3, c2);
      auto b = brute_pencil_ranks(f2, q1, q2);
      auto inv = invariants(f2, q1, q2);
      INFO(c1 << " " << c2);
      REQUIRE(inv.r == b.r);
      REQUIRE(inv.R == b.R);
      REQUIRE(inv.r_min == b.r_min);
    }
}

TEST_CASE("invariants agree with enumeration on sampled pencils over GF(3) and GF(4)") {
  Rng rng(9);
  for (const Field& K : {Field(3, 1), Field(2, 2)}) {
    for (int n : {2, 3, 4}) {
      for (int t = 0; t < 36; ++t) {
        FForm q1, q2;
        if (t % 3 == 0) {
          std::tie(q1, q2) = planted_gap_pencil(K, n, 2 + t % 2 * (n >= 4), n, rng);
        } else {
          q1 = random_low_rank_form(K, n, 1 + t % n, rng);
          q2 = random_low_rank_form(K, n, 1 + (t / 3) % n, rng);
        }
        auto b = brute_pencil_ranks(K, q1, q2, 1ull << 30);
        auto inv = invariants(K, q1, q2);
        REQUIRE(inv.r == b.r);
        REQUIRE(inv.R == b.R);
        REQUIRE(inv.r_min == b.r_min);
      }
    }
  }
}

TEST_CASE("invariants are stable under pencil and variable changes") {
  Rng rng(13);
  for (const Field& K : {Field(37, 1), Field(2, 5), Field(3, 2)}) {
    for (int t = 0; t < 170; ++t) {
      const int n = 2 + t % 5;
      FForm q1, q2;
      if (t % 2)
        std::tie(q1, q2) = planted_gap_pencil(K, n, 2 + t % (n - 1), n, rng);
      else
        q1 = random_low_rank_form(K, n, t % (n + 1), rng), q2 = random_low_rank_form(K, n, (t / 2) % (n + 1), rng);
      auto a = invariants(K, q1, q2);
      auto [g1, g2] = transform_pencil(K, random_invertible(K, 2, rng), random_invertible(K, n, rng), q1, q2);
      auto b = invariants(K, g1, g2);
      CHECK(a.r == b.r);
      CHECK(a.R == b.R);
      CHECK(a.r_min == b.r_min);
      CHECK(a.r_min <= a.r);
      CHECK(a.r <= a.R);
      CHECK(a.R <= n);
    }
  }
}

TEST_CASE("normalize_shape1") {
  Field f37(37, 1);
  FForm a = make_form(f37, 3, {{0, 1, 1}}), b = make_form(f37, 3, {{0, 2, 1}});
  auto rep = normalize_shape1(f37, a, b);
  CHECK(rep.kind == "shape1");
  auto [g1, g2] = transform_pencil(f37, rep.U, rep.T, a, b);
  CHECK(forms_equal(f37, g1, rep.q1));
  CHECK(forms_equal(f37, g2, rep.q2));
  CHECK(coef(rep.q2, 1, 2) == 1);

  Rng rng(17);
  int done = 0;
  for (int t = 0; done < 200; ++t) {
    const int n = 3 + t % 4;
    const int r = 2 + 2 * (t % 2) * (n >= 5);
    auto [q1, q2] = planted_gap_pencil(f37, n, r, n - t % 2 * (n >= 5), rng);
    if (small_r(f37, q1, q2) >= big_R(f37, q1, q2)) continue;
    ++done;
    auto s = normalize_shape1(f37, q1, q2);
    auto [h1, h2] = transform_pencil(f37, s.U, s.T, q1, q2);
    REQUIRE(forms_equal(f37, h1, s.q1));
    REQUIRE(forms_equal(f37, h2, s.q2));
    FForm expect = resize_form(f37, s.parts["q2'"], n);
    coef(expect, s.r - 1, s.R - 1) = 1;
    REQUIRE(forms_equal(f37, expect, s.q2));
    REQUIRE(forms_equal(f37, resize_form(f37, s.parts["q1'"], n), s.q1));
    REQUIRE(rank_of(f37, s.parts["q1'"]) == s.r);
  }

  FForm q = random_low_rank_form(f37, 4, 3, rng);
  CHECK_THROWS_AS(normalize_shape1(f37, q, q), Error);
  CHECK_THROWS_AS(normalize_shape1(Field(3, 1), make_form(Field(3, 1), 4, {{0, 1, 1}}), make_form(Field(3, 1), 4, {{0, 2, 1}})), Error);
  Field f32(2, 5);
  CHECK_THROWS_AS(normalize_shape1(f32, make_form(f32, 2, {{0, 0, 1}}), make_form(f32, 2, {{0, 1, 1}})), Error);
}

TEST_CASE("normalize_shape2") {
  Field f32(2, 5);
  // X1^2 + t X1 X2 has rank 2, so (X1^2, X1 X2) has r = 2.
  FForm a = make_form(f32, 2, {{0, 0, 1}}), b = make_form(f32, 2, {{0, 1, 1}});
  CHECK(small_r(f32, a, b) == 2);
  CHECK_THROWS_AS(normalize_shape2(f32, a, b), Error);
  FForm c = make_form(f32, 2, {{1, 1, 1}});
  auto rep = normalize_shape2(f32, a, c);
  CHECK(rep.r == 1);
  CHECK(rep.kind == "shape2b");
  CHECK_THROWS_AS(normalize_shape2(Field(37, 1), a, c), Error);

  Rng rng(19);
  std::map<std::string, int> kinds;
  for (int t = 0; t < 200; ++t) {
    auto [q1, q2] = planted_r3_pencil(f32, t % 2, rng);
    if (small_r(f32, q1, q2) != 3 || big_R(f32, q1, q2) != 4) continue;
    auto s = normalize_shape2(f32, q1, q2);
    auto [h1, h2] = transform_pencil(f32, s.U, s.T, q1, q2);
    REQUIRE(forms_equal(f32, h1, s.q1));
    REQUIRE(forms_equal(f32, h2, s.q2));
    ++kinds[s.kind];
    if (t % 2 == 0) CHECK(s.kind == "shape2b");
  }
  CHECK(kinds["shape2b"] > 50);
  CHECK(kinds["shape2c"] > 0);

  int done = 0;
  for (int t = 0; done < 200; ++t) {
    const int n = 5 + t % 2;
    auto [q1, q2] = planted_gap_pencil(f32, n, 3, 5, rng);
    const int r = small_r(f32, q1, q2), R = big_R(f32, q1, q2);
    if (r % 2 == 0 || r > R - 2) continue;
    ++done;
    auto s = normalize_shape2(f32, q1, q2);
    CHECK(s.kind == "shape2a");
    auto [h1, h2] = transform_pencil(f32, s.U, s.T, q1, q2);
    REQUIRE(forms_equal(f32, h2, s.q2));
  }
}

TEST_CASE("peel_r2") {
  Field f37(37, 1);
  FForm a = make_form(f37, 3, {{0, 1, 1}}), b = make_form(f37, 3, {{0, 2, 1}});
  auto p = peel_r2(f37, a, b);
  CHECK(is_zero_form(f37, p.q3));
  CHECK(is_zero_form(f37, p.q4));
  CHECK(p.q3.n == 1);
  CHECK(p.ell.size() == 2);
  CHECK_FALSE(is_zero_vec(p.ell));
  Rng r1(1);
  FForm q = random_low_rank_form(f37, 4, 3, r1);
  CHECK_THROWS_AS(peel_r2(f37, q, q), Error);

  Rng rng(23);
  int done = 0;
  for (int t = 0; done < 100; ++t) {
    auto [q1, q2] = planted_gap_pencil(f37, 6, 4, 6, rng);
    if (small_r(f37, q1, q2) != 4 || big_R(f37, q1, q2) != 6) continue;
    ++done;
    auto s = peel_r2(f37, q1, q2);
    auto [h1, h2] = transform_pencil(f37, s.U, s.T, q1, q2);
    REQUIRE(forms_equal(f37, h1, s.q1));
    REQUIRE(forms_equal(f37, h2, s.q2));
    CHECK(rank_of(f37, s.q3) == 2);
    CHECK(small_r(f37, s.q3, s.q4) == 2);
    const int R34 = big_R(f37, s.q3, s.q4);
    CHECK((R34 == 3 || R34 == 4));
  }

  Field f32(2, 5);
  for (int t = 0; t < 50; ++t) {
    auto [q1, q2] = planted_gap_pencil(f32, 5, 2 + t % 2, 5, rng);
    const int r = small_r(f32, q1, q2), R = big_R(f32, q1, q2);
    if (r >= R || (r % 2 == 1 && r > R - 2)) continue;
    auto s = peel_r2(f32, q1, q2);
    auto [h1, h2] = transform_pencil(f32, s.U, s.T, q1, q2);
    REQUIRE(forms_equal(f32, h1, s.q1));
    REQUIRE(forms_equal(f32, h2, s.q2));
  }
}

TEST_CASE("singular common zeros of 4-variable pencils") {
  Field f2(2, 1), f32(2, 5), f37(37, 1);
  {
    FForm a = make_form(f2, 4, {{0, 0, 1}}), b = make_form(f2, 4, {{1, 1, 1}});
    auto z = singular_common_zero_4(f2, a, b);
    CHECK(z.route == "vertex");
    CHECK(is_singular_common_zero(f2, a, b, z.x));
  }
  Rng rng(29);
  for (int t = 0; t < 100; ++t) {
    // Shape X_r X_R: the zero is T e4.
    FForm q1 = resize_form(f37, random_low_rank_form(f37, 2, 2, rng), 4);
    FForm q2 = resize_form(f37, random_form(f37, 3, rng), 4);
    coef(q2, 1, 3) = 1;
    FMat T = random_invertible(f37, 4, rng);
    auto Ti = *inverse(f37, T);
    FForm a = substitute(f37, q1, Ti), b = substitute(f37, q2, Ti);
    if (small_r(f37, a, b) != 2 || big_R(f37, a, b) != 4) continue;
    auto z = singular_common_zero_4(f37, a, b);
    CHECK(z.route == "shape1");
    CHECK(is_singular_common_zero(f37, a, b, z.x));
  }
  std::map<std::string, int> routes;
  for (int t = 0; t < 300; ++t) {
    auto [q1, q2] = planted_r3_pencil(f32, t % 2, rng);
    auto z = singular_common_zero_4(f32, q1, q2);
    CHECK_FALSE(z.full_rank);
    CHECK(is_singular_common_zero(f32, q1, q2, z.x));
    ++routes[z.route];
  }
  CHECK(routes["shape2b"] > 0);
  CHECK(routes["shape2c"] > 0);
  FForm n1 = random_form(f37, 4, rng), n2 = random_form(f37, 4, rng);
  if (small_r(f37, n1, n2) == 4) CHECK(singular_common_zero_4(f37, n1, n2).full_rank);
  CHECK_THROWS_AS(singular_common_zero_4(f37, zero_form(f37, 3), zero_form(f37, 3)), Error);
}

TEST_CASE("singular common zeros over small fields, sampled") {
  Rng rng(31);
  for (const Field& K : {Field(2, 1), Field(3, 1), Field(2, 2)}) {
    int tried = 0;
    for (int t = 0; t < 3000; ++t) {
      FForm q1, q2;
      if (t % 2)
        std::tie(q1, q2) = planted_gap_pencil(K, 4, 2 + t % 3 / 2, 4, rng);
      else
        q1 = random_low_rank_form(K, 4, t % 4, rng), q2 = random_form(K, 4, rng);
      auto z = singular_common_zero_4(K, q1, q2);
      if (z.full_rank) continue;
      ++tried;
      INFO(form_to_string(K, q1) << " | " << form_to_string(K, q2));
      REQUIRE(z.route != "none");
      REQUIRE(is_singular_common_zero(K, q1, q2, z.x));
    }
    CHECK(tried > 500);
  }
}

TEST_CASE("classify_binary_pencil") {
  Field f5(5, 1);
  auto c = classify_binary_pencil(f5, make_form(f5, 2, {{0, 0, 1}}), make_form(f5, 2, {{1, 1, 1}}));
  CHECK(c.Nh == 8);
  CHECK(c.Na == 8);
  CHECK(c.Nr == 8);
  FForm s = make_form(f5, 2, {{0, 0, 1}, {0, 1, 2}});
  auto d = classify_binary_pencil(f5, s, s);
  CHECK(d.Nh + d.Na + d.Nr == 24);
}

TEST_CASE("binary classification agrees with zero counting and satisfies the counting identities") {
  for (const Field& K : {Field(3, 1), Field(5, 1), Field(2, 2), Field(2, 1)}) {
    const std::uint64_t N = K.order();
    const std::uint64_t total = N * N * N;
    for (std::uint64_t c1 = 0; c1 < total; ++c1)
      for (std::uint64_t c2 = 0; c2 < total; ++c2) {
        FForm s1 = form_from_code(K, 2, c1), s2 = form_from_code(K, 2, c2);
        BinaryCounts fast = classify_binary_pencil(K, s1, s2);
        BinaryCounts slow;
        std::uint64_t S = 0;  // pairs ((a,b),(x,y)) with a s1 + b s2 vanishing at (x,y)
        for (FE a = 0; a < N; ++a)
          for (FE b = 0; b < N; ++b) {
            if (!a && !b) continue;
            FForm m = combine(K, a, s1, b, s2);
            BinaryKind k = kind_by_zeros(K, m);
            CHECK(k == classify_binary(K, m.c[0], m.c[1], m.c[2]));
            (k == BinaryKind::Hyperbolic ? slow.Nh : k == BinaryKind::Anisotropic ? slow.Na : slow.Nr)++;
            int z = brute_projective_zeros(K, m);
            S += z == static_cast<int>(N) + 1 ? N * N - 1 : (N - 1) * z;
          }
        REQUIRE(fast.Nh == slow.Nh);
        REQUIRE(fast.Na == slow.Na);
        REQUIRE(fast.Nr == slow.Nr);
        REQUIRE(fast.Nh + fast.Na + fast.Nr == N * N - 1);
        if (binary_resultant(K, s1, s2) == 0 || small_r(K, s1, s2) < 2) continue;
        // Coprime: every (x,y) != 0 lies on exactly N - 1 members.
        REQUIRE(S == (N - 1) * (N * N - 1));
        REQUIRE(2 * (N - 1) * fast.Nh + (N - 1) * fast.Nr == (N - 1) * (N * N - 1));
        REQUIRE(fast.Nr <= 2 * (N - 1));
        REQUIRE(2 * fast.Nh >= (N - 1) * (N - 1));
        REQUIRE(2 * fast.Na >= (N - 1) * (N - 1));
      }
  }
}

TEST_CASE("brute_pencil_ranks examples") {
  Field f3(3, 1), f2(2, 1);
  auto b = brute_pencil_ranks(f3, make_form(f3, 3, {{0, 1, 1}}), make_form(f3, 3, {{0, 2, 1}}));
  CHECK(b.r == 2);
  CHECK(b.R == 3);
  CHECK(b.r_min == 2);
  auto s = brute_pencil_ranks(f2, make_form(f2, 2, {{0, 0, 1}}), make_form(f2, 2, {{1, 1, 1}}));
  CHECK(s.r == 1);
  CHECK(s.R == 2);
}
