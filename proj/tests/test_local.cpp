#include <doctest.h>

#include "quadpencil/linalg.hpp"
#include "quadpencil/local.hpp"
#include "support.hpp"

using namespace qp;
using namespace qp::testing;

namespace {

RE rint(const Ring& R, std::int64_t v) { return R.from_int(v); }

RForm rform(const Ring& R, int n, std::initializer_list<std::tuple<int, int, std::int64_t>> terms) {
  RForm Q = zero_form(R, n);
  for (auto [i, j, c] : terms) coef(Q, i, j) = R.add(coef(Q, i, j), R.from_int(c));
  return Q;
}

RForm diag_form(const Ring& R, const std::vector<std::int64_t>& d) {
  const int n = static_cast<int>(d.size());
  RForm Q = zero_form(R, n);
  for (int i = 0; i < n; ++i) coef(Q, i, i) = R.from_int(d[i]);
  return Q;
}

RE rand_elem(const Ring& R, Rng& rng) {
  std::vector<mpz_class> c(R.m());
  for (auto& x : c) {
    x = 0;
    for (int w = 0; w < 6; ++w) {
      x <<= 64;
      x += mpz_class(std::to_string(rng()));
    }
  }
  return R.from_coeffs(c);
}

RForm rand_form(const Ring& R, int n, Rng& rng) {
  RForm Q = zero_form(R, n);
  for (auto& c : Q.c) c = rand_elem(R, rng);
  return Q;
}

RMat rand_unimodular(const Ring& R, int n, Rng& rng) {
  while (true) {
    RMat A(n, RVec(n));
    for (auto& row : A)
      for (auto& x : row) x = rand_elem(R, rng);
    if (R.is_unit(det(R, A))) return A;
  }
}

// Independent oracle: the discriminant of prod (x - a_i y) is prod_{i<j} (a_i - a_j)^2.
int product_disc_valuation(const std::vector<std::int64_t>& a, std::int64_t p) {
  int v = 0;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = i + 1; j < a.size(); ++j) {
      std::int64_t d = a[i] - a[j];
      while (d % p == 0) {
        d /= p;
        v += 2;
      }
    }
  return v;
}

bool mat_eq(const Ring& R, const RMat& A, const RMat& B) {
  if (A.size() != B.size()) return false;
  for (size_t i = 0; i < A.size(); ++i)
    for (size_t j = 0; j < A[i].size(); ++j)
      if (!R.eq(A[i][j], B[i][j])) return false;
  return true;
}

}  // namespace

TEST_CASE("reduce_pair") {
  Ring R(Field(2, 5), 40);
  Rng rng(3);
  const Field& K = R.residue();
  FForm q1 = random_form(K, 4, rng), q2 = random_form(K, 4, rng);
  for (auto& c : q1.c) c &= 1;
  for (auto& c : q2.c) c &= 1;
  auto [a, b] = reduce_pair(lift_pair(R, K, q1, q2));
  CHECK(forms_equal(K, a, q1));
  CHECK(forms_equal(K, b, q2));
  LocalPair P{R, form_scale(R, rand_form(R, 4, rng), R.pi_pow(1)), rand_form(R, 4, rng)};
  CHECK(is_zero_form(K, reduce_pair(P).first));
  for (int t = 0; t < 100; ++t) {
    FForm f = random_form(K, 5, rng);
    CHECK(forms_equal(K, reduce_form(R, lift_form(R, K, f)), f));
  }
}

TEST_CASE("delta valuation") {
  Ring R(Field(37, 1), 40);
  std::vector<std::int64_t> ones(8, 1), idx{1, 2, 3, 4, 5, 6, 7, 8};
  LocalPair P = make_local_pair(R, diag_form(R, ones), diag_form(R, idx));
  CHECK(delta_valuation(P) == 0);
  CHECK_THROWS_AS(delta_valuation(make_local_pair(R, diag_form(R, idx), diag_form(R, idx))), Error);
  // Scaling Q1 by 37 moves v by 56; visible at precision above 56.
  Ring R2(Field(37, 1), 80);
  std::vector<std::int64_t> s37(8, 37);
  CHECK(delta_valuation(make_local_pair(R2, diag_form(R2, s37), diag_form(R2, idx))) == 56);

  SUBCASE("binary forms with known discriminant") {
    Rng rng(5);
    for (std::int64_t p : {3, 5, 37}) {
      Ring Rp(Field(p, 1), 60);
      for (int t = 0; t < 40; ++t) {
        std::vector<std::int64_t> a(2 + rng() % 6);
        for (auto& x : a) x = static_cast<std::int64_t>(rng() % 2000) - 1000;
        bool distinct = true;
        for (size_t i = 0; i < a.size(); ++i)
          for (size_t j = i + 1; j < a.size(); ++j) distinct = distinct && a[i] != a[j];
        if (!distinct) continue;
        // coefficients of prod (x - a_i y)
        std::vector<RE> F{Rp.one()};
        for (auto ai : a) {
          std::vector<RE> G(F.size() + 1, Rp.zero());
          for (size_t k = 0; k < F.size(); ++k) {
            G[k] = Rp.add(G[k], F[k]);
            G[k + 1] = Rp.sub(G[k + 1], Rp.mul(F[k], Rp.from_int(ai)));
          }
          F = G;
        }
        int want = product_disc_valuation(a, p);
        if (want >= 60) continue;
        CHECK(binary_disc_valuation(Rp, F) == want);
      }
    }
  }
}

TEST_CASE("act and the discriminant law") {
  Rng rng(11);
  SUBCASE("identity") {
    Ring R(Field(37, 1), 40);
    LocalPair P{R, rand_form(R, 8, rng), rand_form(R, 8, rng)};
    LocalPair Q = act(P, identity_transform(R, 8));
    CHECK(forms_equal(R, P.Q1, Q.Q1));
    CHECK(forms_equal(R, P.Q2, Q.Q2));
  }
  SUBCASE("valuation law with scaled U and T") {
    Ring R(Field(37, 1), 200);
    for (int t = 0; t < 10; ++t) {
      LocalPair P{R, rand_form(R, 8, rng), rand_form(R, 8, rng)};
      int v0 = delta_valuation(P);
      TransformPair W;
      W.U = rand_unimodular(R, 2, rng);
      W.T = rand_unimodular(R, 8, rng);
      for (auto& x : W.U[0]) x = R.mul_pi(x, static_cast<int>(rng() % 2));
      for (int i = 0; i < 8; ++i)
        if (rng() % 3 == 0)
          for (auto& row : W.T) row[i] = R.mul_pi(row[i], 1);
      LocalPair Q = act(P, W);
      CHECK(delta_valuation(Q) - v0 == delta_change(R, W, 8));
    }
  }
  SUBCASE("non-integral result") {
    Ring R(Field(37, 1), 40);
    LocalPair P{R, diag_form(R, std::vector<std::int64_t>(8, 1)), diag_form(R, {1, 2, 3, 4, 5, 6, 7, 8})};
    TransformPair W = identity_transform(R, 8);
    W.kU = 1;
    CHECK_THROWS_AS(act(P, W), Error);
  }
  SUBCASE("composition") {
    Ring R(Field(5, 1), 30);
    LocalPair P{R, rand_form(R, 4, rng), rand_form(R, 4, rng)};
    TransformPair A{rand_unimodular(R, 2, rng), 0, rand_unimodular(R, 4, rng), 0};
    TransformPair B{rand_unimodular(R, 2, rng), 0, rand_unimodular(R, 4, rng), 0};
    LocalPair X = act(act(P, A), B), Y = act(P, compose(R, A, B));
    CHECK(forms_equal(R, X.Q1, Y.Q1));
    CHECK(forms_equal(R, X.Q2, Y.Q2));
  }
}

TEST_CASE("hensel_split") {
  SUBCASE("cross term elimination") {
    Ring R(Field(3, 1), 20);
    RForm Q = rform(R, 3, {{0, 1, 1}, {0, 2, 3}, {2, 2, 5}});
    HenselResult h = hensel_split(R, Q, 1);
    CHECK(R.eq(coef(h.Q0, 0, 0), rint(R, 5)));
    CHECK(R.eq(h.T[1][2], rint(R, -3)));
    CHECK(R.eq(h.T[0][2], R.zero()));
  }
  SUBCASE("idempotent on split input") {
    Ring R(Field(37, 1), 40);
    RForm Q = hyperbolic_form(R, 2, 6);
    coef(Q, 4, 4) = rint(R, 3);
    coef(Q, 5, 5) = rint(R, 37);
    HenselResult h = hensel_split(R, Q, 2);
    CHECK(mat_eq(R, h.T, identity(R, 6)));
  }
  SUBCASE("random conforming inputs") {
    Rng rng(17);
    for (auto [p, m] : {std::pair{37, 1}, std::pair{2, 5}}) {
      Ring R(Field(p, m), 40);
      for (int t = 0; t < 20; ++t) {
        const int s = 1 + t % 3, n = 8;
        RForm Q = rand_form(R, n, rng);
        for (int i = 0; i < 2 * s; ++i)
          for (int j = i; j < n; ++j) {
            RE base = (i % 2 == 0 && j == i + 1) ? R.one() : R.zero();
            coef(Q, i, j) = R.add(base, R.mul_pi(coef(Q, i, j), 1));
          }
        HenselResult h = hensel_split(R, Q, s);
        RForm full = substitute(R, Q, h.T);
        RForm want = hyperbolic_form(R, s, n);
        for (int i = 2 * s; i < n; ++i)
          for (int j = i; j < n; ++j) {
            coef(want, i, j) = coef(h.Q0, i - 2 * s, j - 2 * s);
            CHECK(R.valuation(R.sub(coef(h.Q0, i - 2 * s, j - 2 * s), coef(Q, i, j))) >= 2);
          }
        CHECK(forms_equal(R, full, want));
        CHECK(R.is_unit(det(R, h.T)));
      }
    }
  }
  SUBCASE("missing block") {
    Ring R(Field(5, 1), 10);
    CHECK_THROWS_AS(hensel_split(R, diag_form(R, {1, 1, 1}), 1), Error);
  }
}

TEST_CASE("square classes") {
  Ring Z2(Field(2, 1), 20);
  CHECK(is_unit_square(Z2, rint(Z2, 1)));
  CHECK(is_unit_square(Z2, rint(Z2, 17)));
  for (int u : {3, 5, 7}) CHECK_FALSE(is_unit_square(Z2, rint(Z2, u)));
  Ring G4(Field(2, 2), 20);
  CHECK(is_unit_square(G4, rint(G4, 5)));
  CHECK(is_unit_square(G4, rint(G4, -3)));
  CHECK_FALSE(is_unit_square(G4, rint(G4, 3)));
  Ring Z37(Field(37, 1), 10);
  CHECK(is_square_element(Z37, rint(Z37, 256)));
  CHECK_FALSE(is_square_element(Z37, rint(Z37, 37)));
  CHECK_FALSE(is_square_element(Z37, rint(Z37, 2)));
}

TEST_CASE("local isotropy and plane splitting") {
  Ring R(Field(37, 1), 40);
  SUBCASE("anisotropic quaternary form") {
    // x^2 - e y^2 + 37 (z^2 - e w^2) with e a nonsquare mod 37.
    std::int64_t e = 2;
    REQUIRE_FALSE(R.residue().is_square(2));
    RForm Q = diag_form(R, {1, -e, 37, -37 * e});
    CHECK_FALSE(local_isotropic_vector(R, Q).has_value());
  }
  SUBCASE("zero found by descent") {
    RForm Q = diag_form(R, {1, -2, 37, -37 * 4});
    auto x = local_isotropic_vector(R, Q);
    REQUIRE(x.has_value());
    CHECK(R.is_zero(evaluate(R, Q, *x)));
  }
  SUBCASE("scaled planes") {
    RForm Q = rform(R, 8, {{0, 1, 1}, {2, 3, 37}, {4, 5, 37 * 37}, {6, 6, 1}, {7, 7, 5}});
    auto S = local_split(R, Q, 3);
    REQUIRE(S.has_value());
    CHECK(verify_form_split(R, Q, *S));
    CHECK(S->e >= 1);
  }
  SUBCASE("nonsquare determinant") {
    RForm Q = diag_form(R, {1, 1, 1, 1, 1, 1, 1, 37});
    FormSplit S = split_by_nonsquare_det(R, Q);
    CHECK(verify_form_split(R, Q, S));
    CHECK(S.s == 3);
    CHECK_THROWS_AS(split_by_nonsquare_det(R, diag_form(R, std::vector<std::int64_t>(8, 1))), Error);
  }
  SUBCASE("nonsquare determinant over GR(2^40, 5)") {
    Ring R2(Field(2, 5), 40);
    Rng rng(23);
    int done = 0;
    for (int t = 0; t < 200 && done < 5; ++t) {
      RForm Q = rand_form(R2, 8, rng);
      RE d = det(R2, matrix_of(R2, Q));
      if (R2.valuation(d) >= 20 || is_square_element(R2, d)) continue;
      FormSplit S = split_by_nonsquare_det(R2, Q);
      CHECK(verify_form_split(R2, Q, S));
      ++done;
    }
    CHECK(done == 5);
  }
}

TEST_CASE("pencil over Z3 whose members all have square determinant") {
  Ring R(Field(3, 1), 30);
  RForm Q1 = diag_form(R, {1, -1, 1, -4, 1, -7, 1, -10});
  RForm Q2 = rform(R, 8, {{0, 1, 1}, {2, 3, 1}, {4, 5, 1}, {6, 7, 1}});
  LocalPair P = make_local_pair(R, Q1, Q2);
  RVec z;
  for (int v : {2, 1, 0, 0, 2, -1, 0, 0}) z.push_back(rint(R, v));
  CHECK(is_local_zero(P, z));
  auto x = smooth_local_zero(P);
  REQUIRE(x.has_value());
  CHECK(is_local_zero(P, *x));
  for (int a = 0; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b) {
      if (a == 0 && b <= 0) continue;
      RForm M = combine(R, rint(R, a), Q1, rint(R, b), Q2);
      RE d = det(R, matrix_of(R, M));
      if (R.valuation(d) >= 20) continue;
      CHECK(is_square_element(R, d));
      CHECK_THROWS_AS(split_by_nonsquare_det(R, M), Error);
    }
}

TEST_CASE("non-minimality witnesses") {
  Ring R(Field(37, 1), 60);
  Rng rng(31);
  const Field& K = R.residue();
  SUBCASE("reductions in three variables") {
    Ring R(Field(37, 1), 200);
    RForm A = rand_form(R, 8, rng), B = rand_form(R, 8, rng);
    for (int i = 0; i < 8; ++i)
      for (int j = i; j < 8; ++j)
        if (j >= 3) {
          coef(A, i, j) = R.mul_pi(coef(A, i, j), 1);
          coef(B, i, j) = R.mul_pi(coef(B, i, j), 1);
        }
    LocalPair P{R, A, B};
    auto w = nonmin_witness(P);
    REQUIRE(w.has_value());
    CHECK(w->move == "notmin");
    CHECK(v_det_T(R, w->W) == 3);
    CHECK(v_det_U(R, w->W) == -2);
    LocalPair Q = act(P, w->W);
    CHECK(delta_valuation(Q) == delta_valuation(P) - 28);
  }
  SUBCASE("x8 shape") {
    // G in X1..X5, H_i vanishing at e8 modulo pi.
    RForm A = zero_form(R, 8), B = zero_form(R, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = i; j < 8; ++j) {
        RE a = rand_elem(R, rng), b = rand_elem(R, rng);
        int k = j < 5 ? 0 : 1;
        if (i >= 5 && i == 7 && j == 7) k = 2;
        coef(A, i, j) = R.mul_pi(a, k);
        coef(B, i, j) = R.mul_pi(b, k);
      }
    LocalPair P{R, A, B};
    auto [q1, q2] = reduce_pair(P);
    REQUIRE(big_R(K, q1, q2) == 5);
    auto w = nonmin_witness(P);
    REQUIRE(w.has_value());
    CHECK(w->move == "x8");
    CHECK(v_det_U(R, w->W) == -4);
    CHECK(v_det_T(R, w->W) == 7);
    CHECK(delta_valuation(act(P, w->W)) == delta_valuation(P) - 28);
  }
  SUBCASE("generic pair is fixed") {
    for (int t = 0; t < 5; ++t) {
      LocalPair P{R, rand_form(R, 8, rng), rand_form(R, 8, rng)};
      CHECK_FALSE(nonmin_witness(P).has_value());
    }
  }
}

TEST_CASE("minimize") {
  Rng rng(41);
  SUBCASE("scaled minimal pair") {
    Ring R(Field(37, 1), 130);
    LocalPair P{R, rand_form(R, 8, rng), rand_form(R, 8, rng)};
    REQUIRE(delta_valuation(P) == 0);
    LocalPair S{R, form_scale(R, P.Q1, R.pi_pow(1)), form_scale(R, P.Q2, R.pi_pow(1))};
    MinimizeResult m = minimize(S);
    CHECK(m.v_before == 112);
    CHECK(m.v_after == 0);
    CHECK(m.catalog_minimal);
    LocalPair back = act(S, m.W);
    CHECK(forms_equal(R, back.Q1, m.pair.Q1));
  }
  SUBCASE("already minimal") {
    Ring R(Field(37, 1), 40);
    LocalPair P{R, rand_form(R, 8, rng), rand_form(R, 8, rng)};
    MinimizeResult m = minimize(P);
    CHECK(m.moves.empty());
    CHECK(mat_eq(R, m.W.T, identity(R, 8)));
  }
  SUBCASE("planted small R") {
    Ring R(Field(37, 1), 120);
    for (int t = 0; t < 3; ++t) {
      LocalPair P = plant_pair(R, 100 + t, Profile{3, 3, true, true});
      MinimizeResult m = minimize(P);
      CHECK_FALSE(m.moves.empty());
      CHECK(m.v_after < m.v_before);
    }
  }
}

TEST_CASE("smooth zeros and planting") {
  Ring R(Field(37, 1), 40);
  const Field& K = R.residue();
  for (std::uint64_t s = 0; s < 10; ++s) {
    LocalPair P = plant_pair(R, s, Profile{});
    auto [q1, q2] = reduce_pair(P);
    CHECK(small_r(K, q1, q2) == 8);
    CHECK(big_R(K, q1, q2) == 8);
    CHECK(delta_valuation(P) < 40);
    auto x = smooth_local_zero(P);
    REQUIRE(x.has_value());
    CHECK(is_local_zero(P, *x));
  }
  CHECK_THROWS_AS(plant_pair(R, 1, Profile{6, 5, true, true}), Error);
  Ring R80(Field(37, 1), 80);
  LocalPair P = plant_pair(R80, 7, Profile{5, 5, true, true});
  auto [q1, q2] = reduce_pair(P);
  CHECK(small_r(K, q1, q2) == 5);
  CHECK(big_R(K, q1, q2) == 5);
  // Residue zeros all singular: no smooth zero is reported.
  RForm A = diag_form(R, {1, -2, 0, 0, 37, 37, 37, 37});
  RForm B = diag_form(R, {0, 0, 1, -2, 37, 74, 111, 148});
  CHECK_FALSE(smooth_local_zero(make_local_pair(R, A, B), 20000).has_value());
}
