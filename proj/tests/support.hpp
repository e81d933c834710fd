#pragma once

#include <initializer_list>
#include <random>
#include <string>
#include <tuple>

#include "quadpencil/brute.hpp"
#include "quadpencil/quadform.hpp"

namespace qp::testing {

inline FE random_elem(const Field& K, Rng& rng) { return rng() % K.order(); }

inline FVec random_vec(const Field& K, int n, Rng& rng) {
  FVec v(n);
  for (auto& x : v) x = random_elem(K, rng);
  return v;
}

inline FForm random_form(const Field& K, int n, Rng& rng) {
  FForm q = zero_form(K, n);
  for (auto& c : q.c) c = random_elem(K, rng);
  return q;
}

inline FMat random_invertible(const Field& K, int n, Rng& rng) {
  while (true) {
    FMat T(n);
    for (auto& row : T) row = random_vec(K, n, rng);
    if (det(K, T) != 0) return T;
  }
}

// A form of exact rank r in n variables, hidden by a random change of basis.
inline FForm random_low_rank_form(const Field& K, int n, int r, Rng& rng) {
  FForm core;
  do {
    core = random_form(K, r, rng);
  } while (rank_of(K, core) != r);
  return substitute(K, resize_form(K, core, n), random_invertible(K, n, rng));
}

// The form whose coefficient tuple is the base-#K expansion of code.
inline FForm form_from_code(const Field& K, int n, std::uint64_t code) {
  FForm q = zero_form(K, n);
  for (auto& c : q.c) {
    c = code % K.order();
    code /= K.order();
  }
  return q;
}

// Zeros of a binary form on P^1(K), by direct evaluation.
inline int brute_projective_zeros(const Field& K, const FForm& b) {
  int cnt = evaluate(K, b, FVec{0, 1}) == 0;
  for (FE t = 0; t < K.order(); ++t) cnt += evaluate(K, b, FVec{1, t}) == 0;
  return cnt;
}

// Pencil in n variables of generic rank at most r and R at most R_target,
// built by nesting q1 = q3 + X_{R-1} l, q2 = q4 + X_{R-1} X_R with (q3, q4) of
// the same kind in R - 2 variables. The base cases are random forms in r
// variables, and in characteristic 2 also (a X1^2, b X2^2) for r = 1.
inline std::pair<FForm, FForm> nested_gap_pencil(const Field& K, int n, int r, int R, Rng& rng) {
  if (r <= 0) return {zero_form(K, n), zero_form(K, n)};
  if (R <= r) return {resize_form(K, random_form(K, r, rng), n), resize_form(K, random_form(K, r, rng), n)};
  if (r == 1) {
    FForm a = zero_form(K, n), b = zero_form(K, n);
    if (K.p() == 2 && n >= 2) {
      coef(a, 0, 0) = 1 + rng() % (K.order() - 1);
      coef(b, 1, 1) = 1 + rng() % (K.order() - 1);
    } else {
      coef(a, 0, 0) = 1;
    }
    return {a, b};
  }
  auto [q1, q2] = nested_gap_pencil(K, R - 2, r - 2, R - 2, rng);
  q1 = resize_form(K, q1, n);
  q2 = resize_form(K, q2, n);
  const int a = R - 2, b = R - 1;
  for (int j = 0; j <= a; ++j) coef(q1, j, a) = K.add(coef(q1, j, a), random_elem(K, rng));
  coef(q2, a, b) = 1;
  return {q1, q2};
}

// nested_gap_pencil hidden by random U and T.
inline std::pair<FForm, FForm> planted_gap_pencil(const Field& K, int n, int r, int R_target, Rng& rng) {
  auto [q1, q2] = nested_gap_pencil(K, n, r, R_target, rng);
  FMat U = random_invertible(K, 2, rng);
  FMat T = random_invertible(K, n, rng);
  FForm g1 = combine(K, U[0][0], q1, U[0][1], q2);
  FForm g2 = combine(K, U[1][0], q1, U[1][1], q2);
  return {substitute(K, g1, T), substitute(K, g2, T)};
}

// Form from (i, j, c) triples, 0-based.
inline FForm make_form(const Field& K, int n, std::initializer_list<std::tuple<int, int, std::int64_t>> terms) {
  FForm q = zero_form(K, n);
  for (auto [i, j, c] : terms) coef(q, i, j) = K.add(coef(q, i, j), K.from_int(c));
  return q;
}

inline RE random_ring_elem(const Ring& R, Rng& rng) {
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

inline RForm random_ring_form(const Ring& R, int n, Rng& rng) {
  RForm Q = zero_form(R, n);
  for (auto& c : Q.c) c = random_ring_elem(R, rng);
  return Q;
}

inline RForm ring_form(const Ring& R, int n, std::initializer_list<std::tuple<int, int, std::int64_t>> terms) {
  RForm Q = zero_form(R, n);
  for (auto [i, j, c] : terms) coef(Q, i, j) = R.add(coef(Q, i, j), R.from_int(c));
  return Q;
}

}  // namespace qp::testing
