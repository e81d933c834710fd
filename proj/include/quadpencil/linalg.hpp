#pragma once

#include <optional>
#include <vector>

#include "quadpencil/gf.hpp"

namespace qp {

template <class E>
using Mat = std::vector<std::vector<E>>;
template <class E>
using Vec = std::vector<E>;

using FMat = Mat<FE>;
using FVec = Vec<FE>;
using RMat = Mat<RE>;
using RVec = Vec<RE>;

template <class Ctx>
auto zero_mat(const Ctx& K, int r, int c) {
  using E = decltype(K.zero());
  return Mat<E>(r, Vec<E>(c, K.zero()));
}

template <class Ctx>
auto identity(const Ctx& K, int n) {
  auto I = zero_mat(K, n, n);
  for (int i = 0; i < n; ++i) I[i][i] = K.one();
  return I;
}

template <class Ctx, class E>
Mat<E> mat_mul(const Ctx& K, const Mat<E>& A, const Mat<E>& B) {
  const int r = static_cast<int>(A.size());
  const int m = static_cast<int>(B.size());
  const int c = m ? static_cast<int>(B[0].size()) : 0;
  auto C = zero_mat(K, r, c);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < m; ++k) {
      if (K.is_zero(A[i][k])) continue;
      for (int j = 0; j < c; ++j) C[i][j] = K.add(C[i][j], K.mul(A[i][k], B[k][j]));
    }
  return C;
}

template <class Ctx, class E>
Vec<E> mat_vec(const Ctx& K, const Mat<E>& A, const Vec<E>& x) {
  Vec<E> y(A.size(), K.zero());
  for (size_t i = 0; i < A.size(); ++i)
    for (size_t j = 0; j < x.size(); ++j) y[i] = K.add(y[i], K.mul(A[i][j], x[j]));
  return y;
}

template <class E>
Mat<E> transpose(const Mat<E>& A) {
  if (A.empty()) return {};
  Mat<E> T(A[0].size(), Vec<E>(A.size()));
  for (size_t i = 0; i < A.size(); ++i)
    for (size_t j = 0; j < A[0].size(); ++j) T[j][i] = A[i][j];
  return T;
}

template <class Ctx, class E>
Mat<E> mat_scale(const Ctx& K, const Mat<E>& A, const E& c) {
  Mat<E> B = A;
  for (auto& row : B)
    for (auto& x : row) x = K.mul(x, c);
  return B;
}

// Matrix whose columns are the given vectors.
template <class E>
Mat<E> from_columns(const std::vector<Vec<E>>& cols, int n) {
  Mat<E> A(n, Vec<E>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j)
    for (int i = 0; i < n; ++i) A[i][j] = cols[j][i];
  return A;
}

template <class E>
Vec<E> column(const Mat<E>& A, int j) {
  Vec<E> v(A.size());
  for (size_t i = 0; i < A.size(); ++i) v[i] = A[i][j];
  return v;
}

// Field linear algebra.
int rank(const Field& K, FMat A);
FE det(const Field& K, FMat A);
// Basis of {x : A x = 0}.
std::vector<FVec> kernel(const Field& K, const FMat& A, int ncols);
std::optional<FMat> inverse(const Field& K, FMat A);
// Extends independent vectors to a basis of K^n; the added vectors are unit
// vectors, returned after the given ones.
std::vector<FVec> complete_basis(const Field& K, const std::vector<FVec>& vs, int n);
// Basis of the intersection of two subspaces given by spanning sets.
std::vector<FVec> intersect(const Field& K, const std::vector<FVec>& a, const std::vector<FVec>& b, int n);
bool is_zero_vec(const FVec& v);

// Ring linear algebra over GR(p^N, m).
// Exact determinant modulo p^N (elimination with minimal-valuation pivots).
RE det(const Ring& R, RMat A);
// Inverse of a matrix whose reduction is invertible.
RMat inverse_unimodular(const Ring& R, RMat A);
RMat lift_mat(const Ring& R, const Field& K, const FMat& A);
FMat reduce_mat(const Ring& R, const RMat& A);

// det(x A + y B) as a binary form: coefficient of x^(n-i) y^i at index i.
template <class Ctx, class E>
Vec<E> det_binary(const Ctx& K, const Mat<E>& A, const Mat<E>& B) {
  const int n = static_cast<int>(A.size());
  const size_t S = size_t{1} << n;
  // dp[mask]: signed sum over injective maps from the first popcount(mask)
  // rows onto the column set mask; polynomials in (x, y) of that degree.
  std::vector<Vec<E>> dp(S);
  dp[0] = Vec<E>{K.one()};
  for (size_t mask = 0; mask < S; ++mask) {
    if (dp[mask].empty()) continue;
    const int k = __builtin_popcountll(mask);
    if (k == n) continue;
    for (int j = 0; j < n; ++j) {
      if (mask >> j & 1) continue;
      const E& a = A[k][j];
      const E& b = B[k][j];
      if (K.is_zero(a) && K.is_zero(b)) continue;
      int inv = __builtin_popcountll(mask >> (j + 1));
      size_t nm = mask | (size_t{1} << j);
      auto& tgt = dp[nm];
      if (tgt.empty()) tgt.assign(k + 2, K.zero());
      const auto& src = dp[mask];
      for (int d = 0; d <= k; ++d) {
        if (K.is_zero(src[d])) continue;
        E ta = K.mul(src[d], a), tb = K.mul(src[d], b);
        if (inv & 1) {
          ta = K.neg(ta);
          tb = K.neg(tb);
        }
        tgt[d] = K.add(tgt[d], ta);
        tgt[d + 1] = K.add(tgt[d + 1], tb);
      }
    }
  }
  auto out = dp[S - 1];
  if (out.empty()) out.assign(n + 1, K.zero());
  return out;
}

}  // namespace qp
