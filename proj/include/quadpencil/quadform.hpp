#pragma once

#include <optional>
#include <vector>

#include "quadpencil/gf.hpp"
#include "quadpencil/linalg.hpp"

namespace qp {

// Upper-triangular coefficients q_ij (i <= j), row-major:
// (1,1),(1,2),...,(1,n),(2,2),...,(n,n).
template <class E>
struct QForm {
  int n = 0;
  std::vector<E> c;
};

using FForm = QForm<FE>;
using RForm = QForm<RE>;

// 0-based i <= j.
inline int tri_index(int n, int i, int j) { return i * n - i * (i - 1) / 2 + (j - i); }
inline int tri_size(int n) { return n * (n + 1) / 2; }

template <class Ctx>
auto zero_form(const Ctx& K, int n) {
  using E = decltype(K.zero());
  return QForm<E>{n, std::vector<E>(tri_size(n), K.zero())};
}

template <class E>
const E& coef(const QForm<E>& q, int i, int j) {
  return i <= j ? q.c[tri_index(q.n, i, j)] : q.c[tri_index(q.n, j, i)];
}

template <class E>
E& coef(QForm<E>& q, int i, int j) {
  return i <= j ? q.c[tri_index(q.n, i, j)] : q.c[tri_index(q.n, j, i)];
}

template <class Ctx, class E>
bool is_zero_form(const Ctx& K, const QForm<E>& q) {
  for (auto& x : q.c)
    if (!K.is_zero(x)) return false;
  return true;
}

template <class Ctx, class E>
bool forms_equal(const Ctx& K, const QForm<E>& a, const QForm<E>& b) {
  if (a.n != b.n) return false;
  for (size_t i = 0; i < a.c.size(); ++i)
    if (!K.eq(a.c[i], b.c[i])) return false;
  return true;
}

template <class Ctx, class E>
E evaluate(const Ctx& K, const QForm<E>& q, const std::vector<E>& x) {
  if (static_cast<int>(x.size()) != q.n) fail(ErrorKind::DimensionMismatch, "vector length differs from form size");
  E s = K.zero();
  for (int i = 0; i < q.n; ++i) {
    if (K.is_zero(x[i])) continue;
    E row = K.zero();
    for (int j = i; j < q.n; ++j) row = K.add(row, K.mul(q.c[tri_index(q.n, i, j)], x[j]));
    s = K.add(s, K.mul(x[i], row));
  }
  return s;
}

template <class Ctx, class E>
Mat<E> matrix_of(const Ctx& K, const QForm<E>& q) {
  auto M = zero_mat(K, q.n, q.n);
  for (int i = 0; i < q.n; ++i)
    for (int j = i; j < q.n; ++j) {
      const E& v = q.c[tri_index(q.n, i, j)];
      if (i == j)
        M[i][i] = K.add(v, v);
      else
        M[i][j] = M[j][i] = v;
    }
  return M;
}

// Bilinear form B(x,y) = q(x+y) - q(x) - q(y) = x^t M y.
template <class Ctx, class E>
E polar(const Ctx& K, const QForm<E>& q, const std::vector<E>& x, const std::vector<E>& y) {
  E s = K.zero();
  for (int i = 0; i < q.n; ++i)
    for (int j = i; j < q.n; ++j) {
      const E& v = q.c[tri_index(q.n, i, j)];
      if (K.is_zero(v)) continue;
      E t = i == j ? K.add(K.mul(x[i], y[i]), K.mul(x[i], y[i])) : K.add(K.mul(x[i], y[j]), K.mul(x[j], y[i]));
      s = K.add(s, K.mul(v, t));
    }
  return s;
}

template <class Ctx, class E>
std::vector<E> gradient(const Ctx& K, const QForm<E>& q, const std::vector<E>& x) {
  return mat_vec(K, matrix_of(K, q), x);
}

// q(T X) for an n x k matrix T; the result has k variables. No invertibility check.
template <class Ctx, class E>
QForm<E> substitute(const Ctx& K, const QForm<E>& q, const Mat<E>& T) {
  const int n = q.n;
  const int k = n ? static_cast<int>(T[0].size()) : 0;
  auto out = zero_form(K, k);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const E& v = q.c[tri_index(n, i, j)];
      if (K.is_zero(v)) continue;
      for (int a = 0; a < k; ++a) {
        if (K.is_zero(T[i][a]) && K.is_zero(T[j][a])) continue;
        E via = K.mul(v, T[i][a]);
        E vja = K.mul(v, T[j][a]);
        // diagonal a
        out.c[tri_index(k, a, a)] = K.add(out.c[tri_index(k, a, a)], K.mul(via, T[j][a]));
        for (int b = a + 1; b < k; ++b) {
          E t = K.add(K.mul(via, T[j][b]), K.mul(vja, T[i][b]));
          out.c[tri_index(k, a, b)] = K.add(out.c[tri_index(k, a, b)], t);
        }
      }
    }
  return out;
}

template <class Ctx, class E>
QForm<E> form_add(const Ctx& K, const QForm<E>& a, const QForm<E>& b) {
  if (a.n != b.n) fail(ErrorKind::DimensionMismatch, "form sizes differ");
  QForm<E> r = a;
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = K.add(a.c[i], b.c[i]);
  return r;
}

template <class Ctx, class E>
QForm<E> form_sub(const Ctx& K, const QForm<E>& a, const QForm<E>& b) {
  if (a.n != b.n) fail(ErrorKind::DimensionMismatch, "form sizes differ");
  QForm<E> r = a;
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = K.sub(a.c[i], b.c[i]);
  return r;
}

template <class Ctx, class E>
QForm<E> form_scale(const Ctx& K, const QForm<E>& a, const E& s) {
  QForm<E> r = a;
  for (auto& x : r.c) x = K.mul(x, s);
  return r;
}

// a*q1 + b*q2
template <class Ctx, class E>
QForm<E> combine(const Ctx& K, const E& a, const QForm<E>& q1, const E& b, const QForm<E>& q2) {
  return form_add(K, form_scale(K, q1, a), form_scale(K, q2, b));
}

// Restriction to the first k variables (or re-embedding into more variables).
template <class Ctx, class E>
QForm<E> resize_form(const Ctx& K, const QForm<E>& q, int k) {
  auto r = zero_form(K, k);
  const int m = std::min(k, q.n);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) r.c[tri_index(k, i, j)] = q.c[tri_index(q.n, i, j)];
  return r;
}

// Sum of hyperbolic planes X1X2 + ... + X_{2s-1}X_{2s} in n variables.
template <class Ctx>
auto hyperbolic_form(const Ctx& K, int s, int n) {
  auto h = zero_form(K, n);
  for (int i = 0; i < s; ++i) h.c[tri_index(n, 2 * i, 2 * i + 1)] = K.one();
  return h;
}

template <class Ctx, class E>
std::vector<E> unit_vec(const Ctx& K, int n, int i) {
  std::vector<E> v(n, K.zero());
  v[i] = K.one();
  return v;
}

RForm lift_form(const Ring& R, const Field& K, const FForm& q);
FForm reduce_form(const Ring& R, const RForm& Q);
RForm convert_form(const Ring& R, const RForm& Q);

// Field operations.
FForm apply_transform(const Field& K, const FForm& q, const FMat& T);  // checks invertibility
FE det_of(const Field& K, const FForm& q);
// Characteristic 2: reduction of det(M(Q))/2 for an integral lift Q.
FE half_det(const Field& K, const FForm& q);
// det or, for characteristic 2 and odd n, the half-determinant.
FE disc_of(const Field& K, const FForm& q);
int rank_of(const Field& K, const FForm& q);
std::vector<FVec> vertex_space(const Field& K, const FForm& q);

struct SplitDecomposition {
  FMat T;
  int s = 0;
  FForm tail;
};

struct ZeroSearch {
  std::uint64_t seed = 0x51ed;
  int budget = 20000;
};

// x != 0 with q(x) = 0 and grad q(x) != 0, or nullopt when none exists.
std::optional<FVec> nonsingular_zero(const Field& K, const FForm& q, ZeroSearch opts = {});
SplitDecomposition split_hyperbolic(const Field& K, const FForm& q, ZeroSearch opts = {});
FForm anisotropic_binary(const Field& K);
// Restriction to the tangent hyperplane at a nonsingular zero P, as a form
// in n-1 variables; basis e_i - (g_i/g_j) e_j (i != j) in order.
FForm tangent_restrict(const Field& K, const FForm& q, const FVec& P);
FMat tangent_basis(const Field& K, const FForm& q, const FVec& P);

// Projective zeros of a binary form a X^2 + b XY + c Y^2 lying over K.
std::vector<std::pair<FE, FE>> binary_quadratic_zeros(const Field& K, FE a, FE b, FE c);

std::string form_to_string(const Field& K, const FForm& q);

}  // namespace qp
