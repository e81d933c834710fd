#include "quadpencil/quadform.hpp"

#include <sstream>

namespace qp {

RForm lift_form(const Ring& R, const Field& K, const FForm& q) {
  RForm Q{q.n, {}};
  Q.c.reserve(q.c.size());
  for (auto x : q.c) Q.c.push_back(R.lift(K, x));
  return Q;
}

FForm reduce_form(const Ring& R, const RForm& Q) {
  FForm q{Q.n, {}};
  q.c.reserve(Q.c.size());
  for (auto& x : Q.c) q.c.push_back(R.reduce(x));
  return q;
}

RForm convert_form(const Ring& R, const RForm& Q) {
  RForm r{Q.n, {}};
  for (auto& x : Q.c) r.c.push_back(R.convert(x));
  return r;
}

FForm apply_transform(const Field& K, const FForm& q, const FMat& T) {
  if (static_cast<int>(T.size()) != q.n || (q.n && static_cast<int>(T[0].size()) != q.n))
    fail(ErrorKind::DimensionMismatch, "transform size differs from form size");
  if (det(K, T) == 0) fail(ErrorKind::SingularTransform, "transform is singular");
  return substitute(K, q, T);
}

FE det_of(const Field& K, const FForm& q) { return det(K, matrix_of(K, q)); }

FE half_det(const Field& K, const FForm& q) {
  if (K.p() != 2) fail(ErrorKind::PreconditionViolated, "half-determinant needs characteristic 2");
  Ring R(K, 2);
  RForm Q = lift_form(R, K, q);
  RE d = det(R, matrix_of(R, Q));
  if (R.valuation(d) < 1) fail(ErrorKind::PreconditionViolated, "determinant of the lift is not divisible by 2");
  return R.reduce(R.div_pi(d, 1));
}

FE disc_of(const Field& K, const FForm& q) {
  if (K.p() == 2 && q.n % 2 == 1) return half_det(K, q);
  return det_of(K, q);
}

std::vector<FVec> vertex_space(const Field& K, const FForm& q) {
  auto ker = kernel(K, matrix_of(K, q), q.n);
  if (K.p() != 2 || ker.empty()) return ker;
  // q restricted to ker M is x -> (sum c_i sqrt(a_i))^2 with a_i = q(k_i).
  std::vector<FE> ra;
  int j = -1;
  for (size_t i = 0; i < ker.size(); ++i) {
    ra.push_back(K.sqrt(evaluate(K, q, ker[i])));
    if (j < 0 && ra.back()) j = static_cast<int>(i);
  }
  if (j < 0) return ker;
  std::vector<FVec> out;
  FE inv = K.inv(ra[j]);
  for (size_t i = 0; i < ker.size(); ++i) {
    if (static_cast<int>(i) == j) continue;
    FE f = K.mul(ra[i], inv);
    FVec v = ker[i];
    for (int t = 0; t < q.n; ++t) v[t] = K.sub(v[t], K.mul(f, ker[j][t]));
    out.push_back(v);
  }
  return out;
}

int rank_of(const Field& K, const FForm& q) { return q.n - static_cast<int>(vertex_space(K, q).size()); }

std::vector<std::pair<FE, FE>> binary_quadratic_zeros(const Field& K, FE a, FE b, FE c) {
  std::vector<std::pair<FE, FE>> out;
  for (FE t : poly::roots(K, Poly{c, b, a})) out.push_back({t, 1});
  if (a == 0 && (b || c)) out.push_back({1, 0});
  return out;
}

namespace {

bool nonsingular_at(const Field& K, const FForm& q, const FVec& x) {
  return !is_zero_vec(x) && evaluate(K, q, x) == 0 && !is_zero_vec(gradient(K, q, x));
}

bool leading_plane(const FForm& q) {
  if (q.c[tri_index(q.n, 0, 0)] || q.c[tri_index(q.n, 1, 1)] || q.c[tri_index(q.n, 0, 1)] != 1) return false;
  for (int j = 2; j < q.n; ++j)
    if (q.c[tri_index(q.n, 0, j)] || q.c[tri_index(q.n, 1, j)]) return false;
  return true;
}

}  // namespace

std::optional<FVec> nonsingular_zero(const Field& K, const FForm& q, ZeroSearch opts) {
  const int n = q.n;
  auto V = vertex_space(K, q);
  const int r = n - static_cast<int>(V.size());
  if (r <= 1) return std::nullopt;
  if (r == 2) {
    auto C = complete_basis(K, V, n);
    FVec u = C[V.size()], w = C[V.size() + 1];
    FE A = evaluate(K, q, u), Cc = evaluate(K, q, w), B = polar(K, q, u, w);
    for (auto [x, y] : binary_quadratic_zeros(K, A, B, Cc)) {
      FVec z(n);
      for (int i = 0; i < n; ++i) z[i] = K.add(K.mul(x, u[i]), K.mul(y, w[i]));
      if (nonsingular_at(K, q, z)) return z;
    }
    return std::nullopt;
  }
  const std::uint64_t Q = K.order();
  long double total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<long double>(Q);
  if (total <= static_cast<long double>(1u << 24)) {
    const std::uint64_t T = static_cast<std::uint64_t>(total);
    FVec x(n, 0);
    for (std::uint64_t idx = 1; idx < T; ++idx) {
      for (int i = 0; i < n; ++i) {
        if (++x[i] < Q) break;
        x[i] = 0;
      }
      if (nonsingular_at(K, q, x)) return x;
    }
    return std::nullopt;
  }
  Rng rng(opts.seed);
  std::uniform_int_distribution<FE> d(0, Q - 1);
  for (int it = 0; it < opts.budget; ++it) {
    FVec u(n), v(n);
    for (auto& e : u) e = d(rng);
    for (auto& e : v) e = d(rng);
    // q(t u + v) = t^2 q(u) + t B(u,v) + q(v)
    FE a = evaluate(K, q, u), b = polar(K, q, u, v), c = evaluate(K, q, v);
    if (!a && !b && !c) continue;
    for (auto [x, y] : binary_quadratic_zeros(K, a, b, c)) {
      FVec z(n);
      for (int i = 0; i < n; ++i) z[i] = K.add(K.mul(x, u[i]), K.mul(y, v[i]));
      if (nonsingular_at(K, q, z)) return z;
    }
  }
  fail(ErrorKind::SearchExhausted, "random zero search exceeded its budget");
}

SplitDecomposition split_hyperbolic(const Field& K, const FForm& q, ZeroSearch opts) {
  const int n = q.n;
  FMat W = identity(K, n);
  std::vector<FVec> cols;
  int s = 0;
  while (true) {
    const int k = W.empty() ? 0 : static_cast<int>(W[0].size());
    if (k < 2) break;
    FForm qw = substitute(K, q, W);
    if (leading_plane(qw)) {
      // X1X2 already splits off orthogonally; keep the coordinates.
      cols.push_back(column(W, 0));
      cols.push_back(column(W, 1));
      for (auto& row : W) row.erase(row.begin(), row.begin() + 2);
      ++s;
      continue;
    }
    auto x = nonsingular_zero(K, qw, opts);
    if (!x) break;
    FMat Mw = matrix_of(K, qw);
    FVec g = mat_vec(K, Mw, *x);
    int j = 0;
    while (!g[j]) ++j;
    FVec y(k, 0);
    y[j] = K.inv(g[j]);
    FE qy = evaluate(K, qw, y);
    for (int i = 0; i < k; ++i) y[i] = K.sub(y[i], K.mul(qy, (*x)[i]));
    FVec gy = mat_vec(K, Mw, y);
    auto ker = kernel(K, FMat{g, gy}, k);
    cols.push_back(mat_vec(K, W, *x));
    cols.push_back(mat_vec(K, W, y));
    FMat Kmat = from_columns(ker, k);
    W = ker.empty() ? FMat(n, FVec{}) : mat_mul(K, W, Kmat);
    ++s;
  }
  const int k = W.empty() || W[0].empty() ? 0 : static_cast<int>(W[0].size());
  if (k > 0) {
    FForm qw = substitute(K, q, W);
    auto V = vertex_space(K, qw);
    auto all = complete_basis(K, V, k);
    std::vector<FVec> order(all.begin() + V.size(), all.end());
    order.insert(order.end(), V.begin(), V.end());
    for (auto& v : order) cols.push_back(mat_vec(K, W, v));
  }
  SplitDecomposition out;
  out.s = s;
  out.T = from_columns(cols, n);
  FForm full = substitute(K, q, out.T);
  const int t = n - 2 * s;
  out.tail = zero_form(K, t);
  for (int i = 0; i < t; ++i)
    for (int j = i; j < t; ++j) out.tail.c[tri_index(t, i, j)] = coef(full, 2 * s + i, 2 * s + j);
  FForm expect = hyperbolic_form(K, s, n);
  for (int i = 0; i < t; ++i)
    for (int j = i; j < t; ++j) coef(expect, 2 * s + i, 2 * s + j) = coef(out.tail, i, j);
  if (!forms_equal(K, full, expect) || det(K, out.T) == 0)
    fail(ErrorKind::ShapeViolation, "hyperbolic splitting failed its identity check");
  return out;
}

FForm anisotropic_binary(const Field& K) {
  FForm f = zero_form(K, 2);
  f.c[0] = 1;
  if (K.p() != 2) {
    FE d = 1;
    while (K.is_square(d)) ++d;
    f.c[2] = K.neg(d);
  } else {
    FE c = 1;
    while (K.trace(c) != 1) ++c;
    f.c[1] = 1;
    f.c[2] = c;
  }
  return f;
}

FMat tangent_basis(const Field& K, const FForm& q, const FVec& P) {
  if (evaluate(K, q, P) != 0) fail(ErrorKind::SingularPoint, "point is not a zero of the form");
  FVec g = gradient(K, q, P);
  int j = -1;
  for (int i = 0; i < q.n; ++i)
    if (g[i]) {
      j = i;
      break;
    }
  if (j < 0) fail(ErrorKind::SingularPoint, "gradient vanishes at the point");
  FE inv = K.inv(g[j]);
  std::vector<FVec> cols;
  for (int i = 0; i < q.n; ++i) {
    if (i == j) continue;
    FVec v(q.n, 0);
    v[i] = 1;
    v[j] = K.neg(K.mul(g[i], inv));
    cols.push_back(v);
  }
  FVec e(q.n, 0);
  e[j] = 1;
  cols.push_back(e);
  return from_columns(cols, q.n);
}

FForm tangent_restrict(const Field& K, const FForm& q, const FVec& P) {
  FMat T = tangent_basis(K, q, P);
  for (auto& row : T) row.pop_back();
  return substitute(K, q, T);
}

std::string form_to_string(const Field& K, const FForm& q) {
  (void)K;
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < q.n; ++i)
    for (int j = i; j < q.n; ++j) {
      FE v = q.c[tri_index(q.n, i, j)];
      if (!v) continue;
      if (!first) os << " + ";
      first = false;
      if (v != 1) os << v << "*";
      if (i == j)
        os << "X" << i + 1 << "^2";
      else
        os << "X" << i + 1 << "X" << j + 1;
    }
  if (first) os << "0";
  return os.str();
}

}  // namespace qp
