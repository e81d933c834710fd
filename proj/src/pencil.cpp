#include "quadpencil/pencil.hpp"

#include <cmath>

#include "quadpencil/brute.hpp"

namespace qp {

namespace {

void check_pair(const FForm& q1, const FForm& q2) {
  if (q1.n != q2.n) fail(ErrorKind::DimensionMismatch, "pencil forms have different sizes");
}

FForm embed_form(const Extension& E, const FForm& q) {
  FForm out{q.n, {}};
  out.c.reserve(q.c.size());
  for (auto c : q.c) out.c.push_back(E.embed(c));
  return out;
}

FForm principal(const FForm& q, const std::vector<int>& S) {
  const int k = static_cast<int>(S.size());
  FForm out{k, std::vector<FE>(tri_size(k), 0)};
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) out.c[tri_index(k, i, j)] = coef(q, S[i], S[j]);
  return out;
}

bool next_subset(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

bool all_zero(const std::vector<FE>& v) {
  for (auto x : v)
    if (x) return false;
  return true;
}

FMat swap_matrix(const Field& K, int n, int i, int j) {
  FMat S = identity(K, n);
  if (i != j) {
    S[i][i] = S[j][j] = 0;
    S[i][j] = S[j][i] = 1;
  }
  return S;
}

// Running change of variables X = T Y with the transformed forms kept in step.
struct Frame {
  const Field& K;
  FMat T;
  FForm f1, f2;
  void apply(const FMat& S) {
    T = mat_mul(K, T, S);
    f1 = substitute(K, f1, S);
    f2 = substitute(K, f2, S);
  }
};

// Linear form sum_j c_j X_j (j < k) normalized into X_t by X_t -> (Y_t - sum_{j != t} c_j Y_j) / c_t.
FMat normalize_linear(const Field& K, int n, const std::vector<FE>& c, int t) {
  FMat S = identity(K, n);
  FE inv = K.inv(c[t]);
  for (size_t j = 0; j < c.size(); ++j) {
    if (static_cast<int>(j) == t) {
      S[t][t] = inv;
    } else if (c[j]) {
      S[t][j] = K.neg(K.mul(c[j], inv));
    }
  }
  return S;
}

ShapeReport normalize_shape(const Field& K, const FForm& q1, const FForm& q2, bool allow_diag) {
  check_pair(q1, q2);
  const int n = q1.n;
  const int r = small_r(K, q1, q2);
  auto V = common_vertex_space(K, q1, q2);
  const int R = n - static_cast<int>(V.size());
  if (r >= R) fail(ErrorKind::PreconditionViolated, "shape normalization needs r < R");

  // Basis member of rank r: smallest x with rank(q1 + x q2) = r, else q2 itself.
  FMat U;
  for (FE x = 0; x < K.order() && U.empty(); ++x)
    if (rank_of(K, combine(K, FE{1}, q1, x, q2)) == r) U = {{1, x}, {0, 1}};
  if (U.empty() && rank_of(K, q2) == r) U = {{0, 1}, {1, 0}};
  if (U.empty()) fail(ErrorKind::PreconditionViolated, "no member of rank r is defined over the field");
  FForm g1 = combine(K, U[0][0], q1, U[0][1], q2);
  FForm g2 = combine(K, U[1][0], q1, U[1][1], q2);

  // Columns: complement of V1 (r), V1 beyond V (R - r), V (n - R).
  auto V1 = vertex_space(K, g1);
  std::vector<FVec> mid = V;
  for (auto& v : V1) {
    auto trial = mid;
    trial.push_back(v);
    if (rank(K, from_columns(trial, n)) == static_cast<int>(trial.size())) mid = trial;
  }
  if (static_cast<int>(mid.size()) != n - r) fail(ErrorKind::ShapeViolation, "vertex space of the rank-r member does not contain the common vertex space");
  auto full = complete_basis(K, mid, n);
  std::vector<FVec> cols(full.begin() + mid.size(), full.end());
  cols.insert(cols.end(), mid.begin() + V.size(), mid.end());
  cols.insert(cols.end(), V.begin(), V.end());

  Frame fr{K, identity(K, n), g1, g2};
  fr.apply(from_columns(cols, n));

  // Block of q2 in X_{r+1..R}.
  bool diag = false;
  for (int i = r; i < R; ++i)
    for (int j = i; j < R; ++j) {
      FE c = coef(fr.f2, i, j);
      if (!c) continue;
      if (i == j && allow_diag)
        diag = true;
      else
        fail(ErrorKind::ShapeViolation, "unexpected term in the vertex block of q2");
    }
  if (diag) {
    // sum c_i X_i^2 = (sum sqrt(c_i) X_i)^2, moved into X_{r+1}.
    std::vector<FE> s(n, 0);
    int lead = -1;
    for (int i = r; i < R; ++i) {
      s[i] = K.sqrt(coef(fr.f2, i, i));
      if (lead < 0 && s[i]) lead = i;
    }
    fr.apply(swap_matrix(K, n, lead, r));
    std::swap(s[lead], s[r]);
    fr.apply(normalize_linear(K, n, s, r));
  }

  auto ell = [&](int i) {
    std::vector<FE> c(n, 0);
    for (int j = 0; j < r; ++j) c[j] = coef(fr.f2, j, i);
    return c;
  };
  int pick = -1;
  for (int i = diag ? r + 1 : r; i < R && pick < 0; ++i)
    if (!all_zero(ell(i))) pick = i;

  ShapeReport rep;
  rep.U = U;
  rep.r = r;
  rep.R = R;
  if (pick >= 0) {
    fr.apply(swap_matrix(K, n, pick, R - 1));
    auto c = ell(R - 1);
    int k = r - 1;
    while (!c[k]) --k;
    fr.apply(swap_matrix(K, n, k, r - 1));
    std::swap(c[k], c[r - 1]);
    fr.apply(normalize_linear(K, n, c, r - 1));
    rep.kind = allow_diag ? "shape2a" : "shape1";
  } else if (diag && R == r + 1) {
    auto c = ell(r);
    if (all_zero(c)) {
      rep.kind = "shape2b";
    } else {
      int k = r - 1;
      while (!c[k]) --k;
      fr.apply(swap_matrix(K, n, k, r - 1));
      std::swap(c[k], c[r - 1]);
      fr.apply(normalize_linear(K, n, c, r - 1));
      rep.kind = "shape2c";
    }
  } else {
    fail(ErrorKind::ShapeViolation, "no variable links the rank-r block to the rest");
  }

  rep.T = fr.T;
  rep.q1 = fr.f1;
  rep.q2 = fr.f2;

  // Identity check: q1 lives in X_1..X_r; q2 matches the claimed shape.
  FForm q1p = resize_form(K, fr.f1, r);
  if (!forms_equal(K, resize_form(K, q1p, n), fr.f1) || rank_of(K, q1p) != r)
    fail(ErrorKind::ShapeViolation, "q1 is not a rank-r form in the leading variables");
  FForm rest = fr.f2;
  if (rep.kind == "shape1" || rep.kind == "shape2a") {
    if (coef(rest, r - 1, R - 1) != 1) fail(ErrorKind::ShapeViolation, "missing X_r X_R term");
    coef(rest, r - 1, R - 1) = 0;
    FForm q2p = resize_form(K, rest, R - 1);
    if (!forms_equal(K, resize_form(K, q2p, n), rest)) fail(ErrorKind::ShapeViolation, "q2 has terms beyond the claimed shape");
    rep.parts["q1'"] = q1p;
    rep.parts["q2'"] = q2p;
  } else {
    if (coef(rest, r, r) != 1) fail(ErrorKind::ShapeViolation, "missing square term");
    coef(rest, r, r) = 0;
    if (rep.kind == "shape2c") {
      if (coef(rest, r - 1, r) != 1) fail(ErrorKind::ShapeViolation, "missing X_r X_{r+1} term");
      coef(rest, r - 1, r) = 0;
    }
    FForm q2p = resize_form(K, rest, r);
    if (!forms_equal(K, resize_form(K, q2p, n), rest)) fail(ErrorKind::ShapeViolation, "q2 has terms beyond the claimed shape");
    rep.parts["q1'"] = q1p;
    rep.parts["q2'"] = q2p;
  }
  if (det(K, rep.T) == 0) fail(ErrorKind::ShapeViolation, "singular change of variables");
  return rep;
}

bool proportional(const Field& K, const FVec& a, const FVec& b) {
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = i + 1; j < a.size(); ++j)
      if (K.sub(K.mul(a[i], b[j]), K.mul(a[j], b[i])) != 0) return false;
  return true;
}

// Nonzero (x1, x2) with c1 x1 + c2 x2 = 0.
std::pair<FE, FE> kernel_point(const Field& K, FE c1, FE c2) {
  if (!c1 && !c2) return {1, 0};
  return {c2, K.neg(c1)};
}

std::optional<FVec> structured_zero(const Field& K, const FForm& q1, const FForm& q2, int r, std::string& route) {
  const bool odd2 = K.p() == 2 && r % 2 == 1;
  ShapeReport rep;
  try {
    rep = normalize_shape(K, q1, q2, odd2);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::PreconditionViolated) return std::nullopt;
    throw;
  }
  const int n = 4;
  Frame fr{K, rep.T, rep.q1, rep.q2};
  FVec y(n, 0);
  route = rep.kind;
  if (rep.kind == "shape1" || rep.kind == "shape2a") {
    y[3] = 1;
  } else if (rep.kind == "shape2b") {
    // Move a radical vector of q2' into X3, then absorb c X3^2 into X4^2.
    FForm q2p = rep.parts["q2'"];
    auto ker = kernel(K, matrix_of(K, q2p), 3);
    auto basis = complete_basis(K, {ker[0]}, 3);
    std::vector<FVec> cols{basis[1], basis[2], basis[0]};
    FMat S = identity(K, n);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) S[i][j] = cols[j][i];
    fr.apply(S);
    FMat S2 = identity(K, n);
    S2[3][2] = K.sqrt(coef(fr.f2, 2, 2));
    fr.apply(S2);
    FE e = coef(fr.f1, 2, 2);
    if (!e) {
      y[2] = 1;
    } else {
      auto [x1, x2] = kernel_point(K, coef(fr.f1, 0, 2), coef(fr.f1, 1, 2));
      FVec p{x1, x2, 0, 0};
      y = p;
      y[2] = K.sqrt(K.div(evaluate(K, fr.f1, p), e));
      y[3] = K.sqrt(evaluate(K, fr.f2, p));
    }
  } else {
    // shape2c: q1 restricted to X1,X2 is a square l3^2; x3 = 0, l3 = 0, x4 = l4.
    FE a = K.sqrt(coef(fr.f1, 0, 0)), c = K.sqrt(coef(fr.f1, 1, 1));
    auto [x1, x2] = kernel_point(K, a, c);
    FE l4 = K.add(K.mul(K.sqrt(coef(fr.f2, 0, 0)), x1), K.mul(K.sqrt(coef(fr.f2, 1, 1)), x2));
    y = FVec{x1, x2, 0, l4};
  }
  return mat_vec(K, fr.T, y);
}

}  // namespace

std::vector<FE> pencil_F(const Field& K, const FForm& q1, const FForm& q2) {
  check_pair(q1, q2);
  if (K.p() == 2 && q1.n % 2 == 1) {
    Ring R(K, 2);
    auto M1 = matrix_of(R, lift_form(R, K, q1));
    auto M2 = matrix_of(R, lift_form(R, K, q2));
    auto D = det_binary(R, M1, M2);
    std::vector<FE> out;
    for (auto& c : D) {
      if (!R.is_zero(c) && R.valuation(c) < 1) fail(ErrorKind::ShapeViolation, "odd determinant form not divisible by 2");
      out.push_back(R.reduce(R.div_pi(c, 1)));
    }
    return out;
  }
  return det_binary(K, matrix_of(K, q1), matrix_of(K, q2));
}

std::vector<FVec> common_vertex_space(const Field& K, const FForm& q1, const FForm& q2) {
  check_pair(q1, q2);
  const int n = q1.n;
  auto V = intersect(K, kernel(K, matrix_of(K, q1), n), kernel(K, matrix_of(K, q2), n), n);
  if (K.p() != 2 || V.empty()) return V;
  // On V each form is (sum c_i sqrt(q(v_i)))^2.
  const int d = static_cast<int>(V.size());
  FMat A(2, FVec(d));
  for (int i = 0; i < d; ++i) {
    A[0][i] = K.sqrt(evaluate(K, q1, V[i]));
    A[1][i] = K.sqrt(evaluate(K, q2, V[i]));
  }
  std::vector<FVec> out;
  for (auto& c : kernel(K, A, d)) {
    FVec v(n, 0);
    for (int i = 0; i < d; ++i)
      if (c[i])
        for (int t = 0; t < n; ++t) v[t] = K.add(v[t], K.mul(c[i], V[i][t]));
    out.push_back(v);
  }
  return out;
}

int big_R(const Field& K, const FForm& q1, const FForm& q2) {
  return q1.n - static_cast<int>(common_vertex_space(K, q1, q2).size());
}

int small_r(const Field& K, const FForm& q1, const FForm& q2) {
  check_pair(q1, q2);
  const int n = q1.n;
  int best = 0;
  // Base-field points first; they usually reach the generic rank.
  for (FE x = 0; x < K.order() && x < static_cast<FE>(n) + 1; ++x) best = std::max(best, rank_of(K, combine(K, FE{1}, q1, x, q2)));
  best = std::max(best, rank_of(K, q2));
  if (best == n || K.order() >= static_cast<std::uint64_t>(n)) return best;
  int k = 1;
  long double Q = static_cast<long double>(K.order());
  while (std::pow(Q, k) < n) ++k;
  Extension E = extension(K, k);
  FForm a1 = embed_form(E, q1), a2 = embed_form(E, q2);
  for (FE t = 0; t < static_cast<FE>(n); ++t) best = std::max(best, rank_of(E.ext, combine(E.ext, FE{1}, a1, t, a2)));
  return best;
}

int r_min(const Field& K, const FForm& q1, const FForm& q2) {
  const int n = q1.n;
  const int r = small_r(K, q1, q2);
  if (r == 0) return 0;
  // A principal r-subset whose discriminant form is not identically zero;
  // every rank drop is a root of it.
  std::vector<int> S(r);
  for (int i = 0; i < r; ++i) S[i] = i;
  std::vector<FE> G;
  do {
    G = pencil_F(K, principal(q1, S), principal(q2, S));
    if (!all_zero(G)) break;
  } while (next_subset(S, n));
  if (all_zero(G)) fail(ErrorKind::ShapeViolation, "no principal minor form of generic size");
  int out = r;
  for (auto& root : binary_form_roots(K, G, r)) {
    Extension E = extension(K, root.degree);
    FForm m = combine(E.ext, root.a, embed_form(E, q1), root.b, embed_form(E, q2));
    out = std::min(out, rank_of(E.ext, m));
  }
  return out;
}

PencilInvariants invariants(const Field& K, const FForm& q1, const FForm& q2) {
  PencilInvariants inv;
  inv.r = small_r(K, q1, q2);
  inv.R = big_R(K, q1, q2);
  inv.r_min = r_min(K, q1, q2);
  inv.F = pencil_F(K, q1, q2);
  return inv;
}

std::pair<FForm, FForm> transform_pencil(const Field& K, const FMat& U, const FMat& T, const FForm& q1, const FForm& q2) {
  FForm g1 = combine(K, U[0][0], q1, U[0][1], q2);
  FForm g2 = combine(K, U[1][0], q1, U[1][1], q2);
  return {substitute(K, g1, T), substitute(K, g2, T)};
}

ShapeReport normalize_shape1(const Field& K, const FForm& q1, const FForm& q2) {
  check_pair(q1, q2);
  if (K.order() < static_cast<std::uint64_t>(q1.n)) fail(ErrorKind::PreconditionViolated, "field has fewer than n elements");
  if (K.p() == 2 && small_r(K, q1, q2) % 2 == 1)
    fail(ErrorKind::PreconditionViolated, "characteristic 2 with odd r needs the second normalization");
  return normalize_shape(K, q1, q2, false);
}

ShapeReport normalize_shape2(const Field& K, const FForm& q1, const FForm& q2) {
  check_pair(q1, q2);
  if (K.p() != 2) fail(ErrorKind::PreconditionViolated, "second normalization is for characteristic 2");
  if (K.order() < static_cast<std::uint64_t>(q1.n)) fail(ErrorKind::PreconditionViolated, "field has fewer than n elements");
  if (small_r(K, q1, q2) % 2 == 0) fail(ErrorKind::PreconditionViolated, "second normalization needs odd r");
  return normalize_shape(K, q1, q2, true);
}

PeelResult peel_r2(const Field& K, const FForm& q1, const FForm& q2) {
  check_pair(q1, q2);
  const int n = q1.n;
  const int r = small_r(K, q1, q2);
  const int R = big_R(K, q1, q2);
  if (r >= R) fail(ErrorKind::PreconditionViolated, "peeling needs r < R");
  if (r % 2 == 1 && r > R - 2) fail(ErrorKind::PreconditionViolated, "peeling needs r even or r <= R - 2");
  ShapeReport rep = K.p() == 2 && r % 2 == 1 ? normalize_shape2(K, q1, q2) : normalize_shape1(K, q1, q2);
  if (rep.kind != "shape1" && rep.kind != "shape2a") fail(ErrorKind::ShapeViolation, "expected the X_r X_R shape");
  Frame fr{K, rep.T, rep.q1, rep.q2};
  // X_r (X_R + l2): absorb l2 into X_R.
  FMat S = identity(K, n);
  for (int j = 0; j < R - 1; ++j) S[R - 1][j] = K.neg(coef(fr.f2, r - 1, j));
  fr.apply(S);
  fr.apply(swap_matrix(K, n, r - 1, R - 2));

  PeelResult out;
  out.U = rep.U;
  out.T = fr.T;
  out.q1 = fr.f1;
  out.q2 = fr.f2;
  out.r = r;
  out.R = R;
  out.q3 = resize_form(K, fr.f1, R - 2);
  out.q4 = resize_form(K, fr.f2, R - 2);
  out.ell.assign(R - 1, 0);
  for (int j = 0; j < R - 1; ++j) out.ell[j] = coef(fr.f1, j, R - 2);

  FForm e1 = resize_form(K, out.q3, n);
  for (int j = 0; j < R - 1; ++j) coef(e1, j, R - 2) = out.ell[j];
  FForm e2 = resize_form(K, out.q4, n);
  coef(e2, R - 2, R - 1) = 1;
  if (!forms_equal(K, e1, fr.f1) || !forms_equal(K, e2, fr.f2)) fail(ErrorKind::ShapeViolation, "peeled forms do not match the claimed identity");
  const int r34 = small_r(K, out.q3, out.q4);
  const int R34 = big_R(K, out.q3, out.q4);
  if (rank_of(K, out.q3) != r - 2 || r34 != r - 2 || R34 < R - 3 || R34 > R - 2)
    fail(ErrorKind::ShapeViolation, "peeled pencil has the wrong ranks");
  return out;
}

bool is_singular_common_zero(const Field& K, const FForm& q1, const FForm& q2, const FVec& x) {
  if (is_zero_vec(x) || evaluate(K, q1, x) != 0 || evaluate(K, q2, x) != 0) return false;
  return proportional(K, gradient(K, q1, x), gradient(K, q2, x));
}

SingularZero singular_common_zero_4(const Field& K, const FForm& q1, const FForm& q2) {
  check_pair(q1, q2);
  if (q1.n != 4) fail(ErrorKind::PreconditionViolated, "singular common zero search is for 4 variables");
  SingularZero out;
  const int r = small_r(K, q1, q2);
  if (r == 4) {
    out.full_rank = true;
    out.route = "rank4";
    return out;
  }
  auto V = common_vertex_space(K, q1, q2);
  if (!V.empty()) {
    out.x = V[0];
    out.route = "vertex";
  } else if (auto z = structured_zero(K, q1, q2, r, out.route)) {
    out.x = *z;
  } else {
    out.route = "search";
    bool found = false;
    for_each_vector(K, 4, [&](const FVec& v) {
      if (!found && is_singular_common_zero(K, q1, q2, v)) {
        out.x = v;
        found = true;
      }
    });
    if (!found) {
      out.route = "none";
      return out;
    }
  }
  if (!is_singular_common_zero(K, q1, q2, out.x)) fail(ErrorKind::ShapeViolation, "constructed vector is not a singular common zero (" + out.route + ")");
  return out;
}

BinaryKind classify_binary(const Field& K, FE a, FE b, FE c) {
  if (K.p() == 2) {
    if (!b) return BinaryKind::Repeated;
    FE t = K.div(K.mul(a, c), K.mul(b, b));
    return K.trace(t) == 0 ? BinaryKind::Hyperbolic : BinaryKind::Anisotropic;
  }
  FE d = K.sub(K.mul(b, b), K.mul(K.from_int(4), K.mul(a, c)));
  if (!d) return BinaryKind::Repeated;
  return K.is_square(d) ? BinaryKind::Hyperbolic : BinaryKind::Anisotropic;
}

BinaryCounts classify_binary_pencil(const Field& K, const FForm& s1, const FForm& s2) {
  check_pair(s1, s2);
  if (s1.n != 2) fail(ErrorKind::DimensionMismatch, "binary pencil needs 2-variable forms");
  BinaryCounts out;
  const FE Q = K.order();
  for (FE a = 0; a < Q; ++a)
    for (FE b = 0; b < Q; ++b) {
      if (!a && !b) continue;
      FForm m = combine(K, a, s1, b, s2);
      switch (classify_binary(K, m.c[0], m.c[1], m.c[2])) {
        case BinaryKind::Hyperbolic: ++out.Nh; break;
        case BinaryKind::Anisotropic: ++out.Na; break;
        case BinaryKind::Repeated: ++out.Nr; break;
      }
    }
  return out;
}

FE binary_resultant(const Field& K, const FForm& s1, const FForm& s2) {
  FE a1 = s1.c[0], b1 = s1.c[1], c1 = s1.c[2];
  FE a2 = s2.c[0], b2 = s2.c[1], c2 = s2.c[2];
  FE u = K.sub(K.mul(a1, c2), K.mul(a2, c1));
  FE v = K.sub(K.mul(a1, b2), K.mul(a2, b1));
  FE w = K.sub(K.mul(b1, c2), K.mul(b2, c1));
  return K.sub(K.mul(u, u), K.mul(v, w));
}

}  // namespace qp
