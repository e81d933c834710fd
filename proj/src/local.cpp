#include "quadpencil/local.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "quadpencil/linalg.hpp"

namespace qp {

namespace {

void check_local_pair(const Ring& R, const RForm& Q1, const RForm& Q2) {
  if (Q1.n != Q2.n) fail(ErrorKind::DimensionMismatch, "pair forms have different sizes");
  const size_t t = static_cast<size_t>(tri_size(Q1.n));
  if (Q1.c.size() != t || Q2.c.size() != t) fail(ErrorKind::DimensionMismatch, "coefficient count does not match n");
  (void)R;
}

RMat convert_mat(const Ring& R, const RMat& A) {
  RMat B = A;
  for (auto& row : B)
    for (auto& x : row) x = R.convert(x);
  return B;
}

RVec convert_vec(const Ring& R, const RVec& v) {
  RVec w = v;
  for (auto& x : w) x = R.convert(x);
  return w;
}

RE random_ring_elem(const Ring& R, Rng& rng) {
  std::vector<mpz_class> c(R.m());
  const size_t words = mpz_sizeinbase(R.pN().get_mpz_t(), 2) / 64 + 2;
  for (auto& x : c) {
    x = 0;
    for (size_t w = 0; w < words; ++w) {
      x <<= 64;
      x += mpz_class(std::to_string(rng()));
    }
  }
  return R.from_coeffs(c);
}

RForm random_ring_form(const Ring& R, int n, Rng& rng) {
  RForm Q = zero_form(R, n);
  for (auto& c : Q.c) c = random_ring_elem(R, rng);
  return Q;
}

RMat diag_pi(const Ring& R, const std::vector<int>& e) {
  const int n = static_cast<int>(e.size());
  RMat D = zero_mat(R, n, n);
  for (int i = 0; i < n; ++i) D[i][i] = R.pi_pow(e[i]);
  return D;
}

// Coefficientwise division of a form by pi^k.
RForm form_div_pi(const Ring& R, const RForm& Q, int k) {
  RForm out = Q;
  for (auto& c : out.c) c = R.div_pi(c, k);
  return out;
}

// Newton iteration on coordinate j for Q(x) = 0; needs a unit partial derivative.
bool newton_single(const Ring& R, const RForm& Q, RVec& x, int j) {
  for (int it = 0; it < 200; ++it) {
    RE f = evaluate(R, Q, x);
    if (R.is_zero(f)) return true;
    RE g = gradient(R, Q, x)[j];
    if (!R.is_unit(g)) return false;
    x[j] = R.sub(x[j], R.mul(f, R.inv(g)));
  }
  return R.is_zero(evaluate(R, Q, x));
}

// Divides x by the largest power of pi dividing all entries.
RVec make_primitive(const Ring& R, RVec x) {
  int c = R.N();
  for (auto& e : x) c = std::min(c, R.valuation(e));
  if (c == 0 || c >= R.N()) return x;
  for (auto& e : x) e = R.div_pi(e, c);
  return x;
}

bool is_primitive(const Ring& R, const RVec& x) {
  for (auto& e : x)
    if (R.is_unit(e)) return true;
  return false;
}

// Calls f on normalized representatives of P^(n-1)(K) (first nonzero entry 1)
// until f returns true; returns whether it did.
bool for_each_projective(const Field& K, int n, const std::function<bool(const FVec&)>& f) {
  const FE Q = K.order();
  for (int lead = 0; lead < n; ++lead) {
    FVec x(n, 0);
    x[lead] = 1;
    while (true) {
      if (f(x)) return true;
      int i = lead + 1;
      for (; i < n; ++i) {
        if (++x[i] < Q) break;
        x[i] = 0;
      }
      if (i == n) break;
    }
  }
  return false;
}

long double projective_count(const Field& K, int n) {
  long double q = static_cast<long double>(K.order());
  return (std::pow(q, n) - 1) / (q - 1);
}

// Nontrivial common zero of two forms over K: exhaustive when the
// projective space has at most `budget` points, else random sampling.
std::optional<FVec> common_zero(const Field& K, const FForm& a, const FForm& b, std::uint64_t budget, Rng& rng) {
  const int n = a.n;
  if (n == 0) return std::nullopt;
  std::optional<FVec> out;
  if (projective_count(K, n) <= static_cast<long double>(budget)) {
    for_each_projective(K, n, [&](const FVec& x) {
      if (evaluate(K, a, x) == 0 && evaluate(K, b, x) == 0) {
        out = x;
        return true;
      }
      return false;
    });
    return out;
  }
  std::uniform_int_distribution<FE> d(0, K.order() - 1);
  for (std::uint64_t it = 0; it < budget; ++it) {
    FVec x(n);
    for (auto& e : x) e = d(rng);
    if (is_zero_vec(x)) continue;
    if (evaluate(K, a, x) == 0 && evaluate(K, b, x) == 0) return x;
  }
  return std::nullopt;
}

// Basis of K^n with the given vectors last (complement from unit vectors first).
FMat basis_with_last(const Field& K, const std::vector<FVec>& last, int n) {
  auto all = complete_basis(K, last, n);
  std::vector<FVec> order(all.begin() + last.size(), all.end());
  order.insert(order.end(), last.begin(), last.end());
  return from_columns(order, n);
}

RMat embed_block(const Ring& R, const RMat& B, int offset, int n) {
  RMat T = identity(R, n);
  for (size_t i = 0; i < B.size(); ++i)
    for (size_t j = 0; j < B.size(); ++j) T[offset + i][offset + j] = B[i][j];
  return T;
}

RForm sub_form(const Ring& R, const RForm& Q, int from, int count) {
  RForm out = zero_form(R, count);
  for (int i = 0; i < count; ++i)
    for (int j = i; j < count; ++j) coef(out, i, j) = coef(Q, from + i, from + j);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- pairs

LocalPair make_local_pair(const Ring& R, RForm Q1, RForm Q2) {
  check_local_pair(R, Q1, Q2);
  return LocalPair{R, convert_form(R, Q1), convert_form(R, Q2)};
}

LocalPair lift_pair(const Ring& R, const Field& K, const FForm& q1, const FForm& q2) {
  return make_local_pair(R, lift_form(R, K, q1), lift_form(R, K, q2));
}

std::pair<FForm, FForm> reduce_pair(const LocalPair& LP) {
  return {reduce_form(LP.R, LP.Q1), reduce_form(LP.R, LP.Q2)};
}

RForm at_precision(const Ring& R, const RForm& Q) { return convert_form(R, Q); }

std::vector<RE> local_pencil_F(const Ring& R, const RForm& Q1, const RForm& Q2) {
  return det_binary(R, matrix_of(R, Q1), matrix_of(R, Q2));
}

int binary_disc_valuation(const Ring& R, const std::vector<RE>& F) {
  const int n = static_cast<int>(F.size()) - 1;
  const int N = R.N();
  bool all_zero = true;
  for (auto& c : F) all_zero = all_zero && R.is_zero(c);
  if (all_zero) fail(ErrorKind::InsufficientPrecision, "binary form vanishes at working precision");
  if (n <= 1) return 0;
  const Ring Ri = R.with_precision(3 * N + 8);
  std::vector<RE> f;
  for (auto& c : F) f.push_back(Ri.convert(c));
  // Shift so that the leading coefficient has least valuation: G(x, y) = F(x, t x + y),
  // or the same for the reversed form.
  std::vector<RE> ts;
  for (int t = 0; t <= 2 * n + 1; ++t) ts.push_back(Ri.from_int(t));
  const Field& K = R.residue();
  for (FE t = 0; t < K.order() && t < 64; ++t) ts.push_back(Ri.lift(K, t));
  int best_v = Ri.N() + 1;
  std::vector<RE> best_f;
  RE best_t;
  for (int orient = 0; orient < 2; ++orient) {
    std::vector<RE> g = f;
    if (orient) std::reverse(g.begin(), g.end());
    for (auto& t : ts) {
      RE a0 = Ri.zero(), tp = Ri.one();
      for (int i = 0; i <= n; ++i) {
        a0 = Ri.add(a0, Ri.mul(g[i], tp));
        tp = Ri.mul(tp, t);
      }
      int v = Ri.valuation(a0);
      if (v < best_v) {
        best_v = v;
        best_f = g;
        best_t = t;
      }
    }
  }
  if (best_v > 2 * N) fail(ErrorKind::InsufficientPrecision, "no usable leading coefficient for the discriminant");
  // g(x) = sum_i c_i x^(n-i) (t x + 1)^i, univariate of degree n (index = power of x).
  std::vector<RE> g(n + 1, Ri.zero());
  std::vector<RE> pw{Ri.one()};  // (t x + 1)^i
  for (int i = 0; i <= n; ++i) {
    for (size_t k = 0; k < pw.size(); ++k) {
      int deg = n - i + static_cast<int>(k);
      g[deg] = Ri.add(g[deg], Ri.mul(best_f[i], pw[k]));
    }
    std::vector<RE> nx(pw.size() + 1, Ri.zero());
    for (size_t k = 0; k < pw.size(); ++k) {
      nx[k] = Ri.add(nx[k], pw[k]);
      nx[k + 1] = Ri.add(nx[k + 1], Ri.mul(pw[k], best_t));
    }
    pw = nx;
  }
  std::vector<RE> dg(n, Ri.zero());
  for (int k = 1; k <= n; ++k) dg[k - 1] = Ri.mul(g[k], Ri.from_int(k));
  // Sylvester matrix of g (degree n) and g' (degree n - 1), size 2n - 1.
  const int S = 2 * n - 1;
  RMat Syl = zero_mat(Ri, S, S);
  for (int row = 0; row < n - 1; ++row)
    for (int k = 0; k <= n; ++k) Syl[row][row + (n - k)] = g[k];
  for (int row = 0; row < n; ++row)
    for (int k = 0; k <= n - 1; ++k) Syl[n - 1 + row][row + (n - 1 - k)] = dg[k];
  RE res = det(Ri, Syl);
  int v = Ri.valuation(res) - best_v;
  if (Ri.valuation(res) >= Ri.N() || v >= N) fail(ErrorKind::InsufficientPrecision, "discriminant vanishes at working precision");
  return v;
}

int delta_valuation(const LocalPair& LP) { return binary_disc_valuation(LP.R, local_pencil_F(LP.R, LP.Q1, LP.Q2)); }

// ---------------------------------------------------------------- actions

TransformPair identity_transform(const Ring& R, int n) { return TransformPair{identity(R, 2), 0, identity(R, n), 0}; }

int det_valuation(const Ring& R, const RMat& A, int k) {
  const int n = static_cast<int>(A.size());
  int v = R.valuation(det(R, A));
  if (v >= R.N()) fail(ErrorKind::InsufficientPrecision, "determinant vanishes at working precision");
  return v - n * k;
}

int v_det_U(const Ring& R, const TransformPair& W) { return det_valuation(R, W.U, W.kU); }
int v_det_T(const Ring& R, const TransformPair& W) { return det_valuation(R, W.T, W.kT); }

int delta_change(const Ring& R, const TransformPair& W, int n) {
  return n * (n - 1) * v_det_U(R, W) + 4 * (n - 1) * v_det_T(R, W);
}

TransformPair compose(const Ring& R, const TransformPair& first, const TransformPair& second) {
  const int extra = first.kU + second.kU + first.kT + second.kT;
  const Ring Rw = R.with_precision(R.N() + extra);
  TransformPair out;
  out.U = convert_mat(R, mat_mul(Rw, convert_mat(Rw, second.U), convert_mat(Rw, first.U)));
  out.kU = first.kU + second.kU;
  out.T = convert_mat(R, mat_mul(Rw, convert_mat(Rw, first.T), convert_mat(Rw, second.T)));
  out.kT = first.kT + second.kT;
  return out;
}

LocalPair act(const LocalPair& LP, const TransformPair& W) {
  const int n = LP.n();
  if (W.U.size() != 2 || static_cast<int>(W.T.size()) != n) fail(ErrorKind::DimensionMismatch, "transform sizes do not match the pair");
  const int K = W.kU + 2 * W.kT;
  const Ring Rw = LP.R.with_precision(LP.N() + std::max(K, 0));
  RForm A = convert_form(Rw, LP.Q1), B = convert_form(Rw, LP.Q2);
  RMat U = convert_mat(Rw, W.U), T = convert_mat(Rw, W.T);
  RForm P1 = substitute(Rw, combine(Rw, U[0][0], A, U[0][1], B), T);
  RForm P2 = substitute(Rw, combine(Rw, U[1][0], A, U[1][1], B), T);
  for (RForm* P : {&P1, &P2})
    for (auto& c : P->c) c = K >= 0 ? Rw.div_pi(c, K) : Rw.mul_pi(c, -K);
  return LocalPair{LP.R, convert_form(LP.R, P1), convert_form(LP.R, P2)};
}

// ---------------------------------------------------------------- splitting

HenselResult hensel_split(const Ring& R, const RForm& Q, int s) {
  const int n = Q.n;
  if (s < 0 || 2 * s > n) fail(ErrorKind::ShapeViolation, "plane count out of range");
  // Reduction must be X1X2 + ... + X_{2s-1}X_{2s} + (form in the rest).
  for (int i = 0; i < 2 * s; ++i)
    for (int j = i; j < n; ++j) {
      FE want = (i % 2 == 0 && j == i + 1) ? 1 : 0;
      if (R.reduce(coef(Q, i, j)) != want) fail(ErrorKind::ShapeViolation, "reduction lacks the hyperbolic block");
    }
  std::vector<RVec> b(n);
  for (int i = 0; i < n; ++i) b[i] = unit_vec<Ring, RE>(R, n, i);
  for (int k = 0; k < s; ++k) {
    RVec& v = b[2 * k];
    RVec& w = b[2 * k + 1];
    // v + t w isotropic: Q(v) + t B(v,w) + t^2 Q(w) = 0, Newton from t = 0.
    RE qv = evaluate(R, Q, v), bvw = polar(R, Q, v, w), qw = evaluate(R, Q, w);
    RE t = R.zero();
    for (int it = 0; it < 200; ++it) {
      RE f = R.add(R.add(qv, R.mul(t, bvw)), R.mul(R.mul(t, t), qw));
      if (R.is_zero(f)) break;
      RE d = R.add(bvw, R.mul(R.from_int(2), R.mul(t, qw)));
      t = R.sub(t, R.mul(f, R.inv(d)));
    }
    for (int i = 0; i < n; ++i) v[i] = R.add(v[i], R.mul(t, w[i]));
    RE iv = R.inv(polar(R, Q, v, w));
    for (auto& x : w) x = R.mul(x, iv);
    RE q2 = evaluate(R, Q, w);
    for (int i = 0; i < n; ++i) w[i] = R.sub(w[i], R.mul(q2, v[i]));
    for (int j = 2 * k + 2; j < n; ++j) {
      RE cw = polar(R, Q, b[j], w), cv = polar(R, Q, b[j], v);
      for (int i = 0; i < n; ++i) b[j][i] = R.sub(R.sub(b[j][i], R.mul(cw, v[i])), R.mul(cv, w[i]));
    }
  }
  HenselResult out;
  out.T = from_columns(b, n);
  RForm full = substitute(R, Q, out.T);
  out.Q0 = sub_form(R, full, 2 * s, n - 2 * s);
  RForm expect = hyperbolic_form(R, s, n);
  for (int i = 2 * s; i < n; ++i)
    for (int j = i; j < n; ++j) coef(expect, i, j) = coef(full, i, j);
  if (!forms_equal(R, expect, full)) fail(ErrorKind::ShapeViolation, "lifted splitting failed its identity check");
  return out;
}

bool verify_form_split(const Ring& R, const RForm& Q, const FormSplit& S) {
  const int n = Q.n;
  if (static_cast<int>(S.T.size()) != n || S.W.n != n - 2 * S.s) return false;
  RForm full = substitute(R, Q, S.T);
  RE h = R.pi_pow(2 * S.e);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      RE want = R.zero();
      if (i >= 2 * S.s)
        want = coef(S.W, i - 2 * S.s, j - 2 * S.s);
      else if (i % 2 == 0 && j == i + 1)
        want = h;
      if (!R.eq(coef(full, i, j), want)) return false;
    }
  return R.valuation(det(R, S.T)) < R.N();
}

bool is_unit_square(const Ring& R, const RE& u) {
  if (!R.is_unit(u)) fail(ErrorKind::InvalidInput, "square test expects a unit");
  const Field& K = R.residue();
  if (R.p() != 2) return K.is_square(R.reduce(u));
  if (R.N() < 3) fail(ErrorKind::InsufficientPrecision, "unit square test needs precision 3 at p = 2");
  // x^2 = u mod 8 with x = a + 2b; the class depends on a mod 2 and b mod 2 only.
  const Ring R8 = R.with_precision(3);
  RE u8 = R8.convert(u);
  for (FE a = 1; a < K.order(); ++a) {
    RE A = R8.lift(K, a);
    RE A2 = R8.mul(A, A);
    for (FE bb = 0; bb < K.order(); ++bb) {
      RE B = R8.mul_pi(R8.lift(K, bb), 1);
      RE x = R8.add(A, B);
      if (R8.eq(R8.mul(x, x), u8)) return true;
    }
    (void)A2;
  }
  return false;
}

bool is_square_element(const Ring& R, const RE& a) {
  int v = R.valuation(a);
  if (v >= R.N()) fail(ErrorKind::InsufficientPrecision, "zero at working precision");
  if (v % 2) return false;
  const int need = R.p() == 2 ? 3 : 1;
  if (R.N() - v < need) fail(ErrorKind::InsufficientPrecision, "too few digits for the square class");
  const Ring Rs = R.with_precision(R.N() - v);
  return is_unit_square(Rs, Rs.convert(R.div_pi(a, v)));
}

std::optional<RVec> local_isotropic_vector(const Ring& R, const RForm& Q, int depth, ZeroSearch opts) {
  const int n = Q.n;
  const Field& K = R.residue();
  const int cap = depth > 0 ? depth : 2 * n + 4;
  const Ring Ri = R.with_precision(R.N() + 2 * cap + 2);
  RForm Qc = convert_form(Ri, Q);
  RMat Tacc = identity(Ri, n);
  for (int level = 0; level <= cap; ++level) {
    FForm qb = reduce_form(Ri, Qc);
    if (is_zero_form(K, qb)) {
      if (is_zero_form(Ri, Qc)) return std::nullopt;
      Qc = form_div_pi(Ri, Qc, 1);
      continue;
    }
    if (auto z = nonsingular_zero(K, qb, opts)) {
      RVec x;
      for (auto e : *z) x.push_back(Ri.lift(K, e));
      FVec g = gradient(K, qb, *z);
      int j = 0;
      while (g[j] == 0) ++j;
      if (!newton_single(Ri, Qc, x, j)) return std::nullopt;
      RVec X = make_primitive(Ri, mat_vec(Ri, Tacc, x));
      RVec out = convert_vec(R, X);
      if (!is_primitive(R, out) || !R.is_zero(evaluate(R, Q, out))) return std::nullopt;
      return out;
    }
    // Every zero reduces into the vertex space: scale the complement by pi.
    auto V = vertex_space(K, qb);
    const int k = n - static_cast<int>(V.size());
    RMat Ts = lift_mat(Ri, K, basis_with_last(K, V, n));
    std::vector<int> e(n, 0);
    for (int i = 0; i < k; ++i) e[i] = 1;
    RMat step = mat_mul(Ri, Ts, diag_pi(Ri, e));
    Qc = form_div_pi(Ri, substitute(Ri, Qc, step), 1);
    Tacc = mat_mul(Ri, Tacc, step);
  }
  return std::nullopt;
}

namespace {

struct Plane {
  RVec x, y;
  int k = 0;  // Q(a x + b y) = pi^(2k) a b
};

// One hyperbolic plane of Qc (k variables) plus a basis (k x (k-2)) of its
// orthogonal complement.
std::optional<std::pair<Plane, RMat>> extract_plane(const Ring& R, const RForm& Qc, int limit, ZeroSearch opts) {
  const int k = Qc.n;
  const Field& K = R.residue();
  if (k < 2) return std::nullopt;
  FForm qb = reduce_form(R, Qc);
  SplitDecomposition sd = split_hyperbolic(K, qb, opts);
  if (sd.s >= 1) {
    RMat T1 = lift_mat(R, K, sd.T);
    HenselResult h = hensel_split(R, substitute(R, Qc, T1), 1);
    RMat B = mat_mul(R, T1, h.T);
    Plane P{column(B, 0), column(B, 1), 0};
    RMat C(k, RVec(k - 2));
    for (int i = 0; i < k; ++i)
      for (int j = 2; j < k; ++j) C[i][j - 2] = B[i][j];
    return std::make_pair(P, C);
  }
  auto xo = local_isotropic_vector(R, Qc, 0, opts);
  if (!xo) return std::nullopt;
  RVec x = *xo;
  RVec g = gradient(R, Qc, x);
  int kv = R.N(), j0 = -1;
  for (int j = 0; j < k; ++j) {
    int v = R.valuation(g[j]);
    if (v < kv) {
      kv = v;
      j0 = j;
    }
  }
  if (j0 < 0 || 2 * kv >= limit) return std::nullopt;
  RVec y = unit_vec<Ring, RE>(R, k, j0);
  y[j0] = R.inv(R.div_pi(g[j0], kv));
  // y'' = pi^k y - Q(y) x: isotropic with B(x, y'') = pi^(2k).
  RE qy = evaluate(R, Qc, y);
  RVec yy(k);
  for (int i = 0; i < k; ++i) yy[i] = R.sub(R.mul_pi(y[i], kv), R.mul(qy, x[i]));
  // Rows (i1, i2) with the least valuation of the 2x2 minor of [x y''].
  int bi = -1, bj = -1, bv = R.N();
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      RE m = R.sub(R.mul(x[i], yy[j]), R.mul(x[j], yy[i]));
      int v = R.valuation(m);
      if (v < bv) {
        bv = v;
        bi = i;
        bj = j;
      }
    }
  if (bi < 0) return std::nullopt;
  RMat C(k, RVec());
  RE h = R.pi_pow(2 * kv);
  for (int j = 0; j < k; ++j) {
    if (j == bi || j == bj) continue;
    RVec u = unit_vec<Ring, RE>(R, k, j);
    RE cy = polar(R, Qc, u, yy), cx = polar(R, Qc, u, x);
    RVec col(k);
    for (int i = 0; i < k; ++i) col[i] = R.sub(R.sub(R.mul(h, u[i]), R.mul(cy, x[i])), R.mul(cx, yy[i]));
    col = make_primitive(R, col);
    for (int i = 0; i < k; ++i) C[i].push_back(col[i]);
  }
  return std::make_pair(Plane{x, yy, kv}, C);
}

}  // namespace

std::optional<FormSplit> local_split(const Ring& R0, const RForm& Q0, int s, ZeroSearch opts) {
  const int n = Q0.n;
  const Field& K = R0.residue();
  if (2 * s > n) return std::nullopt;
  FForm qb = reduce_form(R0, Q0);
  SplitDecomposition sd = split_hyperbolic(K, qb, opts);
  if (sd.s >= s) {
    RMat T1 = lift_mat(R0, K, sd.T);
    HenselResult h = hensel_split(R0, substitute(R0, Q0, T1), s);
    FormSplit out{s, 0, mat_mul(R0, T1, h.T), h.Q0};
    if (!verify_form_split(R0, Q0, out)) fail(ErrorKind::ShapeViolation, "lifted split failed verification");
    return out;
  }
  // Complements are made primitive by division, so work with spare digits.
  const Ring R = R0.with_precision(2 * R0.N() + 16);
  const RForm Q = convert_form(R, Q0);
  RMat Tacc = identity(R, n);
  RForm Qc = Q;
  std::vector<Plane> planes;
  for (int step = 0; step < s; ++step) {
    auto ex = extract_plane(R, Qc, R0.N(), opts);
    if (!ex) return std::nullopt;
    auto& [P, C] = *ex;
    planes.push_back(Plane{mat_vec(R, Tacc, P.x), mat_vec(R, Tacc, P.y), P.k});
    Qc = substitute(R, Qc, C);
    Tacc = mat_mul(R, Tacc, C);
  }
  int e = 0;
  for (auto& P : planes) e = std::max(e, P.k);
  if (4 * e >= R0.N()) fail(ErrorKind::InsufficientPrecision, "plane scale too large for the working precision");
  std::vector<RVec> cols;
  for (auto& P : planes) {
    RVec x = P.x;
    for (auto& c : x) c = R.mul_pi(c, 2 * (e - P.k));
    cols.push_back(x);
    cols.push_back(P.y);
  }
  for (int j = 0; j < n - 2 * s; ++j) cols.push_back(column(Tacc, j));
  FormSplit out{s, e, convert_mat(R0, from_columns(cols, n)), convert_form(R0, Qc)};
  if (!verify_form_split(R0, Q0, out)) return std::nullopt;
  return out;
}

FormSplit split_by_nonsquare_det(const Ring& R, const RForm& Q) {
  if (Q.n != 8) fail(ErrorKind::PreconditionViolated, "nonsquare determinant splitting is for 8 variables");
  RE d = det(R, matrix_of(R, Q));
  if (is_square_element(R, d)) fail(ErrorKind::SquareDeterminant, "determinant is a square");
  auto S = local_split(R, Q, 3);
  if (!S) fail(ErrorKind::InsufficientPrecision, "three planes not found at working precision");
  return *S;
}

bool verify_certificate(const LocalPair& LP, const SplitCertificate& C) {
  const Ring& R = LP.R;
  const int n = LP.n();
  const FormSplit& S = C.split;
  if (S.s != 3 || S.W.n != n - 6 || static_cast<int>(S.T.size()) != n) return false;
  if (R.is_zero(C.a) && R.is_zero(C.b)) return false;
  if (4 * S.e >= R.N()) return false;
  std::vector<RVec> t(n, RVec(n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) t[j][i] = S.T[i][j];
  auto val = [&](const RVec& x) { return R.add(R.mul(C.a, evaluate(R, LP.Q1, x)), R.mul(C.b, evaluate(R, LP.Q2, x))); };
  RE h = R.pi_pow(2 * S.e);
  std::vector<RE> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = val(t[i]);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      RE got = diag[i];
      if (j != i) {
        RVec s(n);
        for (int k = 0; k < n; ++k) s[k] = R.add(t[i][k], t[j][k]);
        got = R.sub(R.sub(val(s), diag[i]), diag[j]);
      }
      RE want = R.zero();
      if (i >= 6)
        want = coef(S.W, i - 6, j - 6);
      else if (i % 2 == 0 && j == i + 1)
        want = h;
      if (!R.eq(got, want)) return false;
    }
  return R.valuation(det(R, S.T)) < R.N();
}

// ---------------------------------------------------------------- minimization

namespace {

struct Frame8 {
  RMat T1;   // lifted residue change of variables
  int R = 0;  // essential variable count of the reduction
};

// Columns: complement of the common vertex space, then the vertex space.
Frame8 vertex_frame(const LocalPair& LP) {
  auto [q1, q2] = reduce_pair(LP);
  const Field& K = LP.R.residue();
  auto V = common_vertex_space(K, q1, q2);
  return Frame8{lift_mat(LP.R, K, basis_with_last(K, V, LP.n())), LP.n() - static_cast<int>(V.size())};
}

std::optional<Witness> member_move(const LocalPair& LP) {
  auto [q1, q2] = reduce_pair(LP);
  const Field& K = LP.R.residue();
  const Ring& R = LP.R;
  const int n = LP.n();
  TransformPair W = identity_transform(R, n);
  W.kU = 1;
  if (is_zero_form(K, q1)) {
    W.U = {{R.one(), R.zero()}, {R.zero(), R.pi_pow(1)}};
  } else if (is_zero_form(K, q2)) {
    W.U = {{R.pi_pow(1), R.zero()}, {R.zero(), R.one()}};
  } else {
    // a q1 + b q2 = 0 with a = 1: q1 = -b q2.
    int i0 = 0;
    while (q1.c[i0] == 0) ++i0;
    if (q2.c[i0] == 0) return std::nullopt;
    FE b = K.neg(K.div(q1.c[i0], q2.c[i0]));
    if (!is_zero_form(K, combine(K, FE{1}, q1, b, q2))) return std::nullopt;
    W.U = {{R.one(), R.lift(K, b)}, {R.zero(), R.pi_pow(1)}};
  }
  return Witness{"member", W};
}

TransformPair scaled_move(const Ring& R, const RMat& T1, const std::vector<int>& te, int ku) {
  TransformPair W;
  W.U = identity(R, 2);
  W.kU = ku;
  W.T = mat_mul(R, T1, diag_pi(R, te));
  W.kT = 0;
  return W;
}

// Witness from a 5-dimensional subspace on which both reductions vanish.
std::optional<Witness> isotropic_space_move(const LocalPair& LP, const std::vector<FVec>& Wsp) {
  const Field& K = LP.R.residue();
  const int n = LP.n();
  auto [q1, q2] = reduce_pair(LP);
  for (size_t i = 0; i < Wsp.size(); ++i) {
    if (evaluate(K, q1, Wsp[i]) || evaluate(K, q2, Wsp[i])) return std::nullopt;
    for (size_t j = i + 1; j < Wsp.size(); ++j)
      if (polar(K, q1, Wsp[i], Wsp[j]) || polar(K, q2, Wsp[i], Wsp[j])) return std::nullopt;
  }
  const int d = static_cast<int>(Wsp.size());
  if (d < n - 3) return std::nullopt;
  std::vector<FVec> last(Wsp.begin(), Wsp.begin() + (n - 3));
  RMat T1 = lift_mat(LP.R, K, basis_with_last(K, last, n));
  std::vector<int> te(n, 0);
  te[0] = te[1] = te[2] = 1;
  return Witness{"notmin", scaled_move(LP.R, T1, te, 1)};
}

// Rows of the inverse of a field matrix (the coordinate functionals).
FMat inverse_or_throw(const Field& K, const FMat& A) {
  auto I = inverse(K, A);
  if (!I) fail(ErrorKind::SingularTransform, "transform is singular");
  return *I;
}

// Peeling construction: r <= 4 < R gives linear forms l_i with both
// reductions in the ideal (l_1, l_2, l_3).
std::optional<std::vector<FVec>> peel_isotropic_space(const Field& K, const FForm& q1, const FForm& q2) {
  const int n = q1.n;
  try {
    PeelResult P = peel_r2(K, q1, q2);
    FMat Tinv = inverse_or_throw(K, P.T);
    std::vector<FVec> funcs{Tinv[P.R - 2]};
    const int m = P.R - 2;
    const int R34 = big_R(K, P.q3, P.q4);
    FMat inner;  // functionals on the first m peel coordinates
    if (R34 <= 2) {
      auto V = common_vertex_space(K, P.q3, P.q4);
      FMat B = basis_with_last(K, V, m);
      FMat Bi = inverse_or_throw(K, B);
      for (int i = 0; i < R34; ++i) inner.push_back(Bi[i]);
    } else {
      PeelResult P2 = peel_r2(K, P.q3, P.q4);
      FMat B2i = inverse_or_throw(K, P2.T);
      inner.push_back(B2i[P2.R - 2]);
    }
    for (auto& row : inner) {
      FVec full(n, 0);
      for (int i = 0; i < m; ++i) full[i] = row[i];
      // functional on original coordinates: full * Tinv
      FVec f(n, 0);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) f[j] = K.add(f[j], K.mul(full[i], Tinv[i][j]));
      funcs.push_back(f);
    }
    auto W = kernel(K, funcs, n);
    return W;
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Depth-first search for a common totally isotropic subspace of dimension d,
// vectors chosen in increasing enumeration order; bounded by `budget` evaluations.
std::optional<std::vector<FVec>> search_isotropic_space(const Field& K, const FForm& q1, const FForm& q2, int d, std::uint64_t budget) {
  const int n = q1.n;
  std::vector<FVec> pts;
  std::uint64_t work = 0;
  if (projective_count(K, n) > static_cast<long double>(budget)) return std::nullopt;
  for_each_projective(K, n, [&](const FVec& x) {
    ++work;
    if (evaluate(K, q1, x) == 0 && evaluate(K, q2, x) == 0) pts.push_back(x);
    return false;
  });
  std::vector<FVec> cur;
  std::function<bool(size_t)> dfs = [&](size_t from) -> bool {
    if (static_cast<int>(cur.size()) == d) return true;
    for (size_t i = from; i < pts.size(); ++i) {
      if (++work > budget) return false;
      const FVec& v = pts[i];
      bool ok = true;
      for (auto& w : cur)
        if (polar(K, q1, v, w) || polar(K, q2, v, w)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      std::vector<FVec> test = cur;
      test.push_back(v);
      if (rank(K, test) != static_cast<int>(test.size())) continue;
      cur.push_back(v);
      if (dfs(i + 1)) return true;
      cur.pop_back();
      if (work > budget) return false;
    }
    return false;
  };
  if (dfs(0)) return cur;
  return std::nullopt;
}

// A common totally isotropic 5-space in 8 variables contains the vertex of
// every member of rank 5 or 6 (such a member has no larger isotropic space),
// hence their span S. The remainder is searched in the common orthogonal
// complement of S modulo S.
std::optional<std::vector<FVec>> vertex_span_isotropic_space(const Field& K, const FForm& q1, const FForm& q2, std::uint64_t budget) {
  const int n = q1.n, d = 5;
  std::vector<FVec> S;
  auto add_independent = [&](std::vector<FVec>& basis, const FVec& v) {
    auto test = basis;
    test.push_back(v);
    if (rank(K, test) == static_cast<int>(test.size())) basis = test;
  };
  for (FE t = 0; t <= K.order(); ++t) {
    FForm m = t < K.order() ? combine(K, FE{1}, q1, t, q2) : q2;
    const int rk = rank_of(K, m);
    if (rk >= 7) return std::nullopt;
    if (rk == 5 || rk == 6)
      for (auto& v : vertex_space(K, m)) add_independent(S, v);
  }
  if (S.empty()) return std::nullopt;
  for (size_t i = 0; i < S.size(); ++i) {
    if (evaluate(K, q1, S[i]) || evaluate(K, q2, S[i])) return std::nullopt;
    for (size_t j = i + 1; j < S.size(); ++j)
      if (polar(K, q1, S[i], S[j]) || polar(K, q2, S[i], S[j])) return std::nullopt;
  }
  if (static_cast<int>(S.size()) >= d) return std::vector<FVec>(S.begin(), S.begin() + d);
  FMat rows;
  const FMat M1 = matrix_of(K, q1), M2 = matrix_of(K, q2);
  for (auto& s : S) {
    rows.push_back(mat_vec(K, M1, s));
    rows.push_back(mat_vec(K, M2, s));
  }
  std::vector<FVec> C = S;
  for (auto& v : kernel(K, rows, n)) add_independent(C, v);
  C.erase(C.begin(), C.begin() + S.size());
  const int need = d - static_cast<int>(S.size());
  if (static_cast<int>(C.size()) < need) return std::nullopt;
  const FMat Cm = from_columns(C, n);
  auto rest = search_isotropic_space(K, substitute(K, q1, Cm), substitute(K, q2, Cm), need, budget);
  if (!rest) return std::nullopt;
  for (auto& y : *rest) S.push_back(mat_vec(K, Cm, y));
  return S;
}

}  // namespace

std::optional<Witness> nonmin_witness(const LocalPair& LP, ZeroSearch opts) {
  const Ring& R = LP.R;
  const Field& K = R.residue();
  const int n = LP.n();
  Rng rng(opts.seed);
  std::vector<Witness> cands;
  auto accept = [&](const Witness& w) -> bool {
    try {
      if (delta_change(R, w.W, n) >= 0) return false;
      act(LP, w.W);
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  if (auto w = member_move(LP); w && accept(*w)) return w;
  auto [q1, q2] = reduce_pair(LP);
  Frame8 fr = vertex_frame(LP);
  const int Rv = fr.R;
  if (Rv <= 3) {
    std::vector<int> te(n, 0);
    for (int i = 0; i < 3 && i < n; ++i) te[i] = 1;
    Witness w{"notmin", scaled_move(R, fr.T1, te, 1)};
    if (accept(w)) return w;
  }
  if (Rv < n) {
    // x8 shape: Q_i = G_i(X_1..X_R) + pi (cross) + pi H_i(X_{R+1}..X_n).
    RForm P1 = substitute(R, LP.Q1, fr.T1), P2 = substitute(R, LP.Q2, fr.T1);
    const int t = n - Rv;
    FForm h1 = reduce_form(R, form_div_pi(R, sub_form(R, P1, Rv, t), 1));
    FForm h2 = reduce_form(R, form_div_pi(R, sub_form(R, P2, Rv, t), 1));
    if (auto z = common_zero(K, h1, h2, 2000000, rng)) {
      RMat B = lift_mat(R, K, basis_with_last(K, {*z}, t));
      RMat T1 = mat_mul(R, fr.T1, embed_block(R, B, Rv, n));
      std::vector<int> te(n, 1);
      te[n - 1] = 0;
      Witness w{"x8", scaled_move(R, T1, te, 2)};
      if (accept(w)) return w;
    }
  }
  if (Rv == 4) {
    RForm P1 = substitute(R, LP.Q1, fr.T1), P2 = substitute(R, LP.Q2, fr.T1);
    FForm g1 = reduce_form(R, sub_form(R, P1, 0, 4)), g2 = reduce_form(R, sub_form(R, P2, 0, 4));
    if (auto z = common_zero(K, g1, g2, 2000000, rng)) {
      auto all = complete_basis(K, {*z}, 4);
      RMat B = lift_mat(R, K, from_columns(all, 4));
      RMat T1 = mat_mul(R, fr.T1, embed_block(R, B, 0, n));
      std::vector<int> te(n, 0);
      te[1] = te[2] = te[3] = 1;
      Witness w{"r4", scaled_move(R, T1, te, 1)};
      if (accept(w)) return w;
    }
  }
  if (n == 8 && Rv >= 5 && small_r(K, q1, q2) <= 6) {
    std::optional<std::vector<FVec>> Wsp;
    if (small_r(K, q1, q2) <= 4) Wsp = peel_isotropic_space(K, q1, q2);
    if (!Wsp || static_cast<int>(Wsp->size()) < 5) Wsp = vertex_span_isotropic_space(K, q1, q2, 4000000);
    if (!Wsp || static_cast<int>(Wsp->size()) < 5) Wsp = search_isotropic_space(K, q1, q2, 5, 4000000);
    if (Wsp && static_cast<int>(Wsp->size()) >= 5)
      if (auto w = isotropic_space_move(LP, *Wsp); w && accept(*w)) return w;
  }
  return std::nullopt;
}

MinimizeResult minimize(const LocalPair& LP, int max_steps) {
  MinimizeResult out;
  out.W = identity_transform(LP.R, LP.n());
  out.pair = LP;
  out.v_before = delta_valuation(LP);
  int v = out.v_before;
  for (int step = 0; step < max_steps; ++step) {
    auto w = nonmin_witness(out.pair);
    if (!w) {
      out.v_after = v;
      return out;
    }
    LocalPair next = act(out.pair, w->W);
    int v2 = delta_valuation(next);
    if (v2 != v + delta_change(LP.R, w->W, LP.n()))
      fail(ErrorKind::ShapeViolation, "discriminant bookkeeping disagrees with the move");
    out.W = compose(LP.R, out.W, w->W);
    out.pair = next;
    out.moves.push_back(w->move);
    v = v2;
  }
  out.v_after = v;
  out.catalog_minimal = nonmin_witness(out.pair) == std::nullopt;
  return out;
}

// ---------------------------------------------------------------- zeros and generation

bool is_local_zero(const LocalPair& LP, const RVec& x) {
  if (static_cast<int>(x.size()) != LP.n() || !is_primitive(LP.R, x)) return false;
  return LP.R.is_zero(evaluate(LP.R, LP.Q1, x)) && LP.R.is_zero(evaluate(LP.R, LP.Q2, x));
}

namespace {

// Two coordinates where the gradients of a residue common zero have a
// nonzero 2x2 minor.
std::optional<std::pair<int, int>> smooth_columns(const Field& K, const FForm& q1, const FForm& q2, const FVec& z) {
  FVec g1 = gradient(K, q1, z), g2 = gradient(K, q2, z);
  const int n = q1.n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (K.sub(K.mul(g1[i], g2[j]), K.mul(g1[j], g2[i])) != 0) return std::make_pair(i, j);
  return std::nullopt;
}

std::optional<RVec> lift_smooth_zero(const LocalPair& LP, const FVec& z, int i, int j) {
  const Ring& R = LP.R;
  const Field& K = R.residue();
  RVec x;
  for (auto e : z) x.push_back(R.lift(K, e));
  for (int it = 0; it < 200; ++it) {
    RE f1 = evaluate(R, LP.Q1, x), f2 = evaluate(R, LP.Q2, x);
    if (R.is_zero(f1) && R.is_zero(f2)) return x;
    RVec g1 = gradient(R, LP.Q1, x), g2 = gradient(R, LP.Q2, x);
    RE d = R.sub(R.mul(g1[i], g2[j]), R.mul(g1[j], g2[i]));
    if (!R.is_unit(d)) return std::nullopt;
    RE id = R.inv(d);
    // [di dj] = J^{-1} [f1 f2]
    RE di = R.mul(id, R.sub(R.mul(g2[j], f1), R.mul(g1[j], f2)));
    RE dj = R.mul(id, R.sub(R.mul(g1[i], f2), R.mul(g2[i], f1)));
    x[i] = R.sub(x[i], di);
    x[j] = R.sub(x[j], dj);
  }
  return std::nullopt;
}

}  // namespace

std::optional<RVec> smooth_local_zero(const LocalPair& LP, std::uint64_t budget, std::uint64_t seed) {
  const Field& K = LP.R.residue();
  auto [q1, q2] = reduce_pair(LP);
  const int n = LP.n();
  std::optional<RVec> out;
  auto try_point = [&](const FVec& z) {
    if (evaluate(K, q1, z) || evaluate(K, q2, z)) return false;
    auto c = smooth_columns(K, q1, q2, z);
    if (!c) return false;
    out = lift_smooth_zero(LP, z, c->first, c->second);
    return out.has_value();
  };
  if (projective_count(K, n) <= static_cast<long double>(budget)) {
    for_each_projective(K, n, try_point);
    return out;
  }
  Rng rng(seed);
  std::uniform_int_distribution<FE> d(0, K.order() - 1);
  for (std::uint64_t it = 0; it < budget; ++it) {
    // Random line through a random point: solve the first form on it, test the second.
    FVec u(n), v(n);
    for (auto& e : u) e = d(rng);
    for (auto& e : v) e = d(rng);
    FE a = evaluate(K, q1, u), b = polar(K, q1, u, v), c = evaluate(K, q1, v);
    if (!a && !b && !c) continue;
    for (auto [s, t] : binary_quadratic_zeros(K, a, b, c)) {
      FVec z(n);
      for (int i = 0; i < n; ++i) z[i] = K.add(K.mul(s, u[i]), K.mul(t, v[i]));
      if (!is_zero_vec(z) && try_point(z)) return out;
    }
  }
  return std::nullopt;
}

namespace {

std::pair<FForm, FForm> nested_pencil(const Field& K, int n, int r, int R, Rng& rng) {
  auto rnd = [&](int k) {
    FForm q = zero_form(K, k);
    for (auto& c : q.c) c = rng() % K.order();
    return q;
  };
  if (r <= 0) return {zero_form(K, n), zero_form(K, n)};
  if (R <= r) return {resize_form(K, rnd(r), n), resize_form(K, rnd(r), n)};
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
  auto [q1, q2] = nested_pencil(K, R - 2, r - 2, R - 2, rng);
  q1 = resize_form(K, q1, n);
  q2 = resize_form(K, q2, n);
  const int a = R - 2, b = R - 1;
  for (int j = 0; j <= a; ++j) coef(q1, j, a) = K.add(coef(q1, j, a), rng() % K.order());
  coef(q2, a, b) = 1;
  return {q1, q2};
}

FMat random_gl(const Field& K, int n, Rng& rng) {
  while (true) {
    FMat T(n, FVec(n));
    for (auto& row : T)
      for (auto& x : row) x = rng() % K.order();
    if (det(K, T) != 0) return T;
  }
}

}  // namespace

std::pair<FForm, FForm> random_profile_pencil(const Field& K, int n, int r, int R, Rng& rng) {
  if (R < r || R > n || r < 0) fail(ErrorKind::GenerationExhausted, "infeasible pencil profile");
  for (int attempt = 0; attempt < 200; ++attempt) {
    auto [q1, q2] = nested_pencil(K, n, r, R, rng);
    FMat U = random_gl(K, 2, rng), T = random_gl(K, n, rng);
    FForm g1 = substitute(K, combine(K, U[0][0], q1, U[0][1], q2), T);
    FForm g2 = substitute(K, combine(K, U[1][0], q1, U[1][1], q2), T);
    if (big_R(K, g1, g2) == R && small_r(K, g1, g2) == r) return {g1, g2};
  }
  fail(ErrorKind::GenerationExhausted, "pencil profile not reached");
}

LocalPair plant_pair(const Ring& R, std::uint64_t seed, const Profile& P, int n, int attempts) {
  const Field& K = R.residue();
  if (P.R < P.r || P.R > n) fail(ErrorKind::GenerationExhausted, "infeasible profile: R must satisfy r <= R <= n");
  Rng rng(seed);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    auto [q1, q2] = random_profile_pencil(K, n, P.r, P.R, rng);
    RForm Q1 = lift_form(R, K, q1), Q2 = lift_form(R, K, q2);
    RForm E1 = random_ring_form(R, n, rng), E2 = random_ring_form(R, n, rng);
    for (size_t i = 0; i < Q1.c.size(); ++i) {
      Q1.c[i] = R.add(Q1.c[i], R.mul_pi(E1.c[i], 1));
      Q2.c[i] = R.add(Q2.c[i], R.mul_pi(E2.c[i], 1));
    }
    if (P.zero) {
      // A residue common zero, smooth when one is found, made exact by a
      // pi-adically small correction along a unit coordinate.
      std::optional<FVec> z;
      std::optional<FVec> any;
      std::uniform_int_distribution<FE> d(0, K.order() - 1);
      for (int it = 0; it < 20000 && !z; ++it) {
        FVec u(n), v(n);
        for (auto& e : u) e = d(rng);
        for (auto& e : v) e = d(rng);
        FE a = evaluate(K, q1, u), b = polar(K, q1, u, v), c = evaluate(K, q1, v);
        if (!a && !b && !c) continue;
        for (auto [s, t] : binary_quadratic_zeros(K, a, b, c)) {
          FVec w(n);
          for (int i = 0; i < n; ++i) w[i] = K.add(K.mul(s, u[i]), K.mul(t, v[i]));
          if (is_zero_vec(w) || evaluate(K, q2, w)) continue;
          if (!any) any = w;
          if (smooth_columns(K, q1, q2, w)) {
            z = w;
            break;
          }
        }
      }
      if (!z) z = any;
      if (!z) continue;
      RVec x;
      for (auto e : *z) x.push_back(R.lift(K, e));
      int j = 0;
      while ((*z)[j] == 0) ++j;
      RE ij2 = R.inv(R.mul(x[j], x[j]));
      for (RForm* Q : {&Q1, &Q2}) {
        RE val = evaluate(R, *Q, x);
        coef(*Q, j, j) = R.sub(coef(*Q, j, j), R.mul(val, ij2));
      }
    }
    LocalPair LP{R, Q1, Q2};
    if (P.nonsingular) {
      try {
        delta_valuation(LP);
      } catch (const Error&) {
        continue;
      }
    }
    return LP;
  }
  fail(ErrorKind::GenerationExhausted, "no pair met the profile");
}

}  // namespace qp
