#include "quadpencil/splitter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "quadpencil/linalg.hpp"

namespace qp {

void CaseTrace::add(std::string lemma, std::string detail, std::map<std::string, int> inv) {
  steps.push_back(TraceStep{std::move(lemma), std::move(detail), std::move(inv)});
}

std::string CaseTrace::to_string() const {
  std::ostringstream os;
  for (auto& s : steps) {
    os << s.lemma << ": " << s.detail;
    for (auto& [k, v] : s.invariants) os << " " << k << "=" << v;
    os << "\n";
  }
  return os.str();
}

namespace {

void note(CaseTrace* t, std::string lemma, std::string detail, std::map<std::string, int> inv = {}) {
  if (t) t->add(std::move(lemma), std::move(detail), std::move(inv));
}

RForm sub_form(const Ring& R, const RForm& Q, int from, int count) {
  RForm out = zero_form(R, count);
  for (int i = 0; i < count; ++i)
    for (int j = i; j < count; ++j) coef(out, i, j) = coef(Q, from + i, from + j);
  return out;
}

RMat block_diag(const Ring& R, const RMat& A, const RMat& B) {
  const int a = static_cast<int>(A.size()), b = static_cast<int>(B.size());
  RMat M = zero_mat(R, a + b, a + b);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j) M[i][j] = A[i][j];
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < b; ++j) M[a + i][a + j] = B[i][j];
  return M;
}

RMat convert_mat(const Ring& R, const RMat& A) {
  RMat B = A;
  for (auto& row : B)
    for (auto& x : row) x = R.convert(x);
  return B;
}

FMat basis_with_last(const Field& K, const std::vector<FVec>& last, int n) {
  auto all = complete_basis(K, last, n);
  std::vector<FVec> order(all.begin() + last.size(), all.end());
  order.insert(order.end(), last.begin(), last.end());
  return from_columns(order, n);
}

// Canonical order on P^1(F): (1, t) for t = 0, 1, ... then (0, 1).
std::vector<std::pair<FE, FE>> projective_line(const Field& K) {
  std::vector<std::pair<FE, FE>> out;
  for (FE t = 0; t < K.order(); ++t) out.push_back({1, t});
  out.push_back({0, 1});
  return out;
}

void check_eight(const LocalPair& LP) {
  if (LP.n() != 8) fail(ErrorKind::PreconditionViolated, "the splitting procedure is for 8 variables");
}

void check_field(const LocalPair& LP, std::uint64_t need, const SplitOptions& opts, const char* what) {
  if (!opts.force && LP.R.residue().order() < need)
    fail(ErrorKind::PreconditionViolated, std::string(what) + ": residue field too small");
}

SplitCertificate checked(const LocalPair& LP, SplitCertificate C) {
  if (!verify_certificate(LP, C)) fail(ErrorKind::ShapeViolation, "constructed certificate failed verification");
  return C;
}

int det_valuation_of(const Ring& R, const RForm& Q) { return R.valuation(det(R, matrix_of(R, Q))); }

std::optional<SplitCertificate> try_nonsquare(const LocalPair& LP, const RE& a, const RE& b, bool& precision_hit) {
  const Ring& R = LP.R;
  RForm M = combine(R, a, LP.Q1, b, LP.Q2);
  int v = det_valuation_of(R, M);
  if (v >= R.N()) return std::nullopt;
  try {
    if (is_square_element(R, det(R, matrix_of(R, M)))) return std::nullopt;
    SplitCertificate C{a, b, split_by_nonsquare_det(R, M)};
    if (verify_certificate(LP, C)) return C;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InsufficientPrecision) precision_hit = true;
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------- member search

SplitCertificate member_search(const LocalPair& LP, const SplitOptions& opts, CaseTrace* trace) {
  check_eight(LP);
  const Ring& R = LP.R;
  const Field& K = R.residue();
  auto [q1, q2] = reduce_pair(LP);
  ZeroSearch zs{opts.seed, static_cast<int>(std::min<std::uint64_t>(opts.budget, 1u << 30))};
  const auto line = projective_line(K);
  bool precision_hit = false;
  // Residue split of three planes, lifted.
  for (auto [a, b] : line) {
    FForm m = combine(K, a, q1, b, q2);
    if (split_hyperbolic(K, m, zs).s < 3) continue;
    RE A = R.lift(K, a), B = R.lift(K, b);
    auto S = local_split(R, combine(R, A, LP.Q1, B, LP.Q2), 3, zs);
    if (!S) continue;
    note(trace, "member", "residue split lifted", {{"a", static_cast<int>(a)}, {"b", static_cast<int>(b)}});
    return checked(LP, SplitCertificate{A, B, *S});
  }
  // Nonsquare determinant.
  for (auto [a, b] : line) {
    if (auto C = try_nonsquare(LP, R.lift(K, a), R.lift(K, b), precision_hit)) {
      note(trace, "member", "nonsquare determinant", {{"a", static_cast<int>(a)}, {"b", static_cast<int>(b)}});
      return *C;
    }
  }
  // General local splitting through residue vertex descent.
  for (auto [a, b] : line) {
    RE A = R.lift(K, a), B = R.lift(K, b);
    try {
      auto S = local_split(R, combine(R, A, LP.Q1, B, LP.Q2), 3, zs);
      if (!S) continue;
      SplitCertificate C{A, B, *S};
      if (!verify_certificate(LP, C)) continue;
      note(trace, "member", "local split", {{"a", static_cast<int>(a)}, {"b", static_cast<int>(b)}, {"e", S->e}});
      return C;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientPrecision) throw;
      precision_hit = true;
    }
  }
  // Members pi-adically close to a residue root of F, of odd determinant valuation.
  auto F = pencil_F(K, q1, q2);
  for (auto [a, b] : line) {
    if (eval_binary(K, F, a, b) != 0) continue;
    for (int k = 1; 4 * k < R.N(); ++k) {
      RE A = R.lift(K, a), B = R.lift(K, b);
      if (a == 1)
        B = R.add(B, R.pi_pow(k));
      else
        A = R.add(A, R.pi_pow(k));
      if (auto C = try_nonsquare(LP, A, B, precision_hit)) {
        note(trace, "member", "perturbed root, nonsquare determinant",
             {{"a", static_cast<int>(a)}, {"b", static_cast<int>(b)}, {"k", k}});
        return *C;
      }
    }
  }
  if (precision_hit) fail(ErrorKind::InsufficientPrecision, "member search ran out of precision");
  fail(ErrorKind::SearchExhausted, "no member splitting off three planes was found");
}

// ---------------------------------------------------------------- cases

SplitCertificate case_r7(const LocalPair& LP, const SplitOptions& opts, CaseTrace* trace) {
  check_eight(LP);
  check_field(LP, 8, opts, "case r7");
  const Ring& R = LP.R;
  const Field& K = R.residue();
  auto [q1, q2] = reduce_pair(LP);
  const int r = small_r(K, q1, q2);
  if (r < 7) fail(ErrorKind::PreconditionViolated, "case r7 needs generic residue rank at least 7");
  ZeroSearch zs{opts.seed, static_cast<int>(std::min<std::uint64_t>(opts.budget, 1u << 30))};
  for (auto [a, b] : projective_line(K)) {
    FForm m = combine(K, a, q1, b, q2);
    if (rank_of(K, m) < 7) continue;
    if (split_hyperbolic(K, m, zs).s < 3) continue;
    RE A = R.lift(K, a), B = R.lift(K, b);
    auto S = local_split(R, combine(R, A, LP.Q1, B, LP.Q2), 3, zs);
    if (!S) continue;
    note(trace, "r7", "member of residue rank >= 7, Hensel lift",
         {{"r", r}, {"a", static_cast<int>(a)}, {"b", static_cast<int>(b)}});
    return checked(LP, SplitCertificate{A, B, *S});
  }
  fail(ErrorKind::SearchExhausted, "no member of residue rank at least 7 over the residue field");
}

SplitCertificate case_R5(const LocalPair& LP, const SplitOptions& opts, CaseTrace* trace) {
  check_eight(LP);
  check_field(LP, 9, opts, "case R5");
  const Ring& R = LP.R;
  const Field& K = R.residue();
  auto [q1, q2] = reduce_pair(LP);
  if (big_R(K, q1, q2) != 5) fail(ErrorKind::PreconditionViolated, "case R5 needs R = 5");
  const Ring Ri = R.with_precision(R.N() + 4);
  // Vertex space last: Q_i = G_i(X1..X5) + pi (terms in X6..X8).
  RMat T0 = lift_mat(Ri, K, basis_with_last(K, common_vertex_space(K, q1, q2), 8));
  RForm P1 = substitute(Ri, convert_form(Ri, LP.Q1), T0), P2 = substitute(Ri, convert_form(Ri, LP.Q2), T0);
  FForm g1 = reduce_form(Ri, sub_form(Ri, P1, 0, 5)), g2 = reduce_form(Ri, sub_form(Ri, P2, 0, 5));
  auto h_of = [&](const RForm& P) {
    RForm H = sub_form(Ri, P, 5, 3);
    for (auto& c : H.c) c = Ri.div_pi(c, 1);
    return reduce_form(Ri, H);
  };
  FForm h1 = h_of(P1), h2 = h_of(P2);
  const int Rh = big_R(K, h1, h2), rh = small_r(K, h1, h2);
  if (Rh < 3 || rh < 3)
    fail(ErrorKind::HypothesisViolated, "degenerate pencil on the residue vertex space: the pair is not minimized");
  std::optional<FE> tsel;
  for (FE t = 0; t < K.order() && !tsel; ++t)
    if (rank_of(K, combine(K, FE(1), g1, t, g2)) == 5 && rank_of(K, combine(K, FE(1), h1, t, h2)) == 3) tsel = t;
  if (!tsel) fail(ErrorKind::PreconditionViolated, "no t with rank(g1 + t g2) = 5 and rank(h1 + t h2) = 3");
  RE tau = Ri.lift(K, *tsel);
  RForm Q = combine(Ri, Ri.one(), P1, tau, P2);
  SplitDecomposition sd = split_hyperbolic(K, combine(K, FE(1), g1, *tsel, g2));
  if (sd.s != 2) fail(ErrorKind::ShapeViolation, "rank 5 residue form without two planes");
  RMat T1 = block_diag(Ri, lift_mat(Ri, K, sd.T), identity(Ri, 3));
  HenselResult hs = hensel_split(Ri, substitute(Ri, Q, T1), 2);
  // J(X5..X8) = pi^-1 Q0(pi X5, X6, X7, X8) reduces to h.
  RMat D = identity(Ri, 4);
  D[0][0] = Ri.pi_pow(1);
  RForm J = substitute(Ri, hs.Q0, D);
  for (auto& c : J.c) c = Ri.div_pi(c, 1);
  SplitDecomposition sj = split_hyperbolic(K, reduce_form(Ri, J));
  if (sj.s < 1) fail(ErrorKind::ShapeViolation, "rescaled form has no residue plane");
  RMat T3 = lift_mat(Ri, K, sj.T);
  HenselResult hj = hensel_split(Ri, substitute(Ri, J, T3), 1);
  RMat T = mat_mul(Ri, mat_mul(Ri, T1, hs.T), block_diag(Ri, identity(Ri, 4), mat_mul(Ri, mat_mul(Ri, D, T3), hj.T)));
  // Q(T X) = X1X2 + X3X4 + pi X5X6 + pi J0; equalize the plane scales at pi^2.
  for (int i = 0; i < 8; ++i) {
    T[i][0] = Ri.mul_pi(T[i][0], 2);
    T[i][2] = Ri.mul_pi(T[i][2], 2);
    T[i][4] = Ri.mul_pi(T[i][4], 1);
  }
  RMat Tall = mat_mul(Ri, T0, T);
  RForm full = substitute(Ri, combine(Ri, Ri.one(), convert_form(Ri, LP.Q1), tau, convert_form(Ri, LP.Q2)), Tall);
  FormSplit S{3, 1, convert_mat(R, Tall), convert_form(R, sub_form(Ri, full, 6, 2))};
  note(trace, "R5", "two residue planes lifted, third from the rescaled vertex form",
       {{"t", static_cast<int>(*tsel)}, {"R_h", Rh}, {"r_h", rh}});
  return checked(LP, SplitCertificate{R.one(), R.convert(tau), S});
}

SplitCertificate case_R6(const LocalPair& LP, const SplitOptions& opts, CaseTrace* trace) {
  check_eight(LP);
  check_field(LP, 16, opts, "case R6");
  auto [q1, q2] = reduce_pair(LP);
  const Field& K = LP.R.residue();
  if (big_R(K, q1, q2) != 6) fail(ErrorKind::PreconditionViolated, "case R6 needs R = 6");
  note(trace, "R6", "member search", {{"r", small_r(K, q1, q2)}});
  return member_search(LP, opts, trace);
}

SplitCertificate case_R7(const LocalPair& LP, const SplitOptions& opts, CaseTrace* trace) {
  check_eight(LP);
  check_field(LP, 32, opts, "case R7");
  auto [q1, q2] = reduce_pair(LP);
  const Field& K = LP.R.residue();
  if (big_R(K, q1, q2) != 7) fail(ErrorKind::PreconditionViolated, "case R7 needs R = 7");
  note(trace, "R7", "member search", {{"r", small_r(K, q1, q2)}});
  return member_search(LP, opts, trace);
}

SplitCertificate case_R8(const LocalPair& LP, const SplitOptions& opts, CaseTrace* trace) {
  check_eight(LP);
  check_field(LP, 9, opts, "case R8");
  auto [q1, q2] = reduce_pair(LP);
  const Field& K = LP.R.residue();
  if (big_R(K, q1, q2) != 8) fail(ErrorKind::PreconditionViolated, "case R8 needs R = 8");
  const int r = small_r(K, q1, q2);
  if (r >= 7) return case_r7(LP, opts, trace);
  note(trace, "R8", "member search", {{"r", r}});
  return member_search(LP, opts, trace);
}

SplitCertificate case_rank2(const LocalPair& LP, const SplitOptions& opts, CaseTrace* trace) {
  check_eight(LP);
  check_field(LP, 9, opts, "case rank2");
  auto [q1, q2] = reduce_pair(LP);
  const Field& K = LP.R.residue();
  const int rk = rank_of(K, q2);
  if (rk > 2) fail(ErrorKind::PreconditionViolated, "case rank2 needs rank(q2) <= 2");
  note(trace, "rank2", "member search", {{"rank_q2", rk}, {"R", big_R(K, q1, q2)}});
  return member_search(LP, opts, trace);
}

// ---------------------------------------------------------------- the lemma

SplitCertificate the_lemma(const LocalPair& LP, CaseTrace* trace) {
  check_eight(LP);
  const Ring& R = LP.R;
  const int N = R.N();
  RForm S1 = sub_form(R, LP.Q1, 0, 5), S2 = sub_form(R, LP.Q2, 0, 5);
  const RForm H = hyperbolic_form(R, 2, 5);
  for (size_t i = 0; i < H.c.size(); ++i)
    if (R.reduce(R.sub(S1.c[i], H.c[i])) != 0)
      fail(ErrorKind::PreconditionViolated, "Q1 on the first five variables is not X1X2 + X3X4 mod pi");
  if (!R.is_unit(coef(S2, 4, 4))) fail(ErrorKind::PreconditionViolated, "Q2(e5) is not a unit");
  {
    const Field& K = R.residue();
    if (split_hyperbolic(K, reduce_form(R, LP.Q1)).s >= 3)
      if (auto S = local_split(R, LP.Q1, 3)) {
        note(trace, "thelemma", "Q1 already splits off three residue planes");
        return checked(LP, SplitCertificate{R.one(), R.zero(), *S});
      }
  }
  // (S1 - lambda S2)(T X) = X1X2 + X3X4 to precision; each step at least doubles f.
  RE lam = R.zero();
  RMat T = identity(R, 5);
  int iters = 0;
  while (true) {
    RForm S = substitute(R, combine(R, R.one(), S1, R.neg(lam), S2), T);
    int f = N;
    for (size_t i = 0; i < H.c.size(); ++i) f = std::min(f, R.valuation(R.sub(S.c[i], H.c[i])));
    if (f >= N) break;
    if (++iters > N + 2) fail(ErrorKind::InsufficientPrecision, "lambda iteration did not converge");
    RForm U = substitute(R, S2, T);
    RE d = coef(U, 4, 4);
    if (!R.is_unit(d)) fail(ErrorKind::ShapeViolation, "lost the unit X5^2 coefficient");
    RE k = R.mul(coef(S, 4, 4), R.inv(d));
    lam = R.add(lam, k);
    RForm V5 = form_sub(R, S, form_scale(R, U, k));
    HenselResult h = hensel_split(R, sub_form(R, V5, 0, 4), 2);
    RMat B = block_diag(R, h.T, identity(R, 1));
    RForm W = substitute(R, V5, B);
    RMat G = identity(R, 5);
    G[0][4] = R.neg(coef(W, 1, 4));
    G[1][4] = R.neg(coef(W, 0, 4));
    G[2][4] = R.neg(coef(W, 3, 4));
    G[3][4] = R.neg(coef(W, 2, 4));
    T = mat_mul(R, mat_mul(R, T, B), G);
  }
  note(trace, "thelemma", "lambda found", {{"iterations", iters}});
  RForm M = combine(R, R.one(), LP.Q1, R.neg(lam), LP.Q2);
  bool precision_hit = false;
  if (det_valuation_of(R, M) < N) {
    try {
      if (auto S = local_split(R, M, 3)) {
        SplitCertificate C{R.one(), R.neg(lam), *S};
        if (verify_certificate(LP, C)) {
          note(trace, "thelemma", "direct: Q1 - lambda Q2 nonsingular", {{"e", S->e}});
          return C;
        }
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientPrecision) throw;
      precision_hit = true;
    }
  }
  // Q1 + (pi^r - lambda) Q2 for r with odd determinant valuation.
  for (int r = 1; r < N; ++r) {
    RE b = R.sub(R.pi_pow(r), lam);
    RForm Mr = combine(R, R.one(), LP.Q1, b, LP.Q2);
    int v = det_valuation_of(R, Mr);
    if (v >= N) break;
    if (v % 2 == 0) continue;
    if (auto C = try_nonsquare(LP, R.one(), b, precision_hit)) {
      note(trace, "thelemma", "parity: odd determinant valuation", {{"r", r}, {"v", v}});
      return *C;
    }
  }
  (void)precision_hit;
  fail(ErrorKind::InsufficientPrecision, "no member of odd determinant valuation within precision");
}

SplitCertificate tl_plus(const LocalPair& LP, CaseTrace* trace) {
  check_eight(LP);
  const Ring& R = LP.R;
  const RForm H = hyperbolic_form(R, 2, 5);
  RForm S1 = sub_form(R, LP.Q1, 0, 5);
  for (size_t i = 0; i < H.c.size(); ++i)
    if (R.reduce(R.sub(S1.c[i], H.c[i])) != 0)
      fail(ErrorKind::PreconditionViolated, "Q1 on the first five variables is not X1X2 + X3X4 mod pi");
  const int v2 = R.valuation(coef(LP.Q2, 4, 4));
  if (v2 == 0) {
    note(trace, "tl+", "Q2(e5) a unit: direct");
    return the_lemma(LP, trace);
  }
  if (v2 >= 2) fail(ErrorKind::PreconditionViolated, "pi^2 divides Q2(e5)");
  if (R.valuation(coef(LP.Q1, 4, 4)) < 2) fail(ErrorKind::PreconditionViolated, "pi^2 does not divide Q1(e5)");
  for (int i = 0; i < 4; ++i)
    if (R.reduce(coef(LP.Q2, i, 4)) != 0)
      fail(ErrorKind::PreconditionViolated, "Q2 on the first five variables involves X5 mod pi");
  TransformPair W = identity_transform(R, 8);
  W.U = zero_mat(R, 2, 2);
  W.U[0][0] = R.one();
  W.U[1][1] = R.pi_pow(1);
  W.kU = 2;
  const int te[8] = {1, 1, 1, 1, 0, 3, 3, 3};
  for (int i = 0; i < 8; ++i) W.T[i][i] = R.pi_pow(te[i]);
  LocalPair V;
  try {
    V = act(LP, W);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NonIntegralResult) throw;
    fail(ErrorKind::PreconditionViolated, "rescaled pair is not integral");
  }
  // X_i -> X_i + c_i X5 clears L(X1..X4) X5 from V1 mod pi.
  RMat Sb = identity(R, 8);
  Sb[0][4] = R.neg(coef(V.Q1, 1, 4));
  Sb[1][4] = R.neg(coef(V.Q1, 0, 4));
  Sb[2][4] = R.neg(coef(V.Q1, 3, 4));
  Sb[3][4] = R.neg(coef(V.Q1, 2, 4));
  RForm V1 = substitute(R, V.Q1, Sb), V2 = substitute(R, V.Q2, Sb);
  RE d = coef(V2, 4, 4);
  if (!R.is_unit(d)) fail(ErrorKind::ShapeViolation, "rescaled Q2(e5) is not a unit");
  RE k = R.mul(coef(V1, 4, 4), R.inv(d));
  LocalPair L2 = make_local_pair(R, form_sub(R, V1, form_scale(R, V2, k)), V2);
  note(trace, "tl+", "rescaled by T = diag(pi,pi,pi,pi,1,pi^3,pi^3,pi^3), U = diag(pi^-2,pi^-1)");
  SplitCertificate C = the_lemma(L2, trace);
  // alpha (V1 - k V2) + beta V2 = pi^-2 (alpha Q1 + pi (beta - alpha k) Q2)(T Sb X).
  RE a = C.a, b = R.mul_pi(R.sub(C.b, R.mul(C.a, k)), 1);
  RMat Tall = mat_mul(R, mat_mul(R, W.T, Sb), C.split.T);
  RForm W2 = C.split.W;
  for (auto& c : W2.c) c = R.mul_pi(c, 2);
  return checked(LP, SplitCertificate{a, b, FormSplit{3, C.split.e + 1, Tall, W2}});
}

// ---------------------------------------------------------------- dispatch

std::pair<SplitCertificate, CaseTrace> split3h(const LocalPair& LP, const SplitOptions& opts) {
  check_eight(LP);
  CaseTrace trace;
  const Ring& R = LP.R;
  const Field& K = R.residue();
  if (K.order() < 32) {
    if (!opts.force) fail(ErrorKind::HypothesisViolated, "residue field too small (fewer than 32 elements)");
    trace.add("split3h", "forced below the residue field threshold", {{"q", static_cast<int>(K.order())}});
  }
  auto [q1, q2] = reduce_pair(LP);
  auto inv = invariants(K, q1, q2);
  trace.add("split3h", "residue invariants", {{"r", inv.r}, {"R", inv.R}, {"r_min", inv.r_min}});
  if (inv.r >= 7) {
    SplitCertificate C = case_r7(LP, opts, &trace);
    return {C, trace};
  }
  auto hypothesis = [&](const std::string& why) {
    if (!opts.force) fail(ErrorKind::HypothesisViolated, why);
    trace.add("split3h", "forced past: " + why);
  };
  if (opts.check_minimal) {
    if (auto w = nonmin_witness(LP)) hypothesis("pair is not catalog-minimal (witness " + w->move + ")");
    if (!smooth_local_zero(LP, opts.budget, opts.seed)) hypothesis("no smooth local zero certified");
  }
  if (inv.R <= 4 || inv.r <= 4) hypothesis("r <= 4 or R <= 4 on a minimized pair with a zero");
  if (opts.force && (inv.R <= 4 || inv.r <= 4)) return {member_search(LP, opts, &trace), trace};
  // A member of residue rank <= 2 becomes the second form.
  for (auto [a, b] : projective_line(K)) {
    if (rank_of(K, combine(K, a, q1, b, q2)) > 2) continue;
    // (Q1', Q2') = (c Q1 + d Q2, a Q1 + b Q2) with (c, d) completing a basis.
    RE A = R.lift(K, a), B = R.lift(K, b);
    RE C0 = a == 1 ? R.zero() : R.one(), D0 = a == 1 ? R.one() : R.zero();
    LocalPair L2 = make_local_pair(R, combine(R, C0, LP.Q1, D0, LP.Q2), combine(R, A, LP.Q1, B, LP.Q2));
    trace.add("split3h", "rank <= 2 member moved to second position", {{"a", static_cast<int>(a)}, {"b", static_cast<int>(b)}});
    SplitCertificate C = case_rank2(L2, opts, &trace);
    SplitCertificate out{R.add(R.mul(C.a, C0), R.mul(C.b, A)), R.add(R.mul(C.a, D0), R.mul(C.b, B)), C.split};
    return {checked(LP, out), trace};
  }
  SplitCertificate C;
  switch (inv.R) {
    case 5: {
      try {
        C = case_R5(LP, opts, &trace);
      } catch (const Error& e) {
        if (!opts.force || e.kind() == ErrorKind::InsufficientPrecision) throw;
        trace.add("R5", std::string("forced fallback after: ") + e.what());
        C = member_search(LP, opts, &trace);
      }
      break;
    }
    case 6:
      C = case_R6(LP, opts, &trace);
      break;
    case 7:
      C = case_R7(LP, opts, &trace);
      break;
    default:
      C = case_R8(LP, opts, &trace);
      break;
  }
  return {C, trace};
}

// ---------------------------------------------------------------- two planes over the residue field

bool is_two_planes(const Field& K, const FForm& q) {
  if (q.n != 4 || rank_of(K, q) != 4) return false;
  return split_hyperbolic(K, q).s == 2;
}

SevenLResult lemma_7l_pairs(const Field& K, const FForm& q1, const FForm& q2) {
  if (q1.n != 4 || q2.n != 4) fail(ErrorKind::PreconditionViolated, "two-plane pair search needs 4 variables");
  const FE want1[4] = {0, 1, 0, 0}, want2[4] = {0, 0, 1, 0};
  for (int j = 0; j < 4; ++j)
    if (coef(q1, 0, j) != want1[j] || coef(q2, 0, j) != want2[j])
      fail(ErrorKind::PreconditionViolated, "forms are not Y0Y1 + s1 and Y0Y2 + s2");
  if (coef(q1, 3, 3) == 0 && coef(q2, 3, 3) == 0) fail(ErrorKind::PreconditionViolated, "q1(e3) and q2(e3) both vanish");
  SevenLResult out;
  const FE q = K.order();
  // Every route reports the full classification of the members.
  for (FE a = 0; a < q; ++a)
    for (FE b = 0; b < q; ++b) {
      if (a == 0 && b == 0) continue;
      FForm m = combine(K, a, q1, b, q2);
      if (rank_of(K, m) < 4)
        ++out.singular_members;
      else if (is_two_planes(K, m))
        out.pairs.push_back({a, b});
      else
        ++out.nonsplit_members;
    }
  if (small_r(K, q1, q2) < 4) {
    SingularZero z = singular_common_zero_4(K, q1, q2);
    if (!z.full_rank && is_singular_common_zero(K, q1, q2, z.x)) {
      out.singular_zero = z.x;
      out.route = "sz";
      return out;
    }
  }
  // Normalized family: q1(e3) != 0 (swap roles with Y1 <-> Y2 otherwise),
  // q2(e3) = 0 via q2 + c q1 and Y2 -> Y2 - c Y1, then Y0 -> Y0 - lambda.
  FForm a1 = q1, a2 = q2;
  FMat Ptot = identity(K, 4);
  if (coef(a1, 3, 3) == 0) {
    FMat P = identity(K, 4);
    P[1][1] = P[2][2] = 0;
    P[1][2] = P[2][1] = 1;
    a1 = substitute(K, q2, P);
    a2 = substitute(K, q1, P);
    Ptot = P;
  }
  FE c = K.neg(K.div(coef(a2, 3, 3), coef(a1, 3, 3)));
  {
    FMat P = identity(K, 4);
    P[2][1] = K.neg(c);
    a2 = substitute(K, combine(K, FE(1), a2, c, a1), P);
    a1 = substitute(K, a1, P);
    Ptot = mat_mul(K, Ptot, P);
  }
  // a2 = Y0Y2 + Y2 lambda(Y1,Y2,Y3) + Y1 l(Y1,Y3).
  FMat P = identity(K, 4);
  P[0][1] = K.neg(coef(a2, 1, 2));
  P[0][2] = K.neg(coef(a2, 2, 2));
  P[0][3] = K.neg(coef(a2, 2, 3));
  a1 = substitute(K, a1, P);
  a2 = substitute(K, a2, P);
  Ptot = mat_mul(K, Ptot, P);
  const FE l1 = coef(a2, 1, 1), l3 = coef(a2, 1, 3);
  auto q3 = [&](int i, int j) { return coef(a1, i, j); };
  // l = 0 and rank(q3) <= 2: y0 = 0 with (y1, y2, y3) a vertex of q3.
  if (l1 == 0 && l3 == 0) {
    FForm f3 = zero_form(K, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) coef(f3, i, j) = q3(i + 1, j + 1);
    if (rank_of(K, f3) <= 2) {
      FVec v = vertex_space(K, f3).at(0);
      FVec x = mat_vec(K, Ptot, FVec{0, v[0], v[1], v[2]});
      if (is_singular_common_zero(K, q1, q2, x)) {
        out.singular_zero = x;
        out.route = "l0";
        return out;
      }
    }
  }
  for (FE a = 0; a < q; ++a) {
    if (rank_of(K, combine(K, FE(1), a1, a, a2)) < 4) continue;
    // f_a(U) = q3(-a, 1, U) - a^2 l(-a, U).
    FE na = K.neg(a), a2v = K.mul(a, a);
    FE A = q3(3, 3);
    FE B = K.sub(K.add(K.mul(na, q3(1, 3)), q3(2, 3)), K.mul(a2v, l3));
    FE C = K.add(K.add(K.mul(a2v, q3(1, 1)), K.mul(na, q3(1, 2))), q3(2, 2));
    C = K.sub(C, K.mul(a2v, K.mul(na, l1)));
    if (!binary_quadratic_zeros(K, A, B, C).empty()) ++out.good_a;
  }
  out.route = "pairs";
  if (out.pairs.size() >= 5 * (q - 1)) return out;
  // Exhaustive search for a singular common zero over P^3.
  for (int lead = 0; lead < 4 && !out.singular_zero; ++lead) {
    FVec x(4, 0);
    x[lead] = 1;
    while (true) {
      if (is_singular_common_zero(K, q1, q2, x)) {
        out.singular_zero = x;
        out.route = "search";
        break;
      }
      int i = lead + 1;
      for (; i < 4; ++i) {
        if (++x[i] < q) break;
        x[i] = 0;
      }
      if (i == 4) break;
    }
  }
  return out;
}

// ---------------------------------------------------------------- real case

Signature real_signature(const Eigen::MatrixXd& M, double eps) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  Signature s;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double l = es.eigenvalues()[i];
    if (l > eps)
      ++s.plus;
    else if (l < -eps)
      ++s.minus;
    else
      ++s.zero;
  }
  return s;
}

RealSplit real_split3h(const RealPencil& RP, int grid) {
  if (RP.A.rows() != 8 || RP.A.cols() != 8 || RP.B.rows() != 8 || RP.B.cols() != 8)
    fail(ErrorKind::DimensionMismatch, "real pencil needs 8 x 8 matrices");
  if (RP.A != RP.A.transpose() || RP.B != RP.B.transpose()) fail(ErrorKind::InvalidInput, "matrices must be symmetric");
  const double two_pi = 2 * std::numbers::pi;
  auto member = [&](double th) -> Eigen::MatrixXd { return std::sin(th) * RP.A + std::cos(th) * RP.B; };
  auto good = [](const Signature& s) { return s.zero == 0 && std::min(s.plus, s.minus) >= 3; };
  auto make = [&](double th, const Signature& s, bool refined) {
    RealSplit out;
    out.theta = std::fmod(th, two_pi);
    out.a = std::sin(th);
    out.b = std::cos(th);
    out.sig = s;
    out.member = member(th);
    out.refined = refined;
    return out;
  };
  // Sweep from theta = pi/2 (the member Q1) around the circle.
  std::vector<double> th(grid);
  std::vector<Signature> sg(grid);
  for (int k = 0; k < grid; ++k) {
    th[k] = std::numbers::pi / 2 + two_pi * k / grid;
    sg[k] = real_signature(member(th[k]), RP.eps);
    if (sg[k].zero >= 2) fail(ErrorKind::PreconditionViolated, "pencil looks singular: a member has two null eigenvalues");
  }
  for (int k = 0; k < grid; ++k)
    if (good(sg[k])) return make(th[k], sg[k], false);
  // Refine the intervals where the signature changes.
  for (int k = 0; k < grid; ++k) {
    const int k2 = (k + 1) % grid;
    const Signature& s1 = sg[k];
    const Signature& s2 = sg[k2];
    if (s1.plus == s2.plus && s1.minus == s2.minus) continue;
    double hi = k2 == 0 ? th[0] + two_pi : th[k2];
    // Bounded refinement: only the first levels are explored breadth-wise.
    std::vector<std::pair<double, double>> level{{th[k], hi}};
    for (int d = 0; d < 40 && !level.empty(); ++d) {
      std::vector<std::pair<double, double>> next;
      for (auto [lo, up] : level) {
        if (up - lo < 1e-12) continue;
        double mid = (lo + up) / 2;
        Signature s = real_signature(member(mid), RP.eps);
        if (good(s)) return make(mid, s, true);
        Signature sl = real_signature(member(lo), RP.eps), su = real_signature(member(up), RP.eps);
        if (sl.plus != s.plus || sl.minus != s.minus) next.push_back({lo, mid});
        if (su.plus != s.plus || su.minus != s.minus) next.push_back({mid, up});
      }
      if (next.size() > 64) next.resize(64);
      level = std::move(next);
    }
  }
  fail(ErrorKind::ToleranceAmbiguous, "no member with three positive and three negative eigenvalues resolved");
}

}  // namespace qp
