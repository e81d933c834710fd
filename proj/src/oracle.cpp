#include "quadpencil/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "quadpencil/brute.hpp"
#include "quadpencil/errors.hpp"
#include "quadpencil/pencil.hpp"
#include "quadpencil/splitter.hpp"

namespace qp {

namespace {

constexpr std::uint64_t kBudget = std::uint64_t{1} << 26;

// ---------------------------------------------------------------- driver

struct Outcome {
  bool accepted = false;
  std::optional<json> failure;
  std::map<std::string, double> mins, maxs, counts;
  void min(const std::string& k, double v) { mins[k] = mins.count(k) ? std::min(mins[k], v) : v; }
  void max(const std::string& k, double v) { maxs[k] = maxs.count(k) ? std::max(maxs[k], v) : v; }
  void count(const std::string& k, double v = 1) { counts[k] += v; }
};

using Check = std::function<Outcome(std::uint64_t index, Rng& rng)>;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t sat_pow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > (std::uint64_t{1} << 62) / std::max<std::uint64_t>(b, 1)) return std::uint64_t{1} << 62;
    r *= b;
  }
  return r;
}

void merge(LemmaReport& rep, std::map<std::string, double>& mins, std::map<std::string, double>& maxs, const Outcome& o) {
  for (auto& [k, v] : o.mins) mins[k] = mins.count(k) ? std::min(mins[k], v) : v;
  for (auto& [k, v] : o.maxs) maxs[k] = maxs.count(k) ? std::max(maxs[k], v) : v;
  for (auto& [k, v] : o.counts) rep.stats[k] += v;
}

// Exhaustive: indices 0..total-1. Sampled: indices until `trials` accepted or
// the draw cap is reached.
void drive(LemmaReport& rep, OracleMode mode, std::uint64_t total, std::uint64_t trials, std::uint64_t seed, int jobs,
           const Check& f) {
  if (mode == OracleMode::Exhaustive && total > kBudget)
    fail(ErrorKind::BudgetExceeded, rep.id + ": exhaustive enumeration of " + std::to_string(total) + " items exceeds 2^26");
  const std::uint64_t cap = mode == OracleMode::Exhaustive ? total : std::max<std::uint64_t>(trials * 5000, 1000000);
  jobs = std::max(1, jobs);
  const std::uint64_t block = 64 * static_cast<std::uint64_t>(jobs);
  std::map<std::string, double> mins, maxs;
  std::uint64_t failures_total = 0;
  std::uint64_t idx = 0;
  bool done = false;
  while (!done && idx < cap) {
    const std::uint64_t len = std::min(block, cap - idx);
    std::vector<Outcome> out(len);
    auto work = [&](int t) {
      for (std::uint64_t i = t; i < len; i += jobs) {
        Rng rng(mix(seed ^ mix(idx + i)));
        try {
          out[i] = f(idx + i, rng);
        } catch (const Error& e) {
          out[i] = Outcome{};
          out[i].accepted = true;
          out[i].failure = json{{"note", std::string("unexpected error: ") + e.what()}, {"index", idx + i}};
        }
      }
    };
    if (jobs == 1) {
      work(0);
    } else {
      std::vector<std::thread> th;
      for (int t = 0; t < jobs; ++t) th.emplace_back(work, t);
      for (auto& x : th) x.join();
    }
    for (std::uint64_t i = 0; i < len; ++i) {
      ++rep.draws;
      const Outcome& o = out[i];
      merge(rep, mins, maxs, o);
      if (o.accepted) {
        ++rep.trials;
        if (o.failure) {
          ++failures_total;
          if (rep.failures.size() < 100) {
            json d = *o.failure;
            d["lemma"] = rep.id;
            d["draw"] = idx + i;
            rep.failures.push_back(d);
          }
        }
      }
      if (mode == OracleMode::Sampled && rep.trials >= trials) {
        done = true;
        break;
      }
    }
    idx += len;
  }
  for (auto& [k, v] : mins) rep.stats["min_" + k] = v;
  for (auto& [k, v] : maxs) rep.stats["max_" + k] = v;
  if (failures_total) rep.stats["failures_total"] = static_cast<double>(failures_total);
  if (mode == OracleMode::Sampled && rep.trials < trials)
    rep.failures.push_back(json{{"lemma", rep.id},
                                {"note", "only " + std::to_string(rep.trials) + " of " + std::to_string(trials) +
                                             " requested instances met the hypotheses within the draw cap"}});
}

// ---------------------------------------------------------------- helpers

FE relem(const Field& K, Rng& rng) { return rng() % K.order(); }

FForm rform(const Field& K, int n, Rng& rng) {
  FForm q = zero_form(K, n);
  for (auto& c : q.c) c = relem(K, rng);
  return q;
}

FMat rgl(const Field& K, int n, Rng& rng) {
  while (true) {
    FMat T(n, FVec(n));
    for (auto& row : T)
      for (auto& x : row) x = relem(K, rng);
    if (det(K, T) != 0) return T;
  }
}

// Consumes digits of `code` in base #K.
FForm decode_form(const Field& K, int n, std::uint64_t& code) {
  FForm q = zero_form(K, n);
  for (auto& c : q.c) {
    c = code % K.order();
    code /= K.order();
  }
  return q;
}

FVec decode_vec(const Field& K, int n, std::uint64_t& code) {
  FVec v(n);
  for (auto& c : v) {
    c = code % K.order();
    code /= K.order();
  }
  return v;
}

RE ring_elem(const Ring& R, Rng& rng) {
  RE a = R.zero();
  const size_t bits = mpz_sizeinbase(R.pN().get_mpz_t(), 2) + 64;
  for (int i = 0; i < R.m(); ++i) {
    mpz_class v = 0;
    for (size_t b = 0; b < bits; b += 64) {
      v <<= 64;
      v += mpz_class(std::to_string(rng()));
    }
    a.c[i] = v % R.pN();
  }
  return R.from_coeffs(a.c);
}

RForm ring_form(const Ring& R, int n, Rng& rng) {
  RForm Q = zero_form(R, n);
  for (auto& c : Q.c) c = ring_elem(R, rng);
  return Q;
}

RMat ring_mat(const Ring& R, int r, int c, Rng& rng) {
  RMat A(r, RVec(c));
  for (auto& row : A)
    for (auto& x : row) x = ring_elem(R, rng);
  return A;
}

RMat ring_unimodular(const Ring& R, int n, Rng& rng) {
  while (true) {
    RMat A = ring_mat(R, n, n, rng);
    if (R.is_unit(det(R, A))) return A;
  }
}

int oracle_rank(const Field& K, const FForm& q) {
  if (sat_pow(K.order(), q.n) <= (std::uint64_t{1} << 16)) return brute_rank(K, q);
  return minor_rank(K, q);
}

// Definitional ranks where the enumeration oracle is cheap (GF(2), n <= 3),
// else the pencil module.
PencilRanks oracle_pencil(const Field& K, const FForm& q1, const FForm& q2) {
  if (q1.n <= 3 && K.order() == 2) return brute_pencil_ranks(K, q1, q2);
  auto inv = invariants(K, q1, q2);
  return PencilRanks{inv.r, inv.R, inv.r_min};
}

json dump_forms(const Field& K, const std::vector<FForm>& forms, const std::string& note) {
  return json{{"note", note}, {"instance", to_json(make_form_file(K, forms))}};
}

json dump_forms(const Ring& R, const std::vector<RForm>& forms, const std::string& note) {
  return json{{"note", note}, {"instance", to_json(make_form_file(R, forms))}};
}

// q only involves variables with 0-based index < k.
bool supported_below(const FForm& q, int k) {
  for (int i = 0; i < q.n; ++i)
    for (int j = i; j < q.n; ++j)
      if (j >= k && coef(q, i, j) != 0) return false;
  return true;
}

FForm sub_block(const Field& K, const FForm& q, int off, int k) {
  FForm s = zero_form(K, k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) coef(s, i, j) = coef(q, off + i, off + j);
  return s;
}

bool is_singular_zero(const Field& K, const FForm& q1, const FForm& q2, const FVec& x) {
  if (static_cast<int>(x.size()) != q1.n || is_zero_vec(x)) return false;
  if (evaluate(K, q1, x) != 0 || evaluate(K, q2, x) != 0) return false;
  FMat G = {gradient(K, q1, x), gradient(K, q2, x)};
  return rank(K, G) <= 1;
}

// (U, T) acting on the pencil: member combination then substitution, with
// the substitution recomputed by polarization.
std::pair<FForm, FForm> recompute(const Field& K, const FMat& U, const FMat& T, const FForm& q1, const FForm& q2) {
  return {form_at_columns(K, combine(K, U[0][0], q1, U[0][1], q2), T),
          form_at_columns(K, combine(K, U[1][0], q1, U[1][1], q2), T)};
}

// Integrality of (Q1, Q2)^U_T and |det U|^2 |det T| > 1, checked by
// re-evaluation.
std::optional<std::string> check_witness(const LocalPair& LP, const TransformPair& W) {
  const Ring& R = LP.R;
  const int n = LP.n();
  if (W.U.size() != 2 || static_cast<int>(W.T.size()) != n) return "witness has the wrong dimensions";
  RE dU = det(R, W.U), dT = det(R, W.T);
  if (R.is_zero(dU) || R.is_zero(dT)) return "witness is singular at precision";
  const int vU = R.valuation(dU) - 2 * W.kU, vT = R.valuation(dT) - n * W.kT;
  if (2 * vU + vT >= 0) return "witness fails |det U|^2 |det T| > 1";
  const int k = W.kU + 2 * W.kT;
  if (k >= R.N()) return "witness exceeds the working precision";
  RForm A = form_at_columns(R, LP.Q1, W.T), B = form_at_columns(R, LP.Q2, W.T);
  for (int i = 0; i < 2; ++i) {
    RForm C = form_add(R, form_scale(R, A, W.U[i][0]), form_scale(R, B, W.U[i][1]));
    for (auto& c : C.c)
      if (R.valuation(c) < k) return "transformed pair is not integral";
  }
  return std::nullopt;
}

Field need_field(const OracleCtx& ctx) {
  if (!ctx.field.valid()) fail(ErrorKind::InvalidInput, "oracle context has no field");
  return ctx.field;
}

// ---------------------------------------------------------------- lemmas

void lemma_add(LemmaReport& rep, const OracleCtx& ctx, OracleMode mode, std::uint64_t trials, std::uint64_t seed) {
  const Field K = need_field(ctx);
  const std::uint64_t q = K.order();
  if (mode == OracleMode::Exhaustive) {
    const int n = ctx.n ? ctx.n : 3;
    const std::uint64_t total = sat_pow(q, tri_size(n) + n);
    drive(rep, mode, total, 0, seed, ctx.jobs, [&](std::uint64_t idx, Rng&) {
      Outcome o;
      FVec P = decode_vec(K, n, idx);
      FForm f = decode_form(K, n, idx);
      if (is_zero_vec(P) || P[n - 1] != 0 || evaluate(K, f, P) != 0) return o;
      FVec g = gradient(K, f, P);
      for (int i = 0; i + 1 < n; ++i)
        if (g[i] != 0) return o;
      if (g[n - 1] == 0) return o;
      o.accepted = true;
      int r = oracle_rank(K, f), r2 = oracle_rank(K, resize_form(K, f, n - 1));
      if (r2 != r - 2) o.failure = dump_forms(K, {f}, "rank " + std::to_string(r) + " restricts to rank " + std::to_string(r2));
      return o;
    });
    return;
  }
  drive(rep, mode, 0, trials, seed, ctx.jobs, [&](std::uint64_t, Rng& rng) {
    Outcome o;
    const int n = ctx.n ? ctx.n : 3 + static_cast<int>(rng() % 4);
    FForm f = rform(K, n, rng);
    std::optional<FVec> P;
    for (int t = 0; t < 64 && !P; ++t) {
      FVec x(n);
      for (auto& e : x) e = relem(K, rng);
      if (!is_zero_vec(x) && evaluate(K, f, x) == 0 && !is_zero_vec(gradient(K, f, x))) P = x;
    }
    if (!P) return o;
    FVec g = gradient(K, f, *P);
    // Columns: P, the rest of a basis of the tangent hyperplane, then a unit
    // vector outside it.
    std::vector<FVec> cols = {*P};
    for (auto& v : kernel(K, FMat{g}, n)) {
      auto trial = cols;
      trial.push_back(v);
      if (rank(K, from_columns(trial, n)) == static_cast<int>(trial.size())) cols = trial;
    }
    int j = 0;
    while (g[j] == 0) ++j;
    cols.push_back(unit_vec<Field, FE>(K, n, j));
    FForm h = form_at_columns(K, f, from_columns(cols, n));
    FVec e1 = unit_vec<Field, FE>(K, n, 0);
    FVec gh = gradient(K, h, e1);
    bool tangent = evaluate(K, h, e1) == 0 && gh[n - 1] != 0;
    for (int i = 0; i + 1 < n; ++i) tangent = tangent && gh[i] == 0;
    o.accepted = true;
    if (!tangent) {
      o.failure = dump_forms(K, {f}, "generator did not produce a tangent hyperplane X_n = 0");
      return o;
    }
    int r = oracle_rank(K, h), r2 = oracle_rank(K, resize_form(K, h, n - 1));
    if (r2 != r - 2) o.failure = dump_forms(K, {h}, "rank " + std::to_string(r) + " restricts to rank " + std::to_string(r2));
    return o;
  });
}

void lemma_rplus2(LemmaReport& rep, const OracleCtx& ctx, OracleMode mode, std::uint64_t trials, std::uint64_t seed) {
  const Field K = need_field(ctx);
  auto check = [&](const FForm& f) {
    Outcome o;
    o.accepted = true;
    const int m = f.n;
    FForm g = resize_form(K, f, m + 2);
    coef(g, m, m + 1) = 1;
    int a = oracle_rank(K, f), b = oracle_rank(K, g);
    if (b != a + 2) o.failure = dump_forms(K, {g}, "rank " + std::to_string(a) + " becomes " + std::to_string(b));
    return o;
  };
  if (mode == OracleMode::Exhaustive) {
    const int m = ctx.n ? ctx.n : 3;
    drive(rep, mode, sat_pow(K.order(), tri_size(m)), 0, seed, ctx.jobs,
          [&](std::uint64_t idx, Rng&) { return check(decode_form(K, m, idx)); });
    return;
  }
  drive(rep, mode, 0, trials, seed, ctx.jobs, [&](std::uint64_t, Rng& rng) {
    const int m = ctx.n ? ctx.n : 1 + static_cast<int>(rng() % 6);
    return check(rform(K, m, rng));
  });
}

void lemma_lift(LemmaReport& rep, const OracleCtx& ctx, OracleMode mode, std::uint64_t trials, std::uint64_t seed) {
  const Ring R(need_field(ctx), ctx.precision);
  if (mode == OracleMode::Exhaustive) fail(ErrorKind::BudgetExceeded, "lift: no finite enumeration over the local ring");
  drive(rep, mode, 0, trials, seed, ctx.jobs, [&](std::uint64_t, Rng& rng) {
    Outcome o;
    const int n = ctx.n ? ctx.n : 2 + static_cast<int>(rng() % 7);
    const int s = 1 + static_cast<int>(rng() % std::min(3, n / 2));
    const int k = n - 2 * s;
    RForm Qt = ring_form(R, k, rng);
    RForm Q = zero_form(R, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        if (i < 2 * s) {
          RE h = (i % 2 == 0 && j == i + 1) ? R.one() : R.zero();
          coef(Q, i, j) = R.add(h, R.mul_pi(ring_elem(R, rng), 1));
        } else {
          coef(Q, i, j) = R.add(coef(Qt, i - 2 * s, j - 2 * s), R.mul_pi(ring_elem(R, rng), 2));
        }
      }
    o.accepted = true;
    HenselResult H = hensel_split(R, Q, s);
    auto bad = [&](const std::string& why) { o.failure = dump_forms(R, {Q, Qt}, why + " (s = " + std::to_string(s) + ")"); };
    if (static_cast<int>(H.T.size()) != n || !R.is_unit(det(R, H.T))) return bad("T is not unimodular"), o;
    if (H.Q0.n != k) return bad("Q0 has the wrong size"), o;
    RForm G = form_at_columns(R, Q, H.T);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        RE want = R.zero();
        if (i >= 2 * s)
          want = coef(H.Q0, i - 2 * s, j - 2 * s);
        else if (i % 2 == 0 && j == i + 1)
          want = R.one();
        if (!R.eq(coef(G, i, j), want)) return bad("Q(TX) differs from the split form"), o;
      }
    for (size_t i = 0; i < Qt.c.size(); ++i)
      if (R.valuation(R.sub(H.Q0.c[i], Qt.c[i])) < 2) return bad("Q0 differs from the tail mod pi^2"), o;
    return o;
  });
}

void lemma_nsq(LemmaReport& rep, const OracleCtx& ctx, OracleMode mode, std::uint64_t trials, std::uint64_t seed) {
  const Ring R(need_field(ctx), ctx.precision);
  if (mode == OracleMode::Exhaustive) fail(ErrorKind::BudgetExceeded, "nsq: no finite enumeration over the local ring");
  drive(rep, mode, 0, trials, seed, ctx.jobs, [&](std::uint64_t, Rng& rng) {
    Outcome o;
    RForm Q = ring_form(R, 8, rng);
    RE d = det(R, matrix_of(R, Q));
    if (R.valuation(d) >= R.N() || is_square_element(R, d)) return o;
    o.accepted = true;
    FormSplit S = split_by_nonsquare_det(R, Q);
    auto bad = [&](const std::string& why) { o.failure = dump_forms(R, {Q}, why); };
    if (S.s < 3 || static_cast<int>(S.T.size()) != 8 || S.W.n != 8 - 2 * S.s) return bad("fewer than three planes"), o;
    if (4 * S.e >= R.N() || R.valuation(det(R, S.T)) >= R.N()) return bad("split is degenerate at precision"), o;
    RForm G = form_at_columns(R, Q, S.T);
    RE h = R.pi_pow(2 * S.e);
    for (int i = 0; i < 8; ++i)
      for (int j = i; j < 8; ++j) {
        RE want = R.zero();
        if (i >= 2 * S.s)
          want = coef(S.W, i - 2 * S.s, j - 2 * S.s);
        else if (i % 2 == 0 && j == i + 1)
          want = h;
        if (!R.eq(coef(G, i, j), want)) return bad("Q(TX) differs from the split form"), o;
      }
    o.max("e", S.e);
    return o;
  });
}

// F squarefree over the algebraic closure, as a binary form of degree n.
bool squarefree_binary(const Field& K, const std::vector<FE>& F) {
  const int n = static_cast<int>(F.size()) - 1;
  // F(t, 1) = sum_i c[i] t^(n-i); multiplicity at infinity = number of
  // leading zero coefficients.
  int inf = 0;
  while (inf <= n && F[inf] == 0) ++inf;
  if (inf > n) return false;
  if (inf > 1) return false;
  Poly f(n + 1 - inf);
  for (int i = inf; i <= n; ++i) f[n - i] = F[i];
  poly::trim(f);
  if (poly::deg(f) <= 0) return true;
  Poly g = poly::gcd(K, f, poly::derivative(K, f));
  return poly::deg(g) == 0;
}

void lemma_lbp(LemmaReport& rep, const OracleCtx& ctx, OracleMode mode, std::uint64_t trials, std::uint64_t seed) {
  const Field K = need_field(ctx);
  if (K.p() == 2) fail(ErrorKind::PreconditionViolated, "LBP: characteristic 2 is excluded");
  const std::uint64_t q = K.order();
  auto check = [&](Outcome& o, const FForm& q1, const FForm& q2) {
    const int n = q1.n;
    auto F = pencil_F(K, q1, q2);
    if (!squarefree_binary(K, F)) {
      o.failure = dump_forms(K, {q1, q2}, "F vanishes or has a repeated factor");
      return;
    }
    PencilRanks pr = oracle_pencil(K, q1, q2);
    if (pr.r != n || pr.r_min != n - 1)
      o.failure = dump_forms(K, {q1, q2}, "r = " + std::to_string(pr.r) + ", r_min = " + std::to_string(pr.r_min));
  };
  if (mode == OracleMode::Exhaustive) {
    // Two variables: the variety is nonsingular exactly when it is empty.
    if (ctx.n && ctx.n != 2) fail(ErrorKind::BudgetExceeded, "LBP: exhaustive nonsingularity checks cover n = 2 only");
    const Extension E = extension(K, 2);
    const FE Q2 = E.ext.order();
    drive(rep, mode, sat_pow(q, 6), 0, seed, ctx.jobs, [&](std::uint64_t idx, Rng&) {
      Outcome o;
      FForm s1 = decode_form(K, 2, idx), s2 = decode_form(K, 2, idx);
      FForm e1 = zero_form(E.ext, 2), e2 = zero_form(E.ext, 2);
      for (int i = 0; i < 3; ++i) e1.c[i] = E.embed(s1.c[i]), e2.c[i] = E.embed(s2.c[i]);
      auto common = [&](const FVec& x) { return evaluate(E.ext, e1, x) == 0 && evaluate(E.ext, e2, x) == 0; };
      if (common(FVec{0, 1})) return o;
      for (FE t = 0; t < Q2; ++t)
        if (common(FVec{1, t})) return o;
      o.accepted = true;
      check(o, s1, s2);
      return o;
    });
    return;
  }
  const int n = ctx.n ? ctx.n : 8;
  if (q + 1 < static_cast<std::uint64_t>(n)) fail(ErrorKind::PreconditionViolated, "LBP: too few points of P^1 to plant");
  drive(rep, mode, 0, trials, seed, ctx.jobs, [&](std::uint64_t, Rng& rng) {
    Outcome o;
    // Simultaneously diagonal with distinct ratios a_i : b_i, then hidden.
    std::vector<std::pair<FE, FE>> pts;
    while (static_cast<int>(pts.size()) < n) {
      std::uint64_t t = rng() % (q + 1);
      std::pair<FE, FE> pt = t == q ? std::pair<FE, FE>{0, 1} : std::pair<FE, FE>{1, t};
      if (std::find(pts.begin(), pts.end(), pt) == pts.end()) pts.push_back(pt);
    }
    FForm d1 = zero_form(K, n), d2 = zero_form(K, n);
    for (int i = 0; i < n; ++i) {
      FE c = 1 + rng() % (q - 1);
      coef(d1, i, i) = K.mul(c, pts[i].first);
      coef(d2, i, i) = K.mul(c, pts[i].second);
    }
    auto [q1, q2] = recompute(K, rgl(K, 2, rng), rgl(K, n, rng), d1, d2);
    o.accepted = true;
    check(o, q1, q2);
    return o;
  });
}

// Draws a pencil with r < R from the nested construction.
std::optional<std::pair<FForm, FForm>> gap_pencil(const Field& K, int n, Rng& rng, bool even_r_only, bool odd_r_only) {
  const int R = 2 + static_cast<int>(rng() % (n - 1));
  const int r = 1 + static_cast<int>(rng() % (R - 1));
  if (even_r_only && r % 2) return std::nullopt;
  if (odd_r_only && r % 2 == 0) return std::nullopt;
  try {
    return random_profile_pencil(K, n, r, R, rng);
  } catch (const Error&) {
    return std::nullopt;
  }
}

void shape_checks(Outcome& o, const Field& K, const FForm& q1, const FForm& q2, const ShapeReport& rep, int r, int R,
                  bool second) {
  auto bad = [&](const std::string& why) { o.failure = dump_forms(K, {q1, q2}, rep.kind + ": " + why); };
  if (det(K, rep.U) == 0 || det(K, rep.T) == 0) return bad("singular change of basis or variables");
  auto [g1, g2] = recompute(K, rep.U, rep.T, q1, q2);
  if (!forms_equal(K, g1, rep.q1) || !forms_equal(K, g2, rep.q2)) return bad("reported forms differ from the transform");
  const int n = q1.n;
  if (oracle_rank(K, g1) != r) return bad("rank(q1) differs from r");
  if (!supported_below(g1, r)) return bad("q1 involves variables beyond X_r");
  FForm rest = g2;
  if (rep.kind == "shape1" || rep.kind == "shape2a") {
    if (R > n || coef(rest, r - 1, R - 1) != 1) return bad("missing X_r X_R");
    coef(rest, r - 1, R - 1) = 0;
    if (!supported_below(rest, R - 1)) return bad("q2 - X_r X_R involves variables beyond X_{R-1}");
    return;
  }
  if (!second) return bad("unexpected shape");
  if (r >= n) return bad("no variable X_{r+1}");
  if (r <= R - 2) return bad("r <= R - 2 but the X_r X_R shape was not produced");
  if (coef(rest, r, r) != 1) return bad("missing X_{r+1}^2");
  coef(rest, r, r) = 0;
  if (rep.kind == "shape2c") {
    if (coef(rest, r - 1, r) != 1) return bad("missing X_r X_{r+1}");
    coef(rest, r - 1, r) = 0;
  } else if (rep.kind != "shape2b") {
    return bad("unknown shape");
  }
  if (!supported_below(rest, r)) return bad("remainder of q2 involves variables beyond X_r");
}

void lemma_shape(LemmaReport& rep, const OracleCtx& ctx, OracleMode mode, std::uint64_t trials, std::uint64_t seed, bool second) {
  const Field K = need_field(ctx);
  const std::uint64_t q = K.order();
  if (second && K.p() != 2) fail(ErrorKind::PreconditionViolated, "lemshape2: characteristic 2 only");
  auto check = [&](const FForm& q1, const FForm& q2) {
    Outcome o;
    auto inv = invariants(K, q1, q2);
    if (inv.r >= inv.R) return o;
    const bool odd2 = K.p() == 2 && inv.r % 2;
    if (second != odd2) return o;
    o.accepted = true;
    PencilRanks pr = oracle_pencil(K, q1, q2);
    if (pr.r != inv.r || pr.R != inv.R) {
      o.failure = dump_forms(K, {q1, q2}, "pencil ranks disagree with the enumeration oracle");
      return o;
    }
    ShapeReport s = second ? normalize_shape2(K, q1, q2) : normalize_shape1(K, q1, q2);
    o.count("shape_" + s.kind);
    shape_checks(o, K, q1, q2, s, inv.r, inv.R, second);
    return o;
  };
  if (mode == OracleMode::Exhaustive) {
    const int n = ctx.n ? ctx.n : static_cast<int>(std::min<std::uint64_t>(q, 3));
    if (q < static_cast<std::uint64_t>(n)) fail(ErrorKind::PreconditionViolated, "field has fewer than n elements");
    drive(rep, mode, sat_pow(q, 2 * tri_size(n)), 0, seed, ctx.jobs, [&](std::uint64_t idx, Rng&) {
      FForm q1 = decode_form(K, n, idx), q2 = decode_form(K, n, idx);
      return check(q1, q2);
    });
    return;
  }
  const int n = ctx.n ? ctx.n : static_cast<int>(std::min<std::uint64_t>(q, 6));
  if (q < static_cast<std::uint64_t>(n) || n < 2) fail(ErrorKind::PreconditionViolated, "field has fewer than n elements");
  drive(rep, mode, 0, trials, seed, ctx.jobs, [&](std::uint64_t, Rng& rng) {
    auto P = gap_pencil(K, n, rng, !second && K.p() == 2, second);
    if (!P) return Outcome{};
    return check(P->first, P->second);
  });
}

void lemma_rminus2(LemmaReport& rep, const OracleCtx& ctx, OracleMode mode, std::uint64_t trials, std::uint64_t seed) {
  const Field K = need_field(ctx);
  const std::uint64_t q = K.order();
  auto check = [&](const FForm& q1, const FForm& q2) {
    Outcome o;
    auto inv = invariants(K, q1, q2);
    const int r = inv.r, R = inv.R;
    if (!(r < R && (r % 2 == 0 || r <= R - 2))) return o;
    o.accepted = true;
    auto bad = [&](const std::string& why) { o.failure = dump_forms(K, {q1, q2}, why); };
    PencilRanks pr = oracle_pencil(K, q1, q2);
    if (pr.r != r || pr.R != R) return bad("pencil ranks disagree with the enumeration oracle"), o;
    if (r < 2) return bad("r < 2"), o;
    PeelResult P = peel_r2(K, q1, q2);
    if (det(K, P.U) == 0 || det(K, P.T) == 0) return bad("singular change of basis or variables"), o;
    auto [g1, g2] = recompute(K, P.U, P.T, q1, q2);
    if (!forms_equal(K, g1, P.q1) || !forms_equal(K, g2, P.q2)) return bad("reported forms differ from the transform"), o;
    if (oracle_rank(K, g1) != r) return bad("rank(q1) differs from r"), o;
    const int k = R - 2;
    if (!forms_equal(K, sub_block(K, g1, 0, k), P.q3) || !forms_equal(K, sub_block(K, g2, 0, k), P.q4))
      return bad("q3, q4 differ from the leading blocks"), o;
    if (!supported_below(g1, R - 1)) return bad("q1 involves X_R or later"), o;
    if (static_cast<int>(P.ell.size()) != R - 1) return bad("l has the wrong length"), o;
    for (int i = 0; i <= k; ++i)
      if (coef(g1, i, k) != P.ell[i]) return bad("X_{R-1} terms of q1 differ from l"), o;
    FForm rest = g2;
    if (coef(rest, k, k + 1) != 1) return bad("missing X_{R-1} X_R"), o;
    coef(rest, k, k + 1) = 0;
    if (!supported_below(rest, k)) return bad("q2 has extra terms in X_{R-1}, X_R or later"), o;
    if (k == 0) return o;
    if (oracle_rank(K, P.q3) != r - 2) return bad("rank(q3) differs from r - 2"), o;
    PencilRanks p34 = oracle_pencil(K, P.q3, P.q4);
    if (p34.r != r - 2) return bad("r(q3, q4) differs from r - 2"), o;
    if (p34.R != R - 3 && p34.R != R - 2) return bad("R(q3, q4) is neither R - 3 nor R - 2"), o;
    if (r == 2 && (!is_zero_form(K, P.q3) || !is_zero_form(K, P.q4))) return bad("r = 2 but q3, q4 nonzero"), o;
    o.count("R34_is_R-" + std::to_string(R - p34.R));
    return o;
  };
  if (mode == OracleMode::Exhaustive) {
    const int n = ctx.n ? ctx.n : static_cast<int>(std::min<std::uint64_t>(q, 3));
    if (q < static_cast<std::uint64_t>(n)) fail(ErrorKind::PreconditionViolated, "field has fewer than n elements");
    drive(rep, mode, sat_pow(q, 2 * tri_size(n)), 0, seed, ctx.jobs, [&](std::uint64_t idx, Rng&) {
      FForm q1 = decode_form(K, n, idx), q2 = decode_form(K, n, idx);
      return check(q1, q2);
    });
    return;
  }
  const int n = ctx.n ? ctx.n : static_cast<int>(std::min<std::uint64_t>(q, 6));
  if (q < static_cast<std::uint64_t>(n) || n < 2) fail(ErrorKind::PreconditionViolated, "field has fewer than n elements");
  drive(rep, mode, 0, trials, seed, ctx.jobs, [&](std::uint64_t, Rng& rng) {
    auto P = gap_pencil(K, n, rng, false, false);
    if (!P) return Outcome{};
    return check(P->first, P->second);
  });
}

void lemma_sz(LemmaReport& rep, const OracleCtx& ctx, OracleMode mode, std::uint64_t trials, std::uint64_t seed) {
  const Field K = need_field(ctx);
  auto check = [&](const FForm& q1, const FForm& q2) {
    Outcome o;
    // n = 4 is even, so r < 4 exactly when F vanishes identically.
    auto F = pencil_F(K, q1, q2);
    for (FE c : F)
      if (c != 0) return o;
    o.accepted = true;
    SingularZero z = singular_common_zero_4(K, q1, q2);
    o.count("route_" + z.route);
    if (z.full_rank || !is_singular_zero(K, q1, q2, z.x)) o.failure = dump_forms(K, {q1, q2}, "no verified singular common zero");
    return o;
  };
  if (mode == OracleMode::Exhaustive) {
    drive(rep, mode, sat_pow(K.order(), 20), 0, seed, ctx.jobs, [&](std::uint64_t idx, Rng&) {
      FForm q1 = decode_form(K, 4, idx), q2 = decode_form(K, 4, idx);
      return check(q1, q2);
    });
    return;
  }
  drive(rep, mode, 0, trials, seed, ctx.jobs, [&](std::uint64_t, Rng& rng) {
    FForm q1 = rform(K, 4, rng), q2 = rform(K, 4, rng);
    return check(q1, q2);
  });
}

void lemma_2n(LemmaReport& rep, const OracleCtx& ctx, OracleMode mode, std::uint64_t trials, std::uint64_t seed) {
  const Field K = need_field(ctx);
  const std::uint64_t q = K.order();
  const Extension E = extension(K, 2);
  std::vector<FVec> P1 = {FVec{0, 1}};
  for (FE t = 0; t < q; ++t) P1.push_back(FVec{1, t});
  auto check = [&](const FForm& s1, const FForm& s2) {
    Outcome o;
    // No common factor: no common projective root over GF(q^2), which holds
    // every root of a binary quadratic.
    if (is_zero_form(K, s1) || is_zero_form(K, s2)) return o;
    FForm e1 = zero_form(E.ext, 2), e2 = zero_form(E.ext, 2);
    for (int i = 0; i < 3; ++i) e1.c[i] = E.embed(s1.c[i]), e2.c[i] = E.embed(s2.c[i]);
    auto common = [&](const FVec& x) { return evaluate(E.ext, e1, x) == 0 && evaluate(E.ext, e2, x) == 0; };
    if (common(FVec{0, 1})) return o;
    for (FE t = 0; t < E.ext.order(); ++t)
      if (common(FVec{1, t})) return o;
    // r = 2: rank drops happen at no more than two points of P^1.
    bool rank2 = false;
    for (size_t i = 0; i < P1.size() && !rank2; ++i)
      rank2 = brute_rank(K, combine(K, P1[i][0], s1, P1[i][1], s2)) == 2;
    if (!rank2) return o;
    o.accepted = true;
    std::uint64_t Nh = 0, Na = 0, Nr = 0;
    for (auto& ab : P1) {
      FForm f = combine(K, ab[0], s1, ab[1], s2);
      int zeros = 0;
      for (auto& x : P1) zeros += evaluate(K, f, x) == 0;
      const int rk = brute_rank(K, f);
      if (rk == 2 && zeros == 2)
        Nh += q - 1;
      else if (rk == 2 && zeros == 0)
        Na += q - 1;
      else
        Nr += q - 1;
    }
    std::uint64_t S = 0;
    for (FE x = 0; x < q; ++x)
      for (FE y = 0; y < q; ++y) {
        if (x == 0 && y == 0) continue;
        FVec v{x, y};
        const bool both = evaluate(K, s1, v) == 0 && evaluate(K, s2, v) == 0;
        S += both ? q * q - 1 : q - 1;
      }
    o.min("Nh", static_cast<double>(Nh));
    o.min("Na", static_cast<double>(Na));
    o.max("Nr", static_cast<double>(Nr));
    auto bad = [&](const std::string& why) {
      o.failure = dump_forms(K, {s1, s2}, why + " (Nh " + std::to_string(Nh) + ", Na " + std::to_string(Na) + ", Nr " +
                                              std::to_string(Nr) + ")");
    };
    const std::uint64_t half = (q - 1) * (q - 1);  // compare 2 N >= (q-1)^2
    if (2 * Nh < half || 2 * Na < half) return bad("count below (q-1)^2 / 2"), o;
    if (Nh + Na + Nr != q * q - 1) return bad("Nh + Na + Nr differs from q^2 - 1"), o;
    if (2 * (q - 1) * Nh + (q - 1) * Nr != S || S != (q - 1) * (q * q - 1)) return bad("incidence count mismatch"), o;
    BinaryCounts fast = classify_binary_pencil(K, s1, s2);
    if (fast.Nh != Nh || fast.Na != Na || fast.Nr != Nr) return bad("classify_binary_pencil disagrees"), o;
    return o;
  };
  if (mode == OracleMode::Exhaustive) {
    drive(rep, mode, sat_pow(q, 6), 0, seed, ctx.jobs, [&](std::uint64_t idx, Rng&) {
      FForm s1 = decode_form(K, 2, idx), s2 = decode_form(K, 2, idx);
      return check(s1, s2);
    });
    return;
  }
  drive(rep, mode, 0, trials, seed, ctx.jobs, [&](std::uint64_t, Rng& rng) {
    FForm s1 = rform(K, 2, rng), s2 = rform(K, 2, rng);
    return check(s1, s2);
  });
}

// Projective zeros of a quaternary form; (q+1)^2 exactly for two hyperbolic
// planes.
std::uint64_t projective_zeros4(const Field& K, const FForm& f) {
  const FE q = K.order();
  std::uint64_t cnt = 0;
  FVec x(4);
  for (int lead = 0; lead < 4; ++lead) {
    const int free = 3 - lead;
    const std::uint64_t total = sat_pow(q, free);
    for (std::uint64_t code = 0; code < total; ++code) {
      std::fill(x.begin(), x.end(), 0);
      x[lead] = 1;
      std::uint64_t c = code;
      for (int i = lead + 1; i < 4; ++i) x[i] = c % q, c /= q;
      cnt += evaluate(K, f, x) == 0;
    }
  }
  return cnt;
}

void lemma_7l(LemmaReport& rep, const OracleCtx& ctx, OracleMode mode, std::uint64_t trials, std::uint64_t seed) {
  const Field K = need_field(ctx);
  const std::uint64_t q = K.order();
  if (q < 32) fail(ErrorKind::PreconditionViolated, "7l: the field needs at least 32 elements");
  auto build = [&](const FForm& s1, const FForm& s2) {
    FForm q1 = zero_form(K, 4), q2 = zero_form(K, 4);
    coef(q1, 0, 1) = 1;
    coef(q2, 0, 2) = 1;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) coef(q1, i + 1, j + 1) = coef(s1, i, j), coef(q2, i + 1, j + 1) = coef(s2, i, j);
    return std::pair{q1, q2};
  };
  auto check = [&](const FForm& s1, const FForm& s2) {
    Outcome o;
    if (coef(s1, 2, 2) == 0 && coef(s2, 2, 2) == 0) return o;
    o.accepted = true;
    auto [q1, q2] = build(s1, s2);
    auto bad = [&](const std::string& why) { o.failure = dump_forms(K, {q1, q2}, why); };
    SevenLResult res = lemma_7l_pairs(K, q1, q2);
    o.count("route_" + res.route);
    if (res.pairs.size() + res.singular_members + res.nonsplit_members != q * q - 1)
      return bad("member classification does not partition the nonzero pairs"), o;
    if (res.singular_zero) {
      if (!is_singular_zero(K, q1, q2, *res.singular_zero)) bad("reported singular common zero fails verification");
      return o;
    }
    o.min("pairs", static_cast<double>(res.pairs.size()));
    // Verify whole projective classes by point counts until 5(q-1) pairs are
    // confirmed.
    std::map<std::pair<FE, FE>, std::uint64_t> classes;
    for (auto [a, b] : res.pairs) {
      FE s = a ? K.inv(a) : K.inv(b);
      classes[{K.mul(a, s), K.mul(b, s)}]++;
    }
    std::uint64_t verified = 0;
    for (auto& [ab, mult] : classes) {
      if (verified >= 5 * (q - 1)) break;
      if (projective_zeros4(K, combine(K, ab.first, q1, ab.second, q2)) != (q + 1) * (q + 1))
        return bad("a reported pair is not two hyperbolic planes"), o;
      verified += mult;
    }
    if (verified < 5 * (q - 1)) bad("fewer than 5(q-1) verified two-plane pairs and no singular common zero");
    return o;
  };
  if (mode == OracleMode::Exhaustive) {
    drive(rep, mode, sat_pow(q, 12), 0, seed, ctx.jobs, [&](std::uint64_t idx, Rng&) {
      FForm s1 = decode_form(K, 3, idx), s2 = decode_form(K, 3, idx);
      return check(s1, s2);
    });
    return;
  }
  drive(rep, mode, 0, trials, seed, ctx.jobs, [&](std::uint64_t, Rng& rng) {
    FForm s1 = rform(K, 3, rng), s2 = rform(K, 3, rng);
    return check(s1, s2);
  });
}

RForm lift_plus_pi(const Ring& R, const FForm& f, Rng& rng) {
  RForm Q = lift_form(R, R.residue(), f);
  for (auto& c : Q.c) c = R.add(c, R.mul_pi(ring_elem(R, rng), 1));
  return Q;
}

RForm hide(const Ring& R, const RForm& Q, const RMat& T) { return substitute(R, Q, T); }

void witness_check(Outcome& o, const LocalPair& LP, const std::string& what) {
  auto w = nonmin_witness(LP);
  if (!w) {
    o.failure = dump_forms(LP.R, {LP.Q1, LP.Q2}, what + ": no non-minimality witness");
    return;
  }
  o.count("move_" + w->move);
  if (auto why = check_witness(LP, w->W)) o.failure = dump_forms(LP.R, {LP.Q1, LP.Q2}, what + ": " + *why);
}

void lemma_notmin(LemmaReport& rep, const OracleCtx& ctx, OracleMode mode, std::uint64_t trials, std::uint64_t seed) {
  const Ring R(need_field(ctx), ctx.precision);
  const Field& K = R.residue();
  if (mode == OracleMode::Exhaustive) fail(ErrorKind::BudgetExceeded, "notmin: no finite enumeration over the local ring");
  drive(rep, mode, 0, trials, seed, ctx.jobs, [&](std::uint64_t, Rng& rng) {
    Outcome o;
    const int n = 8;
    FForm q1 = zero_form(K, n), q2 = zero_form(K, n);
    std::string what;
    if (rng() % 2) {
      // l_k = X_k (k <= 3): q_i = X1 l1 + X2 l2 + X3 l3.
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < n; ++j) {
          coef(q1, std::min(k, j), std::max(k, j)) = K.add(coef(q1, std::min(k, j), std::max(k, j)), relem(K, rng));
          coef(q2, std::min(k, j), std::max(k, j)) = K.add(coef(q2, std::min(k, j), std::max(k, j)), relem(K, rng));
        }
      what = "3L shape";
    } else {
      q1 = resize_form(K, rform(K, 3, rng), n);
      q2 = resize_form(K, rform(K, 3, rng), n);
      what = "R <= 3";
    }
    RMat T = ring_unimodular(R, n, rng);
    LocalPair LP{R, hide(R, lift_plus_pi(R, q1, rng), T), hide(R, lift_plus_pi(R, q2, rng), T)};
    if (what == "R <= 3") {
      auto [r1, r2] = reduce_pair(LP);
      if (big_R(K, r1, r2) > 3) return o;
    }
    o.accepted = true;
    o.count(what == "R <= 3" ? "kind_R_le_3" : "kind_3L");
    witness_check(o, LP, what);
    return o;
  });
}

void lemma_x8(LemmaReport& rep, const OracleCtx& ctx, OracleMode mode, std::uint64_t trials, std::uint64_t seed) {
  const Ring R(need_field(ctx), ctx.precision);
  const Field& K = R.residue();
  if (mode == OracleMode::Exhaustive) fail(ErrorKind::BudgetExceeded, "x8: no finite enumeration over the local ring");
  drive(rep, mode, 0, trials, seed, ctx.jobs, [&](std::uint64_t, Rng& rng) {
    Outcome o;
    const int n = 8;
    const int Rv = 1 + static_cast<int>(rng() % 7);
    const int k = n - Rv;
    std::vector<RForm> Q(2);
    std::vector<FForm> g(2);
    const RMat C = ring_unimodular(R, k, rng);  // shared, so the planted common zero survives
    for (int i = 0; i < 2; ++i) {
      RForm G = ring_form(R, Rv, rng);
      g[i] = reduce_form(R, G);
      RForm H = ring_form(R, k, rng);
      coef(H, k - 1, k - 1) = R.mul_pi(ring_elem(R, rng), 1);  // H(e_last) = 0 mod pi
      H = substitute(R, H, C);
      RForm full = resize_form(R, G, n);
      for (int a = 0; a < Rv; ++a)
        for (int b = Rv; b < n; ++b) coef(full, a, b) = R.mul_pi(ring_elem(R, rng), 1);
      for (int a = 0; a < k; ++a)
        for (int b = a; b < k; ++b) coef(full, Rv + a, Rv + b) = R.mul_pi(coef(H, a, b), 1);
      Q[i] = full;
    }
    if (big_R(K, resize_form(K, g[0], n), resize_form(K, g[1], n)) != Rv) return o;
    o.accepted = true;
    o.count("R_" + std::to_string(Rv));
    witness_check(o, LocalPair{R, Q[0], Q[1]}, "x8 shape with R = " + std::to_string(Rv));
    return o;
  });
}

bool verified_smooth_zero(const LocalPair& LP, const RVec& x) {
  const Ring& R = LP.R;
  if (static_cast<int>(x.size()) != LP.n()) return false;
  bool unit = false;
  for (auto& e : x) unit = unit || R.is_unit(e);
  if (!unit) return false;
  if (!R.is_zero(evaluate(R, LP.Q1, x)) || !R.is_zero(evaluate(R, LP.Q2, x))) return false;
  const Field& K = R.residue();
  FVec xr;
  for (auto& e : x) xr.push_back(R.reduce(e));
  auto [q1, q2] = reduce_pair(LP);
  return rank(K, FMat{gradient(K, q1, xr), gradient(K, q2, xr)}) == 2;
}

void lemma_corpus(LemmaReport& rep, const OracleCtx& ctx, OracleMode mode, std::uint64_t trials, std::uint64_t seed, bool r_side) {
  const Ring R(need_field(ctx), ctx.precision);
  const Field& K = R.residue();
  if (mode == OracleMode::Exhaustive) fail(ErrorKind::BudgetExceeded, rep.id + ": no finite enumeration over the local ring");
  if (r_side && K.order() < 8) fail(ErrorKind::PreconditionViolated, "rge5: the residue field needs at least 8 elements");
  drive(rep, mode, 0, trials, seed, ctx.jobs, [&](std::uint64_t, Rng& rng) {
    Outcome o;
    Profile P;
    P.r = 1 + static_cast<int>(rng() % 8);
    P.R = P.r + static_cast<int>(rng() % (9 - P.r));
    P.zero = true;
    P.nonsingular = true;
    try {
      LocalPair LP = plant_pair(R, rng(), P, 8, 20);
      MinimizeResult M = minimize(LP);
      if (!M.catalog_minimal) return o.count("rejected_not_minimal"), o;
      auto z = smooth_local_zero(M.pair, 200000, rng());
      if (!z || !verified_smooth_zero(M.pair, *z)) return o.count("rejected_no_smooth_zero"), o;
      auto [q1, q2] = reduce_pair(M.pair);
      auto inv = invariants(K, q1, q2);
      o.accepted = true;
      o.count("R_" + std::to_string(inv.R));
      o.min("r", inv.r);
      o.min("R", inv.R);
      if (!r_side && inv.R == 4) o.failure = dump_forms(R, {M.pair.Q1, M.pair.Q2}, "minimized pair with a smooth zero has R = 4");
      if (r_side && inv.r <= 4)
        o.failure = dump_forms(R, {M.pair.Q1, M.pair.Q2}, "minimized pair with a smooth zero has r = " + std::to_string(inv.r));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InsufficientPrecision) return o.count("rejected_precision"), o;
      if (e.kind() == ErrorKind::GenerationExhausted) return o.count("rejected_generation"), o;
      throw;
    }
    return o;
  });
}

RMat diag_pi(const Ring& R, const std::vector<int>& e) {
  RMat D = zero_mat(R, static_cast<int>(e.size()), static_cast<int>(e.size()));
  for (size_t i = 0; i < e.size(); ++i) D[i][i] = R.pi_pow(e[i]);
  return D;
}

void lemma_delta(LemmaReport& rep, const OracleCtx& ctx, OracleMode mode, std::uint64_t trials, std::uint64_t seed) {
  const Ring R(need_field(ctx), ctx.precision);
  if (mode == OracleMode::Exhaustive) fail(ErrorKind::BudgetExceeded, "deltalaw: no finite enumeration over the local ring");
  const int n = ctx.n ? ctx.n : 8;
  drive(rep, mode, 0, trials, seed, ctx.jobs, [&](std::uint64_t, Rng& rng) {
    Outcome o;
    LocalPair A{R, ring_form(R, n, rng), ring_form(R, n, rng)};
    // Forward: integral U = G1 diag(pi^a, 1) G2, T = G3 diag(pi^b_i) G4.
    std::vector<int> a = {static_cast<int>(rng() % 2), 0};
    std::vector<int> b(n);
    for (auto& x : b) x = rng() % 4 == 0;
    RMat G1 = ring_unimodular(R, 2, rng), G2 = ring_unimodular(R, 2, rng);
    RMat G3 = ring_unimodular(R, n, rng), G4 = ring_unimodular(R, n, rng);
    TransformPair fwd{mat_mul(R, mat_mul(R, G1, diag_pi(R, a)), G2), 0, mat_mul(R, mat_mul(R, G3, diag_pi(R, b)), G4), 0};
    const int ka = *std::max_element(a.begin(), a.end()), kb = *std::max_element(b.begin(), b.end());
    std::vector<int> ai(2), bi(n);
    for (int i = 0; i < 2; ++i) ai[i] = ka - a[i];
    for (int i = 0; i < n; ++i) bi[i] = kb - b[i];
    TransformPair back{mat_mul(R, mat_mul(R, inverse_unimodular(R, G2), diag_pi(R, ai)), inverse_unimodular(R, G1)), ka,
                       mat_mul(R, mat_mul(R, inverse_unimodular(R, G4), diag_pi(R, bi)), inverse_unimodular(R, G3)), kb};
    int v0;
    try {
      v0 = delta_valuation(A);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InsufficientPrecision) return o;
      throw;
    }
    LocalPair B = act(A, fwd);
    const bool backward = rng() % 2;
    const LocalPair& src = backward ? B : A;
    const TransformPair& W = backward ? back : fwd;
    int vs, vt;
    try {
      vs = delta_valuation(src);
      vt = delta_valuation(act(src, W));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InsufficientPrecision) return o;
      throw;
    }
    o.accepted = true;
    const int vU = R.valuation(det(R, W.U)) - 2 * W.kU, vT = R.valuation(det(R, W.T)) - n * W.kT;
    const int want = n * (n - 1) * vU + 4 * (n - 1) * vT;
    o.count(backward ? "backward" : "forward");
    o.min("change", vt - vs);
    o.max("change", vt - vs);
    if (vt - vs != want)
      o.failure = dump_forms(R, {src.Q1, src.Q2},
                             "v(Delta) changed by " + std::to_string(vt - vs) + ", law predicts " + std::to_string(want) +
                                 " (v det U " + std::to_string(vU) + ", v det T " + std::to_string(vT) + ", v0 " + std::to_string(v0) + ")");
    return o;
  });
}

std::string mode_name(OracleMode m) { return m == OracleMode::Exhaustive ? "exhaustive" : "sampled"; }

}  // namespace

const std::vector<std::string>& lemma_ids() {
  static const std::vector<std::string> ids = {"add", "r+2", "lift", "nsq", "LBP", "lemshape1", "lemshape2", "r-2",
                                               "sz",  "2N",  "7l",   "notmin", "x8", "R4",  "rge5",      "deltalaw"};
  return ids;
}

LemmaReport verify_lemma(const std::string& id, const OracleCtx& ctx, OracleMode mode, std::uint64_t trials, std::uint64_t seed) {
  const auto& ids = lemma_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) fail(ErrorKind::InvalidInput, "unknown lemma id \"" + id + "\"");
  LemmaReport rep;
  rep.id = id;
  rep.mode = mode;
  const Field K = need_field(ctx);
  rep.field = K.describe();
  rep.p = static_cast<int>(K.p());
  rep.m = K.m();
  static const std::vector<std::string> local = {"lift", "nsq", "notmin", "x8", "R4", "rge5", "deltalaw"};
  if (std::find(local.begin(), local.end(), id) != local.end()) rep.precision = ctx.precision;
  const auto t0 = std::chrono::steady_clock::now();
  if (id == "add") lemma_add(rep, ctx, mode, trials, seed);
  else if (id == "r+2") lemma_rplus2(rep, ctx, mode, trials, seed);
  else if (id == "lift") lemma_lift(rep, ctx, mode, trials, seed);
  else if (id == "nsq") lemma_nsq(rep, ctx, mode, trials, seed);
  else if (id == "LBP") lemma_lbp(rep, ctx, mode, trials, seed);
  else if (id == "lemshape1") lemma_shape(rep, ctx, mode, trials, seed, false);
  else if (id == "lemshape2") lemma_shape(rep, ctx, mode, trials, seed, true);
  else if (id == "r-2") lemma_rminus2(rep, ctx, mode, trials, seed);
  else if (id == "sz") lemma_sz(rep, ctx, mode, trials, seed);
  else if (id == "2N") lemma_2n(rep, ctx, mode, trials, seed);
  else if (id == "7l") lemma_7l(rep, ctx, mode, trials, seed);
  else if (id == "notmin") lemma_notmin(rep, ctx, mode, trials, seed);
  else if (id == "x8") lemma_x8(rep, ctx, mode, trials, seed);
  else if (id == "R4") lemma_corpus(rep, ctx, mode, trials, seed, false);
  else if (id == "rge5") lemma_corpus(rep, ctx, mode, trials, seed, true);
  else lemma_delta(rep, ctx, mode, trials, seed);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

json LemmaReport::to_json() const {
  json j = json::object();
  j["lemma"] = id;
  j["field"] = json{{"p", p}, {"m", m}};
  if (precision) j["precision"] = *precision;
  j["mode"] = mode_name(mode);
  j["trials"] = trials;
  j["draws"] = draws;
  j["pass"] = pass();
  j["failures"] = failures;
  j["stats"] = stats;
  j["wall_seconds"] = wall_seconds;
  return j;
}

std::string LemmaReport::summary() const {
  std::ostringstream os;
  os << (pass() ? "PASS" : "FAIL") << "  " << id << "  " << field;
  if (precision) os << " N=" << *precision;
  os << "  " << mode_name(mode) << "  trials=" << trials << " draws=" << draws << " failures=" << failures.size();
  os.precision(3);
  os << "  " << std::fixed << wall_seconds << "s";
  for (auto& [k, v] : stats) os << "  " << k << "=" << v;
  return os.str();
}

}  // namespace qp
