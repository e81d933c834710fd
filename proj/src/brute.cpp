#include "quadpencil/brute.hpp"

#include <cmath>

namespace qp {

void for_each_vector(const Field& K, int n, const std::function<void(const FVec&)>& f) {
  const std::uint64_t Q = K.order();
  FVec x(n, 0);
  while (true) {
    f(x);
    int i = 0;
    for (; i < n; ++i) {
      if (++x[i] < Q) break;
      x[i] = 0;
    }
    if (i == n) return;
  }
}

namespace {

bool is_vertex(const Field& K, const FForm& q, const FVec& v, const std::vector<FE>& qe) {
  if (evaluate(K, q, v) != 0) return false;
  FVec w = v;
  for (int i = 0; i < q.n; ++i) {
    w[i] = K.add(v[i], 1);
    bool ok = evaluate(K, q, w) == qe[i];
    w[i] = v[i];
    if (!ok) return false;
  }
  return true;
}

std::vector<FE> unit_values(const FForm& q) {
  std::vector<FE> qe(q.n);
  for (int i = 0; i < q.n; ++i) qe[i] = q.c[tri_index(q.n, i, i)];
  return qe;
}

int log_count(std::uint64_t count, std::uint64_t Q) {
  int d = 0;
  while (count > 1) {
    count /= Q;
    ++d;
  }
  return d;
}

// Laplace expansion along the first row.
template <class Ctx, class E>
E laplace_det(const Ctx& K, const Mat<E>& A) {
  const int n = static_cast<int>(A.size());
  if (n == 0) return K.one();
  if (n == 1) return A[0][0];
  E s = K.zero();
  for (int j = 0; j < n; ++j) {
    if (K.is_zero(A[0][j])) continue;
    Mat<E> B;
    for (int i = 1; i < n; ++i) {
      Vec<E> row;
      for (int c = 0; c < n; ++c)
        if (c != j) row.push_back(A[i][c]);
      B.push_back(row);
    }
    E t = K.mul(A[0][j], laplace_det(K, B));
    s = j % 2 ? K.sub(s, t) : K.add(s, t);
  }
  return s;
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

}  // namespace

std::uint64_t brute_vertex_count(const Field& K, const FForm& q) {
  auto qe = unit_values(q);
  std::uint64_t cnt = 0;
  for_each_vector(K, q.n, [&](const FVec& v) { cnt += is_vertex(K, q, v, qe); });
  return cnt;
}

std::uint64_t brute_common_vertex_count(const Field& K, const FForm& q1, const FForm& q2) {
  auto e1 = unit_values(q1), e2 = unit_values(q2);
  std::uint64_t cnt = 0;
  for_each_vector(K, q1.n, [&](const FVec& v) { cnt += is_vertex(K, q1, v, e1) && is_vertex(K, q2, v, e2); });
  return cnt;
}

int brute_rank(const Field& K, const FForm& q, std::uint64_t limit) {
  long double total = std::pow(static_cast<long double>(K.order()), q.n);
  if (total > static_cast<long double>(limit)) fail(ErrorKind::BudgetExceeded, "enumeration too large for brute rank");
  return q.n - log_count(brute_vertex_count(K, q), K.order());
}

int minor_rank(const Field& K, const FForm& q) {
  const int n = q.n;
  FMat M = matrix_of(K, q);
  std::optional<Ring> R2;
  if (K.p() == 2) R2.emplace(K, 2);
  for (int k = n; k >= 1; --k) {
    std::vector<int> rows(k);
    for (int i = 0; i < k; ++i) rows[i] = i;
    do {
      if (K.p() == 2 && k % 2 == 1) {
        RMat A(k, RVec(k));
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) {
            RE v = R2->lift(K, coef(q, rows[i], rows[j]));
            A[i][j] = i == j ? R2->add(v, v) : v;
          }
        RE d = laplace_det(*R2, A);
        if (R2->reduce(R2->div_pi(d, 1)) != 0) return k;
      }
      std::vector<int> cols(k);
      for (int i = 0; i < k; ++i) cols[i] = i;
      do {
        FMat A(k, FVec(k));
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) A[i][j] = M[rows[i]][cols[j]];
        if (laplace_det(K, A) != 0) return k;
      } while (next_subset(cols, n));
    } while (next_subset(rows, n));
  }
  return 0;
}

PencilRanks brute_pencil_ranks(const Field& K, const FForm& q1, const FForm& q2, std::uint64_t budget) {
  const int n = q1.n;
  long double work = 0;
  for (int k = 1; k <= n; ++k) {
    long double Q = std::pow(static_cast<long double>(K.order()), k);
    long double per = std::pow(Q, n);
    if (per > 65536) per = 1 << 12;  // minor expansion
    work += (Q + 1) * per;
  }
  if (work > static_cast<long double>(budget)) fail(ErrorKind::BudgetExceeded, "pencil enumeration exceeds budget");
  PencilRanks out;
  out.r = 0;
  out.r_min = n;
  for (int k = 1; k <= n; ++k) {
    Extension E = extension(K, k);
    const Field& L = E.ext;
    FForm a1{n, {}}, a2{n, {}};
    for (auto c : q1.c) a1.c.push_back(E.embed(c));
    for (auto c : q2.c) a2.c.push_back(E.embed(c));
    const bool enumerate = std::pow(static_cast<long double>(L.order()), n) <= 65536;
    auto rk = [&](const FForm& f) { return enumerate ? brute_rank(L, f) : minor_rank(L, f); };
    for (FE t = 0; t <= L.order(); ++t) {
      // (1:t) for t < #L, then (0:1)
      FE a = t < L.order() ? 1 : 0, b = t < L.order() ? t : 1;
      FForm m = combine(L, a, a1, b, a2);
      int r = rk(m);
      out.r = std::max(out.r, r);
      out.r_min = std::min(out.r_min, r);
    }
  }
  if (n <= 3 && K.order() == 2) {
    // Fewest variables carrying both forms after some invertible T.
    out.R = n;
    const int cells = n * n;
    for (std::uint64_t code = 0; code < (1ull << cells); ++code) {
      FMat T(n, FVec(n));
      for (int i = 0; i < cells; ++i) T[i / n][i % n] = code >> i & 1;
      if (laplace_det(K, T) == 0) continue;
      FForm t1 = substitute(K, q1, T), t2 = substitute(K, q2, T);
      int need = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          if (coef(t1, i, j) || coef(t2, i, j)) need = std::max(need, j + 1);
      out.R = std::min(out.R, need);
    }
  } else {
    out.R = n - log_count(brute_common_vertex_count(K, q1, q2), K.order());
  }
  return out;
}

}  // namespace qp
