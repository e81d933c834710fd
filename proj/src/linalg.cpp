#include "quadpencil/linalg.hpp"

namespace qp {

namespace {

// Row-reduces A in place to reduced echelon form; returns pivot columns.
std::vector<int> rref(const Field& K, FMat& A, int ncols) {
  std::vector<int> piv;
  const int rows = static_cast<int>(A.size());
  int r = 0;
  for (int c = 0; c < ncols && r < rows; ++c) {
    int s = -1;
    for (int i = r; i < rows; ++i)
      if (A[i][c]) {
        s = i;
        break;
      }
    if (s < 0) continue;
    std::swap(A[r], A[s]);
    FE iv = K.inv(A[r][c]);
    for (int j = 0; j < ncols; ++j) A[r][j] = K.mul(A[r][j], iv);
    for (int i = 0; i < rows; ++i) {
      if (i == r || !A[i][c]) continue;
      FE f = A[i][c];
      for (int j = 0; j < ncols; ++j) A[i][j] = K.sub(A[i][j], K.mul(f, A[r][j]));
    }
    piv.push_back(c);
    ++r;
  }
  return piv;
}

}  // namespace

bool is_zero_vec(const FVec& v) {
  for (auto x : v)
    if (x) return false;
  return true;
}

int rank(const Field& K, FMat A) {
  if (A.empty()) return 0;
  return static_cast<int>(rref(K, A, static_cast<int>(A[0].size())).size());
}

FE det(const Field& K, FMat A) {
  const int n = static_cast<int>(A.size());
  FE d = 1;
  for (int c = 0; c < n; ++c) {
    int s = -1;
    for (int i = c; i < n; ++i)
      if (A[i][c]) {
        s = i;
        break;
      }
    if (s < 0) return 0;
    if (s != c) {
      std::swap(A[s], A[c]);
      d = K.neg(d);
    }
    d = K.mul(d, A[c][c]);
    FE iv = K.inv(A[c][c]);
    for (int i = c + 1; i < n; ++i) {
      if (!A[i][c]) continue;
      FE f = K.mul(A[i][c], iv);
      for (int j = c; j < n; ++j) A[i][j] = K.sub(A[i][j], K.mul(f, A[c][j]));
    }
  }
  return d;
}

std::vector<FVec> kernel(const Field& K, const FMat& A0, int ncols) {
  FMat A = A0;
  auto piv = rref(K, A, ncols);
  std::vector<bool> is_piv(ncols, false);
  for (int c : piv) is_piv[c] = true;
  std::vector<FVec> out;
  for (int f = 0; f < ncols; ++f) {
    if (is_piv[f]) continue;
    FVec v(ncols, 0);
    v[f] = 1;
    for (size_t r = 0; r < piv.size(); ++r) v[piv[r]] = K.neg(A[r][f]);
    out.push_back(v);
  }
  return out;
}

std::optional<FMat> inverse(const Field& K, FMat A) {
  const int n = static_cast<int>(A.size());
  for (int i = 0; i < n; ++i) {
    A[i].resize(2 * n, 0);
    A[i][n + i] = 1;
  }
  auto piv = rref(K, A, 2 * n);
  if (static_cast<int>(piv.size()) < n || piv[n - 1] != n - 1) return std::nullopt;
  FMat B(n, FVec(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B[i][j] = A[i][n + j];
  return B;
}

std::vector<FVec> complete_basis(const Field& K, const std::vector<FVec>& vs, int n) {
  std::vector<FVec> out = vs;
  FMat rows(vs.begin(), vs.end());
  int rk = rank(K, rows);
  for (int i = 0; i < n && rk < n; ++i) {
    FVec e(n, 0);
    e[i] = 1;
    rows.push_back(e);
    int r2 = rank(K, rows);
    if (r2 > rk) {
      out.push_back(e);
      rk = r2;
    } else {
      rows.pop_back();
    }
  }
  return out;
}

std::vector<FVec> intersect(const Field& K, const std::vector<FVec>& a, const std::vector<FVec>& b, int n) {
  // Solve sum s_i a_i - sum t_j b_j = 0.
  const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size());
  if (na == 0 || nb == 0) return {};
  FMat M(n, FVec(na + nb, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < na; ++j) M[i][j] = a[j][i];
    for (int j = 0; j < nb; ++j) M[i][na + j] = K.neg(b[j][i]);
  }
  std::vector<FVec> out;
  FMat rows;
  for (auto& st : kernel(K, M, na + nb)) {
    FVec v(n, 0);
    for (int j = 0; j < na; ++j)
      for (int i = 0; i < n; ++i) v[i] = K.add(v[i], K.mul(st[j], a[j][i]));
    rows.push_back(v);
    if (rank(K, rows) == static_cast<int>(rows.size()))
      out.push_back(v);
    else
      rows.pop_back();
  }
  return out;
}

RE det(const Ring& R, RMat A) {
  const int n = static_cast<int>(A.size());
  RE d = R.one();
  bool negate = false;
  for (int k = 0; k < n; ++k) {
    int bi = -1, bj = -1, bv = R.N();
    for (int i = k; i < n; ++i)
      for (int j = k; j < n; ++j) {
        int v = R.valuation(A[i][j]);
        if (v < bv) {
          bv = v;
          bi = i;
          bj = j;
        }
      }
    if (bi < 0) return R.zero();
    if (bi != k) {
      std::swap(A[bi], A[k]);
      negate = !negate;
    }
    if (bj != k) {
      for (int i = 0; i < n; ++i) std::swap(A[i][bj], A[i][k]);
      negate = !negate;
    }
    d = R.mul(d, A[k][k]);
    RE u = R.div_pi(A[k][k], bv);
    RE iu = R.inv(u);
    for (int i = k + 1; i < n; ++i) {
      if (R.is_zero(A[i][k])) continue;
      RE f = R.mul(R.div_pi(A[i][k], bv), iu);
      for (int j = k; j < n; ++j) A[i][j] = R.sub(A[i][j], R.mul(f, A[k][j]));
    }
  }
  return negate ? R.neg(d) : d;
}

RMat inverse_unimodular(const Ring& R, RMat A) {
  const int n = static_cast<int>(A.size());
  RMat B = identity(R, n);
  for (int c = 0; c < n; ++c) {
    int s = -1;
    for (int i = c; i < n; ++i)
      if (R.is_unit(A[i][c])) {
        s = i;
        break;
      }
    if (s < 0) fail(ErrorKind::SingularTransform, "matrix is not invertible over the local ring");
    std::swap(A[s], A[c]);
    std::swap(B[s], B[c]);
    RE iv = R.inv(A[c][c]);
    for (int j = 0; j < n; ++j) {
      A[c][j] = R.mul(A[c][j], iv);
      B[c][j] = R.mul(B[c][j], iv);
    }
    for (int i = 0; i < n; ++i) {
      if (i == c || R.is_zero(A[i][c])) continue;
      RE f = A[i][c];
      for (int j = 0; j < n; ++j) {
        A[i][j] = R.sub(A[i][j], R.mul(f, A[c][j]));
        B[i][j] = R.sub(B[i][j], R.mul(f, B[c][j]));
      }
    }
  }
  return B;
}

RMat lift_mat(const Ring& R, const Field& K, const FMat& A) {
  RMat B(A.size());
  for (size_t i = 0; i < A.size(); ++i)
    for (auto x : A[i]) B[i].push_back(R.lift(K, x));
  return B;
}

FMat reduce_mat(const Ring& R, const RMat& A) {
  FMat B(A.size());
  for (size_t i = 0; i < A.size(); ++i)
    for (auto& x : A[i]) B[i].push_back(R.reduce(x));
  return B;
}

}  // namespace qp
