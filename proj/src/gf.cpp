#include "quadpencil/gf.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace qp {

namespace {

constexpr std::uint64_t kTableLimit = 1u << 17;
constexpr std::uint64_t kBruteRootLimit = 4096;

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

struct Field::Impl {
  std::uint64_t p = 0;
  int m = 0;
  std::uint64_t q = 0;
  std::vector<std::uint64_t> mod;
  bool table = false;
  std::vector<std::uint32_t> log, exp;
  FE prim = 0;
  FE nonsq = 0;
  std::uint64_t s = 0, t = 0;  // q-1 = 2^s t
};

Field::Field(std::uint64_t p, int m, std::vector<std::uint64_t> modulus) {
  if (!is_prime_u64(p)) fail(ErrorKind::NotPrime, std::to_string(p) + " is not prime");
  if (p >= (1ull << 31)) fail(ErrorKind::InvalidInput, "characteristic too large");
  if (m < 1) fail(ErrorKind::InvalidInput, "extension degree must be >= 1");
  std::uint64_t q = 1;
  for (int i = 0; i < m; ++i) {
    if (q > (1ull << 62) / p) fail(ErrorKind::InvalidInput, "field order exceeds 2^62");
    q *= p;
  }
  auto impl = std::make_shared<Impl>();
  impl->p = p;
  impl->m = m;
  impl->q = q;
  if (!modulus.empty()) {
    if (static_cast<int>(modulus.size()) != m + 1 || modulus.back() != 1)
      fail(ErrorKind::InvalidInput, "modulus must be monic of degree m");
    for (auto c : modulus)
      if (c >= p) fail(ErrorKind::InvalidInput, "modulus coefficient out of range");
  }
  if (m == 1) {
    impl->mod = {0, 1};
  } else {
    Field prime(p, 1);
    if (!modulus.empty()) {
      Poly f(modulus.begin(), modulus.end());
      if (!poly::is_irreducible(prime, f))
        fail(ErrorKind::ReducibleModulus, "modulus is reducible over GF(" + std::to_string(p) + ")");
      impl->mod = modulus;
    } else {
      for (std::uint64_t enc = 0;; ++enc) {
        Poly f(m + 1, 0);
        std::uint64_t e = enc;
        for (int i = 0; i < m; ++i) {
          f[i] = e % p;
          e /= p;
        }
        f[m] = 1;
        if (f[0] == 0) continue;
        if (poly::is_irreducible(prime, f)) {
          impl->mod.assign(f.begin(), f.end());
          break;
        }
      }
    }
  }
  d_ = impl;
  // primitive element
  auto fac = prime_factors(q - 1);
  for (FE g = 1; g < q; ++g) {
    bool ok = true;
    for (auto l : fac)
      if (pow(g, (q - 1) / l) == 1) {
        ok = false;
        break;
      }
    if (ok) {
      impl->prim = g;
      break;
    }
  }
  if (q <= kTableLimit && q > 2) {
    impl->exp.resize(2 * (q - 1));
    impl->log.assign(q, 0);
    FE x = 1;
    for (std::uint64_t i = 0; i < q - 1; ++i) {
      impl->exp[i] = static_cast<std::uint32_t>(x);
      impl->log[x] = static_cast<std::uint32_t>(i);
      x = mul_generic(x, impl->prim);
    }
    for (std::uint64_t i = q - 1; i < 2 * (q - 1); ++i) impl->exp[i] = impl->exp[i - (q - 1)];
    impl->table = true;
  }
  if (p != 2) {
    std::uint64_t t = q - 1, s = 0;
    while (t % 2 == 0) {
      t /= 2;
      ++s;
    }
    impl->s = s;
    impl->t = t;
    for (FE z = 2; z < q; ++z)
      if (pow(z, (q - 1) / 2) != 1) {
        impl->nonsq = z;
        break;
      }
  }
}

std::uint64_t Field::p() const { return d_->p; }
int Field::m() const { return d_->m; }
std::uint64_t Field::order() const { return d_->q; }
const std::vector<std::uint64_t>& Field::modulus() const { return d_->mod; }

bool Field::same_as(const Field& o) const {
  if (d_ == o.d_) return true;
  if (!d_ || !o.d_) return false;
  return d_->p == o.d_->p && d_->m == o.d_->m && d_->mod == o.d_->mod;
}

std::vector<std::uint64_t> Field::digits(FE a) const {
  std::vector<std::uint64_t> c(d_->m);
  for (int i = 0; i < d_->m; ++i) {
    c[i] = a % d_->p;
    a /= d_->p;
  }
  return c;
}

FE Field::from_digits(const std::vector<std::uint64_t>& c) const {
  FE a = 0;
  for (int i = d_->m - 1; i >= 0; --i) {
    std::uint64_t v = i < static_cast<int>(c.size()) ? c[i] % d_->p : 0;
    a = a * d_->p + v;
  }
  return a;
}

FE Field::add(FE a, FE b) const {
  const auto p = d_->p;
  if (d_->m == 1) {
    FE s = a + b;
    return s >= p ? s - p : s;
  }
  if (p == 2) return a ^ b;
  FE r = 0, mulp = 1;
  while (a || b) {
    FE s = a % p + b % p;
    if (s >= p) s -= p;
    r += s * mulp;
    mulp *= p;
    a /= p;
    b /= p;
  }
  return r;
}

FE Field::neg(FE a) const {
  const auto p = d_->p;
  if (p == 2) return a;
  if (d_->m == 1) return a == 0 ? 0 : p - a;
  FE r = 0, mulp = 1;
  while (a) {
    FE s = a % p;
    r += (s == 0 ? 0 : p - s) * mulp;
    mulp *= p;
    a /= p;
  }
  return r;
}

FE Field::sub(FE a, FE b) const { return add(a, neg(b)); }

FE Field::mul_generic(FE a, FE b) const {
  const auto p = d_->p;
  const int m = d_->m;
  if (m == 1) return static_cast<FE>((static_cast<unsigned __int128>(a) * b) % p);
  std::uint64_t da[64], db[64], pr[128];
  for (int i = 0; i < m; ++i) {
    da[i] = a % p;
    a /= p;
    db[i] = b % p;
    b /= p;
  }
  for (int i = 0; i < 2 * m - 1; ++i) pr[i] = 0;
  for (int i = 0; i < m; ++i) {
    if (!da[i]) continue;
    for (int j = 0; j < m; ++j) pr[i + j] = (pr[i + j] + da[i] * db[j]) % p;
  }
  const auto& f = d_->mod;
  for (int k = 2 * m - 2; k >= m; --k) {
    std::uint64_t c = pr[k];
    if (!c) continue;
    std::uint64_t nc = p - c;
    for (int j = 0; j < m; ++j)
      if (f[j]) pr[k - m + j] = (pr[k - m + j] + nc * f[j]) % p;
    pr[k] = 0;
  }
  FE r = 0;
  for (int i = m - 1; i >= 0; --i) r = r * p + pr[i];
  return r;
}

FE Field::mul(FE a, FE b) const {
  if (a == 0 || b == 0) return 0;
  if (d_->table) return d_->exp[d_->log[a] + d_->log[b]];
  return mul_generic(a, b);
}

FE Field::pow(FE a, std::uint64_t e) const {
  FE r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

FE Field::inv(FE a) const {
  if (a == 0) fail(ErrorKind::InvalidInput, "inverse of zero");
  if (d_->table) return d_->exp[(d_->q - 1) - d_->log[a]];
  return pow(a, d_->q - 2);
}

FE Field::from_int(std::int64_t v) const {
  std::int64_t p = static_cast<std::int64_t>(d_->p);
  std::int64_t r = v % p;
  if (r < 0) r += p;
  return static_cast<FE>(r);
}

bool Field::is_square(FE a) const {
  if (a == 0 || d_->p == 2) return true;
  if (d_->table) return d_->log[a] % 2 == 0;
  return pow(a, (d_->q - 1) / 2) == 1;
}

FE Field::sqrt(FE a) const {
  if (a == 0) return 0;
  if (d_->p == 2) return pow(a, d_->q / 2);
  if (!is_square(a)) fail(ErrorKind::NotASquare, std::to_string(a) + " is not a square in " + describe());
  FE x;
  if (d_->table) {
    x = d_->exp[d_->log[a] / 2];
  } else {
    // Tonelli-Shanks
    std::uint64_t M = d_->s;
    FE c = pow(d_->nonsq, d_->t);
    FE t = pow(a, d_->t);
    x = pow(a, (d_->t + 1) / 2);
    while (t != 1) {
      std::uint64_t i = 0;
      FE tt = t;
      while (tt != 1) {
        tt = mul(tt, tt);
        ++i;
      }
      FE b = c;
      for (std::uint64_t j = 0; j + 1 < M - i; ++j) b = mul(b, b);
      M = i;
      c = mul(b, b);
      t = mul(t, c);
      x = mul(x, b);
    }
  }
  FE y = neg(x);
  return std::min(x, y);
}

std::uint64_t Field::trace(FE a) const {
  FE s = 0, y = a;
  for (int i = 0; i < d_->m; ++i) {
    s = add(s, y);
    y = frobenius(y);
  }
  return s;
}

FE Field::gen() const { return d_->m > 1 ? d_->p : d_->prim; }
FE Field::primitive() const { return d_->prim; }

std::string Field::describe() const {
  std::ostringstream os;
  os << "GF(" << d_->p;
  if (d_->m > 1) os << "^" << d_->m;
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------- polynomials

namespace poly {

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int deg(const Poly& a) {
  for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i)
    if (a[i] != 0) return i;
  return -1;
}

Poly add(const Field& K, const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < r.size(); ++i)
    r[i] = K.add(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  trim(r);
  return r;
}

Poly sub(const Field& K, const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < r.size(); ++i)
    r[i] = K.sub(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  trim(r);
  return r;
}

Poly mul(const Field& K, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = K.add(r[i + j], K.mul(a[i], b[j]));
  }
  trim(r);
  return r;
}

Poly scale(const Field& K, const Poly& a, FE c) {
  Poly r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = K.mul(a[i], c);
  trim(r);
  return r;
}

void divmod(const Field& K, const Poly& a, const Poly& b, Poly& q, Poly& r) {
  int db = deg(b);
  if (db < 0) fail(ErrorKind::InvalidInput, "polynomial division by zero");
  r = a;
  trim(r);
  int da = deg(r);
  q.assign(da >= db ? da - db + 1 : 0, 0);
  FE ib = K.inv(b[db]);
  while ((da = deg(r)) >= db) {
    FE c = K.mul(r[da], ib);
    q[da - db] = c;
    for (int i = 0; i <= db; ++i) r[da - db + i] = K.sub(r[da - db + i], K.mul(c, b[i]));
    r[da] = 0;
    trim(r);
  }
  trim(q);
}

Poly mod(const Field& K, const Poly& a, const Poly& b) {
  Poly q, r;
  divmod(K, a, b, q, r);
  return r;
}

Poly monic(const Field& K, const Poly& a) {
  int d = deg(a);
  if (d < 0) return {};
  return scale(K, a, K.inv(a[d]));
}

Poly gcd(const Field& K, Poly a, Poly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = mod(K, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(K, a);
}

Poly derivative(const Field& K, const Poly& a) {
  if (a.size() <= 1) return {};
  Poly r(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i) r[i - 1] = K.mul(K.from_int(static_cast<std::int64_t>(i % K.p())), a[i]);
  trim(r);
  return r;
}

Poly powmod(const Field& K, const Poly& base, std::uint64_t e, const Poly& m) {
  Poly r{1};
  r = mod(K, r, m);
  Poly b = mod(K, base, m);
  while (e) {
    if (e & 1) r = mod(K, mul(K, r, b), m);
    b = mod(K, mul(K, b, b), m);
    e >>= 1;
  }
  return r;
}

FE eval(const Field& K, const Poly& a, FE x) {
  FE r = 0;
  for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i) r = K.add(K.mul(r, x), a[i]);
  return r;
}

bool is_irreducible(const Field& K, const Poly& f0) {
  Poly f = monic(K, f0);
  int n = deg(f);
  if (n <= 0) return false;
  if (n == 1) return true;
  const std::uint64_t q = K.order();
  Poly x{0, 1};
  std::vector<Poly> pw(n + 1);  // x^(q^i) mod f
  pw[0] = mod(K, x, f);
  for (int i = 1; i <= n; ++i) pw[i] = powmod(K, pw[i - 1], q, f);
  if (sub(K, pw[n], pw[0]).size() != 0) return false;
  for (auto l : prime_factors(static_cast<std::uint64_t>(n))) {
    Poly g = gcd(K, sub(K, pw[n / l], x), f);
    if (deg(g) > 0) return false;
  }
  return true;
}

namespace {

void split_linear(const Field& K, const Poly& h, Rng& rng, std::vector<FE>& out) {
  int d = deg(h);
  if (d <= 0) return;
  if (d == 1) {
    out.push_back(K.neg(K.div(h[0], h[1])));
    return;
  }
  const std::uint64_t q = K.order();
  int absdeg = 0;
  for (std::uint64_t t = q; t > 1; t /= K.p()) ++absdeg;
  std::uniform_int_distribution<std::uint64_t> dist(0, q - 1);
  for (int attempt = 0; attempt < 4096; ++attempt) {
    FE delta = dist(rng);
    Poly w;
    if (K.p() == 2) {
      Poly y = mod(K, Poly{0, delta}, h);
      if (y.empty()) continue;
      Poly acc = y;
      for (int i = 1; i < absdeg; ++i) {
        y = mod(K, mul(K, y, y), h);
        acc = add(K, acc, y);
      }
      w = acc;
    } else {
      w = powmod(K, Poly{delta, 1}, (q - 1) / 2, h);
      w = sub(K, w, Poly{1});
    }
    Poly g = gcd(K, w, h);
    int dg = deg(g);
    if (dg > 0 && dg < d) {
      Poly qq, rr;
      divmod(K, h, g, qq, rr);
      split_linear(K, g, rng, out);
      split_linear(K, qq, rng, out);
      return;
    }
  }
  fail(ErrorKind::SearchExhausted, "root splitting did not converge");
}

}  // namespace

std::vector<FE> roots(const Field& K, const Poly& f0) {
  Poly f = f0;
  trim(f);
  std::vector<FE> out;
  if (deg(f) <= 0) return out;
  const std::uint64_t q = K.order();
  if (q <= kBruteRootLimit) {
    for (FE x = 0; x < q; ++x)
      if (eval(K, f, x) == 0) out.push_back(x);
    return out;
  }
  f = monic(K, f);
  Poly xq = powmod(K, Poly{0, 1}, q, f);
  Poly h = gcd(K, sub(K, xq, Poly{0, 1}), f);
  Rng rng(0x5eed0001ull + q);
  split_linear(K, h, rng, out);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace poly

// ---------------------------------------------------------------- extensions

FE Extension::embed(FE a) const {
  if (degree == 1) return a;
  if (base.m() == 1) return a;
  auto d = base.digits(a);
  FE r = 0;
  for (int i = static_cast<int>(d.size()) - 1; i >= 0; --i) r = ext.add(ext.mul(r, alpha), static_cast<FE>(d[i]));
  return r;
}

Extension extension(const Field& K, int d) {
  static std::mutex mu;
  static std::map<std::tuple<std::uint64_t, std::vector<std::uint64_t>, int>, Extension> cache;
  auto key = std::make_tuple(K.p(), K.modulus(), d);
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  Extension E;
  E.base = K;
  E.degree = d;
  if (d == 1) {
    E.ext = K;
    E.alpha = K.m() > 1 ? K.gen() : 0;
  } else {
    E.ext = Field(K.p(), K.m() * d);
    if (K.m() > 1) {
      Poly f(K.modulus().begin(), K.modulus().end());
      auto rs = poly::roots(E.ext, f);
      if (rs.empty()) fail(ErrorKind::InvalidInput, "no embedding found");
      E.alpha = rs.front();
    }
  }
  std::lock_guard<std::mutex> lk(mu);
  cache.emplace(key, E);
  return E;
}

FE eval_binary(const Field& K, const std::vector<FE>& F, FE x, FE y) {
  const int n = static_cast<int>(F.size()) - 1;
  FE r = 0;
  for (int i = 0; i <= n; ++i) r = K.add(r, K.mul(F[i], K.mul(K.pow(x, n - i), K.pow(y, i))));
  return r;
}

std::vector<ProjRoot> binary_form_roots(const Field& K, const std::vector<FE>& F, int max_ext) {
  bool allzero = std::all_of(F.begin(), F.end(), [](FE c) { return c == 0; });
  if (allzero) fail(ErrorKind::ZeroForm, "binary form vanishes identically");
  const int n = static_cast<int>(F.size()) - 1;
  Poly g(F.begin(), F.end());
  poly::trim(g);
  const int dg = poly::deg(g);
  std::vector<ProjRoot> out;
  if (dg < n) {
    ProjRoot r;
    r.degree = 1;
    r.mult = n - dg;
    r.field = K;
    r.a = 0;
    r.b = 1;
    out.push_back(r);
  }
  if (dg <= 0) return out;
  Poly g0 = poly::monic(K, g);
  const std::uint64_t q = K.order();
  Poly x{0, 1};
  Poly xq = poly::mod(K, x, g0);
  std::vector<int> found_by_degree(dg + 1, 0);
  std::vector<ProjRoot> finite;
  for (int d = 1; d <= std::min(max_ext, dg); ++d) {
    xq = poly::powmod(K, xq, q, g0);
    Poly A = poly::gcd(K, poly::sub(K, xq, x), g0);
    int known = 0;
    for (int e = 1; e < d; ++e)
      if (d % e == 0) known += found_by_degree[e];
    if (poly::deg(A) <= known) continue;
    Extension E = extension(K, d);
    Poly Ae(A.size()), ge(g.size());
    for (size_t i = 0; i < A.size(); ++i) Ae[i] = E.embed(A[i]);
    for (size_t i = 0; i < g.size(); ++i) ge[i] = E.embed(g[i]);
    const Field& L = E.ext;
    for (FE a : poly::roots(L, Ae)) {
      bool lower = false;
      for (int e = 1; e < d && !lower; ++e) {
        if (d % e) continue;
        FE y = a;
        for (int i = 0; i < e; ++i) y = L.pow(y, q);
        if (y == a) lower = true;
      }
      if (lower) continue;
      int mult = 0;
      Poly cur = ge;
      while (true) {
        Poly qq, rr;
        poly::divmod(L, cur, Poly{L.neg(a), 1}, qq, rr);
        if (!rr.empty()) break;
        ++mult;
        cur = qq;
      }
      ProjRoot r;
      r.degree = d;
      r.mult = mult;
      r.field = L;
      r.a = 1;
      r.b = a;
      finite.push_back(r);
      found_by_degree[d]++;
    }
  }
  std::stable_sort(finite.begin(), finite.end(), [](const ProjRoot& u, const ProjRoot& v) {
    return u.degree != v.degree ? u.degree < v.degree : u.b < v.b;
  });
  // (1:t) roots first, then the point at infinity of t.
  std::vector<ProjRoot> res(finite.begin(), finite.end());
  res.insert(res.end(), out.begin(), out.end());
  return res;
}

// ---------------------------------------------------------------- Galois rings

Ring::Ring(const Field& residue, int N) : F_(residue), N_(N) {
  if (N < 1) fail(ErrorKind::InvalidInput, "precision must be >= 1");
  mpz_ui_pow_ui(pN_.get_mpz_t(), residue.p(), static_cast<unsigned long>(N));
}

void Ring::normalize(RE& a) const {
  for (auto& c : a.c) mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), pN_.get_mpz_t());
}

RE Ring::zero() const { return RE{std::vector<mpz_class>(m(), 0)}; }

RE Ring::one() const {
  RE r = zero();
  r.c[0] = N_ >= 1 ? 1 : 0;
  normalize(r);
  return r;
}

bool Ring::is_zero(const RE& a) const {
  for (auto& c : a.c)
    if (c != 0) return false;
  return true;
}

bool Ring::eq(const RE& a, const RE& b) const { return a.c == b.c; }

RE Ring::add(const RE& a, const RE& b) const {
  RE r = zero();
  for (int i = 0; i < m(); ++i) {
    r.c[i] = a.c[i] + b.c[i];
    if (r.c[i] >= pN_) r.c[i] -= pN_;
  }
  return r;
}

RE Ring::sub(const RE& a, const RE& b) const {
  RE r = zero();
  for (int i = 0; i < m(); ++i) {
    r.c[i] = a.c[i] - b.c[i];
    if (r.c[i] < 0) r.c[i] += pN_;
  }
  return r;
}

RE Ring::neg(const RE& a) const { return sub(zero(), a); }

RE Ring::mul(const RE& a, const RE& b) const {
  const int mm = m();
  if (mm == 1) {
    RE r{std::vector<mpz_class>(1)};
    mpz_mul(r.c[0].get_mpz_t(), a.c[0].get_mpz_t(), b.c[0].get_mpz_t());
    mpz_fdiv_r(r.c[0].get_mpz_t(), r.c[0].get_mpz_t(), pN_.get_mpz_t());
    return r;
  }
  std::vector<mpz_class> pr(2 * mm - 1, 0);
  for (int i = 0; i < mm; ++i) {
    if (a.c[i] == 0) continue;
    for (int j = 0; j < mm; ++j) mpz_addmul(pr[i + j].get_mpz_t(), a.c[i].get_mpz_t(), b.c[j].get_mpz_t());
  }
  const auto& f = F_.modulus();
  for (int k = 2 * mm - 2; k >= mm; --k) {
    if (pr[k] == 0) continue;
    for (int j = 0; j < mm; ++j)
      if (f[j]) mpz_submul_ui(pr[k - mm + j].get_mpz_t(), pr[k].get_mpz_t(), f[j]);
    pr[k] = 0;
  }
  RE r{std::vector<mpz_class>(pr.begin(), pr.begin() + mm)};
  normalize(r);
  return r;
}

RE Ring::from_int(std::int64_t v) const {
  RE r = zero();
  r.c[0] = static_cast<long>(v);
  normalize(r);
  return r;
}

RE Ring::from_mpz(const mpz_class& v) const {
  RE r = zero();
  r.c[0] = v;
  normalize(r);
  return r;
}

RE Ring::from_coeffs(const std::vector<mpz_class>& c) const {
  RE r = zero();
  for (int i = 0; i < m() && i < static_cast<int>(c.size()); ++i) r.c[i] = c[i];
  normalize(r);
  return r;
}

RE Ring::convert(const RE& a) const {
  RE r = zero();
  for (int i = 0; i < m() && i < static_cast<int>(a.c.size()); ++i) r.c[i] = a.c[i];
  normalize(r);
  return r;
}

int Ring::valuation(const RE& a) const {
  int v = N_;
  mpz_class t;
  mpz_class pp = static_cast<unsigned long>(p());
  for (auto& c : a.c) {
    if (c == 0) continue;
    int k = static_cast<int>(mpz_remove(t.get_mpz_t(), c.get_mpz_t(), pp.get_mpz_t()));
    v = std::min(v, k);
  }
  return v;
}

RE Ring::inv(const RE& a) const {
  FE r0 = reduce(a);
  if (r0 == 0) fail(ErrorKind::InvalidInput, "inverse of a non-unit");
  RE x = lift(F_, F_.inv(r0));
  RE two = from_int(2);
  for (int prec = 1; prec < N_; prec *= 2) x = mul(x, sub(two, mul(a, x)));
  return x;
}

RE Ring::pi_pow(int k) const {
  if (k >= N_) return zero();
  mpz_class v;
  mpz_ui_pow_ui(v.get_mpz_t(), p(), static_cast<unsigned long>(k));
  return from_mpz(v);
}

RE Ring::mul_pi(const RE& a, int k) const {
  if (k >= N_) return zero();
  mpz_class v;
  mpz_ui_pow_ui(v.get_mpz_t(), p(), static_cast<unsigned long>(k));
  RE r = a;
  for (auto& c : r.c) c *= v;
  normalize(r);
  return r;
}

RE Ring::div_pi(const RE& a, int k) const {
  if (k == 0) return a;
  mpz_class v;
  mpz_ui_pow_ui(v.get_mpz_t(), p(), static_cast<unsigned long>(k));
  RE r = a;
  for (auto& c : r.c) {
    if (!mpz_divisible_p(c.get_mpz_t(), v.get_mpz_t()))
      fail(ErrorKind::NonIntegralResult, "element not divisible by pi^" + std::to_string(k));
    mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), v.get_mpz_t());
  }
  normalize(r);
  return r;
}

std::pair<int, RE> Ring::split_unit(const RE& a) const {
  int v = valuation(a);
  if (v >= N_) return {N_, zero()};
  return {v, div_pi(a, v)};
}

FE Ring::reduce(const RE& a) const {
  std::vector<std::uint64_t> d(m());
  mpz_class pp = static_cast<unsigned long>(p()), r;
  for (int i = 0; i < m(); ++i) {
    mpz_fdiv_r(r.get_mpz_t(), a.c[i].get_mpz_t(), pp.get_mpz_t());
    d[i] = r.get_ui();
  }
  return F_.from_digits(d);
}

RE Ring::lift(const Field& K, FE a) const {
  if (!K.same_as(F_)) fail(ErrorKind::ContextMismatch, "field does not match the ring residue field");
  auto d = K.digits(a);
  RE r = zero();
  for (int i = 0; i < m(); ++i) r.c[i] = static_cast<unsigned long>(d[i]);
  normalize(r);
  return r;
}

std::string Ring::to_string(const RE& a) const {
  if (m() == 1) return a.c[0].get_str();
  std::string s = "[";
  for (int i = 0; i < m(); ++i) {
    if (i) s += ",";
    s += a.c[i].get_str();
  }
  return s + "]";
}

}  // namespace qp
