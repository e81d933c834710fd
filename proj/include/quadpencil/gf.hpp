#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "quadpencil/errors.hpp"

namespace qp {

// Field elements are encoded as integers sum c_i p^i, constant coefficient first.
using FE = std::uint64_t;

class Field {
 public:
  Field() = default;
  // modulus: monic, constant coefficient first, length m+1. Empty means
  // the smallest irreducible polynomial by integer encoding of its lower
  // coefficients.
  Field(std::uint64_t p, int m, std::vector<std::uint64_t> modulus = {});

  std::uint64_t p() const;
  int m() const;
  std::uint64_t order() const;
  const std::vector<std::uint64_t>& modulus() const;
  bool same_as(const Field& o) const;
  bool valid() const { return d_ != nullptr; }

  FE zero() const { return 0; }
  FE one() const { return 1; }
  bool is_zero(FE a) const { return a == 0; }
  bool eq(FE a, FE b) const { return a == b; }
  FE add(FE a, FE b) const;
  FE sub(FE a, FE b) const;
  FE neg(FE a) const;
  FE mul(FE a, FE b) const;
  FE inv(FE a) const;
  FE div(FE a, FE b) const { return mul(a, inv(b)); }
  FE pow(FE a, std::uint64_t e) const;
  FE from_int(std::int64_t v) const;

  std::vector<std::uint64_t> digits(FE a) const;
  FE from_digits(const std::vector<std::uint64_t>& c) const;

  bool is_square(FE a) const;
  // Odd characteristic: the root with the smaller encoding. Char 2: a^(q/2).
  FE sqrt(FE a) const;
  FE frobenius(FE a) const { return pow(a, p()); }
  // Absolute trace to GF(p).
  std::uint64_t trace(FE a) const;
  // The class of x in GF(p)[x]/(modulus); equals p when m > 1.
  FE gen() const;
  FE primitive() const;
  std::string describe() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> d_;
  FE mul_generic(FE a, FE b) const;
};

bool is_prime_u64(std::uint64_t n);

// Polynomials over a Field, coefficient of t^i at index i, trimmed.
using Poly = std::vector<FE>;

namespace poly {
void trim(Poly& a);
int deg(const Poly& a);
Poly add(const Field& K, const Poly& a, const Poly& b);
Poly sub(const Field& K, const Poly& a, const Poly& b);
Poly mul(const Field& K, const Poly& a, const Poly& b);
Poly scale(const Field& K, const Poly& a, FE c);
void divmod(const Field& K, const Poly& a, const Poly& b, Poly& q, Poly& r);
Poly mod(const Field& K, const Poly& a, const Poly& b);
Poly monic(const Field& K, const Poly& a);
Poly gcd(const Field& K, Poly a, Poly b);
Poly derivative(const Field& K, const Poly& a);
Poly powmod(const Field& K, const Poly& base, std::uint64_t e, const Poly& m);
FE eval(const Field& K, const Poly& a, FE x);
bool is_irreducible(const Field& K, const Poly& f);
// All distinct roots lying in K itself, ascending by encoding.
std::vector<FE> roots(const Field& K, const Poly& f);
}  // namespace poly

// Degree-d extension of K with an explicit embedding K -> ext.
struct Extension {
  Field base;
  Field ext;
  int degree = 1;
  FE alpha = 0;  // image of the class of x under the embedding (unused when base.m()==1)
  FE embed(FE a) const;
};

Extension extension(const Field& K, int d);

struct ProjRoot {
  int degree = 1;   // minimal extension degree over the base field
  int mult = 1;
  Field field;      // field of definition holding a, b
  FE a = 0, b = 0;  // projective point (a:b) with F(a,b)=0
};

// F(x,y) = sum_i c[i] x^(n-i) y^i.
std::vector<ProjRoot> binary_form_roots(const Field& K, const std::vector<FE>& F, int max_ext);
FE eval_binary(const Field& K, const std::vector<FE>& F, FE x, FE y);

// Galois ring GR(p^N, m): residue ring of the unramified extension, uniformizer p.
struct RE {
  std::vector<mpz_class> c;
};

class Ring {
 public:
  Ring() = default;
  Ring(const Field& residue, int N);

  const Field& residue() const { return F_; }
  std::uint64_t p() const { return F_.p(); }
  int m() const { return F_.m(); }
  int N() const { return N_; }
  const mpz_class& pN() const { return pN_; }
  bool same_as(const Ring& o) const { return N_ == o.N_ && F_.same_as(o.F_); }
  Ring with_precision(int N) const { return Ring(F_, N); }

  RE zero() const;
  RE one() const;
  bool is_zero(const RE& a) const;
  bool eq(const RE& a, const RE& b) const;
  RE add(const RE& a, const RE& b) const;
  RE sub(const RE& a, const RE& b) const;
  RE neg(const RE& a) const;
  RE mul(const RE& a, const RE& b) const;
  RE from_int(std::int64_t v) const;
  RE from_mpz(const mpz_class& v) const;
  RE from_coeffs(const std::vector<mpz_class>& c) const;
  // Re-reduce an element that came from another precision.
  RE convert(const RE& a) const;

  int valuation(const RE& a) const;
  bool is_unit(const RE& a) const { return valuation(a) == 0; }
  RE inv(const RE& a) const;  // a must be a unit
  RE pi_pow(int k) const;
  RE mul_pi(const RE& a, int k) const;
  // a / pi^k, requires divisibility of the representative.
  RE div_pi(const RE& a, int k) const;
  // Splits a = pi^v u with u a unit (u defined modulo p^(N-v)); v = N for zero.
  std::pair<int, RE> split_unit(const RE& a) const;

  FE reduce(const RE& a) const;
  RE lift(const Field& K, FE a) const;
  std::string to_string(const RE& a) const;

 private:
  Field F_;
  int N_ = 0;
  mpz_class pN_;
  void normalize(RE& a) const;
};

// Deterministic pseudo random source shared by searches and generators.
using Rng = std::mt19937_64;

}  // namespace qp
