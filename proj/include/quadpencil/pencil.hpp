#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quadpencil/quadform.hpp"

namespace qp {

// det(x M(q1) + y M(q2)) as a binary form of degree n (coefficient of
// x^(n-i) y^i at index i). In characteristic 2 with n odd, the
// half-determinant form: lift to GR(4, m), take the determinant, halve.
std::vector<FE> pencil_F(const Field& K, const FForm& q1, const FForm& q2);

// Basis of the vertex space shared by every member of the pencil.
std::vector<FVec> common_vertex_space(const Field& K, const FForm& q1, const FForm& q2);
int big_R(const Field& K, const FForm& q1, const FForm& q2);
// Generic rank: the maximum over more than n points of P^1 in a large enough
// extension, since rank drops happen at no more than n points.
int small_r(const Field& K, const FForm& q1, const FForm& q2);
int r_min(const Field& K, const FForm& q1, const FForm& q2);

struct PencilInvariants {
  int r = 0, R = 0, r_min = 0;
  std::vector<FE> F;
};
PencilInvariants invariants(const Field& K, const FForm& q1, const FForm& q2);

// Result of a basis change U of the pencil followed by a change of variables T:
// q1 = U00 q1_in + U01 q2_in, q2 = U10 q1_in + U11 q2_in, then X -> T X.
struct ShapeReport {
  std::string kind;  // shape1, shape2a (XrXR), shape2b (X_{r+1}^2), shape2c (X_{r+1}^2 + X_r X_{r+1})
  FMat U;
  FMat T;
  FForm q1, q2;
  int r = 0, R = 0;
  std::map<std::string, FForm> parts;
};

// Transform of a pencil by (U, T) as in ShapeReport.
std::pair<FForm, FForm> transform_pencil(const Field& K, const FMat& U, const FMat& T, const FForm& q1, const FForm& q2);

ShapeReport normalize_shape1(const Field& K, const FForm& q1, const FForm& q2);
ShapeReport normalize_shape2(const Field& K, const FForm& q1, const FForm& q2);

struct PeelResult {
  FMat U, T;
  FForm q1, q2;  // transformed pencil
  FForm q3, q4;  // in R-2 variables
  FVec ell;      // coefficients of l(X_1..X_{R-1})
  int r = 0, R = 0;
};

// q1 = q3(X_1..X_{R-2}) + X_{R-1} l(X_1..X_{R-1}), q2 = q4(X_1..X_{R-2}) + X_{R-1} X_R.
PeelResult peel_r2(const Field& K, const FForm& q1, const FForm& q2);

struct SingularZero {
  bool full_rank = false;  // r = 4, no zero claimed
  FVec x;
  std::string route;  // construction used
};

bool is_singular_common_zero(const Field& K, const FForm& q1, const FForm& q2, const FVec& x);
SingularZero singular_common_zero_4(const Field& K, const FForm& q1, const FForm& q2);

struct BinaryCounts {
  std::uint64_t Nh = 0, Na = 0, Nr = 0;
};

enum class BinaryKind { Hyperbolic, Anisotropic, Repeated };
BinaryKind classify_binary(const Field& K, FE a, FE b, FE c);
BinaryCounts classify_binary_pencil(const Field& K, const FForm& s1, const FForm& s2);
// Resultant of two binary quadratic forms; zero iff they share a factor.
FE binary_resultant(const Field& K, const FForm& s1, const FForm& s2);

}  // namespace qp
