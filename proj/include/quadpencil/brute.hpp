#pragma once

#include <cstdint>
#include <functional>

#include "quadpencil/quadform.hpp"

namespace qp {

// Definitional oracles by exhaustive enumeration. They share no code with the
// fast paths beyond field arithmetic and form evaluation.

// Calls f on every vector of K^n (including 0), first coordinate fastest.
void for_each_vector(const Field& K, int n, const std::function<void(const FVec&)>& f);

// Number of vertices: v with q(x + v) = q(x) for all x. Since q(x+v) - q(x)
// is affine in x it is enough to test x = 0 and x = e_i.
std::uint64_t brute_vertex_count(const Field& K, const FForm& q);
std::uint64_t brute_common_vertex_count(const Field& K, const FForm& q1, const FForm& q2);

// n minus the vertex dimension by enumeration; BudgetExceeded when
// #K^n > limit.
int brute_rank(const Field& K, const FForm& q, std::uint64_t limit = 1u << 16);

// Largest k with a nonvanishing k x k minor of M(q), or in characteristic 2
// with k odd a nonvanishing principal half-determinant. Minor expansion only.
int minor_rank(const Field& K, const FForm& q);

struct PencilRanks {
  int r = 0, R = 0, r_min = 0;
};

// Members a q1 + b q2 over all (a:b) in P^1(GF(q^k)), k = 1..n; R from the
// common vertex count or, for n <= 3 over GF(2), from a search over GL_n.
PencilRanks brute_pencil_ranks(const Field& K, const FForm& q1, const FForm& q2, std::uint64_t budget = 1u << 26);

}  // namespace qp
