#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "quadpencil/local.hpp"
#include "quadpencil/pencil.hpp"

namespace qp {

struct TraceStep {
  std::string lemma;   // case or sub-step name
  std::string detail;  // transforms applied, branch taken
  std::map<std::string, int> invariants;
};

struct CaseTrace {
  std::vector<TraceStep> steps;
  void add(std::string lemma, std::string detail, std::map<std::string, int> inv = {});
  std::string to_string() const;
};

struct SplitOptions {
  bool force = false;            // run below the residue field size thresholds
  bool check_minimal = true;     // require catalog-minimality where a case needs it
  std::uint64_t seed = 1;
  std::uint64_t budget = 200000;  // residue zero searches
};

// A member a Q1 + b Q2 splitting off three hyperbolic planes, with a trace of
// the route. HypothesisViolated when the residue field is below 32 (unless
// forced) or the pair contradicts the hypotheses of the case it lands in.
std::pair<SplitCertificate, CaseTrace> split3h(const LocalPair& LP, const SplitOptions& opts = {});

// Individual cases; each checks its own preconditions (PreconditionViolated).
SplitCertificate case_r7(const LocalPair& LP, const SplitOptions& opts = {}, CaseTrace* trace = nullptr);
SplitCertificate case_R5(const LocalPair& LP, const SplitOptions& opts = {}, CaseTrace* trace = nullptr);
SplitCertificate case_R6(const LocalPair& LP, const SplitOptions& opts = {}, CaseTrace* trace = nullptr);
SplitCertificate case_R7(const LocalPair& LP, const SplitOptions& opts = {}, CaseTrace* trace = nullptr);
SplitCertificate case_R8(const LocalPair& LP, const SplitOptions& opts = {}, CaseTrace* trace = nullptr);
SplitCertificate case_rank2(const LocalPair& LP, const SplitOptions& opts = {}, CaseTrace* trace = nullptr);

// Q1(X1..X5, 0, 0, 0) = X1X2 + X3X4 mod pi and Q2(e5) a unit. Finds lambda
// with (S1 - lambda S2) equivalent to X1X2 + X3X4 on the first five
// variables, then splits Q1 - lambda Q2 directly or, when that member is
// singular at precision, a nearby member of odd determinant valuation.
SplitCertificate the_lemma(const LocalPair& LP, CaseTrace* trace = nullptr);
// As the_lemma, also accepting pi || Q2(e5) when pi^2 | Q1(e5) and
// Q2(X1..X5, 0, 0, 0) = Q2'(X1..X4) mod pi, by a rescaling to the_lemma.
SplitCertificate tl_plus(const LocalPair& LP, CaseTrace* trace = nullptr);

// Member search used where no dedicated construction finishes a case:
// residue splits with Hensel lifting, nonsquare determinants, general local
// splitting, then members near the residue roots of F. SearchExhausted if
// nothing is found.
SplitCertificate member_search(const LocalPair& LP, const SplitOptions& opts = {}, CaseTrace* trace = nullptr);

// Four-variable residue forms q1 = Y0Y1 + s1(Y1,Y2,Y3), q2 = Y0Y2 + s2(Y1,Y2,Y3).
struct SevenLResult {
  std::optional<FVec> singular_zero;
  std::vector<std::pair<FE, FE>> pairs;  // (a, b) with a q1 + b q2 two hyperbolic planes
  std::uint64_t singular_members = 0;    // (a, b) with a q1 + b q2 of rank < 4
  std::uint64_t nonsplit_members = 0;    // rank 4, not two planes
  std::uint64_t good_a = 0;              // values a of the normalized family with a root of f_a
  std::string route;
};
SevenLResult lemma_7l_pairs(const Field& K, const FForm& q1, const FForm& q2);
bool is_two_planes(const Field& K, const FForm& q);

// ---------------------------------------------------------------- real case

struct RealPencil {
  Eigen::MatrixXd A, B;  // symmetric 8 x 8
  double eps = 1e-9;
};

struct Signature {
  int plus = 0, minus = 0, zero = 0;
};
Signature real_signature(const Eigen::MatrixXd& M, double eps);

struct RealSplit {
  double theta = 0;  // member sin(theta) A + cos(theta) B
  double a = 0, b = 0;
  Signature sig;
  Eigen::MatrixXd member;
  bool refined = false;  // the default grid did not suffice
};
RealSplit real_split3h(const RealPencil& RP, int grid = 720);

}  // namespace qp
