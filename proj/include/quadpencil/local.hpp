#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quadpencil/pencil.hpp"
#include "quadpencil/quadform.hpp"

namespace qp {

// Two forms over GR(p^N, m). Stored representatives are treated as exact
// p-adic integers; every derived quantity is correct modulo p^N.
struct LocalPair {
  Ring R;
  RForm Q1, Q2;
  int n() const { return Q1.n; }
  int N() const { return R.N(); }
};

LocalPair make_local_pair(const Ring& R, RForm Q1, RForm Q2);
LocalPair lift_pair(const Ring& R, const Field& K, const FForm& q1, const FForm& q2);
std::pair<FForm, FForm> reduce_pair(const LocalPair& LP);
// Same representatives at another precision.
RForm at_precision(const Ring& R, const RForm& Q);

// det(x M(Q1) + y M(Q2)) over the ring.
std::vector<RE> local_pencil_F(const Ring& R, const RForm& Q1, const RForm& Q2);
// Valuation of the discriminant of a binary form given by coefficients
// (x^(n-i) y^i at index i); InsufficientPrecision when it is >= R.N().
int binary_disc_valuation(const Ring& R, const std::vector<RE>& F);
int delta_valuation(const LocalPair& LP);

// U = pi^(-kU) Ut (2x2), T = pi^(-kT) Tt (n x n), Ut and Tt integral.
struct TransformPair {
  RMat U;
  int kU = 0;
  RMat T;
  int kT = 0;
};

TransformPair identity_transform(const Ring& R, int n);
int det_valuation(const Ring& R, const RMat& A, int k);  // v(det(pi^-k A))
int v_det_U(const Ring& R, const TransformPair& W);
int v_det_T(const Ring& R, const TransformPair& W);
// Predicted change of v(Delta): n(n-1) v(det U) + 4(n-1) v(det T).
int delta_change(const Ring& R, const TransformPair& W, int n);
// The transform acting as `first` and then `second`.
TransformPair compose(const Ring& R, const TransformPair& first, const TransformPair& second);
// (Q1, Q2)^U_T; NonIntegralResult when a coefficient leaves the ring.
LocalPair act(const LocalPair& LP, const TransformPair& W);

struct HenselResult {
  RMat T;    // unimodular
  RForm Q0;  // in the last n - 2s variables
};
// Q must reduce to X1X2 + ... + X_{2s-1}X_{2s} + (form in the remaining
// variables); returns T with Q(TX) = X1X2 + ... + Q0 exactly mod p^N.
HenselResult hensel_split(const Ring& R, const RForm& Q, int s);

// Q(Tt X) = pi^(2e) (X1X2 + ... + X_{2s-1}X_{2s}) + W(X_{2s+1}, ..., X_n).
// Over the fraction field T = Tt diag(pi^(-2e), 1, ...) gives the exact
// hyperbolic planes.
struct FormSplit {
  int s = 0;
  int e = 0;
  RMat T;
  RForm W;
};
bool verify_form_split(const Ring& R, const RForm& Q, const FormSplit& S);

// Square class tests for a unit of the ring.
bool is_unit_square(const Ring& R, const RE& u);
bool is_square_element(const Ring& R, const RE& a);  // InsufficientPrecision for 0

// Primitive x with Q(x) = 0 mod p^N, by residue search, Hensel lifting and
// descent through the residue vertex space.
std::optional<RVec> local_isotropic_vector(const Ring& R, const RForm& Q, int depth = 0, ZeroSearch opts = {});
// Up to s hyperbolic planes over the fraction field; nullopt if fewer found.
std::optional<FormSplit> local_split(const Ring& R, const RForm& Q, int s, ZeroSearch opts = {});
// Three planes for an 8-variable form of nonsquare determinant.
FormSplit split_by_nonsquare_det(const Ring& R, const RForm& Q);

struct SplitCertificate {
  RE a, b;
  FormSplit split;  // of a Q1 + b Q2, with s = 3
};
// Pure re-evaluation check of the certificate identity modulo p^N.
bool verify_certificate(const LocalPair& LP, const SplitCertificate& C);

struct Witness {
  std::string move;  // member, notmin, x8, r4
  TransformPair W;
};
std::optional<Witness> nonmin_witness(const LocalPair& LP, ZeroSearch opts = {});

struct MinimizeResult {
  TransformPair W;
  LocalPair pair;
  std::vector<std::string> moves;
  int v_before = 0, v_after = 0;
  bool catalog_minimal = true;
};
MinimizeResult minimize(const LocalPair& LP, int max_steps = 64);

// Common zero with an entry a unit and Jacobian of rank 2 modulo pi.
std::optional<RVec> smooth_local_zero(const LocalPair& LP, std::uint64_t budget = 200000, std::uint64_t seed = 1);
bool is_local_zero(const LocalPair& LP, const RVec& x);

struct Profile {
  int r = 8, R = 8;
  bool zero = true;
  bool nonsingular = true;
};
// Residue pencil with the requested (r, R), hidden by a random change of
// variables.
std::pair<FForm, FForm> random_profile_pencil(const Field& K, int n, int r, int R, Rng& rng);
LocalPair plant_pair(const Ring& R, std::uint64_t seed, const Profile& P, int n = 8, int attempts = 200);

}  // namespace qp
