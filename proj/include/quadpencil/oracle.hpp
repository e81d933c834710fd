#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quadpencil/io.hpp"

namespace qp {

enum class OracleMode { Exhaustive, Sampled };

struct OracleCtx {
  Field field;
  int precision = 40;  // for lemmas over the local ring
  int n = 0;           // variable count; 0 picks the lemma's default
  int jobs = 1;
};

struct LemmaReport {
  std::string id;
  std::string field;
  int p = 0, m = 0;
  std::optional<int> precision;
  OracleMode mode = OracleMode::Sampled;
  std::uint64_t trials = 0;  // instances meeting the hypotheses
  std::uint64_t draws = 0;   // raw instances generated
  std::vector<json> failures;
  std::map<std::string, double> stats;
  double wall_seconds = 0;
  bool pass() const { return failures.empty(); }
  json to_json() const;
  std::string summary() const;
};

const std::vector<std::string>& lemma_ids();

// Checks the lemma's statement on every instance (exhaustive) or on `trials`
// sampled instances meeting its hypotheses. Sampled draws are uniform over
// raw coefficient tuples of the lemma's presentation, rejected to the
// hypotheses; instance i uses its own generator derived from (seed, i), so
// the report does not depend on ctx.jobs. BudgetExceeded when an exhaustive
// enumeration exceeds 2^26 items or the lemma has no finite enumeration;
// PreconditionViolated when the field cannot meet the lemma's hypotheses;
// InvalidInput for an unknown id.
LemmaReport verify_lemma(const std::string& id, const OracleCtx& ctx, OracleMode mode, std::uint64_t trials, std::uint64_t seed);

// Coefficients of q(T X) recomputed by polarization at the columns of T.
template <class Ctx, class E>
QForm<E> form_at_columns(const Ctx& K, const QForm<E>& q, const Mat<E>& T) {
  const int n = q.n;
  const int k = n ? static_cast<int>(T[0].size()) : 0;
  std::vector<Vec<E>> t(k, Vec<E>(n));
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) t[j][i] = T[i][j];
  auto out = zero_form(K, k);
  std::vector<E> d(k);
  for (int i = 0; i < k; ++i) d[i] = evaluate(K, q, t[i]);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      if (i == j) {
        coef(out, i, i) = d[i];
        continue;
      }
      Vec<E> s(n);
      for (int a = 0; a < n; ++a) s[a] = K.add(t[i][a], t[j][a]);
      coef(out, i, j) = K.sub(K.sub(evaluate(K, q, s), d[i]), d[j]);
    }
  return out;
}

}  // namespace qp
