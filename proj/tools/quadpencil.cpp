#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "quadpencil/errors.hpp"
#include "quadpencil/io.hpp"
#include "quadpencil/linalg.hpp"
#include "quadpencil/local.hpp"
#include "quadpencil/oracle.hpp"
#include "quadpencil/pencil.hpp"
#include "quadpencil/splitter.hpp"

using namespace qp;

namespace {

enum Exit { Ok = 0, Counterexample = 1, BadInput = 2, Hypothesis = 3 };

int exit_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::HypothesisViolated:
    case ErrorKind::InsufficientPrecision:
    case ErrorKind::SquareDeterminant:
    case ErrorKind::SingularPoint:
    case ErrorKind::ShapeViolation:
    case ErrorKind::SearchExhausted:
    case ErrorKind::NonIntegralResult:
    case ErrorKind::ToleranceAmbiguous:
      return Hypothesis;
    default:
      return BadInput;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::InvalidInput, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidInput, "cannot write " + path);
  out << text << "\n";
}

// --seed, else QUADPENCIL_SEED, else a fresh seed; derived seeds go to stderr.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& given) {
  if (given) return *given;
  std::uint64_t s;
  if (const char* env = std::getenv("QUADPENCIL_SEED")) {
    try {
      s = std::stoull(env);
    } catch (...) {
      fail(ErrorKind::InvalidInput, "QUADPENCIL_SEED is not an integer");
    }
  } else {
    std::random_device rd;
    s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  std::cerr << "seed: " << s << "\n";
  return s;
}

FormFile load_pair(const std::string& path) {
  FormFile f = parse_form_file(read_file(path));
  if (f.count() != 2) fail(ErrorKind::InvalidInput, "expected exactly two forms, found " + std::to_string(f.count()));
  return f;
}

LocalPair local_at(const FormFile& f, std::optional<int> precision) {
  if (!f.local()) fail(ErrorKind::InvalidInput, "local forms required (the file has no precision)");
  LocalPair LP = local_pair_of(f);
  if (!precision || *precision == LP.N()) return LP;
  if (*precision < 1 || *precision > 4096) fail(ErrorKind::InvalidInput, "precision out of range");
  Ring R(f.field, *precision);
  return make_local_pair(R, at_precision(R, LP.Q1), at_precision(R, LP.Q2));
}

json mat_json(const Ring& R, const RMat& A) {
  json out = json::array();
  for (auto& row : A) {
    json r = json::array();
    for (auto& x : row) r.push_back(elem_json(R, x));
    out.push_back(r);
  }
  return out;
}

json vec_json(const Field& K, const FVec& v) {
  json out = json::array();
  for (auto x : v) out.push_back(elem_json(K, x));
  return out;
}

json vec_json(const Ring& R, const RVec& v) {
  json out = json::array();
  for (auto& x : v) out.push_back(elem_json(R, x));
  return out;
}

// Common zero over the field by intersecting q1 with random lines.
std::optional<FVec> field_common_zero(const Field& K, const FForm& q1, const FForm& q2, std::uint64_t seed) {
  const int n = q1.n;
  Rng rng(seed);
  std::uniform_int_distribution<FE> d(0, K.order() - 1);
  for (int it = 0; it < 20000; ++it) {
    FVec u(n), v(n);
    for (auto& e : u) e = d(rng);
    for (auto& e : v) e = d(rng);
    FE a = evaluate(K, q1, u), b = polar(K, q1, u, v), c = evaluate(K, q1, v);
    if (!a && !b && !c) continue;
    for (auto [s, t] : binary_quadratic_zeros(K, a, b, c)) {
      FVec w(n);
      bool nz = false;
      for (int i = 0; i < n; ++i) {
        w[i] = K.add(K.mul(s, u[i]), K.mul(t, v[i]));
        nz |= w[i] != 0;
      }
      if (nz && evaluate(K, q2, w) == 0) return w;
    }
  }
  return std::nullopt;
}

// Members (0:1), (1:0), (1:1), ... in canonical order, at most 64.
std::vector<std::pair<FE, FE>> sample_members(const Field& K) {
  std::vector<std::pair<FE, FE>> out{{0, 1}};
  for (FE t = 0; t < K.order() && out.size() < 64; ++t) out.push_back({1, t});
  return out;
}

int cmd_analyze(const std::string& input, std::optional<std::uint64_t> seed_opt, bool text) {
  FormFile f = load_pair(input);
  const Field& K = f.field;
  FForm q1, q2;
  json rep = json::object();
  rep["field"] = field_json(K);
  rep["n"] = f.n;
  std::optional<LocalPair> LP;
  if (f.local()) {
    LP = local_pair_of(f);
    rep["precision"] = LP->N();
    std::tie(q1, q2) = reduce_pair(*LP);
  } else {
    q1 = f.fforms[0];
    q2 = f.fforms[1];
  }
  auto inv = invariants(K, q1, q2);
  rep["r"] = inv.r;
  rep["R"] = inv.R;
  rep["r_min"] = inv.r_min;
  json F = json::array();
  if (LP) {
    for (auto& c : local_pencil_F(LP->R, LP->Q1, LP->Q2)) F.push_back(elem_json(LP->R, c));
    try {
      rep["v_delta"] = delta_valuation(*LP);
    } catch (const Error&) {
      rep["v_delta"] = nullptr;  // F vanishes at working precision
    }
  } else {
    for (auto c : pencil_F(K, q1, q2)) F.push_back(elem_json(K, c));
  }
  rep["F"] = F;
  json members = json::array();
  for (auto [a, b] : sample_members(K)) {
    json m = json::object();
    m["a"] = elem_json(K, a);
    m["b"] = elem_json(K, b);
    FForm qm = combine(K, a, q1, b, q2);
    m["rank"] = rank_of(K, qm);
    if (LP) {
      const Ring& R = LP->R;
      RE d = det(R, matrix_of(R, combine(R, R.lift(K, a), LP->Q1, R.lift(K, b), LP->Q2)));
      m["det_valuation"] = R.valuation(d) < R.N() ? json(R.valuation(d)) : json(nullptr);
      m["det_square"] = R.valuation(d) < R.N() ? json(is_square_element(R, d)) : json(nullptr);
    } else {
      FE d = det_of(K, qm);
      m["det_square"] = d ? json(K.is_square(d)) : json(nullptr);
    }
    members.push_back(m);
  }
  rep["members"] = members;
  const std::uint64_t seed = resolve_seed(seed_opt);
  if (LP) {
    auto z = smooth_local_zero(*LP, 200000, seed);
    rep["common_zero"] = z ? vec_json(LP->R, *z) : json(nullptr);
    rep["common_zero_kind"] = z ? "smooth local zero" : "none found";
  } else {
    auto z = field_common_zero(K, q1, q2, seed);
    rep["common_zero"] = z ? vec_json(K, *z) : json(nullptr);
    rep["common_zero_kind"] = z ? (is_singular_common_zero(K, q1, q2, *z) ? "singular" : "nonsingular") : "none found";
  }
  if (!text) {
    std::cout << rep.dump(2) << "\n";
    return Ok;
  }
  std::cout << "field " << K.describe();
  if (LP) std::cout << "  precision " << LP->N();
  std::cout << "  n " << f.n << "\n";
  std::cout << "r " << inv.r << "  R " << inv.R << "  r_min " << inv.r_min;
  if (rep.contains("v_delta")) std::cout << "  v(Delta) " << (rep["v_delta"].is_null() ? std::string("inf") : rep["v_delta"].dump());
  std::cout << "\nF " << rep["F"].dump() << "\n";
  for (auto& m : members) std::cout << "  member (" << m["a"].dump() << ":" << m["b"].dump() << ")  rank " << m["rank"] << "  det square " << m["det_square"].dump() << "\n";
  std::cout << "common zero: " << rep["common_zero_kind"].get<std::string>();
  if (!rep["common_zero"].is_null()) std::cout << " " << rep["common_zero"].dump();
  std::cout << "\n";
  return Ok;
}

int cmd_minimize(const std::string& input, std::optional<int> precision, const std::string& output) {
  FormFile f = load_pair(input);
  LocalPair LP = local_at(f, precision);
  MinimizeResult m = minimize(LP);
  FormFile g = make_form_file(m.pair.R, {m.pair.Q1, m.pair.Q2});
  g.field = f.field;
  g.explicit_modulus = f.explicit_modulus;
  json rep = json::object();
  rep["v_delta_before"] = m.v_before;
  rep["v_delta_after"] = m.v_after;
  rep["catalog_minimal"] = m.catalog_minimal;
  rep["moves"] = m.moves;
  rep["transform"] = json{{"kU", m.W.kU}, {"U", mat_json(LP.R, m.W.U)}, {"kT", m.W.kT}, {"T", mat_json(LP.R, m.W.T)}};
  rep["pair"] = to_json(g);
  if (!output.empty()) write_out(output, to_json(g).dump(2));
  std::cout << rep.dump(2) << "\n";
  return Ok;
}

int cmd_split3h(const std::string& input, std::optional<int> precision, bool force, std::optional<std::uint64_t> seed_opt, const std::string& output, bool trace_out) {
  FormFile f = load_pair(input);
  LocalPair LP = local_at(f, precision);
  SplitOptions opts;
  opts.force = force;
  opts.seed = resolve_seed(seed_opt);
  try {
    auto [C, trace] = split3h(LP, opts);
    if (trace_out) std::cerr << trace.to_string();
    if (!recheck_certificate(LP, C)) {
      std::cerr << "error: the certificate failed re-evaluation\n";
      return Hypothesis;
    }
    if (force && LP.R.residue().order() < 32)
      std::cerr << "forced run below the residue field threshold: outcome reported, not a theorem claim\n";
    write_out(output, to_json(LP.R, C).dump(2));
    return Ok;
  } catch (const Error& e) {
    if (force) std::cerr << "forced run outcome: no certificate\n";
    throw;
  }
}

int cmd_verify_cert(const std::string& input, const std::string& cert, std::optional<int> precision) {
  FormFile f = load_pair(input);
  LocalPair LP = local_at(f, precision);
  json cj;
  try {
    cj = json::parse(read_file(cert));
  } catch (const json::parse_error& e) {
    fail(ErrorKind::InvalidInput, "certificate: malformed JSON at byte " + std::to_string(e.byte));
  }
  SplitCertificate C = certificate_from_json(LP.R, LP.n(), cj);
  if (recheck_certificate(LP, C)) {
    std::cout << "certificate verified: " << C.split.s << " hyperbolic planes modulo " << LP.R.residue().p() << "^" << LP.N() << "\n";
    return Ok;
  }
  std::cout << "certificate rejected\n";
  return Counterexample;
}

int cmd_verify(const std::string& lemma, const std::string& field, const std::string& mode, std::uint64_t trials, std::optional<std::uint64_t> seed_opt, int jobs,
               int precision, int n, bool as_json) {
  if (mode != "exhaustive" && mode != "sampled") fail(ErrorKind::InvalidInput, "mode must be exhaustive or sampled");
  OracleCtx ctx{parse_field_spec(field), precision, n, jobs};
  const std::uint64_t seed = resolve_seed(seed_opt);
  LemmaReport r = verify_lemma(lemma, ctx, mode == "exhaustive" ? OracleMode::Exhaustive : OracleMode::Sampled, trials, seed);
  if (as_json) {
    json j = r.to_json();
    j["seed"] = seed;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << r.summary() << "\n";
    for (auto& fj : r.failures) std::cout << fj.dump() << "\n";
  }
  return r.pass() ? Ok : Counterexample;
}

int cmd_gen(const std::string& profile, const std::string& field, std::optional<std::uint64_t> seed_opt, int precision, int n, const std::string& output) {
  Profile P = parse_profile(profile);
  Field K = parse_field_spec(field);
  if (n < 2 || n > 16) fail(ErrorKind::InvalidInput, "n out of range");
  if (P.r < 0 || P.r > n || P.R > n || P.R < P.r) fail(ErrorKind::InvalidInput, "infeasible profile: need r <= R <= n");
  if (precision < 2 || precision > 4096) fail(ErrorKind::InvalidInput, "precision out of range");
  const std::uint64_t seed = resolve_seed(seed_opt);
  Ring R(K, precision);
  LocalPair LP;
  try {
    LP = plant_pair(R, seed, P, n);
  } catch (const Error& e) {
    // The profile is feasible; low r or R push v(Delta) past the precision.
    if (e.kind() == ErrorKind::GenerationExhausted)
      fail(ErrorKind::InsufficientPrecision, "no nonsingular pair with this profile at precision " + std::to_string(precision) + "; try a larger --precision");
    throw;
  }
  write_out(output, to_json(make_form_file(R, {LP.Q1, LP.Q2})).dump(2));
  return Ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quadpencil: pencils of quadratic forms over finite fields and Galois rings"};
  app.require_subcommand(1);

  std::string input, cert, output, lemma, field = "37", mode = "sampled", profile = "r=8,R=8,zero";
  std::optional<int> precision;
  std::optional<std::uint64_t> seed;
  std::uint64_t trials = 100;
  int jobs = 1, lemma_precision = 40, gen_precision = 40, n = 0, gen_n = 8;
  bool text = false, force = false, as_json = false, trace = false;

  auto* analyze = app.add_subcommand("analyze", "Pencil invariants, member ranks and a common zero");
  analyze->add_option("--input", input, "FormFile with two forms")->required();
  analyze->add_option("--seed", seed, "Seed for the common zero search");
  analyze->add_flag("--text", text, "Plain-text report");

  auto* mini = app.add_subcommand("minimize", "Catalog minimization of a local pair");
  mini->add_option("--input", input)->required();
  mini->add_option("--precision", precision, "Working precision N");
  mini->add_option("--output", output, "Also write the minimized FormFile here");

  auto* split = app.add_subcommand("split3h", "Certificate for a member splitting off three hyperbolic planes");
  split->add_option("--input", input)->required();
  split->add_option("--precision", precision);
  split->add_option("--seed", seed);
  split->add_option("--output", output, "Certificate file (default stdout)");
  split->add_flag("--force", force, "Run below the residue field threshold, without a theorem claim");
  split->add_flag("--trace", trace, "Print the case trace to stderr");

  auto* vcert = app.add_subcommand("verify-cert", "Re-evaluate a split certificate");
  vcert->add_option("--input", input)->required();
  vcert->add_option("--cert", cert)->required();
  vcert->add_option("--precision", precision);

  auto* verify = app.add_subcommand("verify", "Check a lemma by exhaustive or sampled enumeration");
  verify->add_option("--lemma", lemma)->required();
  verify->add_option("--field", field, "p or p^m")->required();
  verify->add_option("--mode", mode, "exhaustive or sampled");
  verify->add_option("--trials", trials);
  verify->add_option("--seed", seed);
  verify->add_option("--jobs", jobs)->check(CLI::Range(1, 256));
  verify->add_option("--precision", lemma_precision);
  verify->add_option("--n", n, "Variable count (0 for the lemma's default)");
  verify->add_flag("--json", as_json, "Full JSON report");

  auto* gen = app.add_subcommand("gen", "Generate a planted local pair");
  gen->add_option("--profile", profile, "r=K,R=K,zero|nozero");
  gen->add_option("--field", field, "Residue field p or p^m");
  gen->add_option("--seed", seed);
  gen->add_option("--precision", gen_precision);
  gen->add_option("--n", gen_n);
  gen->add_option("--output", output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return BadInput;
  }

  try {
    if (*analyze) return cmd_analyze(input, seed, text);
    if (*mini) return cmd_minimize(input, precision, output);
    if (*split) return cmd_split3h(input, precision, force, seed, output, trace);
    if (*vcert) return cmd_verify_cert(input, cert, precision);
    if (*verify) return cmd_verify(lemma, field, mode, trials, seed, jobs, lemma_precision, n, as_json);
    if (*gen) return cmd_gen(profile, field, seed, gen_precision, gen_n, output);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e.kind());
  }
  return BadInput;
}
