#include "quadpencil/io.hpp"

#include "quadpencil/errors.hpp"
#include "quadpencil/linalg.hpp"

namespace qp {

namespace {

[[noreturn]] void bad(const std::string& msg) { fail(ErrorKind::InvalidInput, msg); }

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) bad(where + ": missing \"" + key + "\"");
  return j.at(key);
}

std::uint64_t parse_u64(const json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s.empty() || s.size() > 19 || s.find_first_not_of("0123456789") != std::string::npos) bad(where + ": not a small decimal integer");
    return std::stoull(s);
  }
  bad(where + ": expected a non-negative integer");
}

mpz_class parse_mpz(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where + ": elements must be decimal strings");
  const auto& s = j.get_ref<const std::string&>();
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) bad(where + ": not a decimal integer \"" + s + "\"");
  return mpz_class(s, 10);
}

std::vector<mpz_class> elem_digits(int m, const json& j, const std::string& where) {
  if (m == 1) {
    if (j.is_array()) bad(where + ": expected a string for m = 1");
    return {parse_mpz(j, where)};
  }
  if (!j.is_array() || static_cast<int>(j.size()) != m) bad(where + ": expected a list of " + std::to_string(m) + " strings");
  std::vector<mpz_class> d;
  for (size_t i = 0; i < j.size(); ++i) d.push_back(parse_mpz(j[i], where + "[" + std::to_string(i) + "]"));
  return d;
}

FE elem_at(const Field& K, const json& j, const std::string& where) {
  auto d = elem_digits(K.m(), j, where);
  std::vector<std::uint64_t> u;
  for (auto& x : d) {
    if (x >= K.p()) bad(where + ": coefficient outside [0, p)");
    u.push_back(x.get_ui());
  }
  return K.from_digits(u);
}

RE elem_at(const Ring& R, const json& j, const std::string& where) {
  auto d = elem_digits(R.m(), j, where);
  for (auto& x : d)
    if (x >= R.pN()) bad(where + ": coefficient outside [0, p^N)");
  return R.from_coeffs(d);
}

template <class Ctx>
auto form_at(const Ctx& K, int n, const json& j, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != tri_size(n))
    bad(where + ": expected " + std::to_string(tri_size(n)) + " coefficients");
  auto q = zero_form(K, n);
  for (size_t i = 0; i < j.size(); ++i) q.c[i] = elem_at(K, j[i], where + "[" + std::to_string(i) + "]");
  return q;
}

}  // namespace

json field_json(const Field& K) {
  json f = json::object();
  f["p"] = K.p();
  f["m"] = K.m();
  return f;
}

json elem_json(const Field& K, FE a) {
  auto d = K.digits(a);
  if (K.m() == 1) return std::to_string(d[0]);
  json arr = json::array();
  for (int i = 0; i < K.m(); ++i) arr.push_back(std::to_string(i < static_cast<int>(d.size()) ? d[i] : 0));
  return arr;
}

json elem_json(const Ring& R, const RE& a) {
  if (R.m() == 1) return a.c[0].get_str();
  json arr = json::array();
  for (int i = 0; i < R.m(); ++i) arr.push_back(a.c[i].get_str());
  return arr;
}

FE parse_elem(const Field& K, const json& j) { return elem_at(K, j, "element"); }
RE parse_elem(const Ring& R, const json& j) { return elem_at(R, j, "element"); }

FormFile form_file_from_json(const json& j) {
  if (!j.is_object()) bad("top level: expected an object");
  FormFile f;
  auto n = parse_u64(need(j, "n", "top level"), "n");
  if (n < 1 || n > 64) bad("n: out of range");
  f.n = static_cast<int>(n);
  const json& fj = need(j, "field", "top level");
  auto p = parse_u64(need(fj, "p", "field"), "field.p");
  auto m = parse_u64(need(fj, "m", "field"), "field.m");
  if (m < 1 || m > 32) bad("field.m: out of range");
  std::vector<std::uint64_t> modulus;
  if (fj.contains("modulus")) {
    const json& mj = fj.at("modulus");
    if (!mj.is_array()) bad("field.modulus: expected a list");
    for (size_t i = 0; i < mj.size(); ++i) modulus.push_back(parse_u64(mj[i], "field.modulus[" + std::to_string(i) + "]"));
    f.explicit_modulus = true;
  }
  try {
    f.field = Field(p, static_cast<int>(m), modulus);
  } catch (const Error& e) {
    bad(std::string("field: ") + e.what());
  }
  if (j.contains("precision")) {
    auto N = parse_u64(j.at("precision"), "precision");
    if (N < 1 || N > 4096) bad("precision: out of range");
    f.precision = static_cast<int>(N);
  }
  const json& forms = need(j, "forms", "top level");
  if (!forms.is_array()) bad("forms: expected a list");
  for (size_t i = 0; i < forms.size(); ++i) {
    std::string where = "forms[" + std::to_string(i) + "]";
    if (f.local())
      f.rforms.push_back(form_at(f.ring(), f.n, forms[i], where));
    else
      f.fforms.push_back(form_at(f.field, f.n, forms[i], where));
  }
  return f;
}

FormFile parse_form_file(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return form_file_from_json(j);
}

json to_json(const FormFile& f) {
  json j = json::object();
  j["n"] = f.n;
  json fj = field_json(f.field);
  if (f.explicit_modulus) fj["modulus"] = f.field.modulus();
  j["field"] = fj;
  if (f.local()) j["precision"] = *f.precision;
  json forms = json::array();
  if (f.local()) {
    Ring R = f.ring();
    for (auto& q : f.rforms) {
      json c = json::array();
      for (auto& x : q.c) c.push_back(elem_json(R, x));
      forms.push_back(c);
    }
  } else {
    for (auto& q : f.fforms) {
      json c = json::array();
      for (auto x : q.c) c.push_back(elem_json(f.field, x));
      forms.push_back(c);
    }
  }
  j["forms"] = forms;
  return j;
}

FormFile make_form_file(const Field& K, const std::vector<FForm>& forms) {
  FormFile f;
  f.field = K;
  f.n = forms.empty() ? 0 : forms[0].n;
  f.fforms = forms;
  return f;
}

FormFile make_form_file(const Ring& R, const std::vector<RForm>& forms) {
  FormFile f;
  f.field = R.residue();
  f.precision = R.N();
  f.n = forms.empty() ? 0 : forms[0].n;
  f.rforms = forms;
  return f;
}

LocalPair local_pair_of(const FormFile& f) {
  if (!f.local()) bad("expected local forms (precision present)");
  if (f.rforms.size() != 2) bad("expected exactly two forms");
  return make_local_pair(f.ring(), f.rforms[0], f.rforms[1]);
}

json to_json(const Ring& R, const SplitCertificate& C) {
  json j = json::object();
  j["a"] = elem_json(R, C.a);
  j["b"] = elem_json(R, C.b);
  j["s"] = C.split.s;
  j["e"] = C.split.e;
  json T = json::array();
  for (auto& row : C.split.T) {
    json r = json::array();
    for (auto& x : row) r.push_back(elem_json(R, x));
    T.push_back(r);
  }
  j["T"] = T;
  json W = json::array();
  for (auto& x : C.split.W.c) W.push_back(elem_json(R, x));
  j["residual"] = W;
  return j;
}

SplitCertificate certificate_from_json(const Ring& R, int n, const json& j) {
  SplitCertificate C;
  C.a = elem_at(R, need(j, "a", "certificate"), "a");
  C.b = elem_at(R, need(j, "b", "certificate"), "b");
  C.split.s = static_cast<int>(parse_u64(need(j, "s", "certificate"), "s"));
  C.split.e = static_cast<int>(parse_u64(need(j, "e", "certificate"), "e"));
  if (2 * C.split.s > n) bad("s: too large for n");
  const json& T = need(j, "T", "certificate");
  if (!T.is_array() || static_cast<int>(T.size()) != n) bad("T: expected " + std::to_string(n) + " rows");
  for (int i = 0; i < n; ++i) {
    if (!T[i].is_array() || static_cast<int>(T[i].size()) != n) bad("T[" + std::to_string(i) + "]: wrong length");
    RVec row;
    for (int k = 0; k < n; ++k) row.push_back(elem_at(R, T[i][k], "T[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
    C.split.T.push_back(row);
  }
  C.split.W = form_at(R, n - 2 * C.split.s, need(j, "residual", "certificate"), "residual");
  return C;
}

bool recheck_certificate(const LocalPair& LP, const SplitCertificate& C) {
  const Ring& R = LP.R;
  const int n = LP.n();
  const FormSplit& S = C.split;
  if (S.s < 3 || 2 * S.s > n || S.W.n != n - 2 * S.s || static_cast<int>(S.T.size()) != n) return false;
  for (auto& row : S.T)
    if (static_cast<int>(row.size()) != n) return false;
  if (R.valuation(det(R, S.T)) >= R.N()) return false;
  RForm got = substitute(R, combine(R, C.a, LP.Q1, C.b, LP.Q2), S.T);
  RForm want = zero_form(R, n);
  const RE h = R.pi_pow(2 * S.e);
  for (int i = 0; i < S.s; ++i) coef(want, 2 * i, 2 * i + 1) = h;
  for (int i = 0; i < S.W.n; ++i)
    for (int j = i; j < S.W.n; ++j) coef(want, 2 * S.s + i, 2 * S.s + j) = coef(S.W, i, j);
  return forms_equal(R, got, want);
}

Field parse_field_spec(const std::string& s) {
  const auto caret = s.find('^');
  auto num = [&](const std::string& t) -> std::uint64_t {
    if (t.empty() || t.size() > 19 || t.find_first_not_of("0123456789") != std::string::npos) bad("field: expected p or p^m, got \"" + s + "\"");
    return std::stoull(t);
  };
  const std::uint64_t p = num(s.substr(0, caret));
  const std::uint64_t m = caret == std::string::npos ? 1 : num(s.substr(caret + 1));
  if (m < 1 || m > 32) bad("field: m out of range");
  try {
    return Field(p, static_cast<int>(m));
  } catch (const Error& e) {
    bad(std::string("field: ") + e.what());
  }
}

Profile parse_profile(const std::string& s) {
  Profile P;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t end = s.find(',', pos);
    if (end == std::string::npos) end = s.size();
    const std::string tok = s.substr(pos, end - pos);
    pos = end + 1;
    if (tok.empty()) continue;
    auto value = [&](const std::string& t) {
      if (t.empty() || t.size() > 3 || t.find_first_not_of("0123456789") != std::string::npos) bad("profile: bad value in \"" + tok + "\"");
      return std::stoi(t);
    };
    if (tok.rfind("r=", 0) == 0)
      P.r = value(tok.substr(2));
    else if (tok.rfind("R=", 0) == 0)
      P.R = value(tok.substr(2));
    else if (tok == "zero")
      P.zero = true;
    else if (tok == "nozero")
      P.zero = false;
    else if (tok == "nonsingular")
      P.nonsingular = true;
    else if (tok == "singular")
      P.nonsingular = false;
    else
      bad("profile: unknown token \"" + tok + "\"");
  }
  return P;
}

}  // namespace qp
