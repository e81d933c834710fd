#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadpencil/local.hpp"
#include "quadpencil/quadform.hpp"

namespace qp {

using json = nlohmann::ordered_json;

// Forms over GF(p^m) or, when precision is present, over GR(p^N, m).
struct FormFile {
  Field field;
  bool explicit_modulus = false;
  std::optional<int> precision;
  int n = 0;
  std::vector<FForm> fforms;  // when !precision
  std::vector<RForm> rforms;  // when precision
  bool local() const { return precision.has_value(); }
  Ring ring() const { return Ring(field, *precision); }
  size_t count() const { return local() ? rforms.size() : fforms.size(); }
};

// InvalidInput (with the parser's byte position where available) on any
// malformed or out-of-range content.
FormFile parse_form_file(const std::string& text);
FormFile form_file_from_json(const json& j);
json to_json(const FormFile& f);

FormFile make_form_file(const Field& K, const std::vector<FForm>& forms);
FormFile make_form_file(const Ring& R, const std::vector<RForm>& forms);
LocalPair local_pair_of(const FormFile& f);  // two local forms

json field_json(const Field& K);
json elem_json(const Field& K, FE a);
json elem_json(const Ring& R, const RE& a);
FE parse_elem(const Field& K, const json& j);
RE parse_elem(const Ring& R, const json& j);

// {a, b, s, e, T, residual}; T rows of ring elements, residual the
// coefficients of W.
json to_json(const Ring& R, const SplitCertificate& C);
SplitCertificate certificate_from_json(const Ring& R, int n, const json& j);

// Re-evaluates (a Q1 + b Q2)(T X) by substitution and compares it with
// pi^(2e) (X1X2 + X3X4 + X5X6) + W(X7, ..., Xn) modulo p^N; T must be
// invertible. Shares no code with certificate construction.
bool recheck_certificate(const LocalPair& LP, const SplitCertificate& C);

// "p" or "p^m".
Field parse_field_spec(const std::string& s);
// Comma-separated r=K, R=K, zero|nozero, nonsingular|singular.
Profile parse_profile(const std::string& s);

}  // namespace qp
