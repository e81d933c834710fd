#include <doctest.h>

#include "quadpencil/errors.hpp"
#include "quadpencil/io.hpp"
#include "quadpencil/oracle.hpp"
#include "support.hpp"

using namespace qp;
using namespace qp::testing;

namespace {

LemmaReport run(const std::string& id, Field K, std::uint64_t trials, std::uint64_t seed = 1, int precision = 20, int jobs = 1) {
  OracleCtx ctx{K, precision, 0, jobs};
  return verify_lemma(id, ctx, OracleMode::Sampled, trials, seed);
}

json without_time(LemmaReport r) {
  r.wall_seconds = 0;
  return r.to_json();
}

}  // namespace

TEST_CASE("every lemma passes a short sampled run") {
  struct Case {
    std::string id;
    Field K;
    std::uint64_t trials;
  };
  const Field f5(5, 1), f7(7, 1), f8(2, 3), f3(3, 1), f37(37, 1), f32(2, 5);
  const std::vector<Case> cases = {
      {"add", f5, 30},       {"r+2", f7, 30},       {"lift", f37, 10},   {"lift", f32, 5},   {"nsq", f37, 10},
      {"LBP", f37, 5},       {"lemshape1", f7, 20}, {"lemshape2", f8, 20}, {"r-2", f7, 20},  {"sz", f3, 30},
      {"2N", f7, 50},        {"7l", f32, 3},        {"notmin", f37, 20}, {"x8", f37, 20},    {"R4", f37, 2},
      {"rge5", f37, 2},      {"deltalaw", f37, 5},
  };
  for (auto& c : cases) {
    CAPTURE(c.id);
    auto r = run(c.id, c.K, c.trials);
    CHECK(r.pass());
    CHECK(r.trials == c.trials);
    CHECK(r.draws >= r.trials);
  }
  CHECK(lemma_ids().size() == 16);
}

TEST_CASE("binary pencils over GF(5), exhaustively") {
  OracleCtx ctx{Field(5, 1)};
  auto r = verify_lemma("2N", ctx, OracleMode::Exhaustive, 0, 0);
  CHECK(r.pass());
  CHECK(r.trials > 0);
  CHECK(r.stats.at("min_Nh") >= 8);
  CHECK(r.stats.at("min_Na") >= 8);
}

TEST_CASE("exhaustive runs over GF(3)") {
  OracleCtx ctx{Field(3, 1)};
  for (const char* id : {"add", "r+2"}) {
    CAPTURE(id);
    auto r = verify_lemma(id, ctx, OracleMode::Exhaustive, 0, 0);
    CHECK(r.pass());
    CHECK(r.trials > 0);
  }
}

TEST_CASE("budget, precondition and id errors") {
  auto kind_of = [](auto&& f) -> std::optional<ErrorKind> {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return std::nullopt;
  };
  OracleCtx f32{Field(2, 5)}, f37{Field(37, 1)}, f3{Field(3, 1)}, f2{Field(2, 1)};
  CHECK(kind_of([&] { verify_lemma("7l", f32, OracleMode::Exhaustive, 0, 0); }) == ErrorKind::BudgetExceeded);
  CHECK(kind_of([&] { verify_lemma("lift", f37, OracleMode::Exhaustive, 0, 0); }) == ErrorKind::BudgetExceeded);
  CHECK(kind_of([&] { verify_lemma("2N", f37, OracleMode::Exhaustive, 0, 0); }) == ErrorKind::BudgetExceeded);
  CHECK(kind_of([&] { verify_lemma("lemshape2", f3, OracleMode::Sampled, 5, 0); }) == ErrorKind::PreconditionViolated);
  CHECK(kind_of([&] { verify_lemma("LBP", f2, OracleMode::Sampled, 5, 0); }) == ErrorKind::PreconditionViolated);
  CHECK(kind_of([&] { verify_lemma("7l", f3, OracleMode::Sampled, 5, 0); }) == ErrorKind::PreconditionViolated);
  CHECK(kind_of([&] { verify_lemma("nope", f3, OracleMode::Sampled, 5, 0); }) == ErrorKind::InvalidInput);
}

TEST_CASE("reports are deterministic and independent of the job count") {
  for (const char* id : {"sz", "notmin"}) {
    CAPTURE(id);
    Field K = std::string(id) == "sz" ? Field(3, 1) : Field(37, 1);
    auto a = without_time(run(id, K, 40, 7));
    auto b = without_time(run(id, K, 40, 7));
    auto c = without_time(run(id, K, 40, 7, 20, 3));
    CHECK(a.dump() == b.dump());
    CHECK(a.dump() == c.dump());
    auto d = without_time(run(id, K, 40, 8));
    CHECK(d["trials"] == a["trials"]);
  }
}

TEST_CASE("report serialization") {
  auto r = run("2N", Field(5, 1), 10, 3);
  auto j = r.to_json();
  CHECK(j["lemma"] == "2N");
  CHECK(j["field"]["p"] == 5);
  CHECK(j["mode"] == "sampled");
  CHECK(j["pass"] == true);
  CHECK(j["failures"].empty());
  CHECK(r.summary().rfind("PASS  2N  GF(5)", 0) == 0);
}

TEST_CASE("form_at_columns matches substitute") {
  Field K(7, 1);
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    FForm q = random_form(K, 4, rng);
    FMat T(4, FVec(3));
    for (auto& row : T) row = random_vec(K, 3, rng);
    CHECK(form_at_columns(K, q, T).c == substitute(K, q, T).c);
  }
}

TEST_CASE("form files round-trip") {
  Rng rng(11);
  SUBCASE("prime field") {
    Field K(37, 1);
    auto f = make_form_file(K, {random_form(K, 3, rng), random_form(K, 3, rng)});
    auto text = to_json(f).dump();
    CHECK(to_json(parse_form_file(text)).dump() == text);
  }
  SUBCASE("extension field with explicit modulus") {
    std::string text = R"({"n":2,"field":{"p":2,"m":3,"modulus":[1,1,0,1]},"forms":[[["1","0","1"],["0","1","0"],["1","1","1"]]]})";
    auto f = parse_form_file(text);
    CHECK(f.explicit_modulus);
    CHECK(f.count() == 1);
    CHECK(to_json(f).dump() == text);
  }
  SUBCASE("local forms") {
    Ring R(Field(2, 5), 40);
    RForm q = zero_form(R, 2);
    coef(q, 0, 1) = R.from_int(-1);
    auto f = make_form_file(R, {q, q});
    auto text = to_json(f).dump();
    auto g = parse_form_file(text);
    CHECK(g.local());
    CHECK(*g.precision == 40);
    CHECK(to_json(g).dump() == text);
    CHECK(text.find("1099511627775") != std::string::npos);
  }
}

TEST_CASE("malformed form files are rejected") {
  auto kind_msg = [](const std::string& text) -> std::pair<std::optional<ErrorKind>, std::string> {
    try {
      parse_form_file(text);
    } catch (const Error& e) {
      return {e.kind(), e.what()};
    }
    return {std::nullopt, ""};
  };
  auto [k1, m1] = kind_msg(R"({"n":2,"field":{"p":5,"m":1},"forms":[["1","2")");
  CHECK(k1 == ErrorKind::InvalidInput);
  CHECK(m1.find("byte") != std::string::npos);
  CHECK(kind_msg(R"({"n":1,"field":{"p":5,"m":1},"forms":[["5"]]})").first == ErrorKind::InvalidInput);
  CHECK(kind_msg(R"({"n":1,"field":{"p":5,"m":1},"forms":[[3]]})").first == ErrorKind::InvalidInput);
  CHECK(kind_msg(R"({"n":2,"field":{"p":5,"m":1},"forms":[["1"]]})").first == ErrorKind::InvalidInput);
  CHECK(kind_msg(R"({"n":1,"field":{"p":6,"m":1},"forms":[]})").first == ErrorKind::InvalidInput);
  CHECK(kind_msg(R"({"n":1,"field":{"p":5,"m":1},"precision":3,"forms":[["125"]]})").first == ErrorKind::InvalidInput);
  CHECK(kind_msg(R"({"n":1,"field":{"p":5,"m":1},"precision":3,"forms":[["124"]]})").first == std::nullopt);
}
