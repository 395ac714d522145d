#include "doctest.h"

#include <map>
#include <string>
#include <vector>

#include "lowr/rml/ast.hpp"
#include "lowr/rml/denote.hpp"
#include "lowr/rml/query.hpp"
#include "lowr/rml/sample.hpp"

using namespace lowr;
using namespace lowr::rml;

namespace {

std::string prog_path(const char* name) {
  return std::string(LOWR_PROGRAMS_DIR "/") + name;
}

void count_kinds(const TermPtr& t, std::map<TermKind, int>& out) {
  if (!t) return;
  ++out[t->kind];
  count_kinds(t->m1, out);
  count_kinds(t->m2, out);
  count_kinds(t->m3, out);
}

const char* kGeoSrc = "let rec geo : N = if bernoulli then 0 else succ geo in geo";

}  // namespace

TEST_CASE("parser: lambda with annotated binder and arithmetic body") {
  TermPtr t = parse("fun x : R -> x + 1.0");
  REQUIRE(t->kind == TermKind::Lam);
  CHECK(t->name == "x");
  CHECK(type_eq(t->ty1, t_real()));
  REQUIRE(t->m1->kind == TermKind::Add);
  CHECK(t->m1->m1->kind == TermKind::Var);
  CHECK(t->m1->m1->name == "x");
  REQUIRE(t->m1->m2->kind == TermKind::RealLit);
  CHECK(t->m1->m2->rat == Rat(1));
}

TEST_CASE("parser: multiplication binds tighter than addition") {
  TermPtr t = parse("1.0 + 2.0 * 3.0");
  REQUIRE(t->kind == TermKind::Add);
  CHECK(t->m1->kind == TermKind::RealLit);
  REQUIRE(t->m2->kind == TermKind::Mul);
  CHECK(t->m2->m1->rat == Rat(2));
  CHECK(t->m2->m2->rat == Rat(3));
}

TEST_CASE("parser: application binds tighter than multiplication") {
  TermPtr t = parse("f x * g y");
  REQUIRE(t->kind == TermKind::Mul);
  REQUIRE(t->m1->kind == TermKind::App);
  CHECK(t->m1->m1->name == "f");
  CHECK(t->m1->m2->name == "x");
  REQUIRE(t->m2->kind == TermKind::App);
  CHECK(t->m2->m1->name == "g");
}

TEST_CASE("parser: unary minus desugars to subtraction from zero") {
  TermPtr t = parse("-x");
  REQUIRE(t->kind == TermKind::Sub);
  REQUIRE(t->m1->kind == TermKind::RealLit);
  CHECK(t->m1->rat == Rat(0));
  CHECK(t->m2->kind == TermKind::Var);
}

TEST_CASE("parser: comparison of a sample against a literal") {
  TermPtr t = parse("uniform < 0.5");
  REQUIRE(t->kind == TermKind::Lt);
  CHECK(t->m1->kind == TermKind::Uniform);
  REQUIRE(t->m2->kind == TermKind::RealLit);
  CHECK(t->m2->rat == Rat(1, 2));
}

TEST_CASE("parser: explicit rec atom keeps both annotations") {
  TermPtr t = parse("rec(f : 1 -> N, x : 1. 0)");
  REQUIRE(t->kind == TermKind::Rec);
  CHECK(t->name == "f");
  CHECK(t->name2 == "x");
  CHECK(type_eq(t->ty1, t_arrow(t_unit(), t_nat())));
  CHECK(type_eq(t->ty2, t_unit()));
  CHECK(t->m1->kind == TermKind::NatLit);
}

TEST_CASE("parser: let rec sugar expands to a guarded fixpoint") {
  TermPtr t = parse(kGeoSrc);
  REQUIRE(t->kind == TermKind::Let);
  CHECK(t->name == "geo");
  // Bound term is the unfolded fixpoint applied to unit.
  REQUIRE(t->m1->kind == TermKind::App);
  CHECK(t->m1->m2->kind == TermKind::UnitLit);
  const TermPtr& rec = t->m1->m1;
  REQUIRE(rec->kind == TermKind::Rec);
  CHECK(type_eq(rec->ty1, t_arrow(t_unit(), t_nat())));
  // Recursive occurrences inside the body became calls to the generated name.
  const TermPtr& els = rec->m1->m3;
  REQUIRE(els->kind == TermKind::Succ);
  REQUIRE(els->m1->kind == TermKind::App);
  CHECK(els->m1->m1->name == "%geo");
  CHECK(els->m1->m2->kind == TermKind::UnitLit);
  // The body of the let refers to the ordinary name.
  CHECK(t->m2->kind == TermKind::Var);
  CHECK(t->m2->name == "geo");
}

TEST_CASE("parser: comments are skipped") {
  TermPtr t = parse("-- a coin\nbernoulli -- trailing note\n");
  CHECK(t->kind == TermKind::Bernoulli);
}

TEST_CASE("parser: shape of the polar sampler program") {
  Program p = Program::load(prog_path("normal.rml"));
  std::map<TermKind, int> n;
  count_kinds(p.term(), n);
  CHECK(n[TermKind::Let] == 4);
  CHECK(n[TermKind::Rec] == 1);
  CHECK(n[TermKind::Uniform] == 2);
  CHECK(n[TermKind::Lt] == 1);
  CHECK(n[TermKind::Sqrt] == 1);
  CHECK(n[TermKind::Log] == 1);
  CHECK(n[TermKind::Div] == 1);
}

TEST_CASE("parser: malformed inputs raise positioned errors") {
  try {
    parse("let x = in x");
    FAIL("expected a parse error");
  } catch (const RmlError& e) {
    CHECK(e.pos.line == 1);
    CHECK(e.pos.col == 9);
  }
  CHECK_THROWS_AS(parse("a < b < c"), RmlError);
  CHECK_THROWS_AS(parse("succ"), RmlError);
  CHECK_THROWS_AS(parse("let exp = 1 in exp"), RmlError);
  CHECK_THROWS_AS(parse("(1"), RmlError);
  CHECK_THROWS_AS(parse("1)"), RmlError);
  CHECK_THROWS_AS(parse("$"), RmlError);
}

TEST_CASE("typecheck: program types of the bundled examples") {
  CHECK(Program::load(prog_path("bernoulli.rml")).type()->kind == TypeKind::Bool);
  CHECK(Program::load(prog_path("uniform_half.rml")).type()->kind == TypeKind::Bool);
  CHECK(Program::load(prog_path("two_coins.rml")).type()->kind == TypeKind::Bool);
  CHECK(Program::load(prog_path("disk.rml")).type()->kind == TypeKind::Bool);
  CHECK(Program::load(prog_path("geometric.rml")).type()->kind == TypeKind::Nat);
  CHECK(Program::load(prog_path("normal.rml")).type()->kind == TypeKind::Real);
}

TEST_CASE("typecheck: structural types") {
  CHECK(type_eq(typecheck(parse("fun x : R -> x + 1.0")),
                t_arrow(t_real(), t_real())));
  CHECK(type_eq(typecheck(parse("(1, true)")), t_prod(t_nat(), t_bool())));
  CHECK(type_eq(typecheck(parse("fst (1, true)")), t_nat()));
  CHECK(type_eq(typecheck(parse("snd (1, true)")), t_bool()));
  CHECK(type_eq(typecheck(parse("fun p : R * N -> fst p")),
                t_arrow(t_prod(t_real(), t_nat()), t_real())));
  CHECK(type_eq(typecheck(parse("fun f : (R -> R) -> f 2.0")),
                t_arrow(t_arrow(t_real(), t_real()), t_real())));
  CHECK(type_eq(typecheck(parse("zero 3")), t_bool()));
  CHECK(type_eq(typecheck(parse("nat_to_real 2")), t_real()));
  CHECK(type_eq(typecheck(parse("if bernoulli then 1.0 else 2.0")), t_real()));
  CHECK(type_eq(typecheck(parse("rec(f : 1 -> N, x : 1. 0)")),
                t_arrow(t_unit(), t_nat())));
}

TEST_CASE("typecheck: ill-typed programs are rejected") {
  CHECK_THROWS_AS(typecheck(parse("succ true")), RmlError);
  CHECK_THROWS_AS(typecheck(parse("if 1 then 2 else 3")), RmlError);
  CHECK_THROWS_AS(typecheck(parse("1 < 2")), RmlError);
  CHECK_THROWS_AS(typecheck(parse("1.0 + 1")), RmlError);
  CHECK_THROWS_AS(typecheck(parse("nosuchvar")), RmlError);
  CHECK_THROWS_AS(typecheck(parse("(fun x : R -> x) true")), RmlError);
  CHECK_THROWS_AS(typecheck(parse("1 2")), RmlError);
  CHECK_THROWS_AS(typecheck(parse("if bernoulli then 1 else 1.0")), RmlError);
  CHECK_THROWS_AS(typecheck(parse("rec(f : N, x : 1. 0)")), RmlError);
  CHECK_THROWS_AS(typecheck(parse("rec(f : 1 -> N, x : R. 0)")), RmlError);
  CHECK_THROWS_AS(typecheck(parse("rec(f : 1 -> N, x : 1. true)")), RmlError);
}

TEST_CASE("eval: coin flip probability is exact at every fuel") {
  Program p = Program::from_source("bernoulli");
  QuerySpec q;
  q.kind = QueryKind::Prob;
  q.fuel = 4;
  std::vector<EvalRow> rows = run_eval(p, q);
  REQUIRE(rows.size() == 5);
  for (const EvalRow& r : rows) CHECK(r.lower == Rat(1, 2));
}

TEST_CASE("eval: nested coin flips multiply") {
  Program p = Program::load(prog_path("two_coins.rml"));
  QuerySpec q;
  q.kind = QueryKind::Prob;
  q.fuel = 0;
  std::vector<EvalRow> rows = run_eval(p, q);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].lower == Rat(1, 4));
}

TEST_CASE("eval: branch denotation does not depend on the recursion level") {
  TermPtr t = parse("if bernoulli then 1 else 2");
  Observable<Val> is_one([](const Val& v) {
    return LowerRealNN::from_rat(v.as_nat() == 1 ? Rat(1) : Rat(0));
  });
  for (Fuel k : {0, 1, 5}) {
    GiryMeasure<Val> m = denote(t, nullptr, k);
    LowerRealNN r = m.integrate(is_one);
    CHECK(r.approx(0) == Rat(1, 2));
  }
}

TEST_CASE("eval: geometric loop mass climbs one halving per level") {
  Program p = Program::from_source(kGeoSrc);
  LowerRealNN m3 = p.at_level(3).mass();
  Rat v = m3.approx(0);
  CHECK(v == Rat(7, 8));

  QuerySpec q;
  q.kind = QueryKind::Mass;
  q.fuel = 4;
  std::vector<EvalRow> rows = run_eval(p, q);
  REQUIRE(rows.size() == 5);
  for (int k = 0; k <= 4; ++k) {
    Rat want = Rat(1) - Rat(1, 1 << k);
    CHECK(rows[k].lower == want);
  }
}

TEST_CASE("eval: uniform tail event sharpens dyadically") {
  Program p = Program::load(prog_path("uniform_half.rml"));
  QuerySpec q;
  q.kind = QueryKind::Prob;
  q.fuel = 6;
  std::vector<EvalRow> rows = run_eval(p, q);
  const Rat want[7] = {Rat(0),      Rat(0),      Rat(1, 4),  Rat(3, 8),
                       Rat(7, 16),  Rat(15, 32), Rat(31, 64)};
  REQUIRE(rows.size() == 7);
  for (int k = 0; k <= 6; ++k) CHECK(rows[k].lower == want[k]);
}

TEST_CASE("eval: expectation of a uniform sample") {
  Program p = Program::from_source("uniform");
  QuerySpec q;
  q.kind = QueryKind::Expect;
  q.fuel = 5;
  std::vector<EvalRow> rows = run_eval(p, q);
  REQUIRE(rows.size() == 6);
  for (int k = 0; k <= 5; ++k) {
    Rat want = (Rat(1) - Rat(1, 1 << k)) / 2;
    CHECK(rows[k].lower == want);
  }
}

TEST_CASE("eval: two sided event query on a uniform sample") {
  Program p = Program::from_source("uniform");
  QuerySpec q;
  q.kind = QueryKind::Event;
  q.a = Rat(1, 4);
  q.b = Rat(3, 4);
  q.fuel = 6;
  std::vector<EvalRow> rows = run_eval(p, q);
  REQUIRE(rows.size() == 7);
  for (int k = 0; k <= 6; ++k) {
    Rat want = k >= 3 ? Rat(1, 2) - Rat(1, 1 << (k - 1)) : Rat(0);
    CHECK(rows[k].lower == want);
  }
}

TEST_CASE("eval: comparison measure routes mass only once certified") {
  GiryMeasure<Val> lt = denote_lt(RealNum::from_rat(Rat(0)),
                                  RealNum::from_rat(Rat(1)));
  const Val* pv = lt.as_point();
  REQUIRE(pv != nullptr);
  CHECK(pv->as_bool() == true);
  LowerRealNN m = lt.mass();
  CHECK(m.approx(0) == Rat(1));

  GiryMeasure<Val> gt = denote_lt(RealNum::from_rat(Rat(1)),
                                  RealNum::from_rat(Rat(0)));
  const Val* pw = gt.as_point();
  REQUIRE(pw != nullptr);
  CHECK(pw->as_bool() == false);

  RealNum third = RealNum::from_rat(Rat(1, 3));
  GiryMeasure<Val> diag = denote_lt(third, third);
  LowerRealNN dm = diag.mass();
  CHECK(dm.approx(12) == Rat(0));
}

TEST_CASE("eval: comparison of shrinking enclosures fires at the separating fuel") {
  RealNum x = RealNum::from_fn([](Fuel n) {
    Rat h(1, 1 << (n > 30 ? 30 : n));
    return RatInterval(Rat(-h), h);
  });
  GiryMeasure<Val> m = denote_lt(x, RealNum::from_rat(Rat(1, 4)));
  LowerRealNN mm = m.mass();
  // Separation needs 2^-n < 1/4 strictly, first true at n = 3.
  for (Fuel n = 0; n <= 2; ++n) CHECK(mm.approx(n) == Rat(0));
  for (Fuel n = 3; n <= 6; ++n) CHECK(mm.approx(n) == Rat(1));
}

TEST_CASE("eval: rejection sampler mass grows with the level") {
  Program p = Program::load(prog_path("normal.rml"));
  QuerySpec q;
  q.kind = QueryKind::Mass;
  q.fuel = 6;
  std::vector<EvalRow> rows = run_eval(p, q);
  const Rat want[7] = {Rat(0),     Rat(0),      Rat(0),     Rat(0),
                       Rat(5, 16), Rat(37, 64), Rat(11, 16)};
  REQUIRE(rows.size() == 7);
  for (int k = 0; k <= 6; ++k) CHECK(rows[k].lower == want[k]);
}

TEST_CASE("sampler: fixed seeds reproduce runs exactly") {
  TermPtr u = parse("uniform");
  std::optional<SVal> a = sample(u, 9);
  std::optional<SVal> b = sample(u, 9);
  std::optional<SVal> c = sample(u, 10);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  REQUIRE(c.has_value());
  CHECK(a->real == b->real);
  CHECK(a->real != c->real);

  Program p = Program::from_source("bernoulli");
  QuerySpec q;
  q.kind = QueryKind::Prob;
  SampleStats s1 = run_sample(p, q, 500, 42);
  SampleStats s2 = run_sample(p, q, 500, 42);
  CHECK(s1.terminated == s2.terminated);
  CHECK(s1.hits == s2.hits);
  CHECK(s1.freq == s2.freq);
}

TEST_CASE("sampler: coin frequency lands within three sigma") {
  Program p = Program::from_source("bernoulli");
  QuerySpec q;
  q.kind = QueryKind::Prob;
  SampleStats st = run_sample(p, q, 2000, 7);
  CHECK(st.terminated == 2000);
  Rat gap = rat_abs(st.freq - Rat(1, 2));
  CHECK(gap <= Rat(7, 200));
}

TEST_CASE("sampler: geometric loop always terminates in practice") {
  Program p = Program::from_source(kGeoSrc);
  QuerySpec q;
  q.kind = QueryKind::Mass;
  SampleStats st = run_sample(p, q, 500, 3);
  CHECK(st.terminated == 500);
  CHECK(st.hits == 500);
}

TEST_CASE("sampler: quarter disk frequency approximates pi over four") {
  Program p = Program::load(prog_path("disk.rml"));
  QuerySpec q;
  q.kind = QueryKind::Prob;
  SampleStats st = run_sample(p, q, 4000, 11);
  CHECK(st.terminated == 4000);
  // pi/4 lies in (0.7853, 0.7855); allow a three sigma band around it.
  Rat gap = rat_abs(st.freq - Rat(3927, 5000));
  CHECK(gap <= Rat(197, 10000));
}

TEST_CASE("sampler: rejection sampler terminates and centers near zero") {
  Program p = Program::load(prog_path("normal.rml"));
  QuerySpec q;
  q.kind = QueryKind::Expect;
  SampleStats st = run_sample(p, q, 300, 5);
  CHECK(st.terminated == 300);
  REQUIRE(st.has_mean);
  CHECK(st.mean < 0.25);
  CHECK(st.mean > -0.25);
}

TEST_CASE("compare: monte carlo corroborates the exact bound") {
  Program p = Program::load(prog_path("two_coins.rml"));
  QuerySpec q;
  q.kind = QueryKind::Prob;
  q.fuel = 4;
  CompareReport r = run_compare(p, q, 2000, 7);
  CHECK(r.bound == Rat(1, 4));
  CHECK(r.pass);
  Rat gap = rat_abs(r.stats.freq - Rat(1, 4));
  CHECK(gap <= Rat(3, 100));
}

TEST_CASE("compare: zero samples cannot corroborate a positive bound") {
  Program p = Program::from_source("bernoulli");
  QuerySpec q;
  q.kind = QueryKind::Prob;
  q.fuel = 2;
  CompareReport r = run_compare(p, q, 0, 1);
  CHECK(r.bound == Rat(1, 2));
  CHECK_FALSE(r.pass);
}

TEST_CASE("queries: kind checking against the program type") {
  Program br = Program::from_source("bernoulli");
  Program un = Program::from_source("uniform");
  QuerySpec q;
  q.kind = QueryKind::Prob;
  CHECK_THROWS_AS(check_query_type(q, un.type()), RmlError);
  q.kind = QueryKind::Expect;
  CHECK_THROWS_AS(check_query_type(q, br.type()), RmlError);
  q.kind = QueryKind::Event;
  CHECK_THROWS_AS(check_query_type(q, br.type()), RmlError);
  q.kind = QueryKind::Mass;
  check_query_type(q, br.type());
  check_query_type(q, un.type());
}

TEST_CASE("queries: renderers are deterministic and stable") {
  Program p = Program::load(prog_path("uniform_half.rml"));
  QuerySpec q;
  q.kind = QueryKind::Prob;
  q.fuel = 4;
  std::vector<EvalRow> rows = run_eval(p, q);
  std::string a = eval_json(q, rows, false);
  std::string b = eval_json(q, rows, false);
  CHECK(a == b);
  CHECK(a.find("\"query\": \"prob\"") != std::string::npos);
  CHECK(a.find("\"lower_bound\": \"7/16\"") != std::string::npos);
  CHECK(a.find("\"ms\"") == std::string::npos);

  QuerySpec ev;
  ev.kind = QueryKind::Event;
  ev.a = Rat(1, 4);
  ev.b = Rat(3, 4);
  CHECK(query_str(ev) == "event 1/4 3/4");
  QuerySpec ms;
  ms.kind = QueryKind::Mass;
  CHECK(query_str(ms) == "mass");

  std::string txt = eval_text(q, rows, false);
  CHECK(txt.find("query: prob") != std::string::npos);
  CHECK(txt.find("7/16") != std::string::npos);
}

TEST_CASE("queries: loading a missing file reports the path") {
  CHECK_THROWS_AS(Program::load("/nonexistent/missing.rml"),
                  std::runtime_error);
}
