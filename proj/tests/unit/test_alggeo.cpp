#include "doctest.h"

#include "eqdom/alggeo.hpp"
#include "eqdom/atlases.hpp"
#include "props.hpp"

using namespace eqdom;

TEST_CASE("majority system defines delta on two elements") {
  CHECK(solve_system(h_system(bool_h())) == delta4(2));
  CHECK(solve_system(tau_system(bool_t())) == delta4(2));
  CHECK(solve_system(tau_system(bool_t_dual())) == delta4(2));
  // the system is h(x3,x4,x1) = h(x3,x4,x2)
  auto s = h_system(bool_h());
  REQUIRE(s.eqs.size() == 1);
  for (std::size_t r = 0; r < 16; ++r) {
    auto x = unrank(r, 2, 4);
    bool want = bool_h()({x[2], x[3], x[0]}) == bool_h()({x[2], x[3], x[1]});
    CHECK((s.eqs[0].left.values[r] == s.eqs[0].right.values[r]) == want);
  }
}

TEST_CASE("union of solution sets") {
  CHECK(props::union_law(60) == "");
}

TEST_CASE("union_system rejects a non-delta system") {
  // minority only cuts out x1 = x2
  auto bad = h_system(bool_g());
  auto b = h_system(bool_h());
  CHECK_THROWS_AS(union_system(b, b, bad), InputError);
}

TEST_CASE("separation certificates reproduce algebraic sets") {
  auto e = enumerate_kary({bool_h()}, 2, 4);
  REQUIRE(e.set.complete);
  auto r = is_algebraic(e.set, delta4(2));
  REQUIRE(r.algebraic);
  CHECK(solve_system(certificate_system(r.certificate, 4, 2)) == delta4(2));
  // conjunction alone cannot cut out delta
  auto m = enumerate_kary({bool_and()}, 2, 4);
  auto r2 = is_algebraic(m.set, delta4(2));
  CHECK_FALSE(r2.algebraic);
  REQUIRE(r2.failing);
  CHECK_FALSE(delta4(2).contains(*r2.failing));
}

TEST_CASE("additivity decisions") {
  auto f2 = is_equationally_additive(ring_zn(2), Mode::polynomial);
  CHECK(f2.verdict == Verdict::proven);
  CHECK(solve_system(f2.system) == delta4(2));
  auto z3 = is_equationally_additive(group_zn(3), Mode::polynomial);
  CHECK(z3.verdict == Verdict::refuted);
  REQUIRE(z3.counterexample);
  CHECK_FALSE(delta4(3).contains(*z3.counterexample));
  auto unary = is_equationally_additive(as_algebra(catalog_entry("N2")), Mode::term);
  CHECK(unary.verdict == Verdict::refuted);
}

TEST_CASE("indicator of zpl collapses to a two-valued map") {
  auto z = family_zpl(2, 3, 2);
  auto f = z.op("f");
  REQUIRE(is_delta_indicator(f, 0));
  auto s = sudoku_collapse(f, 0);
  CHECK(s.i == 4);
  CHECK(s.p.values[0] == 0);
  for (int x = 1; x < 8; ++x) CHECK(s.p.values[x] == s.i);
  // the term evaluates to the same table
  CHECK(s.dag.op_table(s.root).values == s.p.values);
  auto w = minimal_boolean_witness(f, 0);
  CHECK(w.c({0}) == w.i);
  CHECK(w.c({w.i}) == 0);
  CHECK(w.m({w.i, w.i}) == w.i);
  CHECK(w.m({0, w.i}) == 0);
}

TEST_CASE("sudoku rejects a function that is not an indicator") {
  CHECK_THROWS_AS(sudoku_collapse(bool_and(), 0), InputError);
}

TEST_CASE("Mal'cev construction on prime fields") {
  for (int p : {2, 3}) {
    auto out = build_delta_indicator_malcev(ring_zn(p));
    REQUIRE(out.verdict == Verdict::proven);
    CHECK(is_delta_indicator(out.f, out.a));
  }
  CHECK(build_delta_indicator_malcev(group_zn(3)).verdict == Verdict::refuted);
}

TEST_CASE("interpolation inside a monolith class") {
  auto f3 = ring_zn(3);
  auto mu = top_con(3);
  std::vector<Tuple> ts = {{0, 0}, {1, 2}, {2, 1}};
  std::vector<Elem> ls = {2, 0, 1};
  auto p = interpolate_in_class(f3, mu, {0, 1, 2}, ts, ls);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(p(ts[i]) == ls[i]);
}
