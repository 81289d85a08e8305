#include "doctest.h"

#include <random>
#include <set>

#include "eqdom/clone.hpp"

using namespace eqdom;

namespace {

OpTable meet2() { return make_op("and", 2, 2, [](auto x) { return Elem(x[0] & x[1]); }); }
OpTable join2() { return make_op("or", 2, 2, [](auto x) { return Elem(x[0] | x[1]); }); }
OpTable neg2() { return make_op("not", 2, 1, [](auto x) { return Elem(1 - x[0]); }); }
OpTable t2() {
  // t(x,y,z) = x or (y and z)
  return make_op("t", 2, 3, [](auto x) { return Elem(x[0] | (x[1] & x[2])); });
}
OpTable maj2() {
  return make_op("h", 2, 3, [](auto x) { return Elem((x[0] + x[1] + x[2]) >= 2); });
}

// Oracle: naive closure by repeated full composition over the member list.
std::size_t naive_closure_size(std::vector<OpTable> const& gens, int q, int k) {
  std::vector<OpTable> members;
  for (int i = 0; i < k; ++i) members.push_back(projection(q, k, i));
  auto has = [&](OpTable const& t) {
    for (auto const& m : members)
      if (m.values == t.values) return true;
    return false;
  };
  bool grew = true;
  while (grew) {
    grew = false;
    for (auto const& g : gens) {
      std::size_t n = members.size();
      std::vector<std::size_t> idx(static_cast<std::size_t>(g.arity), 0);
      while (true) {
        std::vector<OpTable> in;
        for (auto i : idx) in.push_back(members[i]);
        auto c = op_compose(g, in);
        if (!has(c)) {
          members.push_back(c);
          grew = true;
        }
        std::size_t d = idx.size();
        bool carry = true;
        while (carry && d > 0) {
          --d;
          if (++idx[d] < n) carry = false;
          else idx[d] = 0;
        }
        if (carry) break;
      }
    }
  }
  return members.size();
}

}  // namespace

TEST_CASE("meet generates three binary operations") {
  auto e = enumerate_kary({meet2()}, 2, 2);
  CHECK(e.verdict == Verdict::proven);
  CHECK(e.set.members.size() == 3);
  CHECK(naive_closure_size({meet2()}, 2, 2) == 3);
}

TEST_CASE("negation generates two unary operations") {
  auto e = enumerate_kary({neg2()}, 2, 1);
  CHECK(e.set.members.size() == 2);
}

TEST_CASE("t has 53 quaternary term operations") {
  auto e = enumerate_kary({t2()}, 2, 4);
  CHECK(e.verdict == Verdict::proven);
  CHECK(e.set.members.size() == 53);
}

TEST_CASE("closure agrees with naive oracle on small Boolean clones") {
  std::vector<std::vector<OpTable>> sets = {{meet2()}, {join2(), neg2()}, {t2()}, {maj2()}};
  for (auto const& g : sets)
    for (int k = 1; k <= 3; ++k) CHECK(enumerate_kary(g, 2, k).set.members.size() == naive_closure_size(g, 2, k));
}

TEST_CASE("witnesses evaluate back to member tables") {
  auto e = enumerate_kary({t2(), neg2()}, 2, 3);
  for (std::size_t i = 0; i < e.set.members.size(); ++i)
    CHECK(e.set.evaluate_witness(i).values == e.set.members[i].values);
}

TEST_CASE("projections come first") {
  auto e = enumerate_kary({maj2()}, 2, 3);
  for (int i = 0; i < 3; ++i) CHECK(e.set.members[i].values == projection(2, 3, i).values);
}

TEST_CASE("majority lies in the clone of meet and join") {
  auto r = clone_contains({meet2(), join2()}, 2, maj2());
  CHECK(r.verdict == Verdict::proven);
  CHECK(clone_contains({meet2()}, 2, join2()).verdict == Verdict::refuted);
  CHECK(clone_contains({}, 2, projection(2, 2, 0)).verdict == Verdict::proven);
}

TEST_CASE("special terms") {
  auto z3p = make_op("d", 3, 3, [](auto x) { return Elem((x[0] + 2 * x[1] + x[2]) % 3); });
  auto plus = make_op("+", 3, 2, [](auto x) { return Elem((x[0] + x[1]) % 3); });
  auto minus = make_op("-", 3, 1, [](auto x) { return Elem((3 - x[0]) % 3); });
  auto m = find_special({plus, minus}, 3, {SpecialKind::malcev});
  REQUIRE(m.verdict == Verdict::proven);
  CHECK(m.tables[0].values == z3p.values);
  CHECK(find_special({meet2()}, 2, {SpecialKind::malcev}).verdict == Verdict::refuted);
  auto j = find_special({maj2()}, 2, {SpecialKind::jonsson_chain, 2});
  REQUIRE(j.verdict == Verdict::proven);
  CHECK(j.tables.size() == 3);
  CHECK(j.tables[1].values == maj2().values);
  CHECK(check_jonsson_chain(j.tables));
}

TEST_CASE("centralizers") {
  auto zeta = cyclic_shift(3);
  CHECK(centralizer_kary({zeta}, 3, 1).size() == 3);
  CHECK(bicentralizer_contains({t2()}, 2, maj2(), 3));
  CHECK_THROWS_AS(centralizer_kary({meet2()}, 2, 5), BudgetError);
}

TEST_CASE("curried subpower closure matches the witness closure") {
  std::mt19937 rng(0);
  for (int t = 0; t < 30; ++t) {
    int q = 2 + t % 3;
    std::size_t width = 2 + t % 3;
    std::vector<OpTable> gens;
    for (int g = 0; g < 1 + t % 2; ++g) {
      OpTable op;
      op.name = "g" + std::to_string(g);
      op.q = q;
      op.arity = 1 + (t + g) % 3;
      op.values.resize(ipow(q, op.arity));
      for (auto& v : op.values) v = static_cast<Elem>(rng() % q);
      gens.push_back(op);
    }
    std::vector<std::vector<Elem>> seeds(2, std::vector<Elem>(width));
    for (auto& s : seeds)
      for (auto& e : s) e = static_cast<Elem>(rng() % q);
    Closure cl(gens, q, width, seeds, SIZE_MAX);
    REQUIRE(cl.run() == Closure::Status::fixpoint);
    std::set<std::vector<Elem>> want, got;
    for (std::size_t i = 0; i < cl.size(); ++i) want.emplace(cl.row(i).begin(), cl.row(i).end());
    for (auto const& r : subpower_rows(gens, q, width, seeds)) got.insert(r);
    CHECK(got == want);
  }
}
