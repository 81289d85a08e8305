#include "doctest.h"

#include <algorithm>
#include <set>

#include "eqdom/atlases.hpp"

using namespace eqdom;

namespace {

int distinct(Elem x, Elem y, Elem z) { return static_cast<int>(std::set<Elem>{x, y, z}.size()); }
Elem odd_one(Elem x, Elem y, Elem z) { return x == y ? z : (x == z ? y : x); }
Elem common(Elem x, Elem y, Elem z) { return x == y || x == z ? x : y; }

}  // namespace

TEST_CASE("self-dual operations pointwise") {
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) {
      Elem a = Elem(x), b = Elem(y);
      CHECK(sd_a()({a, b}) == (2 * x + 2 * y + 1) % 3);
      CHECK(sd_r()({a, b}) == (2 * (x * x + x + x * y + y + y * y)) % 3);
      CHECK(sd_l()({a, b}) == (x * x + 2 * x + x * y + 2 * y + y * y) % 3);
      for (int z = 0; z < 3; ++z) {
        Elem c = Elem(z);
        int d = distinct(a, b, c);
        CHECK(sd_m()({a, b, c}) == (d <= 2 ? common(a, b, c) : a));
        CHECK(sd_plus0()({a, b, c}) == (d <= 2 ? odd_one(a, b, c) : Elem((x + 1) % 3)));
        CHECK(sd_ps()({a, b, c}) == (d <= 2 ? a : b));
      }
    }
  CHECK(sd_r()({0, 1}) == 1);
  CHECK(sd_ps()({0, 1, 2}) == 1);
}

TEST_CASE("self-dual generators commute with the cyclic shift") {
  for (auto const& s : selfdual_catalog())
    if (s.id != "sigma")
      for (auto const& g : s.gens) CHECK(commutes(g, zeta3()));
  CHECK_THROWS_AS(classify_selfdual({constant_op(3, 0, 1)}), InputError);
}

TEST_CASE("Boolean operations pointwise") {
  for (int r = 0; r < 8; ++r) {
    Elem x = Elem(r >> 2), y = Elem((r >> 1) & 1), z = Elem(r & 1);
    CHECK(bool_h()({x, y, z}) == ((x + y + z) >= 2));
    CHECK(bool_g()({x, y, z}) == ((x + y + z) % 2));
    CHECK(bool_t()({x, y, z}) == (x | (y & z)));
    CHECK(bool_t_dual()({x, y, z}) == (x & (y | z)));
  }
}

TEST_CASE("catalog entries are well formed") {
  for (auto const& s : boolean_catalog()) {
    CHECK(s.q == 2);
    CHECK(s.gens.empty() == (s.id == "I2"));
  }
  CHECK(catalog_entry("D2").gens.size() >= 1);
  CHECK_THROWS_AS(catalog_entry("nope"), InputError);
}

TEST_CASE("Boolean classification") {
  CHECK(classify_boolean({bool_h()}).additive);
  CHECK(classify_boolean({bool_and(), bool_or(), bool_not()}).additive);
  CHECK_FALSE(classify_boolean({bool_and()}).additive);
  CHECK_FALSE(classify_boolean({bool_xor()}).additive);
  CHECK(boolean_tct({bool_and(), bool_or(), bool_not()}) == Tct::tp3);
  CHECK(boolean_tct({bool_and(), bool_or()}) == Tct::tp4);
  CHECK(boolean_tct({bool_and()}) == Tct::tp5);
  CHECK(boolean_tct({bool_xor()}) == Tct::tp2);
  CHECK(boolean_tct({bool_not()}) == Tct::tp1);
}

TEST_CASE("the ternary function of the continuum family") {
  auto p = family_prop82();
  auto in_list = [](int x, int y, int z) {
    return (x == 0 && y == 2 && z == 0) || (x == 0 && y == 1 && z == 1) || (x == 1 && y == 2 && z == 2);
  };
  for (int r = 0; r < 27; ++r) {
    int x = r / 9, y = (r / 3) % 3, z = r % 3;
    CHECK(p.f({Elem(x), Elem(y), Elem(z)}) == (in_list(x, y, z) ? 2 : x));
  }
  CHECK(p.f({2, 0, 1}) == 2);
  CHECK(solve_system(p.system) == delta4(3));
}

TEST_CASE("rho_k and f_n") {
  for (int k = 3; k <= 6; ++k) {
    // everything but e1 and the 0/1 tuples of weight 3..k-1
    std::size_t forbidden = 1;
    for (std::size_t r = 0; r < ipow(2, k); ++r) {
      int w = __builtin_popcount(static_cast<unsigned>(r));
      if (w >= 3 && w <= k - 1) ++forbidden;
    }
    CHECK(prop82_rho(k).size() == ipow(3, k) - forbidden);
  }
  CHECK(prop82_rho(3).size() == 26);
  auto f3 = prop82_fn(3);
  CHECK(f3({1, 1, 1}) == 1);
  CHECK(f3({0, 1, 0}) == 0);
  CHECK(f3({2, 1, 0}) == 2);
  for (int n = 2; n <= 4; ++n)
    for (int k = 3; k <= 6; ++k) CHECK(op_preserves(prop82_fn(n), prop82_rho(k)) == (k != n + 1));
}

TEST_CASE("Mal'cev corpus expectations") {
  auto corpus = malcev_corpus();
  CHECK(corpus.size() == 8);
  std::size_t positives = std::count_if(corpus.begin(), corpus.end(), [](auto const& c) { return c.additive; });
  CHECK(positives == 3);
}

TEST_CASE("zpl family shape") {
  auto z = family_zpl(2, 3, 2);
  CHECK(z.q == 8);
  CHECK(z.op("f").arity == 4);
  CHECK_THROWS(family_zpl(4, 1, 2));
}

TEST_CASE("quotient family at n = 3") {
  auto t = family_thm83(3, {3, 4});
  CHECK(t.a.q == 4);
  CHECK(t.z.q == 3);
  auto mu = monolith(t.a);
  REQUIRE(mu);
  CHECK(to_string(*mu) == "0,3|1|2");
}

TEST_CASE("Galois check on a small clone") {
  auto g = check_alg_inv({bool_h()}, 2);
  CHECK(g.equal);
}

TEST_CASE("claims are registered") {
  auto ids = claim_ids();
  CHECK(std::find(ids.begin(), ids.end(), "remark64-53") != ids.end());
  auto r = verify_claim("remark64-53");
  CHECK(r.status == "pass");
  CHECK_THROWS_AS(verify_claim("no-such-claim"), InputError);
}
