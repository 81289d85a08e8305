#include "doctest.h"

#include <random>

#include "eqdom/core.hpp"
#include "props.hpp"

using namespace eqdom;

TEST_CASE("rank puts the first coordinate most significant") {
  CHECK(unrank(5, 2, 3) == Tuple{1, 0, 1});
  CHECK(unrank(7, 3, 2) == Tuple{2, 1});
  CHECK(ipow(3, 4) == 81);
}

TEST_CASE("delta4 counts") {
  // brute force: x1=x2 or x3=x4
  for (int q = 1; q <= 4; ++q) {
    std::size_t n = 0;
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b)
        for (int c = 0; c < q; ++c)
          for (int d = 0; d < q; ++d) n += (a == b || c == d);
    CHECK(delta4(q).size() == n);
  }
  CHECK(delta4(2).size() == 12);
  CHECK(delta4(3).size() == 45);
}

TEST_CASE("composition agrees with pointwise evaluation") {
  std::mt19937 rng(0);
  for (int t = 0; t < 20; ++t) {
    int q = 2 + t % 3;
    auto outer = props::random_op(rng, q, 2, "o");
    auto i1 = props::random_op(rng, q, 3, "a");
    auto i2 = props::random_op(rng, q, 3, "b");
    auto c = op_compose(outer, {i1, i2});
    for (std::size_t r = 0; r < c.size(); ++r) {
      auto x = unrank(r, q, 3);
      CHECK(c(x) == outer({i1(x), i2(x)}));
    }
  }
}

TEST_CASE("preservation fast path matches the naive check") {
  std::mt19937 rng(0);
  for (int t = 0; t < 40; ++t) {
    int q = 2 + t % 2;
    auto f = props::random_op(rng, q, 1 + static_cast<int>(rng() % 3), "f");
    std::vector<Tuple> tuples;
    for (std::size_t r = 0; r < ipow(q, 2); ++r)
      if (rng() % 2) tuples.push_back(unrank(r, q, 2));
    auto rel = make_relation(q, 2, tuples);
    CHECK(op_preserves(f, rel) == op_preserves_naive(f, rel));
  }
}

TEST_CASE("essential arity") {
  auto maj = make_op("h", 2, 3, [](auto x) { return Elem((x[0] + x[1] + x[2]) >= 2); });
  CHECK(essential_arity(maj) == 3);
  CHECK(essential_arity(projection(3, 4, 2)) == 1);
  CHECK(essential_arity(constant_op(3, 1, 2)) == 0);
  CHECK(is_projection(projection(2, 3, 1)));
}

TEST_CASE("algebra text round trip") {
  Bundle b;
  b.alg.name = "z3";
  b.alg.q = 3;
  b.alg.ops.push_back(make_op("+", 3, 2, [](auto x) { return Elem((x[0] + x[1]) % 3); }));
  b.alg.ops.push_back(make_op("-", 3, 1, [](auto x) { return Elem((3 - x[0]) % 3); }));
  b.relations.push_back({"le", make_relation(3, 2, {{0, 0}, {0, 1}, {1, 1}, {2, 2}})});
  auto text = emit_algebra(b);
  auto back = parse_algebra(text);
  CHECK(back == b);
  CHECK(emit_algebra(back) == text);
}

TEST_CASE("malformed algebras are rejected") {
  CHECK_THROWS_AS(parse_algebra("algebra x\nsize 2\nop f 1\n0 2\n"), InputError);
  CHECK_THROWS_AS(parse_algebra("algebra x\nsize 2\nop f 2\n0 1\n"), InputError);
  CHECK_THROWS_AS(parse_algebra("size two\n"), InputError);
}
