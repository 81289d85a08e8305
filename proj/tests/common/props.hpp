// Structural laws shared by the unit tests and the acceptance runner.
// Each check returns an empty string on success, else what went wrong.
#pragma once

#include <map>
#include <random>
#include <set>
#include <string>

#include "eqdom/alggeo.hpp"
#include "eqdom/atlases.hpp"
#include "eqdom/clone.hpp"
#include "eqdom/conlat.hpp"

namespace props {

using namespace eqdom;

inline OpTable random_op(std::mt19937& rng, int q, int arity, std::string name) {
  OpTable t;
  t.name = std::move(name);
  t.q = q;
  t.arity = arity;
  t.values.resize(ipow(q, arity));
  for (auto& v : t.values) v = static_cast<Elem>(rng() % q);
  return t;
}

// k-ary system with n random equations; sides are random tables
inline EquationSystem random_system(std::mt19937& rng, int q, int k, int n) {
  EquationSystem s;
  s.q = q;
  s.k = k;
  for (int i = 0; i < n; ++i) {
    auto l = random_op(rng, q, k, "f" + std::to_string(i));
    auto r = random_op(rng, q, k, "g" + std::to_string(i));
    // bias toward large solution sets so unions are not trivially empty
    for (std::size_t c = 0; c < l.values.size(); ++c)
      if (rng() % 3) r.values[c] = l.values[c];
    s.eqs.push_back({l, r, l.name, r.name});
  }
  return s;
}

// solution set of B plus solution set of C, tuple by tuple
inline std::set<std::uint64_t> naive_union(EquationSystem const& b, EquationSystem const& c) {
  std::set<std::uint64_t> out;
  auto holds = [](EquationSystem const& s, std::size_t r) {
    for (auto const& e : s.eqs)
      if (e.left.values[r] != e.right.values[r]) return false;
    return true;
  };
  std::size_t n = ipow(b.q, b.k);
  for (std::size_t r = 0; r < n; ++r)
    if (holds(b, r) || holds(c, r)) out.insert(r);
  return out;
}

inline std::string union_law(int trials) {
  std::mt19937 rng(0);
  for (int t = 0; t < trials; ++t) {
    int q = 2 + t % 2;
    int k = 1 + static_cast<int>(rng() % 3);
    auto delta = q == 2 ? h_system(bool_h()) : m_system(sd_m());
    auto b = random_system(rng, q, k, 1 + static_cast<int>(rng() % 3));
    auto c = random_system(rng, q, k, 1 + static_cast<int>(rng() % 3));
    auto u = solve_system(union_system(b, c, delta));
    auto want = naive_union(b, c);
    std::set<std::uint64_t> got(u.ranks.begin(), u.ranks.end());
    if (got != want) return "union law fails on trial " + std::to_string(t);
  }
  return {};
}

// every pair set of size one: extensive, compatible, least, idempotent
inline std::string cg_laws(FiniteAlgebra const& alg) {
  auto lat = all_congruences(alg);
  int q = alg.q;
  for (int a = 0; a < q; ++a)
    for (int b = a + 1; b < q; ++b) {
      auto c = cg(alg, {{Elem(a), Elem(b)}});
      if (!c.related(Elem(a), Elem(b))) return alg.name + ": cg not extensive";
      if (!is_compatible(alg, c)) return alg.name + ": cg not compatible";
      if (!(cg(alg, c.pairs()) == c)) return alg.name + ": cg not idempotent";
      for (auto const& th : lat.elems)
        if (th.related(Elem(a), Elem(b)) && !c.leq(th)) return alg.name + ": cg not least";
      for (int d = 0; d < q; ++d) {
        auto bigger = cg(alg, {{Elem(a), Elem(b)}, {Elem(a), Elem(d)}});
        if (!c.leq(bigger)) return alg.name + ": cg not monotone";
      }
    }
  return {};
}

// Cg(a,b) is {(p(a),p(b)) : p unary polynomial} when a Mal'cev term exists.
// Those value pairs form the subuniverse of A^2 generated by (a,b) and the
// constants; for two pairs, (p(a1,a2),p(b1,b2)) with p binary.
inline std::string malcev_cg_agreement(FiniteAlgebra const& alg) {
  int q = alg.q;
  auto gens = polynomial_gens(alg);
  auto check = [&](std::vector<Pair> const& ps) {
    std::vector<std::vector<Elem>> seeds;
    for (auto [a, b] : ps) seeds.push_back({a, b});
    std::set<Pair> img;
    for (auto const& r : subpower_rows(gens, q, 2, seeds)) img.emplace(r[0], r[1]);
    auto c = cg(alg, ps);
    std::set<Pair> want;
    for (int x = 0; x < q; ++x)
      for (int y = 0; y < q; ++y)
        if (c.related(Elem(x), Elem(y))) want.emplace(Elem(x), Elem(y));
    return img == want;
  };
  std::vector<Pair> ps;
  for (int a = 0; a < q; ++a)
    for (int b = a + 1; b < q; ++b) ps.emplace_back(Elem(a), Elem(b));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!check({ps[i]})) return alg.name + ": polynomial image differs from cg";
    for (std::size_t j = i + 1; j < ps.size(); ++j)
      if (!check({ps[i], ps[j]})) return alg.name + ": binary polynomial image differs from cg";
  }
  return {};
}

inline std::string commutator_laws(FiniteAlgebra const& alg) {
  auto lat = all_congruences(alg);
  std::size_t n = lat.elems.size();
  std::vector<std::vector<Congruence>> c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c[i].push_back(commutator(alg, lat.elems[i], lat.elems[j]));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!c[i][j].leq(con_meet(lat.elems[i], lat.elems[j]))) return alg.name + ": commutator above meet";
      for (std::size_t i2 = 0; i2 < n; ++i2)
        if (lat.elems[i].leq(lat.elems[i2]) && !c[i][j].leq(c[i2][j]))
          return alg.name + ": commutator not monotone";
      for (std::size_t j2 = 0; j2 < n; ++j2)
        if (lat.elems[j].leq(lat.elems[j2]) && !c[i][j].leq(c[i][j2]))
          return alg.name + ": commutator not monotone";
    }
  return {};
}

// absorbing-polynomial set against [Cg(u1,v1), Cg(u2,v2)] in a Mal'cev
// algebra; `limit` bounds the (pair, pair) combinations tried
inline std::string absorbing_agreement(FiniteAlgebra const& alg, std::size_t limit) {
  int q = alg.q;
  std::vector<Pair> ps;
  for (int u = 0; u < q; ++u)
    for (int v = u + 1; v < q; ++v) ps.emplace_back(Elem(u), Elem(v));
  std::size_t tried = 0;
  auto d = find_special(polynomial_gens(alg), q, {SpecialKind::malcev});
  if (d.verdict != Verdict::proven) return alg.name + ": no Mal'cev polynomial";
  std::map<std::pair<std::vector<Elem>, std::vector<Elem>>, Congruence> memo;
  for (std::size_t i = 0; i < ps.size() && tried < limit; ++i)
    for (std::size_t j = i; j < ps.size() && tried < limit; ++j, ++tried) {
      auto got = absorbing_commutator_malcev(alg, d.tables[0], ps[i], ps[j]);
      if (got.verdict != Verdict::proven) return alg.name + ": absorbing set incomplete";
      auto a1 = cg(alg, {ps[i]}), a2 = cg(alg, {ps[j]});
      auto key = std::make_pair(a1.rep, a2.rep);
      auto it = memo.find(key);
      if (it == memo.end()) it = memo.emplace(key, commutator(alg, a1, a2)).first;
      auto const& comm = it->second;
      std::set<Pair> want, have(got.pairs.begin(), got.pairs.end());
      for (int x = 0; x < q; ++x)
        for (int y = 0; y < q; ++y)
          if (comm.related(Elem(x), Elem(y))) want.emplace(Elem(x), Elem(y));
      if (have != want) return alg.name + ": absorbing set differs from commutator";
    }
  return {};
}

}  // namespace props
