// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure.  Each criterion carries its wall-clock limit.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "eqdom/alggeo.hpp"
#include "eqdom/atlases.hpp"
#include "eqdom/clone.hpp"
#include "eqdom/conlat.hpp"
#include "props.hpp"

using namespace eqdom;

namespace {

// instances with a proven verdict, collected along the way for the FSI law
std::vector<FiniteAlgebra> proven_instances;

struct Fail {
  std::string why;
};
void need(bool ok, std::string const& why) {
  if (!ok) throw Fail{why};
}

bool is_restricted_to(OpTable const& op, OpTable const& want) {
  auto r = op_restrict(op, {0, 1});
  return r.op.values == want.values;
}

// A/mu and Z agree up to a bijection, op by op
bool isomorphic(FiniteAlgebra const& a, FiniteAlgebra const& b) {
  if (a.q != b.q || a.ops.size() != b.ops.size()) return false;
  std::vector<Elem> perm(static_cast<std::size_t>(a.q));
  std::iota(perm.begin(), perm.end(), Elem{0});
  do {
    bool ok = true;
    for (std::size_t j = 0; ok && j < a.ops.size(); ++j) {
      auto const& oa = a.ops[j];
      auto const& ob = b.ops[j];
      if (oa.arity != ob.arity) return false;
      Tuple x(static_cast<std::size_t>(oa.arity)), y(x.size());
      for (std::uint64_t r = 0; ok && r < oa.values.size(); ++r) {
        unrank_into(r, a.q, x);
        for (std::size_t t = 0; t < x.size(); ++t) y[t] = perm[x[t]];
        ok = perm[oa.values[r]] == ob(y);
      }
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

void c1() {
  auto e = enumerate_kary({bool_t()}, 2, 4);
  need(e.set.complete, "enumeration capped");
  need(e.set.members.size() == 53, "count " + std::to_string(e.set.members.size()));
}

void c2() {
  need(solve_system(h_system(bool_h())) == delta4(2), "h system");
  need(solve_system(tau_system(bool_t())) == delta4(2), "t system");
  need(solve_system(tau_system(bool_t_dual())) == delta4(2), "t-dual system");
}

void c3() {
  auto e = enumerate_kary({bool_t()}, 2, 4);
  auto const& ms = e.set.members;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i; j < ms.size(); ++j) {
      ++pairs;
      bool on_delta = true, off_delta = false;
      for (std::size_t r = 0; r < 16; ++r) {
        auto x = unrank(r, 2, 4);
        bool same = ms[i].values[r] == ms[j].values[r];
        if (x[0] == x[1] || x[2] == x[3]) on_delta = on_delta && same;
        else off_delta = off_delta || same;
      }
      need(!on_delta || off_delta, "pair " + std::to_string(i) + "," + std::to_string(j) + " separates delta");
    }
  need(pairs == 1431, "pair count " + std::to_string(pairs));
}

void c4() {
  std::map<std::string, bool> expected = {{"D2", true},  {"S00", true}, {"S10", true},
                                          {"E2", false}, {"V2", false}, {"L2", false}};
  std::set<std::string> seen;
  for (auto const& s : boolean_catalog()) {
    auto c = classify_boolean(s.gens);
    auto want = c.additive ? Verdict::proven : Verdict::refuted;
    auto direct = is_equationally_additive(as_algebra(s), Mode::term);
    need(direct.verdict == want, s.id + ": direct check disagrees");
    auto j = find_special(s.gens, 2, {SpecialKind::jonsson_chain, 5});
    need(j.verdict == want, s.id + ": Jonsson test disagrees");
    if (c.additive) proven_instances.push_back(as_algebra(s));
    std::string base = s.id.back() == 'c' ? s.id.substr(0, s.id.size() - 1) : s.id;
    if (auto it = expected.find(base); it != expected.end()) {
      need(c.additive == it->second, s.id + ": wrong verdict");
      seen.insert(s.id);
    }
  }
  need(seen.size() == 12, "catalog lacks some expected entries");
}

void c5() {
  std::set<std::string> positives;
  for (auto const& entry : malcev_corpus()) {
    auto const& alg = entry.alg;
    auto m = classify_malcev_eqadd(alg);
    auto d = is_equationally_additive(alg, Mode::polynomial);
    need(d.verdict != Verdict::inconclusive, alg.name + ": direct check inconclusive");
    need(m.additive == (d.verdict == Verdict::proven), alg.name + ": classifier disagrees with direct check");
    if (m.additive) {
      positives.insert(alg.name);
      proven_instances.push_back(alg);
    }
  }
  need(positives == std::set<std::string>{"F2", "F3", "zpl-2-3-2"}, "positive set");
}

void collapse_ok(OpTable const& f, Elem zero, std::string const& who) {
  auto s = sudoku_collapse(f, zero);
  need(s.p.values[zero] == zero && s.i != zero, who + ": sudoku image");
  for (int x = 0; x < f.q; ++x)
    if (x != zero) need(s.p.values[x] == s.i, who + ": sudoku not two-valued");
  need(s.dag.op_table(s.root).values == s.p.values, who + ": sudoku term");
  auto w = minimal_boolean_witness(f, zero);
  Elem i = w.i;
  need(w.c({zero}) == i && w.c({i}) == zero, who + ": complement");
  need(w.m({i, i}) == i && w.m({zero, i}) == zero && w.m({i, zero}) == zero && w.m({zero, zero}) == zero,
       who + ": meet");
}

void c6() {
  for (int p : {2, 3}) {
    auto out = build_delta_indicator_malcev(ring_zn(p));
    need(out.verdict == Verdict::proven, "F" + std::to_string(p) + ": " + out.note);
    need(is_delta_indicator(out.f, out.a), "F" + std::to_string(p) + ": not an indicator");
  }
  auto p82 = family_prop82();
  auto ind = find_delta_indicator(p82.alg, Mode::polynomial);
  need(ind.verdict == Verdict::proven, "prop82 indicator: " + ind.note);
  collapse_ok(ind.f, ind.zero, "prop82");
  auto z = family_zpl(2, 3, 2);
  collapse_ok(z.op("f"), 0, "zpl");
}

void c7() {
  need(solve_system(four_equation_system(sd_f_pi2())) == delta4(3), "f_pi2 system");
  need(solve_system(four_equation_system(sd_f_pi2_star())) == delta4(3), "f_pi2* system");
  need(solve_system(m_system(sd_m())) == delta4(3), "m system");
  need(is_restricted_to(sd_r(), bool_or()), "r on {0,1}");
  need(is_restricted_to(sd_l(), bool_and()), "l on {0,1}");
  need(is_restricted_to(sd_plus0(), bool_g()), "plus0 on {0,1}");
  struct Case {
    std::vector<OpTable> gens;
    Verdict want;
    std::string who;
  };
  std::vector<Case> cases = {{{sd_f_pi2()}, Verdict::proven, "f_pi2"},
                             {{sd_f_pi2_star()}, Verdict::proven, "f_pi2*"},
                             {{sd_m()}, Verdict::proven, "m"},
                             {{sd_a()}, Verdict::refuted, "a"},
                             {{sd_r(), sd_ps()}, Verdict::refuted, "r,ps"},
                             {{sd_l(), sd_ps()}, Verdict::refuted, "l,ps"},
                             {{sd_plus0()}, Verdict::refuted, "plus0"}};
  for (auto const& c : cases) {
    auto r = classify_selfdual(c.gens);
    need(r.additive == c.want, c.who + ": " + to_string(r.additive));
    if (r.additive == Verdict::proven) proven_instances.push_back(FiniteAlgebra{c.who, 3, c.gens, false});
  }
}

void c8() {
  auto p = family_prop82();
  need(solve_system(p.system) == delta4(3), "prop82 system");
  proven_instances.push_back(p.alg);
  for (int n = 2; n <= 5; ++n)
    for (int k = 3; k <= 7; ++k)
      need(op_preserves(prop82_fn(n), prop82_rho(k)) == (k != n + 1),
           "f" + std::to_string(n) + " vs rho" + std::to_string(k));
  for (auto const& idx : std::vector<std::vector<int>>{{}, {3}, {4}, {3, 4}}) {
    auto t = family_thm83(3, idx);
    std::string key = "I of size " + std::to_string(idx.size());
    auto add = is_equationally_additive(t.a, Mode::term);
    need(add.verdict == Verdict::proven, key + ": not additive");
    proven_instances.push_back(t.a);
    auto mu = monolith(t.a);
    need(mu && *mu == con_from_blocks(4, {{0, 3}}), key + ": monolith");
    need(isomorphic(quotient(t.a, *mu), t.z), key + ": quotient");
    // phi itself: onto, kernel mu, and a homomorphism
    for (int x = 0; x < t.a.q; ++x)
      for (int y = 0; y < t.a.q; ++y) need((t.phi[x] == t.phi[y]) == mu->related(Elem(x), Elem(y)), key + ": kernel");
    need(std::set<Elem>(t.phi.begin(), t.phi.end()).size() == static_cast<std::size_t>(t.z.q), key + ": phi onto");
    for (std::size_t j = 0; j < t.a.ops.size(); ++j) {
      auto const& oa = t.a.ops[j];
      Tuple x(static_cast<std::size_t>(oa.arity)), y(x.size());
      for (std::uint64_t r = 0; r < oa.values.size(); ++r) {
        unrank_into(r, t.a.q, x);
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = t.phi[x[i]];
        need(t.phi[oa.values[r]] == t.z.ops[j](y), key + ": phi not a homomorphism");
      }
    }
  }
}

void c9() {
  for (auto const& s : boolean_catalog())
    for (int m = 1; m <= 3; ++m) {
      auto g = check_alg_inv(s.gens, m);
      need(g.equal, s.id + " differs at arity " + std::to_string(m));
    }
}

void c10() {
  auto msg = props::union_law(200);
  need(msg.empty(), msg);
  for (auto const& a : proven_instances) need(is_fsi(a), a.name + ": proven but not FSI");
  need(!proven_instances.empty(), "no proven instances collected");
  for (auto const& e : malcev_corpus()) {
    for (auto const& m : {props::cg_laws(e.alg), props::malcev_cg_agreement(e.alg), props::commutator_laws(e.alg),
                          props::absorbing_agreement(e.alg, 1000)})
      need(m.empty(), m);
  }
  for (auto const& a : proven_instances) {
    auto m = props::commutator_laws(a);
    need(m.empty(), m);
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string what;
    double limit_s;
    std::function<void()> run;
  };
  std::vector<Criterion> cs = {
      {1, "t generates 53 quaternary operations", 1, c1},
      {2, "h, t and t-dual systems solve to delta", 1, c2},
      {3, "no single equation cuts out delta in the t clone", 1, c3},
      {4, "Boolean sweep agrees with direct and Jonsson checks", 30, c4},
      {5, "Mal'cev corpus classification", 60, c5},
      {6, "Mal'cev indicator, collapse and Boolean witness", 10, c6},
      {7, "self-dual systems, restrictions and classification", 60, c7},
      {8, "continuum family and the n = 3 quotient family", 120, c8},
      {9, "algebraic sets equal Inv of the centralizer on {0,1}", 60, c9},
      {10, "structural property suite", 300, c10},
  };
  int failures = 0;
  for (auto const& c : cs) {
    auto t0 = std::chrono::steady_clock::now();
    std::string why;
    try {
      c.run();
    } catch (Fail const& f) {
      why = f.why;
    } catch (std::exception const& e) {
      why = std::string("exception: ") + e.what();
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (why.empty() && s > c.limit_s) why = "over time limit";
    std::printf("%s [%d] %s (%.2fs, limit %.0fs)%s%s\n", why.empty() ? "PASS" : "FAIL", c.id, c.what.c_str(), s,
                c.limit_s, why.empty() ? "" : ": ", why.c_str());
    std::fflush(stdout);
    failures += !why.empty();
  }
  return failures ? 1 : 0;
}
