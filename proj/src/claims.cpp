// Registered computer checks.  Each claim is self-contained and reports the
// numbers it looked at.

#include <atomic>
#include <chrono>
#include <map>
#include <thread>

#include "eqdom/atlases.hpp"

namespace eqdom {

using nlohmann::json;

nlohmann::json ClaimReport::to_json() const {
  return json{{"id", id}, {"status", status}, {"details", details}, {"millis", millis}};
}

namespace {

struct Outcome {
  bool pass = true;
  bool open = false;  // some sub-check could not finish
  json details = json::object();
  void check(bool ok, std::string const& what) {
    if (!ok) {
      pass = false;
      details["failed"].push_back(what);
    }
  }
};

json relation_size(Relation const& r) { return r.size(); }

Outcome majority_eq() {
  Outcome o;
  auto sol = solve_system(h_system(bool_h()));
  o.details["solutions"] = relation_size(sol);
  o.check(sol == delta4(2), "h-system solves to delta");
  return o;
}

Outcome tau_systems() {
  Outcome o;
  for (auto const& t : {bool_t(), bool_t_dual()}) {
    auto sol = solve_system(tau_system(t));
    o.details[t.name] = relation_size(sol);
    o.check(sol == delta4(2), t.name + "-system solves to delta");
  }
  return o;
}

Outcome count53() {
  Outcome o;
  auto e = enumerate_kary({bool_t()}, 2, 4);
  o.details["count"] = e.set.members.size();
  o.details["complete"] = e.set.complete;
  o.check(e.set.complete && e.set.members.size() == 53, "53 quaternary members");
  return o;
}

Outcome no_single_equation() {
  Outcome o;
  auto e = enumerate_kary({bool_t()}, 2, 4);
  auto const& ms = e.set.members;
  auto d = delta4(2);
  auto out = complement(d);
  std::size_t pairs = 0, agreeing = 0, bad = 0;
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i; j < ms.size(); ++j) {
      ++pairs;
      bool on_delta = true;
      for (auto r : d.ranks) on_delta = on_delta && ms[i].values[r] == ms[j].values[r];
      if (!on_delta) continue;
      ++agreeing;
      bool somewhere = false;
      for (auto r : out.ranks) somewhere = somewhere || ms[i].values[r] == ms[j].values[r];
      if (!somewhere) ++bad;
    }
  o.details["pairs"] = pairs;
  o.details["agree_on_delta"] = agreeing;
  o.details["separating_pairs"] = bad;
  o.check(e.set.complete && ms.size() == 53 && pairs == 53 * 54 / 2, "53 members, all pairs seen");
  o.check(bad == 0, "no pair cuts out delta alone");
  return o;
}

Outcome selfdual_systems() {
  Outcome o;
  std::vector<std::pair<std::string, EquationSystem>> systems = {
      {"fpi2", four_equation_system(sd_f_pi2())},
      {"fpi2s", four_equation_system(sd_f_pi2_star())},
      {"m", m_system(sd_m())}};
  for (auto const& [name, s] : systems) {
    auto sol = solve_system(s);
    o.details[name] = {{"equations", s.eqs.size()}, {"solutions", sol.size()}};
    o.check(sol == delta4(3), name + " system solves to delta");
  }
  return o;
}

Outcome selfdual_sweep() {
  Outcome o;
  std::map<std::string, bool> expected = {{"fpi2", true},   {"fpi2s", true}, {"m", true},
                                          {"a", false},     {"r-ps", false}, {"l-ps", false},
                                          {"plus0", false}, {"zeta", false}, {"r", false},
                                          {"l", false},     {"ps", false}};
  OpTable sigma = sigma3();
  for (auto const& [id, want] : expected) {
    auto const& s = catalog_entry(id);
    json d;
    auto c = classify_selfdual(s.gens);
    d["classify"] = to_string(c.additive);
    d["route"] = c.route;
    if (c.additive == Verdict::inconclusive) o.open = true;
    o.check(c.additive == (want ? Verdict::proven : Verdict::refuted), id + ": classification");

    std::vector<OpTable> conj;
    for (auto const& g : s.gens) conj.push_back(op_conjugate(g, sigma));
    auto cc = classify_selfdual(conj);
    d["sigma_conjugate"] = to_string(cc.additive);
    o.check(cc.additive == c.additive, id + ": invariant under sigma");

    auto j = find_special(s.gens, 3, {SpecialKind::jonsson_chain, 5});
    d["jonsson"] = to_string(j.verdict);
    o.check(j.verdict == c.additive, id + ": Jonsson chain agrees");

    auto direct = is_equationally_additive(as_algebra(s), Mode::term);
    d["direct"] = to_string(direct.verdict);
    if (direct.verdict != Verdict::inconclusive)
      o.check(direct.verdict == c.additive, id + ": direct check agrees");
    o.details[id] = d;
  }
  // restrictions to {0,1}
  o.check(op_restrict(sd_r(), {0, 1}).op.values == bool_or().values, "r on {0,1} is join");
  o.check(op_restrict(sd_l(), {0, 1}).op.values == bool_and().values, "l on {0,1} is meet");
  o.check(op_restrict(sd_plus0(), {0, 1}).op.values == bool_g().values, "plus0 on {0,1} is g");
  o.details["restrictions_checked"] = 3;
  return o;
}

Outcome boolean_sweep() {
  Outcome o;
  std::map<std::string, bool> expected = {{"D2", true}, {"S00", true}, {"S10", true}, {"M2", true},
                                          {"P2", true}, {"BA", true},  {"E2", false}, {"V2", false},
                                          {"L2", false}, {"N2", false}, {"I2", false}};
  for (auto const& s : boolean_catalog()) {
    std::string base = s.id.back() == 'c' ? s.id.substr(0, s.id.size() - 1) : s.id;
    json d;
    auto c = classify_boolean(s.gens);
    auto direct = is_equationally_additive(as_algebra(s), Mode::term);
    auto j = find_special(s.gens, 2, {SpecialKind::jonsson_chain, 5});
    d["containment"] = c.additive;
    d["route"] = c.route;
    d["tct"] = to_string(c.tct);
    d["direct"] = to_string(direct.verdict);
    d["jonsson"] = to_string(j.verdict);
    auto want = c.additive ? Verdict::proven : Verdict::refuted;
    o.check(direct.verdict == want, s.id + ": direct agrees with containment");
    o.check(j.verdict == want, s.id + ": Jonsson chain agrees with containment");
    if (auto it = expected.find(base); it != expected.end())
      o.check(c.additive == it->second, s.id + ": expected verdict");
    o.details[s.id] = d;
  }
  return o;
}

Outcome prop82_system() {
  Outcome o;
  auto p = family_prop82();
  auto sol = solve_system(p.system);
  o.details["solutions"] = sol.size();
  o.check(sol == delta4(3), "four equations solve to delta");
  auto direct = is_equationally_additive(p.alg, Mode::term);
  o.details["direct"] = to_string(direct.verdict);
  o.check(direct.verdict == Verdict::proven, "algebra is additive");
  return o;
}

Outcome prop82_grid() {
  Outcome o;
  json grid = json::array();
  for (int n = 2; n <= 5; ++n)
    for (int k = 3; k <= 7; ++k) {
      bool pres = op_preserves(prop82_fn(n), prop82_rho(k));
      grid.push_back({{"n", n}, {"k", k}, {"preserves", pres}});
      o.check(pres == (k != n + 1), "f" + std::to_string(n) + " vs rho" + std::to_string(k));
    }
  o.details["grid"] = grid;
  return o;
}

Outcome thm83() {
  Outcome o;
  std::vector<std::vector<int>> sets = {{}, {3}, {4}, {3, 4}};
  for (auto const& idx : sets) {
    auto f = family_thm83(3, idx);
    std::string key = "I={";
    for (std::size_t i = 0; i < idx.size(); ++i) key += (i ? "," : "") + std::to_string(idx[i]);
    key += "}";
    json d;
    auto add = is_equationally_additive(f.a, Mode::term);
    d["additive"] = to_string(add.verdict);
    o.check(add.verdict == Verdict::proven, key + ": additive");
    auto mu = monolith(f.a);
    auto want = con_from_blocks(4, {{0, 3}});
    d["monolith"] = mu ? to_string(*mu) : "none";
    o.check(mu && *mu == want, key + ": monolith");
    // phi is a surjective homomorphism with kernel mu, so A/mu is Z
    bool hom = true;
    for (std::size_t j = 0; j < f.a.ops.size(); ++j) {
      auto const& oa = f.a.ops[j];
      auto const& oz = f.z.ops[j];
      Tuple x(static_cast<std::size_t>(oa.arity)), y(x.size());
      for (std::uint64_t r = 0; r < oa.values.size(); ++r) {
        unrank_into(r, f.a.q, x);
        for (std::size_t t = 0; t < x.size(); ++t) y[t] = f.phi[x[t]];
        hom = hom && f.phi[oa.values[r]] == oz(y);
      }
    }
    o.check(hom, key + ": phi is a homomorphism");
    if (mu) {
      auto quo = quotient(f.a, *mu);
      bool same = quo.ops.size() == f.z.ops.size();
      for (std::size_t j = 0; same && j < quo.ops.size(); ++j) same = quo.ops[j].values == f.z.ops[j].values;
      d["quotient_matches"] = same;
      o.check(same, key + ": quotient tables");
    }
    o.details[key] = d;
  }
  return o;
}

Outcome zpl232() {
  Outcome o;
  auto z = family_zpl(2, 3, 2);
  auto m = classify_malcev_eqadd(z);
  o.details["malcev_term"] = m.malcev_term;
  o.details["monolith"] = m.monolith ? to_string(*m.monolith) : "none";
  o.check(m.si && m.additive, "SI with non-Abelian monolith");
  std::vector<std::vector<Elem>> cosets;
  for (Elem a = 0; a < 4; ++a) cosets.push_back({a, static_cast<Elem>(a + 4)});
  o.check(m.monolith && *m.monolith == con_from_blocks(8, cosets), "monolith is the <4> partition");
  if (m.monolith) {
    auto quo = quotient(z, *m.monolith);
    auto const& f = quo.op("f");
    bool zero = std::all_of(f.values.begin(), f.values.end(), [](Elem v) { return v == 0; });
    o.check(zero, "f collapses to the constant 0 mod <4>");
  }
  auto s = sudoku_collapse(z.op("f"), 0);
  o.details["sudoku_i"] = s.i;
  o.check(s.i == 4, "collapse lands on 4");
  auto w = minimal_boolean_witness(z.op("f"), 0);
  o.details["boolean_pair"] = {w.zero, w.i};
  auto direct = is_equationally_additive(z, Mode::polynomial);
  o.details["direct"] = to_string(direct.verdict);
  o.check(direct.verdict == Verdict::proven, "direct check proves additivity");
  return o;
}

Outcome lemma311() {
  Outcome o;
  FiniteAlgebra bare{"bare3", 3, {}, false};
  auto ext = lemma311_extend(bare, 0, 1);
  auto mu = monolith(ext);
  o.details["monolith"] = mu ? to_string(*mu) : "none";
  o.check(mu && *mu == cg(ext, {{0, 1}}), "monolith is Cg(0,1)");
  auto add = is_equationally_additive(ext, Mode::term);
  o.details["route"] = add.route;
  o.check(add.verdict == Verdict::proven && add.system.eqs.size() == 1, "one-equation system");
  if (mu) {
    auto quo = quotient(ext, *mu);
    auto const& f = quo.op("f");
    bool constant = std::all_of(f.values.begin(), f.values.end(), [&](Elem v) { return v == f.values[0]; });
    o.check(constant, "f is constant modulo the monolith");
  }
  return o;
}

Outcome corpus() {
  Outcome o;
  for (auto const& e : malcev_corpus()) {
    json d;
    auto m = classify_malcev_eqadd(e.alg);
    auto direct = is_equationally_additive(e.alg, Mode::polynomial);
    d["malcev"] = m.additive;
    d["direct"] = to_string(direct.verdict);
    d["route"] = direct.route;
    if (direct.verdict == Verdict::inconclusive) o.open = true;
    o.check(m.additive == e.additive, e.alg.name + ": expected");
    o.check(direct.verdict == (e.additive ? Verdict::proven : Verdict::refuted), e.alg.name + ": direct agrees");
    o.details[e.alg.name] = d;
  }
  return o;
}

Outcome alginv() {
  Outcome o;
  for (auto const& s : boolean_catalog()) {
    json d = json::array();
    for (int m = 1; m <= 3; ++m) {
      auto g = check_alg_inv(s.gens, m);
      d.push_back(g.algebraic_sets);
      o.check(g.equal, s.id + ": arity " + std::to_string(m));
    }
    o.details[s.id] = d;
  }
  return o;
}

using ClaimFn = Outcome (*)();

std::vector<std::pair<std::string, ClaimFn>> const& registry() {
  static std::vector<std::pair<std::string, ClaimFn>> const r = {
      {"remark64-majority-eq", majority_eq},
      {"remark64-tau-systems", tau_systems},
      {"remark64-53", count53},
      {"remark64-no-single-equation", no_single_equation},
      {"lemma72-systems", selfdual_systems},
      {"thm76-classification-sweep", selfdual_sweep},
      {"boolean-classification-sweep", boolean_sweep},
      {"prop82-system", prop82_system},
      {"prop82-separation", prop82_grid},
      {"thm83-n3", thm83},
      {"zpl-232", zpl232},
      {"lemma311-smoke", lemma311},
      {"thm48-corpus", corpus},
      {"thm65-boolean-alginv", alginv},
  };
  return r;
}

}  // namespace

std::vector<std::string> claim_ids() {
  std::vector<std::string> ids;
  for (auto const& [id, fn] : registry()) ids.push_back(id);
  return ids;
}

ClaimReport verify_claim(std::string const& id) {
  for (auto const& [name, fn] : registry()) {
    if (name != id) continue;
    ClaimReport rep;
    rep.id = id;
    auto t0 = std::chrono::steady_clock::now();
    try {
      Outcome o = fn();
      rep.details = o.details;
      rep.status = !o.pass ? "fail" : o.open ? "inconclusive" : "pass";
    } catch (BudgetError const& e) {
      rep.status = "inconclusive";
      rep.details = json{{"error", e.what()}};
    } catch (std::exception const& e) {
      rep.status = "fail";
      rep.details = json{{"error", e.what()}};
    }
    rep.millis = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }
  throw InputError("unknown claim id '" + id + "'");
}

std::vector<ClaimReport> verify_claims(std::vector<std::string> const& ids) {
  for (auto const& id : ids) {
    auto known = claim_ids();
    if (std::find(known.begin(), known.end(), id) == known.end()) throw InputError("unknown claim id '" + id + "'");
  }
  std::vector<ClaimReport> out(ids.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < ids.size();) out[i] = verify_claim(ids[i]);
  };
  unsigned n = std::max(1u, std::min<unsigned>(worker_count(), static_cast<unsigned>(ids.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace eqdom
