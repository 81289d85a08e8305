#include "eqdom/conlat.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace eqdom {

namespace {

struct UnionFind {
  std::vector<Elem> parent;
  explicit UnionFind(int q) : parent(static_cast<std::size_t>(q)) {
    std::iota(parent.begin(), parent.end(), Elem{0});
  }
  Elem find(Elem x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  // keeps the smaller root so roots end up as least representatives
  bool unite(Elem a, Elem b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return true;
  }
  Congruence con(int q) {
    Congruence c{q, std::vector<Elem>(static_cast<std::size_t>(q))};
    for (int x = 0; x < q; ++x) c.rep[x] = find(static_cast<Elem>(x));
    return c;
  }
};

}  // namespace

bool Congruence::leq(Congruence const& o) const {
  for (int x = 0; x < q; ++x)
    if (o.rep[x] != o.rep[rep[x]]) return false;
  return true;
}

bool Congruence::is_bottom() const {
  for (int x = 0; x < q; ++x)
    if (rep[x] != x) return false;
  return true;
}

bool Congruence::is_top() const {
  return std::all_of(rep.begin(), rep.end(), [](Elem r) { return r == 0; });
}

std::size_t Congruence::block_count() const {
  std::size_t n = 0;
  for (int x = 0; x < q; ++x) n += rep[x] == x;
  return n;
}

std::vector<std::vector<Elem>> Congruence::blocks() const {
  std::vector<std::vector<Elem>> out;
  std::vector<int> slot(static_cast<std::size_t>(q), -1);
  for (int x = 0; x < q; ++x) {
    if (slot[rep[x]] < 0) {
      slot[rep[x]] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(slot[rep[x]])].push_back(static_cast<Elem>(x));
  }
  return out;
}

std::vector<Pair> Congruence::pairs() const {
  std::vector<Pair> out;
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      if (a != b && rep[a] == rep[b]) out.emplace_back(a, b);
  return out;
}

Congruence bottom_con(int q) {
  Congruence c{q, std::vector<Elem>(static_cast<std::size_t>(q))};
  std::iota(c.rep.begin(), c.rep.end(), Elem{0});
  return c;
}

Congruence top_con(int q) { return Congruence{q, std::vector<Elem>(static_cast<std::size_t>(q), 0)}; }

Congruence con_from_blocks(int q, std::vector<std::vector<Elem>> const& blocks) {
  UnionFind uf(q);
  for (auto const& b : blocks)
    for (auto x : b) {
      if (x >= q) throw InputError("partition element out of range");
      uf.unite(b[0], x);
    }
  return uf.con(q);
}

Congruence con_meet(Congruence const& a, Congruence const& b) {
  Congruence c{a.q, std::vector<Elem>(static_cast<std::size_t>(a.q))};
  std::map<Pair, Elem> first;
  for (int x = 0; x < a.q; ++x) {
    auto [it, fresh] = first.emplace(Pair{a.rep[x], b.rep[x]}, static_cast<Elem>(x));
    c.rep[x] = it->second;
  }
  return c;
}

Congruence con_join(Congruence const& a, Congruence const& b) {
  UnionFind uf(a.q);
  for (int x = 0; x < a.q; ++x) {
    uf.unite(static_cast<Elem>(x), a.rep[x]);
    uf.unite(static_cast<Elem>(x), b.rep[x]);
  }
  return uf.con(a.q);
}

std::string to_string(Congruence const& c) {
  std::string s;
  for (auto const& b : c.blocks()) {
    if (!s.empty()) s += "|";
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(b[i]);
    }
  }
  return s;
}

Congruence parse_partition(int q, std::string const& text) {
  std::vector<std::vector<Elem>> blocks;
  std::stringstream ss(text);
  std::string block;
  while (std::getline(ss, block, '|')) {
    std::vector<Elem> b;
    std::stringstream bs(block);
    std::string item;
    while (std::getline(bs, item, ',')) {
      if (item.empty()) continue;
      int v = 0;
      try {
        v = std::stoi(item);
      } catch (std::exception const&) {
        throw InputError("bad partition entry '" + item + "'");
      }
      if (v < 0 || v >= q) throw InputError("partition entry out of range: " + item);
      b.push_back(static_cast<Elem>(v));
    }
    if (!b.empty()) blocks.push_back(b);
  }
  return con_from_blocks(q, blocks);
}

// Each op with one argument free: value(x) = values[base + x*stride].
namespace {

template <class F>
void for_each_translation(OpTable const& op, F&& fn) {
  int q = op.q, n = op.arity;
  for (int i = 0; i < n; ++i) {
    std::size_t stride = ipow(q, n - 1 - i);
    std::size_t outer = ipow(q, i);
    std::size_t block = stride * q;
    for (std::size_t hi = 0; hi < outer; ++hi)
      for (std::size_t lo = 0; lo < stride; ++lo) fn(hi * block + lo, stride);
  }
}

}  // namespace

bool is_compatible(FiniteAlgebra const& alg, Congruence const& c) {
  for (auto const& op : alg.ops) {
    bool ok = true;
    for_each_translation(op, [&](std::size_t base, std::size_t stride) {
      if (!ok) return;
      for (int x = 0; x < alg.q; ++x)
        if (c.rep[x] != x && c.rep[op.values[base + x * stride]] !=
                                 c.rep[op.values[base + c.rep[x] * stride]])
          ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

Congruence cg(FiniteAlgebra const& alg, Congruence const& base, std::vector<Pair> const& pairs) {
  int q = alg.q;
  UnionFind uf(q);
  std::vector<Pair> work;
  auto merge = [&](Elem a, Elem b) {
    if (uf.unite(a, b)) work.emplace_back(a, b);
  };
  for (int x = 0; x < q; ++x) merge(static_cast<Elem>(x), base.rep[x]);
  for (auto [a, b] : pairs) {
    if (a >= q || b >= q) throw InputError("pair element out of range");
    merge(a, b);
  }
  // translations of a spanning set of merged edges suffice
  while (!work.empty()) {
    auto [a, b] = work.back();
    work.pop_back();
    for (auto const& op : alg.ops)
      for_each_translation(op, [&](std::size_t bs, std::size_t stride) {
        merge(op.values[bs + a * stride], op.values[bs + b * stride]);
      });
  }
  return uf.con(q);
}

Congruence cg(FiniteAlgebra const& alg, std::vector<Pair> const& pairs) {
  return cg(alg, bottom_con(alg.q), pairs);
}

std::optional<std::size_t> ConLattice::index_of(Congruence const& c) const {
  auto it = std::find(elems.begin(), elems.end(), c);
  if (it == elems.end()) return std::nullopt;
  return static_cast<std::size_t>(it - elems.begin());
}

ConLattice all_congruences(FiniteAlgebra const& alg, std::size_t budget) {
  int q = alg.q;
  std::set<Congruence> seen;
  std::vector<Congruence> list;
  auto add = [&](Congruence c) {
    if (seen.insert(c).second) {
      list.push_back(std::move(c));
      if (list.size() > budget)
        throw BudgetError("congruence lattice exceeds " + std::to_string(budget) + " elements");
    }
  };
  add(bottom_con(q));
  for (int a = 0; a < q; ++a)
    for (int b = a + 1; b < q; ++b) add(cg(alg, {{static_cast<Elem>(a), static_cast<Elem>(b)}}));
  std::size_t principal = list.size();
  for (std::size_t i = 1; i < list.size(); ++i)
    for (std::size_t j = 1; j < std::min(i, principal); ++j) add(con_join(list[i], list[j]));
  ConLattice l;
  l.elems = list;
  std::sort(l.elems.begin(), l.elems.end(), [](Congruence const& a, Congruence const& b) {
    auto ca = a.block_count(), cb = b.block_count();
    return ca != cb ? ca > cb : a.rep < b.rep;
  });
  std::map<std::vector<Elem>, std::uint32_t> idx;
  for (std::size_t i = 0; i < l.elems.size(); ++i) idx[l.elems[i].rep] = static_cast<std::uint32_t>(i);
  std::size_t n = l.elems.size();
  l.meet.assign(n, std::vector<std::uint32_t>(n));
  l.join.assign(n, std::vector<std::uint32_t>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      l.meet[i][j] = idx.at(con_meet(l.elems[i], l.elems[j]).rep);
      l.join[i][j] = idx.at(con_join(l.elems[i], l.elems[j]).rep);
    }
  l.bottom = idx.at(bottom_con(q).rep);
  l.top = idx.at(top_con(q).rep);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == l.bottom || i == l.top) continue;
    bool atom = true, coatom = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (j != l.bottom && l.elems[j].leq(l.elems[i])) atom = false;
      if (j != l.top && l.elems[i].leq(l.elems[j])) coatom = false;
    }
    if (atom) l.atoms.push_back(i);
    if (coatom) l.coatoms.push_back(i);
  }
  if (n == 2) {
    l.atoms = {l.top};
    l.coatoms = {l.bottom};
  }
  return l;
}

bool is_fsi(ConLattice const& l, int q) { return q <= 1 || l.atoms.size() == 1; }
bool is_si(ConLattice const& l, int q) { return q >= 2 && is_fsi(l, q); }

std::optional<Congruence> monolith(ConLattice const& l, int q) {
  if (!is_si(l, q)) return std::nullopt;
  return l.elems[l.atoms[0]];
}

bool is_fsi(FiniteAlgebra const& alg) { return is_fsi(all_congruences(alg), alg.q); }
bool is_si(FiniteAlgebra const& alg) { return is_si(all_congruences(alg), alg.q); }
std::optional<Congruence> monolith(FiniteAlgebra const& alg) {
  return monolith(all_congruences(alg), alg.q);
}

FiniteAlgebra quotient(FiniteAlgebra const& alg, Congruence const& c) {
  if (!is_compatible(alg, c)) throw InputError("quotient: partition is not a congruence");
  std::vector<Elem> idx(static_cast<std::size_t>(alg.q));
  std::vector<Elem> reps;
  for (int x = 0; x < alg.q; ++x)
    if (c.rep[x] == x) {
      idx[x] = static_cast<Elem>(reps.size());
      reps.push_back(static_cast<Elem>(x));
    }
  for (int x = 0; x < alg.q; ++x) idx[x] = idx[c.rep[x]];
  FiniteAlgebra out;
  out.name = alg.name + "/" + to_string(c);
  out.q = static_cast<int>(reps.size());
  out.constantive = alg.constantive;
  for (auto const& op : alg.ops) {
    Tuple lifted(static_cast<std::size_t>(op.arity));
    out.ops.push_back(make_op(op.name, out.q, op.arity, [&](std::span<Elem const> x) {
      for (std::size_t i = 0; i < x.size(); ++i) lifted[i] = reps[x[i]];
      return idx[op(lifted)];
    }));
  }
  return out;
}

// ---------------------------------------------------------------- commutator

std::vector<std::array<Elem, 4>> matrices(FiniteAlgebra const& alg, Congruence const& alpha,
                                          Congruence const& beta, std::uint64_t budget) {
  int q = alg.q;
  std::vector<std::vector<Elem>> seeds;
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) {
      if (alpha.related(a, b)) seeds.push_back({Elem(a), Elem(a), Elem(b), Elem(b)});
      if (beta.related(a, b)) seeds.push_back({Elem(a), Elem(b), Elem(a), Elem(b)});
    }
  std::vector<std::array<Elem, 4>> out;
  for (auto const& r : subpower_rows(alg.ops, q, 4, seeds, budget)) out.push_back({r[0], r[1], r[2], r[3]});
  return out;
}

bool centralizes(FiniteAlgebra const& alg, Congruence const& alpha, Congruence const& beta,
                 Congruence const& eta) {
  if (eta.is_top()) return true;
  for (auto const& m : matrices(alg, alpha, beta))
    if (eta.related(m[0], m[1]) && !eta.related(m[2], m[3])) return false;
  return true;
}

Congruence commutator(FiniteAlgebra const& alg, Congruence const& alpha, Congruence const& beta) {
  auto ms = matrices(alg, alpha, beta);
  Congruence eta = bottom_con(alg.q);
  while (true) {
    std::vector<Pair> forced;
    for (auto const& m : ms)
      if (eta.related(m[0], m[1]) && !eta.related(m[2], m[3])) forced.emplace_back(m[2], m[3]);
    if (forced.empty()) return eta;
    eta = cg(alg, eta, forced);
  }
}

Verdict centralizes_binary(FiniteAlgebra const& alg, Congruence const& alpha,
                           Congruence const& beta, Congruence const& eta,
                           std::optional<std::size_t> cap) {
  int q = alg.q;
  auto ap = alpha.pairs(), bp = beta.pairs();
  for (int x = 0; x < q; ++x) {
    ap.emplace_back(x, x);
    bp.emplace_back(x, x);
  }
  KaryClosure kc(polynomial_gens(alg), q, 2, cap.value_or(default_cap(q, 2)));
  bool violated = false;
  auto st = kc.run([&](std::size_t, std::span<Elem const> z) {
    for (auto [a, b] : ap)
      for (auto [u, v] : bp)
        if (eta.related(z[a * q + u], z[a * q + v]) && !eta.related(z[b * q + u], z[b * q + v])) {
          violated = true;
          return true;
        }
    return false;
  });
  if (violated) return Verdict::refuted;
  return st == Closure::Status::fixpoint ? Verdict::proven : Verdict::inconclusive;
}

AbsorbOutcome absorbing_commutator_malcev(FiniteAlgebra const& alg, OpTable const& d, Pair uv1, Pair uv2) {
  if (!is_malcev(d) || d.q != alg.q) throw InputError("absorbing_commutator_malcev: d is not a Mal'cev operation");
  auto [u1, v1] = uv1;
  auto [u2, v2] = uv2;
  // row layout: p(u1,u2), p(u1,v2), p(v1,u2), p(v1,v2)
  std::vector<std::vector<Elem>> seeds = {{u1, u1, v1, v1}, {u2, v2, u2, v2}};
  AbsorbOutcome out;
  std::vector<std::vector<Elem>> grid;
  try {
    grid = subpower_rows(polynomial_gens(alg), alg.q, 4, seeds);
  } catch (BudgetError const& e) {
    out.note = e.what();
    return out;
  }
  std::set<Pair> found;
  for (auto const& p : grid) {
    Elem tau = p[0];
    Elem w = d({p[3], p[2], tau});  // w(v1,v2); w(u1,v2) = p(u1,v2)
    found.emplace(d({w, p[1], tau}), tau);
  }
  out.pairs.assign(found.begin(), found.end());
  out.verdict = Verdict::proven;
  return out;
}

AbsorbOutcome absorbing_commutator(FiniteAlgebra const& alg, Pair uv1, Pair uv2,
                                   std::optional<std::size_t> cap) {
  int q = alg.q;
  auto d = find_special(polynomial_gens(alg), q, {SpecialKind::malcev}, cap);
  if (d.verdict == Verdict::proven) return absorbing_commutator_malcev(alg, d.tables[0], uv1, uv2);
  auto [u1, v1] = uv1;
  auto [u2, v2] = uv2;
  std::set<Pair> found;
  std::size_t full = static_cast<std::size_t>(q) * q;
  KaryClosure kc(polynomial_gens(alg), q, 2, cap.value_or(default_cap(q, 2)));
  auto st = kc.run([&](std::size_t, std::span<Elem const> z) {
    Elem tau = z[u1 * q + u2];
    for (int x = 0; x < q; ++x)
      if (z[x * q + u2] != tau || z[u1 * q + x] != tau) return false;
    found.emplace(z[v1 * q + v2], tau);
    // the set only grows, so once it is everything it is final
    return found.size() == full;
  });
  AbsorbOutcome out;
  out.pairs.assign(found.begin(), found.end());
  if (st == Closure::Status::capped) {
    out.verdict = Verdict::inconclusive;
    out.note = "binary polynomial enumeration reached its cap";
  } else {
    out.verdict = Verdict::proven;
  }
  return out;
}

TermResult find_weak_difference(FiniteAlgebra const& alg, Mode mode, std::optional<std::size_t> cap) {
  auto lat = all_congruences(alg);
  struct Level {
    Congruence theta, comm;
  };
  std::vector<Level> levels;
  for (auto const& th : lat.elems) {
    if (th.is_bottom()) continue;
    try {
      levels.push_back({th, commutator(alg, th, th)});
    } catch (BudgetError const& e) {
      TermResult r;
      r.verdict = Verdict::inconclusive;
      r.note = std::string("commutator of ") + to_string(th) + ": " + e.what();
      return r;
    }
  }
  int q = alg.q;
  auto pred = [&](OpTable const& d) {
    for (auto const& lv : levels)
      for (auto [a, b] : lv.theta.pairs()) {
        Elem abb = d.values[(a * q + b) * q + b];
        Elem bba = d.values[(b * q + b) * q + a];
        if (!lv.comm.related(abb, a) || !lv.comm.related(a, bba)) return false;
      }
    return true;
  };
  return find_ternary(generators(alg, mode), q, pred, cap);
}

MalcevVerdict classify_malcev_eqadd(FiniteAlgebra const& alg, std::optional<std::size_t> cap) {
  if (alg.q < 2) throw InputError("classify_malcev_eqadd needs at least two elements");
  auto m = find_special(polynomial_gens(alg), alg.q, {SpecialKind::malcev}, cap);
  if (m.verdict != Verdict::proven)
    throw InputError("no Mal'cev polynomial found (" + to_string(m.verdict) + ")");
  MalcevVerdict v;
  v.malcev = m.tables[0];
  v.malcev_term = m.terms[0];
  auto lat = all_congruences(alg);
  v.si = is_si(lat, alg.q);
  v.monolith = monolith(lat, alg.q);
  if (v.monolith) {
    v.mu_commutator = commutator(alg, *v.monolith, *v.monolith);
    v.additive = !v.mu_commutator->is_bottom();
  }
  return v;
}

}  // namespace eqdom
