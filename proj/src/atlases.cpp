#include "eqdom/atlases.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace eqdom {

namespace {

int distinct3(std::span<Elem const> x) {
  return 1 + (x[1] != x[0]) + (x[2] != x[0] && x[2] != x[1]);
}

Elem majority3(std::span<Elem const> x) { return x[0] == x[1] || x[0] == x[2] ? x[0] : x[1]; }

Elem minority3(std::span<Elem const> x) {
  if (x[0] == x[1]) return x[2];
  if (x[0] == x[2]) return x[1];
  return x[0];
}

}  // namespace

// ---------------------------------------------------------------- {0,1}

OpTable bool_and() {
  return make_op("and", 2, 2, [](auto x) { return static_cast<Elem>(x[0] & x[1]); });
}
OpTable bool_or() {
  return make_op("or", 2, 2, [](auto x) { return static_cast<Elem>(x[0] | x[1]); });
}
OpTable bool_not() {
  return make_op("not", 2, 1, [](auto x) { return static_cast<Elem>(1 - x[0]); });
}
OpTable bool_h() { return make_op("h", 2, 3, majority3); }
OpTable bool_g() {
  return make_op("g", 2, 3, [](auto x) { return static_cast<Elem>((x[0] + x[1] + x[2]) % 2); });
}
OpTable bool_p() {
  return make_op("p", 2, 3, [](auto x) {
    int a = x[0], b = x[1], c = x[2];
    return static_cast<Elem>((a & c) | (a & !b & !c) | (!a & !b & c));
  });
}
OpTable bool_t() {
  return make_op("t", 2, 3, [](auto x) { return static_cast<Elem>(x[0] | (x[1] & x[2])); });
}
OpTable bool_t_dual() {
  return make_op("td", 2, 3, [](auto x) { return static_cast<Elem>(x[0] & (x[1] | x[2])); });
}
OpTable bool_xor() {
  return make_op("xor", 2, 2, [](auto x) { return static_cast<Elem>(x[0] ^ x[1]); });
}

// ---------------------------------------------------------------- {0,1,2}

OpTable zeta3() {
  OpTable z = cyclic_shift(3);
  z.name = "zeta";
  return z;
}
OpTable sigma3() {
  return make_op("sigma", 3, 1, [](auto x) { return static_cast<Elem>(x[0] == 2 ? 2 : 1 - x[0]); });
}

namespace {

OpTable second_on(std::string name, std::vector<Tuple> const& hits) {
  return make_op(std::move(name), 3, 3, [&](std::span<Elem const> x) {
    for (auto const& h : hits)
      if (std::equal(h.begin(), h.end(), x.begin())) return x[1];
    return x[0];
  });
}

}  // namespace

OpTable sd_f_pi2() { return second_on("fpi2", {{0, 1, 1}, {1, 2, 2}, {2, 0, 0}}); }
OpTable sd_f_pi2_star() { return second_on("fpi2s", {{1, 0, 0}, {0, 2, 2}, {2, 1, 1}}); }
OpTable sd_m() {
  return make_op("m", 3, 3, [](auto x) { return distinct3(x) <= 2 ? majority3(x) : x[0]; });
}
OpTable sd_plus0() {
  return make_op("plus0", 3, 3, [](auto x) {
    return distinct3(x) <= 2 ? minority3(x) : static_cast<Elem>((x[0] + 1) % 3);
  });
}
OpTable sd_a() {
  return make_op("a", 3, 2, [](auto x) { return static_cast<Elem>((2 * x[0] + 2 * x[1] + 1) % 3); });
}
OpTable sd_r() {
  return make_op("r", 3, 2, [](auto x) {
    int a = x[0], b = x[1];
    return static_cast<Elem>(2 * (a * a + a + a * b + b + b * b) % 3);
  });
}
OpTable sd_l() {
  return make_op("l", 3, 2, [](auto x) {
    int a = x[0], b = x[1];
    return static_cast<Elem>((a * a + 2 * a + a * b + 2 * b + b * b) % 3);
  });
}
OpTable sd_ps() {
  return make_op("ps", 3, 3, [](auto x) { return distinct3(x) <= 2 ? x[0] : x[1]; });
}

// ---------------------------------------------------------------- catalogs

namespace {

std::vector<OpTable> with_constants(std::vector<OpTable> gens, int q) {
  FiniteAlgebra a{"", q, std::move(gens), false};
  return polynomial_gens(a);
}

}  // namespace

std::vector<NamedGeneratorSet> boolean_catalog() {
  std::vector<NamedGeneratorSet> base = {
      {"I2", 2, {}, "projections only"},
      {"N2", 2, {bool_not()}, "negation"},
      {"E2", 2, {bool_and()}, "meet"},
      {"V2", 2, {bool_or()}, "join"},
      {"L2", 2, {bool_g()}, "minority x+y+z"},
      {"D2", 2, {bool_h()}, "majority"},
      {"S00", 2, {bool_t()}, "x or (y and z)"},
      {"S10", 2, {bool_t_dual()}, "x and (y or z)"},
      {"M2", 2, {bool_and(), bool_or()}, "meet and join"},
      {"P2", 2, {bool_p()}, "Pixley term"},
      {"BA", 2, {bool_and(), bool_or(), bool_not()}, "Boolean algebra"},
  };
  std::vector<NamedGeneratorSet> out = base;
  for (auto const& s : base)
    out.push_back({s.id + "c", 2, with_constants(s.gens, 2), s.provenance + ", with constants"});
  return out;
}

std::vector<NamedGeneratorSet> selfdual_catalog() {
  return {
      {"zeta", 3, {zeta3()}, "cyclic shift"},
      {"sigma", 3, {sigma3()}, "transposition of 0 and 1 (not self-dual)"},
      {"fpi2", 3, {sd_f_pi2()}, "second projection on the shifts of (0,1,1)"},
      {"fpi2s", 3, {sd_f_pi2_star()}, "second projection on the shifts of (1,0,0)"},
      {"m", 3, {sd_m()}, "majority, first argument when all differ"},
      {"plus0", 3, {sd_plus0()}, "minority, x+1 when all differ"},
      {"a", 3, {sd_a()}, "2x+2y+1"},
      {"r", 3, {sd_r()}, "2(x^2+x+xy+y+y^2)"},
      {"l", 3, {sd_l()}, "x^2+2x+xy+2y+y^2"},
      {"ps", 3, {sd_ps()}, "first argument, second when all differ"},
      {"r-ps", 3, {sd_r(), sd_ps()}, "r and ps"},
      {"l-ps", 3, {sd_l(), sd_ps()}, "l and ps"},
  };
}

NamedGeneratorSet const& catalog_entry(std::string const& id) {
  static std::vector<NamedGeneratorSet> const all = [] {
    auto b = boolean_catalog();
    auto s = selfdual_catalog();
    b.insert(b.end(), s.begin(), s.end());
    return b;
  }();
  for (auto const& e : all)
    if (e.id == id) return e;
  throw InputError("unknown catalog entry '" + id + "'");
}

FiniteAlgebra as_algebra(NamedGeneratorSet const& s) {
  FiniteAlgebra a{s.id, s.q, s.gens, false};
  return a;
}

// ---------------------------------------------------------------- classifiers

std::string to_string(Tct t) {
  switch (t) {
    case Tct::tp1: return "tp1";
    case Tct::tp2: return "tp2";
    case Tct::tp3: return "tp3";
    case Tct::tp4: return "tp4";
    case Tct::tp5: return "tp5";
    case Tct::unknown: return "unknown";
  }
  return "?";
}

namespace {

bool contains(std::vector<OpTable> const& gens, int q, OpTable const& target,
              std::optional<std::size_t> cap = {}) {
  auto r = clone_contains(gens, q, target, cap);
  if (r.verdict == Verdict::inconclusive) throw BudgetError("containment of " + target.name + ": " + r.note);
  return r.verdict == Verdict::proven;
}

void require_q(std::vector<OpTable> const& gens, int q, char const* who) {
  for (auto const& g : gens)
    if (g.q != q) throw InputError(std::string(who) + ": generator '" + g.name + "' is not on " +
                                   std::to_string(q) + " elements");
}

}  // namespace

Tct boolean_tct(std::vector<OpTable> const& gens) {
  require_q(gens, 2, "boolean_tct");
  auto p = with_constants(gens, 2);
  bool meet = contains(p, 2, bool_and());
  bool join = contains(p, 2, bool_or());
  if (meet && join) return contains(p, 2, bool_not()) ? Tct::tp3 : Tct::tp4;
  if (meet || join) return Tct::tp5;
  if (contains(p, 2, bool_xor())) return Tct::tp2;
  return Tct::tp1;
}

BooleanClass classify_boolean(std::vector<OpTable> const& gens) {
  require_q(gens, 2, "classify_boolean");
  BooleanClass c;
  for (auto const& target : {bool_h(), bool_t(), bool_t_dual()})
    if (contains(gens, 2, target)) {
      c.additive = true;
      c.route = target.name;
      break;
    }
  if (!c.additive) c.route = "none of h, t, td";
  c.tct = boolean_tct(gens);
  return c;
}

bool is_eminimal(FiniteAlgebra const& alg, std::optional<std::size_t> cap) {
  if (alg.q < 2) return false;
  auto e = enumerate_kary(polynomial_gens(alg), alg.q, 1, cap);
  if (e.verdict != Verdict::proven) throw BudgetError("unary polynomials: " + e.note);
  for (auto const& m : e.set.members) {
    bool idem = true;
    for (Elem x : m.values) idem = idem && m.values[x] == x;
    if (!idem) continue;
    bool ident = true, constant = true;
    for (int x = 0; x < alg.q; ++x) {
      ident = ident && m.values[x] == x;
      constant = constant && m.values[x] == m.values[0];
    }
    if (!ident && !constant) return false;
  }
  return true;
}

EminimalClass classify_eminimal(FiniteAlgebra const& alg, std::optional<std::size_t> cap) {
  if (!is_eminimal(alg, cap)) throw InputError("algebra is not E-minimal");
  EminimalClass c;
  if (alg.q != 2) {
    c.additive = Verdict::refuted;
    c.note = "congruence distributivity forces two elements";
    return c;
  }
  auto j = find_special(alg.ops, 2, {SpecialKind::jonsson_chain}, cap);
  c.additive = j.verdict;
  c.note = j.note;
  c.tct = boolean_tct(alg.ops);
  return c;
}

SelfdualClass classify_selfdual(std::vector<OpTable> const& gens, std::optional<std::size_t> cap) {
  require_q(gens, 3, "classify_selfdual");
  OpTable z = zeta3();
  for (auto const& g : gens)
    if (!commutes(g, z)) throw InputError("generator '" + g.name + "' does not commute with the cyclic shift");
  SelfdualClass c;
  bool open = false;
  for (auto const& target : {sd_f_pi2(), sd_f_pi2_star(), sd_m()}) {
    auto r = clone_contains(gens, 3, target, cap);
    if (r.verdict == Verdict::proven) {
      c.additive = Verdict::proven;
      c.route = target.name;
      return c;
    }
    open = open || r.verdict == Verdict::inconclusive;
  }
  c.additive = open ? Verdict::inconclusive : Verdict::refuted;
  c.route = "none of fpi2, fpi2s, m";
  return c;
}

// ---------------------------------------------------------------- Mal'cev corpus

FiniteAlgebra ring_zn(int n) {
  FiniteAlgebra a;
  a.name = (n == 2 || n == 3 || n == 5 || n == 7) ? "F" + std::to_string(n) : "Z" + std::to_string(n) + "-ring";
  a.q = n;
  a.ops = {make_op("+", n, 2, [n](auto x) { return static_cast<Elem>((x[0] + x[1]) % n); }),
           make_op("-", n, 1, [n](auto x) { return static_cast<Elem>((n - x[0]) % n); }),
           make_op("*", n, 2, [n](auto x) { return static_cast<Elem>((x[0] * x[1]) % n); })};
  return a;
}

FiniteAlgebra group_zn(int n) {
  FiniteAlgebra a;
  a.name = "Z" + std::to_string(n) + "-group";
  a.q = n;
  a.ops = {make_op("+", n, 2, [n](auto x) { return static_cast<Elem>((x[0] + x[1]) % n); }),
           make_op("-", n, 1, [n](auto x) { return static_cast<Elem>((n - x[0]) % n); }),
           constant_op(n, 0)};
  a.ops[2].name = "c0";
  return a;
}

FiniteAlgebra group_klein() {
  FiniteAlgebra a;
  a.name = "Z2xZ2-group";
  a.q = 4;
  a.ops = {make_op("+", 4, 2, [](auto x) { return static_cast<Elem>(x[0] ^ x[1]); }),
           make_op("-", 4, 1, [](auto x) { return x[0]; }), constant_op(4, 0)};
  a.ops[2].name = "c0";
  return a;
}

FiniteAlgebra group_s3() {
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> p{0, 1, 2};
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  auto index = [&](std::array<int, 3> const& x) {
    return static_cast<Elem>(std::find(perms.begin(), perms.end(), x) - perms.begin());
  };
  FiniteAlgebra a;
  a.name = "S3-group";
  a.q = 6;
  a.ops = {make_op("+", 6, 2,
                   [&](auto x) {
                     std::array<int, 3> r{};
                     for (int i = 0; i < 3; ++i) r[i] = perms[x[0]][perms[x[1]][i]];
                     return index(r);
                   }),
           make_op("-", 6, 1,
                   [&](auto x) {
                     std::array<int, 3> r{};
                     for (int i = 0; i < 3; ++i) r[perms[x[0]][i]] = i;
                     return index(r);
                   }),
           constant_op(6, 0)};
  a.ops[2].name = "c0";
  return a;
}

std::vector<CorpusEntry> malcev_corpus() {
  return {{ring_zn(2), true},   {ring_zn(3), true},   {ring_zn(4), false},
          {group_zn(3), false}, {group_zn(4), false}, {group_klein(), false},
          {group_s3(), false},  {family_zpl(2, 3, 2), true}};
}

// ---------------------------------------------------------------- families

namespace {

std::string fresh_name(FiniteAlgebra const& alg, std::string name) {
  while (alg.find(name)) name += "'";
  return name;
}

bool delta_tuple(std::span<Elem const> x) { return x[0] == x[1] || x[2] == x[3]; }

void table_budget(int q, int arity, char const* who) {
  if (static_cast<double>(ipow(q, 1)) > 255 || std::pow(static_cast<double>(q), arity) > (1 << 24))
    throw BudgetError(std::string(who) + ": table of arity " + std::to_string(arity) + " on " +
                      std::to_string(q) + " elements exceeds the budget");
}

}  // namespace

FiniteAlgebra lemma311_extend(FiniteAlgebra const& alg, Elem a, Elem b) {
  validate(alg);
  int q = alg.q;
  if (a == b || a >= q || b >= q) throw InputError("lemma311_extend: need distinct elements a, b");
  table_budget(q, 4, "lemma311_extend");
  FiniteAlgebra ext = alg;
  ext.name = alg.name + "+f";
  ext.ops.push_back(make_op(fresh_name(alg, "f"), q, 4, [=](auto x) { return delta_tuple(x) ? a : b; }));
  OpTable c = constant_op(q, a);
  c.name = fresh_name(ext, "c" + std::to_string(a));
  ext.ops.push_back(std::move(c));

  auto lat = all_congruences(ext);
  auto mu = monolith(lat, q);
  if (!is_si(lat, q) || !mu || !(*mu == cg(ext, {{a, b}})))
    throw InternalError("lemma311_extend: extension is not SI with monolith Cg(a,b)");
  if (!indicator_generator(ext.ops, q)) throw InternalError("lemma311_extend: indicator lost");
  return ext;
}

FiniteAlgebra family_zpl(int p, int l, int i) {
  if (p < 2) throw InputError("family_zpl: p must be prime");
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) throw InputError("family_zpl: p must be prime");
  if (l < 3 || i < 2) throw InputError("family_zpl: need l >= 3 and i >= 2");
  double qd = std::pow(static_cast<double>(p), l);
  if (qd > 255) throw BudgetError("family_zpl: p^l exceeds 255 elements");
  int q = static_cast<int>(qd);
  table_budget(q, std::max(4, i), "family_zpl");
  int top = q / p;              // p^(l-1)
  int low = top / p;            // p^(l-2)
  FiniteAlgebra a;
  a.name = "zpl-" + std::to_string(p) + "-" + std::to_string(l) + "-" + std::to_string(i);
  a.q = q;
  a.ops = {make_op("+", q, 2, [q](auto x) { return static_cast<Elem>((x[0] + x[1]) % q); }),
           make_op("-", q, 1, [q](auto x) { return static_cast<Elem>((q - x[0]) % q); }),
           constant_op(q, 0),
           make_op("f", q, 4, [top](auto x) { return static_cast<Elem>(delta_tuple(x) ? 0 : top); }),
           make_op("h", q, i, [q, low](auto x) {
             long long v = low;
             for (Elem e : x) v = v * e % q;
             return static_cast<Elem>(v);
           })};
  a.ops[2].name = "c0";
  return a;
}

namespace {

OpTable f82() {
  return make_op("f", 3, 3, [](std::span<Elem const> x) {
    static Tuple const hits[] = {{0, 2, 0}, {0, 1, 1}, {1, 2, 2}};
    for (auto const& h : hits)
      if (std::equal(h.begin(), h.end(), x.begin())) return Elem{2};
    return x[0];
  });
}

}  // namespace

// the four equations shared by f_pi2 and the 3-element example
EquationSystem four_equation_system(OpTable const& f) {
  EquationSystem s{4, f.q, {}};
  s.eqs.push_back(var_equation(f, 4, {0, 1, 2}, {0, 1, 3}));
  s.eqs.push_back(var_equation(f, 4, {1, 0, 2}, {1, 0, 3}));
  s.eqs.push_back(var_equation(f, 4, {2, 3, 0}, {2, 3, 1}));
  s.eqs.push_back(var_equation(f, 4, {3, 2, 0}, {3, 2, 1}));
  return s;
}

Prop82 family_prop82() {
  Prop82 r{f82(), {}, {}};
  r.alg = FiniteAlgebra{"prop82", 3, {r.f}, false};
  r.alg = constant_expansion(r.alg);
  r.system = four_equation_system(r.f);
  return r;
}

EquationSystem m_system(OpTable const& m) {
  auto s = four_equation_system(m);
  s.eqs.resize(2);
  return s;
}

EquationSystem h_system(OpTable const& h) {
  return {4, h.q, {var_equation(h, 4, {2, 3, 0}, {2, 3, 1})}};
}

EquationSystem tau_system(OpTable const& t) {
  return {4, t.q, {var_equation(t, 4, {2, 3, 0}, {2, 3, 1}), var_equation(t, 4, {3, 2, 0}, {3, 2, 1})}};
}

Relation prop82_rho(int k) {
  if (k < 1) throw InputError("rho: arity must be positive");
  table_budget(3, k, "rho");
  return relation_where(3, k, [k](std::span<Elem const> x) {
    bool binary = std::all_of(x.begin(), x.end(), [](Elem e) { return e <= 1; });
    int w = static_cast<int>(std::count(x.begin(), x.end(), Elem{1}));
    bool e1 = binary && w == 1 && x[0] == 1;
    bool in_b = binary && w >= 3 && w <= k - 1;
    return !e1 && !in_b;
  });
}

OpTable prop82_fn(int n) {
  if (n < 1) throw InputError("f_n: arity must be positive");
  table_budget(3, n, "f_n");
  return make_op("f" + std::to_string(n), 3, n, [](std::span<Elem const> x) {
    bool binary = std::all_of(x.begin(), x.end(), [](Elem e) { return e <= 1; });
    auto w = std::count(x.begin(), x.end(), Elem{1});
    if (binary && w == static_cast<long>(x.size())) return Elem{1};
    if (binary && w == 1) return Elem{0};
    return Elem{2};
  });
}

namespace {

Elem one_and_twos(std::span<Elem const> x) {
  auto ones = std::count(x.begin(), x.end(), Elem{1});
  auto twos = std::count(x.begin(), x.end(), Elem{2});
  auto n = static_cast<long>(x.size());
  return static_cast<Elem>((ones == 1 && twos == n - 1) || (twos == 1 && ones == n - 1));
}

}  // namespace

Thm83 family_thm83(int n, std::vector<int> const& indices) {
  if (n < 3) throw InputError("family_thm83: need n >= 3");
  std::set<int> idx(indices.begin(), indices.end());
  for (int i : idx)
    if (i < 2) throw InputError("family_thm83: indices must be at least 2");
  int q = n + 1;
  table_budget(q, 4, "family_thm83");
  for (int i : idx) table_budget(q, i, "family_thm83");
  Thm83 r;
  r.a.name = "A" + std::to_string(n);
  r.a.q = q;
  r.a.ops.push_back(make_op("f", q, 4, [n](auto x) { return static_cast<Elem>(delta_tuple(x) ? 0 : n); }));
  r.z.name = "Z" + std::to_string(n) + "-0";
  r.z.q = n;
  r.z.ops.push_back(constant_op(n, 0, 4));
  r.z.ops.back().name = "f";
  for (int i : idx) {
    r.a.ops.push_back(make_op("h" + std::to_string(i), q, i, one_and_twos));
    r.z.ops.push_back(make_op("h" + std::to_string(i), n, i, one_and_twos));
  }
  for (int x = 0; x < q; ++x) r.phi.push_back(static_cast<Elem>(x == n ? 0 : x));
  return r;
}

Verdict phi_member(std::vector<OpTable> const& gens_a, OpTable const& g, std::vector<Elem> const& subset,
                   std::optional<std::size_t> cap) {
  std::vector<Elem> s = subset;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  Restriction r;
  try {
    r = op_restrict(g, s);
  } catch (InvarianceError const&) {
    return Verdict::refuted;
  }
  auto c = clone_contains(gens_a, static_cast<int>(s.size()), r.op, cap);
  return c.verdict;
}

EquationSystem phi_delta_system(std::vector<OpTable> const& gens_a, int qb, Elem a, Elem b) {
  if (gens_a.empty()) throw InputError("phi_delta_system: no generators");
  int qa = gens_a[0].q;
  if (qb <= qa || a >= qa || b < qa || b >= qb) throw InputError("phi_delta_system: need a in A, b in B \\ A");
  FiniteAlgebra alg{"A", qa, gens_a, false};
  auto add = is_equationally_additive(alg, Mode::term);
  if (add.verdict != Verdict::proven)
    throw InputError("phi_delta_system: delta is not algebraic over the given clone");
  auto in_a = [qa](std::span<Elem const> x) {
    return std::all_of(x.begin(), x.end(), [qa](Elem e) { return e < qa; });
  };
  // f + u: f on A^n, u elsewhere
  auto split = [&](OpTable const& f, std::function<Elem(std::span<Elem const>)> const& u, std::string name) {
    return make_op(std::move(name), qb, f.arity, [&](std::span<Elem const> x) { return in_a(x) ? f(x) : u(x); });
  };
  OpTable pi1 = projection(qa, 4, 0);
  EquationSystem s{4, qb, {}};
  s.eqs.push_back({split(pi1, [&](auto x) { return delta_tuple(x) ? b : a; }, "pi1+u"),
                   split(pi1, [&](auto) { return b; }, "pi1+cb"), "(x1 + u)", "(x1 + c" + std::to_string(b) + ")"});
  for (auto const& e : add.system.eqs)
    s.eqs.push_back({split(e.left, [&](auto) { return b; }, "l"), split(e.right, [&](auto) { return b; }, "r"),
                     "(" + e.left_term + " + c" + std::to_string(b) + ")",
                     "(" + e.right_term + " + c" + std::to_string(b) + ")"});
  if (!(solve_system(s) == delta4(qb))) throw InternalError("phi_delta_system: lifted system misses delta");
  std::vector<Elem> sub(static_cast<std::size_t>(qa));
  for (int i = 0; i < qa; ++i) sub[i] = static_cast<Elem>(i);
  for (auto const& e : s.eqs)
    for (auto const* side : {&e.left, &e.right})
      if (phi_member(gens_a, *side, sub) != Verdict::proven)
        throw InternalError("phi_delta_system: a side is not in the lifted clone");
  return s;
}

// ---------------------------------------------------------------- Alg = Inv on {0,1}

GaloisCheck check_alg_inv(std::vector<OpTable> const& gens, int m) {
  require_q(gens, 2, "check_alg_inv");
  if (m < 1 || m > 3) throw InputError("check_alg_inv: arity must be 1..3");
  GaloisCheck out;
  out.arity = m;
  int n = 1 << m;  // points of {0,1}^m
  auto terms = enumerate_kary(gens, 2, m);
  if (terms.verdict != Verdict::proven) throw BudgetError("check_alg_inv: " + terms.note);
  // algebraic sets as bit masks over the points
  std::set<std::uint32_t> alg;
  std::uint32_t full = (1u << n) - 1;
  alg.insert(full);
  auto const& ms = terms.set.members;
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      std::uint32_t e = 0;
      for (int x = 0; x < n; ++x)
        if (ms[i].values[x] == ms[j].values[x]) e |= 1u << x;
      alg.insert(e);
    }
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::uint32_t> cur(alg.begin(), alg.end());
    for (std::size_t i = 0; i < cur.size(); ++i)
      for (std::size_t j = i + 1; j < cur.size(); ++j) grew = alg.insert(cur[i] & cur[j]).second || grew;
  }
  out.algebraic_sets = alg.size();

  std::vector<OpTable> star;
  for (int k = 1; k <= 3; ++k) {
    auto c = centralizer_kary(gens, 2, k);
    star.insert(star.end(), c.begin(), c.end());
  }
  auto fixed = common_fixed_points(gens, 2);
  for (std::uint32_t mask = 0; mask <= full; ++mask) {
    std::vector<Tuple> ts;
    for (int x = 0; x < n; ++x)
      if (mask >> x & 1u) ts.push_back(unrank(static_cast<std::uint64_t>(x), 2, m));
    Relation rel = make_relation(2, m, ts);
    bool inv = true;
    for (Elem c : fixed) inv = inv && rel.contains(Tuple(static_cast<std::size_t>(m), c));
    for (std::size_t i = 0; i < star.size() && inv; ++i) inv = op_preserves(star[i], rel);
    if (inv != (alg.count(mask) > 0)) {
      out.equal = false;
      out.mismatch = rel;
      return out;
    }
  }
  return out;
}

}  // namespace eqdom
