#include "eqdom/core.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace eqdom {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > SIZE_MAX / base) throw BudgetError("integer overflow in power");
    r *= base;
  }
  return r;
}

std::uint64_t rank(std::span<Elem const> t, int q) {
  std::uint64_t r = 0;
  for (Elem x : t) r = r * static_cast<std::uint64_t>(q) + x;
  return r;
}

void unrank_into(std::uint64_t r, int q, std::span<Elem> out) {
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = static_cast<Elem>(r % static_cast<std::uint64_t>(q));
    r /= static_cast<std::uint64_t>(q);
  }
}

Tuple unrank(std::uint64_t r, int q, int n) {
  Tuple t(static_cast<std::size_t>(n));
  unrank_into(r, q, t);
  return t;
}

std::string tuple_string(std::span<Elem const> t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(t[i]);
  }
  return s + ")";
}

// ---------------------------------------------------------------- OpTable

Elem OpTable::operator()(std::span<Elem const> args) const {
  return values[rank(args, q)];
}

Elem OpTable::operator()(std::initializer_list<Elem> args) const {
  return values[rank(std::span<Elem const>(args.begin(), args.size()), q)];
}

void validate(OpTable const& op) {
  if (op.arity < 1) throw InputError("operation '" + op.name + "' has arity < 1");
  if (op.q < 1 || op.q > 255) throw InputError("operation '" + op.name + "' has bad universe size");
  if (op.values.size() != ipow(op.q, op.arity))
    throw InputError("operation '" + op.name + "' table length " +
                     std::to_string(op.values.size()) + " != " +
                     std::to_string(ipow(op.q, op.arity)));
  for (Elem v : op.values)
    if (v >= op.q) throw InputError("operation '" + op.name + "' has entry out of range");
}

OpTable make_op(std::string name, int q, int arity,
                std::function<Elem(std::span<Elem const>)> const& rule) {
  OpTable op{std::move(name), arity, q, {}};
  std::size_t n = ipow(q, arity);
  op.values.resize(n);
  Tuple t(static_cast<std::size_t>(arity), 0);
  for (std::size_t r = 0; r < n; ++r) {
    op.values[r] = rule(t);
    for (std::size_t i = t.size(); i-- > 0;) {
      if (++t[i] < q) break;
      t[i] = 0;
    }
  }
  return op;
}

OpTable projection(int q, int arity, int i) {
  return make_op("pi" + std::to_string(i + 1) + "_" + std::to_string(arity), q, arity,
                 [i](std::span<Elem const> x) { return x[static_cast<std::size_t>(i)]; });
}

OpTable constant_op(int q, Elem a, int arity) {
  OpTable op{"c" + std::to_string(a), arity, q, {}};
  op.values.assign(ipow(q, arity), a);
  return op;
}

Elem op_apply(OpTable const& op, std::span<Elem const> args) {
  if (static_cast<int>(args.size()) != op.arity)
    throw InputError("op_apply: expected " + std::to_string(op.arity) + " arguments, got " +
                     std::to_string(args.size()));
  for (Elem a : args)
    if (a >= op.q) throw InputError("op_apply: argument out of range");
  return op(args);
}

OpTable op_compose(OpTable const& outer, std::vector<OpTable> const& inners) {
  if (static_cast<int>(inners.size()) != outer.arity)
    throw InputError("op_compose: outer arity does not match number of inner operations");
  if (inners.empty()) throw InputError("op_compose: no inner operations");
  int k = inners[0].arity;
  for (auto const& in : inners)
    if (in.arity != k || in.q != outer.q)
      throw InputError("op_compose: inner operations disagree in arity or universe");
  OpTable r{outer.name + "(...)", k, outer.q, {}};
  std::size_t n = ipow(outer.q, k);
  r.values.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    std::size_t idx = 0;
    for (auto const& in : inners) idx = idx * outer.q + in.values[x];
    r.values[x] = outer.values[idx];
  }
  return r;
}

bool depends_on(OpTable const& op, int position) {
  std::size_t stride = ipow(op.q, op.arity - 1 - position);
  std::size_t block = stride * op.q;
  for (std::size_t base = 0; base < op.values.size(); base += block)
    for (std::size_t off = 0; off < stride; ++off) {
      Elem v = op.values[base + off];
      for (int d = 1; d < op.q; ++d)
        if (op.values[base + off + d * stride] != v) return true;
    }
  return false;
}

int essential_arity(OpTable const& op) {
  int c = 0;
  for (int i = 0; i < op.arity; ++i) c += depends_on(op, i) ? 1 : 0;
  return c;
}

bool is_idempotent(OpTable const& op) {
  Tuple t(static_cast<std::size_t>(op.arity));
  for (int a = 0; a < op.q; ++a) {
    std::fill(t.begin(), t.end(), static_cast<Elem>(a));
    if (op(t) != a) return false;
  }
  return true;
}

bool is_projection(OpTable const& op) {
  for (int i = 0; i < op.arity; ++i)
    if (op.values == projection(op.q, op.arity, i).values) return true;
  return false;
}

bool is_permutation(OpTable const& unary) {
  std::vector<bool> seen(static_cast<std::size_t>(unary.q), false);
  for (Elem v : unary.values) {
    if (seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

// ---------------------------------------------------------------- Relation

bool Relation::contains(std::uint64_t r) const {
  return std::binary_search(ranks.begin(), ranks.end(), r);
}

bool Relation::contains(std::span<Elem const> t) const { return contains(rank(t, q)); }

std::vector<Tuple> Relation::tuples() const {
  std::vector<Tuple> out;
  out.reserve(ranks.size());
  for (auto r : ranks) out.push_back(unrank(r, q, arity));
  return out;
}

Relation relation_from_ranks(int q, int arity, std::vector<std::uint64_t> ranks) {
  std::sort(ranks.begin(), ranks.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
  std::uint64_t lim = ipow(q, arity);
  for (auto r : ranks)
    if (r >= lim) throw InputError("relation tuple rank out of range");
  return Relation{arity, q, std::move(ranks)};
}

Relation make_relation(int q, int arity, std::vector<Tuple> const& tuples) {
  std::vector<std::uint64_t> rs;
  rs.reserve(tuples.size());
  for (auto const& t : tuples) {
    if (static_cast<int>(t.size()) != arity) throw InputError("relation tuple has wrong length");
    for (Elem x : t)
      if (x >= q) throw InputError("relation entry out of range");
    rs.push_back(rank(t, q));
  }
  return relation_from_ranks(q, arity, std::move(rs));
}

Relation relation_where(int q, int arity,
                        std::function<bool(std::span<Elem const>)> const& pred) {
  Relation r{arity, q, {}};
  std::size_t n = ipow(q, arity);
  Tuple t(static_cast<std::size_t>(arity));
  for (std::size_t i = 0; i < n; ++i) {
    unrank_into(i, q, t);
    if (pred(t)) r.ranks.push_back(i);
  }
  return r;
}

Relation full_relation(int q, int arity) {
  Relation r{arity, q, {}};
  std::size_t n = ipow(q, arity);
  r.ranks.resize(n);
  std::iota(r.ranks.begin(), r.ranks.end(), 0);
  return r;
}

Relation complement(Relation const& rel) {
  Relation r{rel.arity, rel.q, {}};
  std::size_t n = ipow(rel.q, rel.arity);
  std::size_t j = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (j < rel.ranks.size() && rel.ranks[j] == i) {
      ++j;
      continue;
    }
    r.ranks.push_back(i);
  }
  return r;
}

Relation relation_union(Relation const& a, Relation const& b) {
  if (a.arity != b.arity || a.q != b.q) throw InputError("union of incompatible relations");
  Relation r{a.arity, a.q, {}};
  std::set_union(a.ranks.begin(), a.ranks.end(), b.ranks.begin(), b.ranks.end(),
                 std::back_inserter(r.ranks));
  return r;
}

Relation delta4(int q) {
  return relation_where(q, 4, [](std::span<Elem const> x) { return x[0] == x[1] || x[2] == x[3]; });
}

Relation delta3(int q) {
  return relation_where(q, 3, [](std::span<Elem const> x) { return x[0] == x[1] || x[1] == x[2]; });
}

// ---------------------------------------------------------------- preservation

namespace {

// Saturating product/sum for cost estimates.
double sat_mul(double a, double b) { return std::min(a * b, 1e300); }

// Selections of rows of rel (one per argument) whose image is outside rel.
// Enumerates all |rel|^n selections.
std::optional<std::vector<Tuple>> direct_search(OpTable const& op, Relation const& rel) {
  int n = op.arity;
  int m = rel.arity;
  auto tuples = rel.tuples();
  if (tuples.empty()) return std::nullopt;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  // partial[d][c] = rank of (t_idx0[c],...,t_idx{d-1}[c])
  std::vector<std::vector<std::uint64_t>> partial(static_cast<std::size_t>(n) + 1,
                                                  std::vector<std::uint64_t>(m, 0));
  Tuple out(static_cast<std::size_t>(m));
  auto refresh = [&](int from) {
    for (int d = from; d < n; ++d)
      for (int c = 0; c < m; ++c)
        partial[d + 1][c] = partial[d][c] * op.q + tuples[idx[d]][c];
  };
  refresh(0);
  while (true) {
    for (int c = 0; c < m; ++c) out[c] = op.values[partial[n][c]];
    if (!rel.contains(out)) {
      std::vector<Tuple> sel;
      for (int d = 0; d < n; ++d) sel.push_back(tuples[idx[d]]);
      return sel;
    }
    int d = n - 1;
    while (d >= 0 && ++idx[d] == tuples.size()) idx[d--] = 0;
    if (d < 0) break;
    refresh(d);
  }
  return std::nullopt;
}

// Starts from each tuple y outside rel and chooses, coordinate by coordinate,
// an argument tuple in the preimage of y_c, pruning when some column prefix
// cannot be extended to a tuple of rel.
std::optional<std::vector<Tuple>> complement_search(OpTable const& op, Relation const& rel) {
  int n = op.arity;
  int m = rel.arity;
  int q = op.q;
  std::vector<std::vector<std::uint64_t>> pre(static_cast<std::size_t>(q));
  for (std::uint64_t x = 0; x < op.values.size(); ++x) pre[op.values[x]].push_back(x);
  std::vector<std::unordered_set<std::uint64_t>> prefixes(static_cast<std::size_t>(m) + 1);
  for (auto r : rel.ranks)
    for (int len = 0; len <= m; ++len) prefixes[len].insert(r / ipow(q, m - len));
  Relation out = complement(rel);
  std::vector<Tuple> rows(static_cast<std::size_t>(m), Tuple(static_cast<std::size_t>(n)));
  std::vector<std::vector<std::uint64_t>> col(static_cast<std::size_t>(m) + 1,
                                              std::vector<std::uint64_t>(n, 0));
  std::vector<std::size_t> choice(static_cast<std::size_t>(m), 0);
  for (auto yr : out.ranks) {
    Tuple y = unrank(yr, q, m);
    bool empty = false;
    for (int c = 0; c < m; ++c) empty = empty || pre[y[c]].empty();
    if (empty) continue;
    int c = 0;
    choice[0] = 0;
    while (c >= 0) {
      auto const& cand = pre[y[c]];
      if (choice[c] == cand.size()) {
        --c;
        if (c >= 0) ++choice[c];
        continue;
      }
      unrank_into(cand[choice[c]], q, rows[c]);
      bool ok = true;
      for (int j = 0; j < n && ok; ++j) {
        col[c + 1][j] = col[c][j] * q + rows[c][j];
        ok = prefixes[c + 1].count(col[c + 1][j]) > 0;
      }
      if (!ok) {
        ++choice[c];
        continue;
      }
      if (c + 1 == m) {
        std::vector<Tuple> sel(static_cast<std::size_t>(n), Tuple(static_cast<std::size_t>(m)));
        for (int j = 0; j < n; ++j)
          for (int cc = 0; cc < m; ++cc) sel[j][cc] = rows[cc][j];
        return sel;
      }
      ++c;
      choice[c] = 0;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::vector<Tuple>> preservation_counterexample(OpTable const& op,
                                                              Relation const& rel) {
  if (op.q != rel.q) throw InputError("op_preserves: universe mismatch");
  double direct = 1;
  for (int i = 0; i < op.arity; ++i) direct = sat_mul(direct, static_cast<double>(rel.size()));
  std::vector<double> pre(static_cast<std::size_t>(op.q), 0);
  for (Elem v : op.values) pre[v] += 1;
  double comp = 0;
  if (direct > 4096) {
    Relation out = complement(rel);
    Tuple y(static_cast<std::size_t>(rel.arity));
    for (auto r : out.ranks) {
      unrank_into(r, rel.q, y);
      double p = 1;
      for (Elem v : y) p = sat_mul(p, pre[v]);
      comp = std::min(comp + p, 1e300);
      if (comp > direct) break;
    }
  } else {
    comp = direct + 1;
  }
  return comp < direct ? complement_search(op, rel) : direct_search(op, rel);
}

bool op_preserves(OpTable const& op, Relation const& rel) {
  return !preservation_counterexample(op, rel).has_value();
}

bool op_preserves_naive(OpTable const& op, Relation const& rel) {
  if (op.q != rel.q) throw InputError("op_preserves: universe mismatch");
  return !direct_search(op, rel).has_value();
}

// ---------------------------------------------------------------- restriction / conjugation

Restriction op_restrict(OpTable const& op, std::vector<Elem> subset) {
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  if (subset.empty()) throw InputError("op_restrict: empty subset");
  std::vector<int> index(static_cast<std::size_t>(op.q), -1);
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] >= op.q) throw InputError("op_restrict: subset element out of range");
    index[subset[i]] = static_cast<int>(i);
  }
  int b = static_cast<int>(subset.size());
  Tuple orig(static_cast<std::size_t>(op.arity));
  OpTable r = make_op(op.name, b, op.arity, [&](std::span<Elem const> x) {
    for (std::size_t i = 0; i < x.size(); ++i) orig[i] = subset[x[i]];
    int v = index[op(orig)];
    if (v < 0)
      throw InvarianceError("op_restrict: '" + op.name + "' maps " + tuple_string(orig) +
                                " outside the subset",
                            orig);
    return static_cast<Elem>(v);
  });
  return Restriction{std::move(r), std::move(subset)};
}

OpTable inverse_permutation(OpTable const& perm) {
  if (perm.arity != 1 || !is_permutation(perm)) throw InputError("not a permutation");
  OpTable inv = perm;
  inv.name = perm.name + "^-1";
  for (int x = 0; x < perm.q; ++x) inv.values[perm.values[x]] = static_cast<Elem>(x);
  return inv;
}

OpTable op_conjugate(OpTable const& op, OpTable const& perm) {
  if (perm.q != op.q) throw InputError("op_conjugate: universe mismatch");
  OpTable inv = inverse_permutation(perm);
  Tuple y(static_cast<std::size_t>(op.arity));
  OpTable r = make_op(op.name + "*", op.q, op.arity, [&](std::span<Elem const> x) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = inv.values[x[i]];
    return perm.values[op(y)];
  });
  return r;
}

// ---------------------------------------------------------------- algebras

OpTable const* FiniteAlgebra::find(std::string const& n) const {
  for (auto const& o : ops)
    if (o.name == n) return &o;
  return nullptr;
}

OpTable const& FiniteAlgebra::op(std::string const& n) const {
  auto p = find(n);
  if (!p) throw InputError("algebra '" + name + "' has no operation '" + n + "'");
  return *p;
}

void validate(FiniteAlgebra const& alg) {
  if (alg.q < 1 || alg.q > 255) throw InputError("universe size must be in 1..255");
  for (std::size_t i = 0; i < alg.ops.size(); ++i) {
    validate(alg.ops[i]);
    if (alg.ops[i].q != alg.q)
      throw InputError("operation '" + alg.ops[i].name + "' has a different universe");
    for (std::size_t j = 0; j < i; ++j)
      if (alg.ops[j].name == alg.ops[i].name)
        throw InputError("duplicate operation name '" + alg.ops[i].name + "'");
  }
}

bool Bundle::operator==(Bundle const& o) const {
  if (alg.name != o.alg.name || alg.q != o.alg.q || alg.ops.size() != o.alg.ops.size() ||
      relations.size() != o.relations.size())
    return false;
  for (std::size_t i = 0; i < alg.ops.size(); ++i)
    if (alg.ops[i].name != o.alg.ops[i].name || !(alg.ops[i] == o.alg.ops[i])) return false;
  for (std::size_t i = 0; i < relations.size(); ++i)
    if (relations[i].name != o.relations[i].name || !(relations[i].rel == o.relations[i].rel))
      return false;
  return true;
}

// ---------------------------------------------------------------- file format

namespace {

struct Token {
  std::string text;
  int line;
};

std::vector<Token> tokenize(std::string const& text) {
  std::vector<Token> out;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) out.push_back({tok, no});
  }
  return out;
}

[[noreturn]] void syntax(int line, std::string const& msg) {
  throw InputError("line " + std::to_string(line) + ": " + msg);
}

struct Cursor {
  std::vector<Token> toks;
  std::size_t pos = 0;

  bool done() const { return pos >= toks.size(); }
  int line() const { return done() ? (toks.empty() ? 0 : toks.back().line) : toks[pos].line; }
  std::string const& peek() const { return toks[pos].text; }
  std::string word(char const* what) {
    if (done()) syntax(line(), std::string("unexpected end of input, expected ") + what);
    return toks[pos++].text;
  }
  void keyword(char const* kw) {
    int l = line();
    auto w = word(kw);
    if (w != kw) syntax(l, "expected '" + std::string(kw) + "', found '" + w + "'");
  }
  long long integer(char const* what) {
    int l = line();
    auto w = word(what);
    try {
      std::size_t used = 0;
      long long v = std::stoll(w, &used);
      if (used != w.size()) throw std::invalid_argument(w);
      return v;
    } catch (std::exception const&) {
      syntax(l, std::string("expected integer ") + what + ", found '" + w + "'");
    }
  }
};

}  // namespace

Bundle parse_algebra(std::string const& text) {
  Cursor c{tokenize(text)};
  Bundle b;
  c.keyword("algebra");
  b.alg.name = c.word("algebra name");
  c.keyword("size");
  int l = c.line();
  long long q = c.integer("size");
  if (q < 1 || q > 255) syntax(l, "size must be in 1..255");
  b.alg.q = static_cast<int>(q);
  while (!c.done()) {
    int kl = c.line();
    std::string kw = c.word("'op' or 'rel'");
    if (kw == "op") {
      OpTable op;
      op.name = c.word("operation name");
      int al = c.line();
      long long ar = c.integer("arity");
      if (ar < 1 || ar > 16) syntax(al, "operation arity must be in 1..16");
      op.arity = static_cast<int>(ar);
      op.q = b.alg.q;
      std::size_t n = ipow(b.alg.q, op.arity);
      op.values.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (c.done() || c.peek() == "op" || c.peek() == "rel")
          syntax(c.line(), "operation '" + op.name + "' has " + std::to_string(i) +
                               " entries, expected " + std::to_string(n));
        int vl = c.line();
        long long v = c.integer("table entry");
        if (v < 0 || v >= q) syntax(vl, "table entry " + std::to_string(v) + " out of range");
        op.values.push_back(static_cast<Elem>(v));
      }
      if (!c.done() && c.peek() != "op" && c.peek() != "rel")
        syntax(c.line(), "operation '" + op.name + "' has more than " + std::to_string(n) +
                             " entries");
      if (b.alg.find(op.name)) syntax(kl, "duplicate operation name '" + op.name + "'");
      b.alg.ops.push_back(std::move(op));
    } else if (kw == "rel") {
      NamedRelation nr;
      nr.name = c.word("relation name");
      int al = c.line();
      long long ar = c.integer("arity");
      if (ar < 1 || ar > 16) syntax(al, "relation arity must be in 1..16");
      c.keyword("count");
      int cl = c.line();
      long long m = c.integer("count");
      if (m < 0) syntax(cl, "negative count");
      std::vector<Tuple> ts;
      for (long long i = 0; i < m; ++i) {
        Tuple t;
        for (long long j = 0; j < ar; ++j) {
          int vl = c.line();
          long long v = c.integer("tuple entry");
          if (v < 0 || v >= q) syntax(vl, "tuple entry out of range");
          t.push_back(static_cast<Elem>(v));
        }
        ts.push_back(std::move(t));
      }
      nr.rel = make_relation(b.alg.q, static_cast<int>(ar), ts);
      b.relations.push_back(std::move(nr));
    } else {
      syntax(kl, "expected 'op' or 'rel', found '" + kw + "'");
    }
  }
  return b;
}

Bundle load_bundle(std::string const& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_algebra(ss.str());
}

std::string emit_algebra(Bundle const& b) {
  std::ostringstream out;
  out << "algebra " << b.alg.name << "\n";
  out << "size " << b.alg.q << "\n";
  for (auto const& op : b.alg.ops) {
    out << "op " << op.name << " " << op.arity << "\n";
    for (std::size_t i = 0; i < op.values.size(); ++i) {
      out << static_cast<int>(op.values[i]);
      out << (((i + 1) % static_cast<std::size_t>(op.q) == 0) ? "\n" : " ");
    }
  }
  for (auto const& nr : b.relations) {
    out << "rel " << nr.name << " " << nr.rel.arity << "\n";
    out << "count " << nr.rel.size() << "\n";
    for (auto const& t : nr.rel.tuples()) {
      for (std::size_t i = 0; i < t.size(); ++i) out << (i ? " " : "") << static_cast<int>(t[i]);
      out << "\n";
    }
  }
  return out.str();
}

std::string emit_algebra(FiniteAlgebra const& a) { return emit_algebra(Bundle{a, {}}); }

}  // namespace eqdom
