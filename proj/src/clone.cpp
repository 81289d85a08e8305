#include "eqdom/clone.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <cstdlib>
#include <cstring>
#include <thread>

namespace eqdom {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::proven: return "proven";
    case Verdict::refuted: return "refuted";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::size_t default_cap(int q, int k) {
  std::size_t bytes = ipow(q, k);
  return std::max<std::size_t>(static_cast<std::size_t>(k), kDefaultCapBytes / bytes);
}

unsigned worker_count() {
  if (char const* env = std::getenv("EQDOM_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

std::string table_key(std::span<Elem const> values) {
  return std::string(reinterpret_cast<char const*>(values.data()), values.size());
}

// ---------------------------------------------------------------- Closure

Closure::Closure(std::vector<OpTable> gens, int q, std::size_t width,
                 std::vector<std::vector<Elem>> const& seeds, std::size_t cap)
    : gens_(std::move(gens)), q_(q), width_(width), cap_(cap) {
  for (auto const& g : gens_)
    if (g.q != q) throw InputError("closure: generator '" + g.name + "' has a different universe");
  slots_.assign(1024, 0);
  double sat = 1;
  for (std::size_t i = 0; i < width_ && sat < 1e18; ++i) sat *= q_;
  saturation_ = sat < 1e18 ? static_cast<std::size_t>(sat) : 0;
  scratch_.resize(width_);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (seeds[i].size() != width_) throw InputError("closure: seed has wrong width");
    add(seeds[i].data(), Witness{-1, {static_cast<std::uint32_t>(i)}});
  }
  seed_count_ = size();
  end_ = size();
}

std::uint64_t Closure::hash(Elem const* p) const {
  std::uint64_t h = 0x243F6A8885A308D3ull ^ width_;
  std::size_t i = 0;
  for (; i + 8 <= width_; i += 8) {
    std::uint64_t v;
    std::memcpy(&v, p + i, 8);
    h = (h ^ v) * 0x9E3779B97F4A7C15ull;
    h ^= h >> 29;
  }
  std::uint64_t tail = 0;
  for (std::size_t s = 0; i < width_; ++i, s += 8) tail |= static_cast<std::uint64_t>(p[i]) << s;
  h = (h ^ tail) * 0xBF58476D1CE4E5B9ull;
  h ^= h >> 31;
  return h;
}

std::optional<std::size_t> Closure::lookup(Elem const* p, std::uint64_t h) const {
  std::size_t mask = slots_.size() - 1;
  for (std::size_t i = h & mask;; i = (i + 1) & mask) {
    std::uint32_t s = slots_[i];
    if (!s) return std::nullopt;
    std::size_t idx = s - 1;
    if (hashes_[idx] == h && std::memcmp(data_.data() + idx * width_, p, width_) == 0) return idx;
  }
}

void Closure::insert_slot(std::size_t idx, std::uint64_t h) {
  std::size_t mask = slots_.size() - 1;
  std::size_t i = h & mask;
  while (slots_[i]) i = (i + 1) & mask;
  slots_[i] = static_cast<std::uint32_t>(idx + 1);
}

bool Closure::add(Elem const* p, Witness w) {
  std::uint64_t h = hash(p);
  if (lookup(p, h)) return false;
  std::size_t idx = witnesses_.size();
  data_.insert(data_.end(), p, p + width_);
  hashes_.push_back(h);
  witnesses_.push_back(std::move(w));
  if (2 * (idx + 1) > slots_.size()) {
    slots_.assign(slots_.size() * 2, 0);
    for (std::size_t j = 0; j <= idx; ++j) insert_slot(j, hashes_[j]);
  } else {
    insert_slot(idx, h);
  }
  return true;
}

std::optional<std::size_t> Closure::find(std::span<Elem const> r) const {
  if (r.size() != width_) return std::nullopt;
  return lookup(r.data(), hash(r.data()));
}

void Closure::refresh(int from) {
  auto const& g = gens_[gen_];
  int n = g.arity;
  for (int d = from; d < n; ++d) {
    Elem const* row = data_.data() + static_cast<std::size_t>(digits_[d]) * width_;
    auto const& prev = partial_[d];
    auto& next = partial_[d + 1];
    for (std::size_t c = 0; c < width_; ++c) next[c] = prev[c] * q_ + row[c];
  }
}

// Tuples of the block (max_, gen_, pos_): positions before pos_ range over
// [0, max_), pos_ holds max_, later positions range over [0, max_].
bool Closure::start_block() {
  auto const& g = gens_[gen_];
  int n = g.arity;
  if (pos_ >= n || (pos_ > 0 && max_ == 0)) return false;
  digits_.assign(static_cast<std::size_t>(n), 0);
  digits_[pos_] = static_cast<std::uint32_t>(max_);
  if (partial_.size() != static_cast<std::size_t>(n) + 1)
    partial_.assign(static_cast<std::size_t>(n) + 1, std::vector<std::uint32_t>(width_, 0));
  refresh(0);
  return true;
}

bool Closure::advance() {
  int n = static_cast<int>(digits_.size());
  for (int d = n - 1; d >= 0; --d) {
    if (d == pos_) continue;
    std::size_t hi = d < pos_ ? max_ : max_ + 1;
    if (++digits_[d] < hi) {
      for (int e = d + 1; e < n; ++e)
        if (e != pos_) digits_[e] = 0;
      refresh(d);
      return true;
    }
  }
  return false;
}

Closure::Status Closure::run(std::function<bool(std::size_t)> const& on_new) {
  while (seeds_pending_ < seed_count_) {
    std::size_t i = seeds_pending_++;
    if (on_new && on_new(i)) return Status::stopped;
  }
  if (complete_) return Status::fixpoint;
  if (gens_.empty() || (saturation_ && size() == saturation_)) {
    complete_ = true;
    return Status::fixpoint;
  }
  if (!started_) {
    started_ = true;
    done_ = 0;
    end_ = size();
    max_ = 0;
    gen_ = 0;
    pos_ = 0;
  }
  while (true) {
    if (!tuple_ready_) {
      if (max_ >= end_) {
        if (size() == end_) {
          complete_ = true;
          return Status::fixpoint;
        }
        done_ = end_;
        end_ = size();
        max_ = done_;
        gen_ = 0;
        pos_ = 0;
        continue;
      }
      if (!start_block()) {
        pos_ = 0;
        if (++gen_ == gens_.size()) {
          gen_ = 0;
          ++max_;
        }
        continue;
      }
      tuple_ready_ = true;
    }
    if (work_ >= work_limit_) return Status::capped;
    work_ += width_;
    auto const& g = gens_[gen_];
    int n = g.arity;
    auto const& full = partial_[n];
    for (std::size_t c = 0; c < width_; ++c) scratch_[c] = g.values[full[c]];
    ++compositions_;
    std::uint64_t h = hash(scratch_.data());
    bool fresh = !lookup(scratch_.data(), h);
    if (fresh) add(scratch_.data(), Witness{static_cast<int>(gen_), digits_});
    if (!advance()) {
      tuple_ready_ = false;
      ++pos_;
    }
    if (fresh) {
      std::size_t idx = size() - 1;
      if (saturation_ && size() == saturation_) {
        complete_ = true;
        if (on_new) on_new(idx);
        return Status::fixpoint;
      }
      if (on_new && on_new(idx)) return Status::stopped;
      if (size() >= cap_) return Status::capped;
    }
  }
}

// ---------------------------------------------------------------- TermOpSet

std::optional<std::size_t> TermOpSet::find(std::span<Elem const> values) const {
  auto it = index.find(table_key(values));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> TermOpSet::find(OpTable const& op) const {
  if (op.arity != k || op.q != q) return std::nullopt;
  return find(std::span<Elem const>(op.values));
}

OpTable TermOpSet::evaluate_witness(std::size_t i) const {
  std::unordered_map<std::size_t, OpTable> memo;
  std::function<OpTable const&(std::size_t)> eval = [&](std::size_t j) -> OpTable const& {
    auto it = memo.find(j);
    if (it != memo.end()) return it->second;
    auto const& w = witnesses[j];
    OpTable t;
    if (w.gen < 0) {
      t = projection(q, k, static_cast<int>(w.children[0]));
    } else {
      std::vector<OpTable> inner;
      for (auto c : w.children) inner.push_back(eval(c));
      t = op_compose(gens[static_cast<std::size_t>(w.gen)], inner);
    }
    return memo.emplace(j, std::move(t)).first->second;
  };
  OpTable r = eval(i);
  r.name = members[i].name;
  return r;
}

std::string TermOpSet::term_string(std::size_t i) const {
  std::function<std::string(std::size_t, int)> go = [&](std::size_t j, int budget) -> std::string {
    auto const& w = witnesses[j];
    if (w.gen < 0) return "x" + std::to_string(w.children[0] + 1);
    if (budget <= 0) return "#" + std::to_string(j);
    std::string s = gens[static_cast<std::size_t>(w.gen)].name + "(";
    for (std::size_t c = 0; c < w.children.size(); ++c) {
      if (c) s += ",";
      s += go(w.children[c], budget - 1);
    }
    return s + ")";
  };
  return go(i, 8);
}

// ---------------------------------------------------------------- KaryClosure

OpTable cyclic_shift(int q) {
  return make_op("shift", q, 1, [q](std::span<Elem const> x) {
    return static_cast<Elem>((x[0] + 1) % q);
  });
}

std::vector<std::vector<Elem>> KaryClosure::seeds(int q, int k,
                                                  std::vector<std::uint64_t> const& pts) {
  std::vector<std::vector<Elem>> s(static_cast<std::size_t>(k), std::vector<Elem>(pts.size()));
  Tuple t(static_cast<std::size_t>(k));
  for (std::size_t c = 0; c < pts.size(); ++c) {
    unrank_into(pts[c], q, t);
    for (int i = 0; i < k; ++i) s[i][c] = t[i];
  }
  return s;
}

namespace {

bool all_commute_with(std::vector<OpTable> const& gens, OpTable const& s) {
  for (auto const& g : gens)
    if (!commutes(g, s)) return false;
  return true;
}

struct Orbits {
  std::vector<std::uint64_t> reps;
  std::vector<std::uint32_t> rep_of;
  std::vector<std::uint8_t> power_of;
};

// Orbits of A^k under the componentwise action of a permutation.
Orbits orbits_of(OpTable const& perm, int k) {
  int q = perm.q;
  std::size_t n = ipow(q, k);
  Orbits o;
  o.rep_of.assign(n, UINT32_MAX);
  o.power_of.assign(n, 0);
  Tuple t(static_cast<std::size_t>(k));
  for (std::uint64_t x = 0; x < n; ++x) {
    if (o.rep_of[x] != UINT32_MAX) continue;
    auto idx = static_cast<std::uint32_t>(o.reps.size());
    o.reps.push_back(x);
    std::uint64_t y = x;
    std::uint8_t j = 0;
    do {
      o.rep_of[y] = idx;
      o.power_of[y] = j++;
      unrank_into(y, q, t);
      for (auto& e : t) e = perm.values[e];
      y = rank(t, q);
    } while (y != x);
  }
  return o;
}

}  // namespace

KaryClosure::KaryClosure(std::vector<OpTable> gens, int q, int k, std::size_t cap,
                         bool use_symmetry)
    : q_(q), k_(k), shift_(cyclic_shift(q)),
      closure_([&] {
        if (k < 1) throw InputError("arity must be at least 1");
        std::size_t n = ipow(q, k);
        symmetric_ = use_symmetry && q >= 2 && !gens.empty() && all_commute_with(gens, shift_);
        if (symmetric_) {
          Orbits o = orbits_of(shift_, k);
          points_ = std::move(o.reps);
          orbit_rep_ = std::move(o.rep_of);
          orbit_shift_ = std::move(o.power_of);
        } else {
          points_.resize(n);
          for (std::size_t i = 0; i < n; ++i) points_[i] = i;
        }
        return Closure(gens, q, points_.size(), seeds(q, k, points_), cap);
      }()) {
  shift_pow_.assign(static_cast<std::size_t>(q), std::vector<Elem>(static_cast<std::size_t>(q)));
  for (int j = 0; j < q; ++j)
    for (int v = 0; v < q; ++v) shift_pow_[j][v] = static_cast<Elem>((v + j) % q);
}

void KaryClosure::expand(std::size_t i, std::vector<Elem>& out) const {
  auto r = closure_.row(i);
  if (!symmetric_) {
    out.assign(r.begin(), r.end());
    return;
  }
  std::size_t n = orbit_rep_.size();
  out.resize(n);
  for (std::size_t x = 0; x < n; ++x) out[x] = shift_pow_[orbit_shift_[x]][r[orbit_rep_[x]]];
}

Closure::Status KaryClosure::run(
    std::function<bool(std::size_t, std::span<Elem const>)> const& on_new) {
  if (!on_new) return closure_.run();
  return closure_.run([&](std::size_t i) {
    expand(i, buf_);
    return on_new(i, buf_);
  });
}

TermOpSet KaryClosure::result() const {
  TermOpSet t;
  t.k = k_;
  t.q = q_;
  t.gens = closure_.gens();
  t.complete = closure_.complete();
  std::vector<Elem> buf;
  for (std::size_t i = 0; i < closure_.size(); ++i) {
    expand(i, buf);
    OpTable m{"t" + std::to_string(i), k_, q_, buf};
    t.index.emplace(table_key(buf), i);
    t.members.push_back(std::move(m));
    t.witnesses.push_back(closure_.witness(i));
  }
  return t;
}

// ---------------------------------------------------------------- public operations

std::string stop_note(KaryClosure const& kc, std::size_t cap) {
  if (kc.closure().out_of_work())
    return "work budget exhausted after " + std::to_string(kc.size()) + " members";
  return "member cap " + std::to_string(cap) + " reached";
}

Enumeration enumerate_kary(std::vector<OpTable> const& gens, int q, int k,
                           std::optional<std::size_t> cap) {
  std::size_t c = cap.value_or(default_cap(q, k));
  if (c < static_cast<std::size_t>(k)) throw InputError("cap must be at least k");
  KaryClosure kc(gens, q, k, c);
  auto st = kc.run();
  Enumeration e;
  e.set = kc.result();
  if (st == Closure::Status::fixpoint) {
    e.verdict = Verdict::proven;
  } else {
    e.verdict = Verdict::inconclusive;
    e.note = stop_note(kc, c) + " at arity " + std::to_string(k);
  }
  return e;
}

std::vector<OpTable> polynomial_gens(FiniteAlgebra const& alg) {
  std::vector<OpTable> gens = alg.ops;
  for (int a = 0; a < alg.q; ++a) {
    OpTable c = constant_op(alg.q, static_cast<Elem>(a));
    bool present = false;
    for (auto const& g : gens) present = present || (g.arity == 1 && g.values == c.values);
    if (present) continue;
    while (std::any_of(gens.begin(), gens.end(), [&](OpTable const& g) { return g.name == c.name; }))
      c.name += "'";
    gens.push_back(std::move(c));
  }
  return gens;
}

std::string to_string(Mode m) { return m == Mode::term ? "term" : "polynomial"; }

std::vector<OpTable> generators(FiniteAlgebra const& alg, Mode m) {
  return m == Mode::polynomial ? polynomial_gens(alg) : alg.ops;
}

FiniteAlgebra constant_expansion(FiniteAlgebra const& alg) {
  FiniteAlgebra r = alg;
  r.ops = polynomial_gens(alg);
  r.constantive = true;
  return r;
}

TermResult clone_contains(std::vector<OpTable> const& gens, int q, OpTable const& target,
                          std::optional<std::size_t> cap) {
  if (target.q != q) throw InputError("clone_contains: universe mismatch");
  TermResult r;
  int k = target.arity;
  for (int i = 0; i < k; ++i)
    if (target.values == projection(q, k, i).values) {
      r.verdict = Verdict::proven;
      r.tables.push_back(target);
      r.terms.push_back("x" + std::to_string(i + 1));
      return r;
    }
  std::size_t c = cap.value_or(default_cap(q, k));
  KaryClosure kc(gens, q, k, c);
  if (kc.symmetric() && !commutes(target, cyclic_shift(q))) {
    r.verdict = Verdict::refuted;
    r.note = "every generator commutes with the cyclic shift but the target does not";
    return r;
  }
  std::optional<std::size_t> hit;
  auto st = kc.run([&](std::size_t i, std::span<Elem const> v) {
    if (std::equal(v.begin(), v.end(), target.values.begin())) {
      hit = i;
      return true;
    }
    return false;
  });
  if (hit) {
    TermOpSet ts = kc.result();
    r.verdict = Verdict::proven;
    r.tables.push_back(ts.members[*hit]);
    r.terms.push_back(ts.term_string(*hit));
  } else if (st == Closure::Status::fixpoint) {
    r.verdict = Verdict::refuted;
    r.note = "closure complete with " + std::to_string(kc.size()) + " members";
  } else {
    r.verdict = Verdict::inconclusive;
    r.note = stop_note(kc, c);
  }
  return r;
}

// ---------------------------------------------------------------- special terms

namespace {

Elem at3(OpTable const& t, int x, int y, int z) {
  return t.values[(static_cast<std::size_t>(x) * t.q + y) * t.q + z];
}

}  // namespace

bool is_malcev(OpTable const& t) {
  if (t.arity != 3) return false;
  for (int x = 0; x < t.q; ++x)
    for (int y = 0; y < t.q; ++y)
      if (at3(t, x, y, y) != x || at3(t, y, y, x) != x) return false;
  return true;
}

bool is_majority(OpTable const& t) {
  if (t.arity != 3) return false;
  for (int x = 0; x < t.q; ++x)
    for (int y = 0; y < t.q; ++y)
      if (at3(t, x, x, y) != x || at3(t, x, y, x) != x || at3(t, y, x, x) != x) return false;
  return true;
}

bool is_twisted_majority(OpTable const& t) {
  if (t.arity != 3) return false;
  for (int x = 0; x < t.q; ++x)
    for (int y = 0; y < t.q; ++y) {
      if (at3(t, x, x, y) != x || at3(t, x, y, x) != x) return false;
      if (at3(t, y, x, x) != at3(t, x, y, at3(t, y, x, x))) return false;
    }
  return true;
}

bool check_jonsson_chain(std::vector<OpTable> const& chain) {
  if (chain.empty()) return false;
  int q = chain[0].q;
  if (chain.front().values != projection(q, 3, 0).values) return false;
  if (chain.back().values != projection(q, 3, 2).values) return false;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    auto const& f = chain[i];
    if (f.arity != 3) return false;
    for (int x = 0; x < q; ++x)
      for (int y = 0; y < q; ++y) {
        if (at3(f, x, y, x) != x) return false;
        if (i + 1 < chain.size()) {
          auto const& g = chain[i + 1];
          if (i % 2 == 0 && at3(f, x, x, y) != at3(g, x, x, y)) return false;
          if (i % 2 == 1 && at3(f, x, y, y) != at3(g, x, y, y)) return false;
        }
      }
  }
  return true;
}

std::optional<std::vector<std::size_t>> jonsson_chain(TermOpSet const& ternary, int max_length) {
  if (ternary.k != 3) throw InputError("jonsson_chain needs the ternary part");
  int q = ternary.q;
  auto p1 = ternary.find(projection(q, 3, 0));
  auto p3 = ternary.find(projection(q, 3, 2));
  if (!p1 || !p3) return std::nullopt;
  if (*p1 == *p3) return std::vector<std::size_t>{*p1};
  std::size_t n = ternary.members.size();
  std::vector<std::size_t> cand;
  std::vector<std::string> kxxy(n), kxyy(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto const& f = ternary.members[i];
    bool ok = true;
    std::string a, b;
    for (int x = 0; x < q && ok; ++x)
      for (int y = 0; y < q; ++y) {
        if (at3(f, x, y, x) != x) {
          ok = false;
          break;
        }
        a.push_back(static_cast<char>(at3(f, x, x, y)));
        b.push_back(static_cast<char>(at3(f, x, y, y)));
      }
    if (!ok) continue;
    cand.push_back(i);
    kxxy[i] = std::move(a);
    kxyy[i] = std::move(b);
  }
  // layers[i] maps member -> predecessor in layer i-1
  std::vector<std::unordered_map<std::size_t, std::size_t>> layers(1);
  layers[0][*p1] = *p1;
  for (int i = 0; i < max_length; ++i) {
    auto const& keys = (i % 2 == 0) ? kxxy : kxyy;
    std::unordered_map<std::string, std::size_t> reach;
    std::vector<std::size_t> prev;
    for (auto const& [m, _] : layers[i]) prev.push_back(m);
    std::sort(prev.begin(), prev.end());
    for (auto m : prev) reach.emplace(keys[m], m);
    std::unordered_map<std::size_t, std::size_t> next;
    for (auto c : cand) {
      auto it = reach.find(keys[c]);
      if (it != reach.end()) next.emplace(c, it->second);
    }
    layers.push_back(std::move(next));
    if (layers.back().count(*p3)) {
      std::vector<std::size_t> chain(static_cast<std::size_t>(i) + 2);
      std::size_t cur = *p3;
      for (int j = i + 1; j >= 0; --j) {
        chain[static_cast<std::size_t>(j)] = cur;
        cur = layers[static_cast<std::size_t>(j)].at(cur);
      }
      return chain;
    }
  }
  return std::nullopt;
}

TermResult find_special(std::vector<OpTable> const& gens, int q, SpecialQuery query,
                        std::optional<std::size_t> cap) {
  TermResult r;
  std::size_t c = cap.value_or(default_cap(q, 3));
  if (query.kind == SpecialKind::jonsson_chain) {
    auto e = enumerate_kary(gens, q, 3, c);
    auto chain = jonsson_chain(e.set, query.chain_length);
    if (chain) {
      r.verdict = Verdict::proven;
      for (auto i : *chain) {
        r.tables.push_back(e.set.members[i]);
        r.terms.push_back(e.set.term_string(i));
      }
      r.note = "chain length " + std::to_string(chain->size() - 1);
    } else if (e.verdict == Verdict::proven) {
      r.verdict = Verdict::refuted;
      r.note = "no chain of length <= " + std::to_string(query.chain_length) + " among " +
               std::to_string(e.set.members.size()) + " ternary members";
    } else {
      r.verdict = Verdict::inconclusive;
      r.note = e.note;
    }
    return r;
  }
  auto pred = [&](OpTable const& t) {
    switch (query.kind) {
      case SpecialKind::malcev: return is_malcev(t);
      case SpecialKind::majority: return is_majority(t);
      case SpecialKind::twisted_majority: return is_twisted_majority(t);
      default: return false;
    }
  };
  return find_ternary(gens, q, pred, c);
}

TermResult find_ternary(std::vector<OpTable> const& gens, int q,
                        std::function<bool(OpTable const&)> const& pred,
                        std::optional<std::size_t> cap) {
  TermResult r;
  std::size_t c = cap.value_or(default_cap(q, 3));
  // Low-arity generators first: high-arity ones tend to flood early rounds.
  std::vector<std::vector<OpTable>> stages;
  std::vector<OpTable> low;
  for (auto const& g : gens)
    if (g.arity <= 2) low.push_back(g);
  if (low.size() < gens.size()) stages.push_back(low);
  stages.push_back(gens);
  for (std::size_t s = 0; s < stages.size(); ++s) {
    KaryClosure kc(stages[s], q, 3, c);
    OpTable probe{"", 3, q, {}};
    std::optional<std::size_t> hit;
    auto st = kc.run([&](std::size_t i, std::span<Elem const> v) {
      probe.values.assign(v.begin(), v.end());
      if (pred(probe)) {
        hit = i;
        return true;
      }
      return false;
    });
    if (hit) {
      auto ts = kc.result();
      r.verdict = Verdict::proven;
      r.tables.push_back(ts.members[*hit]);
      r.terms.push_back(ts.term_string(*hit));
      return r;
    }
    if (s + 1 == stages.size()) {
      if (st == Closure::Status::fixpoint) {
        r.verdict = Verdict::refuted;
        r.note = "ternary part complete with " + std::to_string(kc.size()) + " members";
      } else {
        r.verdict = Verdict::inconclusive;
        r.note = stop_note(kc, c);
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------- centralizers

bool commutes(OpTable const& f, OpTable const& g) {
  if (f.q != g.q) throw InputError("commutes: universe mismatch");
  int q = f.q, n = f.arity, m = g.arity;
  std::size_t cells = static_cast<std::size_t>(n) * m;
  double total = 1;
  for (std::size_t i = 0; i < cells; ++i) total *= q;
  if (total > 4e8) throw BudgetError("commutation test too large");
  // matrix M: n rows, m columns; row-major digits
  std::vector<Elem> M(cells, 0);
  Tuple gr(static_cast<std::size_t>(n)), fc(static_cast<std::size_t>(m)), tmp;
  while (true) {
    for (int i = 0; i < n; ++i)
      gr[i] = g(std::span<Elem const>(M.data() + static_cast<std::size_t>(i) * m, m));
    Elem left = f(gr);
    tmp.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < n; ++i) tmp[i] = M[static_cast<std::size_t>(i) * m + j];
      fc[j] = f(tmp);
    }
    if (left != g(fc)) return false;
    std::size_t d = cells;
    while (d > 0) {
      --d;
      if (++M[d] < q) break;
      M[d] = 0;
      if (d == 0) return true;
    }
    if (cells == 0) return true;
  }
}

std::vector<Elem> common_fixed_points(std::vector<OpTable> const& gens, int q) {
  std::vector<Elem> out;
  for (int a = 0; a < q; ++a) {
    bool fixed = true;
    for (auto const& g : gens) {
      Tuple t(static_cast<std::size_t>(g.arity), static_cast<Elem>(a));
      fixed = fixed && g(t) == a;
    }
    if (fixed) out.push_back(static_cast<Elem>(a));
  }
  return out;
}

std::vector<OpTable> centralizer_kary(std::vector<OpTable> const& gens, int q, int k) {
  constexpr double kBudget = 65536;
  if (k < 1) throw InputError("centralizer arity must be at least 1");
  // A unary permutation among the generators forces equivariance, so only
  // values on orbit representatives are free.
  OpTable const* perm = nullptr;
  for (auto const& g : gens)
    if (g.arity == 1 && is_permutation(g) && !is_projection(g)) {
      perm = &g;
      break;
    }
  std::size_t n = ipow(q, k);
  Orbits o;
  if (perm) {
    o = orbits_of(*perm, k);
  } else {
    o.reps.resize(n);
    o.rep_of.resize(n);
    o.power_of.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) o.reps[i] = o.rep_of[i] = static_cast<std::uint32_t>(i);
  }
  // allowed values at each representative: fixed by the orbit length power
  std::vector<std::vector<Elem>> allowed(o.reps.size());
  std::vector<int> orbit_len(o.reps.size(), 0);
  for (std::size_t x = 0; x < n; ++x) orbit_len[o.rep_of[x]]++;
  std::vector<std::vector<Elem>> pow_table;
  int order = 1;
  if (perm) {
    pow_table.push_back(projection(q, 1, 0).values);
    std::vector<Elem> cur = pow_table[0];
    while (true) {
      std::vector<Elem> nx(cur.size());
      for (int v = 0; v < q; ++v) nx[v] = perm->values[cur[v]];
      if (nx == pow_table[0]) break;
      pow_table.push_back(nx);
      cur = nx;
      ++order;
    }
  }
  double total = 1;
  for (std::size_t r = 0; r < o.reps.size(); ++r) {
    for (int v = 0; v < q; ++v) {
      if (perm) {
        Elem w = static_cast<Elem>(v);
        for (int j = 0; j < orbit_len[r]; ++j) w = perm->values[w];
        if (w != v) continue;
      }
      allowed[r].push_back(static_cast<Elem>(v));
    }
    total *= static_cast<double>(allowed[r].size());
  }
  if (total > kBudget)
    throw BudgetError("centralizer search over " + std::to_string(static_cast<long long>(total)) +
                      " candidate tables exceeds the budget of 65536");
  std::vector<OpTable> out;
  if (total == 0) return out;
  std::vector<std::size_t> choice(o.reps.size(), 0);
  OpTable cand{"", k, q, std::vector<Elem>(n)};
  while (true) {
    for (std::size_t x = 0; x < n; ++x) {
      Elem v = allowed[o.rep_of[x]][choice[o.rep_of[x]]];
      cand.values[x] = perm ? pow_table[o.power_of[x] % order][v] : v;
    }
    bool ok = true;
    for (auto const& g : gens) {
      if (!commutes(cand, g)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      OpTable c = cand;
      c.name = "z" + std::to_string(out.size());
      out.push_back(std::move(c));
    }
    std::size_t d = choice.size();
    bool carry = true;
    while (carry && d > 0) {
      --d;
      if (++choice[d] < allowed[d].size()) carry = false;
      else choice[d] = 0;
    }
    if (carry) break;
  }
  return out;
}

bool bicentralizer_contains(std::vector<OpTable> const& gens, int q, OpTable const& target,
                            int k_budget) {
  for (Elem a : common_fixed_points(gens, q)) {
    Tuple t(static_cast<std::size_t>(target.arity), a);
    if (target(t) != a) return false;
  }
  for (int j = 1; j <= k_budget; ++j)
    for (auto const& c : centralizer_kary(gens, q, j))
      if (!commutes(target, c)) return false;
  return true;
}

}  // namespace eqdom

// ---------------------------------------------------------------- subpowers

namespace eqdom {

namespace {

// Residual-table classes of one operation.  Level j numbers the distinct
// tables x -> f(prefix, x) over prefixes of length j; level arity is the value.
struct Curried {
  int arity = 0;
  std::vector<std::vector<std::uint32_t>> step;  // step[j][cls * q + x] = class at j+1
  std::vector<std::uint32_t> classes;            // class count per level
};

Curried curry(OpTable const& op) {
  int q = op.q, k = op.arity;
  Curried c;
  c.arity = k;
  c.step.resize(static_cast<std::size_t>(k));
  c.classes.assign(static_cast<std::size_t>(k) + 1, 0);
  // canon[j][prefix rank] -> class; built from the value end back to level 0
  std::vector<std::uint32_t> below(op.values.begin(), op.values.end());
  c.classes[k] = static_cast<std::uint32_t>(q);
  for (int j = k - 1; j >= 0; --j) {
    std::size_t n = ipow(q, j);
    std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
    std::vector<std::uint32_t> canon(n);
    auto& st = c.step[j];
    for (std::size_t r = 0; r < n; ++r) {
      std::vector<std::uint32_t> key(below.begin() + r * q, below.begin() + (r + 1) * q);
      auto [it, fresh] = ids.emplace(key, static_cast<std::uint32_t>(ids.size()));
      canon[r] = it->second;
      if (fresh) st.insert(st.end(), key.begin(), key.end());
    }
    c.classes[j] = static_cast<std::uint32_t>(ids.size());
    below = std::move(canon);
  }
  return c;
}

// Rows of a fixed width stored back to back, with an open-addressing index.
struct FlatSet {
  std::size_t w;
  std::vector<std::uint32_t> data;
  std::vector<std::uint32_t> slots;  // 0 empty, else index + 1

  explicit FlatSet(std::size_t width) : w(width), slots(64, 0) {}
  std::size_t size() const { return data.size() / w; }
  std::uint32_t const* at(std::size_t i) const { return data.data() + i * w; }

  static std::uint64_t hash(std::uint32_t const* p, std::size_t w) {
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < w; ++i) h = (h ^ p[i]) * 1099511628211ull;
    return h ^ (h >> 29);
  }
  // false when already present
  bool insert(std::uint32_t const* p) {
    if (2 * (size() + 1) > slots.size()) grow();
    std::size_t mask = slots.size() - 1;
    for (std::size_t s = hash(p, w) & mask;; s = (s + 1) & mask) {
      if (slots[s] == 0) {
        data.insert(data.end(), p, p + w);
        slots[s] = static_cast<std::uint32_t>(size());
        return true;
      }
      if (std::equal(p, p + w, at(slots[s] - 1))) return false;
    }
  }
  void grow() {
    std::vector<std::uint32_t> fresh(slots.size() * 2, 0);
    std::size_t mask = fresh.size() - 1;
    for (std::size_t i = 0; i < size(); ++i) {
      std::size_t s = hash(at(i), w) & mask;
      while (fresh[s]) s = (s + 1) & mask;
      fresh[s] = static_cast<std::uint32_t>(i + 1);
    }
    slots.swap(fresh);
  }
};

}  // namespace

std::vector<std::vector<Elem>> subpower_rows(std::vector<OpTable> const& gens, int q, std::size_t width,
                                             std::vector<std::vector<Elem>> const& seeds,
                                             std::uint64_t work_limit) {
  FlatSet rows(width);
  double full = std::pow(static_cast<double>(q), static_cast<double>(width));
  std::vector<std::uint32_t> next(width);
  for (auto const& s : seeds) {
    if (s.size() != width) throw InputError("subpower_rows: seed of wrong width");
    std::copy(s.begin(), s.end(), next.begin());
    rows.insert(next.data());
  }

  // per operation and level: distinct partial rows and how far the
  // (partial, row) rectangle has been processed
  struct Level {
    FlatSet parts;
    std::size_t parts_done = 0, rows_done = 0;
  };
  std::vector<Curried> cur;
  std::vector<std::vector<Level>> levels;
  for (auto const& g : gens) {
    if (g.q != q) throw InputError("subpower_rows: operation on the wrong set");
    cur.push_back(curry(g));
    levels.emplace_back();
    for (int j = 0; j < g.arity; ++j) levels.back().push_back(Level{FlatSet(width)});
    std::fill(next.begin(), next.end(), 0);
    if (g.arity == 0) {
      std::fill(next.begin(), next.end(), g.values[0]);
      rows.insert(next.data());
    } else {
      levels.back()[0].parts.insert(next.data());  // the empty prefix is class 0
    }
  }

  std::uint64_t work = 0;
  bool changed = true;
  while (changed && static_cast<double>(rows.size()) < full) {
    changed = false;
    for (std::size_t g = 0; g < cur.size(); ++g)
      for (std::size_t j = 0; j < levels[g].size(); ++j) {
        auto& lv = levels[g][j];
        std::size_t np = lv.parts.size(), nr = rows.size();
        if (lv.parts_done == np && lv.rows_done == nr) continue;
        changed = true;
        auto const& st = cur[g].step[j];
        bool last = j + 1 == levels[g].size();
        FlatSet& dest = last ? rows : levels[g][j + 1].parts;
        auto step = [&](std::size_t a, std::size_t b) {
          std::uint32_t const* p = lv.parts.at(a);
          std::uint32_t const* r = rows.at(b);
          for (std::size_t c = 0; c < width; ++c) next[c] = st[p[c] * q + r[c]];
          dest.insert(next.data());
        };
        // new partials against every row, old partials against new rows
        std::uint64_t cost = (np - lv.parts_done) * nr + lv.parts_done * (nr - lv.rows_done);
        work += cost;
        if (work > work_limit)
          throw BudgetError("subpower closure needs more than " + std::to_string(work_limit) + " steps");
        for (std::size_t a = lv.parts_done; a < np; ++a)
          for (std::size_t b = 0; b < nr; ++b) step(a, b);
        for (std::size_t a = 0; a < lv.parts_done; ++a)
          for (std::size_t b = lv.rows_done; b < nr; ++b) step(a, b);
        lv.parts_done = np;
        lv.rows_done = nr;
      }
  }
  std::vector<std::vector<Elem>> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i].assign(rows.at(i), rows.at(i) + width);
  return out;
}

}  // namespace eqdom
