#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "eqdom/core.hpp"

namespace eqdom {

enum class Verdict { proven, refuted, inconclusive };
std::string to_string(Verdict v);

// Member limit derived from the table-byte budget of one enumeration.
inline constexpr std::size_t kDefaultCapBytes = 2'000'000;
std::size_t default_cap(int q, int k);

// Limit on table cells written by one closure run; a ternary generator over
// a few thousand members would otherwise grind for hours proving a fixpoint.
inline constexpr std::uint64_t kDefaultWorkBudget = 600'000'000ull;

// Number of worker threads; EQDOM_THREADS overrides the hardware count.
unsigned worker_count();

// gen < 0 marks a seed (projection); then children = {seed index}.
struct Witness {
  int gen = -1;
  std::vector<std::uint32_t> children;
};

// Breadth-first subpower generation: the least set of width-w rows that
// contains the seeds and is closed under the componentwise action of gens.
// Rounds follow composition depth.  Inside a round argument tuples are taken
// by their largest member index M (a row of the previous round), then by
// generator, then by the first position holding M, then lexicographically.
// This keeps all generators moving at the same pace.  run() can be resumed
// after a callback asked it to stop.
class Closure {
 public:
  enum class Status { fixpoint, capped, stopped };

  Closure(std::vector<OpTable> gens, int q, std::size_t width,
          std::vector<std::vector<Elem>> const& seeds, std::size_t cap);

  // on_new(i) is called for each new row i (seeds included); returning true
  // pauses the run.
  Status run(std::function<bool(std::size_t)> const& on_new = {});

  std::size_t size() const { return witnesses_.size(); }
  std::size_t width() const { return width_; }
  std::span<Elem const> row(std::size_t i) const {
    return {data_.data() + i * width_, width_};
  }
  Witness const& witness(std::size_t i) const { return witnesses_[i]; }
  std::optional<std::size_t> find(std::span<Elem const> r) const;
  bool complete() const { return complete_; }
  std::size_t compositions() const { return compositions_; }
  std::vector<OpTable> const& gens() const { return gens_; }
  void set_work_limit(std::uint64_t cells) { work_limit_ = cells; }
  bool out_of_work() const { return work_ >= work_limit_; }

 private:
  std::uint64_t hash(Elem const* p) const;
  std::optional<std::size_t> lookup(Elem const* p, std::uint64_t h) const;
  void insert_slot(std::size_t idx, std::uint64_t h);
  bool add(Elem const* p, Witness w);  // false if already present
  bool start_block();
  bool advance();
  void refresh(int from);

  std::vector<OpTable> gens_;
  int q_;
  std::size_t width_;
  std::size_t cap_;
  std::vector<Elem> data_;
  std::vector<Witness> witnesses_;
  std::vector<std::uint32_t> slots_;
  std::vector<std::uint64_t> hashes_;
  std::size_t saturation_ = 0;  // q^width when representable, else 0
  bool complete_ = false;
  std::size_t compositions_ = 0;
  std::uint64_t work_ = 0;
  std::uint64_t work_limit_ = kDefaultWorkBudget;

  // iteration state
  std::size_t seeds_pending_ = 0;
  std::size_t seed_count_ = 0;
  std::size_t done_ = 0, end_ = 0;
  std::size_t max_ = 0;  // largest member index of the current tuples
  std::size_t gen_ = 0;
  int pos_ = 0;  // first position holding max_
  bool tuple_ready_ = false;
  bool started_ = false;
  std::vector<std::uint32_t> digits_;
  std::vector<std::vector<std::uint32_t>> partial_;
  std::vector<Elem> scratch_;
};

struct TermOpSet {
  int k = 1;
  int q = 1;
  std::vector<OpTable> gens;
  std::vector<OpTable> members;
  std::vector<Witness> witnesses;
  std::unordered_map<std::string, std::size_t> index;
  bool complete = false;

  std::optional<std::size_t> find(OpTable const& op) const;
  std::optional<std::size_t> find(std::span<Elem const> values) const;
  // Re-evaluates member i bottom-up from its witness.
  OpTable evaluate_witness(std::size_t i) const;
  std::string term_string(std::size_t i) const;
};

std::string table_key(std::span<Elem const> values);

// The k-ary part of the clone generated by gens.  Uses the orbit
// representatives of the cyclic shift as coordinates when q=3 and every
// generator commutes with it.
class KaryClosure {
 public:
  KaryClosure(std::vector<OpTable> gens, int q, int k, std::size_t cap,
              bool use_symmetry = true);

  // on_new(i, full table values)
  Closure::Status run(std::function<bool(std::size_t, std::span<Elem const>)> const& on_new = {});
  std::size_t size() const { return closure_.size(); }
  void expand(std::size_t i, std::vector<Elem>& out) const;
  TermOpSet result() const;
  bool symmetric() const { return symmetric_; }
  Closure const& closure() const { return closure_; }
  void set_work_limit(std::uint64_t cells) { closure_.set_work_limit(cells); }

 private:
  static std::vector<std::vector<Elem>> seeds(int q, int k, std::vector<std::uint64_t> const& pts);
  int q_, k_;
  bool symmetric_ = false;
  std::vector<std::uint64_t> points_;      // coordinate ranks
  std::vector<std::uint32_t> orbit_rep_;   // full rank -> coordinate index
  std::vector<std::uint8_t> orbit_shift_;  // full rank -> power of the shift
  OpTable shift_;
  std::vector<std::vector<Elem>> shift_pow_;
  Closure closure_;
  mutable std::vector<Elem> buf_;
};

// Why a run stopped short: member cap or work budget.
std::string stop_note(KaryClosure const& kc, std::size_t cap);

// Subuniverse of A^width generated by seeds, rows in discovery order, no term
// witnesses.  Operations are curried one argument at a time and partial
// applications are merged whenever every column is left with the same
// residual table, so operations that only look at a few equalities stay
// cheap.  BudgetError once work_limit row extensions have been spent.
std::vector<std::vector<Elem>> subpower_rows(std::vector<OpTable> const& gens, int q, std::size_t width,
                                             std::vector<std::vector<Elem>> const& seeds,
                                             std::uint64_t work_limit = kDefaultWorkBudget);

struct Enumeration {
  Verdict verdict = Verdict::inconclusive;
  TermOpSet set;
  std::string note;
};

Enumeration enumerate_kary(std::vector<OpTable> const& gens, int q, int k,
                           std::optional<std::size_t> cap = {});
inline Enumeration enumerate_kary(std::vector<OpTable> const& gens, int k,
                                  std::optional<std::size_t> cap = {}) {
  if (gens.empty()) throw InputError("enumerate_kary: universe unknown without generators");
  return enumerate_kary(gens, gens[0].q, k, cap);
}

std::vector<OpTable> polynomial_gens(FiniteAlgebra const& alg);
FiniteAlgebra constant_expansion(FiniteAlgebra const& alg);

// term: the clone of the algebra; polynomial: its constant expansion
enum class Mode { term, polynomial };
std::string to_string(Mode m);
std::vector<OpTable> generators(FiniteAlgebra const& alg, Mode m);

struct TermResult {
  Verdict verdict = Verdict::inconclusive;
  std::vector<OpTable> tables;  // witnessing table(s) when proven
  std::vector<std::string> terms;
  std::string note;
};

TermResult clone_contains(std::vector<OpTable> const& gens, int q, OpTable const& target,
                          std::optional<std::size_t> cap = {});

enum class SpecialKind { malcev, majority, jonsson_chain, twisted_majority };
struct SpecialQuery {
  SpecialKind kind = SpecialKind::malcev;
  int chain_length = 5;  // last index L of f0..fL
};
TermResult find_special(std::vector<OpTable> const& gens, int q, SpecialQuery query,
                        std::optional<std::size_t> cap = {});

// First ternary member satisfying pred; generators of arity <= 2 are
// closed off first.
TermResult find_ternary(std::vector<OpTable> const& gens, int q,
                        std::function<bool(OpTable const&)> const& pred,
                        std::optional<std::size_t> cap = {});

bool is_malcev(OpTable const& t);
bool is_majority(OpTable const& t);
// f(x,x,y)=x=f(x,y,x) and f(y,x,x)=f(x,y,f(y,x,x))
bool is_twisted_majority(OpTable const& t);
// Shortest chain f0=pi1,...,fL=pi3 of ternary members satisfying the Jonsson
// identities, as member indices.
std::optional<std::vector<std::size_t>> jonsson_chain(TermOpSet const& ternary, int max_length);
bool check_jonsson_chain(std::vector<OpTable> const& chain);

bool commutes(OpTable const& f, OpTable const& g);
// Elements fixed by every generator (the nullary part of the centralizer).
std::vector<Elem> common_fixed_points(std::vector<OpTable> const& gens, int q);
std::vector<OpTable> centralizer_kary(std::vector<OpTable> const& gens, int q, int k);
bool bicentralizer_contains(std::vector<OpTable> const& gens, int q, OpTable const& target,
                            int k_budget);

OpTable cyclic_shift(int q);

}  // namespace eqdom
