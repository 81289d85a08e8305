#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqdom {

using Elem = std::uint8_t;
using Tuple = std::vector<Elem>;

// Malformed input: bad arities, out-of-range entries, syntax errors.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A subset is not closed under an operation.
struct InvarianceError : std::runtime_error {
  InvarianceError(std::string const& what, Tuple witness)
      : std::runtime_error(what), tuple(std::move(witness)) {}
  Tuple tuple;
};

// A computation was refused because it would exceed a hard size limit.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computed object failed its own postcondition.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

std::size_t ipow(std::size_t base, std::size_t exp);

// x1 is the most significant digit.
std::uint64_t rank(std::span<Elem const> t, int q);
Tuple unrank(std::uint64_t r, int q, int n);
void unrank_into(std::uint64_t r, int q, std::span<Elem> out);

struct OpTable {
  std::string name;
  int arity = 1;
  int q = 1;
  std::vector<Elem> values;

  std::size_t size() const { return values.size(); }
  Elem operator()(std::span<Elem const> args) const;
  Elem operator()(std::initializer_list<Elem> args) const;
  bool operator==(OpTable const& o) const {
    return arity == o.arity && q == o.q && values == o.values;
  }
};

OpTable make_op(std::string name, int q, int arity,
                std::function<Elem(std::span<Elem const>)> const& rule);
OpTable projection(int q, int arity, int i);  // i is 0-based
OpTable constant_op(int q, Elem a, int arity = 1);
void validate(OpTable const& op);

Elem op_apply(OpTable const& op, std::span<Elem const> args);
OpTable op_compose(OpTable const& outer, std::vector<OpTable> const& inners);
int essential_arity(OpTable const& op);
bool depends_on(OpTable const& op, int position);
bool is_idempotent(OpTable const& op);
bool is_projection(OpTable const& op);
bool is_permutation(OpTable const& unary);

struct Relation {
  int arity = 1;
  int q = 1;
  std::vector<std::uint64_t> ranks;  // sorted, unique

  std::size_t size() const { return ranks.size(); }
  bool contains(std::uint64_t r) const;
  bool contains(std::span<Elem const> t) const;
  std::vector<Tuple> tuples() const;
  bool operator==(Relation const& o) const {
    return arity == o.arity && q == o.q && ranks == o.ranks;
  }
};

Relation make_relation(int q, int arity, std::vector<Tuple> const& tuples);
Relation relation_from_ranks(int q, int arity, std::vector<std::uint64_t> ranks);
Relation relation_where(int q, int arity,
                        std::function<bool(std::span<Elem const>)> const& pred);
Relation full_relation(int q, int arity);
Relation complement(Relation const& r);
Relation relation_union(Relation const& a, Relation const& b);
Relation delta4(int q);
Relation delta3(int q);

bool op_preserves(OpTable const& op, Relation const& rel);
// Reference implementation: every selection of arity-many tuples.
bool op_preserves_naive(OpTable const& op, Relation const& rel);
// Returns a selection of rows (one tuple of rel per argument position) whose
// image leaves rel, if any.
std::optional<std::vector<Tuple>> preservation_counterexample(OpTable const& op,
                                                              Relation const& rel);

struct Restriction {
  OpTable op;
  std::vector<Elem> renaming;  // new index -> old element
};
Restriction op_restrict(OpTable const& op, std::vector<Elem> subset);
OpTable op_conjugate(OpTable const& op, OpTable const& perm);
OpTable inverse_permutation(OpTable const& perm);

struct FiniteAlgebra {
  std::string name;
  int q = 1;
  std::vector<OpTable> ops;
  bool constantive = false;

  OpTable const& op(std::string const& n) const;
  OpTable const* find(std::string const& n) const;
};

void validate(FiniteAlgebra const& alg);

struct NamedRelation {
  std::string name;
  Relation rel;
};

struct Bundle {
  FiniteAlgebra alg;
  std::vector<NamedRelation> relations;
  bool operator==(Bundle const& o) const;
};

Bundle parse_algebra(std::string const& text);
Bundle load_bundle(std::string const& path);
std::string emit_algebra(Bundle const& b);
std::string emit_algebra(FiniteAlgebra const& a);

std::string tuple_string(std::span<Elem const> t);

}  // namespace eqdom
