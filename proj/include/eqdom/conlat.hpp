#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eqdom/clone.hpp"
#include "eqdom/core.hpp"

namespace eqdom {

using Pair = std::pair<Elem, Elem>;

// Partition in least-representative form: rep[x] is the smallest element of
// the block of x.
struct Congruence {
  int q = 1;
  std::vector<Elem> rep;

  bool related(Elem a, Elem b) const { return rep[a] == rep[b]; }
  bool leq(Congruence const& o) const;
  bool is_bottom() const;
  bool is_top() const;
  std::size_t block_count() const;
  std::vector<std::vector<Elem>> blocks() const;
  // related pairs (a,b) with a != b
  std::vector<Pair> pairs() const;
  bool operator==(Congruence const& o) const { return q == o.q && rep == o.rep; }
  bool operator<(Congruence const& o) const { return rep < o.rep; }
};

Congruence bottom_con(int q);
Congruence top_con(int q);
Congruence con_from_blocks(int q, std::vector<std::vector<Elem>> const& blocks);
Congruence con_meet(Congruence const& a, Congruence const& b);
// join as equivalence relations
Congruence con_join(Congruence const& a, Congruence const& b);
std::string to_string(Congruence const& c);  // "0,2|1,3"
Congruence parse_partition(int q, std::string const& text);

bool is_compatible(FiniteAlgebra const& alg, Congruence const& c);
// least congruence containing base and pairs
Congruence cg(FiniteAlgebra const& alg, std::vector<Pair> const& pairs);
Congruence cg(FiniteAlgebra const& alg, Congruence const& base, std::vector<Pair> const& pairs);

struct ConLattice {
  std::vector<Congruence> elems;  // sorted by block count descending, then rep
  std::vector<std::vector<std::uint32_t>> meet, join;
  std::vector<std::size_t> atoms, coatoms;
  std::size_t bottom = 0, top = 0;
  std::optional<std::size_t> index_of(Congruence const& c) const;
};

inline constexpr std::size_t kLatticeBudget = 4096;
ConLattice all_congruences(FiniteAlgebra const& alg, std::size_t budget = kLatticeBudget);

bool is_fsi(ConLattice const& l, int q);
bool is_si(ConLattice const& l, int q);
std::optional<Congruence> monolith(ConLattice const& l, int q);
bool is_fsi(FiniteAlgebra const& alg);
bool is_si(FiniteAlgebra const& alg);
std::optional<Congruence> monolith(FiniteAlgebra const& alg);

// Blocks are numbered in increasing order of their least element.
FiniteAlgebra quotient(FiniteAlgebra const& alg, Congruence const& c);

// Subalgebra of A^4 generated by (a,a,b,b) for a alpha b and (u,v,u,v) for
// u beta v; entries read as the matrix rows (m11,m12),(m21,m22).
// BudgetError past `budget` closure steps.
inline constexpr std::uint64_t kMatrixBudget = 400'000'000;
std::vector<std::array<Elem, 4>> matrices(FiniteAlgebra const& alg, Congruence const& alpha,
                                          Congruence const& beta, std::uint64_t budget = kMatrixBudget);

bool centralizes(FiniteAlgebra const& alg, Congruence const& alpha, Congruence const& beta,
                 Congruence const& eta);
// C(1,1,alpha,beta,eta) over binary polynomials; proven means it holds
Verdict centralizes_binary(FiniteAlgebra const& alg, Congruence const& alpha,
                           Congruence const& beta, Congruence const& eta,
                           std::optional<std::size_t> cap = {});
Congruence commutator(FiniteAlgebra const& alg, Congruence const& alpha, Congruence const& beta);

struct AbsorbOutcome {
  Verdict verdict = Verdict::inconclusive;
  std::vector<Pair> pairs;  // sorted, includes the diagonal
  std::string note;
};
// Enumerates binary polynomials, unless a Mal'cev polynomial turns up; then
// the grid route below is exact and much cheaper.
AbsorbOutcome absorbing_commutator(FiniteAlgebra const& alg, Pair uv1, Pair uv2,
                                   std::optional<std::size_t> cap = {});
// Same set for an algebra with Mal'cev polynomial d.  Every absorbing z is
// z_p(x,y) = d(d(p(x,y), p(x,u2), p(u1,u2)), p(u1,y), p(u1,u2)) for a binary
// polynomial p, and (z_p(v1,v2), z_p(u1,u2)) only reads p on {u1,v1}x{u2,v2}.
// So it suffices to close the four grid rows, a subuniverse of A^4.
AbsorbOutcome absorbing_commutator_malcev(FiniteAlgebra const& alg, OpTable const& d, Pair uv1, Pair uv2);

TermResult find_weak_difference(FiniteAlgebra const& alg, Mode mode,
                                std::optional<std::size_t> cap = {});

struct MalcevVerdict {
  bool si = false;
  std::optional<Congruence> monolith;
  std::optional<Congruence> mu_commutator;
  bool additive = false;
  std::string malcev_term;
  OpTable malcev;
};
// Throws InputError when no Mal'cev polynomial is found.
MalcevVerdict classify_malcev_eqadd(FiniteAlgebra const& alg,
                                    std::optional<std::size_t> cap = {});

}  // namespace eqdom
