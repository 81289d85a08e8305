#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eqdom/clone.hpp"
#include "eqdom/conlat.hpp"
#include "eqdom/core.hpp"
#include "eqdom/term.hpp"

namespace eqdom {

struct Equation {
  OpTable left, right;
  std::string left_term, right_term;
};

struct EquationSystem {
  int k = 1;
  int q = 1;
  std::vector<Equation> eqs;
};

void validate(EquationSystem const& s);
Relation solve_system(EquationSystem const& s);
// The system  t(v[0],...) = t(w[0],...)  for a generator t, where v, w pick
// argument variables (0-based) of the k-ary system.
Equation var_equation(OpTable const& t, int k, std::vector<int> const& v, std::vector<int> const& w);

struct SeparationPair {
  Tuple a;
  OpTable f, g;
  std::string f_term, g_term;
};
using SeparationCertificate = std::vector<SeparationPair>;

// Member indices (f,g) with f=g on X and f(a)!=g(a).  Throws InputError when
// the term set is incomplete.
std::optional<std::pair<std::size_t, std::size_t>> separation_witness(TermOpSet const& terms,
                                                                      Relation const& x,
                                                                      std::span<Elem const> a);

struct AlgebraicResult {
  bool algebraic = false;
  SeparationCertificate certificate;
  std::optional<Tuple> failing;  // an outside tuple with no witness
};
AlgebraicResult is_algebraic(TermOpSet const& terms, Relation const& x);
EquationSystem certificate_system(SeparationCertificate const& cert, int k, int q);

// Equations p_i(f_j,g_j,h_l,t_l) = q_i(f_j,g_j,h_l,t_l) where delta is the
// 4-ary system (p_i,q_i), B is (f_j,g_j) and C is (h_l,t_l).
EquationSystem union_system(EquationSystem const& b, EquationSystem const& c,
                            EquationSystem const& delta);

struct AdditivityOutcome {
  Verdict verdict = Verdict::inconclusive;
  EquationSystem system;           // defines delta4 when proven
  std::optional<Tuple> counterexample;
  std::string route;
  std::string note;
};
AdditivityOutcome is_equationally_additive(FiniteAlgebra const& alg, Mode mode,
                                           std::optional<std::size_t> cap = {});

// A 4-ary generator whose zero set {x : f(x) = f(x1,x1,x1,x1)} is delta.
std::optional<std::size_t> indicator_generator(std::vector<OpTable> const& gens, int q);
bool is_delta_indicator(OpTable const& f, Elem zero);

struct IndicatorSearch {
  Verdict verdict = Verdict::inconclusive;
  OpTable f;
  Elem zero = 0;
  std::string term;
  std::string note;
};
// Generators first, then the 4-ary part of the clone.
IndicatorSearch find_delta_indicator(FiniteAlgebra const& alg, Mode mode,
                                     std::optional<std::size_t> cap = {});

struct Sudoku {
  OpTable p;  // unary
  Elem i = 0;
  TermDag dag;
  int root = -1;
};
Sudoku sudoku_collapse(OpTable const& f, Elem zero);

struct BooleanWitness {
  Elem zero = 0, i = 0;
  OpTable p, c, m;
};
BooleanWitness minimal_boolean_witness(OpTable const& f, Elem zero);

// Polynomial tools for a constantive Mal'cev algebra with SI and a
// non-Abelian monolith.  Tables only; every construction step is checked.
class MalcevToolkit {
 public:
  MalcevToolkit(FiniteAlgebra alg, std::optional<std::size_t> cap = {});

  OpTable const& malcev() const { return d_; }
  Congruence const& mu() const { return mu_; }
  // k-ary table equal to c off t and e at t; (c,e) in mu
  std::vector<Elem> point_indicator(int k, std::span<Elem const> t, Elem c, Elem e);
  // p with p(t)=l(t) for t in ts, range inside the class of ls
  std::vector<Elem> interpolate(int k, std::vector<Tuple> const& ts, std::vector<Elem> const& ls);
  std::size_t steps() const { return steps_; }

 private:
  // The set {x : f(x) = tau} together with a point outside it.
  struct Sep {
    std::vector<Elem> f;
    Elem tau = 0, at = 0;  // at = f(point) != tau
  };
  Sep const& unary_separator(Elem s);
  Sep fold(Sep const& a, Sep const& b);
  std::optional<std::vector<Elem>> absorbing(Elem u1, Elem u2, Elem v1, Elem v2);
  std::optional<std::vector<Elem>> unary_map(Elem a, Elem b, Elem c, Elem e);
  std::vector<Elem> d3(std::vector<Elem> const& x, std::vector<Elem> const& y,
                       std::vector<Elem> const& z) const;

  FiniteAlgebra alg_;
  int q_;
  std::size_t cap_;
  OpTable d_;
  Congruence mu_;
  std::optional<KaryClosure> binary_;
  std::size_t binary_scanned_ = 0;
  bool binary_done_ = false;
  std::optional<TermOpSet> unary_;
  std::map<std::array<Elem, 4>, std::vector<Elem>> absorb_memo_;
  std::map<std::array<Elem, 4>, std::vector<Elem>> unary_memo_;
  std::map<Elem, Sep> sep_memo_;
  std::size_t steps_ = 0;
};

OpTable interpolate_in_class(FiniteAlgebra const& alg, Congruence const& mu,
                             std::vector<Elem> const& cls, std::vector<Tuple> const& ts,
                             std::vector<Elem> const& ls, std::optional<std::size_t> cap = {});

struct IndicatorOutcome {
  Verdict verdict = Verdict::inconclusive;
  OpTable f;
  Elem a = 0;
  std::string note;
};
IndicatorOutcome build_delta_indicator_malcev(FiniteAlgebra const& alg,
                                              std::optional<std::size_t> cap = {});

}  // namespace eqdom
