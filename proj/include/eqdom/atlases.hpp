#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "eqdom/alggeo.hpp"
#include "eqdom/clone.hpp"
#include "eqdom/conlat.hpp"
#include "eqdom/core.hpp"

namespace eqdom {

// ---- named operations on {0,1}
OpTable bool_and();
OpTable bool_or();
OpTable bool_not();
OpTable bool_h();        // majority
OpTable bool_g();        // minority, x+y+z mod 2
OpTable bool_p();        // Pixley: (x&z) | (x&~y&~z) | (~x&~y&z)
OpTable bool_t();        // x | (y & z)
OpTable bool_t_dual();   // x & (y | z)
OpTable bool_xor();      // x+y mod 2

// ---- named operations on {0,1,2}; all but sigma commute with zeta3
OpTable zeta3();
OpTable sigma3();        // swaps 0 and 1
OpTable sd_f_pi2();
OpTable sd_f_pi2_star();
OpTable sd_m();
OpTable sd_plus0();
OpTable sd_a();          // 2x+2y+1
OpTable sd_r();
OpTable sd_l();
OpTable sd_ps();

struct NamedGeneratorSet {
  std::string id;
  int q = 2;
  std::vector<OpTable> gens;
  std::string provenance;
};

std::vector<NamedGeneratorSet> boolean_catalog();
std::vector<NamedGeneratorSet> selfdual_catalog();
NamedGeneratorSet const& catalog_entry(std::string const& id);
FiniteAlgebra as_algebra(NamedGeneratorSet const& s);

enum class Tct { tp1, tp2, tp3, tp4, tp5, unknown };
std::string to_string(Tct t);

struct BooleanClass {
  bool additive = false;
  std::string route;  // which of h, t, t_dual was found
  Tct tct = Tct::unknown;
};
BooleanClass classify_boolean(std::vector<OpTable> const& gens);
// type of the polynomial clone of gens on {0,1}
Tct boolean_tct(std::vector<OpTable> const& gens);

bool is_eminimal(FiniteAlgebra const& alg, std::optional<std::size_t> cap = {});
struct EminimalClass {
  Verdict additive = Verdict::inconclusive;
  Tct tct = Tct::unknown;
  std::string note;
};
// InputError when alg is not E-minimal.
EminimalClass classify_eminimal(FiniteAlgebra const& alg, std::optional<std::size_t> cap = {});

struct SelfdualClass {
  Verdict additive = Verdict::inconclusive;
  std::string route;
};
// InputError when some generator does not commute with zeta3.
SelfdualClass classify_selfdual(std::vector<OpTable> const& gens, std::optional<std::size_t> cap = {});

// ---- Mal'cev corpus
FiniteAlgebra ring_zn(int n);  // +, unary -, *
FiniteAlgebra group_zn(int n);  // +, unary -, c0
FiniteAlgebra group_klein();
FiniteAlgebra group_s3();
struct CorpusEntry {
  FiniteAlgebra alg;
  bool additive = false;  // expected
};
std::vector<CorpusEntry> malcev_corpus();

// ---- parametrized families
FiniteAlgebra lemma311_extend(FiniteAlgebra const& alg, Elem a, Elem b);
FiniteAlgebra family_zpl(int p, int l, int i);

// f(x1,x2,x3)=f(x1,x2,x4), f(x2,x1,x3)=f(x2,x1,x4),
// f(x3,x4,x1)=f(x3,x4,x2), f(x4,x3,x1)=f(x4,x3,x2)
EquationSystem four_equation_system(OpTable const& f);
// the first two of the four
EquationSystem m_system(OpTable const& m);
// h(x3,x4,x1)=h(x3,x4,x2)
EquationSystem h_system(OpTable const& h);
// t(x3,x4,x1)=t(x3,x4,x2), t(x4,x3,x1)=t(x4,x3,x2)
EquationSystem tau_system(OpTable const& t);

struct Prop82 {
  OpTable f;
  FiniteAlgebra alg;  // f and the three constants
  EquationSystem system;
};
Prop82 family_prop82();
Relation prop82_rho(int k);
OpTable prop82_fn(int n);

struct Thm83 {
  FiniteAlgebra a;  // on {0..n}
  FiniteAlgebra z;  // on {0..n-1}
  std::vector<Elem> phi;
};
Thm83 family_thm83(int n, std::vector<int> const& indices);

// g on B (A = subset) is in the lifted clone: it preserves the subset and its
// restriction lies in Clone(gens_a).
Verdict phi_member(std::vector<OpTable> const& gens_a, OpTable const& g, std::vector<Elem> const& subset,
                   std::optional<std::size_t> cap = {});
// gens_a on A = {0..|A|-1}; B = {0..qb-1}; a in A, b outside A.
EquationSystem phi_delta_system(std::vector<OpTable> const& gens_a, int qb, Elem a, Elem b);

// ---- Alg F = Inv F* on {0,1}
struct GaloisCheck {
  bool equal = true;
  int arity = 0;
  std::optional<Relation> mismatch;
  std::size_t algebraic_sets = 0;
};
GaloisCheck check_alg_inv(std::vector<OpTable> const& gens, int m);

// ---- claims
struct ClaimReport {
  std::string id;
  std::string status;  // pass, fail, inconclusive
  nlohmann::json details;
  long long millis = 0;
  nlohmann::json to_json() const;
};
std::vector<std::string> claim_ids();
ClaimReport verify_claim(std::string const& id);
std::vector<ClaimReport> verify_claims(std::vector<std::string> const& ids);

}  // namespace eqdom
