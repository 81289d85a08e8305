// eqdom: command-line front end.  Every command builds a JSON document first;
// the text form is rendered from it.
//
// exit codes: 0 success/positive, 1 negative verdict, 2 inconclusive,
// 3 input error

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "eqdom/alggeo.hpp"
#include "eqdom/atlases.hpp"
#include "eqdom/conlat.hpp"

using namespace eqdom;
using nlohmann::json;

namespace {

struct Config {
  std::string mode = "term";
  std::optional<std::size_t> cap;
  bool as_json = false;
  bool timing = false;
  std::uint64_t seed = 0;
};

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::proven: return 0;
    case Verdict::refuted: return 1;
    case Verdict::inconclusive: return 2;
  }
  return 2;
}

Mode parse_mode(std::string const& m) {
  if (m == "term") return Mode::term;
  if (m == "polynomial" || m == "poly") return Mode::polynomial;
  throw InputError("unknown mode '" + m + "' (term or polynomial)");
}

void render_text(std::ostream& out, json const& j, std::string const& indent) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.value().is_structured() && !it.value().empty()) {
        out << indent << it.key() << ":\n";
        render_text(out, it.value(), indent + "  ");
      } else {
        out << indent << it.key() << ": " << (it.value().is_string() ? it.value().get<std::string>() : it.value().dump())
            << "\n";
      }
    }
  } else if (j.is_array()) {
    for (auto const& v : j) {
      if (v.is_structured()) {
        out << indent << "-\n";
        render_text(out, v, indent + "  ");
      } else {
        out << indent << "- " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
      }
    }
  } else {
    out << indent << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

void emit(Config const& cfg, json doc) {
  doc["schema"] = 1;
  if (cfg.as_json) {
    std::cout << doc.dump(2) << "\n";
  } else {
    render_text(std::cout, doc, "");
  }
}

json system_json(EquationSystem const& s) {
  json eqs = json::array();
  for (auto const& e : s.eqs) eqs.push_back(e.left_term + " = " + e.right_term);
  return eqs;
}

json tuple_json(std::span<Elem const> t) {
  json a = json::array();
  for (Elem e : t) a.push_back(static_cast<int>(e));
  return a;
}

std::vector<Pair> parse_pairs(int q, std::string const& text) {
  std::vector<Pair> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto dash = item.find('-');
    if (dash == std::string::npos) throw InputError("pair '" + item + "' is not of the form a-b");
    int a = std::stoi(item.substr(0, dash)), b = std::stoi(item.substr(dash + 1));
    if (a < 0 || b < 0 || a >= q || b >= q) throw InputError("pair '" + item + "' out of range");
    out.emplace_back(static_cast<Elem>(a), static_cast<Elem>(b));
  }
  return out;
}

// "0,2|1,3" is a partition; "0-2,1-3" generates a congruence
Congruence parse_congruence(FiniteAlgebra const& alg, std::string const& text) {
  if (text.find('|') != std::string::npos || text.find('-') == std::string::npos) {
    auto c = parse_partition(alg.q, text);
    if (!is_compatible(alg, c)) throw InputError("partition " + text + " is not a congruence");
    return c;
  }
  return cg(alg, parse_pairs(alg.q, text));
}

void write_out(std::string const& path, std::string const& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

std::vector<int> parse_ints(std::string const& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eqdom: equational additivity of finite algebras"};
  app.require_subcommand(1);
  Config cfg;
  app.add_flag("--json", cfg.as_json, "JSON output (schema 1)");
  app.add_option("--seed", cfg.seed, "seed for randomized sweeps")->default_val(0);
  std::size_t cap_value = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--mode", cfg.mode, "term or polynomial")->default_val("term");
    sub->add_option("--cap", cap_value, "member cap (default derived from a 2 MB table budget)");
  };

  std::string file;
  int k = 4;

  auto* check = app.add_subcommand("check", "decide equational additivity");
  check->add_option("file", file, "algebra bundle")->required();
  add_common(check);

  auto* clone = app.add_subcommand("clone", "clone computations");
  clone->require_subcommand(1);
  auto* clone_enum = clone->add_subcommand("enum", "enumerate the k-ary part");
  clone_enum->add_option("file", file)->required();
  clone_enum->add_option("-k", k, "arity")->required();
  bool list_terms = false;
  clone_enum->add_flag("--list", list_terms, "print every member as a term");
  add_common(clone_enum);

  auto* con = app.add_subcommand("con", "congruences");
  con->require_subcommand(1);
  auto* con_lattice = con->add_subcommand("lattice", "congruence lattice");
  con_lattice->add_option("file", file)->required();

  std::string alpha_text, beta_text;
  auto* comm = app.add_subcommand("commutator", "term condition commutator [alpha,beta]");
  comm->add_option("file", file)->required();
  comm->add_option("--alpha", alpha_text, "pairs a-b,... or a partition 0,2|1,3")->required();
  comm->add_option("--beta", beta_text, "pairs a-b,... or a partition 0,2|1,3")->required();

  auto* classify = app.add_subcommand("classify", "run a classifier");
  std::string which;
  classify->add_option("kind", which, "boolean, malcev, eminimal or selfdual")
      ->required()
      ->check(CLI::IsMember({"boolean", "malcev", "eminimal", "selfdual"}));
  classify->add_option("file", file)->required();
  add_common(classify);

  auto* gen = app.add_subcommand("gen", "write a family member as a bundle");
  std::string family, out_path = "-", indices = "3";
  int p = 2, l = 3, i_arity = 2, n = 3, rho_k = 0;
  int a = 0, b = 1;
  gen->add_option("family", family, "zpl, prop82, thm83 or lemma311")
      ->required()
      ->check(CLI::IsMember({"zpl", "prop82", "thm83", "lemma311"}));
  gen->add_option("--p", p)->default_val(2);
  gen->add_option("--l", l)->default_val(3);
  gen->add_option("--i", i_arity)->default_val(2);
  gen->add_option("--n", n)->default_val(3);
  gen->add_option("--I", indices, "comma separated indices for thm83")->default_val("3");
  gen->add_option("--rho", rho_k, "prop82: also emit rho_k")->default_val(0);
  gen->add_option("--base", file, "lemma311: algebra to extend");
  gen->add_option("--a", a)->default_val(0);
  gen->add_option("--b", b)->default_val(1);
  bool quotient_side = false;
  gen->add_flag("--quotient", quotient_side, "thm83: emit the quotient algebra instead");
  gen->add_option("-o", out_path, "output file, - for stdout")->default_val("-");

  auto* paper = app.add_subcommand("paper", "registered checks");
  paper->require_subcommand(1);
  auto* verify = paper->add_subcommand("verify", "run a claim or all of them");
  std::string claim;
  verify->add_option("claim", claim, "claim id or all")->required();
  verify->add_flag("--timing", cfg.timing, "report wall time (breaks byte-identical output)");

  auto* catalog = app.add_subcommand("catalog", "named generator sets");
  catalog->require_subcommand(1);
  catalog->add_subcommand("list", "list catalog entries and claims");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }
  if (cap_value) cfg.cap = cap_value;

  try {
    if (check->parsed()) {
      auto bundle = load_bundle(file);
      auto mode = parse_mode(cfg.mode);
      auto r = is_equationally_additive(bundle.alg, mode, cfg.cap);
      json doc{{"command", "check"}, {"algebra", bundle.alg.name}, {"mode", to_string(mode)},
               {"verdict", to_string(r.verdict)}, {"route", r.route}};
      if (r.verdict == Verdict::proven) doc["system"] = system_json(r.system);
      if (r.counterexample) doc["counterexample"] = tuple_json(*r.counterexample);
      if (!r.note.empty()) doc["note"] = r.note;
      emit(cfg, doc);
      return exit_for(r.verdict);
    }
    if (clone_enum->parsed()) {
      auto bundle = load_bundle(file);
      auto mode = parse_mode(cfg.mode);
      auto e = enumerate_kary(generators(bundle.alg, mode), bundle.alg.q, k, cfg.cap);
      json doc{{"command", "clone enum"}, {"algebra", bundle.alg.name}, {"mode", to_string(mode)},
               {"k", k},  {"count", e.set.members.size()}, {"complete", e.set.complete}};
      if (!e.note.empty()) doc["note"] = e.note;
      if (list_terms) {
        json ms = json::array();
        for (std::size_t i = 0; i < e.set.members.size(); ++i) ms.push_back(e.set.term_string(i));
        doc["members"] = ms;
      }
      emit(cfg, doc);
      return e.set.complete ? 0 : 2;
    }
    if (con_lattice->parsed()) {
      auto bundle = load_bundle(file);
      auto lat = all_congruences(bundle.alg);
      json els = json::array(), atoms = json::array();
      for (auto const& c : lat.elems) els.push_back(to_string(c));
      for (auto i : lat.atoms) atoms.push_back(to_string(lat.elems[i]));
      auto mu = monolith(lat, bundle.alg.q);
      json doc{{"command", "con lattice"}, {"algebra", bundle.alg.name}, {"size", lat.elems.size()},
               {"congruences", els}, {"atoms", atoms}, {"fsi", is_fsi(lat, bundle.alg.q)},
               {"si", is_si(lat, bundle.alg.q)}};
      if (mu) doc["monolith"] = to_string(*mu);
      emit(cfg, doc);
      return 0;
    }
    if (comm->parsed()) {
      auto bundle = load_bundle(file);
      auto al = parse_congruence(bundle.alg, alpha_text);
      auto be = parse_congruence(bundle.alg, beta_text);
      auto c = commutator(bundle.alg, al, be);
      emit(cfg, json{{"command", "commutator"}, {"algebra", bundle.alg.name}, {"alpha", to_string(al)},
                     {"beta", to_string(be)}, {"commutator", to_string(c)}});
      return 0;
    }
    if (classify->parsed()) {
      auto bundle = load_bundle(file);
      auto const& alg = bundle.alg;
      json doc{{"command", "classify " + which}, {"algebra", alg.name}};
      Verdict v = Verdict::inconclusive;
      if (which == "boolean") {
        if (alg.q != 2) throw InputError("boolean classifier needs a 2-element algebra");
        auto c = classify_boolean(alg.ops);
        doc["additive"] = c.additive;
        doc["route"] = c.route;
        doc["tct"] = to_string(c.tct);
        v = c.additive ? Verdict::proven : Verdict::refuted;
      } else if (which == "malcev") {
        auto m = classify_malcev_eqadd(alg, cfg.cap);
        doc["additive"] = m.additive;
        doc["si"] = m.si;
        doc["malcev_term"] = m.malcev_term;
        if (m.monolith) doc["monolith"] = to_string(*m.monolith);
        if (m.mu_commutator) doc["monolith_commutator"] = to_string(*m.mu_commutator);
        v = m.additive ? Verdict::proven : Verdict::refuted;
      } else if (which == "eminimal") {
        auto c = classify_eminimal(alg, cfg.cap);
        doc["eminimal"] = true;
        doc["additive"] = to_string(c.additive);
        doc["tct"] = to_string(c.tct);
        if (!c.note.empty()) doc["note"] = c.note;
        v = c.additive;
      } else {
        auto c = classify_selfdual(alg.ops, cfg.cap);
        doc["additive"] = to_string(c.additive);
        doc["route"] = c.route;
        v = c.additive;
      }
      emit(cfg, doc);
      return exit_for(v);
    }
    if (gen->parsed()) {
      Bundle out;
      if (family == "zpl") {
        out.alg = family_zpl(p, l, i_arity);
      } else if (family == "prop82") {
        out.alg = family_prop82().alg;
        if (rho_k > 0) out.relations.push_back({"rho" + std::to_string(rho_k), prop82_rho(rho_k)});
      } else if (family == "thm83") {
        auto t = family_thm83(n, parse_ints(indices));
        out.alg = quotient_side ? t.z : t.a;
      } else {
        if (file.empty()) throw InputError("lemma311 needs --base <file>");
        out.alg = lemma311_extend(load_bundle(file).alg, static_cast<Elem>(a), static_cast<Elem>(b));
      }
      write_out(out_path, emit_algebra(out));
      return 0;
    }
    if (verify->parsed()) {
      std::vector<std::string> ids = claim == "all" ? claim_ids() : std::vector<std::string>{claim};
      auto reps = verify_claims(ids);
      json arr = json::array();
      int rc = 0;
      for (auto const& r : reps) {
        json j = r.to_json();
        if (!cfg.timing) j["millis"] = nullptr;
        arr.push_back(j);
        if (r.status == "fail") rc = 1;
        else if (r.status != "pass" && rc == 0) rc = 2;
      }
      emit(cfg, json{{"command", "paper verify"}, {"reports", arr}});
      return rc;
    }
    if (catalog->parsed()) {
      json entries = json::array();
      auto add = [&](std::vector<NamedGeneratorSet> const& cat) {
        for (auto const& s : cat) {
          json g = json::array();
          for (auto const& op : s.gens) g.push_back(op.name + "/" + std::to_string(op.arity));
          entries.push_back(json{{"id", s.id}, {"q", s.q}, {"generators", g}, {"description", s.provenance}});
        }
      };
      add(boolean_catalog());
      add(selfdual_catalog());
      emit(cfg, json{{"command", "catalog list"}, {"entries", entries}, {"claims", claim_ids()}});
      return 0;
    }
  } catch (InputError const& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (InvarianceError const& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (BudgetError const& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return 2;
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
