#include "eqdom/term.hpp"

namespace eqdom {

TermDag::TermDag(int q, int k, std::vector<OpTable> ops) : q_(q), k_(k), ops_(std::move(ops)) {
  for (auto const& o : ops_)
    if (o.q != q) throw InputError("term: operation '" + o.name + "' has a different universe");
}

int TermDag::intern(Node n) {
  std::vector<int> key{static_cast<int>(n.kind), n.a};
  key.insert(key.end(), n.kids.begin(), n.kids.end());
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(n));
  memo_.emplace_back();
  index_.emplace(std::move(key), id);
  return id;
}

int TermDag::var(int i) {
  if (i < 0 || i >= k_) throw InputError("term: variable out of range");
  return intern({Kind::var, i, {}});
}

int TermDag::constant(Elem c) {
  if (c >= q_) throw InputError("term: constant out of range");
  return intern({Kind::constant, c, {}});
}

int TermDag::apply(int op, std::vector<int> kids) {
  if (op < 0 || op >= static_cast<int>(ops_.size())) throw InputError("term: unknown operation");
  if (static_cast<int>(kids.size()) != ops_[op].arity) throw InputError("term: arity mismatch");
  return intern({Kind::apply, op, std::move(kids)});
}

std::vector<Elem> const& TermDag::table(int node) {
  auto& slot = memo_[node];
  if (slot) return *slot;
  std::size_t n = ipow(q_, k_);
  std::vector<Elem> out(n);
  Node const& nd = nodes_[node];
  if (nd.kind == Kind::var) {
    Tuple t(static_cast<std::size_t>(k_));
    for (std::size_t r = 0; r < n; ++r) {
      unrank_into(r, q_, t);
      out[r] = t[nd.a];
    }
  } else if (nd.kind == Kind::constant) {
    std::fill(out.begin(), out.end(), static_cast<Elem>(nd.a));
  } else {
    std::vector<std::vector<Elem> const*> kid;
    for (int c : std::vector<int>(nd.kids)) kid.push_back(&table(c));
    auto const& op = ops_[nd.a];
    Tuple args(kid.size());
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < kid.size(); ++j) args[j] = (*kid[j])[r];
      out[r] = op(args);
    }
  }
  memo_[node] = std::move(out);
  return *memo_[node];
}

OpTable TermDag::op_table(int node, std::string name) {
  return OpTable{std::move(name), k_, q_, table(node)};
}

std::string TermDag::to_string(int node, int depth) const {
  Node const& nd = nodes_[node];
  if (nd.kind == Kind::var) return "x" + std::to_string(nd.a + 1);
  if (nd.kind == Kind::constant) return std::to_string(nd.a);
  if (depth <= 0) return "#" + std::to_string(node);
  std::string s = ops_[nd.a].name + "(";
  for (std::size_t i = 0; i < nd.kids.size(); ++i) {
    if (i) s += ",";
    s += to_string(nd.kids[i], depth - 1);
  }
  return s + ")";
}

}  // namespace eqdom
