#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eqdom/core.hpp"

namespace eqdom {

// Hash-consed polynomial terms over a fixed list of operations, evaluated
// extensionally with memoization.
class TermDag {
 public:
  TermDag(int q, int k, std::vector<OpTable> ops);

  int var(int i);
  int constant(Elem c);
  int apply(int op, std::vector<int> kids);

  // k-ary value table of a node
  std::vector<Elem> const& table(int node);
  OpTable op_table(int node, std::string name = "");
  std::string to_string(int node, int depth = 12) const;
  std::size_t size() const { return nodes_.size(); }
  int q() const { return q_; }
  int k() const { return k_; }
  std::vector<OpTable> const& ops() const { return ops_; }

 private:
  enum class Kind { var, constant, apply };
  struct Node {
    Kind kind;
    int a;
    std::vector<int> kids;
  };
  int intern(Node n);

  int q_, k_;
  std::vector<OpTable> ops_;
  std::vector<Node> nodes_;
  std::map<std::vector<int>, int> index_;
  std::vector<std::optional<std::vector<Elem>>> memo_;
};

}  // namespace eqdom
