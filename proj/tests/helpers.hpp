#pragma once

// Shared fixtures for the test suites: compact clause builders, the worked
// formulas used across modules, and a seeded random CNF generator.

#include <random>
#include <vector>

#include "ccdd/diagram.hpp"
#include "ccdd/formula.hpp"

namespace ccdd::testing {

inline Clause cl(std::initializer_list<int> lits) {
  Clause c;
  for (int n : lits) c.push_back(Literal::from_dimacs(n));
  return c;
}

inline CnfFormula make_cnf(Var num_vars, std::initializer_list<std::initializer_list<int>> clauses) {
  CnfFormula f(num_vars);
  for (auto c : clauses) f.add_clause(cl(c));
  return f;
}

// (x1 v ~x3 v x4 v x7) & (x1 v x3 v x5) & (~x1 <-> x3) & (~x4 <-> x3)
// & (~x2 <-> ~x6), the equivalence constraints written as binary clauses.
// Its prime equivalences are x1 <-> ~x3, x1 <-> x4, x2 <-> x6 and the
// substituted core is (x1 v x7).
inline CnfFormula equivalence_showcase_cnf() {
  return make_cnf(7, {{1, -3, 4, 7},
                      {1, 3, 5},
                      {1, 3},
                      {-1, -3},
                      {3, 4},
                      {-3, -4},
                      {-2, 6},
                      {2, -6}});
}

// Odd parity of {x1,x2,x3} plus x4 = ~x1 and x5 = ~x2; 4 models over 5
// variables.
inline CnfFormula xor_chain_cnf() {
  return make_cnf(5, {{-1, -2, 3},
                      {-1, 2, -3},
                      {1, -2, -3},
                      {1, 2, 3},
                      {-1, -4},
                      {1, 4},
                      {-2, -5},
                      {2, 5}});
}

// k equivalences x_i <-> ~x_{i+k} over 2k variables, each as two binary
// clauses; 2^k models.
inline CnfFormula equivalence_chain_cnf(Var k) {
  CnfFormula f(2 * k);
  for (Var i = 1; i <= k; ++i) {
    f.add_clause(cl({-static_cast<int>(i), -static_cast<int>(i + k)}));
    f.add_clause(cl({static_cast<int>(i), static_cast<int>(i + k)}));
  }
  return f;
}

// The CNF of the six-variable showcase diagram:
// (x5<->x6) & [[~x1 & x5 & ((~x2 & x4) | (x2 & (x3<->~x4)))] |
//              [x1 & (x3<->~x4) & (x3<->x5)]]; 8 models.
inline CnfFormula showcase_diagram_cnf() {
  return make_cnf(6, {{-5, 6},  {5, -6},           // x5 <-> x6
                      {1, 5},                      // ~x1 branch needs x5
                      {1, 2, 4},                   // ~x1 & ~x2 needs x4
                      {1, -2, -3, -4}, {1, -2, 3, 4},   // ~x1 & x2: x3 <-> ~x4
                      {-1, -3, -4},    {-1, 3, 4},      // x1: x3 <-> ~x4
                      {-1, -3, 5},     {-1, 3, -5}});   // x1: x3 <-> x5
}

struct ShowcaseDiagram {
  Diagram d;
  NodeId f, t, v5, e34, v4, v3, v2, e35, k1, v1, e56, root;
};

// Hand-built diagram for showcase_diagram_cnf(): the root is a kernelized
// conjunction carrying x5 <-> x6, its core decides x1 between a decomposed
// branch and a second kernelized node over x3 <-> ~x4 and x3 <-> x5.
inline ShowcaseDiagram showcase_diagram() {
  Diagram d(6);
  NodeId f = d.make_node(false_node());
  NodeId t = d.make_node(true_node());
  NodeId v3 = d.make_node(decision_node(5, f, t));
  NodeId v5 = d.make_node(decision_node(4, f, t));
  NodeId e34 = d.make_node(equivalence_node(3, Literal(4, false)));
  NodeId v4 = d.make_node(decision_node(2, v5, e34));
  NodeId v2 = d.make_node(decomposed_node({v3, v4}));
  NodeId e35 = d.make_node(equivalence_node(3, Literal(5, true)));
  NodeId k1 = d.make_node(kernelized_node(t, {e34, e35}));
  NodeId v1 = d.make_node(decision_node(1, v2, k1));
  NodeId e56 = d.make_node(equivalence_node(5, Literal(6, true)));
  NodeId root = d.make_node(kernelized_node(v1, {e56}));
  d.set_root(root);
  return {std::move(d), f, t, v5, e34, v4, v3, v2, e35, k1, v1, e56, root};
}

/// Random CNF with clause widths in [wmin, wmax], distinct variables per
/// clause, uniform polarities.
inline CnfFormula random_cnf(std::mt19937_64& rng, Var num_vars, unsigned num_clauses,
                             unsigned wmin = 1, unsigned wmax = 4) {
  CnfFormula f(num_vars);
  std::uniform_int_distribution<unsigned> width_dist(wmin, std::min<unsigned>(wmax, num_vars));
  std::uniform_int_distribution<Var> var_dist(1, num_vars);
  std::uniform_int_distribution<int> bit(0, 1);
  for (unsigned i = 0; i < num_clauses; ++i) {
    unsigned w = width_dist(rng);
    std::vector<Var> vars;
    while (vars.size() < w) {
      Var v = var_dist(rng);
      bool dup = false;
      for (Var u : vars) dup |= (u == v);
      if (!dup) vars.push_back(v);
    }
    Clause c;
    for (Var v : vars) c.push_back(Literal(v, bit(rng) == 1));
    f.add_clause(std::move(c));
  }
  return f;
}

/// Random 3-CNF at the given clause count (uniform-random-3-SAT style).
inline CnfFormula random_3cnf(std::mt19937_64& rng, Var num_vars, unsigned num_clauses) {
  return random_cnf(rng, num_vars, num_clauses, 3, 3);
}

inline Assignment total_assignment(Var num_vars, std::initializer_list<int> lits) {
  Assignment a(num_vars);
  for (int n : lits) a.set(static_cast<Var>(n < 0 ? -n : n), n > 0);
  return a;
}

}  // namespace ccdd::testing
