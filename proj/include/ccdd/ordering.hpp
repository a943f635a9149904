#pragma once

// Branch-variable ordering heuristics: a static minfill elimination order
// over the primal graph, and the dynamic DLCP occurrence-product score.
// Kept separate from the compiler so equivalence detection can rank its
// probe candidates with the same score.

#include <boost/multiprecision/cpp_int.hpp>
#include <set>
#include <vector>

#include "ccdd/formula.hpp"

namespace ccdd {

using Rational = boost::multiprecision::cpp_rational;

struct MinfillResult {
  std::vector<Var> order;  // all variables 1..num_vars; non-occurring appended last
  unsigned width = 0;      // induced width of the elimination
};

/// Greedy minimum-fill elimination on the primal graph. Ties break toward
/// the smallest variable index; variables with no clause occurrence are
/// appended in index order.
inline MinfillResult minfill_order(const CnfFormula& phi) {
  Var n = phi.num_vars();
  std::vector<std::set<Var>> adj(n + 1);
  std::vector<char> occurs(n + 1, 0);
  for (const Clause& c : phi.clauses()) {
    for (Literal l : c) occurs[l.var()] = 1;
    for (size_t i = 0; i < c.size(); ++i)
      for (size_t j = i + 1; j < c.size(); ++j) {
        adj[c[i].var()].insert(c[j].var());
        adj[c[j].var()].insert(c[i].var());
      }
  }
  std::vector<Var> remaining;
  for (Var v = 1; v <= n; ++v)
    if (occurs[v]) remaining.push_back(v);

  auto fill_count = [&](Var v) {
    std::size_t fill = 0;
    const auto& nb = adj[v];
    for (auto it = nb.begin(); it != nb.end(); ++it) {
      auto jt = it;
      for (++jt; jt != nb.end(); ++jt)
        if (!adj[*it].count(*jt)) ++fill;
    }
    return fill;
  };

  MinfillResult res;
  std::vector<char> eliminated(n + 1, 0);
  for (size_t step = 0; step < remaining.size(); ++step) {
    Var best = 0;
    std::size_t best_fill = 0;
    for (Var v : remaining) {
      if (eliminated[v]) continue;
      std::size_t f = fill_count(v);
      if (best == 0 || f < best_fill) {
        best = v;
        best_fill = f;
      }
    }
    res.width = std::max<unsigned>(res.width, static_cast<unsigned>(adj[best].size()));
    // Connect the neighborhood into a clique, then remove the vertex.
    std::vector<Var> nb(adj[best].begin(), adj[best].end());
    for (size_t i = 0; i < nb.size(); ++i)
      for (size_t j = i + 1; j < nb.size(); ++j) {
        adj[nb[i]].insert(nb[j]);
        adj[nb[j]].insert(nb[i]);
      }
    for (Var u : nb) adj[u].erase(best);
    adj[best].clear();
    eliminated[best] = 1;
    res.order.push_back(best);
  }
  for (Var v = 1; v <= n; ++v)
    if (!occurs[v]) res.order.push_back(v);
  return res;
}

namespace detail {
// Weight of one occurrence: 2 in a binary clause, 1/m in a non-binary
// clause of m literals, 0 otherwise. Learnt clauses would weigh 1, but no
// clause learning happens here, so that category never contributes.
inline Rational occurrence_weight(size_t clause_len) {
  if (clause_len == 2) return Rational(2);
  if (clause_len >= 3) return Rational(1, static_cast<long>(clause_len));
  return Rational(0);
}
}  // namespace detail

/// DLCP scores for all variables at once: score(x) = (sum of weights of
/// positive occurrences) * (sum of weights of negative occurrences).
inline std::vector<Rational> dlcp_scores(const CnfFormula& phi) {
  std::vector<Rational> pos(phi.num_vars() + 1), neg(phi.num_vars() + 1);
  for (const Clause& c : phi.clauses()) {
    Rational w = detail::occurrence_weight(c.size());
    if (w == 0) continue;
    for (Literal l : c) (l.positive() ? pos : neg)[l.var()] += w;
  }
  std::vector<Rational> score(phi.num_vars() + 1);
  for (Var v = 1; v <= phi.num_vars(); ++v) score[v] = pos[v] * neg[v];
  return score;
}

inline Rational dlcp_score(const CnfFormula& phi, Var x) {
  if (x < 1 || x > phi.num_vars()) throw std::invalid_argument("variable out of range");
  return dlcp_scores(phi)[x];
}

}  // namespace ccdd
