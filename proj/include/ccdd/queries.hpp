#pragma once

// Tractable queries over a diagram: implicant check, consistency and
// validity via the count annotation, and model enumeration in
// lexicographic order guided by counts under a growing prefix assignment.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ccdd/counter.hpp"
#include "ccdd/diagram.hpp"

namespace ccdd {

/// Consistent conjunction of literals, kept sorted by variable.
struct Term {
  std::vector<Literal> literals;

  bool contains(Literal l) const {
    for (Literal t : literals)
      if (t == l) return true;
    return false;
  }
};

inline Term make_term(std::span<const int> dimacs_lits) {
  Term t;
  for (int n : dimacs_lits) t.literals.push_back(Literal::from_dimacs(n));
  std::sort(t.literals.begin(), t.literals.end());
  t.literals.erase(std::unique(t.literals.begin(), t.literals.end()), t.literals.end());
  for (size_t i = 1; i < t.literals.size(); ++i)
    if (t.literals[i].var() == t.literals[i - 1].var())
      throw std::invalid_argument("inconsistent term: both polarities of x" +
                                  std::to_string(t.literals[i].var()));
  return t;
}

/// Does T entail the diagram? Decisions follow the branch T fixes, or
/// require both branches when T leaves the variable open; conjunctions
/// require every child; an equivalence behaves as the decision over
/// literal leaves it abbreviates.
inline bool implicant_check(const Diagram& d, const Term& t) {
  std::vector<signed char> sign(d.num_vars() + 1, -1);
  for (Literal l : t.literals) sign[l.var()] = l.positive() ? 1 : 0;
  std::vector<signed char> memo(d.node_count(), -1);
  auto rec = [&](auto&& self, NodeId u) -> bool {
    if (memo[u] >= 0) return memo[u] == 1;
    const Node& n = d.node(u);
    bool r = false;
    switch (n.kind) {
      case NodeKind::False:
        r = false;
        break;
      case NodeKind::True:
        r = true;
        break;
      case NodeKind::Equivalence: {
        signed char sx = sign[n.var];
        signed char sl = sign[n.lit.var()];
        signed char want_l = n.lit.positive() ? 1 : 0;
        if (sx == 1)
          r = sl == want_l;  // T must also satisfy l
        else if (sx == 0)
          r = sl == (1 - want_l);
        else
          r = false;  // both branches required, they demand opposite l values
        break;
      }
      case NodeKind::Decision: {
        signed char sx = sign[n.var];
        if (sx == 0)
          r = self(self, n.children[0]);
        else if (sx == 1)
          r = self(self, n.children[1]);
        else
          r = self(self, n.children[0]) && self(self, n.children[1]);
        break;
      }
      case NodeKind::DecomposedAnd:
      case NodeKind::KernelizedAnd:
        r = true;
        for (NodeId c : n.children)
          if (!self(self, c)) {
            r = false;
            break;
          }
        break;
    }
    memo[u] = r ? 1 : 0;
    return r;
  };
  return rec(rec, d.root());
}

inline bool consistency(const Diagram& d, const CountAnnotation& counts) {
  return !counts.at(d.root()).is_zero();
}

inline bool consistency(const Diagram& d) { return consistency(d, ct(d)); }

inline bool validity(const Diagram& d, const CountAnnotation& counts) {
  return counts.at(d.root()) ==
         ModelCount::power_of_two(counts.scope_size, counts.scope_size);
}

inline bool validity(const Diagram& d, std::span<const Var> x) {
  return validity(d, ct(d, x));
}

namespace detail {

// Number of assignments over vars(u) that satisfy the node and agree with
// omega. omega must be prefix-closed for the scope: every bound right-side
// variable of a kernelized node comes with its (smaller) left variable
// already bound, which holds when omega binds an ascending prefix of X.
class PrefixCounter {
 public:
  PrefixCounter(const Diagram& d, const Assignment& omega) : d_(d), omega_(omega) {}

  BigInt count(NodeId u) {
    memo_.assign(d_.node_count(), std::nullopt);
    return rec(u);
  }

 private:
  BigInt rec(NodeId u) {
    if (memo_[u]) return *memo_[u];
    const Node& n = d_.node(u);
    BigInt r = 0;
    switch (n.kind) {
      case NodeKind::False:
        r = 0;
        break;
      case NodeKind::True:
        r = 1;
        break;
      case NodeKind::Equivalence: {
        bool bx = omega_.bound(n.var), bl = omega_.bound(n.lit.var());
        if (bx && bl)
          r = (omega_.value(n.var) == omega_.satisfies(n.lit)) ? 1 : 0;
        else if (bx || bl)
          r = 1;
        else
          r = 2;
        break;
      }
      case NodeKind::Decision: {
        auto branch = [&](int side) {
          NodeId c = n.children[side];
          BigInt v = rec(c);
          if (v == 0) return v;
          // Free variables of this node that the branch does not mention.
          for (Var w : d_.vars_of(u)) {
            if (w == n.var || omega_.bound(w)) continue;
            if (!std::binary_search(d_.vars_of(c).begin(), d_.vars_of(c).end(), w)) v <<= 1;
          }
          return v;
        };
        if (!omega_.bound(n.var))
          r = branch(0) + branch(1);
        else
          r = branch(omega_.value(n.var) ? 1 : 0);
        break;
      }
      case NodeKind::DecomposedAnd: {
        r = 1;
        for (NodeId c : n.children) {
          r *= rec(c);
          if (r == 0) break;
        }
        break;
      }
      case NodeKind::KernelizedAnd: {
        NodeId core = n.children[0];
        r = rec(core);
        for (size_t i = 1; i < n.children.size() && r != 0; ++i) {
          const Node& e = d_.node(n.children[i]);
          bool bx = omega_.bound(e.var), bl = omega_.bound(e.lit.var());
          if (bl && !bx)
            throw InvariantError("prefix assignment binds a right side before its left side");
          if (bx && bl && omega_.value(e.var) != (omega_.value(e.lit.var()) == e.lit.positive())) {
            r = 0;
            break;
          }
          // The right side is forced by the left, so it contributes no
          // freedom; an unbound left side outside the core contributes 2.
          if (!bx && !std::binary_search(d_.vars_of(core).begin(), d_.vars_of(core).end(), e.var))
            r <<= 1;
        }
        break;
      }
    }
    memo_[u] = r;
    return r;
  }

  const Diagram& d_;
  const Assignment& omega_;
  std::vector<std::optional<BigInt>> memo_;
};

}  // namespace detail

/// Streams models over X in lexicographic order (ascending variables,
/// false before true), stopping after `limit` models or when the sink
/// returns false. Returns the number of models emitted.
inline std::uint64_t enumerate_models(const Diagram& d, std::span<const Var> x,
                                      std::optional<std::uint64_t> limit,
                                      const std::function<bool(const Assignment&)>& sink) {
  std::vector<Var> scope(x.begin(), x.end());
  std::sort(scope.begin(), scope.end());
  scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
  for (Var v : d.vars_of(d.root()))
    if (!std::binary_search(scope.begin(), scope.end(), v))
      throw std::invalid_argument("enumeration scope does not cover Vars(root)");
  if (limit && *limit == 0) return 0;

  Var capacity = d.num_vars();
  if (!scope.empty()) capacity = std::max(capacity, scope.back());
  Assignment omega(capacity);
  detail::PrefixCounter counter(d, omega);
  std::uint64_t emitted = 0;
  auto dfs = [&](auto&& self, size_t i) -> bool {
    if (counter.count(d.root()) == 0) return true;
    if (i == scope.size()) {
      ++emitted;
      bool keep = sink(omega);
      if (limit && emitted >= *limit) return false;
      return keep;
    }
    for (int b = 0; b <= 1; ++b) {
      omega.bind(scope[i], b == 1);
      bool keep = self(self, i + 1);
      omega.unbind(scope[i]);
      if (!keep) return false;
    }
    return true;
  };
  dfs(dfs, 0);
  return emitted;
}

inline std::vector<Assignment> enumerate_models(const Diagram& d, std::span<const Var> x,
                                                std::optional<std::uint64_t> limit = {}) {
  std::vector<Assignment> out;
  enumerate_models(d, x, limit, [&](const Assignment& m) {
    out.push_back(m);
    return true;
  });
  return out;
}

}  // namespace ccdd
