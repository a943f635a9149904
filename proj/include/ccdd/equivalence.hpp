#pragma once

// Literal equivalence machinery: a union-find over signed literals that
// maintains find(~l) == ~find(l), detection of implied equivalences by
// probing literals with unit propagation (i-BCP), and the kernelization
// core built by literal substitution.

#include <span>
#include <utility>
#include <vector>

#include "ccdd/formula.hpp"
#include "ccdd/ordering.hpp"

namespace ccdd {

/// Union-find over signed literals. Merging l <-> l' also merges the
/// negations; merging l with ~l flags a contradiction. Roots are the
/// literals of minimum variable in their class, so the prime form can be
/// read off directly.
class EquivalenceSystem {
 public:
  explicit EquivalenceSystem(Var num_vars) : num_vars_(num_vars), parent_(2 * num_vars + 2) {
    for (std::uint32_t c = 0; c < parent_.size(); ++c) parent_[c] = c;
  }

  Var num_vars() const { return num_vars_; }
  bool contradiction() const { return contradiction_; }

  Literal find(Literal l) const {
    std::uint32_t c = l.code();
    while (parent_[c] != c) {
      parent_[c] = parent_[parent_[c]];  // halving keeps the roots intact
      c = parent_[c];
    }
    Literal r;
    r = Literal(c >> 1, (c & 1u) == 0);
    return r;
  }

  /// Merges the classes of a and b (and of ~a and ~b). Returns false and
  /// flags a contradiction if a and ~b are already equivalent.
  bool merge(Literal a, Literal b) {
    Literal ra = find(a), rb = find(b);
    if (ra == rb) return true;
    if (ra == rb.negated()) {
      contradiction_ = true;
      return false;
    }
    if (rb.var() < ra.var()) std::swap(ra, rb);
    // rb joins ra's class; mirror the link so find(~l) == ~find(l) holds.
    parent_[rb.code()] = ra.code();
    parent_[rb.negated().code()] = ra.negated().code();
    return true;
  }

  bool nontrivial() const {
    for (Var v = 1; v <= num_vars_; ++v)
      if (find(Literal(v, true)).var() != v) return true;
    return false;
  }

  /// Prime literal equivalences: one (x, l) pair per non-representative
  /// class member, where x is the minimum variable of the class. Sorted by
  /// left variable, then right variable.
  std::vector<std::pair<Var, Literal>> prime() const {
    if (contradiction_) throw std::logic_error("equivalence system is contradictory");
    std::vector<std::pair<Var, Literal>> out;
    for (Var v = 1; v <= num_vars_; ++v) {
      Literal r = find(Literal(v, true));
      if (r.var() == v) continue;
      // +v sits in the class of r; orient the pair so the class minimum is
      // the left-hand side.
      out.emplace_back(r.var(), Literal(v, r.positive()));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  }

 private:
  Var num_vars_ = 0;
  mutable std::vector<std::uint32_t> parent_;  // indexed by literal code
  bool contradiction_ = false;
};

inline std::vector<std::pair<Var, Literal>> prime(const EquivalenceSystem& sys) {
  return sys.prime();
}

struct LitEquDetection {
  EquivalenceSystem system;
  std::vector<Literal> forced;  // literals implied outright, in derivation order
  CnfFormula simplified;        // input conditioned on `forced`
  bool unsat = false;
};

namespace detail {

// Probe candidates: every variable in a binary clause, plus the 64 highest
// DLCP-scored remaining variables.
inline std::vector<Var> probe_candidates(const CnfFormula& phi) {
  std::vector<char> in_binary(phi.num_vars() + 1, 0);
  for (const Clause& c : phi.clauses())
    if (c.size() == 2)
      for (Literal l : c) in_binary[l.var()] = 1;
  std::vector<Var> cands;
  std::vector<Var> rest;
  for (Var v : phi.variables()) (in_binary[v] ? cands : rest).push_back(v);
  if (!rest.empty()) {
    std::vector<Rational> score = dlcp_scores(phi);
    std::stable_sort(rest.begin(), rest.end(),
                     [&](Var a, Var b) { return score[a] > score[b]; });
    if (rest.size() > 64) rest.resize(64);
    cands.insert(cands.end(), rest.begin(), rest.end());
  }
  return cands;
}

}  // namespace detail

/// Detects literal equivalences implied by phi. Each candidate variable x
/// is probed with bcp(phi,[x]) and bcp(phi,[~x]); l is equivalent to x iff
/// the first propagation implies l and the second implies ~l. A probe that
/// conflicts yields a forced literal instead. Whenever forced literals
/// appear (also from plain unit propagation up front), they are applied to
/// the working formula and detection restarts on it, so the returned
/// system always describes `simplified`.
inline LitEquDetection detect_lit_equ(const CnfFormula& phi) {
  constexpr size_t kClauseBudget = 50000;

  LitEquDetection det{EquivalenceSystem(phi.num_vars()), {}, phi, false};
  CnfFormula& work = det.simplified;

  for (;;) {
    PropagationResult base = bcp(work, std::span<const Literal>{});
    if (base.status == PropStatus::Conflict) {
      det.unsat = true;
      return det;
    }
    if (!base.implied.empty()) {
      det.forced.insert(det.forced.end(), base.implied.begin(), base.implied.end());
      work = condition(work, base.implied);
      continue;
    }
    if (work.is_constant()) return det;
    if (work.clauses().size() > kClauseBudget) return det;  // probing too costly; not correctness-bearing

    det.system = EquivalenceSystem(phi.num_vars());
    bool restarted = false;
    for (Var x : detail::probe_candidates(work)) {
      Literal px(x, true);
      PropagationResult up = bcp(work, std::span<const Literal>(&px, 1));
      Literal nx(x, false);
      PropagationResult down = bcp(work, std::span<const Literal>(&nx, 1));
      if (up.status == PropStatus::Conflict && down.status == PropStatus::Conflict) {
        det.unsat = true;
        return det;
      }
      if (up.status == PropStatus::Conflict || down.status == PropStatus::Conflict) {
        // One polarity refutes: the other is forced together with its
        // whole propagation closure. Restart detection on the simplified
        // formula; equivalences found so far may mention forced variables.
        const auto& closure = up.status == PropStatus::Conflict ? down.implied : up.implied;
        det.forced.insert(det.forced.end(), closure.begin(), closure.end());
        work = condition(work, closure);
        restarted = true;
        break;
      }
      std::vector<char> down_has(2 * phi.num_vars() + 2, 0);
      for (Literal l : down.implied) down_has[l.code()] = 1;
      for (Literal l : up.implied) {
        if (l.var() == x) continue;
        if (down_has[l.negated().code()]) {
          if (!det.system.merge(px, l)) {
            det.unsat = true;  // x <-> l and x <-> ~l together refute the formula
            return det;
          }
        }
      }
    }
    if (!restarted) return det;
  }
}

/// Core plus its defining equivalences; core contains no right-side
/// variable and core AND all (x <-> l) is equivalent to the input formula.
struct KernelizationResult {
  CnfFormula core;
  std::vector<std::pair<Var, Literal>> equivalences;
};

/// Literal substitution: every occurrence of l (resp. ~l) is replaced by x
/// (resp. ~x) for each pair (x, l). The result is then normalized: clause
/// duplicates dropped, and unit clauses used to shorten the rest while the
/// units themselves are kept, preserving logical equivalence.
inline KernelizationResult construct_core(const CnfFormula& phi,
                                          std::span<const std::pair<Var, Literal>> prime_equs) {
  std::vector<Literal> subst(phi.num_vars() + 1);  // right var -> replacement for its positive literal
  std::vector<char> is_right(phi.num_vars() + 1, 0);
  for (const auto& [x, l] : prime_equs) {
    if (x < 1 || l.var() < 1 || x > phi.num_vars() || l.var() > phi.num_vars() || l.var() == x)
      throw InvariantError("malformed prime equivalence");
    if (is_right[l.var()]) throw InvariantError("variable is the right side of two equivalences");
    is_right[l.var()] = 1;
    subst[l.var()] = Literal(x, l.positive());  // +var(l) maps to this literal
  }

  CnfFormula core(phi.num_vars());
  if (phi.is_false()) {
    core = CnfFormula::contradiction(phi.num_vars());
  } else {
    for (const Clause& c : phi.clauses()) {
      Clause mapped;
      mapped.reserve(c.size());
      for (Literal l : c) {
        if (is_right[l.var()]) {
          Literal repl = subst[l.var()];
          mapped.push_back(l.positive() ? repl : repl.negated());
        } else {
          mapped.push_back(l);
        }
      }
      core.add_clause(std::move(mapped));  // drops tautologies and duplicate literals
    }
  }

  // Drop duplicate clauses (set-wise, first occurrence kept).
  {
    CnfFormula dedup(core.num_vars());
    std::vector<Clause> seen;
    for (const Clause& c : core.clauses()) {
      Clause key = c;
      std::sort(key.begin(), key.end());
      bool dup = false;
      for (const Clause& s : seen)
        if (s == key) {
          dup = true;
          break;
        }
      if (dup) continue;
      seen.push_back(std::move(key));
      dedup.add_clause(c);
    }
    if (core.is_false()) dedup = CnfFormula::contradiction(core.num_vars());
    core = std::move(dedup);
  }

  // Unit simplification that preserves equivalence: units stay as clauses,
  // clauses satisfied by a unit are dropped, falsified literals removed.
  for (bool changed = true; changed && !core.is_false();) {
    changed = false;
    std::vector<signed char> unit(core.num_vars() + 1, -1);
    bool contradictory = false;
    for (const Clause& c : core.clauses()) {
      if (c.size() != 1) continue;
      Literal l = c[0];
      signed char want = l.positive() ? 1 : 0;
      if (unit[l.var()] >= 0 && unit[l.var()] != want) contradictory = true;
      unit[l.var()] = want;
    }
    if (contradictory) {
      core = CnfFormula::contradiction(core.num_vars());
      break;
    }
    CnfFormula next(core.num_vars());
    for (const Clause& c : core.clauses()) {
      if (c.size() == 1) {
        next.add_clause(c);
        continue;
      }
      Clause kept;
      bool satisfied = false;
      for (Literal l : c) {
        signed char u = unit[l.var()];
        if (u < 0)
          kept.push_back(l);
        else if ((u == 1) == l.positive()) {
          satisfied = true;
          break;
        }
      }
      if (satisfied) {
        changed = true;
        continue;
      }
      if (kept.size() != c.size()) changed = true;
      if (kept.empty()) {
        next = CnfFormula::contradiction(core.num_vars());
        break;
      }
      next.add_clause(std::move(kept));
    }
    core = std::move(next);
  }

  for (Var v : core.variables())
    if (is_right[v]) throw InvariantError("substituted variable survived in the core");

  return {std::move(core), std::vector<std::pair<Var, Literal>>(prime_equs.begin(), prime_equs.end())};
}

}  // namespace ccdd
