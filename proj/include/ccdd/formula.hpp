#pragma once

// CNF data model: variables, literals, clauses, formulas, assignments.
// Parsing, conditioning, unit propagation and component decomposition live
// here; everything downstream (kernelization, compilation, counting) is
// built on top of these types.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ccdd {

using Var = std::uint32_t;  // 1-based, dense

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResourceLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Violation of a structural invariant; indicates a bug in the caller (or in
// this library), never a bad input file.
struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

/// A literal is a variable with a polarity. Encoded as 2*var | sign so it
/// can index dense tables; negation is an involution (code ^ 1).
class Literal {
 public:
  Literal() = default;
  Literal(Var v, bool positive) : code_((v << 1) | (positive ? 0u : 1u)) {}

  static Literal from_dimacs(int n) {
    if (n == 0) throw std::invalid_argument("literal cannot be 0");
    return Literal(static_cast<Var>(n < 0 ? -n : n), n > 0);
  }

  Var var() const { return code_ >> 1; }
  bool positive() const { return (code_ & 1u) == 0; }
  Literal negated() const {
    Literal l;
    l.code_ = code_ ^ 1u;
    return l;
  }
  int dimacs() const { return positive() ? static_cast<int>(var()) : -static_cast<int>(var()); }
  std::uint32_t code() const { return code_; }

  // Orders by (var, positive-first); used for canonical clause forms.
  friend auto operator<=>(const Literal&, const Literal&) = default;

 private:
  std::uint32_t code_ = 0;  // 0 = unused sentinel (var 0 does not exist)
};

using Clause = std::vector<Literal>;

/// Partial or total mapping Variable -> bool over a 1..capacity scope.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(Var num_vars) : val_(num_vars + 1, -1) {}

  Var capacity() const { return val_.empty() ? 0 : static_cast<Var>(val_.size() - 1); }
  bool bound(Var v) const { return v < val_.size() && val_[v] >= 0; }
  bool value(Var v) const {
    if (!bound(v)) throw std::invalid_argument("unbound variable x" + std::to_string(v));
    return val_[v] != 0;
  }
  bool satisfies(Literal l) const { return value(l.var()) == l.positive(); }

  // bind() enforces the no-rebinding invariant; set() overwrites silently
  // (used by enumeration loops that sweep assignments in place).
  void bind(Var v, bool b) {
    ensure(v);
    if (val_[v] >= 0) throw InvariantError("variable bound twice: x" + std::to_string(v));
    val_[v] = b ? 1 : 0;
    ++bound_count_;
  }
  void bind(Literal l) { bind(l.var(), l.positive()); }
  void set(Var v, bool b) {
    ensure(v);
    if (val_[v] < 0) ++bound_count_;
    val_[v] = b ? 1 : 0;
  }
  void unbind(Var v) {
    if (bound(v)) {
      val_[v] = -1;
      --bound_count_;
    }
  }
  unsigned bound_count() const { return bound_count_; }

  bool operator==(const Assignment& o) const {
    Var n = std::max(capacity(), o.capacity());
    for (Var v = 1; v <= n; ++v) {
      bool a = bound(v), b = o.bound(v);
      if (a != b) return false;
      if (a && val_[v] != o.val_[v]) return false;
    }
    return true;
  }

 private:
  void ensure(Var v) {
    if (v >= val_.size()) val_.resize(v + 1, -1);
  }
  std::vector<signed char> val_;  // -1 unbound, 0 false, 1 true
  unsigned bound_count_ = 0;
};

enum class PropStatus { Consistent, Conflict };

struct PropagationResult {
  PropStatus status = PropStatus::Consistent;
  std::vector<Literal> implied;  // derivation order; on Conflict, the prefix derived so far
};

/// A clause set over variables 1..num_vars. Immutable once built (the
/// operations below return new formulas). A formula that acquired an empty
/// clause is constant-false; an empty clause list is constant-true.
class CnfFormula {
 public:
  CnfFormula() = default;
  explicit CnfFormula(Var num_vars) : num_vars_(num_vars) {}

  Var num_vars() const { return num_vars_; }
  const std::vector<Clause>& clauses() const { return clauses_; }
  bool is_false() const { return contradictory_; }
  bool is_true() const { return !contradictory_ && clauses_.empty(); }
  bool is_constant() const { return contradictory_ || clauses_.empty(); }

  static CnfFormula contradiction(Var num_vars) {
    CnfFormula f(num_vars);
    f.contradictory_ = true;
    return f;
  }

  // Normalizes on entry: drops duplicate literals (first occurrence kept)
  // and tautological clauses. Duplicate clauses are retained. An empty
  // clause makes the whole formula constant-false.
  void add_clause(Clause lits) {
    if (contradictory_) return;
    Clause out;
    out.reserve(lits.size());
    for (Literal l : lits) {
      if (l.var() < 1 || l.var() > num_vars_)
        throw std::invalid_argument("literal out of range: " + std::to_string(l.dimacs()));
      bool dup = false;
      for (Literal k : out) {
        if (k == l) {
          dup = true;
          break;
        }
        if (k == l.negated()) return;  // tautology
      }
      if (!dup) out.push_back(l);
    }
    if (out.empty()) {
      contradictory_ = true;
      clauses_.clear();
      return;
    }
    clauses_.push_back(std::move(out));
  }

  /// Sorted distinct variables occurring in the clauses.
  std::vector<Var> variables() const {
    std::vector<char> seen(num_vars_ + 1, 0);
    for (const Clause& c : clauses_)
      for (Literal l : c) seen[l.var()] = 1;
    std::vector<Var> out;
    for (Var v = 1; v <= num_vars_; ++v)
      if (seen[v]) out.push_back(v);
    return out;
  }

 private:
  Var num_vars_ = 0;
  std::vector<Clause> clauses_;
  bool contradictory_ = false;
};

/// Parses DIMACS CNF: `c` comment lines, one `p cnf <nv> <nc>` header,
/// clauses as 0-terminated signed integers. A clause-count mismatch is
/// accepted with a warning; everything else malformed throws ParseError.
inline CnfFormula parse_dimacs(std::istream& in, std::ostream* warnings = nullptr) {
  std::string line;
  Var num_vars = 0;
  long declared_clauses = -1;
  bool saw_header = false;
  CnfFormula formula;
  Clause current;
  long parsed_clauses = 0;
  bool stopped = false;

  while (!stopped && std::getline(in, line)) {
    if (line.empty()) continue;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == 'c') continue;
    if (line[first] == '%') break;  // SATLIB-style end marker
    if (line[first] == 'p') {
      if (saw_header) throw ParseError("duplicate header line");
      std::istringstream hs(line.substr(first));
      std::string p, fmt;
      long nv = -1, nc = -1;
      hs >> p >> fmt >> nv >> nc;
      if (p != "p" || fmt != "cnf" || nv < 0 || nc < 0 || hs.fail())
        throw ParseError("malformed header: " + line);
      num_vars = static_cast<Var>(nv);
      declared_clauses = nc;
      saw_header = true;
      formula = CnfFormula(num_vars);
      continue;
    }
    if (!saw_header) throw ParseError("clause data before header");
    std::istringstream ls(line.substr(first));
    std::string tok;
    while (ls >> tok) {
      if (tok == "%") {
        stopped = true;
        break;
      }
      long n;
      try {
        size_t pos = 0;
        n = std::stol(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError("bad token in clause data: " + tok);
      }
      if (n == 0) {
        formula.add_clause(current);
        current.clear();
        ++parsed_clauses;
      } else {
        if (n > static_cast<long>(num_vars) || -n > static_cast<long>(num_vars))
          throw ParseError("literal out of range: " + std::to_string(n));
        current.push_back(Literal::from_dimacs(static_cast<int>(n)));
      }
    }
  }
  if (!saw_header) throw ParseError("missing header");
  if (!current.empty()) throw ParseError("missing terminating 0 in last clause");
  if (warnings && parsed_clauses != declared_clauses)
    *warnings << "warning: header declares " << declared_clauses << " clauses, found "
              << parsed_clauses << "\n";
  return formula;
}

inline CnfFormula parse_dimacs(std::string_view text, std::ostream* warnings = nullptr) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in, warnings);
}

/// Prints in DIMACS; parse_dimacs(to_dimacs(f)) yields an identical clause
/// list. A constant-false formula prints one empty clause.
inline std::string to_dimacs(const CnfFormula& phi) {
  std::ostringstream out;
  size_t nc = phi.is_false() ? 1 : phi.clauses().size();
  out << "p cnf " << phi.num_vars() << " " << nc << "\n";
  if (phi.is_false()) {
    out << "0\n";
    return out.str();
  }
  for (const Clause& c : phi.clauses()) {
    for (Literal l : c) out << l.dimacs() << " ";
    out << "0\n";
  }
  return out.str();
}

/// phi restricted by making every literal in `lits` true: clauses with a
/// satisfied literal vanish, falsified literals are deleted, an empty
/// clause collapses the result to constant-false.
inline CnfFormula condition(const CnfFormula& phi, std::span<const Literal> lits) {
  std::vector<signed char> fix(phi.num_vars() + 1, -1);
  for (Literal l : lits) {
    if (l.var() < 1 || l.var() > phi.num_vars())
      throw std::invalid_argument("conditioning literal out of range");
    signed char want = l.positive() ? 1 : 0;
    if (fix[l.var()] >= 0 && fix[l.var()] != want)
      throw std::invalid_argument("contradictory conditioning literals");
    fix[l.var()] = want;
  }
  if (phi.is_false()) return CnfFormula::contradiction(phi.num_vars());
  CnfFormula out(phi.num_vars());
  for (const Clause& c : phi.clauses()) {
    Clause kept;
    bool satisfied = false;
    for (Literal l : c) {
      signed char f = fix[l.var()];
      if (f < 0) {
        kept.push_back(l);
      } else if ((f == 1) == l.positive()) {
        satisfied = true;
        break;
      }  // else falsified: drop literal
    }
    if (satisfied) continue;
    if (kept.empty()) return CnfFormula::contradiction(phi.num_vars());
    out.add_clause(std::move(kept));
  }
  return out;
}

inline CnfFormula condition(const CnfFormula& phi, std::initializer_list<Literal> lits) {
  return condition(phi, std::span<const Literal>(lits.begin(), lits.size()));
}

/// Unit propagation to fixpoint from the given assumptions. Clauses are
/// scanned in stored order and each unit fires immediately, so the
/// derivation order is reproducible. The assumptions appear at the front
/// of `implied` in the order given.
inline PropagationResult bcp(const CnfFormula& phi, std::span<const Literal> assumptions) {
  PropagationResult res;
  if (phi.is_false()) {
    res.status = PropStatus::Conflict;
    return res;
  }
  std::vector<signed char> val(phi.num_vars() + 1, -1);
  auto assign = [&](Literal l) {
    val[l.var()] = l.positive() ? 1 : 0;
    res.implied.push_back(l);
  };
  for (Literal a : assumptions) {
    if (a.var() < 1 || a.var() > phi.num_vars())
      throw std::invalid_argument("assumption out of range");
    signed char cur = val[a.var()];
    if (cur < 0) {
      assign(a);
    } else if ((cur == 1) != a.positive()) {
      res.status = PropStatus::Conflict;
      return res;
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Clause& c : phi.clauses()) {
      Literal unit{};
      unsigned unassigned = 0;
      bool satisfied = false;
      for (Literal l : c) {
        signed char f = val[l.var()];
        if (f < 0) {
          if (++unassigned > 1) break;
          unit = l;
        } else if ((f == 1) == l.positive()) {
          satisfied = true;
          break;
        }
      }
      if (satisfied || unassigned > 1) continue;
      if (unassigned == 0) {
        res.status = PropStatus::Conflict;
        return res;
      }
      assign(unit);
      changed = true;
    }
  }
  return res;
}

inline PropagationResult bcp(const CnfFormula& phi, std::initializer_list<Literal> assumptions) {
  return bcp(phi, std::span<const Literal>(assumptions.begin(), assumptions.size()));
}

/// Connected components of the primal graph (variables adjacent iff they
/// co-occur in a clause). Each component keeps the original variable
/// indices; components are ordered by their smallest variable.
inline std::vector<CnfFormula> decompose(const CnfFormula& phi) {
  if (phi.is_true()) return {};
  if (phi.is_false()) return {phi};
  Var n = phi.num_vars();
  std::vector<Var> parent(n + 1);
  for (Var v = 0; v <= n; ++v) parent[v] = v;
  auto find = [&](Var v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  auto unite = [&](Var a, Var b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent[b] = a;  // smaller index becomes the root
  };
  for (const Clause& c : phi.clauses())
    for (size_t i = 1; i < c.size(); ++i) unite(c[0].var(), c[i].var());

  std::vector<int> slot(n + 1, -1);
  std::vector<CnfFormula> comps;
  std::vector<Var> roots;
  for (const Clause& c : phi.clauses()) {
    Var r = find(c[0].var());
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(comps.size());
      comps.emplace_back(n);
      roots.push_back(r);
    }
    comps[slot[r]].add_clause(c);
  }
  // Union-find roots are class minima, so sorting roots orders components
  // by smallest variable.
  std::vector<size_t> idx(comps.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return roots[a] < roots[b]; });
  std::vector<CnfFormula> out;
  out.reserve(comps.size());
  for (size_t i : idx) out.push_back(std::move(comps[i]));
  return out;
}

/// True iff every clause has a satisfied literal. omega must be total over
/// Vars(phi); an unbound variable consulted during evaluation throws.
inline bool evaluate(const CnfFormula& phi, const Assignment& omega) {
  if (phi.is_false()) return false;
  for (const Clause& c : phi.clauses()) {
    bool satisfied = false;
    for (Literal l : c) {
      if (omega.value(l.var()) == l.positive()) {
        satisfied = true;
        break;
      }
    }
    if (!satisfied) return false;
  }
  return true;
}

/// Number of distinct variables occurring in clauses of length >= 2.
inline unsigned non_unit_var_count(const CnfFormula& phi) {
  std::vector<char> seen(phi.num_vars() + 1, 0);
  unsigned count = 0;
  for (const Clause& c : phi.clauses()) {
    if (c.size() < 2) continue;
    for (Literal l : c) {
      if (!seen[l.var()]) {
        seen[l.var()] = 1;
        ++count;
      }
    }
  }
  return count;
}

}  // namespace ccdd
