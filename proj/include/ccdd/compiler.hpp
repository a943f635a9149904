#pragma once

// Top-down compilation of CNF into a CCDD: base cases, component cache,
// kernelization via detected literal equivalences, component decomposition
// and binary decisions, in that order. The search skeleton is generic over
// an emitter so the exact model counter can run the identical search while
// emitting counts instead of diagram nodes.

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "ccdd/diagram.hpp"
#include "ccdd/equivalence.hpp"
#include "ccdd/formula.hpp"
#include "ccdd/ordering.hpp"

namespace ccdd {

enum class OrderMode { Auto, Minfill, Dlcp };

struct CompilerConfig {
  bool kernelization_enabled = true;
  bool pre_kernelize = false;  // one forced kernelization pass at the root
  OrderMode order_mode = OrderMode::Auto;
  unsigned crossover_divisor = 5;  // minfill/DLCP crossover; counting uses 7
  unsigned easy_bound_cap = 128;
  unsigned unit_threshold = 48;
  unsigned unit_decision_ratio = 2;
  std::uint64_t rng_seed = 0;  // carried along for sampling pipelines
  std::uint64_t node_budget = 50'000'000;
};

struct PathStats {
  unsigned units = 0;      // BCP-implied literals since the last kernelization
  unsigned decisions = 0;  // decision nodes since the last kernelization
};

struct CompileContext {
  CompilerConfig cfg;
  unsigned root_non_unit_vars = 0;
  std::vector<Var> static_order;  // minfill elimination order of the root
  unsigned minfill_width = 0;
  bool use_dlcp = false;  // resolved once from order_mode at the root
  PathStats path;
  bool pre_kernel_pending = false;
};

/// Kernelization pays off only on hard residuals: formulas at or below the
/// easy bound min(cap, root_non_unit_vars/2) never kernelize; above it the
/// path must have accumulated more than unit_threshold implied units and
/// more than unit_decision_ratio units per decision.
inline bool should_kernelize(const CompileContext& ctx, const CnfFormula& phi) {
  if (!ctx.cfg.kernelization_enabled) return false;
  if (ctx.pre_kernel_pending) return true;
  unsigned easy_bound = std::min(ctx.cfg.easy_bound_cap, ctx.root_non_unit_vars / 2);
  if (phi.variables().size() <= easy_bound) return false;
  return ctx.path.units > ctx.cfg.unit_threshold &&
         ctx.path.units > ctx.cfg.unit_decision_ratio * ctx.path.decisions;
}

/// Static mode: next variable of the root minfill order still present.
/// Dynamic mode: maximum DLCP score, ties toward the smallest index.
inline Var pick_good_var(const CompileContext& ctx, const CnfFormula& phi) {
  std::vector<Var> vars = phi.variables();
  if (vars.empty()) throw std::invalid_argument("formula has no unassigned variable");
  if (!ctx.use_dlcp && !ctx.static_order.empty()) {
    std::vector<char> present(phi.num_vars() + 1, 0);
    for (Var v : vars) present[v] = 1;
    for (Var v : ctx.static_order)
      if (v <= phi.num_vars() && present[v]) return v;
  }
  std::vector<Rational> score = dlcp_scores(phi);
  Var best = vars.front();
  for (Var v : vars)
    if (score[v] > score[best]) best = v;
  return best;
}

namespace detail {

// Canonical residual-component key: clauses with literals sorted by code,
// the clause list itself sorted, flattened with 0 separators (codes are
// always >= 2). Lookup compares keys in full, so equality never depends on
// hash width.
using CacheKey = std::vector<std::uint32_t>;

struct CacheKeyHash {
  size_t operator()(const CacheKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint32_t v : k) {
      h ^= v;
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

inline CacheKey canonical_key(const CnfFormula& phi) {
  std::vector<std::vector<std::uint32_t>> cls;
  cls.reserve(phi.clauses().size());
  for (const Clause& c : phi.clauses()) {
    std::vector<std::uint32_t> k;
    k.reserve(c.size());
    for (Literal l : c) k.push_back(l.code());
    std::sort(k.begin(), k.end());
    cls.push_back(std::move(k));
  }
  std::sort(cls.begin(), cls.end());
  CacheKey key;
  for (const auto& c : cls) {
    key.insert(key.end(), c.begin(), c.end());
    key.push_back(0);
  }
  return key;
}

template <class Emitter>
class SearchEngine {
 public:
  using Value = typename Emitter::Value;

  SearchEngine(const CnfFormula& root, const CompilerConfig& cfg, Emitter& em)
      : root_(&root), em_(em) {
    ctx_.cfg = cfg;
    ctx_.root_non_unit_vars = non_unit_var_count(root);
    if (!root.is_constant()) {
      MinfillResult mf = minfill_order(root);
      ctx_.static_order = std::move(mf.order);
      ctx_.minfill_width = mf.width;
    }
    switch (cfg.order_mode) {
      case OrderMode::Minfill:
        ctx_.use_dlcp = false;
        break;
      case OrderMode::Dlcp:
        ctx_.use_dlcp = true;
        break;
      case OrderMode::Auto: {
        unsigned crossover =
            std::min(128u, ctx_.root_non_unit_vars / std::max(1u, cfg.crossover_divisor));
        ctx_.use_dlcp = ctx_.minfill_width > crossover;
        break;
      }
    }
    ctx_.pre_kernel_pending = cfg.kernelization_enabled && cfg.pre_kernelize;
  }

  Value run() { return search(*root_, PathStats{}); }

 private:
  Value search(CnfFormula phi, PathStats path) {
    if (phi.is_false()) return em_.false_();
    if (phi.is_true()) return em_.true_();
    PropagationResult prop = bcp(phi, std::span<const Literal>{});
    if (prop.status == PropStatus::Conflict) return em_.false_();
    std::vector<Literal> units = std::move(prop.implied);
    CnfFormula work = units.empty() ? std::move(phi) : condition(phi, units);
    path.units += static_cast<unsigned>(units.size());

    Value inner;
    if (work.is_true()) {
      inner = em_.true_();
    } else {
      CacheKey key = canonical_key(work);
      auto hit = cache_.find(key);
      if (hit != cache_.end()) {
        inner = hit->second;
      } else {
        inner = expand(std::move(work), path);
        cache_.emplace(std::move(key), inner);
      }
    }
    return units.empty() ? inner : em_.apply_units(units, inner);
  }

  Value expand(CnfFormula work, PathStats path) {
    ctx_.path = path;
    bool attempt_kernel = should_kernelize(ctx_, work);
    ctx_.pre_kernel_pending = false;  // the root pass happens at most once
    if (attempt_kernel) {
      LitEquDetection det = detect_lit_equ(work);
      if (det.unsat) return em_.false_();
      std::vector<Literal> forced = std::move(det.forced);
      path.units += static_cast<unsigned>(forced.size());
      std::vector<std::pair<Var, Literal>> equs = det.system.prime();
      Value inner;
      if (det.simplified.is_true()) {
        inner = em_.true_();
      } else if (!equs.empty()) {
        KernelizationResult kr = construct_core(det.simplified, equs);
        // Path counters restart below a kernelized node.
        Value core = search(std::move(kr.core), PathStats{});
        inner = em_.kernelized(core, kr.equivalences);
      } else {
        inner = split(std::move(det.simplified), path);
      }
      return forced.empty() ? inner : em_.apply_units(forced, inner);
    }
    return split(std::move(work), path);
  }

  Value split(CnfFormula work, PathStats path) {
    std::vector<CnfFormula> comps = decompose(work);
    if (comps.size() > 1) {
      std::vector<Value> parts;
      parts.reserve(comps.size());
      for (CnfFormula& c : comps) parts.push_back(search(std::move(c), path));
      return em_.decomposed(parts);
    }
    Var x = pick_good_var(ctx_, work);
    ++path.decisions;
    Literal nx(x, false), px(x, true);
    Value lo = search(condition(work, std::span<const Literal>(&nx, 1)), path);
    Value hi = search(condition(work, std::span<const Literal>(&px, 1)), path);
    return em_.decision(x, lo, hi);
  }

  const CnfFormula* root_;
  Emitter& em_;
  CompileContext ctx_;
  std::unordered_map<CacheKey, Value, CacheKeyHash> cache_;
};

}  // namespace detail

/// Emits diagram nodes along the search trace. Implied units become
/// decision nodes with a false branch, so the leaves stay plain true/false.
struct DiagramEmitter {
  using Value = NodeId;

  Diagram& diagram;
  std::uint64_t budget;
  std::uint64_t used = 0;

  void charge(std::uint64_t edges) {
    used += edges;
    if (used > budget) throw ResourceLimitError("node budget exceeded");
  }

  Value false_() { return diagram.make_node(false_node()); }
  Value true_() { return diagram.make_node(true_node()); }
  Value decision(Var x, Value lo, Value hi) {
    charge(2);
    return diagram.make_node(decision_node(x, lo, hi));
  }
  Value decomposed(std::span<const Value> parts) {
    charge(parts.size());
    return diagram.make_node(decomposed_node({parts.begin(), parts.end()}));
  }
  Value kernelized(Value core, std::span<const std::pair<Var, Literal>> equs) {
    charge(1 + equs.size());
    std::vector<NodeId> eq_nodes;
    eq_nodes.reserve(equs.size());
    for (const auto& [x, l] : equs) eq_nodes.push_back(diagram.make_node(equivalence_node(x, l)));
    return diagram.make_node(kernelized_node(core, std::move(eq_nodes)));
  }
  Value apply_units(std::span<const Literal> units, Value v) {
    for (auto it = units.rbegin(); it != units.rend(); ++it)
      v = it->positive() ? decision(it->var(), false_(), v) : decision(it->var(), v, false_());
    return v;
  }
};

/// Compiles phi into an equivalent CCDD.
inline Diagram compile(const CnfFormula& phi, const CompilerConfig& cfg = {}) {
  Diagram d(phi.num_vars());
  DiagramEmitter em{d, cfg.node_budget};
  detail::SearchEngine<DiagramEmitter> engine(phi, cfg, em);
  d.set_root(engine.run());
  return d;
}

}  // namespace ccdd
