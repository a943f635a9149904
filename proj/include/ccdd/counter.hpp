#pragma once

// Exact model counting, two ways: a single bottom-up pass over a compiled
// diagram, and a search-based counter that runs the compiler's skeleton
// while emitting counts instead of nodes. Counts are carried as
// mantissa * 2^exp2 so the halvings along the recursion stay exact; every
// finished count is an integer and materializes exactly.

#include <boost/multiprecision/cpp_int.hpp>
#include <span>
#include <string>
#include <vector>

#include "ccdd/compiler.hpp"
#include "ccdd/diagram.hpp"

namespace ccdd {

using BigInt = boost::multiprecision::cpp_int;

/// Nonnegative integer of the form mantissa * 2^exp2, normalized so the
/// mantissa is odd or zero. scope_size records |X| of the counting scope.
class ModelCount {
 public:
  ModelCount() = default;
  ModelCount(BigInt mantissa, long exp2, unsigned scope_size)
      : mantissa_(std::move(mantissa)), exp2_(exp2), scope_size_(scope_size) {
    if (mantissa_ < 0) throw InvariantError("negative model count");
    normalize();
  }

  static ModelCount zero(unsigned scope_size) { return ModelCount(0, 0, scope_size); }
  static ModelCount power_of_two(long e, unsigned scope_size) {
    return ModelCount(1, e, scope_size);
  }
  static ModelCount from_integer(BigInt v, unsigned scope_size) {
    return ModelCount(std::move(v), 0, scope_size);
  }

  const BigInt& mantissa() const { return mantissa_; }
  long exp2() const { return exp2_; }
  unsigned scope_size() const { return scope_size_; }
  bool is_zero() const { return mantissa_ == 0; }

  ModelCount plus(const ModelCount& o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    long e = std::min(exp2_, o.exp2_);
    BigInt m = (mantissa_ << static_cast<unsigned>(exp2_ - e)) +
               (o.mantissa_ << static_cast<unsigned>(o.exp2_ - e));
    return ModelCount(std::move(m), e, scope_size_);
  }
  ModelCount times(const ModelCount& o) const {
    return ModelCount(mantissa_ * o.mantissa_, exp2_ + o.exp2_, scope_size_);
  }
  // Division by 2^k is an exponent decrement; exact by construction.
  ModelCount div_pow2(long k) const { return ModelCount(mantissa_, exp2_ - k, scope_size_); }

  /// Exact integer value; a negative exponent here means some halving was
  /// inexact, which signals a structural bug.
  BigInt value() const {
    if (is_zero()) return 0;
    if (exp2_ < 0) throw InvariantError("negative exp2 at finalization");
    return mantissa_ << static_cast<unsigned>(exp2_);
  }

  // Value identity; scope_size is metadata and not compared.
  bool operator==(const ModelCount& o) const {
    return mantissa_ == o.mantissa_ && (is_zero() || exp2_ == o.exp2_);
  }

 private:
  void normalize() {
    if (mantissa_ == 0) {
      exp2_ = 0;
      return;
    }
    unsigned tz = boost::multiprecision::lsb(mantissa_);
    if (tz > 0) {
      mantissa_ >>= tz;
      exp2_ += static_cast<long>(tz);
    }
  }

  BigInt mantissa_ = 0;
  long exp2_ = 0;
  unsigned scope_size_ = 0;
};

/// Exact decimal rendering of a finalized count.
inline std::string materialize(const ModelCount& mc) { return mc.value().str(); }

/// Model counts over a fixed X for every node reachable from the root.
struct CountAnnotation {
  std::vector<ModelCount> counts;
  std::vector<char> computed;
  unsigned scope_size = 0;

  const ModelCount& at(NodeId id) const {
    if (id >= computed.size() || !computed[id])
      throw std::invalid_argument("node has no count annotation");
    return counts[id];
  }
};

/// One bottom-up pass: false -> 0, true -> 2^|X|, an equivalence ->
/// 2^(|X|-1), a decision averages its children, a decomposed conjunction
/// multiplies and strips the (k-1)-fold overcount of X, a kernelized
/// conjunction halves the core once per equivalence.
inline CountAnnotation ct(const Diagram& d, std::span<const Var> x) {
  std::vector<Var> scope(x.begin(), x.end());
  std::sort(scope.begin(), scope.end());
  scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
  for (Var v : d.vars_of(d.root()))
    if (!std::binary_search(scope.begin(), scope.end(), v))
      throw std::invalid_argument("counting scope does not cover Vars(root)");

  unsigned n = static_cast<unsigned>(scope.size());
  CountAnnotation ann{std::vector<ModelCount>(d.node_count()),
                      std::vector<char>(d.node_count(), 0), n};
  for (NodeId id : detail::reachable_from_root(d)) {
    const Node& node = d.node(id);
    ModelCount value;
    switch (node.kind) {
      case NodeKind::False:
        value = ModelCount::zero(n);
        break;
      case NodeKind::True:
        value = ModelCount::power_of_two(n, n);
        break;
      case NodeKind::Equivalence:
        value = ModelCount::power_of_two(static_cast<long>(n) - 1, n);
        break;
      case NodeKind::Decision:
        value = ann.counts[node.children[0]].plus(ann.counts[node.children[1]]).div_pow2(1);
        break;
      case NodeKind::DecomposedAnd: {
        value = ann.counts[node.children[0]];
        for (size_t i = 1; i < node.children.size(); ++i)
          value = value.times(ann.counts[node.children[i]]);
        value = value.div_pow2(static_cast<long>(node.children.size() - 1) * n);
        break;
      }
      case NodeKind::KernelizedAnd:
        value = ann.counts[node.children[0]].div_pow2(
            static_cast<long>(node.children.size()) - 1);
        break;
    }
    if (!value.is_zero() && value.exp2() < 0)
      throw InvariantError("inexact division in count annotation");
    ann.counts[id] = std::move(value);
    ann.computed[id] = 1;
  }
  return ann;
}

inline CountAnnotation ct(const Diagram& d) {
  std::vector<Var> all(d.num_vars());
  for (Var v = 1; v <= d.num_vars(); ++v) all[v - 1] = v;
  return ct(d, all);
}

/// Emits counts along the search trace: the counting twin of
/// DiagramEmitter, with one halving per implied unit.
struct CountEmitter {
  using Value = ModelCount;

  unsigned scope_size;
  std::uint64_t budget;
  std::uint64_t used = 0;

  void charge(std::uint64_t steps) {
    used += steps;
    if (used > budget) throw ResourceLimitError("node budget exceeded");
  }

  Value false_() { return ModelCount::zero(scope_size); }
  Value true_() { return ModelCount::power_of_two(scope_size, scope_size); }
  Value decision(Var, const Value& lo, const Value& hi) {
    charge(2);
    return lo.plus(hi).div_pow2(1);
  }
  Value decomposed(std::span<const Value> parts) {
    charge(parts.size());
    Value v = parts[0];
    for (size_t i = 1; i < parts.size(); ++i) v = v.times(parts[i]);
    return v.div_pow2(static_cast<long>(parts.size() - 1) * scope_size);
  }
  Value kernelized(const Value& core, std::span<const std::pair<Var, Literal>> equs) {
    charge(1 + equs.size());
    return core.div_pow2(static_cast<long>(equs.size()));
  }
  Value apply_units(std::span<const Literal> units, const Value& v) {
    charge(2 * units.size());
    return v.div_pow2(static_cast<long>(units.size()));
  }
};

/// Default configuration for counting runs: same as compilation except for
/// the minfill/DLCP crossover divisor.
inline CompilerConfig counting_config() {
  CompilerConfig cfg;
  cfg.crossover_divisor = 7;
  return cfg;
}

/// Search-based exact model count of phi over X = {1..num_vars}. No
/// diagram is materialized; the trace is counted directly.
inline ModelCount exact_mc(const CnfFormula& phi, const CompilerConfig& cfg = counting_config()) {
  CountEmitter em{phi.num_vars(), cfg.node_budget, 0};
  detail::SearchEngine<CountEmitter> engine(phi, cfg, em);
  return engine.run();
}

}  // namespace ccdd
