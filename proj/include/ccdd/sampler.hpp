#pragma once

// Uniform sampling over a count-annotated diagram. A top-down pass draws
// one Bernoulli per decision with the exact probability CT(hi)/CT(u),
// copies equivalence values alongside the core of a kernelized node, and
// fills leftover variables with fair bits. All randomness flows through
// exact integer comparisons; no floating point is involved anywhere.

#include <random>
#include <span>
#include <vector>

#include "ccdd/counter.hpp"
#include "ccdd/diagram.hpp"

namespace ccdd {

/// Deterministic bit source over std::mt19937_64: bits are consumed from
/// each 64-bit word least-significant first.
class BitStream {
 public:
  explicit BitStream(std::uint64_t seed) : gen_(seed) {}

  bool next_bit() {
    if (left_ == 0) {
      word_ = gen_();
      left_ = 64;
    }
    bool b = word_ & 1u;
    word_ >>= 1;
    --left_;
    return b;
  }

 private:
  std::mt19937_64 gen_;
  std::uint64_t word_ = 0;
  int left_ = 0;
};

/// True with probability exactly num/den: draws a uniform integer in
/// [0, den) by rejection over bit_length(den-1) bits (first bit drawn is
/// the most significant) and compares against num. The degenerate cases
/// num == 0 and num == den consume no randomness.
template <class Bits>
bool exact_bernoulli(Bits& bits, const BigInt& num, const BigInt& den) {
  if (den <= 0) throw std::invalid_argument("bernoulli denominator must be positive");
  if (num < 0 || num > den) throw std::invalid_argument("bernoulli numerator out of range");
  if (num == 0) return false;
  if (num == den) return true;
  unsigned k = boost::multiprecision::msb(BigInt(den - 1)) + 1;
  for (;;) {
    BigInt value = 0;
    for (unsigned i = 0; i < k; ++i) {
      value <<= 1;
      if (bits.next_bit()) value |= 1;
    }
    if (value < den) return value < num;
  }
}

template <class Bits>
bool exact_bernoulli(Bits& bits, const ModelCount& num, const ModelCount& den) {
  return exact_bernoulli(bits, num.value(), den.value());
}

namespace detail {

template <class Bits>
void sample_into(const Diagram& d, const CountAnnotation& counts, NodeId u, Assignment& omega,
                 Bits& bits) {
  const Node& n = d.node(u);
  switch (n.kind) {
    case NodeKind::False:
      throw InvariantError("sampled into an inconsistent node");
    case NodeKind::True:
      return;
    case NodeKind::Equivalence: {
      // Reached directly (not through a kernelized parent): a fair bit
      // decides the left side, the right literal follows it.
      bool b = bits.next_bit();
      omega.bind(n.var, b);
      omega.bind(n.lit.var(), b == n.lit.positive());
      return;
    }
    case NodeKind::Decision: {
      const ModelCount& lo = counts.at(n.children[0]);
      const ModelCount& hi = counts.at(n.children[1]);
      bool b = exact_bernoulli(bits, hi.value(), lo.value() + hi.value());
      omega.bind(n.var, b);
      sample_into(d, counts, n.children[b ? 1 : 0], omega, bits);
      return;
    }
    case NodeKind::DecomposedAnd:
      for (NodeId c : n.children) sample_into(d, counts, c, omega, bits);
      return;
    case NodeKind::KernelizedAnd: {
      sample_into(d, counts, n.children[0], omega, bits);
      for (size_t i = 1; i < n.children.size(); ++i) {
        const Node& e = d.node(n.children[i]);
        if (omega.bound(e.var))
          omega.bind(e.lit.var(), omega.value(e.var) == e.lit.positive());
        else
          sample_into(d, counts, n.children[i], omega, bits);
      }
      return;
    }
  }
}

}  // namespace detail

/// Partial assignment drawn from the sub-diagram at u, leaving don't-care
/// variables unbound. Requires CT(u) > 0.
template <class Bits>
Assignment sample_sub(const Diagram& d, const CountAnnotation& counts, NodeId u, Bits& bits) {
  if (counts.at(u).is_zero()) throw std::invalid_argument("cannot sample an inconsistent node");
  Assignment omega(d.num_vars());
  detail::sample_into(d, counts, u, omega, bits);
  return omega;
}

/// Sampling session: an annotated diagram, an explicit scope X (at least
/// Vars(root); commonly 1..num_vars of the source CNF) and a seeded
/// deterministic generator. Draws are i.i.d. uniform over the models.
class SamplerState {
 public:
  SamplerState(const Diagram& d, const CountAnnotation& counts, std::vector<Var> scope,
               std::uint64_t seed)
      : d_(&d), counts_(&counts), scope_(std::move(scope)), bits_(seed) {
    std::sort(scope_.begin(), scope_.end());
    scope_.erase(std::unique(scope_.begin(), scope_.end()), scope_.end());
    for (Var v : d.vars_of(d.root()))
      if (!std::binary_search(scope_.begin(), scope_.end(), v))
        throw std::invalid_argument("sampling scope does not cover Vars(root)");
  }

  SamplerState(const Diagram& d, const CountAnnotation& counts, std::uint64_t seed)
      : SamplerState(d, counts, all_vars(d), seed) {}

  const std::vector<Var>& scope() const { return scope_; }

  /// One uniform model, total over the scope: a diagram draw followed by a
  /// fair bit for every unbound variable in ascending order.
  Assignment sample() {
    Assignment omega = ccdd::sample_sub(*d_, *counts_, d_->root(), bits_);
    for (Var v : scope_)
      if (!omega.bound(v)) omega.bind(v, bits_.next_bit());
    return omega;
  }

  Assignment sample_sub(NodeId u) { return ccdd::sample_sub(*d_, *counts_, u, bits_); }

 private:
  static std::vector<Var> all_vars(const Diagram& d) {
    std::vector<Var> out(d.num_vars());
    for (Var v = 1; v <= d.num_vars(); ++v) out[v - 1] = v;
    return out;
  }

  const Diagram* d_;
  const CountAnnotation* counts_;
  std::vector<Var> scope_;
  BitStream bits_;
};

inline Assignment sample(SamplerState& st) { return st.sample(); }

/// One sample per line: signed DIMACS literals in ascending variable
/// order, LF-terminated.
inline std::string format_sample(const Assignment& omega, std::span<const Var> scope) {
  std::string line;
  for (size_t i = 0; i < scope.size(); ++i) {
    if (i) line += ' ';
    if (!omega.value(scope[i])) line += '-';
    line += std::to_string(scope[i]);
  }
  line += '\n';
  return line;
}

}  // namespace ccdd
