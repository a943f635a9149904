#pragma once

// Hash-consed CCDD node store. Nodes are false/true leaves, literal
// equivalences <x <-> l>, binary decisions, decomposed conjunctions (no
// shared variables between conjuncts) and kernelized conjunctions (a core
// child plus a prime system of equivalence children whose right-side
// variables do not occur in the core).

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ccdd/formula.hpp"

namespace ccdd {

using NodeId = std::uint32_t;

enum class NodeKind : unsigned char {
  False,
  True,
  Equivalence,
  Decision,
  DecomposedAnd,
  KernelizedAnd,
};

struct Node {
  NodeKind kind = NodeKind::False;
  Var var = 0;    // Decision variable, or the left side of an Equivalence
  Literal lit{};  // right side of an Equivalence
  std::vector<NodeId> children;  // Decision: {lo, hi}; KernelizedAnd: core first

  bool operator==(const Node&) const = default;
};

inline Node false_node() { return Node{NodeKind::False, 0, {}, {}}; }
inline Node true_node() { return Node{NodeKind::True, 0, {}, {}}; }
inline Node equivalence_node(Var x, Literal l) { return Node{NodeKind::Equivalence, x, l, {}}; }
inline Node decision_node(Var x, NodeId lo, NodeId hi) {
  return Node{NodeKind::Decision, x, {}, {lo, hi}};
}
inline Node decomposed_node(std::vector<NodeId> children) {
  return Node{NodeKind::DecomposedAnd, 0, {}, std::move(children)};
}
inline Node kernelized_node(NodeId core, std::vector<NodeId> equivalences) {
  std::vector<NodeId> ch;
  ch.reserve(equivalences.size() + 1);
  ch.push_back(core);
  ch.insert(ch.end(), equivalences.begin(), equivalences.end());
  return Node{NodeKind::KernelizedAnd, 0, {}, std::move(ch)};
}

struct NodeHash {
  size_t operator()(const Node& n) const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
      h ^= v;
      h *= 1099511628211ull;
    };
    mix(static_cast<std::uint64_t>(n.kind));
    mix(n.var);
    mix(n.lit.code());
    for (NodeId c : n.children) mix(c);
    return static_cast<size_t>(h);
  }
};

struct DiagramStats {
  std::uint64_t nodes = 0;
  std::uint64_t edges = 0;
  std::uint64_t kernelized_node_count = 0;
  std::uint64_t decision_count = 0;
  std::uint64_t max_depth = 0;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Append-only node table with structural hash-consing. Children always
/// have smaller ids than their parents, so one ascending pass visits the
/// DAG bottom-up. After construction the diagram is immutable and safe for
/// concurrent read-only traversals.
class Diagram {
 public:
  explicit Diagram(Var num_vars) : num_vars_(num_vars) {}

  Var num_vars() const { return num_vars_; }
  std::size_t node_count() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_[id]; }
  std::span<const Var> vars_of(NodeId id) const { return var_sets_[id]; }

  bool has_root() const { return root_.has_value(); }
  NodeId root() const {
    if (!root_) throw InvariantError("diagram has no root");
    return *root_;
  }
  void set_root(NodeId id) {
    if (id >= nodes_.size()) throw InvariantError("root id out of range");
    root_ = id;
  }

  /// Returns the existing id on a structural hit, otherwise appends.
  /// Canonicalizes (equivalence orientation, conjunct order) and enforces
  /// the local construction invariants; Decision with lo == hi collapses
  /// to the child.
  NodeId make_node(Node spec) {
    switch (spec.kind) {
      case NodeKind::False:
      case NodeKind::True:
        spec.var = 0;
        spec.lit = Literal{};
        spec.children.clear();
        break;
      case NodeKind::Equivalence: {
        check_var(spec.var);
        check_var(spec.lit.var());
        if (spec.lit.var() == spec.var)
          throw InvariantError("equivalence over a single variable");
        if (spec.lit.var() < spec.var) {
          // Canonical orientation: smaller variable on the left.
          Literal flipped(spec.var, spec.lit.positive());
          spec.var = spec.lit.var();
          spec.lit = flipped;
        }
        spec.children.clear();
        break;
      }
      case NodeKind::Decision: {
        check_var(spec.var);
        if (spec.children.size() != 2) throw InvariantError("decision needs lo and hi children");
        check_children(spec.children);
        if (spec.children[0] == spec.children[1]) return spec.children[0];
        break;
      }
      case NodeKind::DecomposedAnd: {
        if (spec.children.size() < 2)
          throw InvariantError("decomposed conjunction needs at least 2 children");
        check_children(spec.children);
        std::sort(spec.children.begin(), spec.children.end());
        check_disjoint(spec.children);
        break;
      }
      case NodeKind::KernelizedAnd: {
        if (spec.children.size() < 2)
          throw InvariantError("kernelized conjunction needs a core and at least one equivalence");
        check_children(spec.children);
        std::sort(spec.children.begin() + 1, spec.children.end(), [this](NodeId a, NodeId b) {
          const Node& na = nodes_[a];
          const Node& nb = nodes_[b];
          return std::pair(na.var, na.lit.var()) < std::pair(nb.var, nb.lit.var());
        });
        if (auto why = kernelized_violation(spec)) throw InvariantError(*why);
        break;
      }
    }
    auto it = unique_.find(spec);
    if (it != unique_.end()) return it->second;
    return append(std::move(spec));
  }

  friend Diagram deserialize(std::istream& in);

 private:
  void check_var(Var v) const {
    if (v < 1 || v > num_vars_)
      throw InvariantError("variable out of range: x" + std::to_string(v));
  }
  void check_children(const std::vector<NodeId>& ch) const {
    for (NodeId c : ch)
      if (c >= nodes_.size()) throw InvariantError("child id not in diagram");
  }
  void check_disjoint(const std::vector<NodeId>& ch) const {
    std::vector<Var> all;
    for (NodeId c : ch) all.insert(all.end(), var_sets_[c].begin(), var_sets_[c].end());
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
      throw InvariantError("decomposed conjunction children share a variable");
  }

  // nullopt when the kernelized shape holds: children after the core are
  // equivalences forming a prime system whose right sides avoid the core.
  std::optional<std::string> kernelized_violation(const Node& spec) const {
    std::span<const Var> core_vars = var_sets_[spec.children[0]];
    std::vector<char> left(num_vars_ + 1, 0), right(num_vars_ + 1, 0);
    for (size_t i = 1; i < spec.children.size(); ++i) {
      const Node& e = nodes_[spec.children[i]];
      if (e.kind != NodeKind::Equivalence) return "kernelized child is not an equivalence";
      if (e.var >= e.lit.var()) return "equivalence left side is not the class minimum";
      if (right[e.lit.var()]) return "variable is the right side of two equivalences";
      right[e.lit.var()] = 1;
      left[e.var] = 1;
    }
    for (Var v = 1; v <= num_vars_; ++v)
      if (left[v] && right[v]) return "prime system mixes a variable as left and right side";
    for (Var v : core_vars)
      if (right[v]) return "right-side variable occurs in the core";
    return std::nullopt;
  }

  std::vector<Var> compute_var_set(const Node& n) const {
    std::vector<Var> vs;
    switch (n.kind) {
      case NodeKind::False:
      case NodeKind::True:
        break;
      case NodeKind::Equivalence:
        vs = {n.var, n.lit.var()};
        std::sort(vs.begin(), vs.end());
        break;
      case NodeKind::Decision:
        vs.push_back(n.var);
        [[fallthrough]];
      case NodeKind::DecomposedAnd:
      case NodeKind::KernelizedAnd:
        for (NodeId c : n.children) vs.insert(vs.end(), var_sets_[c].begin(), var_sets_[c].end());
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        break;
    }
    return vs;
  }

  NodeId append(Node n) {
    NodeId id = static_cast<NodeId>(nodes_.size());
    var_sets_.push_back(compute_var_set(n));
    unique_.emplace(n, id);
    nodes_.push_back(std::move(n));
    return id;
  }

  Var num_vars_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::vector<Var>> var_sets_;
  std::unordered_map<Node, NodeId, NodeHash> unique_;
  std::optional<NodeId> root_;
};

namespace detail {

inline std::vector<NodeId> reachable_from_root(const Diagram& d) {
  std::vector<char> mark(d.node_count(), 0);
  std::vector<NodeId> stack{d.root()};
  mark[d.root()] = 1;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (NodeId c : d.node(u).children)
      if (!mark[c]) {
        mark[c] = 1;
        stack.push_back(c);
      }
  }
  std::vector<NodeId> out;
  for (NodeId i = 0; i < d.node_count(); ++i)
    if (mark[i]) out.push_back(i);
  return out;  // ascending, so children precede parents
}

}  // namespace detail

/// Full structural check: per-node shape, conjunct disjointness, prime
/// kernelized systems, and the path-level read-once rule for decision
/// nodes. Violations are returned as data, not thrown.
inline ValidationReport validate(const Diagram& d) {
  ValidationReport report;
  auto bad = [&](NodeId id, const std::string& what) {
    report.violations.push_back("node " + std::to_string(id) + ": " + what);
  };
  if (!d.has_root()) {
    report.violations.push_back("diagram has no root");
    return report;
  }
  std::vector<NodeId> order = detail::reachable_from_root(d);
  // Decision variables occurring anywhere below each node, for read-once.
  std::vector<std::vector<Var>> dec_below(d.node_count());
  for (NodeId id : order) {
    const Node& n = d.node(id);
    for (NodeId c : n.children)
      if (c >= id) bad(id, "child id not below parent");
    switch (n.kind) {
      case NodeKind::False:
      case NodeKind::True:
        if (!n.children.empty()) bad(id, "leaf with children");
        break;
      case NodeKind::Equivalence:
        if (n.var < 1 || n.var > d.num_vars() || n.lit.var() < 1 || n.lit.var() > d.num_vars())
          bad(id, "variable out of range");
        else if (n.var == n.lit.var())
          bad(id, "equivalence over a single variable");
        break;
      case NodeKind::Decision: {
        if (n.var < 1 || n.var > d.num_vars()) bad(id, "variable out of range");
        if (n.children.size() != 2) {
          bad(id, "decision without exactly lo and hi");
          break;
        }
        std::vector<Var> below;
        for (NodeId c : n.children)
          below.insert(below.end(), dec_below[c].begin(), dec_below[c].end());
        std::sort(below.begin(), below.end());
        below.erase(std::unique(below.begin(), below.end()), below.end());
        if (std::binary_search(below.begin(), below.end(), n.var))
          bad(id, "read-once violated: decision on x" + std::to_string(n.var) +
                      " repeated below");
        below.insert(std::lower_bound(below.begin(), below.end(), n.var), n.var);
        dec_below[id] = std::move(below);
        break;
      }
      case NodeKind::DecomposedAnd: {
        if (n.children.size() < 2) bad(id, "decomposed conjunction with fewer than 2 children");
        std::vector<Var> all;
        std::size_t total = 0;
        for (NodeId c : n.children) {
          auto vs = d.vars_of(c);
          total += vs.size();
          all.insert(all.end(), vs.begin(), vs.end());
        }
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        if (all.size() != total) bad(id, "decomposed conjunction children share variables");
        break;
      }
      case NodeKind::KernelizedAnd: {
        if (n.children.size() < 2) {
          bad(id, "kernelized conjunction without equivalences");
          break;
        }
        std::vector<char> left(d.num_vars() + 1, 0), right(d.num_vars() + 1, 0);
        for (size_t i = 1; i < n.children.size(); ++i) {
          const Node& e = d.node(n.children[i]);
          if (e.kind != NodeKind::Equivalence) {
            bad(id, "kernelized child is not an equivalence");
            continue;
          }
          if (e.var >= e.lit.var()) bad(id, "equivalence left side is not the class minimum");
          if (right[e.lit.var()]) bad(id, "variable is the right side of two equivalences");
          right[e.lit.var()] = 1;
          left[e.var] = 1;
        }
        for (Var v = 1; v <= d.num_vars(); ++v)
          if (left[v] && right[v]) bad(id, "prime system mixes a variable as left and right side");
        for (Var v : d.vars_of(n.children[0]))
          if (v <= d.num_vars() && right[v]) bad(id, "right-side variable occurs in the core");
        break;
      }
    }
    if (dec_below[id].empty() && !n.children.empty()) {
      std::vector<Var> below;
      for (NodeId c : n.children)
        below.insert(below.end(), dec_below[c].begin(), dec_below[c].end());
      std::sort(below.begin(), below.end());
      below.erase(std::unique(below.begin(), below.end()), below.end());
      dec_below[id] = std::move(below);
    }
  }
  return report;
}

/// Recursive evaluation: decisions select a child by the assigned value,
/// conjunctions require all children, an equivalence holds iff both sides
/// agree. omega must be total over the node's variables.
inline bool evaluate(const Diagram& d, NodeId u, const Assignment& omega) {
  std::vector<signed char> memo(d.node_count(), -1);
  std::vector<NodeId> stack{u};
  while (!stack.empty()) {
    NodeId id = stack.back();
    const Node& n = d.node(id);
    if (memo[id] >= 0) {
      stack.pop_back();
      continue;
    }
    switch (n.kind) {
      case NodeKind::False:
        memo[id] = 0;
        break;
      case NodeKind::True:
        memo[id] = 1;
        break;
      case NodeKind::Equivalence:
        memo[id] = (omega.value(n.var) == omega.satisfies(n.lit)) ? 1 : 0;
        break;
      case NodeKind::Decision: {
        NodeId c = omega.value(n.var) ? n.children[1] : n.children[0];
        if (memo[c] < 0) {
          stack.push_back(c);
          continue;
        }
        memo[id] = memo[c];
        break;
      }
      case NodeKind::DecomposedAnd:
      case NodeKind::KernelizedAnd: {
        bool pending = false;
        signed char result = 1;
        for (NodeId c : n.children) {
          if (memo[c] < 0) {
            stack.push_back(c);
            pending = true;
            break;
          }
          if (memo[c] == 0) result = 0;
        }
        if (pending) continue;
        memo[id] = result;
        break;
      }
    }
    stack.pop_back();
  }
  return memo[u] == 1;
}

/// Text form, one node per line; ids are 0-based line order after the
/// header and the root is the last node. Only nodes reachable from the
/// root are written.
inline std::string serialize(const Diagram& d) {
  std::vector<NodeId> order = detail::reachable_from_root(d);
  std::vector<NodeId> renum(d.node_count(), 0);
  for (size_t i = 0; i < order.size(); ++i) renum[order[i]] = static_cast<NodeId>(i);
  std::ostringstream out;
  out << "ccdd " << d.num_vars() << " " << order.size() << "\n";
  for (NodeId id : order) {
    const Node& n = d.node(id);
    switch (n.kind) {
      case NodeKind::False:
        out << "F";
        break;
      case NodeKind::True:
        out << "T";
        break;
      case NodeKind::Equivalence:
        out << "E " << n.var << " " << n.lit.dimacs();
        break;
      case NodeKind::Decision:
        out << "D " << n.var << " " << renum[n.children[0]] << " " << renum[n.children[1]];
        break;
      case NodeKind::DecomposedAnd:
      case NodeKind::KernelizedAnd:
        out << (n.kind == NodeKind::DecomposedAnd ? "A " : "K ") << n.children.size();
        for (NodeId c : n.children) out << " " << renum[c];
        break;
    }
    out << "\n";
  }
  return out.str();
}

/// Reads the text form back. Node lines are taken verbatim (no
/// re-canonicalization), forward references are rejected, and the result
/// is re-validated; any violation is reported as a parse error.
inline Diagram deserialize(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty diagram file");
  std::istringstream hs(line);
  std::string magic;
  long nv = -1, nn = -1;
  hs >> magic >> nv >> nn;
  if (magic != "ccdd" || nv < 0 || nn < 0 || hs.fail())
    throw ParseError("malformed diagram header: " + line);
  Diagram d(static_cast<Var>(nv));
  for (long i = 0; i < nn; ++i) {
    if (!std::getline(in, line)) throw ParseError("diagram file truncated");
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    Node n;
    auto read_child = [&]() {
      long c = -1;
      ls >> c;
      if (ls.fail() || c < 0 || c >= i)
        throw ParseError("bad child reference on line " + std::to_string(i + 2));
      return static_cast<NodeId>(c);
    };
    if (tag == "F") {
      n = false_node();
    } else if (tag == "T") {
      n = true_node();
    } else if (tag == "E") {
      long x = 0, l = 0;
      ls >> x >> l;
      if (ls.fail() || x < 1 || l == 0) throw ParseError("malformed equivalence line: " + line);
      n = equivalence_node(static_cast<Var>(x), Literal::from_dimacs(static_cast<int>(l)));
    } else if (tag == "D") {
      long x = 0;
      ls >> x;
      if (ls.fail() || x < 1) throw ParseError("malformed decision line: " + line);
      n.kind = NodeKind::Decision;
      n.var = static_cast<Var>(x);
      n.children = {read_child(), read_child()};
    } else if (tag == "A" || tag == "K") {
      long k = 0;
      ls >> k;
      if (ls.fail() || k < 2) throw ParseError("malformed conjunction line: " + line);
      n.kind = tag == "A" ? NodeKind::DecomposedAnd : NodeKind::KernelizedAnd;
      for (long j = 0; j < k; ++j) n.children.push_back(read_child());
    } else {
      throw ParseError("unknown node tag: " + line);
    }
    std::string rest;
    if (ls >> rest) throw ParseError("trailing data on node line: " + line);
    d.var_sets_.push_back(d.compute_var_set(n));
    d.unique_.emplace(n, static_cast<NodeId>(d.nodes_.size()));
    d.nodes_.push_back(std::move(n));
  }
  if (d.node_count() == 0) throw ParseError("diagram has no nodes");
  d.set_root(static_cast<NodeId>(d.node_count() - 1));
  ValidationReport report = validate(d);
  if (!report.ok()) throw ParseError("invalid diagram: " + report.violations.front());
  return d;
}

inline Diagram deserialize(std::string_view text) {
  std::istringstream in{std::string(text)};
  return deserialize(in);
}

inline bool structurally_equal(const Diagram& a, const Diagram& b) {
  return serialize(a) == serialize(b);
}

/// Counts over the nodes reachable from the root; edges is the total
/// number of child references, depth the longest root-to-leaf path.
inline DiagramStats stats(const Diagram& d) {
  DiagramStats s;
  std::vector<NodeId> order = detail::reachable_from_root(d);
  std::vector<std::uint64_t> depth(d.node_count(), 0);
  for (NodeId id : order) {
    const Node& n = d.node(id);
    ++s.nodes;
    s.edges += n.children.size();
    if (n.kind == NodeKind::KernelizedAnd) ++s.kernelized_node_count;
    if (n.kind == NodeKind::Decision) ++s.decision_count;
    for (NodeId c : n.children) depth[id] = std::max(depth[id], depth[c] + 1);
    s.max_depth = std::max(s.max_depth, depth[id]);
  }
  return s;
}

/// Graphviz export: box leaves, labeled internal nodes, dashed edges for
/// decision lo-children.
inline std::string to_dot(const Diagram& d) {
  std::ostringstream out;
  out << "digraph ccdd {\n";
  for (NodeId id : detail::reachable_from_root(d)) {
    const Node& n = d.node(id);
    out << "  n" << id << " [label=\"";
    switch (n.kind) {
      case NodeKind::False:
        out << "\\u22a5";
        break;
      case NodeKind::True:
        out << "\\u22a4";
        break;
      case NodeKind::Equivalence:
        out << "x" << n.var << "\\u2194" << (n.lit.positive() ? "" : "\\u00ac") << "x"
            << n.lit.var();
        break;
      case NodeKind::Decision:
        out << "x" << n.var;
        break;
      case NodeKind::DecomposedAnd:
        out << "\\u2227d";
        break;
      case NodeKind::KernelizedAnd:
        out << "\\u2227k";
        break;
    }
    out << "\"";
    if (n.kind == NodeKind::False || n.kind == NodeKind::True) out << ", shape=box";
    out << "];\n";
    for (size_t i = 0; i < n.children.size(); ++i) {
      out << "  n" << id << " -> n" << n.children[i];
      if (n.kind == NodeKind::Decision && i == 0) out << " [style=dashed]";
      out << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace ccdd
