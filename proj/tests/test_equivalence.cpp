#include "ccdd/equivalence.hpp"

#include <random>

#include "catch2/catch_amalgamated.hpp"
#include "ccdd/oracle.hpp"
#include "helpers.hpp"

using namespace ccdd;
using namespace ccdd::testing;

namespace {

using Pair = std::pair<Var, Literal>;

std::vector<Pair> pairs(std::initializer_list<std::pair<int, int>> ps) {
  std::vector<Pair> out;
  for (auto [x, l] : ps) out.emplace_back(static_cast<Var>(x), Literal::from_dimacs(l));
  return out;
}

// A copy of f with each (x, l) pair conjoined as two binary clauses.
CnfFormula conjoin_equivalences(CnfFormula f, std::span<const Pair> equs) {
  for (const auto& [x, l] : equs) {
    f.add_clause({Literal(x, false), l});
    f.add_clause({Literal(x, true), l.negated()});
  }
  return f;
}

}  // namespace

TEST_CASE("detect_lit_equ finds a binary-clause equivalence") {
  CnfFormula f = make_cnf(2, {{-1, 2}, {1, -2}});
  LitEquDetection det = detect_lit_equ(f);
  REQUIRE_FALSE(det.unsat);
  REQUIRE(det.forced.empty());
  REQUIRE(det.system.prime() == pairs({{1, 2}}));
}

TEST_CASE("detect_lit_equ finds nothing in a plain clause") {
  CnfFormula f = make_cnf(2, {{1, 2}});
  LitEquDetection det = detect_lit_equ(f);
  REQUIRE_FALSE(det.system.nontrivial());
  REQUIRE(det.forced.empty());
}

TEST_CASE("detect_lit_equ recovers the showcase prime equivalences") {
  LitEquDetection det = detect_lit_equ(equivalence_showcase_cnf());
  REQUIRE_FALSE(det.unsat);
  REQUIRE(det.system.prime() == pairs({{1, -3}, {1, 4}, {2, 6}}));
}

TEST_CASE("detect_lit_equ separates forced literals from equivalences") {
  // x1 is unit; x2 <-> x3 remains as the only equivalence.
  CnfFormula f = make_cnf(3, {{1}, {-2, 3}, {2, -3}});
  LitEquDetection det = detect_lit_equ(f);
  REQUIRE(det.forced == std::vector<Literal>{Literal(1, true)});
  REQUIRE(det.system.prime() == pairs({{2, 3}}));
  REQUIRE(det.simplified.variables() == std::vector<Var>{2, 3});
}

TEST_CASE("detect_lit_equ flags an unsatisfiable input") {
  CnfFormula f = make_cnf(2, {{1}, {-1}});
  REQUIRE(detect_lit_equ(f).unsat);
  // Both probes of x1 conflict: (x1 -> x2, x1 -> ~x2, ~x1 -> x2, ~x1 -> ~x2).
  CnfFormula g = make_cnf(2, {{-1, 2}, {-1, -2}, {1, 2}, {1, -2}});
  REQUIRE(detect_lit_equ(g).unsat);
}

TEST_CASE("prime keys classes by their minimum variable") {
  EquivalenceSystem sys(7);
  sys.merge(Literal(1, false), Literal(3, true));
  sys.merge(Literal(4, false), Literal(3, true));
  sys.merge(Literal(2, false), Literal(6, false));
  sys.merge(Literal(5, true), Literal(5, true));
  REQUIRE(sys.prime() == pairs({{1, -3}, {1, 4}, {2, 6}}));
}

TEST_CASE("prime of the empty system is empty") {
  REQUIRE(EquivalenceSystem(4).prime().empty());
}

TEST_CASE("prime orients a single pair by the minimum variable") {
  EquivalenceSystem sys(2);
  sys.merge(Literal(2, true), Literal(1, true));
  REQUIRE(sys.prime() == pairs({{1, 2}}));
}

TEST_CASE("prime raises on a contradictory system") {
  EquivalenceSystem sys(2);
  sys.merge(Literal(1, true), Literal(2, true));
  REQUIRE_FALSE(sys.merge(Literal(1, true), Literal(2, false)));
  REQUIRE(sys.contradiction());
  REQUIRE_THROWS_AS(sys.prime(), std::logic_error);
}

TEST_CASE("union-find mirrors negations", "[property]") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    EquivalenceSystem sys(10);
    for (int m = 0; m < 12; ++m) {
      Literal a(1 + rng() % 10, rng() % 2 == 0);
      Literal b(1 + rng() % 10, rng() % 2 == 0);
      if (a.var() == b.var()) continue;
      if (!sys.merge(a, b)) break;
      for (Var v = 1; v <= 10; ++v) {
        Literal pos(v, true);
        REQUIRE(sys.find(pos.negated()) == sys.find(pos).negated());
      }
    }
  }
}

TEST_CASE("prime is idempotent under re-merging", "[property]") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    EquivalenceSystem sys(8);
    for (int m = 0; m < 6; ++m) {
      Literal a(1 + rng() % 8, rng() % 2 == 0);
      Literal b(1 + rng() % 8, rng() % 2 == 0);
      if (a.var() != b.var()) sys.merge(a, b);
      if (sys.contradiction()) break;
    }
    if (sys.contradiction()) continue;
    auto p1 = sys.prime();
    EquivalenceSystem again(8);
    for (const auto& [x, l] : p1) again.merge(Literal(x, true), l);
    REQUIRE(again.prime() == p1);
  }
}

TEST_CASE("construct_core substitutes the showcase formula down to (x1 v x7)") {
  auto equs = pairs({{1, -3}, {1, 4}, {2, 6}});
  KernelizationResult kr = construct_core(equivalence_showcase_cnf(), equs);
  REQUIRE(kr.core.clauses().size() == 1);
  REQUIRE(kr.core.clauses()[0] == cl({1, 7}));
  REQUIRE(kr.equivalences == equs);
}

TEST_CASE("construct_core with no equivalences just normalizes") {
  CnfFormula f = make_cnf(3, {{1, 2}, {2, 1}, {1, 2, 3}});
  KernelizationResult kr = construct_core(f, {});
  // (x2 v x1) duplicates (x1 v x2) set-wise; (x1 v x2 v x3) survives.
  REQUIRE(kr.core.clauses().size() == 2);
  REQUIRE(kr.core.clauses()[0] == cl({1, 2}));
}

TEST_CASE("construct_core reduces the xor chain to its parity core") {
  auto equs = pairs({{1, -4}, {2, -5}});
  KernelizationResult kr = construct_core(xor_chain_cnf(), equs);
  REQUIRE(kr.core.variables() == std::vector<Var>{1, 2, 3});
  // Odd parity of three variables: 4 models over {1,2,3}.
  std::vector<Var> scope{1, 2, 3};
  REQUIRE(brute_count(kr.core, scope) == 4);
}

TEST_CASE("construct_core keeps units while shortening other clauses") {
  CnfFormula f = make_cnf(3, {{1}, {-1, 2, 3}, {1, 3}});
  KernelizationResult kr = construct_core(f, {});
  REQUIRE(kr.core.clauses().size() == 2);
  REQUIRE(kr.core.clauses()[0] == cl({1}));
  REQUIRE(kr.core.clauses()[1] == cl({2, 3}));
}

TEST_CASE("kernelization preserves semantics and scales the count", "[property]") {
  std::mt19937_64 rng(3141);
  int kernels_seen = 0;
  for (int trial = 0; trial < 120; ++trial) {
    CnfFormula f = random_cnf(rng, 8, 14, 1, 3);
    if (f.is_constant()) continue;
    LitEquDetection det = detect_lit_equ(f);
    if (det.unsat) {
      REQUIRE(brute_count(f) == 0);
      continue;
    }
    auto equs = det.system.prime();
    if (equs.empty()) continue;
    ++kernels_seen;
    KernelizationResult kr = construct_core(det.simplified, equs);

    // Semantic preservation: simplified == core & equivalences.
    CnfFormula rebuilt = conjoin_equivalences(kr.core, equs);
    REQUIRE(brute_models(det.simplified) == brute_models(rebuilt));

    // Count scaling: the core has 2^{|equs|} times as many models.
    BigInt core_count = brute_count(kr.core);
    BigInt phi_count = brute_count(det.simplified);
    REQUIRE(core_count == phi_count << static_cast<unsigned>(equs.size()));
  }
  REQUIRE(kernels_seen > 5);
}

TEST_CASE("showcase count scaling over the full scope") {
  CnfFormula f = equivalence_showcase_cnf();
  auto equs = detect_lit_equ(f).system.prime();
  KernelizationResult kr = construct_core(f, equs);
  // Core (x1 v x7) over 7 vars: 96 models; divided by 2^3 equivalences: 12.
  REQUIRE(brute_count(kr.core) == 96);
  REQUIRE(brute_count(f) == 12);
}
