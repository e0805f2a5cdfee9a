#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "gen.hpp"
#include "rfm/efficient_set.hpp"

using namespace rfm;

namespace {

// One-period market with the given scalar increments from S0 = 0.
Market one_step(const std::vector<Rat>& increments) {
  Market m;
  m.T = 1;
  m.d = 1;
  for (std::size_t i = 0; i < increments.size(); ++i)
    m.paths.push_back({"p" + std::to_string(i), {{Rat(0)}, {increments[i]}}});
  return m;
}

Market one_step2(const std::vector<RatVec>& increments) {
  Market m;
  m.T = 1;
  m.d = 2;
  for (std::size_t i = 0; i < increments.size(); ++i)
    m.paths.push_back({"p" + std::to_string(i),
                       {{Rat(0), Rat(0)},
                        {increments[i][0], increments[i][1]}}});
  return m;
}

}  // namespace

TEST_CASE("oracle on the bundled one-period fixtures") {
  Market bin = gen::load_market("fix-binom.json");
  LevelSetPartition bpart = validate(bin);
  EfficientSet es = omega_star_oracle(bin, bpart, all_paths(bin));
  CHECK(es.retained == all_paths(bin));
  CHECK(es.removed.empty());
  // Stored witnesses are calibrated martingale measures charging their path.
  for (const auto& [p, q] : es.witness) {
    CHECK(q.w[p].sign() > 0);
    CHECK(is_martingale_measure(bin, bpart, q, all_paths(bin)).ok);
  }

  Market gap = gen::load_market("fix-gap.json");
  LevelSetPartition gpart = validate(gap);
  EfficientSet ges = omega_star_oracle(gap, gpart, all_paths(gap));
  CHECK(ges.retained == all_paths(gap));

  // A single upward path supports no martingale measure.
  EfficientSet only_up = omega_star_oracle(bin, bpart, PathSet{0});
  CHECK(only_up.retained.empty());
  CHECK(only_up.removed == PathSet{0});
  CHECK_THROWS_AS(omega_star_oracle(bin, bpart, PathSet{}), MarketError);
}

TEST_CASE("node separator hand cases") {
  SUBCASE("zero interior: increments 1 and -1/2") {
    Market m = one_step({Rat(1), Rat(-1, 2)});
    LevelSetPartition part = validate(m);
    Separator sep = node_separator(m, successors(m, all_paths(m), 0));
    CHECK(sep.strict.empty());
    CHECK(sep.null == std::vector<std::size_t>{0, 1});
  }
  SUBCASE("increments 0 and 1") {
    Market m = one_step({Rat(0), Rat(1)});
    LevelSetPartition part = validate(m);
    Separator sep = node_separator(m, successors(m, all_paths(m), 0));
    CHECK(sep.strict == std::vector<std::size_t>{1});
    CHECK(sep.null == std::vector<std::size_t>{0});
    CHECK(sep.xi[0].sign() > 0);
  }
  SUBCASE("orthogonal increments in two assets") {
    Market m = one_step2({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}});
    LevelSetPartition part = validate(m);
    Separator sep = node_separator(m, successors(m, all_paths(m), 0));
    CHECK(sep.strict == std::vector<std::size_t>{0, 1});
    CHECK(sep.null.empty());
  }
}

TEST_CASE("aggregator fixpoint hand cases") {
  SUBCASE("gap fixture: nothing removed") {
    Market m = gen::load_market("fix-gap.json");
    LevelSetPartition part = validate(m);
    EfficientSet es = aggregator_fixpoint(m, part, all_paths(m));
    CHECK(es.retained == all_paths(m));
  }
  SUBCASE("upward node removal cascades to the root sweep") {
    Market m;
    m.T = 2;
    m.d = 1;
    m.paths = {{"a", {{Rat(1)}, {Rat(2)}, {Rat(3)}}},
               {"b", {{Rat(1)}, {Rat(2)}, {Rat(4)}}},
               {"c", {{Rat(1)}, {Rat(1)}, {Rat(0)}}},
               {"d", {{Rat(1)}, {Rat(1)}, {Rat(2)}}},
               {"e", {{Rat(1)}, {Rat(1)}, {Rat(1)}}}};
    LevelSetPartition part = validate(m);
    EfficientSet es = aggregator_fixpoint(m, part, all_paths(m));
    // The S1=2 node has only upward continuations; dropping them leaves the
    // root with the single zero increment to S1=1, which cannot be separated.
    CHECK(es.retained == PathSet{2, 3, 4});
    CHECK(es.removed == PathSet{0, 1});
    CHECK(es.removal_reason.count(0) == 1);
  }
  SUBCASE("single constant path is retained") {
    Market m = one_step({Rat(0)});
    LevelSetPartition part = validate(m);
    CHECK(aggregator_fixpoint(m, part, all_paths(m)).retained == PathSet{0});
  }
}

TEST_CASE("partition scheme hand cases") {
  Market m = gen::load_market("fix-binom.json");

  SUBCASE("no options: zero steps, fixpoint returned") {
    LevelSetPartition part = validate(m);
    PartitionScheme sch = partition_scheme(m, part, all_paths(m));
    CHECK(sch.steps.empty());
    CHECK(sch.final_set == all_paths(m));
  }
  SUBCASE("overpriced call empties the efficient set") {
    m.options.push_back({"call-at-1", {Rat(0), Rat(-1)}});  // (S1-1)^+ - 1
    LevelSetPartition part = validate(m);
    PartitionScheme sch = partition_scheme(m, part, all_paths(m));
    CHECK(sch.final_set.empty());
    SchemeReport rep = verify_scheme(m, part, all_paths(m));
    CHECK(rep.match);
    CHECK(rep.oracle.retained.empty());
  }
  SUBCASE("fairly priced call keeps both paths") {
    m.options.push_back({"call-at-third", {Rat(2, 3), Rat(-1, 3)}});
    LevelSetPartition part = validate(m);
    SchemeReport rep = verify_scheme(m, part, all_paths(m));
    CHECK(rep.match);
    CHECK(rep.scheme.final_set == all_paths(m));
  }
}

TEST_CASE("separator soundness and interior characterization, randomized") {
  gen::Rng rng(311);
  int nonempty_strict = 0;
  for (int iter = 0; iter < 120; ++iter) {
    Market m = gen::random_market(rng, 2, 2, 12, 0);
    LevelSetPartition part = validate(m);
    for (std::size_t t = 0; t < m.T; ++t)
      for (const auto& node : part.levels[t]) {
        auto succ = successors(m, node, t);
        Separator sep = node_separator(m, succ);
        // xi . dS >= 0 everywhere, zero exactly on the null set.
        for (std::size_t v : sep.strict) CHECK(dot(sep.xi, succ[v].dS) > Rat(0));
        for (std::size_t v : sep.null) CHECK(dot(sep.xi, succ[v].dS) == Rat(0));
        nonempty_strict += sep.strict.empty() ? 0 : 1;

        // Strict set empty iff zero is in the relative interior of the
        // increment hull (homogeneous all-charged system feasible).
        LinearProgram lp = LinearProgram::minimize(RatVec(succ.size()));
        lp.nonnegative();
        for (std::size_t i = 0; i < m.d; ++i) {
          RatVec row(succ.size());
          for (std::size_t v = 0; v < succ.size(); ++v) row[v] = succ[v].dS[i];
          lp.add(row, Rel::Eq, Rat(0));
        }
        for (std::size_t v = 0; v < succ.size(); ++v) lp.set_lower(v, Rat(1));
        bool interior = solve_checked(lp).status == LpStatus::Optimal;
        CHECK(interior == sep.strict.empty());
      }
  }
  CHECK(nonempty_strict > 20);
}

TEST_CASE("oracle properties: idempotence, monotonicity, witnesses") {
  gen::Rng rng(424242);
  for (int iter = 0; iter < 60; ++iter) {
    Market m = gen::random_market(rng, 3, 2, 18, 2);
    LevelSetPartition part = validate(m);
    PathSet scope = gen::random_scope(rng, m);
    EfficientSet es = omega_star_oracle(m, part, scope);

    if (!es.retained.empty()) {
      EfficientSet again = omega_star_oracle(m, part, es.retained);
      CHECK(again.retained == es.retained);
    }
    for (const auto& [p, q] : es.witness) {
      CHECK(q.w[p].sign() > 0);
      CHECK(is_martingale_measure(m, part, q, scope).ok);
    }
    // Monotonicity under scope growth.
    EfficientSet full = omega_star_oracle(m, part, all_paths(m));
    CHECK(set_minus(es.retained, full.retained).empty());
  }
}

TEST_CASE("oracle equals partition scheme on 300 randomized instances") {
  gen::Rng rng(1789);
  int mismatches = 0, nontrivial = 0;
  for (int iter = 0; iter < 300; ++iter) {
    Market m = gen::random_market(rng, 3, 2, 25, 2);
    LevelSetPartition part = validate(m);
    SchemeReport rep = verify_scheme(m, part, all_paths(m));
    if (!rep.match) ++mismatches;
    if (!rep.oracle.removed.empty()) ++nontrivial;
  }
  CHECK(mismatches == 0);
  CHECK(nontrivial > 30);
}

TEST_CASE("fixpoint is invariant under path relabeling") {
  gen::Rng rng(99);
  for (int iter = 0; iter < 40; ++iter) {
    Market m = gen::random_market(rng, 3, 2, 15, 0);
    LevelSetPartition part = validate(m);
    PathSet base = aggregator_fixpoint(m, part, all_paths(m)).retained;

    // Reverse the path order; node and sweep orders change with it.
    Market rev = m;
    std::reverse(rev.paths.begin(), rev.paths.end());
    LevelSetPartition rpart = validate(rev);
    PathSet got = aggregator_fixpoint(rev, rpart, all_paths(rev)).retained;
    PathSet mapped;
    for (std::size_t p : got) mapped.push_back(m.num_paths() - 1 - p);
    std::sort(mapped.begin(), mapped.end());
    CHECK(mapped == base);
  }
}
