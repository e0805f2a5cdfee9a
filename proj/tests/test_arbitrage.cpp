#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gen.hpp"
#include "rfm/arbitrage.hpp"

using namespace rfm;

namespace {

// Re-verify a present verdict by arithmetic: payoff >= 0 on scope (or >= 1
// for the uniform notions) and strictly positive on the recorded strict set.
void check_witness(const Market& m, const LevelSetPartition& part,
                   const ArbitrageVerdict& v, const PathSet& scope,
                   bool uniform) {
  REQUIRE(v.present);
  REQUIRE(v.witness);
  PayoffVector pay = payoff(m, part, *v.witness);
  for (std::size_t p : scope)
    CHECK(pay[p] >= (uniform ? Rat(1) : Rat(0)));
  for (std::size_t p : v.witness_strict) CHECK(pay[p] > Rat(0));
}

}  // namespace

TEST_CASE("uniform and strong detection on the binomial fixture") {
  Market m = gen::load_market("fix-binom.json");
  LevelSetPartition part = validate(m);

  ArbitrageVerdict both = detect_usa(m, part, all_paths(m));
  CHECK_FALSE(both.present);
  REQUIRE_FALSE(both.absence_certificates.empty());
  CHECK(both.absence_certificates[0].status == LpStatus::Infeasible);

  ArbitrageVerdict up = detect_usa(m, part, PathSet{0});
  check_witness(m, part, up, PathSet{0}, true);

  ArbitrageVerdict sa = detect_sa(m, part, all_paths(m));
  CHECK(sa.notion == "SA");
  CHECK_FALSE(sa.present);
  CHECK(detect_sa(m, part, PathSet{0}).present);

  Market gap = gen::load_market("fix-gap.json");
  LevelSetPartition gpart = validate(gap);
  CHECK_FALSE(detect_usa(gap, gpart, all_paths(gap)).present);
  CHECK_THROWS_AS(detect_usa(gap, gpart, PathSet{}), ArbitrageError);
}

TEST_CASE("one-point and open-set detection") {
  Market m = gen::load_market("fix-binom.json");
  LevelSetPartition part = validate(m);
  CHECK_FALSE(detect_1pa(m, part, all_paths(m)).present);

  Market gap = gen::load_market("fix-gap.json");
  LevelSetPartition gpart = validate(gap);
  CHECK_FALSE(detect_1pa(gap, gpart, all_paths(gap)).present);

  // Appending S1 = 5/2 keeps zero interior to the increment hull.
  Market wide = m;
  wide.paths.push_back({"C", {{Rat(1)}, {Rat(5, 2)}}});
  LevelSetPartition wpart = validate(wide);
  CHECK_FALSE(detect_1pa(wide, wpart, all_paths(wide)).present);

  // Dropping the downward path leaves only positive increments.
  ArbitrageVerdict v = detect_1pa(wide, wpart, PathSet{0, 2});
  check_witness(wide, wpart, v, PathSet{0, 2}, false);
  CHECK(v.witness_strict == PathSet{0, 2});

  ArbitrageVerdict oa = detect_oa(wide, wpart, PathSet{0, 2});
  CHECK(oa.notion == "OA");
  CHECK(oa.present);
}

TEST_CASE("class-set detection") {
  Market gap = gen::load_market("fix-gap.json");
  LevelSetPartition gpart = validate(gap);

  // Singleton classes reproduce the one-point scan.
  ClassSVerdict singles =
      detect_class_s(gap, gpart, all_paths(gap), {{0}, {1}, {2}});
  CHECK_FALSE(singles.any_present);
  CHECK(singles.per_gamma.size() == 3);
  for (const auto& g : singles.per_gamma)
    CHECK(g.absence_certificates[0].status == LpStatus::Infeasible);

  // The martingale measure q=(1/4,1/2,1/4) charges the 0-path.
  CHECK_FALSE(detect_class_s(gap, gpart, all_paths(gap), {{0}}).any_present);

  // Three-point market with S1 in {2, 1/2, 3}: zero interior, so no class
  // arbitrage even against the appended path.
  Market wide = gen::load_market("fix-binom.json");
  wide.paths.push_back({"C", {{Rat(1)}, {Rat(3)}}});
  LevelSetPartition wpart = validate(wide);
  CHECK_FALSE(detect_class_s(wide, wpart, all_paths(wide), {{2}}).any_present);

  CHECK_THROWS_WITH_AS(detect_class_s(gap, gpart, PathSet{0, 1}, {{2}}),
                       doctest::Contains("GammaNotInScope"), ArbitrageError);
  CHECK_THROWS_AS(detect_class_s(gap, gpart, all_paths(gap), {PathSet{}}),
                  ArbitrageError);
}

TEST_CASE("quasi-sure detection") {
  Market gap = gen::load_market("fix-gap.json");
  LevelSetPartition gpart = validate(gap);

  ArbitrageVerdict v =
      detect_quasi_sure(gap, gpart, gen::load_priors("pf-gap-12.json", gap, gpart));
  CHECK(v.notion == "A_P");
  check_witness(gap, gpart, v, PathSet{1, 2}, false);
  REQUIRE(v.witness_generator);
  // The supporting measure charges the strict set.
  Rat strict_mass;
  for (std::size_t p : v.witness_strict) strict_mass += v.witness_generator->w[p];
  CHECK(strict_mass > Rat(0));

  CHECK_FALSE(
      detect_quasi_sure(gap, gpart,
                        gen::load_priors("pf-gap-full.json", gap, gpart))
          .present);

  // Support reduced to the single zero-increment path: nothing to exploit.
  CHECK_FALSE(
      detect_quasi_sure(gap, gpart, priors_from_scenarios(gap, gpart, {1}))
          .present);
}

TEST_CASE("weak and classical detection") {
  Market gap = gen::load_market("fix-gap.json");
  LevelSetPartition gpart = validate(gap);

  {  // Two generators: one sees {1,2} only (arbitrageable), one sees all.
    PriorSet pr;
    pr.gens = {{{{Rat(0), Rat(1, 2), Rat(1, 2)},
                 {Rat(1, 3), Rat(1, 3), Rat(1, 3)}}}};
    WeakClassicalReport rep = detect_weak_and_classical(gap, gpart, pr);
    CHECK(rep.weak.present);
    CHECK_FALSE(rep.classical.present);
    REQUIRE(rep.per_measure.size() == 2);
    int present = 0;
    for (const auto& [P, v] : rep.per_measure) present += v.present ? 1 : 0;
    CHECK(present == 1);
  }
  {  // Single full-support measure on the binomial: nothing anywhere.
    Market bin = gen::load_market("fix-binom.json");
    LevelSetPartition bpart = validate(bin);
    PriorSet pr;
    pr.gens = {{{{Rat(1, 2), Rat(1, 2)}}}};
    WeakClassicalReport rep = detect_weak_and_classical(bin, bpart, pr);
    CHECK_FALSE(rep.weak.present);
    CHECK_FALSE(rep.classical.present);
  }
  {  // Every generator charges only the upward binomial path.
    Market bin = gen::load_market("fix-binom.json");
    LevelSetPartition bpart = validate(bin);
    WeakClassicalReport rep = detect_weak_and_classical(
        bin, bpart, priors_from_scenarios(bin, bpart, {0}));
    CHECK(rep.weak.present);
    CHECK(rep.classical.present);
  }
}

TEST_CASE("local one-step detection") {
  Market bin = gen::load_market("fix-binom.json");
  LevelSetPartition bpart = validate(bin);
  CHECK_FALSE(detect_local(bin, bpart,
                           priors_from_scenarios(bin, bpart, all_paths(bin)),
                           0, 0)
                  .present);

  Market gap = gen::load_market("fix-gap.json");
  LevelSetPartition gpart = validate(gap);
  ArbitrageVerdict v = detect_local(
      gap, gpart, gen::load_priors("pf-gap-12.json", gap, gpart), 0, 0);
  check_witness(gap, gpart, v, PathSet{1, 2}, false);

  // Single supported successor with zero increment.
  CHECK_FALSE(
      detect_local(gap, gpart, priors_from_scenarios(gap, gpart, {1}), 0, 0)
          .present);

  CHECK_THROWS_WITH_AS(
      detect_local(gap, gpart, priors_from_scenarios(gap, gpart, {1}), 2, 0),
      doctest::Contains("NodeNotFound"), ArbitrageError);
}

TEST_CASE("shift-robust detection") {
  SUBCASE("worthless call above the support") {
    Market m = gen::load_market("fix-inta.json");
    LevelSetPartition part = validate(m);
    PriorSet pr = gen::load_priors("pf-inta.json", m, part);
    CHECK_FALSE(detect_quasi_sure(m, part, pr).present);
    IntAVerdict v = detect_int_arbitrage(m, part, pr);
    CHECK(v.verdict.present);
    // The option is worthless on the support, so holding it long (the
    // paper's direction) or short both monetize the shift; the scan
    // reports the first direction it finds.
    bool one_sided = v.verdict.sign_pattern == std::vector<int>{1} ||
                     v.verdict.sign_pattern == std::vector<int>{-1};
    CHECK(one_sided);
    for (const auto& [eps, feas] : v.schedule) CHECK(feas);
    // The witness survives every scheduled shift: payoff plus eps times the
    // signed static position is positive on the whole support.
    REQUIRE(v.verdict.witness);
    PayoffVector pay = payoff(m, part, *v.verdict.witness);
    Rat g;
    for (std::size_t l = 0; l < m.num_options(); ++l)
      g += Rat(v.verdict.sign_pattern[l]) * v.verdict.witness->h[l];
    for (const auto& [eps, feas] : v.schedule) {
      bool strict = false;
      for (std::size_t p = 0; p < m.num_paths(); ++p) {
        Rat shifted = pay[p] + eps * g;
        CHECK(shifted >= Rat(0));
        if (shifted > Rat(0)) strict = true;
      }
      CHECK(strict);
    }
  }
  SUBCASE("no options: coincides with quasi-sure detection") {
    Market gap = gen::load_market("fix-gap.json");
    LevelSetPartition gpart = validate(gap);
    CHECK(detect_int_arbitrage(
              gap, gpart, gen::load_priors("pf-gap-12.json", gap, gpart))
              .verdict.present);
    CHECK_FALSE(detect_int_arbitrage(
                    gap, gpart, gen::load_priors("pf-gap-full.json", gap, gpart))
                    .verdict.present);
  }
  SUBCASE("replicable option at its unique fair price is shift-fragile") {
    // In the complete binomial market the call's no-arbitrage price region
    // is the single point 1/3, so its price is not strictly interior and a
    // shift in either direction is exploitable: h=1, H=-2/3 turns every
    // upward shift into a sure profit.
    Market m = gen::load_market("fix-binom.json");
    m.options.push_back({"call-at-third", {Rat(2, 3), Rat(-1, 3)}});
    LevelSetPartition part = validate(m);
    PriorSet pr = priors_from_scenarios(m, part, all_paths(m));
    CHECK_FALSE(detect_quasi_sure(m, part, pr).present);
    IntAVerdict v = detect_int_arbitrage(m, part, pr);
    CHECK(v.verdict.present);
    // Both directions are exploitable; the scan reports the first.
    bool one_sided = v.verdict.sign_pattern == std::vector<int>{1} ||
                     v.verdict.sign_pattern == std::vector<int>{-1};
    CHECK(one_sided);
  }
  SUBCASE("option count bound") {
    Market m = gen::load_market("fix-binom.json");
    for (int l = 0; l < 13; ++l)
      m.options.push_back({"o" + std::to_string(l), {Rat(0), Rat(0)}});
    LevelSetPartition part = validate(m);
    PriorSet pr = priors_from_scenarios(m, part, all_paths(m));
    CHECK_THROWS_WITH_AS(detect_int_arbitrage(m, part, pr),
                         doctest::Contains("TooManyOptions"), ArbitrageError);
  }
}

TEST_CASE("relations report on the fixtures") {
  {
    Market bin = gen::load_market("fix-binom.json");
    LevelSetPartition bpart = validate(bin);
    RelationsReport rep = lemma_relations_check(
        bin, bpart, gen::load_priors("pf-omega.json", bin, bpart), {});
    CHECK(rep.ok);
    CHECK(rep.violations.empty());
  }
  {
    Market gap = gen::load_market("fix-gap.json");
    LevelSetPartition gpart = validate(gap);
    RelationsReport rep = lemma_relations_check(
        gap, gpart, gen::load_priors("pf-gap-12.json", gap, gpart), {});
    CHECK(rep.ok);
    bool ap = false, loc = false;
    for (const auto& [name, present] : rep.verdicts) {
      if (name == "A_P") ap = present;
      if (name == "locA-some-node") loc = present;
    }
    CHECK(ap);
    CHECK(loc);
  }
  {
    Market m = gen::load_market("fix-inta.json");
    LevelSetPartition part = validate(m);
    RelationsReport rep = lemma_relations_check(
        m, part, gen::load_priors("pf-inta.json", m, part), {});
    CHECK(rep.ok);
    bool inta = false, ap = true;
    for (const auto& [name, present] : rep.verdicts) {
      if (name == "IntA") inta = present;
      if (name == "A_P") ap = present;
    }
    CHECK(inta);
    CHECK_FALSE(ap);
  }
}

TEST_CASE("implication chain on 500 randomized instances") {
  gen::Rng rng(271828);
  int ap_present = 0, ap_absent = 0;
  for (int iter = 0; iter < 500; ++iter) {
    Market m;
    PriorSet pr;
    LevelSetPartition part;
    if (iter % 3 == 0) {
      m = gen::balanced_market(rng);
      part = validate(m);
      pr = gen::random_priors(rng, m, part, 2);
    } else if (iter % 3 == 1) {
      // Large trees with a single generator per node: one product measure.
      m = gen::random_market(rng, 3, 3, 30, 2);
      part = validate(m);
      pr = gen::random_priors(rng, m, part, 1);
    } else {
      m = gen::random_market(rng, 2, 2, 10, 2);
      part = validate(m);
      pr = gen::random_priors(rng, m, part, 2);
    }
    QuasiSureSupport qs = quasi_sure_support(m, part, pr);
    std::vector<PathSet> cs;
    if (qs.omega.size() > 1 && rng.chance(0.5)) cs.push_back({qs.omega[0]});

    RelationsReport rep = lemma_relations_check(m, part, pr, cs);
    CHECK(rep.ok);
    if (!rep.ok)
      for (const auto& viol : rep.violations) MESSAGE(viol);
    for (const auto& [name, present] : rep.verdicts)
      if (name == "A_P") (present ? ap_present : ap_absent)++;
  }
  // Both regimes occur in force.
  CHECK(ap_present > 50);
  CHECK(ap_absent > 50);
}

TEST_CASE("witnesses and certificates re-verify on randomized instances") {
  gen::Rng rng(5551212);
  for (int iter = 0; iter < 120; ++iter) {
    Market m = iter % 2 == 0 ? gen::balanced_market(rng)
                             : gen::random_market(rng, 2, 2, 12, 2);
    LevelSetPartition part = validate(m);
    PathSet scope = gen::random_scope(rng, m);

    ArbitrageVerdict usa = detect_usa(m, part, scope);
    if (usa.present) check_witness(m, part, usa, scope, true);

    ArbitrageVerdict one = detect_1pa(m, part, scope);
    if (one.present) {
      check_witness(m, part, one, scope, false);
      CHECK_FALSE(one.witness_strict.empty());
    }
    // Absence of one-point arbitrage is exactly scope-wide efficiency.
    EfficientSet es = omega_star_oracle(m, part, scope);
    CHECK(one.present == !es.removed.empty());
  }
}
