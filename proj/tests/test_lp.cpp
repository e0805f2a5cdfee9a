#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "rfm/lp.hpp"

using namespace rfm;

namespace {

// The two-state one-period calibration system has the unique solution
// q = (1/3, 2/3): from q1 + q2 = 1 and q1 - q2/2 = 0, q1 = 1/3. Frozen here
// as the hand-derived oracle for the dual examples below.
LinearProgram binomial_dual_lp() {
  LinearProgram lp = LinearProgram::maximize({Rat(1), Rat(0)});
  lp.add({Rat(1), Rat(1)}, Rel::Eq, Rat(1));        // normalization row
  lp.add({Rat(1), Rat(-1, 2)}, Rel::Eq, Rat(0));    // zero-drift row
  lp.nonnegative();
  return lp;
}

}  // namespace

TEST_CASE("identity case: minimize 0 over x >= 0") {
  LinearProgram lp = LinearProgram::minimize({Rat(0)});
  lp.nonnegative();
  LpOutcome out = solve_checked(lp);
  REQUIRE(out.status == LpStatus::Optimal);
  CHECK(*out.value == Rat(0));
  CHECK((*out.primal)[0] == Rat(0));
}

TEST_CASE("sign contradiction: x >= 1 and -x >= 0") {
  LinearProgram lp = LinearProgram::minimize({Rat(0)});
  lp.add({Rat(1)}, Rel::Ge, Rat(1));
  lp.add({Rat(-1)}, Rel::Ge, Rat(0));
  LpOutcome out = solve_checked(lp);
  REQUIRE(out.status == LpStatus::Infeasible);
  REQUIRE(out.certificate.has_value());
  // The certificate aggregates the rows to 0*x >= positive; both rows are
  // '>=' so both multipliers are nonnegative and proportional to (1,1).
  const RatVec& y = *out.certificate;
  REQUIRE(y.size() == 2);
  CHECK(y[0].sign() > 0);
  CHECK(y[0] == y[1]);
}

TEST_CASE("binomial dual: value 1/3 at (1/3, 2/3)") {
  LpOutcome out = solve_checked(binomial_dual_lp());
  REQUIRE(out.status == LpStatus::Optimal);
  CHECK(*out.value == Rat(1, 3));
  CHECK(*out.primal == RatVec{Rat(1, 3), Rat(2, 3)});
}

TEST_CASE("check_certificate round trip and tampering") {
  LinearProgram lp = binomial_dual_lp();
  LpOutcome out = solve(lp);
  REQUIRE(check_certificate(lp, out).pass);

  SUBCASE("flipped primal coordinate fails naming the normalization row") {
    LpOutcome bad = out;
    (*bad.primal)[0] = -(*bad.primal)[0];
    CheckReport rep = check_certificate(lp, bad);
    CHECK_FALSE(rep.pass);
    bool named = false;
    for (const auto& f : rep.failures)
      if (f.find("row 0") != std::string::npos) named = true;
    CHECK(named);
  }

  SUBCASE("negative multiplier on a >= row fails naming the sign condition") {
    LinearProgram infea = LinearProgram::minimize({Rat(0)});
    infea.add({Rat(1)}, Rel::Ge, Rat(1));
    infea.add({Rat(-1)}, Rel::Ge, Rat(0));
    LpOutcome o = solve(infea);
    REQUIRE(o.status == LpStatus::Infeasible);
    (*o.certificate)[1] = Rat(-1);
    CheckReport rep = check_certificate(infea, o);
    CHECK_FALSE(rep.pass);
    bool named = false;
    for (const auto& f : rep.failures)
      if (f.find("sign condition") != std::string::npos) named = true;
    CHECK(named);
  }
}

TEST_CASE("unbounded: ray certificate") {
  LinearProgram lp = LinearProgram::minimize({Rat(-1)});
  lp.nonnegative();
  LpOutcome out = solve_checked(lp);
  REQUIRE(out.status == LpStatus::Unbounded);
  CHECK((*out.certificate)[0].sign() > 0);

  LinearProgram mx = LinearProgram::maximize({Rat(1), Rat(1)});
  mx.add({Rat(1), Rat(-1)}, Rel::Le, Rat(0));
  mx.nonnegative();
  LpOutcome out2 = solve_checked(mx);
  CHECK(out2.status == LpStatus::Unbounded);
}

TEST_CASE("bounds handling") {
  SUBCASE("crossed bounds are infeasible with a two-line certificate") {
    LinearProgram lp = LinearProgram::minimize({Rat(0)});
    lp.set_lower(0, Rat(2));
    lp.set_upper(0, Rat(1));
    LpOutcome out = solve_checked(lp);
    CHECK(out.status == LpStatus::Infeasible);
  }
  SUBCASE("upper-bounded free-below variable") {
    LinearProgram lp = LinearProgram::minimize({Rat(1)});
    lp.set_upper(0, Rat(5));
    lp.add({Rat(1)}, Rel::Ge, Rat(-3));
    LpOutcome out = solve_checked(lp);
    REQUIRE(out.status == LpStatus::Optimal);
    CHECK(*out.value == Rat(-3));
  }
  SUBCASE("box with interior optimum on both bounds") {
    LinearProgram lp = LinearProgram::maximize({Rat(2), Rat(-1)});
    lp.set_lower(0, Rat(-1));
    lp.set_upper(0, Rat(4));
    lp.set_lower(1, Rat(1, 2));
    lp.set_upper(1, Rat(7));
    LpOutcome out = solve_checked(lp);
    REQUIRE(out.status == LpStatus::Optimal);
    CHECK(*out.value == Rat(8) - Rat(1, 2));
    CHECK(*out.primal == RatVec{Rat(4), Rat(1, 2)});
  }
}

TEST_CASE("malformed programs are rejected") {
  LinearProgram lp = LinearProgram::minimize({Rat(1), Rat(2)});
  lp.add({Rat(1)}, Rel::Le, Rat(0));  // width 1 vs 2
  CHECK_THROWS_AS(solve(lp), MalformedProgram);

  LinearProgram empty;
  empty.add({}, Rel::Le, Rat(1));
  CHECK_THROWS_AS(solve(empty), MalformedProgram);
}

TEST_CASE("determinism: identical inputs give identical outcomes") {
  LinearProgram lp = LinearProgram::maximize({Rat(3), Rat(1), Rat(-2)});
  lp.add({Rat(1), Rat(1), Rat(1)}, Rel::Le, Rat(10));
  lp.add({Rat(1), Rat(-1), Rat(0)}, Rel::Ge, Rat(-2));
  lp.add({Rat(0), Rat(1), Rat(2)}, Rel::Eq, Rat(3));
  lp.nonnegative();
  LpOutcome a = solve(lp), b = solve(lp);
  CHECK(a.status == b.status);
  CHECK(a.value == b.value);
  CHECK(a.primal == b.primal);
  CHECK(a.dual == b.dual);
  CHECK(a.certificate == b.certificate);
}

namespace {

LinearProgram random_lp(std::mt19937_64& rng, int max_m, int max_n,
                        bool force_boxed) {
  std::uniform_int_distribution<int> msz(0, max_m), nsz(1, max_n);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 9), coin(0, 1);
  std::uniform_int_distribution<int> relpick(0, 2), kind(0, 3);
  int n = nsz(rng), m = msz(rng);
  RatVec c(n);
  for (auto& x : c) x = Rat(num(rng), den(rng));
  LinearProgram lp = coin(rng) ? LinearProgram::minimize(c) : LinearProgram::maximize(c);
  for (int i = 0; i < m; ++i) {
    RatVec a(n);
    for (auto& x : a) x = Rat(num(rng), den(rng));
    Rel rel = relpick(rng) == 0 ? Rel::Le : relpick(rng) == 0 ? Rel::Eq : Rel::Ge;
    lp.add(a, rel, Rat(num(rng), den(rng)));
  }
  for (int j = 0; j < n; ++j) {
    int k = force_boxed ? 3 : kind(rng);
    if (k == 1 || k == 3) lp.set_lower(j, Rat(num(rng) - 2, den(rng)));
    if (k == 2 || k == 3) lp.set_upper(j, Rat(num(rng) + 2, den(rng)));
  }
  return lp;
}

// Independent oracle: enumerate all basic points (solutions of n active
// extended rows) of a boxed LP, keep the feasible ones, and take the best
// objective. Valid because a nonempty bounded polyhedron is the convex hull
// of its vertices and every vertex activates n rows.
struct VertexOracle {
  bool feasible = false;
  Rat best;
};

struct XRow {
  RatVec a;
  Rel rel;
  Rat b;
};

std::vector<XRow> all_rows(const LinearProgram& lp) {
  std::vector<XRow> rows;
  for (const auto& r : lp.rows) rows.push_back({r.a, r.rel, r.b});
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    RatVec e(lp.num_vars());
    e[j] = Rat(1);
    if (!lp.lo.empty() && lp.lo[j]) rows.push_back({e, Rel::Ge, *lp.lo[j]});
    if (!lp.hi.empty() && lp.hi[j]) rows.push_back({e, Rel::Le, *lp.hi[j]});
  }
  return rows;
}

bool solve_square(std::vector<RatVec> A, RatVec b, RatVec& x) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    while (p < n && A[p][col].sign() == 0) ++p;
    if (p == n) return false;  // singular
    std::swap(A[p], A[col]);
    std::swap(b[p], b[col]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || A[i][col].sign() == 0) continue;
      Rat f = A[i][col] / A[col][col];
      for (std::size_t j = col; j < n; ++j) A[i][j] -= f * A[col][j];
      b[i] -= f * b[col];
    }
  }
  x.resize(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
  return true;
}

VertexOracle vertex_enumerate(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars();
  auto rows = all_rows(lp);
  VertexOracle res;
  std::vector<std::size_t> pick(n, 0);
  // Enumerate n-subsets of rows via a simple odometer.
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (rows.size() < n) return res;
  for (;;) {
    std::vector<RatVec> A;
    RatVec b;
    for (std::size_t i : idx) A.push_back(rows[i].a), b.push_back(rows[i].b);
    RatVec x;
    if (solve_square(A, b, x)) {
      bool feas = true;
      for (const auto& r : rows) {
        Rat lhs = dot(r.a, x);
        bool ok = r.rel == Rel::Le ? lhs <= r.b : r.rel == Rel::Ge ? lhs >= r.b : lhs == r.b;
        if (!ok) { feas = false; break; }
      }
      if (feas) {
        Rat v = dot(lp.c, x);
        bool better = lp.sense == Sense::Min ? v < res.best : v > res.best;
        if (!res.feasible || better) res.best = v;
        res.feasible = true;
      }
    }
    // next combination
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (idx[i] + (n - i) < rows.size()) {
        ++idx[i];
        for (std::size_t j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
        break;
      }
      if (i == 0) return res;
    }
  }
}

}  // namespace

TEST_CASE("self-verification on 1000 randomized programs") {
  std::mt19937_64 rng(20240817);
  reset_solve_stats();
  int optimal = 0, infeasible = 0, unbounded = 0;
  for (int t = 0; t < 1000; ++t) {
    // Mostly small programs plus a tail of larger ones, up to 30x30.
    bool big = t % 25 == 0;
    LinearProgram lp = random_lp(rng, big ? 30 : 8, big ? 30 : 8, false);
    LpOutcome out = solve_checked(lp);  // throws if any certificate fails
    switch (out.status) {
      case LpStatus::Optimal: ++optimal; break;
      case LpStatus::Infeasible: ++infeasible; break;
      case LpStatus::Unbounded: ++unbounded; break;
    }
  }
  SolveStats st = solve_stats();
  CHECK(st.solves == 1000);
  CHECK(st.checks_passed == 1000);
  // The generator must exercise all three statuses.
  CHECK(optimal > 50);
  CHECK(infeasible > 50);
  CHECK(unbounded > 50);
}

TEST_CASE("oracle equivalence on boxed programs up to 6x6") {
  std::mt19937_64 rng(6021023);
  for (int t = 0; t < 150; ++t) {
    LinearProgram lp = random_lp(rng, t < 120 ? 4 : 6, t < 120 ? 4 : 6, true);
    VertexOracle oracle = vertex_enumerate(lp);
    LpOutcome out = solve_checked(lp);
    if (oracle.feasible) {
      REQUIRE(out.status == LpStatus::Optimal);  // boxed: never unbounded
      CHECK(*out.value == oracle.best);
    } else {
      CHECK(out.status == LpStatus::Infeasible);
    }
  }
}
