// End-to-end tests of the command-line tool: the binary is invoked as a
// subprocess and its stdout / exit code are checked. Covers the documented
// usage examples, output determinism, table mode, the error taxonomy, and
// the verify round trip.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

std::string fx(const std::string& name) {
  return std::string(RFM_FIXTURE_DIR) + "/" + name;
}

// Runs the CLI with the given arguments, capturing stdout (stderr is folded
// in so error-path tests can look at the message too).
RunResult run(const std::string& args) {
  std::string cmd = std::string(RFM_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

json run_json(const std::string& args, int expect_code = 0) {
  RunResult r = run(args);
  CAPTURE(r.out);
  CHECK(r.code == expect_code);
  return json::parse(r.out);
}

}  // namespace

TEST_CASE("price command: documented example") {
  RunResult r = run("price --market " + fx("fix-gap.json") + " --claim " +
                    fx("zero-indicator.json") + " --scope omega");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"price\": \"1/2\"") != std::string::npos);
  json rep = json::parse(r.out);
  CHECK(rep["gap"] == "0");
  CHECK(rep["dual_measure"]["s0"] == "1/2");
  CHECK(rep["dual_measure"]["s2"] == "1/2");
  CHECK(rep["strategy"]["H"][0][0]["H"][0] == "-1/2");
}

TEST_CASE("price command: quasi-sure scope needs priors, then prices lower") {
  RunResult bad = run("price --market " + fx("fix-gap.json") + " --claim " +
                      fx("zero-indicator.json") + " --scope quasi-sure");
  CHECK(bad.code == 1);

  json rep = run_json("price --market " + fx("fix-gap.json") + " --claim " +
                      fx("zero-indicator.json") +
                      " --scope quasi-sure --priors " + fx("pf-gap-12.json"));
  CHECK(rep["price"] == "0");
  CHECK(rep["scope_paths"] == json::array({"s1", "s2"}));
  CHECK(rep.contains("extremal_measure"));
}

TEST_CASE("price command: omega-star scope") {
  json rep = run_json("price --market " + fx("fix-gap.json") + " --claim " +
                      fx("zero-indicator.json") + " --scope omega-star");
  // Every path of this market is efficient, so the omega-star scope matches
  // the full one and the price is unchanged.
  CHECK(rep["scope"] == "omega-star");
  CHECK(rep["price"] == "1/2");
}

TEST_CASE("ftap command: documented example") {
  json rep = run_json("ftap --market " + fx("fix-binom.json") + " --priors " +
                      fx("pf-omega.json"));
  CHECK(rep["all_equivalent"] == true);
  CHECK(rep["quasi_sure_ftap"]["witness_measure"]["A"] == "1/3");
  CHECK(rep["quasi_sure_ftap"]["witness_measure"]["B"] == "2/3");
}

TEST_CASE("arbitrage command emits verdicts and relations") {
  json rep = run_json("arbitrage --market " + fx("fix-gap.json") +
                      " --priors " + fx("pf-gap-full.json"));
  REQUIRE(rep.contains("verdicts"));
  bool saw_usa = false;
  for (const json& v : rep["verdicts"]) {
    if (v["notion"] == "USA") {
      saw_usa = true;
      CHECK(v["present"] == false);
    }
    if (v["notion"] == "IntA") CHECK(v.contains("schedule"));
  }
  CHECK(saw_usa);
  CHECK(rep["relations"]["ok"] == true);
}

TEST_CASE("efficient-set command partitions the scope with witnesses") {
  json rep = run_json("efficient-set --market " + fx("fix-ex35.json"));
  CHECK(rep["methods_agree"] == true);
  CHECK(rep["retained"].size() == 7);
  CHECK(rep["removed"].size() == 2);
  CHECK(rep["removed"].contains("b2-quarter"));
  CHECK(rep["removed"].contains("b2-twofifth"));
}

TEST_CASE("duality-chain command: five labeled values") {
  json rep = run_json("duality-chain --market " + fx("fix-binom.json") +
                      " --priors " + fx("pf-omega.json") + " --claim " +
                      fx("fix-binom-claim.json"));
  CHECK(rep["all_equal"] == true);
  REQUIRE(rep["values"].size() == 5);
  for (const json& e : rep["values"]) CHECK(e["value"] == "1/3");
}

TEST_CASE("extension command on the nine-path market") {
  json rep = run_json("extension --market " + fx("fix-ex35.json") +
                      " --claim " + fx("fix-ex35-claim.json") +
                      " --scope omega");
  CHECK(rep["extension_holds"] == true);
  CHECK(rep["price_core"] == "200/277");
  CHECK(rep["price_full"] == "200/277");
  CHECK(rep["assumption_limit_ok"] == true);
  CHECK(rep["assumption_separator_ok"] == true);
  REQUIRE(rep["nodes"].size() == 1);
  CHECK(rep["nodes"][0]["outside_groups"].empty());
}

TEST_CASE("poly command reports all four checks on a compact market") {
  json rep = run_json("poly --market " + fx("fix-sausa.json"));
  CHECK(rep["strict"]["present"] == true);
  CHECK(rep["uniform"]["present"] == false);
  CHECK(rep["uniform"].contains("boundary_note") == false);
  CHECK(rep["strict"].contains("boundary_note"));
  // Uniform arbitrage is absent, so by duality a supermartingale measure
  // exists (the point mass at the closure vertex).
  CHECK(rep["supermartingale"]["present"] == true);
  CHECK(rep["no_short_selling_chain"]["present"] == false);
}

TEST_CASE("examples command covers every bundled scenario") {
  json ex35 = run_json("examples --name ex35 --fixtures " RFM_FIXTURE_DIR);
  CHECK(ex35["price_full"]["price"] == "200/277");
  CHECK(ex35["capital_half"]["status"] == "infeasible");
  CHECK(ex35["price_flat_branch"] == "0");
  CHECK(ex35["extension_holds"] == true);

  json gap = run_json("examples --name gap --fixtures " RFM_FIXTURE_DIR);
  CHECK(gap["pathwise"]["price"] == "1/2");
  CHECK(gap["quasi_sure"]["price"] == "0");

  json ex32 = run_json("examples --name ex32");
  REQUIRE(ex32["probes"].size() == 4);
  CHECK(ex32["probes"][0]["min_first_hedge"] == "8");
  CHECK(ex32["probes"][3]["min_first_hedge"] == "80");

  json ex31 = run_json("examples --name ex31 --fixtures " RFM_FIXTURE_DIR);
  CHECK(ex31["price_closure"] == "1");
  CHECK(ex31["price_empty_core"] == "-inf");

  json binom = run_json("examples --name binom --fixtures " RFM_FIXTURE_DIR);
  CHECK(binom["call_price"]["price"] == "1/3");
  CHECK(binom["ftap_all_equivalent"] == true);

  json sausa = run_json("examples --name sausa --fixtures " RFM_FIXTURE_DIR);
  CHECK(sausa["strict"]["present"] == true);
  CHECK(sausa["uniform"]["present"] == false);

  json inta = run_json("examples --name inta --fixtures " RFM_FIXTURE_DIR);
  CHECK(inta["interior_arbitrage"]["present"] == true);

  RunResult unknown = run("examples --name nosuch");
  CHECK(unknown.code == 1);
}

TEST_CASE("output is deterministic across runs") {
  std::string args = "examples --name ex35 --fixtures " RFM_FIXTURE_DIR;
  RunResult a = run(args);
  RunResult b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  std::string args2 = "arbitrage --market " + fx("fix-gap.json") +
                      " --priors " + fx("pf-gap-full.json");
  CHECK(run(args2).out == run(args2).out);
}

TEST_CASE("table format flattens the report") {
  RunResult r = run("price --market " + fx("fix-gap.json") + " --claim " +
                    fx("zero-indicator.json") + " --format table");
  CHECK(r.code == 0);
  CHECK(r.out.find("price = 1/2") != std::string::npos);
  CHECK(r.out.find("dual_measure.s0 = 1/2") != std::string::npos);
  CHECK(r.out.find("scope_paths[1] = s1") != std::string::npos);
}

TEST_CASE("error taxonomy: bad inputs exit 1 with a message") {
  RunResult missing = run("price --market /nonexistent.json --claim " +
                          fx("zero-indicator.json"));
  CHECK(missing.code == 1);

  RunResult wrong_len = run("price --market " + fx("fix-binom.json") +
                            " --claim " + fx("zero-indicator.json"));
  CHECK(wrong_len.code == 1);
  CHECK(wrong_len.out.find("SchemaError") != std::string::npos);

  RunResult no_sub = run("");
  CHECK(no_sub.code != 0);

  RunResult bad_scope = run("arbitrage --market " + fx("fix-gap.json") +
                            " --scope sideways");
  CHECK(bad_scope.code == 1);
}

TEST_CASE("verify round trip: emitted reports pass, corrupted ones fail") {
  std::string dir = "/tmp/rfm-cli-test";
  std::filesystem::create_directories(dir);

  for (const std::string& args :
       {"price --market " + fx("fix-gap.json") + " --claim " +
            fx("zero-indicator.json"),
        "price --market " + fx("fix-ex35.json") + " --claim " +
            fx("fix-ex35-claim.json"),
        "arbitrage --market " + fx("fix-gap.json"),
        "ftap --market " + fx("fix-binom.json") + " --priors " +
            fx("pf-omega.json"),
        "efficient-set --market " + fx("fix-ex35.json")}) {
    RunResult r = run(args);
    REQUIRE(r.code == 0);
    std::string path = dir + "/report.json";
    std::ofstream(path) << r.out;
    json v = run_json("verify --report " + path);
    CAPTURE(args);
    CHECK(v["pass"] == true);
    CHECK(v["failures"].empty());
  }

  // Tampering with the price must be caught by pure arithmetic.
  RunResult r = run("price --market " + fx("fix-gap.json") + " --claim " +
                    fx("zero-indicator.json"));
  json rep = json::parse(r.out);
  rep["price"] = "1/3";
  std::string bad = dir + "/bad.json";
  std::ofstream(bad) << rep.dump();
  json v = run_json("verify --report " + bad, 2);
  CHECK(v["pass"] == false);
  CHECK(!v["failures"].empty());

  // A report kind without certificates is rejected as unsupported input.
  json chain;
  chain["command"] = "duality-chain";
  std::string uns = dir + "/unsupported.json";
  std::ofstream(uns) << chain.dump();
  CHECK(run("verify --report " + uns).code == 1);
}

TEST_CASE("verify catches a forged minus-infinity certificate") {
  // Price on the scope where only the downward path remains: unbounded.
  json rep = run_json("price --market " + fx("fix-gap.json") + " --claim " +
                      fx("zero-indicator.json") + " --scope quasi-sure" +
                      " --priors " + fx("pf-gap-12.json"));
  CHECK(rep["price"] == "0");

  // Hand-build a -inf report whose ray does not actually lower the capital.
  json forged;
  forged["command"] = "price";
  forged["market"] = fx("fix-gap.json");
  forged["claim"] = fx("zero-indicator.json");
  forged["scope_paths"] = json::array({"s0", "s1", "s2"});
  forged["price"] = "-inf";
  forged["ray"] = json::array({"1", "0", "0"});
  std::string path = "/tmp/rfm-cli-test/forged.json";
  std::ofstream(path) << forged.dump();
  json v = run_json("verify --report " + path, 2);
  CHECK(v["pass"] == false);
}
