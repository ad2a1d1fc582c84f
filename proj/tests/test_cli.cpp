#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "algwb/io.hpp"
#include "cli.hpp"

using namespace algwb;

namespace {

const std::string kData = ALGWB_DATA_DIR;

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

io::Json run_json(std::vector<std::string> args) {
  args.push_back("--json");
  const auto r = run(args);
  REQUIRE(r.code == 0);
  return io::parse(r.out);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("algwb_cli_" + name)).string();
}

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("cli digest") {
  CHECK(cli::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("cli reports are deterministic") {
  const std::vector<std::string> args{"dualizability", kData + "/S3.json"};
  const auto a = run(args), b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("timing") == std::string::npos);
  const auto j = run_json(args);
  CHECK(j["result"]["verdict"] == "DUALIZABLE");
  CHECK(j["inputs"][0]["sha256"].get<std::string>().size() == 64);
  auto timed = args;
  timed.push_back("--timing");
  CHECK(run(timed).out.find("timing") != std::string::npos);
}

TEST_CASE("cli commands on the corpus") {
  const auto s3 = kData + "/S3.json", z2 = kData + "/Z2.json";
  CHECK(run_json({"con", s3})["result"]["size"] == 3);
  CHECK(run_json({"inspect", kData + "/S3c.json"})["result"]["subdirectly_irreducible"] == true);
  CHECK(run_json({"commutator", s3, "--alpha", "1", "--beta", "1"})["result"]["index"] == 1);
  // The threaded table agrees with the sequential one.
  CHECK(run_json({"commutator", s3})["result"]["table"] == run_json({"commutator", s3, "--jobs", "3"})["result"]["table"]);
  CHECK(run_json({"centralizer", s3})["result"]["centralizer"].size() == 6);
  CHECK(run_json({"terms", kData + "/SL2.json", "--k-max", "3"})["result"]["least_k"].is_null());
  CHECK(run_json({"sylow", s3})["result"]["abelian_sylow_subgroups"] == true);
  CHECK(run_json({"critical", s3, "--relation", kData + "/s3_sign_parity3.json"})["result"]["critical"] == true);
  CHECK(run_json({"reduce-rep", z2, "--relation", kData + "/z2_parity3.json"})["result"]["all_relevant"] == true);
  CHECK(run_json({"split-check", kData + "/S3c.json"})["result"]["pass"] == false);
  const auto k = run_json({"constants", z2})["result"];
  CHECK(k["automorphisms"] == 1);
  CHECK(k["index_bound"] == 2);
  CHECK(k["exponent"] == 2);
}

TEST_CASE("cli certificates round trip through check-derivation") {
  const auto z2 = kData + "/Z2.json";
  const auto cert3 = temp_path("c3.json"), cert7 = temp_path("c7.json"), reduced = temp_path("r5.json");
  const auto r = run_json({"reduce", z2, "--relation", kData + "/z2_parity3.json", "--certificate", cert3});
  CHECK(r["result"]["claims_ok"] == true);
  CHECK(run_json({"check-derivation", z2, "--certificate", cert3})["result"]["accepted"] == true);

  const auto it = run_json({"lm-reduce", z2, "--relation", kData + "/z2_parity7.json", "--iterate", "--certificate", cert7});
  CHECK(it["result"]["rounds"] == 2);
  CHECK(run_json({"check-derivation", z2, "--certificate", cert7})["result"]["accepted"] == true);

  const auto lm = run_json({"lm-reduce", z2, "--relation", kData + "/z2_parity5.json", "--output", reduced});
  CHECK(lm["result"]["ok"] == true);
  CHECK(lm["result"]["reduced_star_arity"] == 3);
  // The emitted reduced relation is itself a valid input.
  CHECK(run_json({"lm-reduce", z2, "--relation", reduced})["result"]["applicable"] == false);

  // A certificate whose goal was altered is rejected, not an error.
  auto doc = io::read_file(cert3);
  doc["goal"]["tuples"].erase(0);
  io::write_file(cert3, doc);
  const auto bad = run_json({"check-derivation", z2, "--certificate", cert3})["result"];
  CHECK(bad["accepted"] == false);
}

TEST_CASE("cli exit codes") {
  const auto z2 = kData + "/Z2.json";
  CHECK(run({"frobnicate"}).code == cli::kParseError);
  CHECK(run({"con"}).code == cli::kParseError);
  CHECK(run({"con", "/nonexistent.json"}).code == cli::kParseError);
  const auto broken = temp_path("broken.json");
  write_text(broken, "{\"name\": \"x\", \"size\": 2, \"ops\": [{\"name\": \"f\", \"arity\": 1, \"table\": [0]}]}");
  CHECK(run({"con", broken}).code == cli::kParseError);
  CHECK(run({"commutator", z2, "--alpha", "[[0], [1, 2]]"}).code == cli::kParseError);
  CHECK(run({"con", kData + "/S3.json", "--budget", "1"}).code == cli::kBudgetExceeded);
  CHECK(run({"reduce", z2, "--relation", kData + "/z2_pairs4.json"}).code == cli::kHypothesisError);
  CHECK(run({"sylow", kData + "/L2.json"}).code == cli::kHypothesisError);
  CHECK(run({"centralizer", kData + "/SL2.json", "--k-max", "3"}).code == cli::kHypothesisError);
  // Verdicts are never exit codes.
  CHECK(run({"dualizability", kData + "/S3c.json"}).code == cli::kOk);
  CHECK(run({"--help"}).code == cli::kOk);
  CHECK(run({"corpus"}).out.find("S3c") != std::string::npos);
}

TEST_CASE("cli budget from the environment") {
  const auto s3 = kData + "/S3.json";
  ::setenv("ALGWB_BUDGET", "1", 1);
  CHECK(run({"con", s3}).code == cli::kBudgetExceeded);
  CHECK(run({"con", s3, "--budget", "100000"}).code == cli::kOk);
  ::setenv("ALGWB_BUDGET", "lots", 1);
  CHECK(run({"con", s3}).code == cli::kParseError);
  ::unsetenv("ALGWB_BUDGET");
  CHECK(run_json({"con", s3})["budget"] == 4000000);
}
