#include "doctest.h"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "cli_app.hpp"

using approxwidths::cli::Outcome;
using approxwidths::cli::Overrides;
using approxwidths::cli::run;
using nlohmann::json;

namespace {

json load(const std::string& name) {
  std::ifstream in(std::string(CONFIG_DIR) + "/" + name);
  return json::parse(in);
}

struct Proc {
  int status = 0;
  std::string out;
};

Proc shell(const std::string& cmd) {
  Proc p;
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), f)) > 0) p.out.append(buf.data(), got);
  const int st = pclose(f);
  p.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return p;
}

std::string bin() { return std::string(APPROXWIDTHS_BIN); }

}  // namespace

TEST_CASE("widths on the standard basis") {
  const Outcome o = run("widths", load("basis_vectors.json"), {}, "json");
  REQUIRE(o.exit_code == 0);
  const json r = json::parse(o.text);
  CHECK(r["status"] == "ok");
  CHECK(r["command"] == "widths");
  CHECK(r["seed"] == 7);
  const auto& rows = r["rows"];
  REQUIRE(rows.size() == 4);
  CHECK(rows[0]["upper"].get<double>() == doctest::Approx(1.0));
  CHECK(std::abs(rows[2]["upper"].get<double>() - 1.0 / std::sqrt(3.0)) <= 1e-6);
  CHECK(rows[2]["method"] == "sweep");
  CHECK(rows[3]["upper"].get<double>() == 0.0);
}

TEST_CASE("operator widths") {
  const Outcome o = run("widths", load("diag_operator.json"), {}, "json");
  REQUIRE(o.exit_code == 0);
  const json r = json::parse(o.text);
  CHECK(r["result"]["operator_norm"].get<double>() == doctest::Approx(3.0));
  for (int n = 0; n < 3; ++n) CHECK(r["rows"][n]["value"].get<double>() == doctest::Approx(3.0 - n));
}

TEST_CASE("profile verdicts for the sine families") {
  const json plain = json::parse(run("profile", load("sin_k.json"), {}, "json").text);
  CHECK(plain["result"]["verdict"] == "evidence-noncompact");
  const json scaled = json::parse(run("profile", load("sin_over_k.json"), {}, "json").text);
  CHECK(scaled["result"]["verdict"] == "evidence-compact");
}

TEST_CASE("every shipped config runs its command") {
  const std::pair<const char*, const char*> cases[] = {
      {"lethargy", "lethargy.json"},           {"jackson", "jackson.json"},
      {"projection-defect", "trig_defect.json"}, {"axioms", "trig_defect.json"},
      {"decompose", "random_cloud.json"},      {"hull-check", "random_cloud.json"},
      {"witness-weights", "sin_over_k.json"},  {"widths", "random_cloud.json"}};
  for (const auto& [cmd, file] : cases) {
    const Outcome o = run(cmd, load(file), {}, "json");
    CHECK_MESSAGE(o.exit_code == 0, cmd, " ", o.text);
  }
  const json l = json::parse(run("lethargy", load("lethargy.json"), {}, "json").text);
  CHECK(l["result"]["max_deviation"].get<double>() < 1e-12);
}

TEST_CASE("csv output") {
  const Outcome o = run("widths", load("diag_operator.json"), {}, "csv");
  REQUIRE(o.exit_code == 0);
  CHECK(o.text.rfind("n,value,lower,upper,method\n", 0) == 0);
  CHECK(std::count(o.text.begin(), o.text.end(), '\n') == 5);
}

TEST_CASE("overrides change the hash and the horizon") {
  const json cfg = load("sin_k.json");
  const json a = json::parse(run("profile", cfg, {}, "json").text);
  Overrides ov;
  ov.horizon = 5;
  const json b = json::parse(run("profile", cfg, ov, "json").text);
  CHECK(b["horizon"] == 5);
  CHECK(b["rows"].size() == 6);
  CHECK(a["config_hash"] != b["config_hash"]);
  CHECK(a["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
}

TEST_CASE("config errors point at the offending path") {
  json cfg = load("sin_k.json");
  cfg["space"]["nodes"] = 1;
  cfg["bogus"] = true;
  const Outcome o = run("profile", cfg, {}, "json");
  CHECK(o.exit_code == 2);
  const json e = json::parse(o.text)["error"];
  CHECK(e["kind"] == "config");
  bool nodes = false, bogus = false;
  for (const auto& v : e["violations"]) {
    nodes = nodes || v["path"] == "/space/nodes";
    bogus = bogus || v["path"] == "/bogus";
  }
  CHECK(nodes);
  CHECK(bogus);

  json noseed = load("basis_vectors.json");
  noseed.erase("seed");
  CHECK(run("widths", noseed, {}, "json").exit_code == 2);

  json badexpr = load("sin_k.json");
  badexpr["family"]["expression"] = "sin(k*x";
  const Outcome pe = run("profile", badexpr, {}, "json");
  CHECK(pe.exit_code == 2);
  CHECK(pe.text.find("/family/expression") != std::string::npos);

  CHECK(run("nope", load("sin_k.json"), {}, "json").exit_code == 2);
}

TEST_CASE("the binary") {
  const Proc v = shell(bin() + " --version");
  CHECK(v.status == 0);
  CHECK_FALSE(v.out.empty());

  const std::string cfg = std::string(CONFIG_DIR) + "/diag_operator.json";
  const Proc a = shell(bin() + " widths --config " + cfg);
  const Proc b = shell(bin() + " widths --config " + cfg);
  CHECK(a.status == 0);
  CHECK(a.out == b.out);

  const std::string bad = "approxwidths_test_bad.json";
  {
    std::ofstream f(bad);
    f << "{ not json";
  }
  const Proc m = shell(bin() + " profile --config " + bad + " 2>/dev/null");
  CHECK(m.status == 2);
  CHECK(m.out.find("\"error\"") != std::string::npos);
  std::remove(bad.c_str());

  CHECK(shell(bin() + " frobnicate --config " + cfg + " >/dev/null 2>&1").status == 2);
  CHECK(shell(bin() + " widths >/dev/null 2>&1").status == 2);

  const std::string outfile = "approxwidths_test_out.json";
  CHECK(shell(bin() + " widths --config " + cfg + " --out " + outfile).status == 0);
  std::ifstream in(outfile);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == a.out);
  std::remove(outfile.c_str());
}
