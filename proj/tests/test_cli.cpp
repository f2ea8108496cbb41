#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

const std::string kCli = DPA_CLI_PATH;
const std::string kScenarios = std::string(DPA_SOURCE_DIR) + "/scenarios";

int run_cli(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("run: valid scenario exits zero and honours overrides") {
  const std::string out = "cli_run.json";
  CHECK(run_cli("run " + kScenarios + "/wmrp_uniform.json --samples 2000 " +
                "--seed 5 --out " + out) == 0);
  const auto doc = nlohmann::json::parse(slurp(out));
  CHECK(doc["config"]["samples"] == 2000);
  CHECK(doc["config"]["seed"] == 5);
  CHECK(doc["stats"]["samples"] == 2000);
  std::remove(out.c_str());
}

TEST_CASE("run: parse and validation failures exit two") {
  std::ofstream bad("cli_bad.json");
  bad << "{ not json";
  bad.close();
  CHECK(run_cli("run cli_bad.json") == 2);
  std::remove("cli_bad.json");

  std::ofstream off("cli_offdomain.json");
  off << R"({
    "advertisers": [{
      "distribution": {"kind": "uniform", "lower": 0.0, "upper": 1.0},
      "conversion": {"kind": "constant", "level": 1.0},
      "price_domain": [0.0, 1.0]
    }],
    "mechanism": {"family": "wm-rp"},
    "price_mode": {"mode": "fixed", "prices": [2.0]}
  })";
  off.close();
  CHECK(run_cli("run cli_offdomain.json") == 2);
  std::remove("cli_offdomain.json");

  CHECK(run_cli("run " + kScenarios + "/wmrp_uniform.json --format xml") ==
        2);
  CHECK(run_cli("run missing_file.json") == 2);
}

TEST_CASE("verify: broken fixture fails the targeted check with exit one") {
  CHECK(run_cli("verify " + kScenarios + "/broken_first_price.json " +
                "--checks ic --samples 150") == 1);
  CHECK(run_cli("verify " + kScenarios + "/broken_first_price.json " +
                "--checks mono,ir,wbb --samples 150") == 0);
  CHECK(run_cli("verify " + kScenarios + "/wmrp_uniform.json " +
                "--checks ic,ir,wbb --samples 150") == 0);
  CHECK(run_cli("verify " + kScenarios + "/wmrp_uniform.json " +
                "--checks bogus") == 2);
  CHECK(run_cli("verify " + kScenarios + "/broken_first_price.json " +
                "--checks rev-eq") == 2);
}

TEST_CASE("equilibrium: pi mode rejects affine maximizer scenarios") {
  CHECK(run_cli("equilibrium " + kScenarios +
                "/ama_expdecay.json --mode pi --samples 200") == 2);
  CHECK(run_cli("equilibrium " + kScenarios +
                "/vwmpia_unimodal.json --samples 200") == 0);
}

TEST_CASE("optimize: requires an affine maximizer scenario") {
  CHECK(run_cli("optimize " + kScenarios +
                "/wmrp_uniform.json --samples 500") == 2);
  CHECK(run_cli("optimize " + kScenarios + "/ama_search_uniform.json " +
                "--grid w=1,b=-0.2:0.0:0.1 --samples 500") == 0);
}

TEST_CASE("reports are byte-identical across reruns and formats are stable") {
  for (const std::string fmt : {"json", "csv"}) {
    const std::string out1 = "cli_det1." + fmt;
    const std::string out2 = "cli_det2." + fmt;
    const std::string args = "run " + kScenarios +
                             "/wmrp_uniform.json --samples 5000 --format " +
                             fmt;
    CHECK(run_cli(args + " --out " + out1) == 0);
    CHECK(run_cli(args + " --out " + out2) == 0);
    const std::string a = slurp(out1);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(out2));
    std::remove(out1.c_str());
    std::remove(out2.c_str());
  }
}
