#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mqc/errors.hpp"
#include "mqc/runner/config.hpp"
#include "mqc/runner/output.hpp"

using namespace mqc;
using namespace mqc::runner;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("doubles print with round-trip precision and no negative zero") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(1.0) == "1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("csv files start with the manifest reference") {
  const auto dir = std::filesystem::temp_directory_path() / "mqc_runner_csv_test";
  std::filesystem::create_directories(dir);
  {
    CsvWriter w(dir / "t.csv", "abcd", {"x", "y"});
    w << 1.5 << 2;
    w.end_row();
    w.close();
  }
  std::ifstream in(dir / "t.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "# manifest: manifest.json run_id=abcd\nx,y\n1.5,2\n");
  std::filesystem::remove_all(dir);
}

TEST_CASE("defaults are resolved and the run id ignores threads") {
  const auto a = parse_config(R"({"pipelines": [{"type": "basis-info", "n_spins": 4}]})");
  const auto b = parse_config(
      R"({"threads": 3, "seed": 0, "pipelines": [{"type": "basis-info", "n_spins": 4}]})");
  CHECK(a.run_id() == b.run_id());
  CHECK(a.run_id().size() == 16);
  CHECK(b.threads == 3);
  const auto c = parse_config(R"({"seed": 5, "pipelines": [{"type": "basis-info", "n_spins": 4}]})");
  CHECK(a.run_id() != c.run_id());
  const auto again = parse_config(a.resolved.dump());
  CHECK(again.run_id() == a.run_id());
}

TEST_CASE("diagnostics name the file position or field") {
  CHECK(config_error("{\n  \"pipelines\": [,]\n}").rfind("cfg.json:2:", 0) == 0);
  const auto unknown =
      config_error(R"({"pipelines": [{"type": "basis-info", "n_spins": 4, "bogus": 1}]})");
  CHECK(unknown.find("pipelines[0].bogus") != std::string::npos);
  const auto range = config_error(R"({"pipelines": [{"type": "basis-info", "n_spins": 0}]})");
  CHECK(range.find("pipelines[0].n_spins") != std::string::npos);
  CHECK(config_error(R"({"pipelines": []})").find("pipelines") != std::string::npos);
  CHECK(config_error(R"({"pipelines": [{"type": "nope"}]})").find("type") != std::string::npos);
}

TEST_CASE("sha256 of a known string") {
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
