#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "fracsync/config.hpp"
#include "fracsync/output.hpp"

using namespace fracsync;

TEST_CASE("empty text gives the defaults") {
  const ExperimentConfig c = parse_config("");
  CHECK(c == ExperimentConfig{});
  CHECK(c.drift.name == "example_sec5");
  CHECK(c.hurst == 0.75);
}

TEST_CASE("round trip through YAML") {
  const std::string text = R"(
drift: {name: linear, dim: 3, matrix: [-1, 0.5, 0, 0, -2, 0, 0, 0, -3]}
hurst: 0.3
sigma: {kappa: 0.7}
dt: 0.002
seed: 18446744073709551615
sync:
  initials: [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
sweep: {kappas: [0.1, 0.25, 3]}
pushout: {conditioned: {enabled: true, delta: 0.3}}
)";
  const ExperimentConfig c = parse_config(text);
  CHECK(c.seed == 18446744073709551615ULL);
  CHECK(c.drift.matrix[1] == 0.5);
  CHECK(c.pushout.conditioned.enabled);
  CHECK(c.pushout.conditioned.n_attempts == ExperimentConfig{}.pushout.conditioned.n_attempts);
  const ExperimentConfig again = parse_config(to_yaml(c));
  CHECK(again == c);
  CHECK(to_yaml(again) == to_yaml(c));
}

TEST_CASE("awkward doubles survive the round trip") {
  ExperimentConfig c;
  c.dt = 0.1 / 3.0;
  c.hurst = 0.1 + 0.2;
  c.sweep.kappas = {1e-300, 1.0, 1e300};
  c.drift.params["r_inner"] = 1.2000000000000002;
  const ExperimentConfig back = parse_config(to_yaml(c));
  CHECK(back.dt == c.dt);
  CHECK(back.hurst == c.hurst);
  CHECK(back.sweep.kappas == c.sweep.kappas);
  CHECK(back == c);
}

TEST_CASE("overrides beat file values and are typed by YAML") {
  const ExperimentConfig c = parse_config("hurst: 0.6\nsweep: {kappas: [1]}\n",
                                          {"hurst=0.4", "sweep.kappas=[2, 4]", "drift.params.r_outer=2.5",
                                           "pushout.conditioned.enabled=true", "output_dir=\"a,b\""});
  CHECK(c.hurst == 0.4);
  CHECK(c.sweep.kappas == std::vector<double>{2.0, 4.0});
  CHECK(c.drift.params.at("r_outer") == 2.5);
  CHECK(c.pushout.conditioned.enabled);
  CHECK(c.output_dir == "a,b");
  CHECK(parse_config(to_yaml(c)) == c);
}

TEST_CASE("validation rejects bad input") {
  const auto bad = [](const std::string& text, const std::vector<std::string>& o = {}) {
    CHECK_THROWS_AS(parse_config(text, o), ConfigError);
  };
  bad("hurst: 1.0");
  bad("hurst: 0");
  bad("hurst: half");
  bad("dt: -0.01");
  bad("sigma: {kappa: 0}");
  bad("unknown_key: 3");
  bad("sync: {horizon: 5, bogus: 1}");
  bad("sync: 3");
  bad("sweep: {kappas: [2, 1]}");
  bad("sweep: {kappas: []}");
  bad("drift: {name: nope}");
  bad("drift: {dim: 9}");
  bad("drift: {dim: 3}\nsync: {initials: [[1, 0], [0, 1]]}");
  CHECK_NOTHROW(parse_config("drift: {dim: 3}"));
  bad("drift: {name: linear, dim: 2, matrix: [1, 2, 3]}");
  bad("sigma: {matrix: [1, 2, 2, 4]}");
  bad("lyapunov: {n_realizations: 2.5}");
  bad("lyapunov: {burn_in: 500}");
  bad("seed: -1");
  bad("[1, 2]");
  bad("{unclosed");
  bad("", {"nokey"});
  bad("", {"a..b=1"});
  bad("", {"hurst.deep=1"});
  bad("drift: {name: cubic, enforce_bounded_jacobian: true}\nhurst: 0.7");
  CHECK_NOTHROW(parse_config("drift: {name: cubic}\nhurst: 0.7"));
}

TEST_CASE("missing file names the path") {
  try {
    load_config("/nonexistent/dir/cfg.yaml");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/cfg.yaml") != std::string::npos);
  }
}

TEST_CASE("config hash ignores threads and output location") {
  ExperimentConfig a;
  ExperimentConfig b = a;
  b.threads = 7;
  b.output_dir = "/elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a).size() == 16);
}

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("RFC 4180 quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CsvTable t({"name", "value"});
  t.row(std::vector<std::string>{"x,y", "1"});
  t.row(std::vector<double>{0.1, -2.5e-300});
  CHECK(t.rows() == 2);
  CHECK(t.str() == "name,value\r\n\"x,y\",1\r\n0.1,-2.5e-300\r\n");
  CHECK_THROWS(t.row(std::vector<double>{1.0}));
}

TEST_CASE("shortest round-trip doubles") {
  for (double v : {0.1, 1.0 / 3.0, 1e-310, -123456789.125, 5e-324}) CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("atomic write replaces the file and leaves no temp") {
  const auto dir = std::filesystem::temp_directory_path() / "fracsync_atomic_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_atomic(dir / "f.txt", "first");
  write_atomic(dir / "f.txt", "second");
  std::ifstream in(dir / "f.txt");
  std::string s;
  std::getline(in, s);
  CHECK(s == "second");
  CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator()) == 1);
  std::filesystem::remove_all(dir);
}
