#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fracsync/cli.hpp"

using namespace fracsync;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fracsync_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

fs::path only_subdir(const fs::path& root) {
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root)) dirs.push_back(e.path());
  REQUIRE(dirs.size() == 1);
  return dirs.front();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> contents(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().filename() != "meta.json") files[e.path().filename().string()] = slurp(e.path());
  }
  return files;
}

const std::vector<std::string> kSmall{"--set", "dt=0.01", "--set", "sync.horizon=5", "--set", "sync.n_seeds=3",
                                      "--set", "sync.record_stride=10"};

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(invoke({}).code == kExitValidation);
  CHECK(invoke({"frobnicate"}).code == kExitValidation);
  const Result r = invoke({"sync", "--bogus-flag"});
  CHECK(r.code == kExitValidation);
  CHECK(r.err.find("sync") != std::string::npos);
  CHECK(invoke({"--help"}).code == kExitOk);
}

TEST_CASE("missing config exits 1 and names the path") {
  const Result r = invoke({"sync", "/no/such/config.yaml"});
  CHECK(r.code == kExitValidation);
  CHECK(r.err.find("/no/such/config.yaml") != std::string::npos);
}

TEST_CASE("invalid override exits 1") {
  CHECK(invoke({"sync", "--set", "hurst=2"}).code == kExitValidation);
  CHECK(invoke({"sync", "--set", "nonsense.key=1"}).code == kExitValidation);
}

TEST_CASE("sync writes a report with final_r and the resolved config") {
  const fs::path root = fresh_dir("sync");
  std::vector<std::string> args{"sync", "--set", "output_dir=" + root.string()};
  args.insert(args.end(), kSmall.begin(), kSmall.end());
  const Result r = invoke(args);
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("sync:") == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1);
  const fs::path dir = only_subdir(root);
  CHECK(dir.filename().string().rfind("sync-", 0) == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report.contains("final_r"));
  CHECK(report["final_r"].is_number());
  CHECK(report["config"]["sync"]["horizon"] == 5.0);
  CHECK(report["config"]["dt"] == 0.01);
  CHECK(report["version"].get<std::string>().find("fracsync") == 0);
  CHECK(slurp(dir / "r_series.csv").rfind("t,R\r\n", 0) == 0);
  CHECK(fs::exists(dir / "meta.json"));
  fs::remove_all(root);
}

TEST_CASE("reruns are byte-identical apart from meta.json") {
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  for (const auto& [sub, extra] : std::vector<std::pair<std::string, std::vector<std::string>>>{
           {"sync", kSmall},
           {"simulate", {"--set", "simulate.horizon=2", "--set", "simulate.with_jacobian=true"}},
           {"lyapunov", {"--set", "lyapunov.horizon=5", "--set", "lyapunov.n_realizations=4", "--set", "lyapunov.burn_in=1",
             "--set", "dt=0.01"}}}) {
    std::vector<std::string> one{sub, "--set", "output_dir=" + a.string(), "--set", "threads=1"};
    std::vector<std::string> two{sub, "--set", "output_dir=" + b.string(), "--set", "threads=3"};
    one.insert(one.end(), extra.begin(), extra.end());
    two.insert(two.end(), extra.begin(), extra.end());
    REQUIRE(invoke(one).code == kExitOk);
    REQUIRE(invoke(two).code == kExitOk);
  }
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const auto ca = contents(e.path());
    const auto cb = contents(b / e.path().filename());
    // Reports embed the thread count; everything else must match exactly.
    for (const auto& [name, text] : ca) {
      REQUIRE(cb.count(name) == 1);
      if (name.ends_with(".csv")) {
        CHECK(text == cb.at(name));
      } else {
        auto ja = nlohmann::json::parse(text), jb = nlohmann::json::parse(cb.at(name));
        ja["config"].erase("threads");
        jb["config"].erase("threads");
        ja["config"].erase("output_dir");
        jb["config"].erase("output_dir");
        CHECK(ja == jb);
      }
      ++compared;
    }
  }
  CHECK(compared >= 6);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("config file plus override") {
  const fs::path root = fresh_dir("file");
  fs::create_directories(root);
  {
    std::ofstream cfg(root / "c.yaml");
    cfg << "drift: {name: ou, dim: 1, params: {theta: 2}}\nhurst: 0.5\ndt: 0.01\n"
        << "ergodic: {horizon: 5, n_realizations: 8, x0: [0]}\noutput_dir: " << (root / "out").string() << "\n";
  }
  const Result r = invoke({"ergodic", (root / "c.yaml").string(), "--set", "ergodic.test_fn=one"});
  REQUIRE(r.code == kExitOk);
  const auto report = nlohmann::json::parse(slurp(only_subdir(root / "out") / "report.json"));
  CHECK(report["config"]["ergodic"]["test_fn"] == "one");
  CHECK(report["gap"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
  fs::remove_all(root);
}

TEST_CASE("runtime failures exit 2") {
  const fs::path root = fresh_dir("blowup");
  const Result r = invoke({"simulate", "--set", "output_dir=" + root.string(), "--set", "drift.name=linear",
                           "--set", "drift.dim=1", "--set", "drift.params.a=-50", "--set", "simulate.horizon=5", "--set", "dt=0.01", "--set", "simulate.x0=[1]"});
  CHECK(r.code == kExitRuntime);
  CHECK(r.err.find("last finite time") != std::string::npos);
  fs::remove_all(root);
}

TEST_CASE("pushout with no accepted noise exits 3") {
  const fs::path root = fresh_dir("pushout");
  const Result r = invoke({"pushout", "--set", "output_dir=" + root.string(), "--set", "dt=0.01", "--set",
                           "pushout.horizon=1", "--set", "pushout.n_initials=4", "--set", "pushout.v_factors=[1]",
                           "--set", "pushout.conditioned.enabled=true", "--set", "pushout.conditioned.delta=1e-6",
                           "--set", "pushout.conditioned.n_attempts=4"});
  CHECK(r.code == kExitNoAcceptance);
  const auto report = nlohmann::json::parse(slurp(only_subdir(root) / "report.json"));
  CHECK(report["conditioned"]["accepted"] == 0);
  fs::remove_all(root);
}

TEST_CASE("validate-noise on a small suite") {
  const fs::path root = fresh_dir("noise");
  const Result r = invoke({"validate-noise", "--set", "output_dir=" + root.string(), "--set",
                           "validate_noise.nodes=512", "--set", "validate_noise.paths=512", "--set",
                           "validate_noise.rel_tolerance=0.2", "--set", "validate_noise.max_lag=3", "--set",
                           "validate_noise.whiteness_seeds=20"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("PASS") != std::string::npos);
  const fs::path dir = only_subdir(root);
  CHECK(slurp(dir / "covariance.csv").rfind("h,lag,empirical,analytic,stderr,rel_error,pass\r\n", 0) == 0);
  fs::remove_all(root);
}

TEST_CASE("sync on the shipped example config") {
  const fs::path root = fresh_dir("shipped");
  const fs::path config = fs::path(FRACSYNC_TEST_DATA) / ".." / "configs" / "example.yaml";
  const Result r = invoke({"sync", config.string(), "--set", "output_dir=" + root.string()});
  REQUIRE(r.code == kExitOk);
  const auto report = nlohmann::json::parse(slurp(only_subdir(root) / "report.json"));
  CHECK(report["final_r"].is_number());
  CHECK(report["config"]["drift"]["name"] == "example_sec5");
  CHECK(report["fraction_synchronized"].get<double>() >= 0.9);
  fs::remove_all(root);
}
