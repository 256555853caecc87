#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracsync/diffusion.hpp"
#include "fracsync/drift.hpp"

namespace fracsync {

/// Raised for unreadable, malformed or out-of-range configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SimulateBlock {
  double horizon = 10.0;
  std::vector<double> x0;
  std::size_t record_stride = 10;
  bool with_jacobian = false;
};

struct LyapunovBlock {
  double horizon = 200.0;
  double burn_in = -1.0;
  double renorm_interval = 1.0;
  int n_realizations = 64;
  double x0_radius = 0.0;
  /// 0 skips the finite-difference cross-check.
  double fd_epsilon = 0.0;
};

struct SweepBlock {
  std::vector<double> kappas{1.0, 2.0, 4.0, 8.0};
};

struct SyncBlock {
  double horizon = 50.0;
  int n_seeds = 64;
  /// Empty means the pair +-2 e_1.
  std::vector<std::vector<double>> initials;
  std::size_t record_stride = 100;
  double threshold = 1e-3;
};

struct AtomsBlock {
  double t_back = 50.0;
  int n_initials = 256;
  /// 0 picks twice the absorbing radius of the first seed.
  double ball_radius = 0.0;
  /// 0 picks 1e-3 * c1f / c2f.
  double cluster_radius = 0.0;
  int n_seeds = 8;
};

struct AttractorBlock {
  std::vector<double> schedule{0.0, 10.0, 25.0, 50.0};
  int n_initials = 64;
  double ball_radius = 0.0;
  int n_seeds = 4;
};

struct ErgodicBlock {
  double horizon = 50.0;
  int n_realizations = 64;
  /// "one" or "clipped_square" (min(|x|^2, clip)).
  std::string test_fn = "clipped_square";
  double clip = 4.0;
  std::vector<double> x0;
};

struct ConditionedBlock {
  bool enabled = false;
  double v = 2.0;
  double delta = 1.0;
  double horizon = 0.5;
  int n_attempts = 200;
  int max_reports = 8;
};

struct PushoutBlock {
  std::vector<double> v_factors{1.0, 10.0, 100.0, 1000.0};
  double horizon = 5.0;
  int n_initials = 32;
  /// 0 picks twice the critical radius R + 2C.
  double initial_radius = 0.0;
  /// 0 picks 10 (R + C).
  double r2 = 0.0;
  ConditionedBlock conditioned;
};

struct ValidateNoiseBlock {
  std::vector<double> hursts{0.25, 0.5, 0.75};
  std::size_t nodes = 4096;
  int paths = 4096;
  std::size_t max_lag = 10;
  double rel_tolerance = 0.05;
  int whiteness_seeds = 100;
};

/// Fully resolved experiment configuration.
struct ExperimentConfig {
  DriftSpec drift;
  /// Reject drifts with unbounded DF when H > 1/2 instead of warning.
  bool enforce_bounded_jacobian = false;
  double hurst = 0.75;
  double kappa = 1.0;
  /// Row-major sigma; overrides kappa when non-empty.
  std::vector<double> sigma_matrix;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string output_dir = "fracsync-out";

  SimulateBlock simulate;
  LyapunovBlock lyapunov;
  SweepBlock sweep;
  SyncBlock sync;
  AtomsBlock atoms;
  AttractorBlock attractor;
  ErgodicBlock ergodic;
  PushoutBlock pushout;
  ValidateNoiseBlock validate_noise;

  DiffusionMatrix diffusion() const;
};

/// Parses YAML text, applies `key.path=value` overrides, fills defaults and
/// validates every field. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& yaml_text, const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides = {});

/// Canonical YAML of a resolved config; parse_config(to_yaml(c)) == c.
std::string to_yaml(const ExperimentConfig& config);
nlohmann::json to_json(const ExperimentConfig& config);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace fracsync
