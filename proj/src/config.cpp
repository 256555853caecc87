#include "fracsync/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "fracsync/errors.hpp"

namespace fracsync {
namespace {

using nlohmann::json;

json scalar_to_json(const YAML::Node& node) {
  const std::string& text = node.Scalar();
  if (node.Tag() == "!") return text;  // quoted
  if (text == "true" || text == "True") return true;
  if (text == "false" || text == "False") return false;
  if (text == "null" || text == "~" || text.empty()) return nullptr;
  const char* first = text.data();
  const char* last = first + text.size();
  std::int64_t i = 0;
  if (auto [p, ec] = std::from_chars(first, last, i); ec == std::errc() && p == last) return i;
  std::uint64_t u = 0;
  if (auto [p, ec] = std::from_chars(first, last, u); ec == std::errc() && p == last) return u;
  double d = 0.0;
  if (auto [p, ec] = std::from_chars(first, last, d); ec == std::errc() && p == last) return d;
  if (text == ".inf" || text == ".nan" || text == "-.inf") throw ConfigError("non-finite value '" + text + "'");
  return text;
}

json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Scalar:
      return scalar_to_json(node);
    case YAML::NodeType::Sequence: {
      json out = json::array();
      for (const auto& item : node) out.push_back(yaml_to_json(item));
      return out;
    }
    case YAML::NodeType::Map: {
      json out = json::object();
      for (const auto& kv : node) out[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return out;
    }
  }
  return nullptr;
}

void emit_json(YAML::Emitter& out, const json& value) {
  if (value.is_object()) {
    out << YAML::BeginMap;
    for (const auto& [key, item] : value.items()) {
      out << YAML::Key << key << YAML::Value;
      emit_json(out, item);
    }
    out << YAML::EndMap;
  } else if (value.is_array()) {
    const bool flat = std::none_of(value.begin(), value.end(), [](const json& v) { return v.is_structured(); });
    out << (flat ? YAML::Flow : YAML::Block) << YAML::BeginSeq;
    for (const auto& item : value) emit_json(out, item);
    out << YAML::EndSeq;
  } else if (value.is_string()) {
    out << YAML::DoubleQuoted << value.get<std::string>();
  } else if (value.is_boolean()) {
    out << (value.get<bool>() ? "true" : "false");
  } else if (value.is_null()) {
    out << YAML::Null;
  } else {
    // Shortest round-trip text; keep a decimal point so floats stay floats.
    out << value.dump();
  }
}

// Every key in `user` must exist in `defaults`; free-form maps are skipped.
void check_known(const json& user, const json& defaults, const std::string& prefix) {
  for (const auto& [key, value] : user.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!defaults.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    if (path == "drift.params") continue;
    if (value.is_object()) {
      if (!defaults[key].is_object()) throw ConfigError("config key '" + path + "' is not a section");
      check_known(value, defaults[key], path);
    } else if (defaults[key].is_object() && !value.is_null()) {
      throw ConfigError("config key '" + path + "' must be a section");
    }
  }
}

void apply_override(json& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  json value;
  try {
    value = yaml_to_json(YAML::Load(assignment.substr(eq + 1)));
  } catch (const YAML::Exception& e) {
    throw ConfigError("override '" + key + "': " + e.what());
  }
  json* node = &tree;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) {
    if (part.empty()) throw ConfigError("override '" + assignment + "' has an empty key segment");
    path.push_back(part);
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    json& child = (*node)[path[i]];
    if (child.is_null()) child = json::object();
    if (!child.is_object()) throw ConfigError("override '" + key + "' descends into a scalar");
    node = &child;
  }
  (*node)[path.back()] = value;
}

class Reader {
 public:
  explicit Reader(const json& root) : root_(root) {}

  const json& at(const std::string& path) const {
    const json* node = &root_;
    std::stringstream parts(path);
    std::string part;
    while (std::getline(parts, part, '.')) node = &node->at(part);
    return *node;
  }

  double real(const std::string& path) const {
    const json& v = at(path);
    if (!v.is_number()) throw ConfigError(path + ": expected a number");
    return v.get<double>();
  }
  std::int64_t integer(const std::string& path) const {
    const json& v = at(path);
    if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
      throw ConfigError(path + ": integer out of range");
    }
    return v.get<std::int64_t>();
  }
  std::uint64_t unsigned_integer(const std::string& path) const {
    const json& v = at(path);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ConfigError(path + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  bool boolean(const std::string& path) const {
    const json& v = at(path);
    if (!v.is_boolean()) throw ConfigError(path + ": expected true or false");
    return v.get<bool>();
  }
  std::string text(const std::string& path) const {
    const json& v = at(path);
    if (!v.is_string()) throw ConfigError(path + ": expected a string");
    return v.get<std::string>();
  }
  std::vector<double> reals(const std::string& path) const {
    const json& v = at(path);
    if (v.is_null()) return {};
    if (!v.is_array()) throw ConfigError(path + ": expected a list of numbers");
    std::vector<double> out;
    for (const auto& item : v) {
      if (!item.is_number()) throw ConfigError(path + ": expected a list of numbers");
      out.push_back(item.get<double>());
    }
    return out;
  }
  std::vector<std::vector<double>> points(const std::string& path) const {
    const json& v = at(path);
    if (!v.is_array()) throw ConfigError(path + ": expected a list of points");
    std::vector<std::vector<double>> out;
    for (const auto& row : v) {
      if (!row.is_array()) throw ConfigError(path + ": expected a list of points");
      std::vector<double>& p = out.emplace_back();
      for (const auto& item : row) {
        if (!item.is_number()) throw ConfigError(path + ": expected numeric coordinates");
        p.push_back(item.get<double>());
      }
    }
    return out;
  }

 private:
  const json& root_;
};

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

int count(const Reader& r, const std::string& path) {
  const std::int64_t v = r.integer(path);
  check(v >= 1 && v <= 1'000'000'000, path + ": must be a positive integer");
  return static_cast<int>(v);
}

double positive(const Reader& r, const std::string& path) {
  const double v = r.real(path);
  check(std::isfinite(v) && v > 0.0, path + ": must be positive");
  return v;
}

double non_negative(const Reader& r, const std::string& path) {
  const double v = r.real(path);
  check(std::isfinite(v) && v >= 0.0, path + ": must be non-negative");
  return v;
}

ExperimentConfig from_tree(const json& tree) {
  const Reader r(tree);
  ExperimentConfig c;

  c.drift.name = r.text("drift.name");
  const std::int64_t dim = r.integer("drift.dim");
  check(dim >= 1 && dim <= kMaxDim, "drift.dim: must lie in [1, 8]");
  c.drift.dim = static_cast<int>(dim);
  const json& params = r.at("drift.params");
  check(params.is_object() || params.is_null(), "drift.params: expected a mapping");
  if (params.is_object()) {
    for (const auto& [key, value] : params.items()) {
      check(value.is_number(), "drift.params." + key + ": expected a number");
      c.drift.params[key] = value.get<double>();
    }
  }
  c.drift.matrix = r.reals("drift.matrix");
  c.enforce_bounded_jacobian = r.boolean("drift.enforce_bounded_jacobian");

  c.hurst = r.real("hurst");
  check(c.hurst > 0.0 && c.hurst < 1.0, "hurst: must lie in (0, 1)");
  c.kappa = positive(r, "sigma.kappa");
  c.sigma_matrix = r.reals("sigma.matrix");
  c.dt = positive(r, "dt");
  check(c.dt <= 0.1, "dt: must not exceed 0.1");
  c.seed = r.unsigned_integer("seed");
  const std::int64_t threads = r.integer("threads");
  check(threads >= 0 && threads <= 4096, "threads: must lie in [0, 4096] (0 = all cores)");
  c.threads = static_cast<int>(threads);
  c.output_dir = r.text("output_dir");
  check(!c.output_dir.empty(), "output_dir: must not be empty");

  c.simulate.horizon = positive(r, "simulate.horizon");
  c.simulate.x0 = r.reals("simulate.x0");
  c.simulate.record_stride = static_cast<std::size_t>(count(r, "simulate.record_stride"));
  c.simulate.with_jacobian = r.boolean("simulate.with_jacobian");

  c.lyapunov.horizon = positive(r, "lyapunov.horizon");
  c.lyapunov.burn_in = r.real("lyapunov.burn_in");
  check(c.lyapunov.burn_in == -1.0 || c.lyapunov.burn_in >= 0.0, "lyapunov.burn_in: must be >= 0 or -1 (auto)");
  c.lyapunov.renorm_interval = positive(r, "lyapunov.renorm_interval");
  c.lyapunov.n_realizations = count(r, "lyapunov.n_realizations");
  c.lyapunov.x0_radius = non_negative(r, "lyapunov.x0_radius");
  c.lyapunov.fd_epsilon = non_negative(r, "lyapunov.fd_epsilon");
  check(c.lyapunov.fd_epsilon == 0.0 || (c.lyapunov.fd_epsilon >= 1e-7 && c.lyapunov.fd_epsilon <= 1e-2),
        "lyapunov.fd_epsilon: must be 0 (off) or lie in [1e-7, 1e-2]");

  c.sweep.kappas = r.reals("sweep.kappas");
  check(!c.sweep.kappas.empty(), "sweep.kappas: must not be empty");
  for (std::size_t i = 0; i < c.sweep.kappas.size(); ++i) {
    check(c.sweep.kappas[i] > 0.0, "sweep.kappas: values must be positive");
    check(i == 0 || c.sweep.kappas[i] > c.sweep.kappas[i - 1], "sweep.kappas: values must be increasing");
  }

  c.sync.horizon = positive(r, "sync.horizon");
  c.sync.n_seeds = count(r, "sync.n_seeds");
  c.sync.initials = r.points("sync.initials");
  check(c.sync.initials.empty() || c.sync.initials.size() >= 2, "sync.initials: need at least two points");
  c.sync.record_stride = static_cast<std::size_t>(count(r, "sync.record_stride"));
  c.sync.threshold = positive(r, "sync.threshold");

  c.atoms.t_back = positive(r, "atoms.t_back");
  c.atoms.n_initials = count(r, "atoms.n_initials");
  c.atoms.ball_radius = non_negative(r, "atoms.ball_radius");
  c.atoms.cluster_radius = non_negative(r, "atoms.cluster_radius");
  c.atoms.n_seeds = count(r, "atoms.n_seeds");

  c.attractor.schedule = r.reals("attractor.schedule");
  check(!c.attractor.schedule.empty(), "attractor.schedule: must not be empty");
  for (double t : c.attractor.schedule) check(t >= 0.0, "attractor.schedule: times must be non-negative");
  c.attractor.n_initials = count(r, "attractor.n_initials");
  c.attractor.ball_radius = non_negative(r, "attractor.ball_radius");
  c.attractor.n_seeds = count(r, "attractor.n_seeds");

  c.ergodic.horizon = positive(r, "ergodic.horizon");
  c.ergodic.n_realizations = count(r, "ergodic.n_realizations");
  c.ergodic.test_fn = r.text("ergodic.test_fn");
  check(c.ergodic.test_fn == "one" || c.ergodic.test_fn == "clipped_square",
        "ergodic.test_fn: must be 'one' or 'clipped_square'");
  c.ergodic.clip = positive(r, "ergodic.clip");
  c.ergodic.x0 = r.reals("ergodic.x0");

  c.pushout.v_factors = r.reals("pushout.v_factors");
  check(!c.pushout.v_factors.empty(), "pushout.v_factors: must not be empty");
  for (double v : c.pushout.v_factors) check(v > 0.0, "pushout.v_factors: values must be positive");
  c.pushout.horizon = positive(r, "pushout.horizon");
  c.pushout.n_initials = count(r, "pushout.n_initials");
  c.pushout.initial_radius = non_negative(r, "pushout.initial_radius");
  c.pushout.r2 = non_negative(r, "pushout.r2");
  c.pushout.conditioned.enabled = r.boolean("pushout.conditioned.enabled");
  c.pushout.conditioned.v = positive(r, "pushout.conditioned.v");
  c.pushout.conditioned.delta = positive(r, "pushout.conditioned.delta");
  c.pushout.conditioned.horizon = positive(r, "pushout.conditioned.horizon");
  c.pushout.conditioned.n_attempts = count(r, "pushout.conditioned.n_attempts");
  c.pushout.conditioned.max_reports = count(r, "pushout.conditioned.max_reports");

  c.validate_noise.hursts = r.reals("validate_noise.hursts");
  check(!c.validate_noise.hursts.empty(), "validate_noise.hursts: must not be empty");
  for (double h : c.validate_noise.hursts) check(h > 0.0 && h < 1.0, "validate_noise.hursts: values must lie in (0, 1)");
  c.validate_noise.nodes = static_cast<std::size_t>(count(r, "validate_noise.nodes"));
  c.validate_noise.paths = count(r, "validate_noise.paths");
  check(c.validate_noise.paths >= 2, "validate_noise.paths: need at least two paths");
  c.validate_noise.max_lag = static_cast<std::size_t>(count(r, "validate_noise.max_lag"));
  check(c.validate_noise.max_lag < c.validate_noise.nodes, "validate_noise.max_lag: must be below nodes");
  c.validate_noise.rel_tolerance = positive(r, "validate_noise.rel_tolerance");
  c.validate_noise.whiteness_seeds = count(r, "validate_noise.whiteness_seeds");

  // Cross-field checks against the operations the config feeds.
  const auto d = static_cast<std::size_t>(c.drift.dim);
  check(c.simulate.x0.empty() || c.simulate.x0.size() == d, "simulate.x0: must have drift.dim entries");
  check(c.ergodic.x0.empty() || c.ergodic.x0.size() == d, "ergodic.x0: must have drift.dim entries");
  for (const auto& p : c.sync.initials) check(p.size() == d, "sync.initials: every point needs drift.dim entries");
  check(c.sigma_matrix.empty() || c.sigma_matrix.size() == d * d, "sigma.matrix: must have drift.dim^2 entries");
  for (double t : {c.simulate.horizon, c.lyapunov.horizon, c.sync.horizon, c.atoms.t_back, c.ergodic.horizon,
                   c.pushout.horizon}) {
    check(t >= c.dt, "horizons must be at least one step dt");
  }
  check(c.lyapunov.burn_in < c.lyapunov.horizon, "lyapunov.burn_in: must be below lyapunov.horizon");
  std::shared_ptr<const DriftModel> model;
  try {
    model = make_drift(c.drift);
    (void)c.diffusion();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  if (c.enforce_bounded_jacobian && c.hurst > 0.5 && !std::isfinite(model->constants().lipschitz)) {
    throw ConfigError("drift '" + c.drift.name + "' has unbounded DF, which drift.enforce_bounded_jacobian forbids for H > 1/2");
  }
  return c;
}

json defaults_tree() { return to_json(ExperimentConfig{}); }

}  // namespace

DiffusionMatrix ExperimentConfig::diffusion() const {
  if (sigma_matrix.empty()) return DiffusionMatrix::scaled_identity(kappa, drift.dim);
  Mat m(drift.dim, drift.dim);
  for (int i = 0; i < drift.dim; ++i) {
    for (int j = 0; j < drift.dim; ++j) m(i, j) = sigma_matrix[static_cast<std::size_t>(i * drift.dim + j)];
  }
  return DiffusionMatrix::from_matrix(m);
}

nlohmann::json to_json(const ExperimentConfig& c) {
  json params = json::object();
  for (const auto& [k, v] : c.drift.params) params[k] = v;
  json initials = json::array();
  for (const auto& p : c.sync.initials) initials.push_back(p);
  return json{
      {"drift",
       {{"name", c.drift.name},
        {"dim", c.drift.dim},
        {"params", params},
        {"matrix", c.drift.matrix},
        {"enforce_bounded_jacobian", c.enforce_bounded_jacobian}}},
      {"hurst", c.hurst},
      {"sigma", {{"kappa", c.kappa}, {"matrix", c.sigma_matrix}}},
      {"dt", c.dt},
      {"seed", c.seed},
      {"threads", c.threads},
      {"output_dir", c.output_dir},
      {"simulate",
       {{"horizon", c.simulate.horizon},
        {"x0", c.simulate.x0},
        {"record_stride", c.simulate.record_stride},
        {"with_jacobian", c.simulate.with_jacobian}}},
      {"lyapunov",
       {{"horizon", c.lyapunov.horizon},
        {"burn_in", c.lyapunov.burn_in},
        {"renorm_interval", c.lyapunov.renorm_interval},
        {"n_realizations", c.lyapunov.n_realizations},
        {"x0_radius", c.lyapunov.x0_radius},
        {"fd_epsilon", c.lyapunov.fd_epsilon}}},
      {"sweep", {{"kappas", c.sweep.kappas}}},
      {"sync",
       {{"horizon", c.sync.horizon},
        {"n_seeds", c.sync.n_seeds},
        {"initials", initials},
        {"record_stride", c.sync.record_stride},
        {"threshold", c.sync.threshold}}},
      {"atoms",
       {{"t_back", c.atoms.t_back},
        {"n_initials", c.atoms.n_initials},
        {"ball_radius", c.atoms.ball_radius},
        {"cluster_radius", c.atoms.cluster_radius},
        {"n_seeds", c.atoms.n_seeds}}},
      {"attractor",
       {{"schedule", c.attractor.schedule},
        {"n_initials", c.attractor.n_initials},
        {"ball_radius", c.attractor.ball_radius},
        {"n_seeds", c.attractor.n_seeds}}},
      {"ergodic",
       {{"horizon", c.ergodic.horizon},
        {"n_realizations", c.ergodic.n_realizations},
        {"test_fn", c.ergodic.test_fn},
        {"clip", c.ergodic.clip},
        {"x0", c.ergodic.x0}}},
      {"pushout",
       {{"v_factors", c.pushout.v_factors},
        {"horizon", c.pushout.horizon},
        {"n_initials", c.pushout.n_initials},
        {"initial_radius", c.pushout.initial_radius},
        {"r2", c.pushout.r2},
        {"conditioned",
         {{"enabled", c.pushout.conditioned.enabled},
          {"v", c.pushout.conditioned.v},
          {"delta", c.pushout.conditioned.delta},
          {"horizon", c.pushout.conditioned.horizon},
          {"n_attempts", c.pushout.conditioned.n_attempts},
          {"max_reports", c.pushout.conditioned.max_reports}}}}},
      {"validate_noise",
       {{"hursts", c.validate_noise.hursts},
        {"nodes", c.validate_noise.nodes},
        {"paths", c.validate_noise.paths},
        {"max_lag", c.validate_noise.max_lag},
        {"rel_tolerance", c.validate_noise.rel_tolerance},
        {"whiteness_seeds", c.validate_noise.whiteness_seeds}}},
  };
}

ExperimentConfig parse_config(const std::string& yaml_text, const std::vector<std::string>& overrides) {
  json user;
  try {
    user = yaml_to_json(YAML::Load(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed YAML: ") + e.what());
  }
  if (user.is_null()) user = json::object();
  if (!user.is_object()) throw ConfigError("config must be a mapping at the top level");
  for (const auto& o : overrides) apply_override(user, o);

  const json defaults = defaults_tree();
  check_known(user, defaults, "");
  json merged = defaults;
  // Free-form params replace the default mapping rather than merge into it.
  if (user.contains("drift") && user["drift"].contains("params")) merged["drift"]["params"] = json::object();
  merged.merge_patch(user);
  // merge_patch drops keys set to null; restore their defaults.
  check_known(merged, defaults, "");
  for (const auto& [key, value] : defaults.items()) {
    if (!merged.contains(key)) merged[key] = value;
    if (value.is_object()) {
      for (const auto& [sub, v] : value.items()) {
        if (!merged[key].contains(sub)) merged[key][sub] = v;
      }
    }
  }
  if (merged["pushout"].contains("conditioned")) {
    for (const auto& [sub, v] : defaults["pushout"]["conditioned"].items()) {
      if (!merged["pushout"]["conditioned"].contains(sub)) merged["pushout"]["conditioned"][sub] = v;
    }
  }
  return from_tree(merged);
}

ExperimentConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file '" + file.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str(), overrides);
  } catch (const ConfigError& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

std::string to_yaml(const ExperimentConfig& config) {
  YAML::Emitter out;
  emit_json(out, to_json(config));
  return std::string(out.c_str()) + "\n";
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) { return to_json(a) == to_json(b); }

}  // namespace fracsync
