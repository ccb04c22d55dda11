#include "ldp/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace ldp {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown config key: " + it.key());
}

} // namespace

ChainSpec load_model_config_text(const std::string& json_text,
                                 std::optional<double> epsilon_override) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("model")) throw ConfigError("config missing \"model\"");
  const std::string model = j.at("model").get<std::string>();

  double epsilon = j.value("epsilon", 0.01);
  double horizon = j.value("horizon", 1.0);
  if (epsilon_override) epsilon = *epsilon_override;

  if (model == "symmetric_walk") {
    check_keys(j, {"model", "dimension", "epsilon", "horizon", "phi0"});
    int d = j.value("dimension", 1);
    ChainSpec spec = builtin_symmetric_walk(d, epsilon, horizon);
    if (j.contains("phi0")) {
      Vec phi0 = j.at("phi0").get<Vec>();
      spec = make_chain_spec(epsilon, spec.jump_set, spec.domain, spec.rate_field,
                             std::move(phi0), horizon, spec.model_id);
    }
    return spec;
  }
  if (model == "curie_weiss") {
    check_keys(j, {"model", "beta", "field_amplitude", "field_frequency", "epsilon",
                   "horizon", "phi0"});
    double beta = j.value("beta", 1.0);
    double amp = j.value("field_amplitude", 0.0);
    double freq = j.value("field_frequency", 1.0);
    double phi0 = 0.0;
    if (j.contains("phi0")) {
      const auto& p = j.at("phi0");
      phi0 = p.is_array() ? p.at(0).get<double>() : p.get<double>();
    }
    return builtin_curie_weiss(beta, amp, freq, epsilon, horizon, phi0);
  }
  throw ConfigError("unknown model kind: " + model);
}

ChainSpec load_model_config(const std::string& path,
                            std::optional<double> epsilon_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model_config_text(ss.str(), epsilon_override);
}

std::uint64_t file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

} // namespace ldp
