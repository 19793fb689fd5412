#include "risjam/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace risjam {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

namespace {

enum class Kind { real, integer, seed, boolean, vec3, power, ratio, angle, fading };

struct Field {
  const char* section;
  const char* key;
  Kind kind;
  std::function<void*(Scenario&)> target;
};

template <typename M>
std::function<void*(Scenario&)> at(M Scenario::*part, auto M::*member) {
  return [part, member](Scenario& s) -> void* { return &((s.*part).*member); };
}

const std::vector<Field>& schema() {
  static const std::vector<Field> fields = {
      {"geometry", "bs_position", Kind::vec3, at(&Scenario::system, &ScenarioConfig::bs_position)},
      {"geometry", "jammer_position", Kind::vec3, at(&Scenario::system, &ScenarioConfig::jammer_position)},
      {"geometry", "ris_reference", Kind::vec3, at(&Scenario::system, &ScenarioConfig::ris_reference)},
      {"geometry", "uav_start", Kind::vec3, at(&Scenario::system, &ScenarioConfig::uav_start)},
      {"geometry", "uav_goal", Kind::vec3, at(&Scenario::system, &ScenarioConfig::uav_goal)},
      {"ris", "rows", Kind::integer, at(&Scenario::system, &ScenarioConfig::ris_rows)},
      {"ris", "cols", Kind::integer, at(&Scenario::system, &ScenarioConfig::ris_cols)},
      {"ris", "element_spacing", Kind::real, at(&Scenario::system, &ScenarioConfig::element_spacing_ratio)},
      {"timing", "mission_time", Kind::real, at(&Scenario::system, &ScenarioConfig::mission_time)},
      {"timing", "slot_length", Kind::real, at(&Scenario::system, &ScenarioConfig::slot_length)},
      {"power", "tx_power", Kind::power, at(&Scenario::system, &ScenarioConfig::tx_power)},
      {"power", "jammer_power", Kind::power, at(&Scenario::system, &ScenarioConfig::jammer_power)},
      {"power", "noise_power", Kind::power, at(&Scenario::system, &ScenarioConfig::noise_power)},
      {"kinematics", "max_accel", Kind::real, at(&Scenario::kinematics, &KinematicLimits::max_accel)},
      {"kinematics", "max_speed", Kind::real, at(&Scenario::kinematics, &KinematicLimits::max_speed)},
      {"kinematics", "min_speed", Kind::real, at(&Scenario::kinematics, &KinematicLimits::min_speed)},
      {"kinematics", "max_pitch", Kind::angle, at(&Scenario::kinematics, &KinematicLimits::max_pitch)},
      {"channel", "ref_path_loss", Kind::ratio, at(&Scenario::channel, &ChannelParams::ref_path_loss)},
      {"channel", "exponent_direct", Kind::real, at(&Scenario::channel, &ChannelParams::exponent_direct)},
      {"channel", "exponent_ris", Kind::real, at(&Scenario::channel, &ChannelParams::exponent_ris)},
      {"channel", "rician_xi1", Kind::real, at(&Scenario::channel, &ChannelParams::rician_xi1)},
      {"channel", "rician_xi2", Kind::real, at(&Scenario::channel, &ChannelParams::rician_xi2)},
      {"channel", "rician_ris", Kind::ratio, at(&Scenario::channel, &ChannelParams::rician_ris)},
      {"channel", "ris_link_fading", Kind::fading, at(&Scenario::channel, &ChannelParams::ris_link_fading)},
      {"training", "discount", Kind::real, at(&Scenario::hyper, &HyperParams::discount)},
      {"training", "actor_lr", Kind::real, at(&Scenario::hyper, &HyperParams::actor_lr)},
      {"training", "critic_lr", Kind::real, at(&Scenario::hyper, &HyperParams::critic_lr)},
      {"training", "tau_actor", Kind::real, at(&Scenario::hyper, &HyperParams::tau_actor)},
      {"training", "tau_critic", Kind::real, at(&Scenario::hyper, &HyperParams::tau_critic)},
      {"training", "replay_capacity", Kind::integer, at(&Scenario::hyper, &HyperParams::replay_capacity)},
      {"training", "episodes", Kind::integer, at(&Scenario::hyper, &HyperParams::episodes)},
      {"training", "steps_per_episode", Kind::integer, at(&Scenario::hyper, &HyperParams::steps_per_episode)},
      {"training", "batch_size", Kind::integer, at(&Scenario::hyper, &HyperParams::batch_size)},
      {"training", "exploration_noise_var", Kind::real, at(&Scenario::hyper, &HyperParams::exploration_noise_var)},
      {"training", "policy_noise_var", Kind::real, at(&Scenario::hyper, &HyperParams::policy_noise_var)},
      {"training", "noise_clip", Kind::real, at(&Scenario::hyper, &HyperParams::noise_clip)},
      {"training", "policy_delay", Kind::integer, at(&Scenario::hyper, &HyperParams::policy_delay)},
      {"training", "reward_weight", Kind::real, at(&Scenario::hyper, &HyperParams::reward_weight)},
      {"training", "warmup_random_steps", Kind::integer, at(&Scenario::hyper, &HyperParams::warmup_random_steps)},
      {"training", "mask_time_limit", Kind::boolean, at(&Scenario::hyper, &HyperParams::mask_time_limit)},
      {"run", "seed", Kind::seed, at(&Scenario::run, &RunOptions::seed)},
      {"run", "random_goal", Kind::boolean, at(&Scenario::run, &RunOptions::random_goal)},
      {"run", "baseline_snr_only", Kind::boolean, at(&Scenario::run, &RunOptions::baseline_snr_only)},
      {"run", "eval_episodes", Kind::integer, at(&Scenario::run, &RunOptions::eval_episodes)},
      {"run", "checkpoint_interval", Kind::integer, at(&Scenario::run, &RunOptions::checkpoint_interval)},
  };
  return fields;
}

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

// Splits "<number> <unit>" and returns the number.
double parse_number(const std::string& name, const std::string& raw, std::string* unit) {
  std::string text = trim(raw);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(name + ": expected a number, got '" + raw + "'");
  }
  std::string rest = trim(std::string_view(text).substr(used));
  if (unit) {
    *unit = rest;
  } else if (!rest.empty()) {
    throw ConfigError(name + ": unexpected trailing text '" + rest + "'");
  }
  if (!std::isfinite(value)) throw ConfigError(name + ": value must be finite");
  return value;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void parse_field(const Field& field, const std::string& value, Scenario& s) {
  // Inline comments are not stripped by the INI reader.
  const std::string raw = trim(value.substr(0, value.find_first_of(";#")));
  const std::string name = std::string(field.section) + "." + field.key;
  void* target = field.target(s);
  std::string unit;
  switch (field.kind) {
    case Kind::real:
      *static_cast<double*>(target) = parse_number(name, raw, nullptr);
      break;
    case Kind::integer: {
      const double v = parse_number(name, raw, nullptr);
      if (v != std::floor(v) || std::abs(v) > 2e9) {
        throw ConfigError(name + ": expected an integer, got '" + raw + "'");
      }
      *static_cast<int*>(target) = static_cast<int>(v);
      break;
    }
    case Kind::seed: {
      const std::string text = trim(raw);
      try {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used);
        if (used != text.size() || text.starts_with('-')) throw std::invalid_argument("seed");
        *static_cast<std::uint64_t*>(target) = v;
      } catch (const std::exception&) {
        throw ConfigError(name + ": expected an unsigned integer, got '" + raw + "'");
      }
      break;
    }
    case Kind::boolean: {
      const std::string text = trim(raw);
      if (text == "true" || text == "1") {
        *static_cast<bool*>(target) = true;
      } else if (text == "false" || text == "0") {
        *static_cast<bool*>(target) = false;
      } else {
        throw ConfigError(name + ": expected true/false, got '" + raw + "'");
      }
      break;
    }
    case Kind::vec3: {
      std::vector<double> parts;
      std::stringstream ss(raw);
      std::string item;
      while (std::getline(ss, item, ',')) parts.push_back(parse_number(name, item, nullptr));
      if (parts.size() != 3) throw ConfigError(name + ": expected 'x, y, z', got '" + raw + "'");
      *static_cast<Vec3*>(target) = Vec3(parts[0], parts[1], parts[2]);
      break;
    }
    case Kind::power: {
      const double v = parse_number(name, raw, &unit);
      double watts = v;
      if (unit == "dBm") {
        watts = dbm_to_watts(v);
      } else if (unit == "dBW") {
        watts = db_to_linear(v);
      } else if (unit == "mW") {
        watts = v * 1e-3;
      } else if (!unit.empty() && unit != "W") {
        throw ConfigError(name + ": unknown power unit '" + unit + "' (use W, mW, dBm or dBW)");
      }
      *static_cast<double*>(target) = watts;
      break;
    }
    case Kind::ratio: {
      const double v = parse_number(name, raw, &unit);
      if (unit == "dB") {
        *static_cast<double*>(target) = db_to_linear(v);
      } else if (unit.empty()) {
        *static_cast<double*>(target) = v;
      } else {
        throw ConfigError(name + ": unknown ratio unit '" + unit + "' (use dB or a bare linear value)");
      }
      break;
    }
    case Kind::angle: {
      const double v = parse_number(name, raw, &unit);
      if (unit == "deg") {
        *static_cast<double*>(target) = v * std::numbers::pi / 180.0;
      } else if (unit.empty() || unit == "rad") {
        *static_cast<double*>(target) = v;
      } else {
        throw ConfigError(name + ": unknown angle unit '" + unit + "' (use deg or rad)");
      }
      break;
    }
    case Kind::fading: {
      const std::string text = trim(raw);
      if (text == "per_episode") {
        *static_cast<RisLinkFading*>(target) = RisLinkFading::per_episode;
      } else if (text == "per_slot") {
        *static_cast<RisLinkFading*>(target) = RisLinkFading::per_slot;
      } else {
        throw ConfigError(name + ": expected per_episode or per_slot, got '" + raw + "'");
      }
      break;
    }
  }
}

std::string emit_field(const Field& field, const Scenario& scenario) {
  auto& s = const_cast<Scenario&>(scenario);
  void* target = field.target(s);
  switch (field.kind) {
    case Kind::real:
    case Kind::power:
    case Kind::ratio:
    case Kind::angle:
      return format_real(*static_cast<double*>(target));
    case Kind::integer:
      return std::to_string(*static_cast<int*>(target));
    case Kind::seed:
      return std::to_string(*static_cast<std::uint64_t*>(target));
    case Kind::boolean:
      return *static_cast<bool*>(target) ? "true" : "false";
    case Kind::vec3: {
      const Vec3& v = *static_cast<Vec3*>(target);
      return format_real(v.x()) + ", " + format_real(v.y()) + ", " + format_real(v.z());
    }
    case Kind::fading:
      return *static_cast<RisLinkFading*>(target) == RisLinkFading::per_episode ? "per_episode" : "per_slot";
  }
  return {};
}

const char* unit_comment(Kind kind) {
  switch (kind) {
    case Kind::power: return "  ; W";
    case Kind::ratio: return "  ; linear";
    case Kind::angle: return "  ; rad";
    default: return "";
  }
}

[[noreturn]] void violated(const std::string& what) { throw ConfigError("invalid configuration: " + what); }

std::string kv(const char* name, double value) { return std::string(name) + "=" + format_real(value); }

int derive_slot_count(const ScenarioConfig& sys) {
  if (!(sys.slot_length > 0.0)) violated(kv("timing.slot_length", sys.slot_length) + " must be positive");
  if (!(sys.mission_time > 0.0)) violated(kv("timing.mission_time", sys.mission_time) + " must be positive");
  const double ratio = sys.mission_time / sys.slot_length;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(rounded * sys.slot_length - sys.mission_time) > 1e-9 * sys.mission_time) {
    violated(kv("timing.mission_time", sys.mission_time) + " is not a whole multiple of " +
             kv("timing.slot_length", sys.slot_length));
  }
  return static_cast<int>(rounded);
}

}  // namespace

bool Scenario::operator==(const Scenario& other) const { return to_text(*this) == to_text(other); }

Scenario default_scenario() { return Scenario{}; }

void validate(const Scenario& s) {
  const auto& sys = s.system;
  if (derive_slot_count(sys) != sys.slot_count) {
    violated("slot count " + std::to_string(sys.slot_count) + " does not equal mission_time/slot_length");
  }
  if (sys.ris_rows < 1) violated("ris.rows=" + std::to_string(sys.ris_rows) + " must be >= 1");
  if (sys.ris_cols < 1) violated("ris.cols=" + std::to_string(sys.ris_cols) + " must be >= 1");
  if (!(sys.element_spacing_ratio > 0.0)) violated(kv("ris.element_spacing", sys.element_spacing_ratio) + " must be positive");
  if (!(sys.tx_power > 0.0)) violated(kv("power.tx_power", sys.tx_power) + " must be positive");
  if (!(sys.jammer_power > 0.0)) violated(kv("power.jammer_power", sys.jammer_power) + " must be positive");
  if (!(sys.noise_power > 0.0)) violated(kv("power.noise_power", sys.noise_power) + " must be positive");
  if (sys.jammer_position.z() != 0.0) {
    violated(kv("geometry.jammer_position.z", sys.jammer_position.z()) + " must be 0 (terrestrial jammer)");
  }

  const auto& k = s.kinematics;
  if (!(k.max_accel > 0.0)) violated(kv("kinematics.max_accel", k.max_accel) + " must be positive");
  if (!(k.min_speed > 0.0)) violated(kv("kinematics.min_speed", k.min_speed) + " must be positive");
  if (!(k.min_speed < k.max_speed)) {
    violated(kv("kinematics.min_speed", k.min_speed) + " with " + kv("kinematics.max_speed", k.max_speed) +
             ": v_min >= v_max");
  }
  if (!(k.max_pitch > 0.0 && k.max_pitch < std::numbers::pi / 2)) {
    violated(kv("kinematics.max_pitch", k.max_pitch) + " must lie in (0, pi/2)");
  }

  const auto& c = s.channel;
  if (!(c.ref_path_loss > 0.0)) violated(kv("channel.ref_path_loss", c.ref_path_loss) + " must be positive");
  if (!(c.exponent_direct > 2.0)) violated(kv("channel.exponent_direct", c.exponent_direct) + " must exceed 2");
  if (!(c.rician_ris >= 0.0)) violated(kv("channel.rician_ris", c.rician_ris) + " must be >= 0");
  if (!(c.rician_xi1 >= 0.0)) violated(kv("channel.rician_xi1", c.rician_xi1) + " must be >= 0");

  const auto& h = s.hyper;
  if (!(h.discount > 0.0 && h.discount < 1.0)) violated(kv("training.discount", h.discount) + " must lie in (0, 1)");
  if (!(h.tau_actor > 0.0 && h.tau_actor <= 1.0)) violated(kv("training.tau_actor", h.tau_actor) + " must lie in (0, 1]");
  if (!(h.tau_critic > 0.0 && h.tau_critic <= 1.0)) violated(kv("training.tau_critic", h.tau_critic) + " must lie in (0, 1]");
  if (!(h.actor_lr > 0.0)) violated(kv("training.actor_lr", h.actor_lr) + " must be positive");
  if (!(h.critic_lr > 0.0)) violated(kv("training.critic_lr", h.critic_lr) + " must be positive");
  if (h.batch_size < 1) violated("training.batch_size=" + std::to_string(h.batch_size) + " must be >= 1");
  if (h.batch_size > h.replay_capacity) {
    violated("training.batch_size=" + std::to_string(h.batch_size) + " exceeds training.replay_capacity=" +
             std::to_string(h.replay_capacity));
  }
  if (h.episodes < 1) violated("training.episodes=" + std::to_string(h.episodes) + " must be >= 1");
  if (h.steps_per_episode != sys.slot_count) {
    violated("training.steps_per_episode=" + std::to_string(h.steps_per_episode) +
             " must equal mission_time/slot_length=" + std::to_string(sys.slot_count));
  }
  if (h.policy_delay < 1) violated("training.policy_delay=" + std::to_string(h.policy_delay) + " must be >= 1");
  if (!(h.exploration_noise_var >= 0.0)) violated(kv("training.exploration_noise_var", h.exploration_noise_var) + " must be >= 0");
  if (!(h.policy_noise_var >= 0.0)) violated(kv("training.policy_noise_var", h.policy_noise_var) + " must be >= 0");
  if (!(h.noise_clip >= 0.0)) violated(kv("training.noise_clip", h.noise_clip) + " must be >= 0");
  if (h.warmup_random_steps < 0) violated("training.warmup_random_steps must be >= 0");

  if (s.run.eval_episodes < 1) violated("run.eval_episodes must be >= 1");
  if (s.run.checkpoint_interval < 1) violated("run.checkpoint_interval must be >= 1");
}

Scenario load_scenario(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  Scenario scenario = default_scenario();
  std::set<std::string> seen;
  bool steps_given = false;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("key '" + section + "' must live inside a [section]");
    }
    for (const auto& [key, value] : body) {
      const Field* match = nullptr;
      for (const auto& field : schema()) {
        if (section == field.section && key == field.key) match = &field;
      }
      if (!match) throw ConfigError("unknown key '" + section + "." + key + "'");
      parse_field(*match, value.data(), scenario);
      if (match->key == std::string("steps_per_episode")) steps_given = true;
    }
  }
  scenario.system.slot_count = derive_slot_count(scenario.system);
  if (!steps_given) scenario.hyper.steps_per_episode = scenario.system.slot_count;
  validate(scenario);
  return scenario;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_scenario(buffer.str());
}

void apply_env_overrides(Scenario& scenario) {
  if (const char* seed = std::getenv("RISJAM_SEED")) {
    Field field{"run", "seed", Kind::seed, at(&Scenario::run, &RunOptions::seed)};
    parse_field(field, seed, scenario);
  }
}

std::string to_text(const Scenario& scenario) {
  std::string out;
  std::string current;
  for (const auto& field : schema()) {
    if (current != field.section) {
      if (!current.empty()) out += "\n";
      current = field.section;
      out += "[" + current + "]\n";
    }
    out += std::string(field.key) + " = " + emit_field(field, scenario) + unit_comment(field.kind) + "\n";
  }
  return out;
}

std::string config_hash(const Scenario& scenario) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : to_text(scenario)) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

Scenario with_mission_time(const Scenario& scenario, double mission_time) {
  Scenario out = scenario;
  out.system.mission_time = mission_time;
  out.system.slot_count = derive_slot_count(out.system);
  out.hyper.steps_per_episode = out.system.slot_count;
  validate(out);
  return out;
}

}  // namespace risjam
