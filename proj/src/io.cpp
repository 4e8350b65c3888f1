#include "trajmatch/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace trajmatch {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::filesystem::path& file,
                       const std::string& what) {
  throw std::runtime_error(file.string() + ": " + what);
}

[[noreturn]] void fail_line(const std::filesystem::path& file,
                            std::size_t line, const std::string& what) {
  fail(file, "line " + std::to_string(line) + ": " + what);
}

double finite_number(const json& j, const std::string& where) {
  if (!j.is_number()) {
    throw std::runtime_error(where + " must be a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    throw std::runtime_error(where + " must be finite");
  }
  return v;
}

// Reads keys out of one JSON object and complains, with the dotted path,
// about any key nobody asked for. Every config object goes through this so
// a typo fails instead of silently falling back to a default.
class StrictObject {
 public:
  StrictObject(const json& j, std::string path)
      : obj_(j), path_(std::move(path)) {
    if (!j.is_object()) {
      throw std::runtime_error(path_ + " must be a JSON object");
    }
  }

  const json* take(const std::string& key) {
    if (!obj_.contains(key)) return nullptr;
    consumed_.insert(key);
    return &obj_.at(key);
  }

  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void read_double(const std::string& key, double& out) {
    if (const json* j = take(key)) out = finite_number(*j, child_path(key));
  }

  void read_int(const std::string& key, int& out) {
    if (const json* j = take(key)) {
      if (!j->is_number_integer()) {
        throw std::runtime_error(child_path(key) + " must be an integer");
      }
      out = j->get<int>();
    }
  }

  void read_size(const std::string& key, std::size_t& out) {
    if (const json* j = take(key)) {
      if (!j->is_number_unsigned() &&
          !(j->is_number_integer() && j->get<long long>() >= 0)) {
        throw std::runtime_error(child_path(key) +
                                 " must be a non-negative integer");
      }
      out = j->get<std::size_t>();
    }
  }

  void read_u64(const std::string& key, std::uint64_t& out) {
    if (const json* j = take(key)) {
      if (!j->is_number_unsigned() &&
          !(j->is_number_integer() && j->get<long long>() >= 0)) {
        throw std::runtime_error(child_path(key) +
                                 " must be a non-negative integer");
      }
      out = j->get<std::uint64_t>();
    }
  }

  void read_ranges(const std::string& key, std::array<AxisRange, 3>& out) {
    const json* j = take(key);
    if (!j) return;
    const std::string where = child_path(key);
    if (!j->is_array() || j->size() != 3) {
      throw std::runtime_error(where + " must be an array of 3 [lo, hi] pairs");
    }
    for (std::size_t a = 0; a < 3; ++a) {
      const json& pair = (*j)[a];
      const std::string axis = where + "[" + std::to_string(a) + "]";
      if (!pair.is_array() || pair.size() != 2) {
        throw std::runtime_error(axis + " must be a [lo, hi] pair");
      }
      out[a].lo = finite_number(pair[0], axis + "[0]");
      out[a].hi = finite_number(pair[1], axis + "[1]");
    }
  }

  // Call after all reads; rejects everything not consumed.
  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      (void)value;
      if (!consumed_.contains(key)) {
        throw std::runtime_error("unknown key: " + child_path(key));
      }
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> consumed_;
};

json ranges_to_json(const std::array<AxisRange, 3>& r) {
  json out = json::array();
  for (const AxisRange& a : r) out.push_back(json::array({a.lo, a.hi}));
  return out;
}

void read_env(StrictObject& root, EnvConfig& env) {
  const json* j = root.take("env");
  if (!j) return;
  StrictObject o(*j, root.child_path("env"));
  o.read_double("channel_half_width", env.channel_half_width);
  o.read_double("channel_depth", env.channel_depth);
  o.read_double("plug_radius", env.plug_radius);
  o.read_double("block_half_extent", env.block_half_extent);
  o.read_ranges("socket_position_ranges", env.socket_position_ranges);
  o.read_ranges("plug_offset_ranges", env.plug_offset_ranges);
  o.read_ranges("observation_noise_ranges", env.observation_noise_ranges);
  o.read_double("observation_rotation_noise_deg",
                env.observation_rotation_noise_deg);
  o.read_size("max_steps", env.max_steps);
  o.read_double("action_step", env.action_step);
  o.read_double("success_tolerance", env.success_tolerance);
  o.read_double("demo_lateral_range", env.demo_lateral_range);
  o.read_double("demo_height_min", env.demo_height_min);
  o.read_double("demo_height_max", env.demo_height_max);
  o.read_double("mouth_clearance", env.mouth_clearance);
  o.read_double("drift_climb_slope", env.drift_climb_slope);
  o.read_double("demo_waypoint_spacing", env.demo_waypoint_spacing);
  o.finish();
}

void read_reward(StrictObject& root, RewardConfig& reward) {
  const json* j = root.take("reward");
  if (!j) return;
  StrictObject o(*j, root.child_path("reward"));
  o.read_double("omega_baseline", reward.omega_baseline);
  o.read_double("omega_imitation", reward.omega_imitation);
  o.read_double("omega_distance", reward.omega_distance);
  o.read_double("sapu_weight", reward.sapu_weight);
  o.read_double("success_bonus", reward.success_bonus);
  o.read_double("success_threshold", reward.success_threshold);
  o.read_double("goal_distance_scale", reward.goal_distance_scale);
  o.read_int("signature_level", reward.signature_level);
  o.finish();
}

void read_curriculum_config(StrictObject& root, CurriculumConfig& cur) {
  const json* j = root.take("curriculum");
  if (!j) return;
  StrictObject o(*j, root.child_path("curriculum"));
  o.read_int("num_stages", cur.num_stages);
  o.read_double("height_min_initial", cur.height_min_initial);
  o.read_double("height_min_final", cur.height_min_final);
  o.read_double("height_max", cur.height_max);
  o.read_size("window", cur.window);
  o.read_double("advance_threshold", cur.advance_threshold);
  o.finish();
}

json env_to_json(const EnvConfig& e) {
  json j;
  j["channel_half_width"] = e.channel_half_width;
  j["channel_depth"] = e.channel_depth;
  j["plug_radius"] = e.plug_radius;
  j["block_half_extent"] = e.block_half_extent;
  j["socket_position_ranges"] = ranges_to_json(e.socket_position_ranges);
  j["plug_offset_ranges"] = ranges_to_json(e.plug_offset_ranges);
  j["observation_noise_ranges"] = ranges_to_json(e.observation_noise_ranges);
  j["observation_rotation_noise_deg"] = e.observation_rotation_noise_deg;
  j["max_steps"] = e.max_steps;
  j["action_step"] = e.action_step;
  j["success_tolerance"] = e.success_tolerance;
  j["demo_lateral_range"] = e.demo_lateral_range;
  j["demo_height_min"] = e.demo_height_min;
  j["demo_height_max"] = e.demo_height_max;
  j["mouth_clearance"] = e.mouth_clearance;
  j["drift_climb_slope"] = e.drift_climb_slope;
  j["demo_waypoint_spacing"] = e.demo_waypoint_spacing;
  return j;
}

json reward_to_json(const RewardConfig& r) {
  json j;
  j["omega_baseline"] = r.omega_baseline;
  j["omega_imitation"] = r.omega_imitation;
  j["omega_distance"] = r.omega_distance;
  j["sapu_weight"] = r.sapu_weight;
  j["success_bonus"] = r.success_bonus;
  j["success_threshold"] = r.success_threshold;
  j["goal_distance_scale"] = r.goal_distance_scale;
  j["signature_level"] = r.signature_level;
  return j;
}

json curriculum_config_to_json(const CurriculumConfig& c) {
  json j;
  j["num_stages"] = c.num_stages;
  j["height_min_initial"] = c.height_min_initial;
  j["height_min_final"] = c.height_min_final;
  j["height_max"] = c.height_max;
  j["window"] = c.window;
  j["advance_threshold"] = c.advance_threshold;
  return j;
}

}  // namespace

void save_demoset(const DemoSet& set, const std::filesystem::path& file) {
  if (set.empty()) {
    throw std::invalid_argument("refusing to save an empty demo set");
  }
  for (const Demo& d : set.demos) validate_path(d.path);
  std::ofstream out(file);
  if (!out) fail(file, "cannot open for writing");
  for (const Demo& d : set.demos) {
    json j;
    j["demo_id"] = d.demo_id;
    j["assembly_id"] = set.assembly_id;
    j["source"] = d.source == DemoSource::generated ? "generated" : "imported";
    j["seed"] = d.seed;
    json pts = json::array();
    for (const Vec3& p : d.path.points) {
      pts.push_back(json::array({p.x, p.y, p.z}));
    }
    j["points"] = std::move(pts);
    out << j.dump() << '\n';
  }
  if (!out) fail(file, "write failed");
}

DemoSet load_demoset(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(file, "cannot open");
  DemoSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail_line(file, line_no, std::string("not valid JSON (") + e.what() + ")");
    }
    try {
      StrictObject o(j, "");
      Demo d;
      const json* id = o.take("demo_id");
      if (!id || !id->is_string()) {
        throw std::runtime_error("demo_id must be a string");
      }
      d.demo_id = id->get<std::string>();
      const json* assembly = o.take("assembly_id");
      if (!assembly || !assembly->is_string()) {
        throw std::runtime_error("assembly_id must be a string");
      }
      const json* source = o.take("source");
      if (!source || !source->is_string()) {
        throw std::runtime_error("source must be a string");
      }
      const std::string src = source->get<std::string>();
      if (src == "generated") {
        d.source = DemoSource::generated;
      } else if (src == "imported") {
        d.source = DemoSource::imported;
      } else {
        throw std::runtime_error("source must be \"generated\" or \"imported\"");
      }
      o.read_u64("seed", d.seed);
      const json* pts = o.take("points");
      if (!pts || !pts->is_array() || pts->empty()) {
        throw std::runtime_error("points must be a non-empty array");
      }
      d.path.points.reserve(pts->size());
      for (std::size_t k = 0; k < pts->size(); ++k) {
        const json& p = (*pts)[k];
        const std::string where = "points[" + std::to_string(k) + "]";
        if (!p.is_array() || p.size() != 3) {
          throw std::runtime_error(where + " must be an [x, y, z] triple");
        }
        d.path.points.push_back({finite_number(p[0], where + "[0]"),
                                 finite_number(p[1], where + "[1]"),
                                 finite_number(p[2], where + "[2]")});
      }
      o.finish();
      const std::string asm_id = assembly->get<std::string>();
      if (set.demos.empty()) {
        set.assembly_id = asm_id;
      } else if (asm_id != set.assembly_id) {
        throw std::runtime_error("assembly_id \"" + asm_id +
                                 "\" does not match \"" + set.assembly_id +
                                 "\"");
      }
      set.demos.push_back(std::move(d));
    } catch (const std::runtime_error& e) {
      fail_line(file, line_no, e.what());
    }
  }
  if (set.demos.empty()) {
    fail(file, "no demo records (empty file)");
  }
  return set;
}

void save_path_file(const Path& path, const std::filesystem::path& file) {
  validate_path(path);
  std::ofstream out(file);
  if (!out) fail(file, "cannot open for writing");
  for (const Vec3& p : path.points) {
    out << json::array({p.x, p.y, p.z}).dump() << '\n';
  }
  if (!out) fail(file, "write failed");
}

Path load_path_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(file, "cannot open");
  Path path;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail_line(file, line_no, std::string("not valid JSON (") + e.what() + ")");
    }
    try {
      if (!j.is_array() || j.size() != 3) {
        throw std::runtime_error("expected an [x, y, z] triple");
      }
      path.points.push_back({finite_number(j[0], "x"), finite_number(j[1], "y"),
                             finite_number(j[2], "z")});
    } catch (const std::runtime_error& e) {
      fail_line(file, line_no, e.what());
    }
  }
  if (path.points.empty()) {
    fail(file, "no points (empty file)");
  }
  return path;
}

ExperimentConfig experiment_config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("not valid JSON (") + e.what() + ")");
  }
  ExperimentConfig cfg;
  StrictObject root(j, "");
  read_env(root, cfg.env);
  read_reward(root, cfg.reward);
  read_curriculum_config(root, cfg.curriculum);
  if (const json* schemes = root.take("schemes")) {
    if (!schemes->is_array() || schemes->empty()) {
      throw std::runtime_error("schemes must be a non-empty array");
    }
    cfg.schemes.clear();
    for (std::size_t i = 0; i < schemes->size(); ++i) {
      const json& s = (*schemes)[i];
      const std::string where = "schemes[" + std::to_string(i) + "]";
      if (!s.is_string()) {
        throw std::runtime_error(where + " must be a string");
      }
      const auto parsed = scheme_from_name(s.get<std::string>());
      if (!parsed) {
        throw std::runtime_error(
            where + " must be one of none, state, dtw, signature");
      }
      cfg.schemes.push_back(*parsed);
    }
  }
  root.read_size("demo_count", cfg.demo_count);
  root.read_size("episodes_per_scheme", cfg.episodes_per_scheme);
  root.read_u64("seed", cfg.seed);
  root.finish();
  validate_env_config(cfg.env);
  validate_reward_config(cfg.reward);
  validate_curriculum_config(cfg.curriculum);
  if (cfg.demo_count == 0) {
    throw std::runtime_error("demo_count must be >= 1");
  }
  if (cfg.episodes_per_scheme == 0) {
    throw std::runtime_error("episodes_per_scheme must be >= 1");
  }
  return cfg;
}

std::string experiment_config_to_json_text(const ExperimentConfig& cfg) {
  json j;
  j["env"] = env_to_json(cfg.env);
  j["reward"] = reward_to_json(cfg.reward);
  j["curriculum"] = curriculum_config_to_json(cfg.curriculum);
  json schemes = json::array();
  for (Scheme s : cfg.schemes) schemes.push_back(scheme_name(s));
  j["schemes"] = std::move(schemes);
  j["demo_count"] = cfg.demo_count;
  j["episodes_per_scheme"] = cfg.episodes_per_scheme;
  j["seed"] = cfg.seed;
  return j.dump(2) + "\n";
}

ExperimentConfig load_experiment_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(file, "cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return experiment_config_from_json_text(buf.str());
  } catch (const std::runtime_error& e) {
    fail(file, e.what());
  }
}

void save_experiment_config(const ExperimentConfig& cfg,
                            const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) fail(file, "cannot open for writing");
  out << experiment_config_to_json_text(cfg);
  if (!out) fail(file, "write failed");
}

void save_curriculum(const CurriculumState& s,
                     const std::filesystem::path& file) {
  json j;
  j["config"] = curriculum_config_to_json(s.config);
  j["stage"] = s.stage;
  json recent = json::array();
  for (bool b : s.recent) recent.push_back(b);
  j["recent"] = std::move(recent);
  std::ofstream out(file);
  if (!out) fail(file, "cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) fail(file, "write failed");
}

CurriculumState load_curriculum(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(file, "cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    json j = json::parse(buf.str());
    StrictObject root(j, "");
    CurriculumState s;
    if (const json* cfg = root.take("config")) {
      StrictObject o(*cfg, "config");
      o.read_int("num_stages", s.config.num_stages);
      o.read_double("height_min_initial", s.config.height_min_initial);
      o.read_double("height_min_final", s.config.height_min_final);
      o.read_double("height_max", s.config.height_max);
      o.read_size("window", s.config.window);
      o.read_double("advance_threshold", s.config.advance_threshold);
      o.finish();
    }
    root.read_int("stage", s.stage);
    if (const json* recent = root.take("recent")) {
      if (!recent->is_array()) {
        throw std::runtime_error("recent must be an array of booleans");
      }
      for (const json& b : *recent) {
        if (!b.is_boolean()) {
          throw std::runtime_error("recent must be an array of booleans");
        }
        s.recent.push_back(b.get<bool>());
      }
    }
    root.finish();
    validate_curriculum_config(s.config);
    if (s.stage < 1 || s.stage > s.config.num_stages) {
      throw std::runtime_error("stage out of range");
    }
    if (s.recent.size() > s.config.window) {
      throw std::runtime_error("recent window longer than configured window");
    }
    return s;
  } catch (const json::parse_error& e) {
    fail(file, std::string("not valid JSON (") + e.what() + ")");
  } catch (const std::runtime_error& e) {
    fail(file, e.what());
  }
}

void save_scheme_reports(const std::vector<SchemeReport>& reports,
                         const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) fail(file, "cannot open for writing");
  out << "scheme,episodes,successes,success_rate,mean_steps,mean_return,"
         "wall_ms\n";
  char buf[160];
  for (const SchemeReport& r : reports) {
    std::snprintf(buf, sizeof(buf), "%s,%zu,%zu,%.4f,%.3f,%.6f,%.3f\n",
                  scheme_name(r.scheme).c_str(), r.episodes, r.successes,
                  r.success_rate, r.mean_steps, r.mean_return, r.wall_ms);
    out << buf;
  }
  if (!out) fail(file, "write failed");
}

}  // namespace trajmatch
