#include "dem/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "dem/errors.hpp"

namespace dem {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size() || !std::isfinite(v))
    throw ConfigError("'" + key + "': expected a finite number, got '" + value + "'");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("'" + key + "': expected a non-negative integer, got '" + value + "'");
  return v;
}

Vec3 to_vec3(const std::string& key, const std::string& value) {
  std::vector<double> parts;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(to_double(key, trim(item)));
  if (parts.size() != 3) throw ConfigError("'" + key + "': expected three comma-separated numbers");
  return {parts[0], parts[1], parts[2]};
}

double positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError("'" + key + "' must be positive");
  return v;
}

double non_negative(const std::string& key, double v) {
  if (!(v >= 0.0)) throw ConfigError("'" + key + "' must be non-negative");
  return v;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"scene",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         static const std::map<std::string, SceneKind> kinds = {{"box_slit", SceneKind::box_slit},
                                                                {"random_gas", SceneKind::random_gas},
                                                                {"two_body", SceneKind::two_body},
                                                                {"stack", SceneKind::stack}};
         auto it = kinds.find(v);
         if (it == kinds.end()) throw ConfigError("'" + k + "': unknown scene '" + v + "'");
         c.scene = it->second;
       }},
      {"model",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "simple") c.sim.model = ContactModel::simple;
         else if (v == "practical") c.sim.model = ContactModel::practical;
         else throw ConfigError("'" + k + "': expected simple or practical, got '" + v + "'");
       }},
      {"walls",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "none") c.walls = WallSet::none;
         else if (v == "domain") c.walls = WallSet::domain;
         else throw ConfigError("'" + k + "': expected none or domain, got '" + v + "'");
       }},
      {"particle_count", [](RunConfig& c, const std::string& k, const std::string& v) { c.particle_count = to_u64(k, v); }},
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = to_u64(k, v); }},
      {"output_dir", [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
      {"snapshot_every", [](RunConfig& c, const std::string& k, const std::string& v) { c.snapshot_every = to_u64(k, v); }},
      {"dt", [](RunConfig& c, const std::string& k, const std::string& v) { c.sim.dt = positive(k, to_double(k, v)); }},
      {"gravity", [](RunConfig& c, const std::string& k, const std::string& v) { c.sim.gravity = to_vec3(k, v); }},
      {"domain_min", [](RunConfig& c, const std::string& k, const std::string& v) { c.sim.domain_min = to_vec3(k, v); }},
      {"domain_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.sim.domain_max = to_vec3(k, v); }},
      {"cell_edge",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sim.cell_edge = to_vec3(k, v);
         c.cell_edge_from_file = true;
       }},
      {"termination_eps",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.sim.termination_eps = non_negative(k, to_double(k, v)); }},
      {"max_steps", [](RunConfig& c, const std::string& k, const std::string& v) { c.sim.max_steps = to_u64(k, v); }},
      {"k_sp", [](RunConfig& c, const std::string& k, const std::string& v) { c.sim.simple.k_sp = non_negative(k, to_double(k, v)); }},
      {"k_da", [](RunConfig& c, const std::string& k, const std::string& v) { c.sim.simple.k_da = to_double(k, v); }},
      {"k_sh", [](RunConfig& c, const std::string& k, const std::string& v) { c.sim.simple.k_sh = to_double(k, v); }},
      {"c_k_t", [](RunConfig& c, const std::string& k, const std::string& v) { c.material.c_k_t = non_negative(k, to_double(k, v)); }},
      {"c_k_n", [](RunConfig& c, const std::string& k, const std::string& v) { c.material.c_k_n = non_negative(k, to_double(k, v)); }},
      {"alpha", [](RunConfig& c, const std::string& k, const std::string& v) { c.material.alpha = non_negative(k, to_double(k, v)); }},
      {"mu", [](RunConfig& c, const std::string& k, const std::string& v) { c.material.mu = non_negative(k, to_double(k, v)); }},
      {"radius", [](RunConfig& c, const std::string& k, const std::string& v) { c.radius = positive(k, to_double(k, v)); }},
      {"density", [](RunConfig& c, const std::string& k, const std::string& v) { c.density = positive(k, to_double(k, v)); }},
      {"box_min", [](RunConfig& c, const std::string& k, const std::string& v) { c.box_min = to_vec3(k, v); }},
      {"box_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.box_max = to_vec3(k, v); }},
      {"slit_width", [](RunConfig& c, const std::string& k, const std::string& v) { c.slit_width = positive(k, to_double(k, v)); }},
      {"lattice_spacing",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.lattice_spacing = positive(k, to_double(k, v)); }},
      {"jitter", [](RunConfig& c, const std::string& k, const std::string& v) { c.jitter = non_negative(k, to_double(k, v)); }},
      {"approach_speed",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.approach_speed = non_negative(k, to_double(k, v)); }},
      {"gas_speed", [](RunConfig& c, const std::string& k, const std::string& v) { c.gas_speed = non_negative(k, to_double(k, v)); }},
  };
  return table;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty value for '" + key + "'");
    it->second(c, key, value);
  }

  if (!c.cell_edge_from_file) {
    const double d = 2.0 * c.radius;
    c.sim.cell_edge = {d, d, d};
  }
  try {
    c.sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void scale_to_full(RunConfig& config) {
  if (config.particle_count == 0) throw ConfigError("--full needs a non-zero particle_count to scale from");
  const double s = std::cbrt(static_cast<double>(kFullParticleCount) / static_cast<double>(config.particle_count));
  const Vec3 origin = config.sim.domain_min;
  const auto scale = [&](const Vec3& p) { return origin + (p - origin) * s; };
  config.sim.domain_max = scale(config.sim.domain_max);
  config.box_min = scale(config.box_min);
  config.box_max = scale(config.box_max);
  config.slit_width *= s;
  config.particle_count = kFullParticleCount;
}

}  // namespace dem
