#include "varflow/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace varflow {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw InvalidArgument("bad number for " + key + ": '" + v + "'");
  return x;
}

long to_long(const std::string& key, const std::string& v) {
  long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw InvalidArgument("bad integer for " + key + ": '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidArgument("bad boolean for " + key + ": '" + v + "'");
}

}  // namespace

void set_config_value(Config& c, const std::string& key, const std::string& value) {
  if (key == "alpha") c.alpha = to_double(key, value);
  else if (key == "Q") c.Q = static_cast<int>(to_long(key, value));
  else if (key == "r0") c.r0 = to_double(key, value);
  else if (key == "zeta") c.zeta = to_double(key, value);
  else if (key == "delta") c.delta = to_double(key, value);
  else if (key == "eps") c.eps = to_double(key, value);
  else if (key == "mesh_level") c.mesh_level = static_cast<int>(to_long(key, value));
  else if (key == "dt_factor") c.dt_factor = to_double(key, value);
  else if (key == "quad_order") c.quad_order = static_cast<int>(to_long(key, value));
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_long(key, value));
  else if (key == "log_base") c.log_base = parse_log_base(value);
  else if (key == "allow_critical") c.allow_critical = to_bool(key, value);
  else if (key == "kind") c.kind = parse_fixture_kind(value);
  else if (key == "j") c.j = static_cast<int>(to_long(key, value));
  else throw InvalidArgument("unknown config key '" + key + "'");
}

void Config::validate() const {
  if (!(alpha > 0.5) && !allow_critical) throw InvalidArgument("alpha must exceed 1/2 (use --allow-critical)");
  if (!(alpha > 0)) throw InvalidArgument("alpha must be positive");
  if (Q < 1) throw InvalidArgument("Q must be at least 1");
  if (r0 && !(*r0 > 0)) throw InvalidArgument("r0 must be positive");
  if (!(zeta > 0 && zeta < 0.5)) throw InvalidArgument("zeta must lie in (0, 1/2)");
  if (!(delta > 0 && delta < 1)) throw InvalidArgument("delta must lie in (0, 1)");
  if (!(eps > 0)) throw InvalidArgument("eps must be positive");
  if (mesh_level < 0 || mesh_level > 8) throw InvalidArgument("mesh_level must lie in 0..8");
  if (!(dt_factor > 0)) throw InvalidArgument("dt_factor must be positive");
  if (quad_order < 1 || quad_order > 3) throw InvalidArgument("quad_order must lie in 1..3");
  if (j < 0) throw InvalidArgument("j must be nonnegative");
}

std::string Config::echo() const {
  std::ostringstream os;
  os.precision(17);
  os << "alpha = " << alpha << '\n'
     << "Q = " << Q << '\n'
     << "r0 = " << (r0 ? std::to_string(*r0) : std::string("default")) << '\n'
     << "zeta = " << zeta << '\n'
     << "delta = " << delta << '\n'
     << "eps = " << eps << '\n'
     << "mesh_level = " << mesh_level << '\n'
     << "dt_factor = " << dt_factor << '\n'
     << "quad_order = " << quad_order << '\n'
     << "seed = " << seed << '\n'
     << "log_base = " << to_string(log_base) << '\n'
     << "allow_critical = " << (allow_critical ? "true" : "false") << '\n'
     << "kind = " << to_string(kind) << '\n'
     << "j = " << j << '\n';
  return os.str();
}

Config parse_config(std::istream& is, Config base) {
  std::string line;
  std::size_t no = 0;
  while (std::getline(is, line)) {
    ++no;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", no);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key == "r0" && value == "default") {
      base.r0.reset();
      continue;
    }
    try {
      set_config_value(base, key, value);
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), no);
    }
  }
  return base;
}

Config load_config(const std::string& path, Config base) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config '" + path + "'");
  return parse_config(in, std::move(base));
}

ExperimentConfig to_experiment_config(const Config& c) {
  ExperimentConfig e;
  e.kind = c.kind;
  e.q = c.Q;
  e.level = c.mesh_level;
  e.eps = c.eps;
  e.j = c.j;
  e.alpha = c.alpha;
  e.r0 = c.r0_or(0.3);
  e.zeta = c.zeta;
  e.delta = c.delta;
  e.dt_factor = c.dt_factor;
  e.quad_order = c.quad_order;
  e.base = c.log_base;
  e.allow_critical = c.allow_critical;
  return e;
}

}  // namespace varflow
