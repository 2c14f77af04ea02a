#include "hypflux/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace hypflux {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// The ini reader only strips whole-line comments.
std::string strip_comment(const std::string& s) {
  const auto c = s.find_first_of(";#");
  return c == std::string::npos ? s : s.substr(0, c);
}

std::string where(const std::string& sec, const std::string& key) {
  return "[" + sec + "] " + key;
}

double to_double(const std::string& raw, const std::string& sec, const std::string& key) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError(where(sec, key) + ": '" + s + "' is not a finite number");
  return v;
}

long long to_int(const std::string& raw, const std::string& sec, const std::string& key) {
  const std::string s = trim(raw);
  long long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ParseError(where(sec, key) + ": '" + s + "' is not an integer");
  return v;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> to_doubles(const std::string& s, const std::string& sec, const std::string& key) {
  std::vector<double> v;
  if (trim(s).empty()) return v;
  for (const auto& it : split(s)) v.push_back(to_double(it, sec, key));
  return v;
}

bool to_bool(const std::string& raw, const std::string& sec, const std::string& key) {
  std::string s = trim(raw);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw ParseError(where(sec, key) + ": '" + raw + "' is not a boolean");
}

int to_int32(const std::string& s, const std::string& sec, const std::string& key) {
  const long long v = to_int(s, sec, key);
  if (v < -2147483647LL || v > 2147483647LL) throw ParseError(where(sec, key) + ": out of range");
  return static_cast<int>(v);
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + g17(v[i]);
  return s;
}

const std::set<std::string> kProblems = {"advection1d", "advection2d", "friedrichs1d", "burgers1d",
                                         "shallow_water1d"};

}  // namespace

int Config::dim() const { return problem == "advection2d" ? 2 : 1; }

int Config::components() const {
  if (problem == "shallow_water1d") return 2;
  if (problem == "friedrichs1d") {
    const int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(matrix.size()))));
    return m;
  }
  return 1;
}

Config parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError("line " + std::to_string(e.line()) + ": " + e.message());
  }
  Config c;
  bool have_problem = false;
  for (const auto& [sec, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ParseError("key '" + sec + "' appears outside any section");
    for (const auto& [key, node] : body) {
      const std::string v = strip_comment(node.data());
      auto unknown = [&]() { throw ParseError(where(sec, key) + ": unknown key"); };
      if (sec == "problem") {
        if (key == "name") {
          c.problem = trim(v);
          have_problem = true;
        } else if (key == "seed") {
          const long long s = to_int(v, sec, key);
          if (s < 0) throw ParseError(where(sec, key) + ": must be nonnegative");
          c.seed = static_cast<std::uint64_t>(s);
        } else {
          unknown();
        }
      } else if (sec == "system") {
        if (key == "speed") c.speed = to_doubles(v, sec, key);
        else if (key == "matrix") c.matrix = to_doubles(v, sec, key);
        else if (key == "gravity") c.gravity = to_double(v, sec, key);
        else if (key == "h_min") c.h_min = to_double(v, sec, key);
        else if (key == "h_max") c.h_max = to_double(v, sec, key);
        else if (key == "q_max") c.q_max = to_double(v, sec, key);
        else if (key == "omega_lower") c.omega_lower = to_doubles(v, sec, key);
        else if (key == "omega_upper") c.omega_upper = to_doubles(v, sec, key);
        else if (key == "omega_inflation") c.omega_inflation = to_double(v, sec, key);
        else unknown();
      } else if (sec == "initial") {
        if (key == "kind") c.initial_kind = trim(v);
        else c.initial_params[key] = to_doubles(v, sec, key);
      } else if (sec == "mesh") {
        if (key == "kind") c.mesh_kind = trim(v);
        else if (key == "cells") c.cells = to_int32(v, sec, key);
        else if (key == "cells_y") c.cells_y = to_int32(v, sec, key);
        else if (key == "length") c.length = to_doubles(v, sec, key);
        else if (key == "jitter") c.jitter = to_double(v, sec, key);
        else unknown();
      } else if (sec == "flux") {
        if (key == "name") {
          c.flux = trim(v);
        } else if (key == "speed") {
          c.flux_speed = trim(v) == "auto" ? 0.0 : to_double(v, sec, key);
        } else {
          unknown();
        }
      } else if (sec == "time") {
        if (key == "final_time") c.final_time = to_double(v, sec, key);
        else if (key == "cfl") c.cfl = trim(v);
        else if (key == "zeta") c.zeta = to_double(v, sec, key);
        else unknown();
      } else if (sec == "run") {
        if (key == "record_every") c.record_every = to_int32(v, sec, key);
        else if (key == "check_admissibility") c.check_admissibility = to_bool(v, sec, key);
        else if (key == "quadrature") c.quadrature = trim(v);
        else if (key == "output_dir") c.output_dir = trim(v);
        else if (key == "write_snapshots") c.write_snapshots = to_bool(v, sec, key);
        else if (key == "reference") c.reference = trim(v);
        else if (key == "fine_factor") c.fine_factor = to_int32(v, sec, key);
        else if (key == "radius") c.radius = to_double(v, sec, key);
        else if (key == "center") c.center = to_doubles(v, sec, key);
        else unknown();
      } else if (sec == "study") {
        if (key == "levels") {
          c.levels.clear();
          for (const auto& it : split(v)) c.levels.push_back(to_int32(it, sec, key));
        } else {
          unknown();
        }
      } else {
        throw ParseError("[" + sec + "]: unknown section");
      }
    }
  }
  if (!have_problem) throw ParseError("[problem] name: missing");
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const Config& c) {
  std::ostringstream os;
  os << "[problem]\nname = " << c.problem << "\nseed = " << c.seed << "\n\n";
  os << "[system]\n";
  os << "speed = " << join(c.speed) << "\n";
  if (!c.matrix.empty()) os << "matrix = " << join(c.matrix) << "\n";
  os << "gravity = " << g17(c.gravity) << "\n";
  os << "h_min = " << g17(c.h_min) << "\n";
  os << "h_max = " << g17(c.h_max) << "\n";
  os << "q_max = " << g17(c.q_max) << "\n";
  if (!c.omega_lower.empty()) os << "omega_lower = " << join(c.omega_lower) << "\n";
  if (!c.omega_upper.empty()) os << "omega_upper = " << join(c.omega_upper) << "\n";
  os << "omega_inflation = " << g17(c.omega_inflation) << "\n\n";
  os << "[initial]\nkind = " << c.initial_kind << "\n";
  for (const auto& [k, v] : c.initial_params) os << k << " = " << join(v) << "\n";
  os << "\n[mesh]\nkind = " << c.mesh_kind << "\ncells = " << c.cells << "\n";
  os << "cells_y = " << c.cells_y << "\nlength = " << join(c.length) << "\n";
  os << "jitter = " << g17(c.jitter) << "\n\n";
  os << "[flux]\nname = " << c.flux << "\nspeed = "
     << (c.flux_speed == 0.0 ? std::string("auto") : g17(c.flux_speed)) << "\n\n";
  os << "[time]\nfinal_time = " << g17(c.final_time) << "\ncfl = " << c.cfl
     << "\nzeta = " << g17(c.zeta) << "\n\n";
  os << "[run]\nrecord_every = " << c.record_every
     << "\ncheck_admissibility = " << (c.check_admissibility ? "true" : "false")
     << "\nquadrature = " << c.quadrature << "\noutput_dir = " << c.output_dir
     << "\nwrite_snapshots = " << (c.write_snapshots ? "true" : "false")
     << "\nreference = " << c.reference << "\nfine_factor = " << c.fine_factor
     << "\nradius = " << g17(c.radius) << "\ncenter = " << join(c.center) << "\n";
  if (!c.levels.empty()) {
    os << "\n[study]\nlevels = ";
    for (std::size_t i = 0; i < c.levels.size(); ++i) os << (i ? ", " : "") << c.levels[i];
    os << "\n";
  }
  return os.str();
}

void validate_config(const Config& c, bool study) {
  auto fail = [](const std::string& m) { throw ValidationError(m); };
  if (!kProblems.count(c.problem)) fail("[problem] name: unknown problem '" + c.problem + "'");
  const int d = c.dim();
  if (c.problem == "advection1d" || c.problem == "advection2d")
    if (static_cast<int>(c.speed.size()) != d) fail("[system] speed: need one entry per axis");
  if (c.problem == "friedrichs1d") {
    const int m = c.components();
    if (m < 1 || m > kMaxComponents || static_cast<int>(c.matrix.size()) != m * m)
      fail("[system] matrix: need m*m entries with 1 <= m <= 4");
  }
  if (c.problem == "shallow_water1d") {
    if (!(c.gravity > 0.0)) fail("[system] gravity: must be positive");
    if (!(c.h_min > 0.0)) fail("[system] h_min: must be positive");
    if (!(c.h_max > c.h_min)) fail("[system] h_max: must exceed h_min");
    if (!(c.q_max > 0.0)) fail("[system] q_max: must be positive");
  }
  if (c.omega_lower.empty() != c.omega_upper.empty())
    fail("[system] omega_lower/omega_upper: give both or neither");
  if (!c.omega_lower.empty()) {
    if (static_cast<int>(c.omega_lower.size()) != c.components() ||
        c.omega_upper.size() != c.omega_lower.size())
      fail("[system] omega bounds: need one entry per component");
    for (std::size_t i = 0; i < c.omega_lower.size(); ++i)
      if (!(c.omega_lower[i] < c.omega_upper[i])) fail("[system] omega bounds: empty interval");
  }
  if (!(c.omega_inflation >= 0.0)) fail("[system] omega_inflation: must be nonnegative");
  static const std::set<std::string> kinds = {"constant", "sine", "gaussian-bump",
                                              "shallow-water-smooth-wave"};
  if (!kinds.count(c.initial_kind)) fail("[initial] kind: unknown '" + c.initial_kind + "'");
  if (c.mesh_kind != "uniform" && c.mesh_kind != "perturbed")
    fail("[mesh] kind: must be uniform or perturbed");
  if (c.mesh_kind == "perturbed" && d != 2) fail("[mesh] kind: perturbed meshes are 2D only");
  if (c.cells < 3) fail("[mesh] cells: must be at least 3");
  if (c.cells_y != 0 && c.cells_y < 3) fail("[mesh] cells_y: must be 0 or at least 3");
  if (static_cast<int>(c.length.size()) != d) fail("[mesh] length: need one entry per axis");
  for (double L : c.length)
    if (!(L > 0.0)) fail("[mesh] length: must be positive");
  if (!(c.jitter >= 0.0 && c.jitter < 0.25)) fail("[mesh] jitter: must lie in [0, 0.25)");
  if (c.flux != "rusanov" && c.flux != "godunov") fail("[flux] name: must be rusanov or godunov");
  if (c.flux == "godunov" && c.components() != 1) fail("[flux] name: godunov needs a scalar system");
  if (!(c.flux_speed >= 0.0)) fail("[flux] speed: must be positive or auto");
  if (!(c.final_time > 0.0)) fail("[time] final_time: must be positive");
  if (c.cfl != "standard" && c.cfl != "strengthened") fail("[time] cfl: must be standard or strengthened");
  if (!(c.zeta > 0.0 && c.zeta < 1.0)) fail("[time] zeta: must lie in (0, 1)");
  if (c.record_every < 1) fail("[run] record_every: must be at least 1");
  if (c.quadrature != "midpoint" && c.quadrature != "gauss3")
    fail("[run] quadrature: must be midpoint or gauss3");
  if (c.output_dir.empty()) fail("[run] output_dir: must not be empty");
  if (c.reference != "auto" && c.reference != "exact" && c.reference != "fine" && c.reference != "none")
    fail("[run] reference: must be auto, exact, fine or none");
  if (c.fine_factor < 8) fail("[run] fine_factor: must be at least 8");
  if (!(c.radius > 0.0)) fail("[run] radius: must be positive");
  if (static_cast<int>(c.center.size()) != d) fail("[run] center: need one entry per axis");
  if (study) {
    if (c.levels.size() < 3) fail("[study] levels: need at least 3 levels");
    std::set<int> seen;
    for (int n : c.levels) {
      if (n < 3) fail("[study] levels: each level needs at least 3 cells");
      if (!seen.insert(n).second) fail("[study] levels: duplicate level");
    }
  }
}

}  // namespace hypflux
