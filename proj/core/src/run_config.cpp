#include <mpw/run_config.hpp>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mpw {

namespace {

std::string squash(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '-' || c == '_' || std::isspace(static_cast<unsigned char>(c))) continue;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string strip(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& s, const std::string& what) {
  const std::string t = strip(s);
  if (t.empty()) throw ParameterError(what + ": empty number");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw ParameterError(what + ": cannot parse '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, const std::string& what) {
  const std::string t = strip(s);
  if (t.empty()) throw ParameterError(what + ": empty integer");
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size()) throw ParameterError(what + ": cannot parse '" + s + "'");
  return v;
}

std::uint64_t parse_seed(const std::string& s, const std::string& what) {
  const std::string t = strip(s);
  if (t.empty()) throw ParameterError(what + ": empty seed");
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 0);
  if (end != t.c_str() + t.size()) throw ParameterError(what + ": cannot parse '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s, const std::string& what) {
  const std::string t = squash(s);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ParameterError(what + ": cannot parse boolean '" + s + "'");
}

std::string g12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) {
      throw ParameterError(where + ": expected key = value");
    }
    const std::string key = squash(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (value.empty()) throw ParameterError(where + ": empty value for '" + key + "'");

    if (key == "nf") {
      config.n_f = static_cast<int>(parse_int(value, where));
    } else if (key == "nb") {
      config.n_b = static_cast<int>(parse_int(value, where));
    } else if (key == "epsf") {
      config.eps_f = parse_double(value, where);
    } else if (key == "epsb") {
      config.eps_b = parse_double(value, where);
    } else if (key == "vf") {
      config.v_f = parse_double(value, where);
    } else if (key == "vb") {
      config.v_b = parse_double(value, where);
    } else if (key == "mu") {
      config.mu = parse_double(value, where);
    } else if (key == "solver") {
      config.solver = strip(value);
    } else if (key == "tol") {
      config.tol = parse_double(value, where);
    } else if (key == "maxiter") {
      config.max_iter = static_cast<int>(parse_int(value, where));
    } else if (key == "seed") {
      config.seed = parse_seed(value, where);
    } else if (key == "out") {
      config.out = strip(value);
    } else if (key == "axis") {
      config.axes.push_back(strip(value));
    } else if (key == "retryfailed") {
      config.retry_failed = parse_bool(value, where);
    } else {
      throw ParameterError(where + ": unknown key '" + strip(line.substr(0, eq)) + "'");
    }
  }
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

RunConfig merge_configs(const RunConfig& base, const RunConfig& overrides) {
  RunConfig merged = base;
  if (overrides.n_f) merged.n_f = overrides.n_f;
  if (overrides.n_b) merged.n_b = overrides.n_b;
  if (overrides.eps_f) merged.eps_f = overrides.eps_f;
  if (overrides.eps_b) merged.eps_b = overrides.eps_b;
  if (overrides.v_f) merged.v_f = overrides.v_f;
  if (overrides.v_b) merged.v_b = overrides.v_b;
  if (overrides.mu) merged.mu = overrides.mu;
  if (overrides.solver) merged.solver = overrides.solver;
  if (overrides.tol) merged.tol = overrides.tol;
  if (overrides.max_iter) merged.max_iter = overrides.max_iter;
  if (overrides.seed) merged.seed = overrides.seed;
  if (overrides.out) merged.out = overrides.out;
  if (!overrides.axes.empty()) merged.axes = overrides.axes;
  if (overrides.retry_failed) merged.retry_failed = overrides.retry_failed;
  return merged;
}

std::string render_config(const RunConfig& c) {
  std::ostringstream out;
  if (c.n_f) out << "n_f = " << *c.n_f << "\n";
  if (c.n_b) out << "n_b = " << *c.n_b << "\n";
  if (c.eps_f) out << "eps_f = " << g12(*c.eps_f) << "\n";
  if (c.eps_b) out << "eps_b = " << g12(*c.eps_b) << "\n";
  if (c.v_f) out << "v_f = " << g12(*c.v_f) << "\n";
  if (c.v_b) out << "v_b = " << g12(*c.v_b) << "\n";
  if (c.mu) out << "mu = " << g12(*c.mu) << "\n";
  if (c.solver) out << "solver = " << *c.solver << "\n";
  if (c.tol) out << "tol = " << g12(*c.tol) << "\n";
  if (c.max_iter) out << "max_iter = " << *c.max_iter << "\n";
  if (c.seed) out << "seed = " << *c.seed << "\n";
  if (c.out) out << "out = " << *c.out << "\n";
  for (const auto& axis : c.axes) out << "axis = " << axis << "\n";
  if (c.retry_failed) out << "retry_failed = " << (*c.retry_failed ? "true" : "false") << "\n";
  return out.str();
}

AxisSpec parse_axis(const std::string& text) {
  const std::size_t eq = text.find('=');
  if (eq == std::string::npos) {
    throw ParameterError("axis '" + text + "': expected NAME=START:STOP:STEP");
  }
  AxisSpec axis;
  axis.name = normalize_axis_name(strip(text.substr(0, eq)));
  const std::string values = text.substr(eq + 1);

  std::vector<std::string> parts;
  std::string part;
  for (char ch : values) {
    if (ch == ':') {
      parts.push_back(part);
      part.clear();
    } else {
      part += ch;
    }
  }
  parts.push_back(part);

  const std::string what = "axis " + axis.name;
  if (parts.size() == 1) {
    axis.start = axis.stop = parse_double(parts[0], what);
    axis.step = 0.0;
  } else if (parts.size() == 3) {
    axis.start = parse_double(parts[0], what);
    axis.stop = parse_double(parts[1], what);
    axis.step = parse_double(parts[2], what);
  } else {
    throw ParameterError(what + ": expected START:STOP:STEP or a single value");
  }
  (void)axis.count();  // validates the lattice
  return axis;
}

SystemParams params_from(const RunConfig& c) {
  SystemParams p;
  p.n_f = c.n_f.value_or(0);
  p.n_b = c.n_b.value_or(0);
  p.eps_f = c.eps_f.value_or(1.0);
  p.eps_b = c.eps_b.value_or(1.0);
  p.v_f = c.v_f.value_or(0.0);
  p.v_b = c.v_b.value_or(0.0);
  p.mu = c.mu.value_or(0.0);
  return p;
}

SolveOptions solve_options_from(const RunConfig& c) {
  SolveOptions o;
  if (c.tol) {
    if (*c.tol <= 0) throw ParameterError("tol must be positive");
    o.tolerance = *c.tol;
  }
  if (c.max_iter) {
    if (*c.max_iter < 1) throw ParameterError("max_iter must be at least 1");
    o.max_iterations = *c.max_iter;
  }
  if (c.seed) o.seed = *c.seed;
  return o;
}

SolverPath solver_path_from(const RunConfig& c) {
  const std::string name = squash(c.solver.value_or("column"));
  if (name == "full") return SolverPath::Full;
  if (name == "column") return SolverPath::Column;
  if (name == "collective") return SolverPath::Collective;
  throw ParameterError("unknown solver '" + c.solver.value_or("") +
                       "' (expected full, column or collective)");
}

}  // namespace mpw
