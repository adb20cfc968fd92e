#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "ctrace/cli.hpp"

namespace ctrace {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

double number(const std::string& s, int line, const std::string& key) {
  const std::string t = trim(s);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0' || !std::isfinite(v)) throw ConfigError("'" + key + "': not a number: '" + t + "'", line);
  return v;
}

int integer(const std::string& s, int line, const std::string& key) {
  const double v = number(s, line, key);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("'" + key + "': not an integer: '" + s + "'", line);
  return static_cast<int>(v);
}

/// Comma list of numbers, or linspace(a, b, n).
std::vector<double> number_list(const std::string& s, int line, const std::string& key) {
  const std::string t = trim(s);
  std::vector<double> out;
  if (t.rfind("linspace(", 0) == 0) {
    if (t.back() != ')') throw ConfigError("'" + key + "': unterminated linspace", line);
    const auto args = split(t.substr(9, t.size() - 10), ',');
    if (args.size() != 3) throw ConfigError("'" + key + "': linspace takes (start, stop, count)", line);
    const double a = number(args[0], line, key), b = number(args[1], line, key);
    const int n = integer(args[2], line, key);
    if (n < 1) throw ConfigError("'" + key + "': linspace count must be positive", line);
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    return out;
  }
  for (const auto& item : split(t, ',')) out.push_back(number(item, line, key));
  if (out.empty()) throw ConfigError("'" + key + "': empty list", line);
  return out;
}

template <class E>
E choice(const std::string& v, const std::map<std::string, E>& options, int line, const std::string& key) {
  if (auto it = options.find(v); it != options.end()) return it->second;
  std::string names;
  for (const auto& [k, _] : options) names += (names.empty() ? "" : ", ") + k;
  throw ConfigError("'" + key + "': expected one of " + names + ", got '" + v + "'", line);
}

const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"system", {"name", "hamiltonian", "driver", "driver_dof", "hbar"}},
      {"sweep", {"E", "Eprime", "tau", "epsilon"}},
      {"numerics",
       {"grid_points", "grid_lower", "grid_upper", "levels", "jmax", "damping_cutoff", "smoothing", "sigma",
        "prefactor", "ft_variant", "ft_tmax", "ft_steps", "background_tolerance", "cache_dir", "section", "seed"}},
      {"output", {"prefix", "pathways"}},
  };
  return keys;
}

}  // namespace

std::vector<Pathway> parse_pathways(const std::string& list) {
  const std::string t = trim(list);
  if (t == "all")
    return {Pathway::semiclassical, Pathway::eigen_sum, Pathway::double_ft, Pathway::classical_background};
  std::vector<Pathway> out;
  for (const auto& name : split(t, ',')) {
    bool found = false;
    for (Pathway p : {Pathway::semiclassical, Pathway::eigen_sum, Pathway::double_ft, Pathway::classical_background})
      if (name == pathway_name(p)) {
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
        found = true;
      }
    if (!found) throw ConfigError("unknown pathway '" + name + "' (use sc, eigen, double-ft, background or all)");
  }
  if (out.empty()) throw ConfigError("no pathway selected");
  std::sort(out.begin(), out.end());
  return out;
}

SectionSpec parse_section(const std::string& spec) {
  const std::string t = trim(spec);
  const auto eq = t.find('=');
  if (t.size() < 4 || t[0] != 'q' || eq == std::string::npos)
    throw ConfigError("section must look like q<k>=<value>[:+|:-], got '" + t + "'");
  SectionSpec s;
  s.coordinate = integer(t.substr(1, eq - 1), 0, "section") - 1;
  if (s.coordinate < 0) throw ConfigError("section coordinate index is 1-based");
  std::string rest = t.substr(eq + 1);
  if (const auto colon = rest.find(':'); colon != std::string::npos) {
    const std::string dir = trim(rest.substr(colon + 1));
    if (dir == "+")
      s.direction = +1;
    else if (dir == "-")
      s.direction = -1;
    else
      throw ConfigError("section direction must be + or -, got '" + dir + "'");
    rest = rest.substr(0, colon);
  }
  s.value = number(rest, 0, "section");
  return s;
}

SystemSpec RunConfig::system() const {
  try {
    const Polynomial H = named_hamiltonian(hamiltonian, hamiltonian_params);
    const int dof = hamiltonian_dof(hamiltonian);
    const Polynomial L = named_driver(driver, driver_params, dof, driver_dof, H);
    return make_system(name, PhaseFunction(H), PhaseFunction(L), hbar);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

bool RunConfig::wants(Pathway p) const { return std::find(pathways.begin(), pathways.end(), p) != pathways.end(); }

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig c;
  c.source = source;
  std::string section;
  std::map<std::string, int> seen;
  std::map<std::string, std::pair<std::string, int>> hparams, dparams;
  std::string raw;
  for (int line = 1; std::getline(in, raw); ++line) {
    const auto hash = raw.find_first_of("#;");
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header '" + s + "'", line);
      section = trim(s.substr(1, s.size() - 2));
      if (!known_keys().count(section)) throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value, got '" + s + "'", line);
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (section.empty()) throw ConfigError("key '" + key + "' outside a section", line);
    if (value.empty()) throw ConfigError("'" + key + "' has no value", line);
    const std::string full = section + "." + key;
    if (auto it = seen.find(full); it != seen.end())
      throw ConfigError("duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")", line);
    seen[full] = line;

    if (section == "system" && key.rfind("hamiltonian.", 0) == 0) {
      hparams[key.substr(12)] = {value, line};
      continue;
    }
    if (section == "system" && key.rfind("driver.", 0) == 0) {
      dparams[key.substr(7)] = {value, line};
      continue;
    }
    const auto& allowed = known_keys().at(section);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown key '" + key + "' in [" + section + "]", line);

    if (section == "system") {
      if (key == "name") c.name = value;
      if (key == "hamiltonian") {
        if (!hamiltonian_catalogue().count(value)) throw ConfigError("unknown hamiltonian '" + value + "'", line);
        c.hamiltonian = value;
      }
      if (key == "driver") {
        if (!driver_catalogue().count(value)) throw ConfigError("unknown driver '" + value + "'", line);
        c.driver = value;
      }
      if (key == "driver_dof") c.driver_dof = integer(value, line, key) - 1;
      if (key == "hbar") {
        c.hbar = number(value, line, key);
        if (!(c.hbar > 0)) throw ConfigError("hbar must be positive", line);
      }
    } else if (section == "sweep") {
      if (key == "E") c.E = number_list(value, line, key);
      if (key == "Eprime") c.E_prime = number_list(value, line, key);
      if (key == "tau") c.tau = number_list(value, line, key);
      if (key == "epsilon") {
        c.epsilon = number(value, line, key);
        if (!(c.epsilon > 0)) throw ConfigError("epsilon must be positive", line);
      }
    } else if (section == "numerics") {
      if (key == "grid_points") {
        c.grid.points = integer(value, line, key);
        if (c.grid.points < 8 || c.grid.points % 2) throw ConfigError("grid_points must be even and >= 8", line);
      }
      if (key == "grid_lower") c.grid.lower = number(value, line, key);
      if (key == "grid_upper") c.grid.upper = number(value, line, key);
      if (key == "levels") {
        if (value != "usable" && value != "full" && integer(value, line, key) < 1)
          throw ConfigError("levels must be usable, full or a positive count", line);
        c.levels = value;
      }
      if (key == "jmax") c.j_max = integer(value, line, key);
      if (key == "damping_cutoff") c.damping_cutoff = number(value, line, key);
      if (key == "smoothing")
        c.smoothing = choice<SmoothingOrder>(
            value,
            {{"first", SmoothingOrder::first}, {"second", SmoothingOrder::second},
             {"continued", SmoothingOrder::continued}},
            line, key);
      if (key == "sigma")
        c.sigma = choice<SigmaPolicy>(
            value, {{"trace_index", SigmaPolicy::trace_index}, {"caustic_count", SigmaPolicy::caustic_count}}, line,
            key);
      if (key == "prefactor")
        c.prefactor = choice<Prefactor>(value, {{"unit", Prefactor::unit}, {"doubled", Prefactor::doubled}}, line, key);
      if (key == "ft_variant")
        c.ft_variant =
            choice<FtVariant>(value, {{"analytic", FtVariant::analytic}, {"quadrature", FtVariant::quadrature}}, line,
                              key);
      if (key == "ft_tmax") c.time_grid.t_max = number(value, line, key);
      if (key == "ft_steps") c.time_grid.n_steps = integer(value, line, key);
      if (key == "background_tolerance") c.background_tolerance = number(value, line, key);
      if (key == "cache_dir") c.cache_dir = value;
      if (key == "section") {
        try {
          c.section = parse_section(value);
        } catch (const ConfigError& e) {
          throw ConfigError(e.what(), line);
        }
      }
      if (key == "seed") c.seed = number_list(value, line, key);
    } else if (section == "output") {
      if (key == "prefix") {
        if (value.find('/') != std::string::npos) throw ConfigError("prefix must be a plain file name stem", line);
        c.prefix = value;
      }
      if (key == "pathways") {
        try {
          c.pathways = parse_pathways(value);
        } catch (const ConfigError& e) {
          throw ConfigError(e.what(), line);
        }
      }
    }
  }

  if (c.hamiltonian.empty()) throw ConfigError("[system] hamiltonian is required");
  if (c.driver.empty()) throw ConfigError("[system] driver is required");
  if (!seen.count("system.hbar")) throw ConfigError("[system] hbar is required");
  for (const char* k : {"E", "Eprime", "tau", "epsilon"})
    if (!seen.count(std::string("sweep.") + k)) throw ConfigError(std::string("[sweep] ") + k + " is required");
  if (!(c.grid.upper > c.grid.lower)) throw ConfigError("grid_upper must exceed grid_lower");
  const Params& hdef = hamiltonian_catalogue().at(c.hamiltonian);
  for (const auto& [k, v] : hparams) {
    if (!hdef.count(k)) throw ConfigError("unknown parameter '" + k + "' for hamiltonian " + c.hamiltonian, v.second);
    c.hamiltonian_params[k] = number(v.first, v.second, "hamiltonian." + k);
  }
  const Params& ddef = driver_catalogue().at(c.driver);
  for (const auto& [k, v] : dparams) {
    if (!ddef.count(k)) throw ConfigError("unknown parameter '" + k + "' for driver " + c.driver, v.second);
    c.driver_params[k] = number(v.first, v.second, "driver." + k);
  }
  const int dof = hamiltonian_dof(c.hamiltonian);
  if (c.driver_dof < 0 || c.driver_dof >= dof)
    throw ConfigError("driver_dof out of range", seen.count("system.driver_dof") ? seen["system.driver_dof"] : 0);
  if (c.section && c.section->coordinate >= dof) throw ConfigError("section coordinate out of range", seen["numerics.section"]);
  if (!c.seed.empty() && static_cast<int>(c.seed.size()) != 2 * (dof - 1))
    throw ConfigError("seed needs " + std::to_string(2 * (dof - 1)) + " reduced section coordinates",
                      seen["numerics.seed"]);

  const SystemSpec spec = c.system();
  const ValidationReport report = validate_system(spec, ValidationBox::cube(dof, 2.0));
  if (!report.ok) throw ConfigError("system validation failed: " + report.failures.front());
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  try {
    return parse_config(in, path);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace ctrace
