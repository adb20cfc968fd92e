#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctrace/cli.hpp"

namespace fs = std::filesystem;
using namespace ctrace;

namespace {

struct Common {
  std::string config;
  std::string out = ".";
  std::string pathways;
  int jobs = 1;
  int jmax = -2;
  std::string section;
};

RunConfig configure(const Common& c) {
  RunConfig cfg = load_config(c.config);
  if (!c.pathways.empty()) cfg.pathways = parse_pathways(c.pathways);
  if (c.jmax >= -1) cfg.j_max = c.jmax;
  if (!c.section.empty()) cfg.section = parse_section(c.section);
  return cfg;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream o(p, std::ios::binary | std::ios::trunc);
  if (!o) throw Error("cannot write " + p.string());
  return o;
}

int simulate(const Common& c) {
  const RunConfig cfg = configure(c);
  fs::create_directories(c.out);
  const SimulateResult r = run_simulate(cfg, c.jobs);
  const fs::path base = fs::path(c.out) / cfg.prefix;
  {
    auto o = open_out(base.string() + ".csv");
    write_csv(o, r.records);
  }
  {
    auto o = open_out(base.string() + ".jsonl");
    write_records(o, r.records);
  }
  for (const auto& l : r.log) std::cout << l << '\n';
  std::size_t warnings = 0;
  for (const auto& rec : r.records) warnings += rec.warnings.size();
  std::cout << r.records.size() << " records, " << warnings << " warnings, " << r.failed_points
            << " failed points -> " << base.string() << ".csv\n";
  return r.failed_points ? 2 : 0;
}

int orbits(const Common& c) {
  const RunConfig cfg = configure(c);
  fs::create_directories(c.out);
  const OrbitsResult r = run_orbits(cfg, c.jobs);
  const fs::path path = fs::path(c.out) / (cfg.prefix + "_orbits.jsonl");
  {
    auto o = open_out(path);
    for (const auto& l : r.lines) o << l << '\n';
  }
  nlohmann::json s;
  s["version"] = 1;
  s["points"] = r.points;
  s["orbits"] = r.orbits;
  s["near_caustic"] = r.near_caustic;
  s["failed_points"] = r.failed_points;
  s["notes"] = r.notes;
  {
    auto o = open_out(fs::path(c.out) / (cfg.prefix + "_orbits_summary.json"));
    o << s.dump(2) << '\n';
  }
  for (const auto& n : r.notes) std::cout << n << '\n';
  std::cout << r.orbits << " orbits (" << r.near_caustic << " near caustic) over " << r.points << " points, "
            << r.failed_points << " failed -> " << path.string() << '\n';
  return r.failed_points ? 2 : 0;
}

int compare(const std::string& left, const std::string& right, const Common& c) {
  std::string lp, rp;
  if (!c.pathways.empty()) {
    const auto comma = c.pathways.find(',');
    if (comma == std::string::npos) throw ConfigError("--pathways for compare takes left,right");
    lp = c.pathways.substr(0, comma);
    rp = c.pathways.substr(comma + 1);
  }
  const ComparisonReport r = run_compare(read_csv(left), read_csv(right), lp, rp);
  write_comparison(c.out, r);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu points (%d failed, excluded), max |dev| %.3g, rms rel dev %.3g, max extremum offset %.3g periods\n",
                r.points.size(), r.excluded_failed, r.max_absolute, r.rms_relative, r.max_offset_periods);
  std::cout << r.left_pathway << " vs " << r.right_pathway << ": " << buf;
  return r.excluded_failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy transition densities of driven systems: exact and semiclassical pathways"};
  app.require_subcommand(1);
  Common c;
  std::string left, right;

  auto* sim = app.add_subcommand("simulate", "Evaluate pathways over the configured grid");
  sim->add_option("--config", c.config, "Configuration file")->required();
  sim->add_option("--out", c.out, "Output directory");
  sim->add_option("--pathways", c.pathways, "all or a list of sc, eigen, double-ft, background");
  sim->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sim->add_option("--jmax", c.jmax, "Winding cutoff (-1 picks it from the damping)");

  auto* orb = app.add_subcommand("orbits", "Write the compound-orbit catalogue");
  orb->add_option("--config", c.config, "Configuration file")->required();
  orb->add_option("--out", c.out, "Output directory");
  orb->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
  orb->add_option("--jmax", c.jmax, "Winding cutoff (-1 picks it from the damping)");
  orb->add_option("--seed-section", c.section, "Section plane q<k>=<value>[:+|:-] for N = 2");

  auto* cmp = app.add_subcommand("compare", "Compare two result CSV files");
  cmp->add_option("left", left, "Candidate CSV")->required();
  cmp->add_option("right", right, "Reference CSV")->required();
  cmp->add_option("--out", c.out, "Output directory");
  cmp->add_option("--pathways", c.pathways, "Pathway on each side: left,right");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    if (*sim) return simulate(c);
    if (*orb) return orbits(c);
    return compare(left, right, c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const GridMismatchError& e) {
    std::cerr << "grid mismatch: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
