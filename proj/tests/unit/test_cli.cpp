#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctrace/cli.hpp"

using namespace ctrace;

namespace {

const char* kConfig = R"([system]
hamiltonian = harmonic
driver = translation
hbar = 0.1

[sweep]
E = 0.5
Eprime = 0.5
tau = 1.0
epsilon = 0.05

[numerics]
grid_points = 256
grid_lower = -6
grid_upper = 6
)";

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string csv(const std::vector<PointRecord>& r) {
  std::ostringstream o;
  write_csv(o, r);
  return o.str();
}

std::vector<CsvRow> rows_of(const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / "ctrace_cli_rows.csv";
  std::ofstream(path) << text;
  auto rows = read_csv(path.string());
  std::filesystem::remove(path);
  return rows;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse(std::string(kConfig) + "[output]\npathways = sc, eigen\n");
  CHECK(c.hamiltonian == "harmonic");
  CHECK(c.hbar == 0.1);
  CHECK(c.grid.points == 256);
  CHECK(c.pathways == std::vector<Pathway>{Pathway::semiclassical, Pathway::eigen_sum});
  const RunConfig l = parse(std::string(kConfig).replace(std::string(kConfig).find("tau = 1.0"), 9,
                                                         "tau = linspace(1, 2, 5)"));
  CHECK(l.tau == std::vector<double>{1.0, 1.25, 1.5, 1.75, 2.0});
}

TEST_CASE("config errors carry line numbers") {
  CHECK(error_line(std::string(kConfig) + "colour = blue\n") == 16);
  CHECK(error_line("[system]\nhamiltonian = harmonic\nmass = 2\n") == 3);
  CHECK(error_line("[system]\nhbar = -1\n") == 2);
  CHECK(error_line("[sweep]\nE = 0.5, x\n") == 2);
  CHECK(error_line("[physics]\n") == 1);
  CHECK(error_line("[system]\nhbar = 1\nhbar = 2\n") == 3);
  CHECK(error_line("hbar = 1\n") == 1);
  CHECK(error_line("[system]\nhamiltonian = harmonic\nhamiltonian.mass = 1\ndriver = kick\nhbar = 1\n"
                   "[sweep]\nE = 1\nEprime = 1\ntau = 1\nepsilon = 0.1\n") == 3);
  CHECK_THROWS_AS(parse("[system]\nhamiltonian = harmonic\ndriver = kick\n"), ConfigError);
}

TEST_CASE("pathway and section specs") {
  CHECK(parse_pathways("all").size() == 4);
  CHECK(parse_pathways("background,sc") ==
        std::vector<Pathway>{Pathway::semiclassical, Pathway::classical_background});
  CHECK_THROWS_AS(parse_pathways("magic"), ConfigError);
  const SectionSpec s = parse_section("q1=0.25:-");
  CHECK(s.coordinate == 0);
  CHECK(s.value == 0.25);
  CHECK(s.direction == -1);
  CHECK(parse_section("q2=0").direction == 1);
  CHECK_THROWS_AS(parse_section("p1=0"), ConfigError);
}

TEST_CASE("simulate: one point, all pathways, deterministic") {
  const RunConfig c = parse(kConfig);
  const SimulateResult a = run_simulate(c);
  REQUIRE(a.records.size() == 4);
  CHECK(a.failed_points == 0);
  CHECK(a.records[0].pathway == Pathway::semiclassical);
  CHECK(a.records[3].pathway == Pathway::classical_background);
  CHECK(a.records[0].background.has_value());
  CHECK(*a.records[0].background == a.records[3].value);
  CHECK(a.records[1].value == doctest::Approx(a.records[2].value).epsilon(1e-12));
  CHECK(a.records[0].n_orbits > 0);
  const std::string text = csv(a.records);
  CHECK(text.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(csv(run_simulate(c, 2).records) == text);
}

TEST_CASE("simulate records failures and keeps going") {
  RunConfig c = parse(kConfig);
  c.E = {-3.0, 0.5, 8.0};
  c.pathways = {Pathway::semiclassical, Pathway::eigen_sum};
  const SimulateResult r = run_simulate(c);
  REQUIRE(r.records.size() == 6);
  // no shell at E = -3: background only
  CHECK_FALSE(r.records[0].failed);
  CHECK(r.records[0].n_orbits == 0);
  CHECK(r.records[0].value == *r.records[0].background);
  CHECK_FALSE(r.records[1].failed);
  CHECK_FALSE(r.records[3].failed);
  // levels near E = 8 are not converged on this grid
  CHECK_FALSE(r.records[4].failed);
  CHECK(r.records[5].failed);
  CHECK(r.failed_points == 1);
  CHECK(csv(r.records).find(",eigen,nan,0,1\n") != std::string::npos);
}

TEST_CASE("orbits verb") {
  RunConfig c = parse(kConfig);
  c.tau = {1.0, 3.0};
  const OrbitsResult r = run_orbits(c);
  CHECK(r.points == 2);
  CHECK(r.orbits >= 8);
  REQUIRE(r.notes.size() == 1);
  CHECK(r.notes[0].find("no classical transition") != std::string::npos);
}

TEST_CASE("extrema are refined by parabolas") {
  std::vector<double> x, y;
  for (int i = 0; i <= 60; ++i) {
    x.push_back(0.05 * i);
    y.push_back(-std::pow(x.back() - 1.013, 2));
  }
  const auto e = find_extrema(x, y);
  REQUIRE(e.size() == 1);
  CHECK(e[0].kind == 1);
  CHECK(e[0].position == doctest::Approx(1.013).epsilon(1e-12));

  std::vector<Extremum> ref{{1.0, 1, 1}, {1.5, -1, -1}, {2.0, 1, 1}}, cand{{1.05, 1, 1}, {2.1, 1, 1}};
  const auto m = match_extrema(ref, cand);
  CHECK(m[0].matched);
  CHECK(m[0].offset == doctest::Approx(0.05));
  CHECK(m[0].local_period == doctest::Approx(1.0));
  CHECK_FALSE(m[1].matched);
}

TEST_CASE("compare: identical files, mismatched grids, failed points") {
  const std::string head = std::string(kCsvHeader) + "\n";
  std::string body;
  for (int i = 0; i < 9; ++i)
    body += "0.5,0.5," + std::to_string(1 + 0.1 * i) + ",0.05,0.1,eigen," + std::to_string(std::cos(3.0 * i)) +
            ",0,0\n";
  const auto rows = rows_of(head + body);
  const ComparisonReport same = run_compare(rows, rows);
  CHECK(same.max_absolute == 0.0);
  CHECK(same.points.size() == 9);
  CHECK(same.max_offset_periods == 0.0);

  auto shifted = rows;
  shifted.back().tau += 1.0;
  CHECK_THROWS_AS(run_compare(rows, shifted), GridMismatchError);

  auto failed = rows;
  failed[2].value = NAN;
  const ComparisonReport f = run_compare(failed, rows);
  CHECK(f.excluded_failed == 1);
  CHECK(f.points.size() == 8);
}
