#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ctrace/cli.hpp"

namespace ctrace {

namespace {

using Key = std::tuple<double, double, double>;

double parse_double(const std::string& s, const std::string& path, int line) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw Error(path + ":" + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::string pick_pathway(const std::vector<CsvRow>& rows, const std::string& wanted, const char* side) {
  std::set<std::string> names;
  for (const auto& r : rows) names.insert(r.pathway);
  if (!wanted.empty()) {
    if (!names.count(wanted)) throw Error(std::string(side) + " file has no pathway '" + wanted + "'");
    return wanted;
  }
  names.erase("background");
  if (names.size() != 1)
    throw Error(std::string(side) + " file holds several pathways; choose one with --pathways left,right");
  return *names.begin();
}

double parabola_vertex(const double* x, const double* y, double& value) {
  const double d = (x[0] - x[1]) * (x[0] - x[2]) * (x[1] - x[2]);
  const double A = (x[2] * (y[1] - y[0]) + x[1] * (y[0] - y[2]) + x[0] * (y[2] - y[1])) / d;
  const double B = (x[2] * x[2] * (y[0] - y[1]) + x[1] * x[1] * (y[2] - y[0]) + x[0] * x[0] * (y[1] - y[2])) / d;
  const double C =
      (x[1] * x[2] * (x[1] - x[2]) * y[0] + x[2] * x[0] * (x[2] - x[0]) * y[1] + x[0] * x[1] * (x[0] - x[1]) * y[2]) / d;
  const double xv = -B / (2 * A);
  value = C - B * B / (4 * A);
  return xv;
}

}  // namespace

std::vector<CsvRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw Error(path + ": unexpected header");
  std::vector<CsvRow> rows;
  for (int n = 2; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 9) throw Error(path + ":" + std::to_string(n) + ": expected 9 columns");
    CsvRow r;
    r.E = parse_double(f[0], path, n);
    r.E_prime = parse_double(f[1], path, n);
    r.tau = parse_double(f[2], path, n);
    r.epsilon = parse_double(f[3], path, n);
    r.hbar = parse_double(f[4], path, n);
    r.pathway = f[5];
    r.value = parse_double(f[6], path, n);
    r.n_orbits = std::stoi(f[7]);
    r.n_warnings = std::stoi(f[8]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<Extremum> find_extrema(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<Extremum> out;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (!std::isfinite(y[i - 1]) || !std::isfinite(y[i]) || !std::isfinite(y[i + 1])) continue;
    int kind = 0;
    if (y[i] > y[i - 1] && y[i] >= y[i + 1]) kind = +1;
    if (y[i] < y[i - 1] && y[i] <= y[i + 1]) kind = -1;
    if (!kind) continue;
    Extremum e;
    e.kind = kind;
    e.position = parabola_vertex(&x[i - 1], &y[i - 1], e.value);
    out.push_back(e);
  }
  return out;
}

std::vector<ExtremumMatch> match_extrema(const std::vector<Extremum>& reference,
                                         const std::vector<Extremum>& candidate) {
  std::vector<ExtremumMatch> out;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    ExtremumMatch m;
    m.reference = reference[i];
    const int kind = reference[i].kind;
    const double x = reference[i].position;
    double prev = std::numeric_limits<double>::quiet_NaN(), next = prev, other = prev;
    for (std::size_t k = i; k-- > 0;)
      if (reference[k].kind == kind) {
        prev = reference[k].position;
        break;
      }
    for (std::size_t k = i + 1; k < reference.size(); ++k)
      if (reference[k].kind == kind) {
        next = reference[k].position;
        break;
      }
    for (const auto& r : reference)
      if (r.kind != kind && !(std::abs(r.position - x) >= std::abs(other - x))) other = r.position;
    if (!std::isnan(prev) && !std::isnan(next))
      m.local_period = 0.5 * (next - prev);
    else if (!std::isnan(prev) || !std::isnan(next))
      m.local_period = std::abs((std::isnan(prev) ? next : prev) - x);
    else if (!std::isnan(other))
      m.local_period = 2 * std::abs(other - x);
    else
      m.local_period = std::numeric_limits<double>::quiet_NaN();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : candidate)
      if (c.kind == kind && std::abs(c.position - x) < best) {
        best = std::abs(c.position - x);
        m.candidate = c;
        m.matched = true;
      }
    if (m.matched) m.offset = m.candidate.position - x;
    out.push_back(m);
  }
  return out;
}

ComparisonReport run_compare(const std::vector<CsvRow>& left, const std::vector<CsvRow>& right,
                             const std::string& left_pathway, const std::string& right_pathway) {
  ComparisonReport rep;
  rep.left_pathway = pick_pathway(left, left_pathway, "left");
  rep.right_pathway = pick_pathway(right, right_pathway, "right");
  std::map<Key, const CsvRow*> L, R;
  for (const auto& r : left)
    if (r.pathway == rep.left_pathway) L[{r.E, r.E_prime, r.tau}] = &r;
  for (const auto& r : right)
    if (r.pathway == rep.right_pathway) R[{r.E, r.E_prime, r.tau}] = &r;
  if (L.size() != R.size()) throw GridMismatchError("grids differ in size: " + std::to_string(L.size()) + " vs " +
                                                    std::to_string(R.size()) + " points");
  for (auto li = L.begin(), ri = R.begin(); li != L.end(); ++li, ++ri) {
    if (li->first != ri->first) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "grids differ at E=%.17g Eprime=%.17g tau=%.17g", std::get<0>(li->first),
                    std::get<1>(li->first), std::get<2>(li->first));
      throw GridMismatchError(buf);
    }
    if (li->second->epsilon != ri->second->epsilon || li->second->hbar != ri->second->hbar)
      throw GridMismatchError("epsilon or hbar differ between the files");
  }

  double sum_rel = 0.0;
  int n_rel = 0;
  std::map<Key, std::pair<double, double>> values;
  for (const auto& [k, l] : L) {
    const CsvRow* r = R.at(k);
    rep.left_orbits += l->n_orbits;
    rep.right_orbits += r->n_orbits;
    rep.left_warnings += l->n_warnings;
    rep.right_warnings += r->n_warnings;
    if (!std::isfinite(l->value) || !std::isfinite(r->value)) {
      ++rep.excluded_failed;
      continue;
    }
    PointDeviation d;
    std::tie(d.E, d.E_prime, d.tau) = k;
    d.left = l->value;
    d.right = r->value;
    d.absolute = std::abs(d.left - d.right);
    d.relative = d.right != 0.0 ? d.absolute / std::abs(d.right) : (d.absolute == 0.0 ? 0.0 : INFINITY);
    rep.max_absolute = std::max(rep.max_absolute, d.absolute);
    if (std::isfinite(d.relative)) {
      sum_rel += d.relative * d.relative;
      ++n_rel;
    }
    rep.points.push_back(d);
    values[k] = {d.left, d.right};
  }
  rep.rms_relative = n_rel ? std::sqrt(sum_rel / n_rel) : 0.0;

  std::set<double> Es, Fs, Ts;
  for (const auto& [k, _] : values) {
    Es.insert(std::get<0>(k));
    Fs.insert(std::get<1>(k));
    Ts.insert(std::get<2>(k));
  }
  auto slice = [&](const std::string& axis, double a, double b, const std::set<double>& along,
                   const std::function<Key(double)>& key) {
    std::vector<double> x, yl, yr;
    for (double v : along)
      if (auto it = values.find(key(v)); it != values.end()) {
        x.push_back(v);
        yl.push_back(it->second.first);
        yr.push_back(it->second.second);
      }
    if (x.size() < 3) return;
    SliceReport s;
    s.axis = axis;
    s.fixed_a = a;
    s.fixed_b = b;
    s.matches = match_extrema(find_extrema(x, yr), find_extrema(x, yl));
    for (const auto& m : s.matches)
      if (m.matched && std::isfinite(m.local_period) && m.local_period > 0)
        rep.max_offset_periods = std::max(rep.max_offset_periods, std::abs(m.offset) / m.local_period);
    rep.slices.push_back(std::move(s));
  };
  for (double E : Es)
    for (double F : Fs) slice("tau", E, F, Ts, [&](double t) { return Key{E, F, t}; });
  for (double E : Es)
    for (double T : Ts) slice("Eprime", E, T, Fs, [&](double f) { return Key{E, f, T}; });
  for (double F : Fs)
    for (double T : Ts) slice("E", F, T, Es, [&](double e) { return Key{e, F, T}; });
  return rep;
}

void write_comparison(const std::string& dir, const ComparisonReport& r) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  {
    std::ofstream o(base / "compare_points.csv");
    o << "E,Eprime,tau,left,right,abs_dev,rel_dev\n";
    char buf[256];
    for (const auto& p : r.points) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.E, p.E_prime, p.tau, p.left,
                    p.right, p.absolute, p.relative);
      o << buf;
    }
  }
  {
    std::ofstream o(base / "compare_extrema.csv");
    o << "axis,fixed_a,fixed_b,kind,reference,candidate,offset,local_period,offset_periods\n";
    char buf[320];
    for (const auto& s : r.slices)
      for (const auto& m : s.matches) {
        const double per = m.matched ? m.offset / m.local_period : NAN;
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%s,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.axis.c_str(), s.fixed_a,
                      s.fixed_b, m.reference.kind > 0 ? "max" : "min", m.reference.position,
                      m.matched ? m.candidate.position : NAN, m.matched ? m.offset : NAN, m.local_period, per);
        o << buf;
      }
  }
  nlohmann::json j;
  j["version"] = 1;
  j["left_pathway"] = r.left_pathway;
  j["right_pathway"] = r.right_pathway;
  j["points_compared"] = r.points.size();
  j["points_excluded_failed"] = r.excluded_failed;
  j["max_abs_dev"] = r.max_absolute;
  j["rms_rel_dev"] = r.rms_relative;
  std::size_t extrema = 0, matched = 0;
  for (const auto& s : r.slices)
    for (const auto& m : s.matches) {
      ++extrema;
      matched += m.matched;
    }
  j["extrema_reference"] = extrema;
  j["extrema_matched"] = matched;
  j["max_offset_periods"] = r.max_offset_periods;
  j["orbits"] = {{"left", r.left_orbits}, {"right", r.right_orbits}};
  j["warnings"] = {{"left", r.left_warnings}, {"right", r.right_warnings}};
  std::ofstream(base / "compare_summary.json") << j.dump(2) << '\n';
}

}  // namespace ctrace
