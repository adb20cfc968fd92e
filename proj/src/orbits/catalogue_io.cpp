#include <fstream>

#include <json.hpp>

#include "ctrace/orbits.hpp"

namespace ctrace {

namespace {

constexpr int kRecordVersion = 1;

std::vector<double> as_vector(const State& x) { return {x.data(), x.data() + x.size()}; }

}  // namespace

std::string orbit_record(const CompoundOrbit& o) {
  nlohmann::json j;
  j["version"] = kRecordVersion;
  j["orbit_id"] = o.id;
  j["E"] = o.E;
  j["Eprime"] = o.E_prime;
  j["tau"] = o.tau;
  j["a"] = o.a;
  j["b"] = o.b;
  j["j"] = o.j;
  j["jprime"] = o.j_prime;
  j["t"] = o.t;
  j["tprime"] = o.t_prime;
  j["S_energy"] = o.action_energy;
  j["S_time"] = o.action_time;
  j["det_IminusM"] = o.det_one_minus_M;
  j["jacobian_det"] = o.jacobian_det;
  j["caustic_index"] = o.caustic_index;
  j["trace_phase"] = o.trace_phase.total;
  j["damping"] = o.damping;
  j["near_caustic"] = o.near_caustic;
  j["partner"] = o.partner;
  j["start"] = as_vector(o.start.point);
  j["end"] = as_vector(o.end.point);
  j["warnings"] = o.warnings;
  return j.dump();
}

void write_catalogue(const std::string& path, const std::vector<CompoundOrbit>& orbits, bool append) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw Error("cannot open catalogue file " + path);
  for (const auto& o : orbits) out << orbit_record(o) << '\n';
}

std::vector<OrbitRecord> read_catalogue(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open catalogue file " + path);
  std::vector<OrbitRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      if (j.value("version", 0) != kRecordVersion) throw Error("unsupported record version");
      OrbitRecord r;
      r.orbit_id = j.at("orbit_id");
      r.E = j.at("E");
      r.E_prime = j.at("Eprime");
      r.tau = j.at("tau");
      r.j = j.at("j");
      r.j_prime = j.at("jprime");
      r.t = j.at("t");
      r.t_prime = j.at("tprime");
      r.S_energy = j.at("S_energy");
      r.S_time = j.at("S_time");
      r.det_IminusM = j.at("det_IminusM");
      r.jacobian_det = j.at("jacobian_det");
      r.caustic_index = j.at("caustic_index");
      r.near_caustic = j.at("near_caustic");
      r.start = j.at("start").get<std::vector<double>>();
      r.end = j.at("end").get<std::vector<double>>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace ctrace
