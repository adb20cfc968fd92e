#include <cstdio>
#include <filesystem>
#include <fstream>

#include "detail.hpp"

namespace ctrace {

namespace {

constexpr char kMagic[6] = {'C', 'T', 'S', 'P', 'E', 'C'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& o, const T& v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::istream& i, T& v) {
  return static_cast<bool>(i.read(reinterpret_cast<char*>(&v), sizeof v));
}

void put_doubles(std::ostream& o, const double* p, std::size_t n) {
  o.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

bool get_doubles(std::istream& i, double* p, std::size_t n) {
  return static_cast<bool>(i.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double))));
}

}  // namespace

void write_spectrum_cache(const std::string& path, const Spectrum& s) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) throw Error("cannot write spectrum cache " + path);
    o.write(kMagic, sizeof kMagic);
    put(o, kVersion);
    put(o, fnv1a(s.key));
    put(o, static_cast<std::int32_t>(s.dof));
    put(o, static_cast<std::int32_t>(s.grid.points));
    put(o, s.grid.lower);
    put(o, s.grid.upper);
    put(o, s.hbar);
    put(o, static_cast<std::int32_t>(s.size()));
    put(o, static_cast<std::int32_t>(s.usable_levels));
    const auto n = static_cast<std::size_t>(s.size());
    put_doubles(o, s.energies.data(), n);
    put_doubles(o, s.convergence.data(), n);
    put_doubles(o, s.boundary_mass.data(), n);
    put_doubles(o, reinterpret_cast<const double*>(s.vectors.data()), 2 * static_cast<std::size_t>(s.vectors.size()));
    if (!o) throw Error("failed writing spectrum cache " + path);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<Spectrum> read_spectrum_cache(const std::string& path, const std::string& key) {
  std::ifstream i(path, std::ios::binary);
  if (!i) return std::nullopt;
  char magic[sizeof kMagic];
  std::uint32_t version = 0;
  std::uint64_t hash = 0;
  if (!i.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic)) return std::nullopt;
  if (!get(i, version) || version != kVersion) return std::nullopt;
  if (!get(i, hash) || hash != fnv1a(key)) return std::nullopt;
  std::int32_t dof = 0, points = 0, n = 0, usable = 0;
  Spectrum s;
  if (!get(i, dof) || !get(i, points) || !get(i, s.grid.lower) || !get(i, s.grid.upper) || !get(i, s.hbar) ||
      !get(i, n) || !get(i, usable))
    return std::nullopt;
  const Eigen::Index dim = dof == 1 ? points : static_cast<Eigen::Index>(points) * points;
  if (dof < 1 || dof > 2 || n != dim) return std::nullopt;
  s.dof = dof;
  s.grid.points = points;
  s.usable_levels = usable;
  s.key = key;
  s.energies.resize(n);
  s.convergence.resize(n);
  s.boundary_mass.resize(n);
  s.vectors.resize(dim, n);
  if (!get_doubles(i, s.energies.data(), n) || !get_doubles(i, s.convergence.data(), n) ||
      !get_doubles(i, s.boundary_mass.data(), n) ||
      !get_doubles(i, reinterpret_cast<double*>(s.vectors.data()), 2 * static_cast<std::size_t>(s.vectors.size())))
    return std::nullopt;
  return s;
}

Spectrum eigensolve_cached(const SystemSpec& spec, const GridSpec& grid, const std::string& dir,
                           const EigensolveOptions& opt) {
  const std::string key = spectrum_key(spec, grid, opt);
  char name[64];
  std::snprintf(name, sizeof name, "spectrum-%016llx.bin", static_cast<unsigned long long>(fnv1a(key)));
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  if (auto s = read_spectrum_cache(path.string(), key)) return *s;
  Spectrum s = eigensolve(spec, grid, opt);
  std::filesystem::create_directories(dir);
  write_spectrum_cache(path.string(), s);
  return s;
}

}  // namespace ctrace
