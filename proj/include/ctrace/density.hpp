#pragma once

#include <string>
#include <vector>

#include "ctrace/core.hpp"

namespace ctrace {

enum class Pathway { semiclassical, eigen_sum, double_ft, classical_background };

const char* pathway_name(Pathway p);

/// One compound-orbit contribution: value = amplitude * damping * cos(phase + maslov_sigma).
struct SCTerm {
  int orbit_id = 0;
  std::string family;
  double action = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  double maslov_sigma = 0.0;
  double damping = 1.0;
  double value = 0.0;
  std::vector<std::string> warnings;
};

struct DensityResult {
  TransitionQuery query;
  double value = 0.0;
  Pathway pathway = Pathway::semiclassical;
  /// Smooth zero-length contribution included in `value` (semiclassical pathway only).
  double background = 0.0;
  std::vector<SCTerm> terms;
  std::vector<std::string> warnings;

  explicit DensityResult(TransitionQuery q, Pathway p = Pathway::semiclassical) : query(q), pathway(p) {}
};

}  // namespace ctrace
