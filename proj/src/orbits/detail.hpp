#pragma once

#include <vector>

#include "ctrace/orbits.hpp"

namespace ctrace::detail {

struct IntersectionSet {
  std::vector<ShellContour> shells;
  std::vector<ShellContour> driven_shells;
  std::vector<ShellIntersection> points;
};

IntersectionSet compute_intersections(const TransitionQuery& q, const SystemSpec& spec, const OrbitOptions& opt);

/// Newton polish of x onto H = E, H(.|tau) = E'. Returns false if the normals are parallel.
bool polish_intersection(State& x, double E, double E_prime, double tau, const SystemSpec& spec);

/// Time s near `guess` at which the flow from x0 crosses the normal plane through `target`.
/// Returns the reached point in `reached`.
double time_to_point(const State& x0, const State& target, double guess, FlowSpec which, const SystemSpec& spec,
                     State& reached);

}  // namespace ctrace::detail
