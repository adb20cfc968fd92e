#include "ctrace/orbits.hpp"

namespace ctrace {

namespace {

// Trapezoid sum of p dq over every `stride`-th sample of a piece.
double trapezoid(const std::vector<State>& pts, std::size_t stride) {
  const int n = static_cast<int>(pts.front().size() / 2);
  double s = 0.0;
  for (std::size_t i = 0; i + stride < pts.size(); i += stride) {
    const auto& x0 = pts[i];
    const auto& x1 = pts[i + stride];
    s += 0.5 * (x0.tail(n) + x1.tail(n)).dot(x1.head(n) - x0.head(n));
  }
  return s;
}

}  // namespace

double symplectic_area(const std::vector<std::vector<State>>& pieces, double closure_tol) {
  if (pieces.empty()) return 0.0;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const auto& cur = pieces[k];
    const auto& next = pieces[(k + 1) % pieces.size()];
    if (cur.empty() || next.empty()) throw ClosureError("empty curve piece");
    if ((cur.back() - next.front()).norm() > closure_tol)
      throw ClosureError("curve pieces do not join into a closed circuit");
  }
  double total = 0.0;
  for (const auto& piece : pieces) {
    if (piece.size() < 2) continue;
    const double fine = trapezoid(piece, 1);
    if (piece.size() % 2 == 1 && piece.size() >= 5) {
      const double coarse = trapezoid(piece, 2);
      total += (4.0 * fine - coarse) / 3.0;
    } else {
      total += fine;
    }
  }
  return total;
}

double orbit_area(const CompoundOrbit& o, const SystemSpec& spec, int n) {
  const Trajectory a = trajectory(o.start.point, o.t, 2 * n, FlowSpec::intrinsic(), spec);
  const Trajectory b = trajectory(o.end.point, o.t_prime, 2 * n, FlowSpec::driven(o.tau), spec);
  return symplectic_area({a.states, b.states});
}

}  // namespace ctrace
