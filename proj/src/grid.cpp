#include "maddm/grid.hpp"

#include <cassert>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace maddm {

int stencil_width_for(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  int w = static_cast<int>(std::ceil(std::pow(h, -1.0 / 3.0)));
  // Correct the floating-point estimate: w is the smallest integer with
  // w^3 * h >= 1.
  while (static_cast<double>(w) * w * w * h < 1.0) ++w;
  while (w > 1 && static_cast<double>(w - 1) * (w - 1) * (w - 1) * h >= 1.0) --w;
  return w;
}

int DomainSpec::nodes_for_spacing(double L, double h) {
  if (!(L > 0.0) || !(h > 0.0)) throw std::invalid_argument("L and h must be positive");
  int N = static_cast<int>(std::lround(2.0 * L / h)) - 1;
  if (N < 1) throw std::invalid_argument("spacing too coarse: no interior nodes");
  return N;
}

DirectionSet build_directions(int w) {
  assert(w >= 1);
  DirectionSet d;
  d.w = w;
  const int ne = 2 * w;
  d.offsets.reserve(ne);
  d.angles.reserve(ne);
  d.norms.reserve(ne);
  for (int j = 0; j < ne; ++j) {
    const int ex = w - j;
    const int ey = w - std::abs(w - j);
    d.offsets.push_back({ex, ey});
    d.angles.push_back(std::atan2(static_cast<double>(ey), static_cast<double>(ex)));
    d.norms.push_back(std::hypot(static_cast<double>(ex), static_cast<double>(ey)));
  }
  d.gaps.resize(ne);
  for (int j = 0; j + 1 < ne; ++j) d.gaps[j] = d.angles[j + 1] - d.angles[j];
  d.gaps[ne - 1] = d.angles[0] + M_PI - d.angles[ne - 1];
  return d;
}

namespace {

// Reduced non-negative fraction in units of h, measured from the corner
// (-L,-L). Wall coordinates are the exact integers 0 and N+1.
struct Frac {
  long long num = 0;
  long long den = 1;

  void reduce() {
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  friend auto operator<=>(const Frac&, const Frac&) = default;
};

Frac make_frac(long long num, long long den) {
  assert(den > 0);
  Frac f{num, den};
  f.reduce();
  return f;
}

}  // namespace

Grid::Grid(DomainSpec spec) : spec_(spec), dirs_(build_directions(spec.width())) {
  const int N = spec_.N;
  const double L = spec_.L;
  const double h = spec_.h();
  if (N < 1 || !(L > 0.0)) throw std::invalid_argument("invalid domain spec");

  num_interior_ = N * N;
  coords_.reserve(static_cast<std::size_t>(num_interior_));
  for (int iy = 1; iy <= N; ++iy)
    for (int ix = 1; ix <= N; ++ix)
      coords_.push_back({-L + ix * h, -L + iy * h});

  // node coordinate in length units from a lattice position in h units;
  // wall positions are pinned to exactly +-L
  auto to_coord = [&](const Frac& t) -> double {
    if (t.num == 0) return -L;
    if (t.num == static_cast<long long>(N + 1) * t.den) return L;
    return -L + h * (static_cast<double>(t.num) / static_cast<double>(t.den));
  };

  // Boundary nodes are deduplicated exactly: the exit point of a lattice
  // ray is rational in h units, so coincident hits from different nodes
  // share one id.
  std::map<std::pair<Frac, Frac>, std::int32_t> boundary_ids;

  auto boundary_hit = [&](int ix, int iy, int ex, int ey, double* r_out) -> NodeId {
    // Exit parameter s of the segment (ix,iy) + s*(ex,ey), s in (0,1]:
    // the first wall crossed by the ray.
    long long sn = 1, sd = 1;  // s = sn/sd, start at 1 (candidate endpoint)
    auto tighten = [&](long long num, long long den) {
      // considers s' = num/den; keep the smaller positive value
      if (num * sd < sn * den) {
        sn = num;
        sd = den;
      }
    };
    if (ex > 0) tighten(N + 1 - ix, ex);
    if (ex < 0) tighten(ix, -ex);
    if (ey > 0) tighten(N + 1 - iy, ey);
    if (ey < 0) tighten(iy, -ey);
    assert(sn > 0 && sn <= sd);

    const Frac px = make_frac(ix * sd + sn * ex, sd);
    const Frac py = make_frac(iy * sd + sn * ey, sd);
    auto [it, inserted] = boundary_ids.try_emplace({px, py}, 0);
    if (inserted) {
      it->second = static_cast<std::int32_t>(coords_.size());
      coords_.push_back({to_coord(px), to_coord(py)});
    }
    *r_out = (static_cast<double>(sn) / static_cast<double>(sd)) * h *
             std::hypot(static_cast<double>(ex), static_cast<double>(ey));
    return NodeId{it->second};
  };

  const int ne = dirs_.count();
  stencil_.resize(static_cast<std::size_t>(num_interior_) * ne);
  for (int iy = 1; iy <= N; ++iy) {
    for (int ix = 1; ix <= N; ++ix) {
      const NodeId node = interior_node(ix, iy);
      StencilEntry* entries = stencil_.data() + static_cast<std::size_t>(node.value) * ne;
      for (int j = 0; j < ne; ++j) {
        const auto [ex, ey] = dirs_.offsets[j];
        StencilEntry e;
        if (int nx = ix + ex, ny = iy + ey; nx >= 1 && nx <= N && ny >= 1 && ny <= N) {
          e.plus = interior_node(nx, ny);
          e.r_plus = h * dirs_.norms[j];
        } else {
          e.plus = boundary_hit(ix, iy, ex, ey, &e.r_plus);
        }
        if (int nx = ix - ex, ny = iy - ey; nx >= 1 && nx <= N && ny >= 1 && ny <= N) {
          e.minus = interior_node(nx, ny);
          e.r_minus = h * dirs_.norms[j];
        } else {
          e.minus = boundary_hit(ix, iy, -ex, -ey, &e.r_minus);
        }
        assert(e.r_plus > 0.0 && e.r_minus > 0.0);
        entries[j] = e;
      }
    }
  }
}

void Grid::dump(std::ostream& out, bool boundary_only) const {
  out << "node_id kind x y\n";
  char buf[96];
  const int start = boundary_only ? num_interior_ : 0;
  for (int i = start; i < num_nodes(); ++i) {
    const Point p = coords_[i];
    std::snprintf(buf, sizeof(buf), "%d %s %.17g %.17g\n", i,
                  i < num_interior_ ? "interior" : "boundary", p.x, p.y);
    out << buf;
  }
}

}  // namespace maddm
