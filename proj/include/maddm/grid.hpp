#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace maddm {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class NodeKind { Interior, Boundary };

/// Index into a Grid's node table. Interior nodes occupy the leading ids,
/// boundary nodes follow, so the kind is recoverable from the id alone.
struct NodeId {
  std::int32_t value = -1;
  friend auto operator<=>(NodeId, NodeId) = default;
};

/// Smallest integer w with w^3 * h >= 1, i.e. ceil(h^(-1/3)).
int stencil_width_for(double h);

/// Square domain (-L,L)^2 discretized by an N x N interior lattice with
/// spacing h = 2L/(N+1): one spacing between the outermost nodes and each
/// wall. The stencil width is tied to the spacing, w = ceil(h^(-1/3)).
struct DomainSpec {
  double L = 1.0;
  int N = 1;

  double h() const { return 2.0 * L / (N + 1); }
  int width() const { return stencil_width_for(h()); }

  /// N for a requested spacing: the nearest lattice with h = 2L/(N+1).
  static int nodes_for_spacing(double L, double h);
};

/// The 2w stencil directions e_j = (w-j, w-|w-j|), j = 0..2w-1, with their
/// polar angles (strictly increasing from theta_0 = 0, all below pi) and
/// angular gaps. The last gap wraps around: gap_{2w-1} = theta_0 + pi -
/// theta_{2w-1}, so the gaps sum to pi.
struct DirectionSet {
  int w = 0;
  std::vector<std::array<int, 2>> offsets;
  std::vector<double> angles;
  std::vector<double> gaps;
  std::vector<double> norms;  // |e_j|_2

  int count() const { return 2 * w; }
};

DirectionSet build_directions(int w);

/// One direction of an interior node's stencil. The node at distance
/// r_plus along +e_j/|e_j| and the node at r_minus along the opposite ray.
/// When both neighbors are interior lattice nodes, r_plus = r_minus =
/// h |e_j| (a centered record); otherwise the shorter leg ends at a
/// supplemental boundary node on the wall.
struct StencilEntry {
  NodeId plus;
  NodeId minus;
  double r_plus = 0.0;
  double r_minus = 0.0;
};

/// Immutable computational grid: the interior lattice, the supplemental
/// boundary nodes generated by stencil rays leaving the square, and the
/// per-node stencil records. Safe for concurrent reads once built.
class Grid {
 public:
  explicit Grid(DomainSpec spec);

  const DomainSpec& spec() const { return spec_; }
  const DirectionSet& directions() const { return dirs_; }

  int num_interior() const { return num_interior_; }
  int num_boundary() const { return static_cast<int>(coords_.size()) - num_interior_; }
  int num_nodes() const { return static_cast<int>(coords_.size()); }

  bool is_interior(NodeId id) const { return id.value < num_interior_; }
  NodeKind kind(NodeId id) const {
    return is_interior(id) ? NodeKind::Interior : NodeKind::Boundary;
  }
  Point coord(NodeId id) const { return coords_[id.value]; }

  /// Interior node at 1-based lattice coordinates (ix, iy), each in [1, N].
  NodeId interior_node(int ix, int iy) const {
    return NodeId{(iy - 1) * spec_.N + (ix - 1)};
  }
  NodeId boundary_node(int b) const { return NodeId{num_interior_ + b}; }

  /// 2w stencil records of an interior node, in direction order.
  std::span<const StencilEntry> stencil(NodeId interior) const {
    const int ne = dirs_.count();
    return {stencil_.data() + static_cast<std::size_t>(interior.value) * ne,
            static_cast<std::size_t>(ne)};
  }

  bool is_centered(NodeId interior, int direction) const {
    const StencilEntry& e = stencil(interior)[direction];
    return is_interior(e.plus) && is_interior(e.minus);
  }

  /// Text table: node_id kind x y (17 significant digits).
  void dump(std::ostream& out, bool boundary_only = false) const;

 private:
  DomainSpec spec_;
  DirectionSet dirs_;
  int num_interior_ = 0;
  std::vector<Point> coords_;
  std::vector<StencilEntry> stencil_;
};

}  // namespace maddm
