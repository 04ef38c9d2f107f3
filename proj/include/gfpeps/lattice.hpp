#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "gfpeps/common.hpp"

namespace gfpeps {

/// Periodic square (d=2) or cubic (d=3) lattice.
///
/// Extents must be even on every axis so that staggered phases and the
/// sublattice parity are globally consistent under the periodic wrap.
/// Rotations additionally require all extents equal.
struct LatticeGeometry {
  int dim = 2;                      // 2 or 3
  std::array<int, 3> extent{};     // extent[i] for i < dim, unused axes = 1
  double spacing = 1.0;            // lattice constant a

  LatticeGeometry() = default;
  LatticeGeometry(int dim_, std::array<int, 3> extent_, double spacing_ = 1.0);

  int sites() const;
  bool extents_equal() const;
  /// True when pi/2 rotations map the lattice onto itself (equal even extents).
  bool admits_rotations() const;
  void require_rotations() const;
};

/// Site coordinates, always stored reduced mod extent.
struct SiteIndex {
  std::array<int, 3> x{0, 0, 0};

  SiteIndex() = default;
  SiteIndex(int x1, int x2) : x{x1, x2, 0} {}
  SiteIndex(int x1, int x2, int x3) : x{x1, x2, x3} {}

  bool operator==(const SiteIndex& o) const { return x == o.x; }
};

SiteIndex reduce(const LatticeGeometry& geom, SiteIndex s);
int site_id(const LatticeGeometry& geom, const SiteIndex& s);
SiteIndex site_from_id(const LatticeGeometry& geom, int id);

/// Neighbor in direction +e_axis (axis is 1-based), periodic wrap.
SiteIndex neighbor(const LatticeGeometry& geom, const SiteIndex& s, int axis);

/// (-1)^(x_1 + ... + x_d)
int sublattice_parity(const SiteIndex& s);

/// The pi/2 rotation Lambda (d=2, axis ignored) or Lambda_axis (d=3,
/// axis in {1,2,3}) about the origin, coordinates reduced mod extent.
///
///   d=2:  Lambda x = (-x2, x1)
///   d=3:  Lambda_1 x = (x1, -x3, x2)
///         Lambda_2 x = (x3, x2, -x1)
///         Lambda_3 x = (-x2, x1, x3)
SiteIndex rotate_site(const LatticeGeometry& geom, int axis, const SiteIndex& s);
SiteIndex rotate_site_inverse(const LatticeGeometry& geom, int axis, const SiteIndex& s);

/// A permutation stored as a row-source map: entry (m, image[m]) = 1, i.e.
/// leg m is carried onto leg image[m].
struct PermutationMatrix {
  int size = 0;
  std::vector<int> image;

  RMat dense() const;
  bool is_valid() const;
};

/// Leg labels m = 1..2d under the fixed order
/// (+e1, +e2, -e1, -e2, +e3, -e3); returns the leg exchange R (d=2) or
/// R^(axis) (d=3) induced by the rotation, rows indexing source legs.
PermutationMatrix leg_permutation(int dim, int axis);

/// Direction image of +e_axisj under the rotation: returns (k, sign) with
/// Lambda e_j = sign * e_k (1-based axes).
std::pair<int, int> rotate_direction(int dim, int axis, int j);

enum class Species : int { Physical = 0, C = 1, D = 2 };

/// Address of one fermionic mode.  leg and copy are meaningful for virtual
/// species only (fixed to 0 for Physical); leg is 1-based, copy and spin are
/// 0-based.
struct ModeIndex {
  SiteIndex site;
  Species species = Species::Physical;
  int leg = 0;
  int copy = 0;
  int spin = 0;

  bool operator==(const ModeIndex& o) const {
    return site == o.site && species == o.species && leg == o.leg &&
           copy == o.copy && spin == o.spin;
  }
};

/// Canonical global mode ordering: lexicographic by (site id row-major,
/// species Physical < C < D, leg, copy, spin).  Every antisymmetric matrix
/// in the library is expressed relative to this order.
struct ModeTable {
  LatticeGeometry geom;
  int n_spin = 1;
  int n_c = 0;
  int n_d = 0;
  std::vector<ModeIndex> modes;

  int size() const { return static_cast<int>(modes.size()); }
  int per_site() const;

  int index_of(const ModeIndex& m) const;
  int physical_index(const SiteIndex& s, int spin) const;
  int virtual_index(const SiteIndex& s, Species sp, int leg, int copy, int spin) const;

  std::vector<int> physical_positions() const;
  std::vector<int> virtual_positions() const;
};

ModeTable enumerate_modes(const LatticeGeometry& geom, int n_spin, int n_c, int n_d);

}  // namespace gfpeps
