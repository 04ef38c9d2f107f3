#include "gfpeps/lattice.hpp"

#include <algorithm>

namespace gfpeps {

LatticeGeometry::LatticeGeometry(int dim_, std::array<int, 3> extent_, double spacing_)
    : dim(dim_), extent(extent_), spacing(spacing_) {
  if (dim != 2 && dim != 3) throw GeometryError("lattice dimension must be 2 or 3");
  if (spacing <= 0.0) throw GeometryError("lattice spacing must be positive");
  for (int i = dim; i < 3; ++i) extent[i] = 1;
  for (int i = 0; i < dim; ++i) {
    if (extent[i] < 1) throw GeometryError("lattice extent must be positive");
    if (extent[i] % 2 != 0 && extent[i] != 1)
      throw GeometryError("lattice extent must be even on every axis");
  }
}

int LatticeGeometry::sites() const {
  int n = 1;
  for (int i = 0; i < dim; ++i) n *= extent[i];
  return n;
}

bool LatticeGeometry::extents_equal() const {
  for (int i = 1; i < dim; ++i)
    if (extent[i] != extent[0]) return false;
  return true;
}

bool LatticeGeometry::admits_rotations() const {
  if (!extents_equal()) return false;
  return extent[0] >= 2 && extent[0] % 2 == 0;
}

void LatticeGeometry::require_rotations() const {
  if (!admits_rotations())
    throw GeometryError("rotations need equal even extents on all axes");
}

namespace {
int mod(int a, int m) {
  int r = a % m;
  return r < 0 ? r + m : r;
}
}  // namespace

SiteIndex reduce(const LatticeGeometry& geom, SiteIndex s) {
  for (int i = 0; i < geom.dim; ++i) s.x[i] = mod(s.x[i], geom.extent[i]);
  for (int i = geom.dim; i < 3; ++i) s.x[i] = 0;
  return s;
}

int site_id(const LatticeGeometry& geom, const SiteIndex& s) {
  SiteIndex r = reduce(geom, s);
  int id = 0;
  for (int i = 0; i < geom.dim; ++i) id = id * geom.extent[i] + r.x[i];
  return id;
}

SiteIndex site_from_id(const LatticeGeometry& geom, int id) {
  SiteIndex s;
  for (int i = geom.dim - 1; i >= 0; --i) {
    s.x[i] = id % geom.extent[i];
    id /= geom.extent[i];
  }
  return s;
}

SiteIndex neighbor(const LatticeGeometry& geom, const SiteIndex& s, int axis) {
  SiteIndex t = s;
  t.x[axis - 1] += 1;
  return reduce(geom, t);
}

int sublattice_parity(const SiteIndex& s) {
  int sum = s.x[0] + s.x[1] + s.x[2];
  return (sum % 2 == 0) ? 1 : -1;
}

SiteIndex rotate_site(const LatticeGeometry& geom, int axis, const SiteIndex& s) {
  geom.require_rotations();
  SiteIndex r;
  if (geom.dim == 2) {
    r = SiteIndex(-s.x[1], s.x[0]);
  } else {
    switch (axis) {
      case 1: r = SiteIndex(s.x[0], -s.x[2], s.x[1]); break;
      case 2: r = SiteIndex(s.x[2], s.x[1], -s.x[0]); break;
      case 3: r = SiteIndex(-s.x[1], s.x[0], s.x[2]); break;
      default: throw GeometryError("rotation axis must be 1, 2 or 3");
    }
  }
  return reduce(geom, r);
}

SiteIndex rotate_site_inverse(const LatticeGeometry& geom, int axis, const SiteIndex& s) {
  SiteIndex r = s;
  for (int k = 0; k < 3; ++k) r = rotate_site(geom, axis, r);
  return r;
}

RMat PermutationMatrix::dense() const {
  RMat m = RMat::Zero(size, size);
  for (int i = 0; i < size; ++i) m(i, image[i]) = 1.0;
  return m;
}

bool PermutationMatrix::is_valid() const {
  if (static_cast<int>(image.size()) != size) return false;
  std::vector<int> seen(size, 0);
  for (int v : image) {
    if (v < 0 || v >= size || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

std::pair<int, int> rotate_direction(int dim, int axis, int j) {
  if (dim == 2) {
    // Lambda e1 = e2, Lambda e2 = -e1.
    if (j == 1) return {2, 1};
    if (j == 2) return {1, -1};
    throw GeometryError("direction out of range");
  }
  switch (axis) {
    case 1:  // (x1, -x3, x2)
      if (j == 1) return {1, 1};
      if (j == 2) return {3, 1};
      if (j == 3) return {2, -1};
      break;
    case 2:  // (x3, x2, -x1)
      if (j == 1) return {3, -1};
      if (j == 2) return {2, 1};
      if (j == 3) return {1, 1};
      break;
    case 3:  // (-x2, x1, x3)
      if (j == 1) return {2, 1};
      if (j == 2) return {1, -1};
      if (j == 3) return {3, 1};
      break;
    default:
      throw GeometryError("rotation axis must be 1, 2 or 3");
  }
  throw GeometryError("direction out of range");
}

namespace {
// Leg m (1-based) carries direction: 1:+e1 2:+e2 3:-e1 4:-e2 5:+e3 6:-e3.
std::pair<int, int> leg_direction(int m) {
  switch (m) {
    case 1: return {1, 1};
    case 2: return {2, 1};
    case 3: return {1, -1};
    case 4: return {2, -1};
    case 5: return {3, 1};
    case 6: return {3, -1};
  }
  throw GeometryError("leg out of range");
}

int direction_leg(int axis, int sign) {
  if (axis == 1) return sign > 0 ? 1 : 3;
  if (axis == 2) return sign > 0 ? 2 : 4;
  return sign > 0 ? 5 : 6;
}
}  // namespace

PermutationMatrix leg_permutation(int dim, int axis) {
  if (dim != 2 && dim != 3) throw GeometryError("dimension must be 2 or 3");
  if (dim == 3 && (axis < 1 || axis > 3)) throw GeometryError("axis must be 1, 2 or 3");
  const int n = 2 * dim;
  PermutationMatrix p;
  p.size = n;
  p.image.resize(n);
  for (int m = 1; m <= n; ++m) {
    auto [ax, sg] = leg_direction(m);
    auto [ax2, sg2] = rotate_direction(dim, axis, ax);
    p.image[m - 1] = direction_leg(ax2, sg * sg2) - 1;
  }
  return p;
}

int ModeTable::per_site() const {
  return n_spin * (1 + 2 * geom.dim * (n_c + n_d));
}

namespace {
int64_t mode_key(const LatticeGeometry& geom, const ModeIndex& m) {
  int64_t k = site_id(geom, m.site);
  k = k * 3 + static_cast<int>(m.species);
  k = k * 8 + m.leg;
  k = k * 1024 + m.copy;
  k = k * 64 + m.spin;
  return k;
}
}  // namespace

int ModeTable::index_of(const ModeIndex& m) const {
  // Closed-form position within the canonical ordering.
  const int legs = 2 * geom.dim;
  int base = site_id(geom, m.site) * per_site();
  switch (m.species) {
    case Species::Physical:
      return base + m.spin;
    case Species::C:
      return base + n_spin + ((m.leg - 1) * n_c + m.copy) * n_spin + m.spin;
    case Species::D:
      return base + n_spin * (1 + legs * n_c) +
             ((m.leg - 1) * n_d + m.copy) * n_spin + m.spin;
  }
  throw ValidationError("bad species");
}

int ModeTable::physical_index(const SiteIndex& s, int spin) const {
  ModeIndex m;
  m.site = reduce(geom, s);
  m.species = Species::Physical;
  m.spin = spin;
  return index_of(m);
}

int ModeTable::virtual_index(const SiteIndex& s, Species sp, int leg, int copy, int spin) const {
  ModeIndex m;
  m.site = reduce(geom, s);
  m.species = sp;
  m.leg = leg;
  m.copy = copy;
  m.spin = spin;
  return index_of(m);
}

std::vector<int> ModeTable::physical_positions() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (modes[i].species == Species::Physical) out.push_back(i);
  return out;
}

std::vector<int> ModeTable::virtual_positions() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (modes[i].species != Species::Physical) out.push_back(i);
  return out;
}

ModeTable enumerate_modes(const LatticeGeometry& geom, int n_spin, int n_c, int n_d) {
  if (n_spin < 1 || n_c < 0 || n_d < 0)
    throw ValidationError("mode counts must be nonnegative (n_spin >= 1)");
  ModeTable tab;
  tab.geom = geom;
  tab.n_spin = n_spin;
  tab.n_c = n_c;
  tab.n_d = n_d;
  const int legs = 2 * geom.dim;
  tab.modes.reserve(static_cast<size_t>(geom.sites()) * tab.per_site());
  for (int id = 0; id < geom.sites(); ++id) {
    SiteIndex s = site_from_id(geom, id);
    for (int a = 0; a < n_spin; ++a) {
      ModeIndex m;
      m.site = s;
      m.species = Species::Physical;
      m.spin = a;
      tab.modes.push_back(m);
    }
    for (int sp = 1; sp <= 2; ++sp) {
      const int copies = sp == 1 ? n_c : n_d;
      for (int leg = 1; leg <= legs; ++leg)
        for (int mu = 0; mu < copies; ++mu)
          for (int a = 0; a < n_spin; ++a) {
            ModeIndex m;
            m.site = s;
            m.species = static_cast<Species>(sp);
            m.leg = leg;
            m.copy = mu;
            m.spin = a;
            tab.modes.push_back(m);
          }
    }
  }
  (void)mode_key;
  return tab;
}

}  // namespace gfpeps
