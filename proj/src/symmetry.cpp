#include "gfpeps/symmetry.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "gfpeps/hamiltonians.hpp"

namespace gfpeps {

cplx eta_staggered_d3(int axis, const SiteIndex& site) {
  const double s1 = (site.x[0] % 2 == 0) ? 1.0 : -1.0;
  const double s2 = (site.x[1] % 2 == 0) ? 1.0 : -1.0;
  const double s3 = (site.x[2] % 2 == 0) ? 1.0 : -1.0;
  const double rt2 = std::sqrt(2.0);
  switch (axis) {
    case 1: return (1.0 - I_UNIT * s1) / rt2;
    case 2:
      return -(1.0 - I_UNIT * s1) * (1.0 + I_UNIT * s2) * (1.0 + I_UNIT * s3) / (2.0 * rt2);
    case 3: return (1.0 + I_UNIT * s3) / rt2;
    default: throw ValidationError("eta_staggered_d3: axis must be 1, 2 or 3");
  }
}

Mat eta_spinhalf(int axis) {
  // exp(i pi sigma / 4) = (1 + i sigma) / sqrt(2)
  return (Mat::Identity(2, 2) + I_UNIT * pauli(axis)) / std::sqrt(2.0);
}

PhysicalRotation constant_phase_rotation(const LatticeGeometry& geom, int axis, cplx eta) {
  PhysicalRotation rot;
  rot.geom = geom;
  rot.axis = axis;
  rot.n_spin = 1;
  rot.eta = [eta](const SiteIndex&) { return Mat::Constant(1, 1, eta); };
  return rot;
}

PhysicalRotation staggered_rotation_d3(const LatticeGeometry& geom, int axis) {
  if (geom.dim != 3) throw GeometryError("staggered_rotation_d3: dim must be 3");
  PhysicalRotation rot;
  rot.geom = geom;
  rot.axis = axis;
  rot.n_spin = 1;
  rot.eta = [axis](const SiteIndex& s) { return Mat::Constant(1, 1, eta_staggered_d3(axis, s)); };
  return rot;
}

PhysicalRotation spinhalf_rotation(const LatticeGeometry& geom, int axis) {
  if (geom.dim != 3) throw GeometryError("spinhalf_rotation: dim must be 3");
  PhysicalRotation rot;
  rot.geom = geom;
  rot.axis = axis;
  rot.n_spin = 2;
  Mat eta = eta_spinhalf(axis);
  rot.eta = [eta](const SiteIndex&) { return eta; };
  return rot;
}

VirtualRotation default_virtual_rotation(const PhysicalRotation& rot) {
  VirtualRotation v;
  v.geom = rot.geom;
  v.axis = rot.axis;
  v.n_spin = rot.n_spin;
  v.legs = leg_permutation(rot.geom.dim, rot.axis);
  auto eta = rot.eta;
  v.xi = [eta](const SiteIndex& s) { return Mat(eta(s).conjugate()); };
  v.zeta = eta;
  return v;
}

int four_rotation_product(const PhysicalRotation& rot, const SiteIndex& site, double tol) {
  Mat prod = Mat::Identity(rot.n_spin, rot.n_spin);
  SiteIndex s = reduce(rot.geom, site);
  for (int k = 0; k < 4; ++k) {
    prod = prod * rot.eta(s);
    s = rotate_site(rot.geom, rot.axis, s);
  }
  const Mat id = Mat::Identity(rot.n_spin, rot.n_spin);
  if ((prod - id).cwiseAbs().maxCoeff() < tol) return 1;
  if ((prod + id).cwiseAbs().maxCoeff() < tol) return -1;
  throw SymmetryError("four_rotation_product: product is not +/- identity");
}

double rotation_residual(const PairingState& state, const PhysicalRotation& rot) {
  const LatticeGeometry& geom = rot.geom;
  geom.require_rotations();
  const int ns = rot.n_spin;
  const int sites = geom.sites();
  if (state.size() != sites * ns)
    throw ValidationError("rotation_residual: state is not a physical-mode state of this geometry");

  auto block = [&](int sx, int sy) {
    return state.T.block(sx * ns, sy * ns, ns, ns);
  };
  double resid = 0.0;
  for (int ix = 0; ix < sites; ++ix) {
    SiteIndex x = site_from_id(geom, ix);
    SiteIndex lx = rotate_site(geom, rot.axis, x);
    const Mat ex = rot.eta(x);
    for (int iy = 0; iy < sites; ++iy) {
      SiteIndex y = site_from_id(geom, iy);
      SiteIndex ly = rotate_site(geom, rot.axis, y);
      const Mat ey = rot.eta(y);
      Mat lhs = ex * block(ix, iy) * ey.transpose();
      Mat rhs = block(site_id(geom, lx), site_id(geom, ly));
      resid = std::max(resid, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }
  return resid;
}

Mat physical_rotation_unitary(const PhysicalRotation& rot, const ModeTable& tab) {
  if (tab.n_c != 0 || tab.n_d != 0)
    throw ValidationError("physical_rotation_unitary: physical-only mode table expected");
  const int M = tab.size();
  Mat U = Mat::Zero(M, M);
  for (int id = 0; id < rot.geom.sites(); ++id) {
    SiteIndex x = site_from_id(rot.geom, id);
    SiteIndex lx = rotate_site(rot.geom, rot.axis, x);
    const Mat eta = rot.eta(x);
    for (int a = 0; a < rot.n_spin; ++a)
      for (int b = 0; b < rot.n_spin; ++b)
        U(tab.physical_index(lx, b), tab.physical_index(x, a)) = eta(a, b);
  }
  return U;
}

double charge_residual(const PairingState& state) {
  if (state.modes.empty())
    throw ValidationError("charge_residual: state carries no mode metadata");
  double resid = 0.0;
  const int M = state.size();
  for (int p = 0; p < M; ++p)
    for (int q = 0; q < M; ++q) {
      if (sublattice_parity(state.modes[p].site) != sublattice_parity(state.modes[q].site))
        continue;
      resid = std::max(resid, std::abs(state.T(p, q)));
    }
  return resid;
}

namespace {
std::vector<Vec> nullspace(const Mat& A, double threshold) {
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
  const int n = static_cast<int>(A.cols());
  const double scale = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  std::vector<Vec> basis;
  for (int i = 0; i < n; ++i) {
    const double sv = i < svd.singularValues().size() ? svd.singularValues()(i) : 0.0;
    if (sv <= threshold * std::max(scale, 1.0)) basis.push_back(svd.matrixV().col(i));
  }
  return basis;
}
}  // namespace

std::vector<Vec> solve_t_constraint(const std::vector<PermutationMatrix>& Rs, cplx eigval,
                                    double sv_threshold) {
  if (Rs.empty()) throw ValidationError("solve_t_constraint: no permutations given");
  const int n = Rs.front().size;
  Mat stacked(static_cast<int>(Rs.size()) * n, n);
  for (size_t k = 0; k < Rs.size(); ++k) {
    Mat Rt = Rs[k].dense().transpose().cast<cplx>();
    stacked.block(static_cast<int>(k) * n, 0, n, n) = Rt - eigval * Mat::Identity(n, n);
  }
  return nullspace(stacked, sv_threshold);
}

std::vector<Mat> solve_tau_constraint(const std::vector<PermutationMatrix>& Rs, cplx phase,
                                      double sv_threshold) {
  if (Rs.empty()) throw ValidationError("solve_tau_constraint: no permutations given");
  const int n = Rs.front().size;
  const int n2 = n * n;
  // vec(R^T tau R) = (R^T kron R^T) vec(tau) for column-major vec.
  Mat stacked(static_cast<int>(Rs.size()) * n2, n2);
  for (size_t k = 0; k < Rs.size(); ++k) {
    Mat Rt = Rs[k].dense().transpose().cast<cplx>();
    Mat kron(n2, n2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) kron.block(i * n, j * n, n, n) = Rt(i, j) * Rt;
    stacked.block(static_cast<int>(k) * n2, 0, n2, n2) = kron - phase * Mat::Identity(n2, n2);
  }
  std::vector<Vec> vecs = nullspace(stacked, sv_threshold);
  std::vector<Mat> out;
  for (const Vec& v : vecs) {
    Mat tau(n, n);
    for (int j = 0; j < n; ++j) tau.col(j) = v.segment(j * n, n);
    out.push_back(tau);
  }
  return out;
}

JRelationReport check_J_relations() {
  JRelationReport rep;
  for (int i = 1; i <= 3; ++i) {
    const Mat eta = eta_spinhalf(i);
    for (int j = 1; j <= 3; ++j) {
      auto [k, sign] = rotate_direction(3, i, j);
      const Mat lhs = eta.transpose() * spin_pairing_J(j) * eta;
      const Mat rhs = double(sign) * spin_pairing_J(k);
      const double dev = (lhs - rhs).cwiseAbs().maxCoeff();
      rep.deviation[i - 1][j - 1] = dev;
      rep.max_deviation = std::max(rep.max_deviation, dev);
    }
  }
  return rep;
}

int no_go_nn_dimension(int dim, cplx eta, double sv_threshold) {
  if (dim != 2 && dim != 3) throw ValidationError("no_go_nn_dimension: dim must be 2 or 3");
  const cplx eta2 = eta * eta;
  std::vector<int> axes = (dim == 2) ? std::vector<int>{0} : std::vector<int>{1, 2, 3};
  // One row per (rotation, direction): +/- t_k - eta^2 t_j = 0.
  Mat A = Mat::Zero(static_cast<int>(axes.size()) * dim, dim);
  int row = 0;
  for (int axis : axes)
    for (int j = 1; j <= dim; ++j, ++row) {
      auto [k, sign] = rotate_direction(dim, axis, j);
      A(row, k - 1) += double(sign);
      A(row, j - 1) -= eta2;
    }
  return static_cast<int>(nullspace(A, sv_threshold).size());
}


Mat joint_rotation_unitary(const PhysicalRotation& rot, const VirtualRotation& vrot,
                           const ModeTable& tab) {
  const LatticeGeometry& geom = rot.geom;
  const int ns = rot.n_spin;
  const int M = tab.size();
  const PermutationMatrix& R = vrot.legs;
  Mat U = Mat::Zero(M, M);
  for (int id = 0; id < geom.sites(); ++id) {
    SiteIndex x = site_from_id(geom, id);
    SiteIndex lx = rotate_site(geom, rot.axis, x);
    const Mat eta = rot.eta(x);
    const Mat xi = vrot.xi(x);
    const Mat zeta = vrot.zeta(x);
    for (int a = 0; a < ns; ++a)
      for (int b = 0; b < ns; ++b) {
        U(tab.physical_index(lx, b), tab.physical_index(x, a)) = eta(a, b);
        for (int m = 1; m <= R.size; ++m) {
          const int n = R.image[m - 1] + 1;
          for (int mu = 0; mu < tab.n_c; ++mu)
            U(tab.virtual_index(lx, Species::C, n, mu, b),
              tab.virtual_index(x, Species::C, m, mu, a)) = xi(a, b);
          for (int mu = 0; mu < tab.n_d; ++mu)
            U(tab.virtual_index(lx, Species::D, n, mu, b),
              tab.virtual_index(x, Species::D, m, mu, a)) = zeta(a, b);
        }
      }
  }
  return U;
}

}  // namespace gfpeps
