#pragma once

#include <functional>
#include <vector>

#include "gfpeps/gaussian.hpp"
#include "gfpeps/lattice.hpp"

namespace gfpeps {

/// A physical rotation: coordinate map Lambda_axis plus a per-site spin
/// factor eta(x) (a phase when n_spin = 1).
struct PhysicalRotation {
  LatticeGeometry geom;
  int axis = 0;  // 0 for d=2, 1..3 for d=3
  int n_spin = 1;
  std::function<Mat(const SiteIndex&)> eta;
};

/// A virtual rotation: Lambda, the leg permutation R, and spin factors xi
/// (c modes) and zeta (d modes).
struct VirtualRotation {
  LatticeGeometry geom;
  int axis = 0;
  int n_spin = 1;
  PermutationMatrix legs;
  std::function<Mat(const SiteIndex&)> xi;
  std::function<Mat(const SiteIndex&)> zeta;
};

/// Staggered sign table (-1)^(x1+...+xd).
struct ChargeOperator {
  LatticeGeometry geom;
  int sign(const SiteIndex& s) const { return sublattice_parity(s); }
};

/// Staggered d=3 rotation phases of the particle-hole transformed Susskind
/// Hamiltonian:
///   eta_1(x) = (1 - i(-1)^(x1)) / sqrt(2)
///   eta_2(x) = -(1 - i(-1)^(x1))(1 + i(-1)^(x2))(1 + i(-1)^(x3)) / (2 sqrt 2)
///   eta_3(x) = (1 + i(-1)^(x3)) / sqrt(2)
cplx eta_staggered_d3(int axis, const SiteIndex& site);

/// eta_i = exp(i pi sigma_i / 4)
Mat eta_spinhalf(int axis);

PhysicalRotation constant_phase_rotation(const LatticeGeometry& geom, int axis, cplx eta);
PhysicalRotation staggered_rotation_d3(const LatticeGeometry& geom, int axis);
PhysicalRotation spinhalf_rotation(const LatticeGeometry& geom, int axis);

/// Default virtual rotation companion: xi = conj(eta), zeta = eta, legs from
/// leg_permutation.
VirtualRotation default_virtual_rotation(const PhysicalRotation& rot);

/// eta(x) eta(Lx) eta(L^2 x) eta(L^3 x); must be +/-1 times the identity.
int four_rotation_product(const PhysicalRotation& rot, const SiteIndex& site,
                          double tol = 1e-12);

/// max-abs over all site pairs of eta(x) T(x,y) eta(y)^T - T(Lx, Ly), spin
/// blocks contracted accordingly.  Zero iff the state is rotation invariant.
double rotation_residual(const PairingState& state, const PhysicalRotation& rot);

/// Mode-basis unitary of the rotation over the physical modes of a mode
/// table: a'_(x,a) -> sum_b eta_ab(x) a'_(Lx,b).
Mat physical_rotation_unitary(const PhysicalRotation& rot, const ModeTable& tab);

/// max-abs of T entries connecting equal-parity sublattice sites; zero iff
/// exp(i theta Q)|psi> = |psi> for all theta.
double charge_residual(const PairingState& state);

/// Orthonormal basis of the joint eigval-eigenspace of all R^T in Rs.
std::vector<Vec> solve_t_constraint(const std::vector<PermutationMatrix>& Rs, cplx eigval,
                                    double sv_threshold = 1e-10);

/// Basis of { tau : R^T tau R = phase * tau for all R }.
std::vector<Mat> solve_tau_constraint(const std::vector<PermutationMatrix>& Rs, cplx phase,
                                      double sv_threshold = 1e-10);

struct JRelationReport {
  double max_deviation = 0.0;
  std::array<std::array<double, 3>, 3> deviation{};  // [i-1][j-1]
};

/// Evaluates the nine relations eta_i^T J_j eta_i = +/- J_k implied by the
/// rotation geometry (axis images of Lambda_i) for the spin-1/2 choice.
JRelationReport check_J_relations();

/// Dimension of the space of translation-invariant nearest-neighbor pairing
/// amplitudes (t_1..t_d) compatible with all lattice rotations for a constant
/// single-component phase eta.  The full orbit constraint system is used; for
/// d=3 the result is 0 for every constant phase (no spinless translation-
/// invariant ansatz exists).
int no_go_nn_dimension(int dim, cplx eta, double sv_threshold = 1e-10);

/// Mode-basis unitary of the combined physical + virtual rotation over a full
/// mode table:
///   psi'_a(x) -> eta_ab(x) psi'_b(Lx)
///   c'_{m,a}(x) -> xi_ab(x) R_mn c'_{n,b}(Lx)        (copies unchanged)
///   d'_{m,a}(x) -> zeta_ab(x) R_mn d'_{n,b}(Lx)
Mat joint_rotation_unitary(const PhysicalRotation& rot, const VirtualRotation& vrot,
                           const ModeTable& tab);

}  // namespace gfpeps
