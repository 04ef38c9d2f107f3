#pragma once

#include <array>
#include <functional>
#include <vector>

#include "gfpeps/gaussian.hpp"
#include "gfpeps/lattice.hpp"

namespace gfpeps {

/// Pauli matrices, sigma_1..sigma_3 (axis 1-based).
Mat pauli(int axis);
/// epsilon = i sigma_2
Mat epsilon_matrix();
/// Hamiltonian Dirac matrices, alpha_i = offdiag(sigma_i, sigma_i),
/// beta = diag(1, -1).
Mat dirac_alpha(int axis);
Mat dirac_beta();
/// Symmetric spin pairing matrices J_i = epsilon sigma_i used by the
/// rotation-invariance relations and the spin-1/2 bond matrices.
Mat spin_pairing_J(int axis);
/// Pairing blocks sigma_i epsilon produced by the particle-hole transform of
/// the naive Dirac Hamiltonian (J_i up to axis-dependent signs).
Mat naive_pairing_block(int axis);

/// Unified nearest-neighbor BCS-form Hamiltonian
///   H = (-i/2a) sum_{x,i} psi'(x) K_i(x) psi'(x + e_i) + h.c.
///       + m sum_x psi'(x) psi(x)
/// with per-direction, per-site N_s x N_s amplitudes K_i(x).
struct KSpec {
  LatticeGeometry geom;
  int n_spin = 1;
  double mass = 1.0;
  /// K[site_id][axis-1], each n_spin x n_spin.
  std::vector<std::array<Mat, 3>> K;

  void validate() const;
  const Mat& k(const SiteIndex& s, int axis) const;
};

/// Staggered (Susskind) d=2 spec: K_1 = 1, K_2 = i, single spin component.
KSpec staggered_d2_kspec(const LatticeGeometry& geom, double mass);

/// Staggered d=3 spec: K_1 = 1, K_2(x) = i(-1)^(x3), K_3(x) = (-1)^(x1+x2).
KSpec staggered_d3_kspec(const LatticeGeometry& geom, double mass);

enum class NaiveBranch { Upper, Lower };

/// Two-component specs obtained from the particle-hole transformed naive
/// Dirac Hamiltonian: K_i = sigma_i epsilon (upper) or its complex conjugate
/// (lower branch, after the extra all-site particle-hole flip).
KSpec naive_kspec(const LatticeGeometry& geom, double mass, NaiveBranch branch);

/// Assemble the BdG blocks of a KSpec over the physical modes in canonical
/// order.
QuadraticHamiltonian build_quadratic(const KSpec& spec);

/// Four-component naive discretization of the Dirac Hamiltonian,
/// number-conserving (hopping + mass only).
QuadraticHamiltonian build_naive_dirac(const LatticeGeometry& geom, double mass);

/// Particle-hole transform: on sites selected by the predicate,
/// a'_(x,a) -> sum_b spin_matrix_ab a_(x,b).  The additive constant from
/// normal ordering is tracked in scalar_shift and excluded from equality
/// tests.
QuadraticHamiltonian particle_hole_transform(const QuadraticHamiltonian& h,
                                             const std::function<bool(const SiteIndex&)>& site_predicate,
                                             const Mat& spin_matrix);

/// General Bogoliubov substitution a'_p = sum_r (U_rp b'_r + V_rp b_r).
QuadraticHamiltonian bogoliubov_substitute(const QuadraticHamiltonian& h, const Mat& U,
                                           const Mat& V);

/// Restriction to a mode subset; requires all cross terms to the complement
/// to vanish (used after decoupling).
QuadraticHamiltonian restrict_modes(const QuadraticHamiltonian& h,
                                    const std::vector<int>& positions, double cross_tol = 1e-10);

/// Largest cross-block entry between two mode subsets, over both BdG blocks.
double cross_block_norm(const QuadraticHamiltonian& h, const std::vector<int>& a,
                        const std::vector<int>& b);

/// Uniform gauge a' -> phase * a' on every mode: H2 -> phase^2 H2.
QuadraticHamiltonian gauge_phase(const QuadraticHamiltonian& h, cplx phase);

PairingState exact_ground(const KSpec& spec, const GroundStateOptions& opt = {});

}  // namespace gfpeps
