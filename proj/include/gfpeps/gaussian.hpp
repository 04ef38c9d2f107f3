#pragma once

#include <optional>
#include <vector>

#include "gfpeps/common.hpp"
#include "gfpeps/lattice.hpp"

namespace gfpeps {

/// Unnormalized BCS state exp(1/2 sum_pq T_pq a'_p a'_q)|0> over an ordered
/// mode set.  The mode list may be empty for synthetic (non-lattice) states,
/// in which case modes are anonymous 0..M-1.
struct PairingState {
  std::vector<ModeIndex> modes;
  Mat T;

  PairingState() = default;
  explicit PairingState(Mat t, std::vector<ModeIndex> m = {});

  int size() const { return static_cast<int>(T.rows()); }
  void validate(double tol = 1e-12) const;
};

/// Quadratic Hamiltonian
///   H = sum_pq H1_pq a'_p a_q + sum_pq H2_pq a'_p a'_q + h.c. of the pairing
/// with H1 hermitian and H2 antisymmetric.  scalar_shift tracks additive
/// constants produced by normal ordering; it never enters equality tests.
struct QuadraticHamiltonian {
  std::vector<ModeIndex> modes;
  Mat hopping;   // H1
  Mat pairing;   // H2
  double scalar_shift = 0.0;

  int size() const { return static_cast<int>(hopping.rows()); }
  void validate(double tol = 1e-12) const;

  /// Accumulate the term w * a'_p a'_q + h.c. (p != q).
  void add_pair(int p, int q, cplx w);
  /// Accumulate w * a'_p a_q + conj(w) * a'_q a_p.
  void add_hop(int p, int q, cplx w);
};

/// Pf(A) for complex antisymmetric A via Parlett-Reid tridiagonalization with
/// partial pivoting.  Odd dimension gives 0.  Pf(A)^2 = det(A).
cplx pfaffian(Mat A, double antisym_tol = 1e-10);

/// <left|right> for unnormalized BCS states over identical mode sets,
/// evaluated as a single-valued Pfaffian (no square-root branch):
///   <L|R> = (-1)^(M(M-1)/2) Pf([[-conj(L), I], [-I, R]]).
cplx bcs_overlap(const PairingState& left, const PairingState& right);

/// |<l|r>|^2 / (<l|l> <r|r>)
double bcs_fidelity(const PairingState& l, const PairingState& r);

struct GroundStateOptions {
  double gap_tol = 1e-8;
  double u_singular_tol = 1e-10;
};

/// BCS ground state of a gapped quadratic Hamiltonian via Bogoliubov-de
/// Gennes diagonalization.  Throws GapError when an excitation energy falls
/// below gap_tol, RepresentationError when the Bogoliubov U block is singular
/// (no BCS form relative to |0>).
PairingState ground_state_pairing(const QuadraticHamiltonian& h,
                                  const GroundStateOptions& opt = {});

/// BdG single-particle matrix [[H1, 2 H2], [-2 conj(H2), -H1^T]] (hermitian).
Mat bdg_matrix(const QuadraticHamiltonian& h);

/// Ground state energy (including scalar_shift).
double bdg_ground_energy(const QuadraticHamiltonian& h);

/// All BdG eigenvalues, ascending.
RVec bdg_spectrum(const QuadraticHamiltonian& h);

/// <H> and Var(H) in an unnormalized BCS state, via Wick contractions.
struct EnergyMoments {
  double energy = 0.0;
  double variance = 0.0;
};
EnergyMoments bcs_energy_moments(const QuadraticHamiltonian& h, const PairingState& state);

struct ProjectionResult {
  PairingState state;
  std::optional<cplx> scalar;
};

struct ProjectionOptions {
  bool want_scalar = true;
  /// Above this many virtual modes the scalar is skipped and a sparse solver
  /// may be used by callers that assemble sparse blocks directly.
  double singular_tol = 1e-12;
};

/// Gaussian bond projection (PEPS contraction step): given a joint pairing
/// state and a bond state defined exactly on the virtual modes, returns the
/// pairing state on the complementary modes plus the overall scalar,
///   T_out = P - Q (I - conj(B) V)^{-1} conj(B) Q^T
/// where P, Q, V are the blocks of the joint matrix in (kept | virtual) order
/// and B is the bond matrix.  Scalar: <bond| restricted-virtual part.
ProjectionResult project_bonds(const PairingState& joint, const PairingState& bond,
                               const std::vector<int>& virt_positions,
                               const ProjectionOptions& opt = {});

/// Sparse-block variant for large contractions (P = 0 assumed absent when
/// empty).  No scalar is computed.
Mat project_bonds_sparse(const SpMat& P, const SpMat& Q, const SpMat& V, const SpMat& B,
                         double singular_tol = 1e-12);

/// a'_p -> sum_q U_qp a'_q at the pairing level: T -> U T U^T.
PairingState transform_modes(const PairingState& state, const Mat& U,
                             double unitary_tol = 1e-10);

/// Normalized two-point functions of an unnormalized BCS state.
struct TwoPointFunctions {
  Mat number;     // G_pq = <a'_p a_q>
  Mat anomalous;  // F_pq = <a_p a_q>
};
TwoPointFunctions bcs_two_point(const PairingState& state);

/// Real antisymmetric 2M x 2M Majorana covariance matrix,
/// Gamma_jk = (i/2) <[c_j, c_k]> with c_{2p} = a_p + a'_p,
/// c_{2p+1} = -i (a_p - a'_p) (0-based interleaved rows).
struct CovarianceMatrix {
  std::vector<ModeIndex> modes;
  RMat gamma;

  double purity_defect() const;  // |Gamma^T Gamma - 1|_inf, 0 for pure states
};

CovarianceMatrix pairing_to_covariance(const PairingState& state);

/// Inverse map; throws RepresentationError when the recovery is singular
/// (fully occupied modes have no BCS form relative to |0>).
PairingState covariance_to_pairing(const CovarianceMatrix& cov, double singular_tol = 1e-10);

}  // namespace gfpeps
