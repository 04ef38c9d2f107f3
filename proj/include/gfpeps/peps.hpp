#pragma once

#include <array>
#include <optional>
#include <random>
#include <vector>

#include "gfpeps/fock.hpp"
#include "gfpeps/gaussian.hpp"
#include "gfpeps/hamiltonians.hpp"
#include "gfpeps/lattice.hpp"

namespace gfpeps {

/// Full parameter set of a Gaussian fermionic PEPS: per-site physical-virtual
/// couplings t, virtual-virtual couplings tau, and per-link bond matrices
/// W^C, W^D.  When translation_invariant is set, t and tau hold one shared
/// entry; the W tables are always per-site (staggered families need them).
struct PepsParams {
  LatticeGeometry geom;
  int n_spin = 1;
  int n_c = 0;
  int n_d = 0;
  bool translation_invariant = true;

  /// t[s][mu]: n_spin x (2d n_spin); row a = physical spin, column
  /// (m-1) n_spin + b addresses the c-mode leg m, spin b.
  std::vector<std::vector<Mat>> t;
  /// tau[s][mu n_d + nu]: (2d n_spin) x (2d n_spin); row (m-1) n_spin + a is
  /// the c side, column (n-1) n_spin + b the d side.
  std::vector<std::vector<Mat>> tau;
  /// w_c[s][i-1], w_d[s][i-1]: n_spin x n_spin bond matrices of link (s, i).
  std::vector<std::array<Mat, 3>> w_c, w_d;

  void validate() const;
  const Mat& t_at(int site, int mu) const;
  const Mat& tau_at(int site, int mu, int nu) const;
};

/// Leg pair (m, n) coupled by X^(i): (1,3), (2,4), (5,6).
std::pair<int, int> x_pair(int axis);

/// Pairing state of prod_x A(x) |0> over all physical + virtual modes.
PairingState assemble_joint_pairing(const PepsParams& params);

/// Pairing state of prod_{x,i} w_i(x) |0> over the virtual modes.
PairingState assemble_bond_pairing(const PepsParams& params);

struct ContractResult {
  PairingState state;          // over the physical modes
  std::optional<cplx> scalar;  // omitted on the sparse path
};

struct ContractOptions {
  bool want_scalar = false;  // forces the dense path
  /// Dense projection below this total mode count, sparse above.
  int dense_threshold = 600;
};

/// Project the joint state onto the bond state over every virtual mode.
ContractResult contract(const PepsParams& params, const ContractOptions& opt = {});

/// Free coefficients of the rotation-symmetric families: t per copy, z per
/// copy pair (4 entries used in d=2, first 3 in d=3).
struct SymmetricCoefficients {
  std::vector<cplx> t;
  std::vector<std::array<cplx, 4>> z;
};

SymmetricCoefficients random_symmetric_coefficients(int n_c, int n_d, std::mt19937_64& rng,
                                                    double scale = 0.5);

/// 4x4 circulant with first row (z1 z2 z3 z4).
Mat circulant_tau(const std::array<cplx, 4>& z);
/// The 6x6 d=3 pattern: z3 diagonal, z2 on opposite-leg pairs, z1 elsewhere.
Mat bosrot_tau(const std::array<cplx, 4>& z);

/// d=2 family: eta = exp(i pi/4), t uniform over legs, circulant tau,
/// W^C = (1, conj(eta)^2), W^D = (1, eta^2).
PepsParams symmetric_params_d2(const LatticeGeometry& geom, int n_c, int n_d,
                               const SymmetricCoefficients& coeffs);

/// d=3 staggered family: single component, bosrot tau, staggered hopping
/// W tables (W^D from the Hamiltonian amplitudes, W^C conjugated).
PepsParams symmetric_params_d3_staggered(const LatticeGeometry& geom, int n_c, int n_d,
                                         const SymmetricCoefficients& coeffs);

/// d=3 spin-1/2 family: t and tau carry identity spin blocks,
/// W^C(i) = conj(J_i), W^D(i) = J_i.
PepsParams symmetric_params_d3_spinhalf(const LatticeGeometry& geom, int n_c, int n_d,
                                        const SymmetricCoefficients& coeffs);

/// Exact ground state construction from the imaginary-time identity:
/// N_c = N, N_d = N - 1 copies, t^(mu) = sqrt(eps/2a) r^mu,
/// copy-triangular z couplings with ratio r = 1 - m eps, W^C = conj(K),
/// W^D = K.  Requires eps * margin < min(a, 1/m).
PepsParams exact_construction_params(const KSpec& spec, double beta, int n_steps,
                                     double eps_margin = 10.0);

/// The same imaginary-time state built by the dense oracle (physical modes
/// <= 12): N three-factor steps with the linear mass weight r = 1 - m eps.
FockState trotter_reference(const KSpec& spec, double beta, int n_steps);

/// |<psi_1|psi_2>|^2 / (<1|1><2|2>) between a contracted state and a dense
/// oracle state over the same physical modes.
double fock_pairing_fidelity(const PairingState& state, const FockState& reference);

}  // namespace gfpeps
