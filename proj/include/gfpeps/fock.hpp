#pragma once

#include <vector>

#include "gfpeps/common.hpp"

namespace gfpeps {

inline constexpr int kFockModeCap = 14;

/// Dense occupation-number representation used to brute-force every Gaussian
/// identity on small mode counts.  Basis state b (bitmask) is
/// a'_{p1} a'_{p2} ... |0> with p1 < p2 < ... the set bits of b (creation
/// operators applied in ascending canonical order).
struct FockState {
  int modes = 0;
  Vec amp;

  FockState() = default;
  explicit FockState(int m);
  static FockState vacuum(int m);
};

void require_fock_size(int modes);

/// In-place a'_p and a_p with Jordan-Wigner signs.
FockState fock_apply_create(const FockState& v, int p);
FockState fock_apply_annihilate(const FockState& v, int p);

/// <l|r>
cplx fock_inner(const FockState& l, const FockState& r);
double fock_norm(const FockState& v);
double fock_fidelity(const FockState& l, const FockState& r);

/// Quadratic operator
///   G = sum_pq dagdag_pq a'_p a'_q + sum_pq hop_pq a'_p a_q
///     + sum_pq annann_pq a_p a_q
/// Empty (size-0) matrices stand for absent blocks.
struct QuadraticOpSpec {
  Mat dagdag;
  Mat hop;
  Mat annann;
};

FockState fock_apply_quadratic(const QuadraticOpSpec& op, const FockState& v);

/// exp(G)|v> by Taylor series; terminates exactly for nilpotent G (pure
/// creation or pure annihilation blocks).
FockState fock_apply_exp_quadratic(const QuadraticOpSpec& op, const FockState& v,
                                   int max_terms = 400, double cutoff = 1e-300);

/// exp(1/2 sum_pq T_pq a'_p a'_q)|0>, the unnormalized BCS state.
FockState fock_build_bcs(const Mat& T);

/// Multiply amplitudes by w^(number of particles).
FockState fock_scale_by_number(const FockState& v, cplx w);

enum class MassWeight { Exact, Linear };

struct FockQuadraticHamiltonian {
  Mat hopping;   // hermitian H1, coefficient of a'_p a_q
  Mat pairing;   // antisymmetric H2, coefficient of a'_p a'_q (+ h.c. implied)
};

/// Dense matrix of H on the 2^M Fock basis.
Mat fock_hamiltonian_matrix(const FockQuadraticHamiltonian& h, int modes);

/// N applications of the three-factor split of exp(-eps H) to the vacuum,
/// without normalizing:
///   exp(-eps P') * W * exp(-eps P)
/// with P' the creation pairing part, P its adjoint, and W the diagonal mass
/// factor.  MassWeight::Exact uses exp(-m eps) per particle (requires H1 to be
/// a uniform diagonal for the fast path, general H1 handled by Taylor);
/// MassWeight::Linear uses r = 1 - m eps per particle and requires H1 = m*1.
FockState fock_imaginary_time_gs(const FockQuadraticHamiltonian& h, double beta, int n_steps,
                                 MassWeight weight = MassWeight::Exact);

/// Partial contraction: <omega| over the modes at virt_positions (ascending),
/// returning a state over the remaining modes in their induced order.
/// Includes the interleaving parity of the occupied sets.
FockState fock_project(const FockState& joint, const FockState& bond,
                       const std::vector<int>& virt_positions);

/// Amplitude of the BCS state exp(1/2 a' T a')|0> on the basis state with
/// (even) occupied set S: Pf(T[S,S]).  Used by enumeration oracles at mode
/// counts beyond the dense cap.
cplx bcs_minor_amplitude(const Mat& T, const std::vector<int>& occupied);

}  // namespace gfpeps
