#include "gfpeps/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <cmath>

namespace gfpeps {

PairingState::PairingState(Mat t, std::vector<ModeIndex> m) : modes(std::move(m)), T(std::move(t)) {
  if (!modes.empty() && static_cast<int>(modes.size()) != T.rows())
    throw ValidationError("PairingState: mode list does not match matrix size");
  if (T.rows() != T.cols()) throw ValidationError("PairingState: T must be square");
}

void PairingState::validate(double tol) const {
  if (T.rows() != T.cols()) throw ValidationError("PairingState: T must be square");
  if (T.size() > 0 && antisymmetry_defect(T) > tol)
    throw ValidationError("PairingState: T not antisymmetric");
}

void QuadraticHamiltonian::validate(double tol) const {
  if (hopping.rows() != hopping.cols() || pairing.rows() != pairing.cols() ||
      hopping.rows() != pairing.rows())
    throw ValidationError("QuadraticHamiltonian: inconsistent block sizes");
  if (hopping.size() > 0 && hermiticity_defect(hopping) > tol)
    throw ValidationError("QuadraticHamiltonian: H1 not hermitian");
  if (pairing.size() > 0 && antisymmetry_defect(pairing) > tol)
    throw ValidationError("QuadraticHamiltonian: H2 not antisymmetric");
}

void QuadraticHamiltonian::add_pair(int p, int q, cplx w) {
  if (p == q) return;  // a'_p a'_p = 0
  pairing(p, q) += 0.5 * w;
  pairing(q, p) -= 0.5 * w;
}

void QuadraticHamiltonian::add_hop(int p, int q, cplx w) {
  hopping(p, q) += w;
  if (p != q) hopping(q, p) += std::conj(w);
}

cplx pfaffian(Mat A, double antisym_tol) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw ValidationError("pfaffian: matrix must be square");
  if (n == 0) return 1.0;
  if (antisymmetry_defect(A) > antisym_tol * std::max(1.0, A.cwiseAbs().maxCoeff()))
    throw ValidationError("pfaffian: matrix not antisymmetric");
  if (n % 2 == 1) return 0.0;

  // Parlett-Reid elimination with partial pivoting; the permutation parity is
  // tracked through the accumulated sign.
  cplx result = 1.0;
  for (int k = 0; k + 1 < n; k += 2) {
    int kp = k + 1;
    for (int i = k + 2; i < n; ++i)
      if (std::abs(A(i, k)) > std::abs(A(kp, k))) kp = i;
    if (kp != k + 1) {
      A.row(k + 1).swap(A.row(kp));
      A.col(k + 1).swap(A.col(kp));
      result = -result;
    }
    const cplx pivot = A(k, k + 1);
    if (pivot == cplx(0)) return 0.0;
    result *= pivot;
    if (k + 2 < n) {
      const int r = n - (k + 2);
      Vec tau = A.row(k).segment(k + 2, r).transpose() / pivot;
      Vec col = A.col(k + 1).segment(k + 2, r);
      // A(i,j) += tau_i * A(j, k+1) - tau_j * A(i, k+1)
      A.block(k + 2, k + 2, r, r).noalias() += tau * col.transpose();
      A.block(k + 2, k + 2, r, r).noalias() -= col * tau.transpose();
    }
  }
  return result;
}

namespace {
int half_parity_sign(int m) { return ((int64_t(m) * (m - 1) / 2) % 2 == 0) ? 1 : -1; }
}  // namespace

cplx bcs_overlap(const PairingState& left, const PairingState& right) {
  const int M = left.size();
  if (right.size() != M) throw ValidationError("bcs_overlap: mode count mismatch");
  if (!left.modes.empty() && !right.modes.empty() && !(left.modes == right.modes))
    throw ValidationError("bcs_overlap: mode sets differ");
  if (M == 0) return 1.0;
  Mat W(2 * M, 2 * M);
  W.topLeftCorner(M, M) = -left.T.conjugate();
  W.topRightCorner(M, M) = Mat::Identity(M, M);
  W.bottomLeftCorner(M, M) = -Mat::Identity(M, M);
  W.bottomRightCorner(M, M) = right.T;
  return double(half_parity_sign(M)) * pfaffian(std::move(W));
}

double bcs_fidelity(const PairingState& l, const PairingState& r) {
  const double nl = bcs_overlap(l, l).real();
  const double nr = bcs_overlap(r, r).real();
  if (nl <= 0.0 || nr <= 0.0) throw ValidationError("bcs_fidelity: non-positive norm");
  return std::norm(bcs_overlap(l, r)) / (nl * nr);
}

Mat bdg_matrix(const QuadraticHamiltonian& h) {
  h.validate();
  const int M = h.size();
  Mat H(2 * M, 2 * M);
  H.topLeftCorner(M, M) = h.hopping;
  H.topRightCorner(M, M) = 2.0 * h.pairing;
  H.bottomLeftCorner(M, M) = -2.0 * h.pairing.conjugate();
  H.bottomRightCorner(M, M) = -h.hopping.transpose();
  return H;
}

RVec bdg_spectrum(const QuadraticHamiltonian& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(bdg_matrix(h));
  return es.eigenvalues();
}

double bdg_ground_energy(const QuadraticHamiltonian& h) {
  RVec ev = bdg_spectrum(h);
  const int M = h.size();
  double pos = 0.0;
  for (int k = M; k < 2 * M; ++k) pos += ev[k];
  return 0.5 * (h.hopping.trace().real() - pos) + h.scalar_shift;
}

PairingState ground_state_pairing(const QuadraticHamiltonian& h, const GroundStateOptions& opt) {
  const int M = h.size();
  Eigen::SelfAdjointEigenSolver<Mat> es(bdg_matrix(h));
  const RVec& ev = es.eigenvalues();
  // Eigenvalues come in +/- pairs; the smallest magnitude is the gap.
  double gap = std::abs(ev[0]);
  for (int k = 1; k < 2 * M; ++k) gap = std::min(gap, std::abs(ev[k]));
  if (gap <= opt.gap_tol)
    throw GapError("ground_state_pairing: Hamiltonian is gapless (gap " + std::to_string(gap) + ")");

  // Quasiparticle creation operators gamma'_k = sum_p (U_pk a'_p + V_pk a_p)
  // from the positive-energy eigenvectors.
  Mat U(M, M), V(M, M);
  int col = 0;
  for (int k = 0; k < 2 * M; ++k) {
    if (ev[k] <= 0.0) continue;
    U.col(col) = es.eigenvectors().col(k).head(M);
    V.col(col) = es.eigenvectors().col(k).tail(M);
    ++col;
  }
  if (col != M) throw GapError("ground_state_pairing: particle-hole pairing failed");

  Eigen::JacobiSVD<Mat> svd(U);
  if (svd.singularValues()(M - 1) < opt.u_singular_tol * std::max(svd.singularValues()(0), 1.0))
    throw RepresentationError(
        "ground_state_pairing: singular Bogoliubov U block, no BCS form relative to |0>");

  // gamma_k |psi_T> = 0  =>  conj(U)^T T = -conj(V)^T.
  Mat T = -(U.conjugate().transpose()).partialPivLu().solve(V.conjugate().transpose());
  if (antisymmetry_defect(T) > 1e-8 * std::max(1.0, T.cwiseAbs().maxCoeff()))
    throw RepresentationError("ground_state_pairing: pairing matrix not antisymmetric");
  PairingState out(antisymmetrize(T), h.modes);
  return out;
}

PairingState transform_modes(const PairingState& state, const Mat& U, double unitary_tol) {
  const int M = state.size();
  if (U.rows() != M || U.cols() != M) throw ValidationError("transform_modes: size mismatch");
  if ((U * U.adjoint() - Mat::Identity(M, M)).cwiseAbs().maxCoeff() > unitary_tol)
    throw ValidationError("transform_modes: U not unitary");
  PairingState out = state;
  out.T = U * state.T * U.transpose();
  return out;
}

ProjectionResult project_bonds(const PairingState& joint, const PairingState& bond,
                               const std::vector<int>& virt_positions,
                               const ProjectionOptions& opt) {
  const int M = joint.size();
  const int V = static_cast<int>(virt_positions.size());
  if (bond.size() != V) throw ValidationError("project_bonds: bond size mismatch");
  for (int i = 0; i < V; ++i) {
    if (virt_positions[i] < 0 || virt_positions[i] >= M)
      throw ValidationError("project_bonds: virtual position out of range");
    if (i > 0 && virt_positions[i] <= virt_positions[i - 1])
      throw ValidationError("project_bonds: positions must be ascending");
  }
  if (!bond.modes.empty() && !joint.modes.empty()) {
    for (int i = 0; i < V; ++i)
      if (!(bond.modes[i] == joint.modes[virt_positions[i]]))
        throw ValidationError("project_bonds: bond modes do not match the virtual subset");
  }

  std::vector<int> kept;
  {
    std::vector<char> is_virt(M, 0);
    for (int p : virt_positions) is_virt[p] = 1;
    for (int p = 0; p < M; ++p)
      if (!is_virt[p]) kept.push_back(p);
  }
  const int K = static_cast<int>(kept.size());

  ProjectionResult res;
  res.state.T = Mat::Zero(K, K);
  if (!joint.modes.empty()) {
    res.state.modes.reserve(K);
    for (int p : kept) res.state.modes.push_back(joint.modes[p]);
  }

  if (V == 0) {
    res.state.T = joint.T;
    res.scalar = cplx(1.0);
    return res;
  }

  Mat P(K, K), Q(K, V), Vb(V, V);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) P(i, j) = joint.T(kept[i], kept[j]);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < V; ++j) Q(i, j) = joint.T(kept[i], virt_positions[j]);
  for (int i = 0; i < V; ++i)
    for (int j = 0; j < V; ++j) Vb(i, j) = joint.T(virt_positions[i], virt_positions[j]);

  const Mat Bbar = bond.T.conjugate();
  Mat A = Mat::Identity(V, V) - Bbar * Vb;
  Eigen::PartialPivLU<Mat> lu(A);
  Mat Y = lu.solve(Bbar * Q.transpose());
  // Solve residual as the singularity diagnostic.
  const double resid = (A * Y - Bbar * Q.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, Bbar.cwiseAbs().maxCoeff() * std::max(1.0, Q.cwiseAbs().maxCoeff()));
  if (!std::isfinite(resid) || resid > 1e-6 * scale) {
    Eigen::JacobiSVD<Mat> svd(A);
    int null_dim = 0;
    for (int i = 0; i < V; ++i)
      if (svd.singularValues()(i) < opt.singular_tol * svd.singularValues()(0)) ++null_dim;
    throw ContractionError("project_bonds: singular virtual block (projection annihilates the state), null dimension " +
                           std::to_string(null_dim));
  }

  res.state.T = antisymmetrize(P - Q * Y);

  if (opt.want_scalar) {
    // Scalar prefactor: the Grassmann-Gaussian normalization over the virtual
    // block; reduces to <bond|joint-virtual-part> when Q = 0.
    Mat W(2 * V, 2 * V);
    W.topLeftCorner(V, V) = -Bbar;
    W.topRightCorner(V, V) = Mat::Identity(V, V);
    W.bottomLeftCorner(V, V) = -Mat::Identity(V, V);
    W.bottomRightCorner(V, V) = Vb;
    res.scalar = double(half_parity_sign(V)) * pfaffian(std::move(W));
  }
  return res;
}

Mat project_bonds_sparse(const SpMat& P, const SpMat& Q, const SpMat& V, const SpMat& B,
                         double) {
  const int nv = static_cast<int>(V.rows());
  SpMat Bbar = B.conjugate();
  SpMat id(nv, nv);
  id.setIdentity();
  SpMat A = id - SpMat(Bbar * V);
  A.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    throw ContractionError("project_bonds_sparse: singular virtual block");
  Mat rhs = Mat(Bbar * SpMat(Q.transpose()));
  Mat Y = lu.solve(rhs);
  Mat Tout = Mat(P) - Mat(Q) * Y;
  return antisymmetrize(Tout);
}

TwoPointFunctions bcs_two_point(const PairingState& state) {
  const int M = state.size();
  const Mat& T = state.T;
  const Mat X = T.conjugate() * T.transpose();          // T-bar T^T, PSD
  const Mat Ipm = Mat::Identity(M, M);
  TwoPointFunctions tp;
  tp.number = (Ipm + X).partialPivLu().solve(X);        // <a'_p a_q>
  tp.anomalous = -(Ipm + T * T.adjoint()).partialPivLu().solve(T);  // <a_p a_q>
  return tp;
}

namespace {
// <c_j c_k> for the interleaved Majorana set c_{2p} = a_p + a'_p,
// c_{2p+1} = -i (a_p - a'_p).
Mat majorana_second_moments(const TwoPointFunctions& tp) {
  const int M = static_cast<int>(tp.number.rows());
  const Mat& G = tp.number;
  const Mat& F = tp.anomalous;
  const Mat Fp = -F.conjugate();                         // <a'_p a'_q>
  const Mat W = Mat::Identity(M, M) - G.transpose();     // <a_p a'_q>
  Mat C(2 * M, 2 * M);
  for (int p = 0; p < M; ++p)
    for (int q = 0; q < M; ++q) {
      const cplx f = F(p, q), w = W(p, q), g = G(p, q), fp = Fp(p, q);
      C(2 * p, 2 * q) = f + w + g + fp;
      C(2 * p, 2 * q + 1) = -I_UNIT * (f - w + g - fp);
      C(2 * p + 1, 2 * q) = -I_UNIT * (f + w - g - fp);
      C(2 * p + 1, 2 * q + 1) = -(f - w - g + fp);
    }
  return C;
}
}  // namespace

CovarianceMatrix pairing_to_covariance(const PairingState& state) {
  const Mat C = majorana_second_moments(bcs_two_point(state));
  Mat G = 0.5 * I_UNIT * (C - C.transpose());
  if (G.imag().cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("pairing_to_covariance: covariance not real");
  CovarianceMatrix cov;
  cov.modes = state.modes;
  cov.gamma = G.real();
  return cov;
}

double CovarianceMatrix::purity_defect() const {
  const int n = static_cast<int>(gamma.rows());
  return (gamma.transpose() * gamma - RMat::Identity(n, n)).cwiseAbs().maxCoeff();
}

PairingState covariance_to_pairing(const CovarianceMatrix& cov, double singular_tol) {
  const int n = static_cast<int>(cov.gamma.rows());
  if (n % 2 != 0) throw ValidationError("covariance_to_pairing: odd dimension");
  const int M = n / 2;
  const Mat C = Mat::Identity(n, n) - I_UNIT * cov.gamma.cast<cplx>();
  Mat F(M, M), W(M, M);
  for (int p = 0; p < M; ++p)
    for (int q = 0; q < M; ++q) {
      const cplx cee = C(2 * p, 2 * q), ceo = C(2 * p, 2 * q + 1);
      const cplx coe = C(2 * p + 1, 2 * q), coo = C(2 * p + 1, 2 * q + 1);
      F(p, q) = 0.25 * (cee + I_UNIT * ceo + I_UNIT * coe - coo);
      W(p, q) = 0.25 * (cee - I_UNIT * ceo + I_UNIT * coe + coo);
    }
  Eigen::JacobiSVD<Mat> svd(W, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues()(M - 1) < singular_tol * std::max(1.0, svd.singularValues()(0)))
    throw RepresentationError("covariance_to_pairing: singular recovery (occupied-mode degeneracy)");
  Mat T = -W.partialPivLu().solve(F);
  PairingState out(antisymmetrize(T), cov.modes);
  return out;
}

EnergyMoments bcs_energy_moments(const QuadraticHamiltonian& h, const PairingState& state) {
  h.validate();
  const int M = h.size();
  if (state.size() != M) throw ValidationError("bcs_energy_moments: size mismatch");

  // Expand H = const + 1/2 sum_{jk} kappa_jk c_j c_k over interleaved
  // Majoranas and evaluate the first two moments by Wick's theorem.
  Mat kappa_raw = Mat::Zero(2 * M, 2 * M);
  cplx constant = h.scalar_shift;
  // a_p = (c_{2p} + i c_{2p+1})/2, a'_p = (c_{2p} - i c_{2p+1})/2
  auto accumulate = [&](int p, bool p_dag, int q, bool q_dag, cplx w) {
    const cplx cp[2] = {0.5, (p_dag ? -I_UNIT : I_UNIT) * 0.5};
    const cplx cq[2] = {0.5, (q_dag ? -I_UNIT : I_UNIT) * 0.5};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const int j = 2 * p + a, k = 2 * q + b;
        const cplx c = w * cp[a] * cq[b];
        if (j == k)
          constant += c;  // c_j^2 = 1
        else
          kappa_raw(j, k) += c;
      }
  };
  for (int p = 0; p < M; ++p)
    for (int q = 0; q < M; ++q) {
      if (h.hopping(p, q) != cplx(0)) accumulate(p, true, q, false, h.hopping(p, q));
      if (h.pairing(p, q) != cplx(0)) {
        accumulate(p, true, q, true, h.pairing(p, q));
        accumulate(q, false, p, false, std::conj(h.pairing(p, q)));
      }
    }
  const Mat kappa = kappa_raw - kappa_raw.transpose();

  const Mat C = majorana_second_moments(bcs_two_point(state));
  const cplx mean = constant + 0.5 * (kappa.array() * C.array()).sum();
  const Mat kck = kappa * C * kappa;
  const cplx var = 0.5 * (kck.array() * C.array()).sum();

  EnergyMoments em;
  em.energy = mean.real();
  em.variance = var.real();
  return em;
}

}  // namespace gfpeps
