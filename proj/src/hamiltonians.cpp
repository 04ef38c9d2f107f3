#include "gfpeps/hamiltonians.hpp"
#include <algorithm>

#include <cmath>

namespace gfpeps {

Mat pauli(int axis) {
  Mat s(2, 2);
  switch (axis) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -I_UNIT, I_UNIT, 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: throw ValidationError("pauli: axis must be 1, 2 or 3");
  }
  return s;
}

Mat epsilon_matrix() { return I_UNIT * pauli(2); }

Mat dirac_alpha(int axis) {
  Mat a = Mat::Zero(4, 4);
  a.block(0, 2, 2, 2) = pauli(axis);
  a.block(2, 0, 2, 2) = pauli(axis);
  return a;
}

Mat dirac_beta() {
  Mat b = Mat::Zero(4, 4);
  b.block(0, 0, 2, 2) = Mat::Identity(2, 2);
  b.block(2, 2, 2, 2) = -Mat::Identity(2, 2);
  return b;
}

Mat spin_pairing_J(int axis) { return epsilon_matrix() * pauli(axis); }

Mat naive_pairing_block(int axis) { return pauli(axis) * epsilon_matrix(); }

void KSpec::validate() const {
  if (mass <= 0.0) throw ValidationError("KSpec: mass must be positive");
  if (static_cast<int>(K.size()) != geom.sites())
    throw ValidationError("KSpec: K table must cover every site");
  for (const auto& site : K)
    for (int i = 0; i < geom.dim; ++i)
      if (site[i].rows() != n_spin || site[i].cols() != n_spin)
        throw ValidationError("KSpec: K block has wrong spin dimension");
}

const Mat& KSpec::k(const SiteIndex& s, int axis) const {
  return K[site_id(geom, s)][axis - 1];
}

KSpec staggered_d2_kspec(const LatticeGeometry& geom, double mass) {
  if (geom.dim != 2) throw GeometryError("staggered_d2_kspec: dim must be 2");
  KSpec spec;
  spec.geom = geom;
  spec.n_spin = 1;
  spec.mass = mass;
  Mat one = Mat::Constant(1, 1, 1.0);
  Mat im = Mat::Constant(1, 1, I_UNIT);
  spec.K.assign(geom.sites(), {one, im, Mat()});
  spec.validate();
  return spec;
}

KSpec staggered_d3_kspec(const LatticeGeometry& geom, double mass) {
  if (geom.dim != 3) throw GeometryError("staggered_d3_kspec: dim must be 3");
  KSpec spec;
  spec.geom = geom;
  spec.n_spin = 1;
  spec.mass = mass;
  spec.K.resize(geom.sites());
  for (int id = 0; id < geom.sites(); ++id) {
    SiteIndex s = site_from_id(geom, id);
    const double s3 = (s.x[2] % 2 == 0) ? 1.0 : -1.0;
    const double s12 = ((s.x[0] + s.x[1]) % 2 == 0) ? 1.0 : -1.0;
    spec.K[id][0] = Mat::Constant(1, 1, 1.0);
    spec.K[id][1] = Mat::Constant(1, 1, I_UNIT * s3);
    spec.K[id][2] = Mat::Constant(1, 1, s12);
  }
  spec.validate();
  return spec;
}

KSpec naive_kspec(const LatticeGeometry& geom, double mass, NaiveBranch branch) {
  if (geom.dim != 3) throw GeometryError("naive_kspec: dim must be 3");
  KSpec spec;
  spec.geom = geom;
  spec.n_spin = 2;
  spec.mass = mass;
  std::array<Mat, 3> blocks;
  for (int i = 1; i <= 3; ++i) {
    Mat J = naive_pairing_block(i);
    blocks[i - 1] = (branch == NaiveBranch::Upper) ? J : Mat(J.conjugate());
  }
  spec.K.assign(geom.sites(), blocks);
  spec.validate();
  return spec;
}

QuadraticHamiltonian build_quadratic(const KSpec& spec) {
  spec.validate();
  ModeTable tab = enumerate_modes(spec.geom, spec.n_spin, 0, 0);
  const int M = tab.size();
  QuadraticHamiltonian h;
  h.modes = tab.modes;
  h.hopping = spec.mass * Mat::Identity(M, M);
  h.pairing = Mat::Zero(M, M);
  const cplx pref = -I_UNIT / (2.0 * spec.geom.spacing);
  for (int id = 0; id < spec.geom.sites(); ++id) {
    SiteIndex s = site_from_id(spec.geom, id);
    for (int i = 1; i <= spec.geom.dim; ++i) {
      SiteIndex t = neighbor(spec.geom, s, i);
      const Mat& K = spec.k(s, i);
      for (int a = 0; a < spec.n_spin; ++a)
        for (int b = 0; b < spec.n_spin; ++b) {
          const int p = tab.physical_index(s, a);
          const int q = tab.physical_index(t, b);
          h.add_pair(p, q, pref * K(a, b));
        }
    }
  }
  h.validate();
  return h;
}

QuadraticHamiltonian build_naive_dirac(const LatticeGeometry& geom, double mass) {
  if (geom.dim != 3) throw GeometryError("build_naive_dirac: dim must be 3");
  ModeTable tab = enumerate_modes(geom, 4, 0, 0);
  const int M = tab.size();
  QuadraticHamiltonian h;
  h.modes = tab.modes;
  h.hopping = Mat::Zero(M, M);
  h.pairing = Mat::Zero(M, M);
  const Mat beta = dirac_beta();
  const cplx pref = -I_UNIT / (2.0 * geom.spacing);
  for (int id = 0; id < geom.sites(); ++id) {
    SiteIndex s = site_from_id(geom, id);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        if (beta(a, b) != cplx(0))
          h.hopping(tab.physical_index(s, a), tab.physical_index(s, b)) += mass * beta(a, b);
      }
    for (int i = 1; i <= 3; ++i) {
      const Mat alpha = dirac_alpha(i);
      SiteIndex fw = neighbor(geom, s, i);
      SiteIndex bwv = s;
      bwv.x[i - 1] -= 1;
      SiteIndex bw = reduce(geom, bwv);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          if (alpha(a, b) == cplx(0)) continue;
          const int p = tab.physical_index(s, a);
          h.hopping(p, tab.physical_index(fw, b)) += pref * alpha(a, b);
          h.hopping(p, tab.physical_index(bw, b)) -= pref * alpha(a, b);
        }
    }
  }
  h.validate();
  return h;
}

QuadraticHamiltonian bogoliubov_substitute(const QuadraticHamiltonian& h, const Mat& U,
                                           const Mat& V) {
  h.validate();
  const int M = h.size();
  // Represent H = sum C1 a'a + sum C2 a'a' + sum C3 aa + c0.
  const Mat& C1 = h.hopping;
  const Mat& C2 = h.pairing;
  const Mat C3 = -h.pairing.conjugate();
  cplx c0 = h.scalar_shift;

  Mat out1 = Mat::Zero(M, M);   // b'b
  Mat out2 = Mat::Zero(M, M);   // b'b'
  Mat out3 = Mat::Zero(M, M);   // bb

  // op = (dag-coeff, ann-coeff) pairs: a'_p -> (U, V), a_p -> (conj(V), conj(U))
  // where column p holds the b-coefficients of the transformed operator.
  const Mat Ud = U, Ua = V;
  const Mat Ad = V.conjugate(), Aa = U.conjugate();

  auto fold = [&](const Mat& C, const Mat& p1d, const Mat& p1a, const Mat& p2d, const Mat& p2a) {
    out2 += p1d * C * p2d.transpose();
    out1 += p1d * C * p2a.transpose();
    const Mat mixed = p1a * C * p2d.transpose();  // b b' ordering
    c0 += mixed.trace();
    out1 -= mixed.transpose();
    out3 += p1a * C * p2a.transpose();
  };
  fold(C1, Ud, Ua, Ad, Aa);  // a' a
  fold(C2, Ud, Ua, Ud, Ua);  // a' a'
  fold(C3, Ad, Aa, Ad, Aa);  // a a

  QuadraticHamiltonian out;
  out.modes = h.modes;
  out.hopping = out1;
  out.pairing = antisymmetrize(out2);
  const Mat ann = antisymmetrize(out3);
  const double scale = std::max(1.0, out.pairing.cwiseAbs().maxCoeff());
  if ((ann + out.pairing.conjugate()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw ValidationError("bogoliubov_substitute: result not hermitian");
  if (std::abs(c0.imag()) > 1e-9 * std::max(1.0, std::abs(c0.real())))
    throw ValidationError("bogoliubov_substitute: complex constant");
  out.scalar_shift = c0.real();
  out.validate(1e-9);
  out.hopping = 0.5 * (out.hopping + out.hopping.adjoint());
  return out;
}

QuadraticHamiltonian particle_hole_transform(const QuadraticHamiltonian& h,
                                             const std::function<bool(const SiteIndex&)>& site_predicate,
                                             const Mat& spin_matrix) {
  const int ns = static_cast<int>(spin_matrix.rows());
  if ((spin_matrix * spin_matrix.adjoint() - Mat::Identity(ns, ns)).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("particle_hole_transform: spin matrix not unitary");
  if (h.modes.empty()) throw ValidationError("particle_hole_transform: needs mode metadata");
  const int M = h.size();
  Mat U = Mat::Zero(M, M), V = Mat::Zero(M, M);
  for (int p = 0; p < M; ++p) {
    const ModeIndex& mp = h.modes[p];
    if (!site_predicate(mp.site)) {
      U(p, p) = 1.0;
      continue;
    }
    // a'_(x,a) -> sum_b spin_matrix_ab a_(x,b)
    for (int q = 0; q < M; ++q) {
      const ModeIndex& mq = h.modes[q];
      if (!(mq.site == mp.site) || mq.species != mp.species || mq.leg != mp.leg ||
          mq.copy != mp.copy)
        continue;
      V(q, p) = spin_matrix(mp.spin, mq.spin);
    }
  }
  return bogoliubov_substitute(h, U, V);
}

double cross_block_norm(const QuadraticHamiltonian& h, const std::vector<int>& a,
                        const std::vector<int>& b) {
  double m = 0.0;
  for (int p : a)
    for (int q : b) {
      m = std::max(m, std::abs(h.hopping(p, q)));
      m = std::max(m, std::abs(h.hopping(q, p)));
      m = std::max(m, std::abs(h.pairing(p, q)));
      m = std::max(m, std::abs(h.pairing(q, p)));
    }
  return m;
}

QuadraticHamiltonian restrict_modes(const QuadraticHamiltonian& h,
                                    const std::vector<int>& positions, double cross_tol) {
  const int M = h.size();
  std::vector<int> rest;
  {
    std::vector<char> in(M, 0);
    for (int p : positions) in[p] = 1;
    for (int p = 0; p < M; ++p)
      if (!in[p]) rest.push_back(p);
  }
  if (cross_block_norm(h, positions, rest) > cross_tol)
    throw ValidationError("restrict_modes: blocks are coupled");
  const int K = static_cast<int>(positions.size());
  QuadraticHamiltonian out;
  out.hopping = Mat::Zero(K, K);
  out.pairing = Mat::Zero(K, K);
  out.scalar_shift = h.scalar_shift;
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) {
      out.hopping(i, j) = h.hopping(positions[i], positions[j]);
      out.pairing(i, j) = h.pairing(positions[i], positions[j]);
    }
  if (!h.modes.empty()) {
    // Relabel spin components to a contiguous 0-based range so the
    // restriction is a self-consistent smaller-spin Hamiltonian.
    std::vector<int> spins;
    for (int p : positions) spins.push_back(h.modes[p].spin);
    std::sort(spins.begin(), spins.end());
    spins.erase(std::unique(spins.begin(), spins.end()), spins.end());
    for (int p : positions) {
      ModeIndex m = h.modes[p];
      m.spin = static_cast<int>(std::lower_bound(spins.begin(), spins.end(), m.spin) -
                                spins.begin());
      out.modes.push_back(m);
    }
  }
  return out;
}

QuadraticHamiltonian gauge_phase(const QuadraticHamiltonian& h, cplx phase) {
  QuadraticHamiltonian out = h;
  out.pairing *= phase * phase;
  return out;
}

PairingState exact_ground(const KSpec& spec, const GroundStateOptions& opt) {
  return ground_state_pairing(build_quadratic(spec), opt);
}

}  // namespace gfpeps
