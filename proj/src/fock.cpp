#include "gfpeps/fock.hpp"

#include <bit>
#include <cmath>

#include "gfpeps/gaussian.hpp"

namespace gfpeps {

FockState::FockState(int m) : modes(m) {
  require_fock_size(m);
  amp = Vec::Zero(int64_t(1) << m);
}

FockState FockState::vacuum(int m) {
  FockState v(m);
  v.amp[0] = 1.0;
  return v;
}

void require_fock_size(int modes) {
  if (modes < 0 || modes > kFockModeCap)
    throw SizeError("Fock oracle limited to " + std::to_string(kFockModeCap) + " modes");
}

namespace {
inline int jw_sign(uint64_t b, int p) {
  // (-1)^(number of occupied modes below p)
  uint64_t mask = (uint64_t(1) << p) - 1;
  return (std::popcount(b & mask) & 1) ? -1 : 1;
}
}  // namespace

FockState fock_apply_create(const FockState& v, int p) {
  FockState out(v.modes);
  const int64_t dim = v.amp.size();
  const uint64_t bit = uint64_t(1) << p;
  for (int64_t b = 0; b < dim; ++b) {
    if (v.amp[b] == cplx(0)) continue;
    if (b & static_cast<int64_t>(bit)) continue;
    out.amp[b | static_cast<int64_t>(bit)] += double(jw_sign(b, p)) * v.amp[b];
  }
  return out;
}

FockState fock_apply_annihilate(const FockState& v, int p) {
  FockState out(v.modes);
  const int64_t dim = v.amp.size();
  const uint64_t bit = uint64_t(1) << p;
  for (int64_t b = 0; b < dim; ++b) {
    if (v.amp[b] == cplx(0)) continue;
    if (!(b & static_cast<int64_t>(bit))) continue;
    const int64_t b2 = b & ~static_cast<int64_t>(bit);
    out.amp[b2] += double(jw_sign(static_cast<uint64_t>(b2), p)) * v.amp[b];
  }
  return out;
}

cplx fock_inner(const FockState& l, const FockState& r) {
  if (l.modes != r.modes) throw ValidationError("fock_inner: mode count mismatch");
  return l.amp.dot(r.amp);
}

double fock_norm(const FockState& v) { return v.amp.norm(); }

double fock_fidelity(const FockState& l, const FockState& r) {
  const double nl = l.amp.squaredNorm();
  const double nr = r.amp.squaredNorm();
  if (nl == 0.0 || nr == 0.0) throw ValidationError("fidelity of a zero state");
  return std::norm(fock_inner(l, r)) / (nl * nr);
}

FockState fock_apply_quadratic(const QuadraticOpSpec& op, const FockState& v) {
  FockState out(v.modes);
  const int M = v.modes;
  const int64_t dim = v.amp.size();

  const bool has_dd = op.dagdag.size() > 0;
  const bool has_h = op.hop.size() > 0;
  const bool has_aa = op.annann.size() > 0;

  for (int64_t b = 0; b < dim; ++b) {
    const cplx a = v.amp[b];
    if (a == cplx(0)) continue;
    const uint64_t ub = static_cast<uint64_t>(b);
    if (has_dd) {
      // a'_p a'_q : need q then p created, p != q, both empty
      for (int q = 0; q < M; ++q) {
        if (ub & (uint64_t(1) << q)) continue;
        const uint64_t b1 = ub | (uint64_t(1) << q);
        const int s1 = jw_sign(ub, q);
        for (int p = 0; p < M; ++p) {
          if (b1 & (uint64_t(1) << p)) continue;
          const cplx c = op.dagdag(p, q);
          if (c == cplx(0)) continue;
          const uint64_t b2 = b1 | (uint64_t(1) << p);
          out.amp[static_cast<int64_t>(b2)] += c * double(s1 * jw_sign(b1, p)) * a;
        }
      }
    }
    if (has_h) {
      // a'_p a_q
      for (int q = 0; q < M; ++q) {
        if (!(ub & (uint64_t(1) << q))) continue;
        const uint64_t b1 = ub & ~(uint64_t(1) << q);
        const int s1 = jw_sign(b1, q);
        for (int p = 0; p < M; ++p) {
          if (b1 & (uint64_t(1) << p)) continue;
          const cplx c = op.hop(p, q);
          if (c == cplx(0)) continue;
          const uint64_t b2 = b1 | (uint64_t(1) << p);
          out.amp[static_cast<int64_t>(b2)] += c * double(s1 * jw_sign(b1, p)) * a;
        }
      }
    }
    if (has_aa) {
      // a_p a_q : annihilate q first, then p
      for (int q = 0; q < M; ++q) {
        if (!(ub & (uint64_t(1) << q))) continue;
        const uint64_t b1 = ub & ~(uint64_t(1) << q);
        const int s1 = jw_sign(b1, q);
        for (int p = 0; p < M; ++p) {
          if (!(b1 & (uint64_t(1) << p))) continue;
          const cplx c = op.annann(p, q);
          if (c == cplx(0)) continue;
          const uint64_t b2 = b1 & ~(uint64_t(1) << p);
          out.amp[static_cast<int64_t>(b2)] += c * double(s1 * jw_sign(b2, p)) * a;
        }
      }
    }
  }
  return out;
}

FockState fock_apply_exp_quadratic(const QuadraticOpSpec& op, const FockState& v,
                                   int max_terms, double cutoff) {
  FockState acc = v;
  FockState term = v;
  for (int k = 1; k <= max_terms; ++k) {
    term = fock_apply_quadratic(op, term);
    term.amp /= double(k);
    const double tn = term.amp.norm();
    if (tn == 0.0) return acc;
    acc.amp += term.amp;
    if (tn < cutoff * (acc.amp.norm() + 1.0)) return acc;
  }
  throw ValidationError("fock_apply_exp_quadratic: Taylor series did not converge");
}

FockState fock_build_bcs(const Mat& T) {
  const int M = static_cast<int>(T.rows());
  require_fock_size(M);
  if (antisymmetry_defect(T) > 1e-10)
    throw ValidationError("fock_build_bcs: T not antisymmetric");
  QuadraticOpSpec op;
  op.dagdag = 0.5 * T;
  return fock_apply_exp_quadratic(op, FockState::vacuum(M));
}

FockState fock_scale_by_number(const FockState& v, cplx w) {
  FockState out = v;
  const int64_t dim = v.amp.size();
  std::vector<cplx> pw(v.modes + 1);
  pw[0] = 1.0;
  for (int k = 1; k <= v.modes; ++k) pw[k] = pw[k - 1] * w;
  for (int64_t b = 0; b < dim; ++b)
    out.amp[b] *= pw[std::popcount(static_cast<uint64_t>(b))];
  return out;
}

Mat fock_hamiltonian_matrix(const FockQuadraticHamiltonian& h, int modes) {
  require_fock_size(modes);
  const int64_t dim = int64_t(1) << modes;
  QuadraticOpSpec op;
  op.hop = h.hopping;
  op.dagdag = h.pairing;
  op.annann = -h.pairing.conjugate();  // h.c. of the pairing term
  Mat H = Mat::Zero(dim, dim);
  for (int64_t b = 0; b < dim; ++b) {
    FockState e(modes);
    e.amp[b] = 1.0;
    H.col(b) = fock_apply_quadratic(op, e).amp;
  }
  return H;
}

FockState fock_imaginary_time_gs(const FockQuadraticHamiltonian& h, double beta, int n_steps,
                                 MassWeight weight) {
  const int M = static_cast<int>(h.hopping.rows());
  require_fock_size(M);
  if (beta <= 0.0 || n_steps < 1)
    throw ValidationError("fock_imaginary_time_gs: need beta > 0, N >= 1");
  const double eps = beta / n_steps;

  const double m0 = h.hopping(0, 0).real();
  const bool uniform_diag = (h.hopping - m0 * Mat::Identity(M, M)).cwiseAbs().maxCoeff() < 1e-12;
  if (weight == MassWeight::Linear && !uniform_diag)
    throw ValidationError("linear mass weight requires H1 = m * identity");

  QuadraticOpSpec create_op, ann_op, hop_op;
  create_op.dagdag = -eps * h.pairing;
  ann_op.annann = eps * h.pairing.conjugate();  // exp(-eps * h.c. part)
  if (!uniform_diag) hop_op.hop = -eps * h.hopping;

  cplx w;
  if (weight == MassWeight::Linear)
    w = 1.0 - m0 * eps;
  else
    w = std::exp(-m0 * eps);

  FockState state = FockState::vacuum(M);
  for (int step = 0; step < n_steps; ++step) {
    state = fock_apply_exp_quadratic(ann_op, state);
    if (uniform_diag)
      state = fock_scale_by_number(state, w);
    else
      state = fock_apply_exp_quadratic(hop_op, state);
    state = fock_apply_exp_quadratic(create_op, state);
  }
  return state;
}

FockState fock_project(const FockState& joint, const FockState& bond,
                       const std::vector<int>& virt_positions) {
  const int M = joint.modes;
  const int V = static_cast<int>(virt_positions.size());
  if (bond.modes != V) throw ValidationError("fock_project: bond size mismatch");
  for (int i = 1; i < V; ++i)
    if (virt_positions[i] <= virt_positions[i - 1])
      throw ValidationError("fock_project: positions must be ascending");

  std::vector<int> kept;
  {
    std::vector<char> is_virt(M, 0);
    for (int p : virt_positions) is_virt[p] = 1;
    for (int p = 0; p < M; ++p)
      if (!is_virt[p]) kept.push_back(p);
  }
  const int K = static_cast<int>(kept.size());

  FockState out(K);
  for (int64_t bk = 0; bk < (int64_t(1) << K); ++bk) {
    cplx acc = 0.0;
    for (int64_t bv = 0; bv < (int64_t(1) << V); ++bv) {
      const cplx w = bond.amp[bv];
      if (w == cplx(0)) continue;
      // Merge occupations and accumulate the parity of interleaving the
      // ascending virtual list into the ascending kept list.
      uint64_t merged = 0;
      for (int i = 0; i < K; ++i)
        if (bk & (int64_t(1) << i)) merged |= uint64_t(1) << kept[i];
      int sign = 1;
      for (int j = 0; j < V; ++j) {
        if (!(bv & (int64_t(1) << j))) continue;
        const int g = virt_positions[j];
        // count kept-occupied modes with global index > g
        int inv = 0;
        for (int i = 0; i < K; ++i)
          if ((bk & (int64_t(1) << i)) && kept[i] > g) ++inv;
        if (inv & 1) sign = -sign;
        merged |= uint64_t(1) << g;
      }
      acc += std::conj(w) * double(sign) * joint.amp[static_cast<int64_t>(merged)];
    }
    out.amp[bk] = acc;
  }
  return out;
}

cplx bcs_minor_amplitude(const Mat& T, const std::vector<int>& occupied) {
  const int k = static_cast<int>(occupied.size());
  if (k % 2 != 0) return 0.0;
  if (k == 0) return 1.0;
  Mat sub(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sub(i, j) = T(occupied[i], occupied[j]);
  return pfaffian(sub);
}

}  // namespace gfpeps
