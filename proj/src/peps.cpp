#include "gfpeps/peps.hpp"

#include <cmath>

namespace gfpeps {

void PepsParams::validate() const {
  const int legs = 2 * geom.dim;
  const int sites = geom.sites();
  const int t_sites = translation_invariant ? 1 : sites;
  if (static_cast<int>(t.size()) != t_sites || static_cast<int>(tau.size()) != t_sites)
    throw ValidationError("PepsParams: t/tau site table size mismatch");
  for (const auto& site : t) {
    if (static_cast<int>(site.size()) != n_c)
      throw ValidationError("PepsParams: t copy count mismatch");
    for (const Mat& m : site)
      if (m.rows() != n_spin || m.cols() != legs * n_spin)
        throw ValidationError("PepsParams: t block shape mismatch");
  }
  for (const auto& site : tau) {
    if (static_cast<int>(site.size()) != n_c * n_d)
      throw ValidationError("PepsParams: tau copy count mismatch");
    for (const Mat& m : site)
      if (m.rows() != legs * n_spin || m.cols() != legs * n_spin)
        throw ValidationError("PepsParams: tau block shape mismatch");
  }
  if (static_cast<int>(w_c.size()) != sites || static_cast<int>(w_d.size()) != sites)
    throw ValidationError("PepsParams: W tables must cover every site");
  for (int s = 0; s < sites; ++s)
    for (int i = 0; i < geom.dim; ++i) {
      if (w_c[s][i].rows() != n_spin || w_c[s][i].cols() != n_spin ||
          w_d[s][i].rows() != n_spin || w_d[s][i].cols() != n_spin)
        throw ValidationError("PepsParams: W block shape mismatch");
    }
}

const Mat& PepsParams::t_at(int site, int mu) const {
  return t[translation_invariant ? 0 : site][mu];
}

const Mat& PepsParams::tau_at(int site, int mu, int nu) const {
  return tau[translation_invariant ? 0 : site][mu * n_d + nu];
}

std::pair<int, int> x_pair(int axis) {
  switch (axis) {
    case 1: return {1, 3};
    case 2: return {2, 4};
    case 3: return {5, 6};
  }
  throw ValidationError("x_pair: axis must be 1, 2 or 3");
}

namespace {

void require_linkable(const LatticeGeometry& geom) {
  for (int i = 0; i < geom.dim; ++i)
    if (geom.extent[i] < 2)
      throw GeometryError("bond operators are ill-defined at extent 1 (self links)");
}

struct PairSink {
  virtual void add(int p, int q, cplx w) = 0;
  virtual ~PairSink() = default;
};

void emit_joint_pairs(const PepsParams& params, const ModeTable& tab, PairSink& sink) {
  const int legs = 2 * params.geom.dim;
  const int ns = params.n_spin;
  for (int s = 0; s < params.geom.sites(); ++s) {
    SiteIndex x = site_from_id(params.geom, s);
    for (int mu = 0; mu < params.n_c; ++mu) {
      const Mat& tm = params.t_at(s, mu);
      for (int a = 0; a < ns; ++a)
        for (int m = 1; m <= legs; ++m)
          for (int b = 0; b < ns; ++b) {
            const cplx w = tm(a, (m - 1) * ns + b);
            if (w == cplx(0)) continue;
            sink.add(tab.physical_index(x, a), tab.virtual_index(x, Species::C, m, mu, b), w);
          }
    }
    for (int mu = 0; mu < params.n_c; ++mu)
      for (int nu = 0; nu < params.n_d; ++nu) {
        const Mat& tm = params.tau_at(s, mu, nu);
        for (int m = 1; m <= legs; ++m)
          for (int a = 0; a < ns; ++a)
            for (int n = 1; n <= legs; ++n)
              for (int b = 0; b < ns; ++b) {
                const cplx w = tm((m - 1) * ns + a, (n - 1) * ns + b);
                if (w == cplx(0)) continue;
                sink.add(tab.virtual_index(x, Species::C, m, mu, a),
                         tab.virtual_index(x, Species::D, n, nu, b), w);
              }
      }
  }
}

void emit_bond_pairs(const PepsParams& params, const ModeTable& tab, PairSink& sink) {
  require_linkable(params.geom);
  const int ns = params.n_spin;
  for (int s = 0; s < params.geom.sites(); ++s) {
    SiteIndex x = site_from_id(params.geom, s);
    for (int i = 1; i <= params.geom.dim; ++i) {
      SiteIndex y = neighbor(params.geom, x, i);
      auto [m, n] = x_pair(i);
      const Mat& wc = params.w_c[s][i - 1];
      const Mat& wd = params.w_d[s][i - 1];
      for (int a = 0; a < ns; ++a)
        for (int b = 0; b < ns; ++b) {
          if (wc(a, b) != cplx(0))
            for (int mu = 0; mu < params.n_c; ++mu)
              sink.add(tab.virtual_index(x, Species::C, m, mu, a),
                       tab.virtual_index(y, Species::C, n, mu, b), I_UNIT * wc(a, b));
          if (wd(a, b) != cplx(0))
            for (int mu = 0; mu < params.n_d; ++mu)
              sink.add(tab.virtual_index(x, Species::D, m, mu, a),
                       tab.virtual_index(y, Species::D, n, mu, b), I_UNIT * wd(a, b));
        }
    }
  }
}

struct DenseSink final : PairSink {
  Mat T;
  explicit DenseSink(int n) : T(Mat::Zero(n, n)) {}
  void add(int p, int q, cplx w) override {
    if (p == q) return;
    T(p, q) += w;
    T(q, p) -= w;
  }
};

struct RemappedTripletSink final : PairSink {
  // Collects entries of an antisymmetric matrix restricted to remapped
  // indices; entries with unmapped rows/columns are dropped by the caller's
  // choice of map (-1).
  const std::vector<int>& map;
  std::vector<Eigen::Triplet<cplx>> trip;
  explicit RemappedTripletSink(const std::vector<int>& m) : map(m) {}
  void add(int p, int q, cplx w) override {
    const int i = map[p], j = map[q];
    if (i < 0 || j < 0 || i == j) return;
    trip.emplace_back(i, j, w);
    trip.emplace_back(j, i, -w);
  }
};

}  // namespace

PairingState assemble_joint_pairing(const PepsParams& params) {
  params.validate();
  ModeTable tab = enumerate_modes(params.geom, params.n_spin, params.n_c, params.n_d);
  DenseSink sink(tab.size());
  emit_joint_pairs(params, tab, sink);
  return PairingState(std::move(sink.T), tab.modes);
}

PairingState assemble_bond_pairing(const PepsParams& params) {
  params.validate();
  ModeTable tab = enumerate_modes(params.geom, params.n_spin, params.n_c, params.n_d);
  std::vector<int> virt = tab.virtual_positions();
  std::vector<int> map(tab.size(), -1);
  for (size_t k = 0; k < virt.size(); ++k) map[virt[k]] = static_cast<int>(k);

  DenseSink sink(tab.size());
  emit_bond_pairs(params, tab, sink);
  const int V = static_cast<int>(virt.size());
  Mat B(V, V);
  for (int i = 0; i < V; ++i)
    for (int j = 0; j < V; ++j) B(i, j) = sink.T(virt[i], virt[j]);
  std::vector<ModeIndex> modes;
  modes.reserve(V);
  for (int p : virt) modes.push_back(tab.modes[p]);
  return PairingState(std::move(B), std::move(modes));
}

ContractResult contract(const PepsParams& params, const ContractOptions& opt) {
  params.validate();
  require_linkable(params.geom);
  ModeTable tab = enumerate_modes(params.geom, params.n_spin, params.n_c, params.n_d);
  const int total = tab.size();
  ContractResult out;

  if (opt.want_scalar || total <= opt.dense_threshold) {
    PairingState joint = assemble_joint_pairing(params);
    PairingState bond = assemble_bond_pairing(params);
    ProjectionOptions popt;
    popt.want_scalar = opt.want_scalar;
    ProjectionResult pr = project_bonds(joint, bond, tab.virtual_positions(), popt);
    out.state = std::move(pr.state);
    out.scalar = pr.scalar;
    return out;
  }

  // Sparse path for large virtual spaces: assemble the blocks directly.
  std::vector<int> phys = tab.physical_positions();
  std::vector<int> virt = tab.virtual_positions();
  const int np = static_cast<int>(phys.size());
  const int nv = static_cast<int>(virt.size());
  std::vector<int> pmap(total, -1), vmap(total, -1);
  for (size_t k = 0; k < phys.size(); ++k) pmap[phys[k]] = static_cast<int>(k);
  for (size_t k = 0; k < virt.size(); ++k) vmap[virt[k]] = static_cast<int>(k);

  // Q rows are physical, columns virtual; V and B live on the virtual block.
  std::vector<Eigen::Triplet<cplx>> qt, vt, bt;
  struct SplitSink final : PairSink {
    const std::vector<int>&pmap, &vmap;
    std::vector<Eigen::Triplet<cplx>>&qt, &vt;
    SplitSink(const std::vector<int>& pm, const std::vector<int>& vm,
              std::vector<Eigen::Triplet<cplx>>& q, std::vector<Eigen::Triplet<cplx>>& v)
        : pmap(pm), vmap(vm), qt(q), vt(v) {}
    void add(int p, int q, cplx w) override {
      if (pmap[p] >= 0 && vmap[q] >= 0) {
        qt.emplace_back(pmap[p], vmap[q], w);
      } else if (vmap[p] >= 0 && pmap[q] >= 0) {
        qt.emplace_back(pmap[q], vmap[p], -w);
      } else if (vmap[p] >= 0 && vmap[q] >= 0) {
        vt.emplace_back(vmap[p], vmap[q], w);
        vt.emplace_back(vmap[q], vmap[p], -w);
      }
      // physical-physical pairs do not occur in the PEPS assembly
    }
  } split(pmap, vmap, qt, vt);
  emit_joint_pairs(params, tab, split);

  RemappedTripletSink bsink(vmap);
  emit_bond_pairs(params, tab, bsink);

  SpMat Q(np, nv), V(nv, nv), B(nv, nv), P(np, np);
  Q.setFromTriplets(qt.begin(), qt.end());
  V.setFromTriplets(vt.begin(), vt.end());
  B.setFromTriplets(bsink.trip.begin(), bsink.trip.end());

  Mat T = project_bonds_sparse(P, Q, V, B);
  std::vector<ModeIndex> modes;
  modes.reserve(np);
  for (int p : phys) modes.push_back(tab.modes[p]);
  out.state = PairingState(std::move(T), std::move(modes));
  return out;
}

SymmetricCoefficients random_symmetric_coefficients(int n_c, int n_d, std::mt19937_64& rng,
                                                    double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  SymmetricCoefficients c;
  c.t.resize(n_c);
  for (auto& v : c.t) v = cplx(nd(rng), nd(rng));
  c.z.resize(static_cast<size_t>(n_c) * n_d);
  for (auto& arr : c.z)
    for (auto& v : arr) v = cplx(nd(rng), nd(rng));
  return c;
}

Mat circulant_tau(const std::array<cplx, 4>& z) {
  Mat m(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = z[(c - r + 4) % 4];
  return m;
}

Mat bosrot_tau(const std::array<cplx, 4>& z) {
  Mat m = Mat::Constant(6, 6, z[0]);
  auto opp = [](int leg) {
    switch (leg) {
      case 1: return 3;
      case 2: return 4;
      case 3: return 1;
      case 4: return 2;
      case 5: return 6;
      default: return 5;
    }
  };
  for (int leg = 1; leg <= 6; ++leg) {
    m(leg - 1, leg - 1) = z[2];
    m(leg - 1, opp(leg) - 1) = z[1];
  }
  return m;
}

namespace {
PepsParams symmetric_common(const LatticeGeometry& geom, int n_spin, int n_c, int n_d) {
  PepsParams p;
  p.geom = geom;
  p.n_spin = n_spin;
  p.n_c = n_c;
  p.n_d = n_d;
  p.translation_invariant = true;
  p.t.resize(1);
  p.tau.resize(1);
  return p;
}

Mat uniform_leg_t(int legs, int n_spin, cplx value) {
  // t^(mu)_{m,ab} = value * delta_ab for every leg
  Mat t = Mat::Zero(n_spin, legs * n_spin);
  for (int m = 0; m < legs; ++m)
    for (int a = 0; a < n_spin; ++a) t(a, m * n_spin + a) = value;
  return t;
}

Mat spin_diagonal_tau(const Mat& leg_pattern, int n_spin) {
  const int legs = static_cast<int>(leg_pattern.rows());
  Mat tau = Mat::Zero(legs * n_spin, legs * n_spin);
  for (int m = 0; m < legs; ++m)
    for (int n = 0; n < legs; ++n)
      for (int a = 0; a < n_spin; ++a) tau(m * n_spin + a, n * n_spin + a) = leg_pattern(m, n);
  return tau;
}
}  // namespace

PepsParams symmetric_params_d2(const LatticeGeometry& geom, int n_c, int n_d,
                               const SymmetricCoefficients& coeffs) {
  if (geom.dim != 2) throw GeometryError("symmetric_params_d2: dim must be 2");
  PepsParams p = symmetric_common(geom, 1, n_c, n_d);
  for (int mu = 0; mu < n_c; ++mu) p.t[0].push_back(uniform_leg_t(4, 1, coeffs.t[mu]));
  for (int mu = 0; mu < n_c; ++mu)
    for (int nu = 0; nu < n_d; ++nu) p.tau[0].push_back(circulant_tau(coeffs.z[mu * n_d + nu]));
  const cplx eta = std::exp(I_UNIT * (M_PI / 4.0));
  const cplx eta2 = eta * eta;
  std::array<Mat, 3> wc{Mat::Constant(1, 1, 1.0), Mat::Constant(1, 1, std::conj(eta2)), Mat()};
  std::array<Mat, 3> wd{Mat::Constant(1, 1, 1.0), Mat::Constant(1, 1, eta2), Mat()};
  p.w_c.assign(geom.sites(), wc);
  p.w_d.assign(geom.sites(), wd);
  p.validate();
  return p;
}

PepsParams symmetric_params_d3_staggered(const LatticeGeometry& geom, int n_c, int n_d,
                                         const SymmetricCoefficients& coeffs) {
  if (geom.dim != 3) throw GeometryError("symmetric_params_d3_staggered: dim must be 3");
  PepsParams p = symmetric_common(geom, 1, n_c, n_d);
  for (int mu = 0; mu < n_c; ++mu) p.t[0].push_back(uniform_leg_t(6, 1, coeffs.t[mu]));
  for (int mu = 0; mu < n_c; ++mu)
    for (int nu = 0; nu < n_d; ++nu) p.tau[0].push_back(bosrot_tau(coeffs.z[mu * n_d + nu]));
  // The staggered hopping amplitudes, W^D from the creation terms, W^C
  // conjugated.
  KSpec spec = staggered_d3_kspec(geom, 1.0);
  p.w_c.resize(geom.sites());
  p.w_d.resize(geom.sites());
  for (int s = 0; s < geom.sites(); ++s)
    for (int i = 1; i <= 3; ++i) {
      p.w_d[s][i - 1] = spec.K[s][i - 1];
      p.w_c[s][i - 1] = spec.K[s][i - 1].conjugate();
    }
  p.validate();
  return p;
}

PepsParams symmetric_params_d3_spinhalf(const LatticeGeometry& geom, int n_c, int n_d,
                                        const SymmetricCoefficients& coeffs) {
  if (geom.dim != 3) throw GeometryError("symmetric_params_d3_spinhalf: dim must be 3");
  PepsParams p = symmetric_common(geom, 2, n_c, n_d);
  for (int mu = 0; mu < n_c; ++mu) p.t[0].push_back(uniform_leg_t(6, 2, coeffs.t[mu]));
  for (int mu = 0; mu < n_c; ++mu)
    for (int nu = 0; nu < n_d; ++nu)
      p.tau[0].push_back(spin_diagonal_tau(bosrot_tau(coeffs.z[mu * n_d + nu]), 2));
  std::array<Mat, 3> wc, wd;
  for (int i = 1; i <= 3; ++i) {
    wd[i - 1] = spin_pairing_J(i);
    wc[i - 1] = spin_pairing_J(i).conjugate();
  }
  p.w_c.assign(geom.sites(), wc);
  p.w_d.assign(geom.sites(), wd);
  p.validate();
  return p;
}

PepsParams exact_construction_params(const KSpec& spec, double beta, int n_steps,
                                     double eps_margin) {
  spec.validate();
  if (beta <= 0.0 || n_steps < 1)
    throw ValidationError("exact_construction_params: need beta > 0, N >= 1");
  const double a = spec.geom.spacing;
  const double eps = beta / n_steps;
  if (eps * eps_margin >= std::min(a, 1.0 / spec.mass))
    throw ValidationError("exact_construction_params: eps = beta/N too large for the margin");
  const double r = 1.0 - spec.mass * eps;
  const double kappa = eps / (2.0 * a);
  const int legs = 2 * spec.geom.dim;
  const int ns = spec.n_spin;

  PepsParams p;
  p.geom = spec.geom;
  p.n_spin = ns;
  p.n_c = n_steps;
  p.n_d = n_steps - 1;
  p.translation_invariant = true;
  p.t.resize(1);
  p.tau.resize(1);

  // Copy mu is the imaginary-time slice: c copies live at t = 0..N-1 and
  // d copies at t = nu + 1 = 1..N-1.
  for (int mu = 0; mu < n_steps; ++mu)
    p.t[0].push_back(uniform_leg_t(legs, ns, std::sqrt(kappa) * std::pow(r, mu)));
  Mat all_legs = Mat::Ones(legs, legs);
  for (int mu = 0; mu < n_steps; ++mu)
    for (int nu = 0; nu < n_steps - 1; ++nu) {
      const int t_c = mu, t_d = nu + 1;
      cplx z = 0.0;
      if (t_c >= t_d) z = kappa * std::pow(r, t_c - t_d);
      p.tau[0].push_back(spin_diagonal_tau(z * all_legs, ns));
    }

  p.w_c.resize(spec.geom.sites());
  p.w_d.resize(spec.geom.sites());
  for (int s = 0; s < spec.geom.sites(); ++s)
    for (int i = 1; i <= spec.geom.dim; ++i) {
      p.w_d[s][i - 1] = spec.K[s][i - 1];
      p.w_c[s][i - 1] = spec.K[s][i - 1].conjugate();
    }
  p.validate();
  return p;
}

FockState trotter_reference(const KSpec& spec, double beta, int n_steps) {
  QuadraticHamiltonian h = build_quadratic(spec);
  if (h.size() > 12)
    throw SizeError("trotter_reference: more than 12 physical modes");
  return fock_imaginary_time_gs({h.hopping, h.pairing}, beta, n_steps, MassWeight::Linear);
}

double fock_pairing_fidelity(const PairingState& state, const FockState& reference) {
  FockState mine = fock_build_bcs(state.T);
  return fock_fidelity(mine, reference);
}

}  // namespace gfpeps
