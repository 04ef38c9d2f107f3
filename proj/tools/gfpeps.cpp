// Batch front-end: verification suites, convergence sweeps, state building,
// BdG spectra, and rotation checks for stored states.

#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include "gfpeps/config.hpp"
#include "gfpeps/io.hpp"
#include "gfpeps/peps.hpp"
#include "gfpeps/symmetry.hpp"

using namespace gfpeps;
namespace fs = std::filesystem;

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

struct CheckRow {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool is_dimension = false;  // equality instead of <=
  double expected = 0.0;
  bool pass = false;
};

struct CheckList {
  std::vector<CheckRow> rows;

  void metric(const std::string& name, double value, double threshold) {
    CheckRow r;
    r.name = name;
    r.value = value;
    r.threshold = threshold;
    r.pass = std::isfinite(value) && value <= threshold;
    rows.push_back(r);
  }
  void dimension(const std::string& name, int value, int expected) {
    CheckRow r;
    r.name = name;
    r.value = value;
    r.is_dimension = true;
    r.expected = expected;
    r.pass = (value == expected);
    rows.push_back(r);
  }
  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }
};

Mat random_antisymmetric(int n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  Mat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = cplx(nd(rng), nd(rng));
  return antisymmetrize(A);
}

void apply_tol_overrides(ExperimentConfig& cfg, const std::vector<std::string>& tols) {
  for (const std::string& t : tols) {
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("--tol expects NAME=VALUE");
    cfg.tolerances[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
  }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

void verify_pfaffian(const ExperimentConfig& cfg, CheckList& out) {
  std::mt19937_64 rng(cfg.seed + 101);
  double sq_dev = 0.0, blin_dev = 0.0;
  for (int rep = 0; rep < 40; ++rep) {
    std::uniform_int_distribution<int> sd(1, 10);
    const int n = 2 * sd(rng);
    Mat A = random_antisymmetric(n, rng, 1.0);
    const cplx pf = pfaffian(A);
    const cplx det = A.determinant();
    sq_dev = std::max(sq_dev, std::abs(pf * pf - det) / std::max(1.0, std::abs(det)));
    Mat B(n, n);
    std::normal_distribution<double> nd(0.0, 0.6);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) B(i, j) = cplx(nd(rng), nd(rng));
    const cplx lhs = pfaffian(antisymmetrize(B * A * B.transpose()));
    const cplx rhs = B.determinant() * pf;
    blin_dev = std::max(blin_dev, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  out.metric("pfaffian_square_rel", sq_dev, cfg.tol("pfaffian", 1e-10));
  out.metric("pfaffian_multilinear_rel", blin_dev, cfg.tol("pfaffian_multilinear", 1e-9));
}

void verify_oracle(const ExperimentConfig& cfg, CheckList& out) {
  std::mt19937_64 rng(cfg.seed + 202);
  double ov = 0.0, tr = 0.0, pr = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    std::uniform_int_distribution<int> md(3, 9);
    const int M = md(rng);
    Mat L = random_antisymmetric(M, rng, 0.4), R = random_antisymmetric(M, rng, 0.4);
    const cplx g = bcs_overlap(PairingState(L), PairingState(R));
    const cplx o = fock_inner(fock_build_bcs(L), fock_build_bcs(R));
    ov = std::max(ov, std::abs(g - o) / std::max(1.0, std::abs(o)));

    std::normal_distribution<double> nd(0.0, 0.5);
    Mat raw(M, M);
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) raw(i, j) = cplx(nd(rng), nd(rng));
    const Mat herm = 0.5 * (raw + raw.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(herm);
    Vec ph(M);
    for (int i = 0; i < M; ++i) ph[i] = std::exp(I_UNIT * es.eigenvalues()[i]);
    Mat U = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    PairingState rotated = transform_modes(PairingState(L), U);
    QuadraticOpSpec gen;
    gen.hop = I_UNIT * herm;
    FockState oracle_rot = fock_apply_exp_quadratic(gen, fock_build_bcs(L));
    FockState mine = fock_build_bcs(rotated.T);
    tr = std::max(tr, (oracle_rot.amp - mine.amp).cwiseAbs().maxCoeff());

    std::uniform_int_distribution<int> vd(1, M - 2);
    const int V = vd(rng);
    std::vector<int> all(M);
    for (int i = 0; i < M; ++i) all[i] = i;
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<int> virt(all.begin(), all.begin() + V);
    std::sort(virt.begin(), virt.end());
    Mat B = random_antisymmetric(V, rng, 0.4);
    ProjectionResult res = project_bonds(PairingState(L), PairingState(B), virt);
    FockState oracle_proj = fock_project(fock_build_bcs(L), fock_build_bcs(B), virt);
    FockState mine_proj = fock_build_bcs(res.state.T);
    mine_proj.amp *= *res.scalar;
    pr = std::max(pr, (oracle_proj.amp - mine_proj.amp).cwiseAbs().maxCoeff() /
                          std::max(1.0, oracle_proj.amp.cwiseAbs().maxCoeff()));
  }
  const double t = cfg.tol("oracle", 1e-9);
  out.metric("oracle_overlap_rel", ov, t);
  out.metric("oracle_transform_abs", tr, t);
  out.metric("oracle_project_rel", pr, t);
}

void verify_symmetry_algebra(const ExperimentConfig& cfg, CheckList& out) {
  const int dim = cfg.geometry.dim;
  // Lambda relations on an 8^d lattice
  {
    LatticeGeometry g(dim, {8, 8, 8});
    int bad = 0;
    std::mt19937_64 rng(cfg.seed + 303);
    std::uniform_int_distribution<int> cd(0, 7);
    for (int rep = 0; rep < 100; ++rep) {
      SiteIndex s(cd(rng), cd(rng), dim == 3 ? cd(rng) : 0);
      if (dim == 3) {
        SiteIndex lhs = rotate_site(g, 2, s);
        SiteIndex rhs = rotate_site_inverse(g, 1, rotate_site(g, 3, rotate_site(g, 1, s)));
        if (!(lhs == rhs)) ++bad;
      }
      for (int axis = 1; axis <= (dim == 3 ? 3 : 1); ++axis) {
        SiteIndex r = s;
        for (int k = 0; k < 4; ++k) r = rotate_site(g, dim == 2 ? 0 : axis, r);
        if (!(r == s)) ++bad;
      }
    }
    out.dimension("lambda_relations_failures", bad, 0);
  }
  if (dim == 3) {
    RMat R1 = leg_permutation(3, 1).dense(), R2 = leg_permutation(3, 2).dense(),
         R3 = leg_permutation(3, 3).dense();
    out.metric("leg_permutation_relation", (R1 * R3 * R1.transpose() - R2).cwiseAbs().maxCoeff(),
               0.0);
    out.metric("j_relations_max", check_J_relations().max_deviation, cfg.tol("j_relations", 1e-13));
  }
  // four-rotation products
  if (dim == 2) {
    LatticeGeometry g(2, {4, 4, 1});
    PhysicalRotation rot = constant_phase_rotation(g, 0, std::exp(I_UNIT * (M_PI / 4.0)));
    int sign = four_rotation_product(rot, SiteIndex(0, 0));
    out.dimension("four_rotation_sign", sign, -1);
  } else {
    LatticeGeometry g(3, {4, 4, 4});
    bool ok = true;
    for (int axis = 1; axis <= 3; ++axis) {
      int s0 = four_rotation_product(staggered_rotation_d3(g, axis), SiteIndex(0, 0, 0));
      for (int id = 0; id < g.sites(); ++id)
        ok = ok && four_rotation_product(staggered_rotation_d3(g, axis), site_from_id(g, id)) == s0;
      ok = ok && four_rotation_product(spinhalf_rotation(g, axis), SiteIndex(0, 0, 0)) == -1;
    }
    out.dimension("four_rotation_consistent", ok ? 1 : 0, 1);
  }
  // solver dimensions
  if (dim == 2) {
    out.dimension("tau_space_dim",
                  static_cast<int>(solve_tau_constraint({leg_permutation(2, 0)}, 1.0).size()), 4);
    out.dimension("t_space_dim",
                  static_cast<int>(solve_t_constraint({leg_permutation(2, 0)}, 1.0).size()), 1);
  } else {
    std::vector<PermutationMatrix> rs = {leg_permutation(3, 1), leg_permutation(3, 2),
                                         leg_permutation(3, 3)};
    out.dimension("tau_space_dim", static_cast<int>(solve_tau_constraint(rs, 1.0).size()), 3);
    out.dimension("t_joint_dim", static_cast<int>(solve_t_constraint(rs, 1.0).size()), 1);
  }
  out.dimension("no_go_dim", no_go_nn_dimension(3, std::exp(I_UNIT * (M_PI / 4.0))), 0);
  // sabotaged-phase control: the no-go holds for any constant phase
  out.dimension("no_go_dim_eta4_plus1", no_go_nn_dimension(3, cplx(1.0)), 0);
}

void verify_states(const ExperimentConfig& cfg, CheckList& out) {
  std::mt19937_64 rng(cfg.seed + 404);
  const int dim = cfg.geometry.dim;
  double rot_max = 0.0, charge_max = 0.0;
  const int draws = std::max(1, std::min(cfg.draws, 5));
  if (dim == 2) {
    LatticeGeometry g(2, {4, 4, 1});
    PhysicalRotation rot = constant_phase_rotation(g, 0, std::exp(I_UNIT * (M_PI / 4.0)));
    for (int d = 0; d < draws; ++d) {
      SymmetricCoefficients co = random_symmetric_coefficients(cfg.n_c, cfg.n_d, rng);
      ContractResult c = contract(symmetric_params_d2(g, cfg.n_c, cfg.n_d, co));
      rot_max = std::max(rot_max, rotation_residual(c.state, rot));
      charge_max = std::max(charge_max, charge_residual(c.state));
    }
    PairingState gs = exact_ground(staggered_d2_kspec(g, cfg.mass));
    charge_max = std::max(charge_max, charge_residual(gs));
  } else {
    LatticeGeometry g(3, {4, 4, 4});
    for (int d = 0; d < draws; ++d) {
      SymmetricCoefficients co = random_symmetric_coefficients(cfg.n_c, cfg.n_d, rng);
      ContractResult c = contract(symmetric_params_d3_staggered(g, cfg.n_c, cfg.n_d, co));
      for (int axis = 1; axis <= 3; ++axis)
        rot_max = std::max(rot_max, rotation_residual(c.state, staggered_rotation_d3(g, axis)));
      charge_max = std::max(charge_max, charge_residual(c.state));
    }
    // Hamiltonian invariance under the staggered rotations
    QuadraticHamiltonian h = build_quadratic(staggered_d3_kspec(g, cfg.mass));
    ModeTable tab = enumerate_modes(g, 1, 0, 0);
    double hmax = 0.0;
    for (int axis = 1; axis <= 3; ++axis) {
      Mat U = physical_rotation_unitary(staggered_rotation_d3(g, axis), tab);
      hmax = std::max(hmax, (U * h.hopping * U.adjoint() - h.hopping).cwiseAbs().maxCoeff());
      hmax = std::max(hmax, (U * h.pairing * U.transpose() - h.pairing).cwiseAbs().maxCoeff());
    }
    out.metric("hamiltonian_invariance_max", hmax, cfg.tol("hamiltonian_invariance", 1e-12));
    PairingState gs = exact_ground(staggered_d3_kspec(g, cfg.mass));
    charge_max = std::max(charge_max, charge_residual(gs));
  }
  out.metric("rotation_residual_max", rot_max, cfg.tol("rotation_residual", 1e-9));
  out.metric("charge_residual_max", charge_max, cfg.tol("charge_residual", 1e-12));

  // ground energy against the dense oracle at oracle scale
  {
    LatticeGeometry g = (dim == 2) ? LatticeGeometry(2, {2, 2, 1}) : LatticeGeometry(3, {2, 2, 2});
    KSpec spec = (dim == 2) ? staggered_d2_kspec(g, cfg.mass) : staggered_d3_kspec(g, cfg.mass);
    QuadraticHamiltonian h = build_quadratic(spec);
    Mat Hd = fock_hamiltonian_matrix({h.hopping, h.pairing}, h.size());
    Eigen::SelfAdjointEigenSolver<Mat> es(Hd);
    out.metric("ground_energy_dev", std::abs(bdg_ground_energy(h) - es.eigenvalues()(0)),
               cfg.tol("ground_energy", 1e-9));
  }
}

int cmd_verify(const ExperimentConfig& cfg) {
  auto t0 = clock_type::now();
  CheckList checks;
  verify_pfaffian(cfg, checks);
  verify_oracle(cfg, checks);
  verify_symmetry_algebra(cfg, checks);
  verify_states(cfg, checks);

  ResultRecord rec;
  rec.run_id = "verify";
  rec.config_hash = config_hash(cfg);
  for (const auto& r : checks.rows) {
    std::printf("%-32s = %-14.6g %s\n", r.name.c_str(), r.value, r.pass ? "[PASS]" : "[FAIL]");
    rec.add(r.name, r.value);
  }
  rec.wall_ms = ms_since(t0);

  if (!cfg.out_dir.empty() && cfg.out_dir != ".") fs::create_directories(cfg.out_dir);
  std::ofstream csv(fs::path(cfg.out_dir) / "verify.csv");
  csv << "# gfpeps-verify v1, config_hash=" << std::hex << rec.config_hash << std::dec << "\n";
  csv << "check,value,pass\n";
  csv.precision(17);
  for (const auto& r : checks.rows)
    csv << r.name << "," << r.value << "," << (r.pass ? 1 : 0) << "\n";
  std::ofstream jsonl(fs::path(cfg.out_dir) / "records.jsonl");
  jsonl.precision(17);
  jsonl << "{\"run_id\":\"" << rec.run_id << "\",\"config_hash\":\"" << std::hex
        << rec.config_hash << std::dec << "\",\"wall_ms\":" << rec.wall_ms << ",\"metrics\":{";
  for (size_t i = 0; i < rec.metrics.size(); ++i) {
    if (i) jsonl << ",";
    jsonl << "\"" << rec.metrics[i].first << "\":" << rec.metrics[i].second;
  }
  jsonl << "}}\n";

  const bool ok = checks.all_pass();
  std::printf("verify: %s (%.1f ms)\n", ok ? "all checks passed" : "FAILURES present", rec.wall_ms);
  if (!ok) {
    for (const auto& r : checks.rows)
      if (!r.pass) std::fprintf(stderr, "failed check: %s = %.6g\n", r.name.c_str(), r.value);
  }
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// converge
// ---------------------------------------------------------------------------

struct SweepRow {
  int n = 0;
  double epsilon = 0.0;
  double fid_ground = 0.0;
  bool have_trotter = false;
  double fid_trotter = 0.0;
  bool degenerate_nd0 = false;
  bool skipped = false;
  std::string reason;
  double wall_ms = 0.0;
};

int cmd_converge(const ExperimentConfig& cfg) {
  if (cfg.family != FamilyKind::ExactConstruction)
    throw ConfigError("converge requires the exact_construction family");
  KSpec spec = cfg.kspec();
  PairingState gs = exact_ground(spec);
  QuadraticHamiltonian h = build_quadratic(spec);
  const bool oracle_scale = h.size() <= 12;

  // Sweep points: explicit N list at fixed beta, then a beta list at fixed
  // eps = beta / n_steps.
  std::vector<std::pair<double, int>> points;
  for (int n : cfg.n_list) points.emplace_back(cfg.beta, n);
  if (!cfg.beta_list.empty()) {
    const double eps = cfg.beta / cfg.n_steps;
    for (double b : cfg.beta_list)
      points.emplace_back(b, static_cast<int>(std::lround(b / eps)));
  }
  if (points.empty()) points.emplace_back(cfg.beta, cfg.n_steps);

  std::vector<SweepRow> rows(points.size());
  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      auto [beta, n] = points[i];
      SweepRow& row = rows[i];
      row.n = n;
      row.epsilon = beta / n;
      auto t0 = clock_type::now();
      try {
        PepsParams p = exact_construction_params(spec, beta, n, cfg.epsilon_margin);
        row.degenerate_nd0 = (p.n_d == 0);
        ContractResult c = contract(p);
        row.fid_ground = bcs_fidelity(c.state, gs);
        if (oracle_scale) {
          row.have_trotter = true;
          row.fid_trotter = fock_pairing_fidelity(c.state, trotter_reference(spec, beta, n));
        }
        if (row.fid_ground < 0.0 || row.fid_ground > 1.0 + 1e-9 ||
            (row.have_trotter && (row.fid_trotter < 0.0 || row.fid_trotter > 1.0 + 1e-9)))
          throw Error("converge: fidelity outside [0, 1]");
      } catch (const ValidationError& e) {
        row.skipped = true;
        row.reason = e.what();
      }
      row.wall_ms = ms_since(t0);
    }
  };
  std::vector<std::thread> pool;
  const int workers = std::max(1, cfg.workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();

  bool monotone = true;
  double prev = -1.0;
  for (const auto& r : rows) {
    if (r.skipped) continue;
    if (prev >= 0.0 && (1.0 - r.fid_ground) > (1.0 - prev) + 1e-12) monotone = false;
    prev = r.fid_ground;
  }

  if (!cfg.out_dir.empty() && cfg.out_dir != ".") fs::create_directories(cfg.out_dir);
  std::ofstream csv(fs::path(cfg.out_dir) / "converge.csv");
  csv << "# gfpeps-converge v1, config_hash=" << std::hex << config_hash(cfg) << std::dec << "\n";
  csv << "N,epsilon,fidelity_ground,fidelity_trotter,nd_zero,skipped,reason\n";
  csv.precision(17);
  for (const auto& r : rows) {
    csv << r.n << "," << r.epsilon << ",";
    if (!r.skipped) csv << r.fid_ground;
    csv << ",";
    if (r.have_trotter) csv << r.fid_trotter;
    csv << "," << (r.degenerate_nd0 ? 1 : 0) << "," << (r.skipped ? 1 : 0) << "," << r.reason
        << "\n";
  }
  csv << "# monotone_nonincreasing " << (monotone ? 1 : 0) << "\n";
  std::ofstream tim(fs::path(cfg.out_dir) / "timings.csv");
  tim << "N,wall_ms\n";
  for (const auto& r : rows) tim << r.n << "," << r.wall_ms << "\n";

  for (const auto& r : rows) {
    if (r.skipped)
      std::printf("N=%-4d eps=%-8.4g SKIPPED (%s)\n", r.n, r.epsilon, r.reason.c_str());
    else if (r.have_trotter)
      std::printf("N=%-4d eps=%-8.4g fid_ground=%.12f fid_trotter=%.12f%s\n", r.n, r.epsilon,
                  r.fid_ground, r.fid_trotter, r.degenerate_nd0 ? " [Nd=0]" : "");
    else
      std::printf("N=%-4d eps=%-8.4g fid_ground=%.12f%s\n", r.n, r.epsilon, r.fid_ground,
                  r.degenerate_nd0 ? " [Nd=0]" : "");
  }
  std::printf("monotone_nonincreasing=%d\n", monotone ? 1 : 0);
  return 0;
}

// ---------------------------------------------------------------------------
// build / spectrum / rotate-check
// ---------------------------------------------------------------------------

int cmd_build(const ExperimentConfig& cfg) {
  SymmetricCoefficients coeffs;
  if (cfg.coefficients) {
    coeffs = *cfg.coefficients;
  } else {
    std::mt19937_64 rng(cfg.seed);
    coeffs = random_symmetric_coefficients(cfg.n_c, cfg.n_d, rng);
  }
  PepsParams params = cfg.family_params(coeffs);
  ContractResult c = contract(params);

  if (!cfg.out_dir.empty() && cfg.out_dir != ".") fs::create_directories(cfg.out_dir);
  const fs::path path = fs::path(cfg.out_dir) / "state.txt";
  save_state(path.string(), cfg.geometry, params.n_spin, c.state, cfg.binary_state);
  std::printf("wrote %s (%d modes)\n", path.string().c_str(), c.state.size());
  if (cfg.write_covariance) {
    CovarianceMatrix cov = pairing_to_covariance(c.state);
    const fs::path cpath = fs::path(cfg.out_dir) / "covariance.txt";
    save_real_matrix(cpath.string(), cov.gamma);
    std::printf("wrote %s (purity defect %.3g)\n", cpath.string().c_str(), cov.purity_defect());
  }
  return 0;
}

int cmd_spectrum(const ExperimentConfig& cfg) {
  QuadraticHamiltonian h = build_quadratic(cfg.kspec());
  RVec ev = bdg_spectrum(h);
  if (!cfg.out_dir.empty() && cfg.out_dir != ".") fs::create_directories(cfg.out_dir);
  const fs::path path = fs::path(cfg.out_dir) / "spectrum.csv";
  std::ofstream csv(path);
  csv << "# gfpeps-spectrum v1, config_hash=" << std::hex << config_hash(cfg) << std::dec << "\n";
  csv << "index,energy\n";
  csv.precision(17);
  for (int i = 0; i < ev.size(); ++i) csv << i << "," << ev[i] << "\n";
  double gap = std::abs(ev[0]);
  for (int i = 1; i < ev.size(); ++i) gap = std::min(gap, std::abs(ev[i]));
  std::printf("wrote %s (%d eigenvalues, gap %.6g)\n", path.string().c_str(),
              static_cast<int>(ev.size()), gap);
  return 0;
}

int cmd_rotate_check(const std::string& state_path, const ExperimentConfig& cfg) {
  StateFile sf = load_state(state_path);
  const LatticeGeometry& g = sf.geom;
  double rot_max = 0.0;
  if (g.dim == 2) {
    PhysicalRotation rot = constant_phase_rotation(g, 0, std::exp(I_UNIT * (M_PI / 4.0)));
    rot_max = rotation_residual(sf.state, rot);
    std::printf("rotation_residual = %.6g\n", rot_max);
  } else {
    for (int axis = 1; axis <= 3; ++axis) {
      PhysicalRotation rot = (sf.n_spin == 1) ? staggered_rotation_d3(g, axis)
                                              : spinhalf_rotation(g, axis);
      const double r = rotation_residual(sf.state, rot);
      std::printf("rotation_residual_axis%d = %.6g\n", axis, r);
      rot_max = std::max(rot_max, r);
    }
  }
  const double ch = charge_residual(sf.state);
  std::printf("charge_residual = %.6g\n", ch);
  const bool ok = rot_max <= cfg.tol("rotation_residual", 1e-9) &&
                  ch <= cfg.tol("charge_residual", 1e-12);
  std::printf("rotate-check: %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian fermionic PEPS construction and verification"};
  app.require_subcommand(1);

  std::string config_path, out_dir, state_path;
  uint64_t seed = 0;
  bool seed_set = false, out_set = false;
  int workers = 0;
  std::vector<std::string> tol_overrides;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)");
    sub->add_option("--out", out_dir, "output directory")->each([&](const std::string&) {
      out_set = true;
    });
    sub->add_option("--seed", seed, "random seed override")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--workers", workers, "concurrent sweep workers");
    sub->add_option("--tol", tol_overrides, "tolerance override NAME=VALUE");
  };

  CLI::App* verify = app.add_subcommand("verify", "run the verification suites");
  add_common(verify);
  CLI::App* converge = app.add_subcommand("converge", "exact-construction convergence sweep");
  add_common(converge);
  CLI::App* build = app.add_subcommand("build", "contract a PEPS and write the state file");
  add_common(build);
  CLI::App* spectrum = app.add_subcommand("spectrum", "BdG eigenvalues to CSV");
  add_common(spectrum);
  CLI::App* rotate = app.add_subcommand("rotate-check", "residuals for a stored state");
  add_common(rotate);
  rotate->add_option("--state", state_path, "state file to check")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
    if (seed_set) cfg.seed = seed;
    if (out_set) cfg.out_dir = out_dir;
    if (workers > 0) cfg.workers = workers;
    apply_tol_overrides(cfg, tol_overrides);

    if (verify->parsed()) return cmd_verify(cfg);
    if (converge->parsed()) return cmd_converge(cfg);
    if (build->parsed()) return cmd_build(cfg);
    if (spectrum->parsed()) return cmd_spectrum(cfg);
    if (rotate->parsed()) return cmd_rotate_check(state_path, cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
