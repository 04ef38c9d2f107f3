#include "gfpeps/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace gfpeps {

using nlohmann::json;

namespace {

ModelKind parse_model(const std::string& s) {
  if (s == "staggered_d2") return ModelKind::StaggeredD2;
  if (s == "staggered_d3") return ModelKind::StaggeredD3;
  if (s == "naive_upper") return ModelKind::NaiveUpper;
  if (s == "naive_lower") return ModelKind::NaiveLower;
  if (s == "custom_K") return ModelKind::CustomK;
  throw ConfigError("unknown model '" + s + "'");
}

std::string model_name(ModelKind m) {
  switch (m) {
    case ModelKind::StaggeredD2: return "staggered_d2";
    case ModelKind::StaggeredD3: return "staggered_d3";
    case ModelKind::NaiveUpper: return "naive_upper";
    case ModelKind::NaiveLower: return "naive_lower";
    case ModelKind::CustomK: return "custom_K";
  }
  return "?";
}

FamilyKind parse_family(const std::string& s) {
  if (s == "symmetric_d2") return FamilyKind::SymmetricD2;
  if (s == "symmetric_d3_staggered") return FamilyKind::SymmetricD3Staggered;
  if (s == "symmetric_d3_spinhalf") return FamilyKind::SymmetricD3SpinHalf;
  if (s == "exact_construction") return FamilyKind::ExactConstruction;
  throw ConfigError("unknown family '" + s + "'");
}

std::string family_name(FamilyKind f) {
  switch (f) {
    case FamilyKind::SymmetricD2: return "symmetric_d2";
    case FamilyKind::SymmetricD3Staggered: return "symmetric_d3_staggered";
    case FamilyKind::SymmetricD3SpinHalf: return "symmetric_d3_spinhalf";
    case FamilyKind::ExactConstruction: return "exact_construction";
  }
  return "?";
}

cplx parse_complex(const json& j) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2) return cplx(j[0].get<double>(), j[1].get<double>());
  throw ConfigError("complex values must be numbers or [re, im] pairs");
}

json dump_complex(cplx z) { return json::array({z.real(), z.imag()}); }

}  // namespace

double ExperimentConfig::tol(const std::string& name, double fallback) const {
  auto it = tolerances.find(name);
  return it == tolerances.end() ? fallback : it->second;
}

KSpec ExperimentConfig::kspec() const {
  switch (model) {
    case ModelKind::StaggeredD2: return staggered_d2_kspec(geometry, mass);
    case ModelKind::StaggeredD3: return staggered_d3_kspec(geometry, mass);
    case ModelKind::NaiveUpper: return naive_kspec(geometry, mass, NaiveBranch::Upper);
    case ModelKind::NaiveLower: return naive_kspec(geometry, mass, NaiveBranch::Lower);
    case ModelKind::CustomK: {
      KSpec spec;
      spec.geom = geometry;
      spec.n_spin = n_spin;
      spec.mass = mass;
      if (static_cast<int>(custom_k.size()) != geometry.dim)
        throw ConfigError("custom_K model needs one K matrix per direction");
      std::array<Mat, 3> blocks{Mat(), Mat(), Mat()};
      for (int i = 0; i < geometry.dim; ++i) {
        if (custom_k[i].rows() != n_spin || custom_k[i].cols() != n_spin)
          throw ConfigError("custom K block must be n_spin x n_spin");
        blocks[i] = custom_k[i];
      }
      spec.K.assign(geometry.sites(), blocks);
      spec.validate();
      return spec;
    }
  }
  throw ConfigError("bad model");
}

PepsParams ExperimentConfig::family_params(const SymmetricCoefficients& coeffs) const {
  switch (family) {
    case FamilyKind::SymmetricD2: return symmetric_params_d2(geometry, n_c, n_d, coeffs);
    case FamilyKind::SymmetricD3Staggered:
      return symmetric_params_d3_staggered(geometry, n_c, n_d, coeffs);
    case FamilyKind::SymmetricD3SpinHalf:
      return symmetric_params_d3_spinhalf(geometry, n_c, n_d, coeffs);
    case FamilyKind::ExactConstruction:
      return exact_construction_params(kspec(), beta, n_steps, epsilon_margin);
  }
  throw ConfigError("bad family");
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig c = default_config();
  try {
    if (j.contains("model")) c.model = parse_model(j["model"].get<std::string>());
    if (j.contains("geometry")) {
      const json& g = j["geometry"];
      int dim = g.value("dim", 2);
      std::array<int, 3> ext{1, 1, 1};
      if (g.contains("extent")) {
        const json& e = g["extent"];
        if (!e.is_array() || static_cast<int>(e.size()) != dim)
          throw ConfigError("geometry.extent must list one entry per axis");
        for (int i = 0; i < dim; ++i) ext[i] = e[i].get<int>();
      } else {
        for (int i = 0; i < dim; ++i) ext[i] = 4;
      }
      c.geometry = LatticeGeometry(dim, ext, g.value("spacing", 1.0));
    }
    if (j.contains("mass")) c.mass = j["mass"].get<double>();
    if (j.contains("n_spin")) c.n_spin = j["n_spin"].get<int>();
    if (j.contains("K")) {
      c.custom_k.clear();
      for (const json& kd : j["K"]) {
        const int n = static_cast<int>(kd.size());
        Mat m(n, n);
        for (int r = 0; r < n; ++r)
          for (int col = 0; col < n; ++col) m(r, col) = parse_complex(kd[r][col]);
        c.custom_k.push_back(m);
      }
    }
    if (j.contains("family")) c.family = parse_family(j["family"].get<std::string>());
    c.n_c = j.value("n_c", c.n_c);
    c.n_d = j.value("n_d", c.n_d);
    c.beta = j.value("beta", c.beta);
    c.n_steps = j.value("n_steps", c.n_steps);
    if (j.contains("n_list")) c.n_list = j["n_list"].get<std::vector<int>>();
    if (j.contains("beta_list")) c.beta_list = j["beta_list"].get<std::vector<double>>();
    c.epsilon_margin = j.value("epsilon_margin", c.epsilon_margin);
    c.draws = j.value("draws", c.draws);
    if (j.contains("coefficients")) {
      const json& co = j["coefficients"];
      SymmetricCoefficients sc;
      for (const json& v : co.value("t", json::array())) sc.t.push_back(parse_complex(v));
      for (const json& arr : co.value("z", json::array())) {
        std::array<cplx, 4> z{0.0, 0.0, 0.0, 0.0};
        for (size_t i = 0; i < arr.size() && i < 4; ++i) z[i] = parse_complex(arr[i]);
        sc.z.push_back(z);
      }
      c.coefficients = sc;
    }
    if (j.contains("tolerances"))
      for (auto& [k, v] : j["tolerances"].items()) c.tolerances[k] = v.get<double>();
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.out_dir = j.value("out", c.out_dir);
    c.binary_state = j.value("binary_state", c.binary_state);
    c.write_covariance = j.value("write_covariance", c.write_covariance);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }

  // Checkable preconditions up front.
  if (c.mass <= 0.0) throw ConfigError("mass must be positive");
  if (c.workers < 1) throw ConfigError("workers must be >= 1");
  if (c.n_c < 0 || c.n_d < 0) throw ConfigError("copy counts must be nonnegative");
  const int need_dim = (c.model == ModelKind::StaggeredD2) ? 2
                       : (c.model == ModelKind::CustomK)   ? c.geometry.dim
                                                           : 3;
  if (c.geometry.dim != need_dim)
    throw ConfigError("model '" + model_name(c.model) + "' needs dim " + std::to_string(need_dim));
  if (c.family == FamilyKind::SymmetricD2 && c.geometry.dim != 2)
    throw ConfigError("symmetric_d2 family needs a d=2 geometry");
  if ((c.family == FamilyKind::SymmetricD3Staggered ||
       c.family == FamilyKind::SymmetricD3SpinHalf) &&
      c.geometry.dim != 3)
    throw ConfigError("d=3 families need a d=3 geometry");
  if (c.family == FamilyKind::ExactConstruction) {
    const double eps = c.beta / c.n_steps;
    if (eps * c.epsilon_margin >= std::min(c.geometry.spacing, 1.0 / c.mass))
      throw ConfigError("beta/N too large for the configured epsilon margin");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.model = ModelKind::StaggeredD2;
  c.geometry = LatticeGeometry(2, {4, 4, 1}, 1.0);
  c.mass = 1.0;
  c.family = FamilyKind::SymmetricD2;
  c.n_c = 1;
  c.n_d = 1;
  c.beta = 4.0;
  c.n_steps = 32;
  c.epsilon_margin = 10.0;
  c.draws = 20;
  c.seed = 1;
  c.workers = 1;
  return c;
}

std::string canonical_dump(const ExperimentConfig& c) {
  json j;
  j["model"] = model_name(c.model);
  j["geometry"] = {{"dim", c.geometry.dim},
                   {"extent", std::vector<int>(c.geometry.extent.begin(),
                                               c.geometry.extent.begin() + c.geometry.dim)},
                   {"spacing", c.geometry.spacing}};
  j["mass"] = c.mass;
  j["n_spin"] = c.n_spin;
  if (!c.custom_k.empty()) {
    json ks = json::array();
    for (const Mat& m : c.custom_k) {
      json rows = json::array();
      for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int col = 0; col < m.cols(); ++col) row.push_back(dump_complex(m(r, col)));
        rows.push_back(row);
      }
      ks.push_back(rows);
    }
    j["K"] = ks;
  }
  j["family"] = family_name(c.family);
  j["n_c"] = c.n_c;
  j["n_d"] = c.n_d;
  j["beta"] = c.beta;
  j["n_steps"] = c.n_steps;
  j["n_list"] = c.n_list;
  j["beta_list"] = c.beta_list;
  j["epsilon_margin"] = c.epsilon_margin;
  j["draws"] = c.draws;
  if (c.coefficients) {
    json co;
    co["t"] = json::array();
    for (cplx v : c.coefficients->t) co["t"].push_back(dump_complex(v));
    co["z"] = json::array();
    for (const auto& arr : c.coefficients->z) {
      json a = json::array();
      for (cplx v : arr) a.push_back(dump_complex(v));
      co["z"].push_back(a);
    }
    j["coefficients"] = co;
  }
  j["tolerances"] = c.tolerances;
  j["seed"] = c.seed;
  // out_dir and workers do not affect results, keep them out of the hash
  return j.dump();
}

uint64_t config_hash(const ExperimentConfig& c) {
  const std::string s = canonical_dump(c);
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

void ResultRecord::add(const std::string& name, double value) {
  if (!std::isfinite(value)) throw Error("ResultRecord: non-finite metric " + name);
  metrics.emplace_back(name, value);
}

}  // namespace gfpeps
