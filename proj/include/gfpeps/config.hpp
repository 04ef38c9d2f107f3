#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gfpeps/hamiltonians.hpp"
#include "gfpeps/peps.hpp"

namespace gfpeps {

enum class ModelKind { StaggeredD2, StaggeredD3, NaiveUpper, NaiveLower, CustomK };
enum class FamilyKind { SymmetricD2, SymmetricD3Staggered, SymmetricD3SpinHalf, ExactConstruction };

/// One self-contained experiment description, loaded from a JSON document.
/// Every referenced module precondition is checked at load time.
struct ExperimentConfig {
  ModelKind model = ModelKind::StaggeredD2;
  LatticeGeometry geometry{2, {4, 4, 1}, 1.0};
  double mass = 1.0;
  int n_spin = 1;  // custom_K only; other models fix it
  std::vector<Mat> custom_k;

  FamilyKind family = FamilyKind::SymmetricD2;
  int n_c = 1;
  int n_d = 1;
  double beta = 4.0;
  int n_steps = 32;
  std::vector<int> n_list;
  std::vector<double> beta_list;
  double epsilon_margin = 10.0;
  int draws = 20;
  std::optional<SymmetricCoefficients> coefficients;

  std::map<std::string, double> tolerances;
  uint64_t seed = 1;
  int workers = 1;
  std::string out_dir = ".";
  bool binary_state = false;
  bool write_covariance = false;

  double tol(const std::string& name, double fallback) const;
  KSpec kspec() const;
  PepsParams family_params(const SymmetricCoefficients& coeffs) const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig default_config();

/// FNV-1a over the canonical (sorted-key) serialization; reproducible across
/// runs and platforms.
uint64_t config_hash(const ExperimentConfig& cfg);
std::string canonical_dump(const ExperimentConfig& cfg);

struct ResultRecord {
  std::string run_id;
  uint64_t config_hash = 0;
  std::vector<std::pair<std::string, double>> metrics;
  double wall_ms = 0.0;

  void add(const std::string& name, double value);
};

}  // namespace gfpeps
