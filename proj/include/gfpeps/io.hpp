#pragma once

#include <string>

#include "gfpeps/gaussian.hpp"
#include "gfpeps/lattice.hpp"

namespace gfpeps {

/// Physical-state file: plain-text header (geometry, mode ordering, counts)
/// followed by the dense pairing matrix in row-major scientific notation with
/// 17 significant digits, or raw little-endian doubles in binary mode.
struct StateFile {
  LatticeGeometry geom;
  int n_spin = 1;
  PairingState state;
};

void save_state(const std::string& path, const LatticeGeometry& geom, int n_spin,
                const PairingState& state, bool binary = false);

StateFile load_state(const std::string& path);

/// Real matrix companion (covariance output).
void save_real_matrix(const std::string& path, const RMat& m);

}  // namespace gfpeps
