#include "gfpeps/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace gfpeps {

namespace {
constexpr const char* kMagic = "gfpeps-state v1";

void write_header(std::ostream& os, const LatticeGeometry& geom, int n_spin, int modes,
                  bool binary) {
  os << kMagic << "\n";
  os << "dim " << geom.dim << "\n";
  os << "extent";
  for (int i = 0; i < geom.dim; ++i) os << " " << geom.extent[i];
  os << "\n";
  std::ostringstream sp;
  sp.precision(17);
  sp << geom.spacing;
  os << "spacing " << sp.str() << "\n";
  os << "n_spin " << n_spin << "\n";
  os << "modes " << modes << "\n";
  os << "ordering site-major physical<c<d leg copy spin\n";
  os << "format " << (binary ? "binary" : "text") << "\n";
}
}  // namespace

void save_state(const std::string& path, const LatticeGeometry& geom, int n_spin,
                const PairingState& state, bool binary) {
  std::ofstream os(path, binary ? (std::ios::out | std::ios::binary) : std::ios::out);
  if (!os) throw Error("save_state: cannot open " + path);
  const int n = state.size();
  write_header(os, geom, n_spin, n, binary);
  os << "T " << n << " " << n << "\n";
  if (binary) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double re = state.T(i, j).real(), im = state.T(i, j).imag();
        os.write(reinterpret_cast<const char*>(&re), sizeof(double));
        os.write(reinterpret_cast<const char*>(&im), sizeof(double));
      }
  } else {
    os.precision(17);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (j) os << " ";
        os << state.T(i, j).real() << " " << state.T(i, j).imag();
      }
      os << "\n";
    }
  }
  if (!os) throw Error("save_state: write failed for " + path);
}

StateFile load_state(const std::string& path) {
  std::ifstream is(path, std::ios::in | std::ios::binary);
  if (!is) throw Error("load_state: cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || line != kMagic)
    throw Error("load_state: bad magic in " + path);

  int dim = 0, n_spin = 1, modes = 0;
  std::array<int, 3> extent{1, 1, 1};
  double spacing = 1.0;
  bool binary = false;
  int rows = 0, cols = 0;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "dim") ls >> dim;
    else if (key == "extent")
      for (int i = 0; i < dim; ++i) ls >> extent[i];
    else if (key == "spacing") ls >> spacing;
    else if (key == "n_spin") ls >> n_spin;
    else if (key == "modes") ls >> modes;
    else if (key == "ordering") continue;
    else if (key == "format") {
      std::string f;
      ls >> f;
      binary = (f == "binary");
    } else if (key == "T") {
      ls >> rows >> cols;
      break;
    } else
      throw Error("load_state: unknown header key '" + key + "'");
  }
  if (rows <= 0 || rows != cols) throw Error("load_state: bad matrix dimensions");
  if (rows != modes) throw Error("load_state: modes/matrix mismatch");

  LatticeGeometry geom(dim, extent, spacing);
  Mat T(rows, cols);
  if (binary) {
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        double re = 0, im = 0;
        is.read(reinterpret_cast<char*>(&re), sizeof(double));
        is.read(reinterpret_cast<char*>(&im), sizeof(double));
        T(i, j) = cplx(re, im);
      }
    if (!is) throw Error("load_state: truncated binary data");
  } else {
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        double re = 0, im = 0;
        if (!(is >> re >> im)) throw Error("load_state: truncated text data");
        T(i, j) = cplx(re, im);
      }
  }

  StateFile out;
  out.geom = geom;
  out.n_spin = n_spin;
  ModeTable tab = enumerate_modes(geom, n_spin, 0, 0);
  if (tab.size() != modes) throw Error("load_state: header mode count inconsistent");
  out.state = PairingState(std::move(T), tab.modes);
  return out;
}

void save_real_matrix(const std::string& path, const RMat& m) {
  std::ofstream os(path);
  if (!os) throw Error("save_real_matrix: cannot open " + path);
  os.precision(17);
  os << m.rows() << " " << m.cols() << "\n";
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) os << " ";
      os << m(i, j);
    }
    os << "\n";
  }
}

}  // namespace gfpeps
