#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gfpeps/lattice.hpp"

using namespace gfpeps;

TEST_CASE("geometry invariants") {
  CHECK_THROWS_AS(LatticeGeometry(2, {3, 4, 1}), GeometryError);
  CHECK_THROWS_AS(LatticeGeometry(4, {4, 4, 4}), GeometryError);
  CHECK_THROWS_AS(LatticeGeometry(2, {4, 4, 1}, -1.0), GeometryError);
  LatticeGeometry g(3, {4, 4, 4});
  CHECK(g.sites() == 64);
  CHECK(g.admits_rotations());
  LatticeGeometry uneq(2, {4, 6, 1});
  CHECK_FALSE(uneq.admits_rotations());
  CHECK_THROWS_AS(rotate_site(uneq, 0, SiteIndex(0, 0)), GeometryError);
}

TEST_CASE("rotations match the printed coordinate maps") {
  LatticeGeometry g(3, {8, 8, 8});
  // Lambda_3 (1,0,0) -> (0,1,0)
  CHECK(rotate_site(g, 3, SiteIndex(1, 0, 0)) == SiteIndex(0, 1, 0));
  CHECK(rotate_site(g, 1, SiteIndex(0, 1, 0)) == SiteIndex(0, 0, 1));
  CHECK(rotate_site(g, 2, SiteIndex(0, 0, 1)) == SiteIndex(1, 0, 0));

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coord(0, 7);
  for (int trial = 0; trial < 100; ++trial) {
    SiteIndex s(coord(rng), coord(rng), coord(rng));
    for (int axis = 1; axis <= 3; ++axis) {
      // Lambda^4 = id
      SiteIndex r = s;
      for (int k = 0; k < 4; ++k) r = rotate_site(g, axis, r);
      CHECK(r == s);
    }
    // Lambda_2 x = Lambda_1^{-1} Lambda_3 Lambda_1 x
    SiteIndex lhs = rotate_site(g, 2, s);
    SiteIndex rhs = rotate_site_inverse(g, 1, rotate_site(g, 3, rotate_site(g, 1, s)));
    CHECK(lhs == rhs);
    // parity preserved by rotations
    CHECK(sublattice_parity(rotate_site(g, 1, s)) == sublattice_parity(s));
  }
}

TEST_CASE("rotation is a site bijection") {
  LatticeGeometry g(2, {4, 4, 1});
  std::vector<int> hit(g.sites(), 0);
  for (int id = 0; id < g.sites(); ++id)
    hit[site_id(g, rotate_site(g, 0, site_from_id(g, id)))] += 1;
  for (int h : hit) CHECK(h == 1);
}

TEST_CASE("sublattice parity") {
  CHECK(sublattice_parity(SiteIndex(0, 0, 0)) == 1);
  CHECK(sublattice_parity(SiteIndex(1, 0, 0)) == -1);
  LatticeGeometry g(3, {4, 4, 4});
  for (int id = 0; id < g.sites(); ++id) {
    SiteIndex s = site_from_id(g, id);
    for (int ax = 1; ax <= 3; ++ax)
      CHECK(sublattice_parity(neighbor(g, s, ax)) == -sublattice_parity(s));
  }
}

TEST_CASE("leg permutations as printed") {
  // d=2: cyclic right->up->left->down
  PermutationMatrix r2 = leg_permutation(2, 0);
  CHECK(r2.is_valid());
  CHECK(r2.image == std::vector<int>{1, 2, 3, 0});

  // d=3 axis 3: legs 1..4 cycle, 5 and 6 fixed
  PermutationMatrix r3 = leg_permutation(3, 3);
  CHECK(r3.image == std::vector<int>{1, 2, 3, 0, 4, 5});
  PermutationMatrix r1 = leg_permutation(3, 1);
  CHECK(r1.image == std::vector<int>{0, 4, 2, 5, 3, 1});
  PermutationMatrix rr2 = leg_permutation(3, 2);
  CHECK(rr2.image == std::vector<int>{5, 1, 4, 3, 0, 2});

  for (int axis = 1; axis <= 3; ++axis) {
    RMat R = leg_permutation(3, axis).dense();
    CHECK((R * R.transpose() - RMat::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
    RMat R4 = R * R * R * R;
    CHECK((R4 - RMat::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
  }

  // Composition mirror of Lambda_2 = Lambda_1^{-1} Lambda_3 Lambda_1 for
  // row-source permutation matrices: R^(2) = R^(1) R^(3) R^(1)^T.
  RMat R1 = leg_permutation(3, 1).dense();
  RMat R2 = leg_permutation(3, 2).dense();
  RMat R3 = leg_permutation(3, 3).dense();
  CHECK(((R1 * R3 * R1.transpose()) - R2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mode enumeration counts and canonical order") {
  {
    LatticeGeometry g(2, {1, 1, 1});
    ModeTable t = enumerate_modes(g, 1, 1, 0);
    CHECK(t.size() == 5);
  }
  {
    LatticeGeometry g(2, {2, 2, 1});
    ModeTable t = enumerate_modes(g, 1, 1, 1);
    CHECK(t.size() == 36);
  }
  {
    LatticeGeometry g(3, {2, 2, 2});
    ModeTable t = enumerate_modes(g, 2, 1, 1);
    CHECK(t.size() == 208);
  }

  LatticeGeometry g(2, {4, 4, 1});
  ModeTable t = enumerate_modes(g, 2, 2, 1);
  // index_of agrees with the enumeration order everywhere
  for (int i = 0; i < t.size(); ++i) CHECK(t.index_of(t.modes[i]) == i);
  // stable across calls
  ModeTable t2 = enumerate_modes(g, 2, 2, 1);
  for (int i = 0; i < t.size(); ++i) CHECK(t.modes[i] == t2.modes[i]);
}
