#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "effham/model.hpp"

using namespace effham;

TEST_CASE("detunings_from_lab on two- and three-level ladders") {
  const Detunings two = detunings_from_lab({{0.0, 10.0}, {9.0}, {1.0}});
  CHECK(two.photon_signs == std::vector<int>{1});
  CHECK(two.detunings[0] == doctest::Approx(1.0).epsilon(1e-15));

  // Downhill second transition: emit a photon, detuning from the gap size.
  const Detunings three = detunings_from_lab({{0.0, 10.0, 3.0}, {9.0, 6.9}, {1.0, 1.0}});
  CHECK(three.photon_signs == std::vector<int>{1, -1});
  CHECK(three.detunings[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(three.detunings[1] == doctest::Approx(0.1).epsilon(1e-12));

  const Detunings resonant = detunings_from_lab({{0.0, 10.0}, {10.0}, {0.5}});
  CHECK(resonant.detunings[0] == 0.0);
}

TEST_CASE("detunings_from_lab rejects degenerate neighbours and bad input") {
  CHECK_THROWS_AS(detunings_from_lab({{1.0, 1.0}, {5.0}, {0.1}}),
                  DegenerateAdjacentLevels);
  CHECK_THROWS_AS(detunings_from_lab({{0.0, 1.0}, {-5.0}, {0.1}}), InvalidValue);
  CHECK_THROWS_AS(detunings_from_lab({{0.0, 1.0}, {5.0}, {0.0}}), InvalidValue);
  CHECK_THROWS_AS(detunings_from_lab({{0.0}, {}, {}}), InvalidValue);
}

TEST_CASE("build_cascade smallest case") {
  // One transition, detuning 1, coupling 0.4.
  const Matrix h = build_cascade({{0.0, 10.0}, {9.0}, {0.4}});
  const Matrix expected{{0.0, 0.2}, {0.2, 1.0}};
  CHECK(max_abs_diff(h, expected) < 1e-15);
}

TEST_CASE("build_cascade reproduces the Raman diagonal in lab ordering") {
  // Lambda configuration in the ladder basis (g, e, t): signed detunings
  // accumulate to (0, detuning0, overall detuning).
  const double det0 = 1.0, overall = 0.02;
  const double det1 = det0 - overall;
  // gap(g->e) = 5, laser 5 - det0; gap(e->t) = 2 downhill, laser 2 - det1.
  const Matrix h = build_cascade({{0.0, 5.0, 3.0}, {5.0 - det0, 2.0 - det1}, {0.4, 0.3}});
  CHECK(h(0, 0).real() == 0.0);
  CHECK(h(1, 1).real() == doctest::Approx(det0).epsilon(1e-12));
  CHECK(h(2, 2).real() == doctest::Approx(overall).epsilon(1e-12));
  CHECK(std::abs(h(0, 1) - Complex(0.2)) == 0.0);
  CHECK(std::abs(h(1, 2) - Complex(0.15)) == 0.0);
}

TEST_CASE("build_cascade four-level diagonal accumulates detunings") {
  // All transitions uphill, detunings (d0, d1, d2).
  const double d0 = 1.0, d1 = 0.3, d2 = -1.2;
  const LevelLadder ladder{{0.0, 10.0, 20.0, 30.0},
                           {10.0 - d0, 10.0 - d1, 10.0 - d2},
                           {0.4, 0.3, 0.4}};
  const Matrix h = build_cascade(ladder);
  CHECK(h(0, 0).real() == 0.0);
  CHECK(h(1, 1).real() == doctest::Approx(d0).epsilon(1e-12));
  CHECK(h(2, 2).real() == doctest::Approx(d0 + d1).epsilon(1e-12));
  CHECK(h(3, 3).real() == doctest::Approx(d0 + d1 + d2).epsilon(1e-12));
}

TEST_CASE("build_cascade is tridiagonal") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uni(0.1, 2.0);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t d = 3 + rep % 4;
    LevelLadder ladder;
    double e = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      ladder.level_energies.push_back(e);
      e += (rep % 2 ? 1.0 : -1.0) * (5.0 + uni(rng));
    }
    for (std::size_t i = 0; i + 1 < d; ++i) {
      ladder.laser_frequencies.push_back(uni(rng) + 3.0);
      ladder.rabi_frequencies.push_back(uni(rng));
    }
    const Matrix h = build_cascade(ladder);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        if (i != j && i + 1 != j && j + 1 != i) CHECK(h(i, j) == Complex(0.0));
  }
}

TEST_CASE("shift_picture adds a multiple of the identity") {
  const Matrix h{{0.0, 0.2}, {0.2, 1.0}};
  CHECK(max_abs_diff(shift_picture(h, 0.0), h) == 0.0);

  const double overall = 0.02;
  const Matrix raman{{0.0, 0.0}, {0.0, overall}};
  const Matrix shifted = shift_picture(raman, -overall / 2);
  CHECK(shifted(0, 0) == Complex(-overall / 2));
  CHECK(shifted(1, 1) == Complex(overall / 2));

  // Spectral shift identity.
  const HermitianEig before = herm_eig(h);
  const HermitianEig after = herm_eig(shift_picture(h, 0.37));
  for (std::size_t k = 0; k < 2; ++k)
    CHECK(after.eigenvalues[k] ==
          doctest::Approx(before.eigenvalues[k] + 0.37).epsilon(1e-13));
}

namespace {

Matrix raman_matrix(double rabi0, double rabi1, double detuning, double overall) {
  Matrix h(3, 3);
  h(0, 0) = -overall / 2;
  h(1, 1) = overall / 2;
  h(2, 2) = detuning;
  h(0, 2) = h(2, 0) = rabi0 / 2;
  h(1, 2) = h(2, 1) = rabi1 / 2;
  return h;
}

}  // namespace

TEST_CASE("partition cuts the Raman system into its printed blocks") {
  const double rabi0 = 0.4, rabi1 = 0.3, detuning = 1.0, overall = -0.0175;
  const Matrix h = raman_matrix(rabi0, rabi1, detuning, overall);
  const BlockHamiltonian block = partition(h, {{0, 1}, {{2}}}, {"g", "t", "e"});

  CHECK(block.relevant_dim() == 2);
  CHECK(block.irrelevant_dim() == 1);
  CHECK(block.omega()(0, 0) == Complex(-overall / 2));
  CHECK(block.omega()(1, 1) == Complex(overall / 2));
  CHECK(block.omega()(0, 1) == Complex(0.0));
  CHECK(block.coupling()(0, 0) == Complex(rabi0));
  CHECK(block.coupling()(1, 0) == Complex(rabi1));
  CHECK(block.delta()(0, 0) == Complex(detuning));
  CHECK(block.relevant_labels() == std::vector<std::string>{"g", "t"});
  CHECK(block.irrelevant_labels() == std::vector<std::string>{"e"});

  // Reassembly returns the permuted original exactly.
  CHECK(max_abs_diff(block.assemble(), h) == 0.0);
}

TEST_CASE("partition of the reordered three-photon ladder") {
  // Four levels in the order (0, 3, 1, 2): a coupled 2x2 irrelevant block
  // and a diagonal coupling matrix.
  const double rabi0 = 0.4, rabi1 = 0.3, rabi2 = 0.4, det = 1.0;
  Matrix h(4, 4);
  h(2, 2) = det;
  h(3, 3) = det;
  h(0, 2) = h(2, 0) = rabi0 / 2;
  h(1, 3) = h(3, 1) = rabi2 / 2;
  h(2, 3) = h(3, 2) = rabi1 / 2;
  const BlockHamiltonian block = partition(h, {{0, 1}, {{2, 3}}});
  CHECK(max_abs_diff(block.omega(), Matrix(2, 2)) == 0.0);
  CHECK(max_abs_diff(block.coupling(), Matrix{{rabi0, 0.0}, {0.0, rabi2}}) == 0.0);
  CHECK(max_abs_diff(block.delta(),
                     Matrix{{det, rabi1 / 2}, {rabi1 / 2, det}}) == 0.0);
}

TEST_CASE("partition rejects degenerate plans") {
  const Matrix h = raman_matrix(0.4, 0.3, 1.0, 0.0);
  CHECK_THROWS_AS(partition(h, {{0, 1, 2}, {}}), IndexError);
  CHECK_THROWS_AS(partition(h, {{0, 1}, {{2, 2}}}), IndexError);
  CHECK_THROWS_AS(partition(h, {{0, 1}, {{3}}}), IndexError);
  CHECK_THROWS_AS(partition(h, {{0}, {{2}}}), IndexError);  // does not cover
}

TEST_CASE("partition flags singular irrelevant blocks") {
  const Matrix h = raman_matrix(0.4, 0.3, 0.0, 0.0);  // resonant intermediate
  CHECK_THROWS_AS(partition(h, {{0, 1}, {{2}}}), SingularBlock);
}

TEST_CASE("partition reassembly is exact for random plans") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t d = 3 + rep % 4;
    Matrix h(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      h(i, i) = uni(rng) + (i >= d / 2 ? 4.0 : 0.0);  // keep the cut invertible
      for (std::size_t j = i + 1; j < d; ++j) {
        h(i, j) = Complex(uni(rng), uni(rng)) * 0.2;
        h(j, i) = std::conj(h(i, j));
      }
    }
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t m = 1 + rep % (d - 1);
    PartitionPlan plan;
    plan.relevant.assign(order.begin(), order.begin() + m);
    plan.stages = {{order.begin() + m, order.end()}};

    BlockHamiltonian block = [&] {
      try {
        return partition(h, plan);
      } catch (const SingularBlock&) {
        // Rare for this ensemble; replace with a trivially safe cut.
        plan.relevant.assign(order.begin(), order.begin() + 1);
        plan.stages = {{order.begin() + 1, order.end()}};
        for (std::size_t k = 1; k < d; ++k) h(order[k], order[k]) += 6.0;
        return partition(h, plan);
      }
    }();

    const Matrix assembled = block.assemble();
    const auto& perm = block.permutation();
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        CHECK(assembled(i, j) == h(perm[i], perm[j]));
  }
}

TEST_CASE("merged plans keep the stage order in the irrelevant sector") {
  Matrix h(6, 6);
  for (std::size_t i = 0; i < 6; ++i) h(i, i) = i >= 2 ? 2.0 + i : 0.0;
  const PartitionPlan staged{{0, 1}, {{4, 5}, {2, 3}}};
  const BlockHamiltonian block =
      partition(h, staged.merged(), {"a", "b", "c", "d", "e", "f"});
  CHECK(block.irrelevant_labels() ==
        std::vector<std::string>{"e", "f", "c", "d"});
  CHECK(block.permutation() == std::vector<std::size_t>{0, 1, 4, 5, 2, 3});
}

TEST_CASE("shift_picture commutes with partition") {
  const Matrix h = raman_matrix(0.4, 0.3, 1.0, -0.0175);
  const PartitionPlan plan{{0, 1}, {{2}}};
  const double shift = 0.21;
  const BlockHamiltonian shifted_first = partition(shift_picture(h, shift), plan);
  const BlockHamiltonian block = partition(h, plan);
  CHECK(max_abs_diff(shifted_first.omega(), shift_picture(block.omega(), shift)) == 0.0);
  CHECK(max_abs_diff(shifted_first.delta(), shift_picture(block.delta(), shift)) == 0.0);
  CHECK(max_abs_diff(shifted_first.coupling(), block.coupling()) == 0.0);
}

TEST_CASE("block construction rejects inconsistent data") {
  CHECK_THROWS_AS(BlockHamiltonian::create(Matrix{{0.0, 0.5}, {0.4, 0.0}},
                                           Matrix(2, 1), Matrix{{1.0}}, {"a", "b"},
                                           {"c"}),
                  NotHermitian);
  CHECK_THROWS_AS(BlockHamiltonian::create(Matrix{{0.0}}, Matrix(1, 1), Matrix{{1.0}},
                                           {"a"}, {"a"}),
                  IndexError);
}
