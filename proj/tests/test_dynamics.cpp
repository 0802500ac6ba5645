#include "doctest.h"

#include <array>
#include <cmath>
#include <random>

#include "effham/dynamics.hpp"
#include "effham/picture.hpp"
#include "effham/scenarios.hpp"

using namespace effham;

namespace {

BlockHamiltonian raman_block(double rabi0, double rabi1, double detuning,
                             double overall) {
  const Scenario s = scenario_lambda(rabi0, rabi1, detuning, overall);
  return partition(s.hamiltonian, s.plan, s.labels);
}

const std::vector<Complex> kGround3{1.0, 0.0, 0.0};

}  // namespace

TEST_CASE("evolve_exact keeps populations of a diagonal Hamiltonian fixed") {
  const Matrix h{{0.4, 0.0}, {0.0, -1.1}};
  const std::vector<Complex> psi0{0.0, 1.0};
  const Trajectory traj = evolve_exact(h, psi0, {10.0, 50});
  for (const auto& pop : traj.populations) {
    CHECK(pop[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(pop[1] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("evolve_exact reproduces the two-level Rabi formula") {
  const double rabi = 0.3;
  const Matrix h{{0.0, rabi / 2}, {rabi / 2, 0.0}};
  const std::vector<Complex> psi0{1.0, 0.0};
  const TimeGrid grid{2.0 * M_PI / rabi, 256};
  const Trajectory traj = evolve_exact(h, psi0, grid);
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    const double expected = std::pow(std::sin(rabi * traj.times[j] / 2), 2);
    CHECK(traj.populations[j][1] == doctest::Approx(expected).epsilon(1e-11));
  }
}

TEST_CASE("evolve_exact conserves the norm and knows the slow gap") {
  const Scenario s = scenario_lambda(0.4, 0.4, 1.0, 0.0);
  const TimeGrid grid{90.0, 900};
  const Trajectory traj = evolve_exact(s.hamiltonian, kGround3, grid, s.labels);
  for (double q : traj.conserved_norm) CHECK(std::abs(q - 1.0) <= 1e-9);
  // Smallest eigenvalue spacing of this system.
  CHECK(*traj.rabi == doctest::Approx(0.5 * (std::sqrt(1.32) - 1.0)).epsilon(1e-12));
  // Near-complete slow transfer at half the slow period.
  const double period = 2.0 * M_PI / *traj.rabi;
  CHECK(period == doctest::Approx(84.40).epsilon(1e-3));
  const std::size_t half = static_cast<std::size_t>(period / 2 / grid.step());
  CHECK(traj.populations[half][1] > 0.9);
}

TEST_CASE("evolve_exact validates its input") {
  const Matrix h{{0.0, 0.1}, {0.1, 0.0}};
  CHECK_THROWS_AS(evolve_exact(h, std::vector<Complex>{1.0, 1.0}, {1.0, 10}),
                  InvalidValue);
  CHECK_THROWS_AS(evolve_exact(h, std::vector<Complex>{1.0}, {1.0, 10}), IndexError);
  CHECK_THROWS_AS(evolve_exact(h, std::vector<Complex>{1.0, 0.0}, {-1.0, 10}),
                  InvalidValue);
}

TEST_CASE("markov0 trajectory keeps the plain norm and oscillates at its gap") {
  const EffectiveModel model = heff0(raman_block(0.4, 0.4, 1.0, 0.0));
  const TimeGrid grid{80.0, 800};
  const Trajectory traj = evolve_effective(model, kGround3, grid);
  CHECK(traj.method == "markov0");
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    const double relevant = traj.populations[j][0] + traj.populations[j][1];
    CHECK(std::abs(relevant - 1.0) <= 1e-11);  // the zeroth-order bookkeeping
    const double expected = std::pow(std::sin(*traj.rabi * traj.times[j] / 2), 2);
    CHECK(traj.populations[j][1] == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("markov1 trajectory starts below one by the metric excess") {
  const EffectiveModel model = heff1(raman_block(0.4, 0.3, 1.0, -0.0175));
  const TimeGrid grid{120.0, 1200};
  const Trajectory traj = evolve_effective(model, kGround3, grid);
  CHECK(traj.populations[0][0] == doctest::Approx(1.0 / 1.04).epsilon(1e-13));
  const double eps0 = traj.populations[0][2];
  CHECK(eps0 == doctest::Approx(1.0 - 1.0 / 1.04).epsilon(1e-12));
  // The metric norm is the conserved quantity, and populations stay physical.
  for (double q : traj.conserved_norm) CHECK(std::abs(q - 1.0) <= 1e-9);
  for (const auto& pop : traj.populations)
    for (double p : pop) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0 + 1e-9);
    }
}

TEST_CASE("markov1 and its dressed form tell the same story") {
  const BlockHamiltonian block = raman_block(0.4, 0.3, 1.0, -0.0175);
  const TimeGrid grid{60.0, 600};
  const Trajectory plain = evolve_effective(heff1(block), kGround3, grid);
  const Trajectory dressed = evolve_effective(heff1_dressed(block), kGround3, grid);
  for (std::size_t j = 0; j < plain.times.size(); ++j)
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(std::abs(plain.populations[j][i] - dressed.populations[j][i]) <= 1e-9);
}

TEST_CASE("reconstructed population equals the metric excess along the path") {
  const BlockHamiltonian block = raman_block(0.4, 0.3, 1.0, -0.0175);
  const EffectiveModel model = heff1(block);
  const TimeGrid grid{50.0, 500};
  const Trajectory traj = evolve_effective(model, kGround3, grid);
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    Matrix psi(2, 1);
    psi(0, 0) = traj.amplitudes[j][0];
    psi(1, 0) = traj.amplitudes[j][1];
    const Matrix excess =
        psi.adjoint() * ((model.metric - Matrix::identity(2)) * psi);
    CHECK(std::abs(traj.populations[j][2] - excess(0, 0).real()) <= 1e-12);
  }
}

TEST_CASE("an uncoupled model leaves the irrelevant sector empty") {
  const BlockHamiltonian block = BlockHamiltonian::create(
      Matrix{{0.05, 0.0}, {0.0, -0.05}}, Matrix(2, 1), Matrix{{1.0}}, {"a", "b"},
      {"c"});
  const Trajectory traj = evolve_effective(heff1(block), kGround3, {30.0, 300});
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    CHECK(traj.populations[j][2] == 0.0);
    CHECK(traj.populations[j][0] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("initial weight outside the relevant sector is rejected") {
  const EffectiveModel model = heff0(raman_block(0.4, 0.3, 1.0, 0.0));
  const std::vector<Complex> bad{std::sqrt(0.5), 0.0, std::sqrt(0.5)};
  CHECK_THROWS_AS(evolve_effective(model, bad, {10.0, 100}),
                  InitialStateOutsideRelevant);
}

TEST_CASE("reconstruct_history of a quiet system is quiet") {
  const BlockHamiltonian block = raman_block(0.4, 0.3, 1.0, 0.0);
  const TimeGrid grid{5.0, 100};
  const std::vector<std::vector<Complex>> psi(grid.points(), {0.0, 0.0});
  for (const auto& eps : reconstruct_history(block, psi, grid))
    CHECK(std::abs(eps[0]) == 0.0);
}

TEST_CASE("reconstruct_history of a constant column has the closed form") {
  // For constant psi and scalar delta the memory integral is
  // -(coupling† psi / (2 delta)) (1 - exp(-i delta t)).
  const BlockHamiltonian block = raman_block(0.4, 0.3, 1.3, 0.0);
  const TimeGrid grid{8.0, 4000};
  const std::vector<std::vector<Complex>> psi(grid.points(), {0.6, 0.8});
  const auto eps = reconstruct_history(block, psi, grid);
  const double det = 1.3;
  const Complex drive = 0.4 * 0.6 + 0.3 * 0.8;
  const std::vector<double> times = grid.times();
  for (std::size_t j = 0; j < times.size(); j += 200) {
    const Complex expected =
        -drive / (2.0 * det) * (1.0 - std::exp(Complex(0.0, -det * times[j])));
    CHECK(std::abs(eps[j][0] - expected) <= 1e-6);
  }
}

TEST_CASE("reconstruct_history converges quadratically to the exact amplitude") {
  const Scenario s = scenario_lambda(0.4, 0.3, 1.0, -0.0175);
  const BlockHamiltonian block = partition(s.hamiltonian, s.plan, s.labels);

  auto max_error = [&](std::size_t steps) {
    const TimeGrid grid{5.0, steps};
    const Trajectory exact = evolve_exact(s.hamiltonian, kGround3, grid, s.labels);
    std::vector<std::vector<Complex>> psi(grid.points());
    for (std::size_t j = 0; j < psi.size(); ++j)
      psi[j] = {exact.amplitudes[j][0], exact.amplitudes[j][1]};
    const auto eps = reconstruct_history(block, psi, grid);
    double worst = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j)
      worst = std::max(worst, std::abs(eps[j][0] - exact.amplitudes[j][2]));
    return worst;
  };

  const double coarse = max_error(5000);   // step 1e-3
  const double fine = max_error(10000);    // step 5e-4
  CHECK(coarse <= 1e-4);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("reconstruct_history refuses an unresolvably coarse grid") {
  const BlockHamiltonian block = raman_block(0.4, 0.3, 1.0, 0.0);
  const TimeGrid grid{100.0, 50};  // step 2 against a unit delta scale
  const std::vector<std::vector<Complex>> psi(grid.points(), {1.0, 0.0});
  CHECK_THROWS_AS(reconstruct_history(block, psi, grid), GridTooCoarse);
}

TEST_CASE("rabi_exact") {
  const Scenario s = scenario_lambda(0.4, 0.4, 1.0, 0.0);
  const double x = 0.08;
  CHECK(rabi_exact(s.hamiltonian) ==
        doctest::Approx(0.5 * (std::sqrt(1.0 + 4.0 * x) - 1.0)).epsilon(1e-13));
  CHECK(rabi_exact(Matrix{{0.0, 0.0, 0.0}, {0.0, 5.0, 0.0}, {0.0, 0.0, 5.1}}) ==
        doctest::Approx(0.1).epsilon(1e-12));
  CHECK(rabi_exact(Matrix::identity(3)) == 0.0);
  CHECK_THROWS_AS(rabi_exact(Matrix{{1.0}}), InvalidValue);
}

TEST_CASE("rabi_effective matches the table rows") {
  const double x = 0.08;
  const double rabi = std::sqrt(2.0 * x);
  const BlockHamiltonian sym = raman_block(rabi, rabi, 1.0, 0.0);
  CHECK(rabi_effective(heff0(sym)) == doctest::Approx(x).epsilon(1e-13));
  CHECK(rabi_effective(heff1(sym)) == doctest::Approx(x / (1 + x)).epsilon(1e-12));

  const double alpha = 0.28;
  const double rabi0 = std::sqrt(2.0 * x * (1 + alpha));
  const double rabi1 = std::sqrt(2.0 * x * (1 - alpha));
  const double overall = (rabi1 * rabi1 - rabi0 * rabi0) / 4.0;
  const BlockHamiltonian det = raman_block(rabi0, rabi1, 1.0, overall);
  CHECK(rabi_effective(heff0(det)) ==
        doctest::Approx(std::sqrt(1 - alpha * alpha) * x).epsilon(1e-13));
}

TEST_CASE("the zeroth-order gap has the closed two-level form") {
  std::mt19937 rng(51);
  std::uniform_real_distribution<double> uni(0.05, 0.5);
  for (int rep = 0; rep < 25; ++rep) {
    const double rabi0 = uni(rng), rabi1 = uni(rng);
    const double det = 0.8 + uni(rng);
    const double overall = 0.3 * (uni(rng) - 0.25);
    const double gap = rabi_effective(heff0(raman_block(rabi0, rabi1, det, overall)));
    const double shifted = overall + (rabi0 * rabi0 - rabi1 * rabi1) / (4 * det);
    const double expected =
        std::hypot(shifted, rabi0 * rabi1 / (2 * det));
    CHECK(gap == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("compare_trajectories on identical input is all zero") {
  const Scenario s = scenario_lambda(0.4, 0.3, 1.0, -0.0175);
  const Trajectory traj = evolve_exact(s.hamiltonian, kGround3, {20.0, 200}, s.labels);
  const TrajectoryComparison cmp = compare_trajectories(traj, traj);
  CHECK(cmp.max_abs == 0.0);
  CHECK(cmp.rms == 0.0);
  CHECK(*cmp.rabi_relative_difference == 0.0);
}

TEST_CASE("compare_trajectories measures the fig3-regime gap error") {
  const Scenario s = scenario_lambda(0.4, 0.3, 1.0, -0.0175);
  const TimeGrid grid{120.0, 1200};
  const Trajectory exact = evolve_exact(s.hamiltonian, kGround3, grid, s.labels);
  const BlockHamiltonian block = partition(s.hamiltonian, s.plan, s.labels);
  const Trajectory adiabatic = evolve_effective(heff0(block), kGround3, grid);
  const TrajectoryComparison cmp = compare_trajectories(exact, adiabatic);
  CHECK(*cmp.rabi_relative_difference > 0.05);
  CHECK(*cmp.rabi_relative_difference < 0.08);
  CHECK(cmp.per_state_max.size() == 3);
  CHECK(cmp.max_abs > 0.01);
}

TEST_CASE("compare_trajectories rejects mismatched input") {
  const Scenario s = scenario_lambda(0.4, 0.3, 1.0, -0.0175);
  const Trajectory a = evolve_exact(s.hamiltonian, kGround3, {20.0, 200}, s.labels);
  const Trajectory b = evolve_exact(s.hamiltonian, kGround3, {20.0, 100}, s.labels);
  CHECK_THROWS_AS(compare_trajectories(a, b), GridMismatch);
  Trajectory c = a;
  c.labels[2] = "x";
  CHECK_THROWS_AS(compare_trajectories(a, c), GridMismatch);
}

TEST_CASE("composed models reconstruct every irrelevant state") {
  const double rabi0 = 0.3, rabi1 = 0.2, det = 1.0, blockade = 5.0;
  const double d = (rabi1 * rabi1 - rabi0 * rabi0) / (4 * det);
  const Scenario s = scenario_rydberg_pair(rabi0, rabi1, det, d, blockade);
  const std::array<Order, 2> orders{Order::markov0, Order::markov1};
  const EffectiveModel model = compose_elimination(
      s.hamiltonian, s.named_plans.at("2+2+2"), orders, s.labels);
  std::vector<Complex> psi0(6, 0.0);
  psi0[0] = 1.0;
  const Trajectory traj = evolve_effective(model, psi0, {50.0, 500});
  CHECK(traj.labels == s.labels);
  // The doubly excited states acquire a small reconstructed population.
  double ee_max = 0.0, rr_max = 0.0;
  for (const auto& pop : traj.populations) {
    ee_max = std::max(ee_max, pop[4]);
    rr_max = std::max(rr_max, pop[5]);
  }
  CHECK(ee_max > 0.0);
  CHECK(rr_max > 0.0);
  CHECK(ee_max < 0.05);
  CHECK(rr_max < 0.05);
}
