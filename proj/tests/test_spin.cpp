#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>

#include "nvberry/constants.hpp"
#include "nvberry/eigenstates.hpp"
#include "nvberry/spin.hpp"

using namespace nvberry;

namespace {

const complexd kI{0.0, 1.0};

std::mt19937_64 fixed_rng() { return std::mt19937_64{20260822ULL}; }

Orientation random_orientation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {std::acos(2.0 * u(rng) - 1.0), kTwoPi * u(rng)};
}

double max_abs(const Matrix3cd& m) { return m.cwiseAbs().maxCoeff(); }

double hermiticity_defect(const Matrix3cd& m) { return max_abs(m - m.adjoint().eval()); }

}  // namespace

TEST_CASE("ladder matrices obey the spin-1 algebra") {
  const auto& s = spin1_operators();
  const double r = 1.0 / std::sqrt(2.0);

  Matrix3cd sz_expected = Matrix3cd::Zero();
  sz_expected(0, 0) = 1.0;
  sz_expected(2, 2) = -1.0;
  CHECK(max_abs(s.sz - sz_expected) == 0.0);

  CHECK(std::abs(s.sx(0, 1) - complexd{r, 0.0}) < 1e-16);
  CHECK(std::abs(s.sx(1, 2) - complexd{r, 0.0}) < 1e-16);
  CHECK(std::abs(s.sx(0, 2)) == 0.0);
  CHECK(std::abs(s.sy(0, 1) + kI * r) < 1e-16);
  CHECK(std::abs(s.sy(1, 0) - kI * r) < 1e-16);

  CHECK(hermiticity_defect(s.sx) == 0.0);
  CHECK(hermiticity_defect(s.sy) == 0.0);
  CHECK(hermiticity_defect(s.sz) == 0.0);

  CHECK(max_abs(s.sx * s.sy - s.sy * s.sx - kI * s.sz) < 1e-15);
  CHECK(max_abs(s.sy * s.sz - s.sz * s.sy - kI * s.sx) < 1e-15);
  CHECK(max_abs(s.sz * s.sx - s.sx * s.sz - kI * s.sy) < 1e-15);

  Matrix3cd casimir = s.sx * s.sx + s.sy * s.sy + s.sz * s.sz;
  CHECK(max_abs(casimir - 2.0 * Matrix3cd::Identity()) < 1e-15);
}

TEST_CASE("zero-field term reproduces closed forms at reference orientations") {
  PhysicalConstants c;
  const double d = c.zero_field_splitting;

  SpinOperator aligned = zero_field_hamiltonian({0.0, 0.0}, c);
  Matrix3cd expected = Matrix3cd::Zero();
  expected(0, 0) = d;
  expected(2, 2) = d;
  CHECK(max_abs(aligned.matrix - expected) <= 1e-15 * d);
  CHECK(aligned.basis == Basis::lab());

  SpinOperator equatorial = zero_field_hamiltonian({kPi / 2.0, 0.0}, c);
  CHECK(std::abs(equatorial.matrix(0, 0) - 0.5 * d) < 1e-15 * d);
  CHECK(std::abs(equatorial.matrix(0, 2) - 0.5 * d) < 1e-15 * d);
  CHECK(std::abs(equatorial.matrix(1, 1) - d) < 1e-15 * d);
  CHECK(std::abs(equatorial.matrix(0, 1)) < 1e-15 * d);
}

TEST_CASE("zero-field spectrum is {0, D, D} at every orientation") {
  PhysicalConstants c;
  const double d = c.zero_field_splitting;
  auto rng = fixed_rng();

  double worst_eig = 0.0, worst_herm = 0.0, worst_period = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Orientation o = random_orientation(rng);
    SpinOperator h = zero_field_hamiltonian(o, c);
    worst_herm = std::max(worst_herm, hermiticity_defect(h.matrix));

    Eigen::SelfAdjointEigenSolver<Matrix3cd> es(h.matrix);
    REQUIRE(es.info() == Eigen::Success);
    worst_eig = std::max(worst_eig, std::abs(es.eigenvalues()(0)));
    worst_eig = std::max(worst_eig, std::abs(es.eigenvalues()(1) - d));
    worst_eig = std::max(worst_eig, std::abs(es.eigenvalues()(2) - d));

    SpinOperator shifted = zero_field_hamiltonian({o.theta, o.phi + kTwoPi}, c);
    worst_period = std::max(worst_period, max_abs(h.matrix - shifted.matrix));
  }
  CHECK(worst_eig < 1e-10 * d);
  CHECK(worst_herm < 1e-12 * d);
  CHECK(worst_period < 1e-9 * d);

  SpinOperator sample = zero_field_hamiltonian(random_orientation(rng), c);
  CHECK(sample.is_hermitian(1e-12 * d));
}

TEST_CASE("static field term is the linear Zeeman coupling") {
  PhysicalConstants c;
  const double gamma = c.gamma();
  const double b0 = 1e-3;

  CHECK(max_abs(zeeman_hamiltonian({Vector3d::Zero()}, c).matrix) == 0.0);

  SpinOperator axial = zeeman_hamiltonian({{0.0, 0.0, b0}}, c);
  CHECK(std::abs(axial.matrix(0, 0) - gamma * b0) < 1e-15 * gamma * b0);
  CHECK(std::abs(axial.matrix(2, 2) + gamma * b0) < 1e-15 * gamma * b0);
  CHECK(std::abs(axial.matrix(1, 1)) == 0.0);
  CHECK(std::abs(axial.matrix(0, 1)) == 0.0);

  SpinOperator transverse = zeeman_hamiltonian({{b0, 0.0, 0.0}}, c);
  Eigen::SelfAdjointEigenSolver<Matrix3cd> es(transverse.matrix);
  REQUIRE(es.info() == Eigen::Success);
  CHECK(std::abs(es.eigenvalues()(0) + gamma * b0) < 1e-10 * gamma * b0);
  CHECK(std::abs(es.eigenvalues()(1)) < 1e-10 * gamma * b0);
  CHECK(std::abs(es.eigenvalues()(2) - gamma * b0) < 1e-10 * gamma * b0);
  CHECK(hermiticity_defect(transverse.matrix) < 1e-12 * gamma * b0);
}

TEST_CASE("drive term couples the axis levels through the lab z component") {
  PhysicalConstants c;
  const double b_r = 1e-4;
  const double omega = c.zero_field_splitting;
  const double scale = c.gamma() * b_r;

  SUBCASE("perpendicular axis, secular part dropped") {
    SpinOperator h = interaction_hamiltonian(b_r, omega, 0.0, {kPi / 2.0, 0.0}, c, true);
    CHECK(std::abs(std::abs(h.matrix(0, 1)) - scale / std::sqrt(2.0)) < 1e-12 * scale);
    CHECK(std::abs(std::abs(h.matrix(1, 2)) - scale / std::sqrt(2.0)) < 1e-12 * scale);
    CHECK(std::abs(h.matrix(0, 0)) == 0.0);
    CHECK(std::abs(h.matrix(2, 2)) == 0.0);
    CHECK(std::abs(h.matrix(0, 2)) == 0.0);
    CHECK(std::abs(h.matrix(2, 0)) == 0.0);
    CHECK(h.basis == Basis::nv_prime({kPi / 2.0, 0.0}));
  }

  SUBCASE("aligned axis leaves only the level shift") {
    SpinOperator secular = interaction_hamiltonian(b_r, omega, 0.0, {0.0, 0.0}, c, true);
    CHECK(max_abs(secular.matrix) == 0.0);

    SpinOperator full = interaction_hamiltonian(b_r, omega, 0.0, {0.0, 0.0}, c, false);
    CHECK(std::abs(full.matrix(0, 0) - scale) < 1e-12 * scale);
    CHECK(std::abs(full.matrix(2, 2) + scale) < 1e-12 * scale);
    CHECK(std::abs(full.matrix(0, 1)) == 0.0);
  }

  SUBCASE("coupling phase tracks the azimuth") {
    Orientation o{kPi / 3.0, kPi / 4.0};
    SpinOperator h = interaction_hamiltonian(b_r, omega, 0.0, o, c, false);
    CHECK(hermiticity_defect(h.matrix) < 1e-12 * scale);
    CHECK(std::abs(std::arg(h.matrix(0, 1)) - kPi / 4.0) < 1e-12);
    CHECK(std::abs(std::arg(h.matrix(1, 2)) - kPi / 4.0) < 1e-12);
    CHECK(std::abs(std::abs(h.matrix(0, 1)) - scale * std::sin(kPi / 3.0) / std::sqrt(2.0)) <
          1e-12 * scale);
    CHECK(std::abs(h.matrix(1, 0) - std::conj(h.matrix(0, 1))) < 1e-15 * scale);
  }

  SUBCASE("carrier oscillation multiplies the whole matrix") {
    Orientation o{kPi / 3.0, 0.3};
    const double w = 1e6, t = 1.0e-6;
    SpinOperator at_zero = interaction_hamiltonian(b_r, w, 0.0, o, c, false);
    SpinOperator at_t = interaction_hamiltonian(b_r, w, t, o, c, false);
    CHECK(max_abs(at_t.matrix - std::cos(w * t) * at_zero.matrix) < 1e-12 * scale);
  }

  SUBCASE("coupling magnitude scales as sin(theta)") {
    for (double theta : {0.2, 0.7, 1.3, 2.0, 2.9}) {
      SpinOperator h = interaction_hamiltonian(b_r, omega, 0.0, {theta, 1.1}, c, false);
      CHECK(std::abs(std::abs(h.matrix(0, 1)) - scale * std::sin(theta) / std::sqrt(2.0)) <
            1e-12 * scale);
    }
  }

  SUBCASE("secular approximation is refused when the drive is too strong") {
    const double strong = 0.02;  // gamma * B_R / omega ~ 0.19
    CHECK_THROWS_AS(
        interaction_hamiltonian(strong, kTwoPi * 2.88e9, 0.0, {kPi / 2.0, 0.0}, c, true),
        ApproximationInvalid);
    CHECK_NOTHROW(
        interaction_hamiltonian(strong, kTwoPi * 2.88e9, 0.0, {kPi / 2.0, 0.0}, c, false));
  }
}

TEST_CASE("drive matrix agrees with conjugating lab S_z into the axis eigenbasis") {
  PhysicalConstants c;
  const double b_r = 1e-4;
  const double scale = c.gamma() * b_r;
  const auto& s = spin1_operators();
  auto rng = fixed_rng();

  for (int trial = 0; trial < 200; ++trial) {
    Orientation o = random_orientation(rng);
    Matrix3cd v = eigenbasis(o, GaugeChoice::Raw);
    Matrix3cd a = scale * (v.adjoint() * s.sz * v);
    Matrix3cd h = interaction_hamiltonian(b_r, c.zero_field_splitting, 0.0, o, c, false).matrix;

    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(h(i, i).real() - a(i, i).real()) < 1e-12 * scale);
      CHECK(std::abs(h(i, i).imag()) < 1e-12 * scale);
      for (int j = 0; j < 3; ++j)
        CHECK(std::abs(std::abs(h(i, j)) - std::abs(a(i, j))) < 1e-12 * scale);
    }
    CHECK(std::abs(a(0, 2)) < 1e-13 * scale);
    CHECK(std::abs(h(0, 2)) == 0.0);
  }
}

TEST_CASE("state and operator plumbing") {
  SpinState up{{1.0, 0.0, 0.0}, Basis::lab()};
  SpinState mid{{0.0, 1.0, 0.0}, Basis::lab()};
  SpinState tilted{{1.0, 0.0, 0.0}, Basis::nv_prime({0.3, 0.1})};

  SUBCASE("overlap conjugates its left argument") {
    SpinState a{{complexd{0.6, 0.2}, complexd{0.1, -0.5}, complexd{0.3, 0.4}}, Basis::lab()};
    SpinState b{{complexd{0.2, -0.1}, complexd{0.7, 0.3}, complexd{-0.2, 0.5}}, Basis::lab()};
    CHECK(std::abs(overlap(a, b) - std::conj(overlap(b, a))) < 1e-15);
    CHECK(std::abs(overlap(a, a).imag()) < 1e-15);
  }

  SUBCASE("mixed basis tags are refused") {
    const auto& s = spin1_operators();
    SpinOperator lab_op{s.sz, Basis::lab()};
    SpinOperator tilted_op{s.sz, Basis::nv_prime({0.3, 0.1})};
    CHECK_THROWS_AS((void)overlap(up, tilted), BasisMismatch);
    CHECK_THROWS_AS((void)apply(tilted_op, up), BasisMismatch);
    CHECK_THROWS_AS((void)expectation(lab_op, tilted), BasisMismatch);
    CHECK_NOTHROW((void)expectation(lab_op, mid));
  }

  SUBCASE("expectation of S_z picks out the level label") {
    const auto& s = spin1_operators();
    SpinOperator sz_op{s.sz, Basis::lab()};
    CHECK(expectation(sz_op, up) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(expectation(sz_op, mid) == doctest::Approx(0.0).epsilon(1e-14));
  }

  SUBCASE("normalizing the null state is an error") {
    SpinState null_state{Vector3cd::Zero(), Basis::lab()};
    CHECK_THROWS_AS((void)null_state.normalized(), ValidationError);
    SpinState stretched{{3.0, 0.0, 4.0}, Basis::lab()};
    CHECK(stretched.normalized().norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}
