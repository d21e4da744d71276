// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0

#include "helpers.hpp"

using namespace phred;
using namespace phred::test;
using Catch::Approx;

namespace {

PortHamiltonianSystem small_ladder() {
  LadderParams p;
  p.n = 4;
  p.capacitance = {0.5, 0.25};
  p.inductance = {2.0, 4.0};
  p.resistance = {1.5, 0.7, 0.3};
  return build_ladder(p);
}

}  // namespace

TEST_CASE("minimal two-state system is accepted", "[core]") {
  Mat J(2, 2), R(2, 2), B(2, 1);
  J << 0, 1, -1, 0;
  R << 0, 0, 0, 1;
  B << 1, 0;
  PortHamiltonianSystem ph = build_ph(J, R, Mat(Mat::Identity(2, 2)), B);
  CHECK(ph.n() == 2);
  CHECK(ph.m() == 1);
  CHECK(passes_ph_invariants(structure_report(ph)));
}

TEST_CASE("indefinite energy matrix is rejected", "[core]") {
  Mat J = Mat::Zero(2, 2), R = Mat::Zero(2, 2), B = Mat::Ones(2, 1);
  Mat Q(2, 2);
  Q << 1.0, 0.0, 0.0, -0.1;
  try {
    build_ph(J, R, Q, B);
    FAIL("expected StructureViolation");
  } catch (const StructureViolation& e) {
    CHECK(e.kind() == StructureKind::pd);
  }
}

TEST_CASE("non-skew J and indefinite R are rejected", "[core]") {
  Mat I = Mat::Identity(2, 2), B = Mat::Ones(2, 1);
  Mat J(2, 2);
  J << 0, 1, 1, 0;
  CHECK_THROWS_AS(build_ph(J, Mat(Mat::Zero(2, 2)), I, B), StructureViolation);
  Mat R(2, 2);
  R << 1, 0, 0, -1;
  try {
    build_ph(Mat(Mat::Zero(2, 2)), R, I, B);
    FAIL("expected StructureViolation");
  } catch (const StructureViolation& e) {
    CHECK(e.kind() == StructureKind::psd);
  }
  CHECK_THROWS_AS(build_ph(Mat(Mat::Zero(2, 2)), Mat(Mat::Zero(2, 2)), I, Mat(Mat::Ones(3, 1))), StructureViolation);
}

TEST_CASE("identity energy matrix gives A = J - R", "[core]") {
  Mat J(3, 3), R = Mat::Zero(3, 3);
  J << 0, 2, -1, -2, 0, 3, 1, -3, 0;
  R(1, 1) = 0.5;
  R(2, 2) = 1.5;
  PortHamiltonianSystem ph = build_ph(J, R, Mat(Mat::Identity(3, 3)), Mat(Mat::Ones(3, 1)));
  StateSpaceSystem ss = ph_to_state_space(ph);
  CHECK((Mat(ss.A) - (J - R)).norm() == 0.0);
  CHECK((ss.C - ss.B.transpose()).norm() == 0.0);
}

TEST_CASE("ladder output matrix picks the first capacitor and the second inductor", "[core]") {
  StateSpaceSystem ss = ph_to_state_space(small_ladder());
  Mat expected = Mat::Zero(2, 4);
  expected(0, 0) = 1.0 / 0.5;
  expected(1, 3) = 1.0 / 4.0;
  CHECK((ss.C - expected).norm() <= 1e-15);
}

TEST_CASE("co-energy realization", "[core]") {
  SECTION("identity energy matrix reproduces the energy realization") {
    Mat J(2, 2), R(2, 2), B(2, 1);
    J << 0, 1, -1, 0;
    R << 0, 0, 0, 1;
    B << 1, 0;
    PortHamiltonianSystem ph = build_ph(J, R, Mat(Mat::Identity(2, 2)), B);
    StateSpaceSystem a = ph_to_state_space(ph), b = to_coenergy(ph);
    CHECK(Mat(a.A) == Mat(b.A));
    CHECK(a.B == b.B);
    CHECK(a.C == b.C);
  }
  SECTION("transfer function is coordinate independent") {
    PortHamiltonianSystem ph = small_ladder();
    StateSpaceSystem a = ph_to_state_space(ph), b = to_coenergy(ph);
    for (double w : logspace(1e-2, 1e2, 10)) {
      cplx s(0.1, w);
      CHECK(rel_diff(eval_transfer(b, s), dense_transfer(a, s)) <= 1e-10);
    }
  }
  SECTION("trajectories agree from consistent initial states") {
    PortHamiltonianSystem ph = small_ladder();
    Vec x0(4);
    x0 << 0.3, -0.2, 0.1, 0.4;
    SimOptions oa, ob;
    oa.x0 = x0;
    ob.x0 = ph.Q * x0;
    oa.rtol = ob.rtol = 1e-9;
    oa.atol = ob.atol = 1e-12;
    InputSignal u = make_signal(SignalKind::decaying_sinusoid);
    Trajectory ta = simulate(ph_to_state_space(ph), u, 10.0, oa);
    Trajectory tb = simulate(to_coenergy(ph), u, 10.0, ob);
    CHECK((ta.outputs - tb.outputs).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("state transforms", "[core]") {
  PortHamiltonianSystem ph = msd(6);
  SECTION("identity leaves the system unchanged") {
    PortHamiltonianSystem t = apply_state_transform(ph, make_state_transform(Mat::Identity(6, 6)));
    CHECK(Mat(t.J - ph.J).norm() == 0.0);
    CHECK(Mat(t.Q - ph.Q).norm() == 0.0);
    CHECK((t.B - ph.B).norm() == 0.0);
  }
  SECTION("a symmetric factor of Q gives identity energy") {
    Eigen::SelfAdjointEigenSolver<Mat> es{Mat(ph.Q)};
    Mat T = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    PortHamiltonianSystem t = apply_state_transform(ph, make_state_transform(T));
    CHECK((Mat(t.Q) - Mat::Identity(6, 6)).norm() <= 1e-12);
  }
  SECTION("orthogonal transform preserves the transfer function") {
    Eigen::HouseholderQR<Mat> qr(random_matrix(6, 6, 11));
    Mat T = qr.householderQ();
    StateSpaceSystem a = ph_to_state_space(ph);
    StateSpaceSystem b = ph_to_state_space(apply_state_transform(ph, make_state_transform(T)));
    for (double w : logspace(1e-2, 1e1, 10)) {
      cplx s(0.0, w);
      CHECK(rel_diff(eval_transfer(b, s), dense_transfer(a, s)) <= 1e-9);
    }
  }
  SECTION("singular transform is rejected") {
    Mat T = Mat::Identity(6, 6);
    T(5, 5) = 0.0;
    CHECK_THROWS_AS(make_state_transform(T), SingularTransform);
  }
}

TEST_CASE("transfer function evaluation", "[core]") {
  SECTION("scalar system at zero") {
    CMat g = eval_transfer(scalar_system(), cplx(0.0, 0.0));
    CHECK(g(0, 0).real() == Approx(1.0).margin(1e-15));
    CHECK(std::abs(g(0, 0).imag()) <= 1e-15);
  }
  SECTION("matches a dense inverse") {
    StateSpaceSystem ss = ph_to_state_space(msd(6));
    CHECK(rel_diff(eval_transfer(ss, cplx(0.0, 1.0)), dense_transfer(ss, cplx(0.0, 1.0))) <= 1e-12);
  }
  SECTION("singular at an eigenvalue") {
    CHECK_THROWS_AS(eval_transfer(scalar_system(), cplx(-1.0, 0.0)), SingularPencil);
  }
  SECTION("derivative of 1/(s+1)") {
    CMat d = eval_transfer_derivative(scalar_system(), cplx(1.0, 0.0));
    CHECK(d(0, 0).real() == Approx(-0.25).epsilon(1e-14));
  }
}

TEST_CASE("power balance", "[core]") {
  PortHamiltonianSystem ph = msd(6);
  SECTION("zero state") {
    PowerBalance p = power_balance(ph, Vec::Zero(6), Vec::Ones(2));
    CHECK(p.H == 0.0);
    CHECK(p.supplied == 0.0);
    CHECK(p.dissipated == 0.0);
  }
  SECTION("positive energy for nonzero states") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Vec x = random_matrix(6, 1, seed);
      CHECK(power_balance(ph, x, Vec::Zero(2)).H > 0.0);
      CHECK(power_balance(ph, x, Vec::Zero(2)).dissipated >= 0.0);
    }
  }
  SECTION("lossless system dissipates nothing") {
    Mat J(2, 2);
    J << 0, 1, -1, 0;
    PortHamiltonianSystem lossless = build_ph(J, Mat(Mat::Zero(2, 2)), Mat(Mat::Identity(2, 2)), Mat(Mat::Ones(2, 1)));
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
      CHECK(power_balance(lossless, random_matrix(2, 1, seed), Vec::Ones(1)).dissipated == 0.0);
  }
  SECTION("dimension mismatch") { CHECK_THROWS_AS(power_balance(ph, Vec::Zero(5), Vec::Zero(2)), DimensionMismatch); }
}

TEST_CASE("interpolation data closure", "[core]") {
  CVec b(1);
  b << cplx(1.0, 0.0);
  SECTION("unpaired complex point is rejected") {
    CHECK_THROWS_AS(make_interpolation_data({cplx(1.0, 1.0)}, {b}, Closure::check), NotConjugateClosed);
  }
  SECTION("enforce snaps near-conjugate pairs") {
    InterpolationData d =
        make_interpolation_data({cplx(1.0, 1.0), cplx(1.0 + 1e-14, -1.0)}, {b, b}, Closure::enforce);
    REQUIRE(d.size() == 2);
    CHECK(d.points[1] == std::conj(d.points[0]));
    CHECK(d.partner[0] == 1);
  }
  SECTION("coincident points are rejected") {
    CHECK_THROWS_AS(make_interpolation_data({cplx(1.0, 0.0), cplx(1.0, 0.0)}, {b, b}, Closure::check),
                    CoincidentPoints);
  }
}

TEST_CASE("structure report on a large sparse system stays sparse", "[core]") {
  StructureReport rep = structure_report(msd(20000));
  CHECK_FALSE(rep.dense);
  CHECK(std::isnan(rep.abscissa));
  CHECK(passes_ph_invariants(rep));
}
