// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0

#include "helpers.hpp"

using namespace phred;
using namespace phred::test;

namespace {

// five spread conjugate pairs for the hundred-state chain
InterpolationData msd_pairs(const StateSpaceSystem& sys) {
  std::vector<cplx> pts;
  for (int k = 0; k < 5; ++k) {
    cplx s(0.05 * std::pow(3.0, k), 0.3 + 0.4 * k);
    pts.push_back(s);
    pts.push_back(std::conj(s));
  }
  return init_from_points(sys, pts);
}

Mat reduced_dense_A(const StateSpaceSystem& red) { return Mat(red.E).lu().solve(Mat(red.A)); }

}  // namespace

TEST_CASE("tangential basis columns", "[reduction]") {
  SECTION("scalar system") {
    CVec b(1);
    b << 1.0;
    TangentialBasis tb = tangential_basis(scalar_system(), make_interpolation_data({cplx(1.0, 0.0)}, {b}));
    CHECK(std::abs(tb.columns(0, 0) - cplx(0.5, 0.0)) <= 1e-15);
  }
  SECTION("defining equation holds on the hundred-state chain") {
    StateSpaceSystem sys = ph_to_state_space(msd(100));
    InterpolationData data = default_init(sys, 4, 1e-3, 1e-1);
    TangentialBasis tb = tangential_basis(sys, data);
    for (Index i = 0; i < 4; ++i) {
      const cplx s = data.points[static_cast<std::size_t>(i)];
      CVec Bb = sys.B.cast<cplx>() * data.directions[static_cast<std::size_t>(i)];
      CVec res = s * tb.columns.col(i) - Mat(sys.A).cast<cplx>() * tb.columns.col(i) - Bb;
      CHECK(res.norm() / Bb.norm() <= 1e-10);
    }
  }
  SECTION("conjugate points give conjugate columns") {
    StateSpaceSystem sys = ph_to_state_space(msd(20));
    InterpolationData data = init_from_points(sys, {cplx(0.2, 0.5), cplx(0.2, -0.5)});
    TangentialBasis tb = tangential_basis(sys, data);
    CHECK((tb.columns.col(0) - tb.columns.col(1).conjugate()).norm() == 0.0);
  }
}

TEST_CASE("Hermite tangential basis", "[reduction]") {
  CVec b(1);
  b << 1.0;
  InterpolationData one = make_interpolation_data({cplx(1.0, 0.0)}, {b});
  SECTION("order one equals the plain basis") {
    StateSpaceSystem sys = ph_to_state_space(msd(20));
    InterpolationData data = default_init(sys, 3, 1e-2, 1e0);
    CHECK((tangential_basis(sys, data, std::vector<int>{1, 1, 1}).columns - tangential_basis(sys, data).columns)
              .norm() == 0.0);
  }
  SECTION("scalar recurrence") {
    TangentialBasis tb = tangential_basis(scalar_system(), one, std::vector<int>{2});
    REQUIRE(tb.columns.cols() == 2);
    CHECK(std::abs(tb.columns(0, 0) - 0.5) <= 1e-15);
    CHECK(std::abs(tb.columns(0, 1) - 0.25) <= 1e-15);
  }
  SECTION("reduced model matches the derivative") {
    StateSpaceSystem sys = ph_to_state_space(msd(100));
    const cplx s0(0.3, 0.8);
    InterpolationData data = init_from_points(sys, {s0, std::conj(s0)});
    Mat V = realify(tangential_basis(sys, data, std::vector<int>{2, 2})).columns;
    StateSpaceSystem red = petrov_galerkin_reduce(sys, V, V);
    const CVec& bd = data.directions[0];
    const double h = 1e-5 * std::abs(s0);
    CVec fd = (eval_transfer(sys, s0 + h) - eval_transfer(sys, s0 - h)) * bd / (2.0 * h);
    CHECK((eval_transfer_derivative(red, s0) * bd - fd).norm() / fd.norm() <= 1e-6);
  }
}

TEST_CASE("real basis from complex columns", "[reduction]") {
  SECTION("real points give an orthonormal basis of the same span") {
    StateSpaceSystem sys = ph_to_state_space(msd(20));
    InterpolationData data = default_init(sys, 3, 1e-1, 1e0);
    TangentialBasis tb = tangential_basis(sys, data);
    Mat V = realify(tb).columns;
    CHECK((V.transpose() * V - Mat::Identity(3, 3)).norm() <= 1e-12);
    Mat raw = tb.columns.real();
    Mat Q = Eigen::HouseholderQR<Mat>(raw).householderQ() * Mat::Identity(20, 3);
    CHECK(largest_principal_angle(V, Q) <= 1e-10);
  }
  SECTION("a conjugate pair spans its real and imaginary parts") {
    StateSpaceSystem sys = ph_to_state_space(msd(20));
    InterpolationData data = init_from_points(sys, {cplx(0.2, 0.5), cplx(0.2, -0.5)});
    TangentialBasis tb = tangential_basis(sys, data);
    Mat V = realify(tb).columns;
    Mat ref(20, 2);
    ref.col(0) = tb.columns.col(0).real();
    ref.col(1) = tb.columns.col(0).imag();
    Eigen::JacobiSVD<Mat> svd(ref, Eigen::ComputeThinU);
    CHECK(largest_principal_angle(V, svd.matrixU()) <= 1e-10);
  }
  SECTION("duplicated column is rank deficient") {
    StateSpaceSystem sys = ph_to_state_space(msd(20));
    InterpolationData data = default_init(sys, 2, 1e-1, 1e0);
    TangentialBasis tb = tangential_basis(sys, data);
    tb.columns.col(1) = tb.columns.col(0);
    CHECK_THROWS_AS(realify(tb), RankDeficient);
  }
}

TEST_CASE("Petrov-Galerkin projection", "[reduction]") {
  StateSpaceSystem sys = ph_to_state_space(msd(20));
  SECTION("full orthogonal basis is a similarity") {
    Mat V = Eigen::HouseholderQR<Mat>(random_matrix(20, 20, 3)).householderQ();
    StateSpaceSystem red = petrov_galerkin_reduce(sys, V, V);
    CHECK(spectrum_distance(reduced_dense_A(red), Mat(sys.A)) <= 1e-10);
  }
  InterpolationData data = init_from_points(sys, {cplx(0.1, 0.0), cplx(0.3, 0.6), cplx(0.3, -0.6), cplx(2.0, 0.0)});
  Mat V = realify(tangential_basis(sys, data)).columns;
  SECTION("one-sided projection interpolates") {
    for (double r : interpolation_residuals(sys, petrov_galerkin_reduce(sys, V, V), data)) CHECK(r <= 1e-8);
  }
  SECTION("any full-rank left basis interpolates") {
    Mat W = random_matrix(20, 4, 5);
    for (double r : interpolation_residuals(sys, petrov_galerkin_reduce(sys, V, W), data)) CHECK(r <= 1e-8);
  }
}

TEST_CASE("structure-preserving interpolatory reduction", "[reduction]") {
  PortHamiltonianSystem ph = msd(100);
  StateSpaceSystem sys = ph_to_state_space(ph);
  InterpolationData data = msd_pairs(sys);
  PortHamiltonianSystem red = ph_structure_reduce(ph, data);
  SECTION("interpolates at every point") {
    REQUIRE(red.n() == 10);
    for (double r : interpolation_residuals(sys, ph_to_state_space(red), data)) CHECK(r <= 1e-8);
  }
  SECTION("keeps the port-Hamiltonian structure") {
    StructureReport rep = structure_report(red);
    CHECK(passes_ph_invariants(rep));
    CHECK(rep.abscissa < 0.0);
  }
  SECTION("full order reproduces the transfer function") {
    PortHamiltonianSystem small = msd(6);
    StateSpaceSystem s6 = ph_to_state_space(small);
    InterpolationData d6 = init_from_points(s6, {cplx(0.1, 0.0), cplx(0.5, 0.0), cplx(0.2, 1.0), cplx(0.2, -1.0),
                                                 cplx(1.0, 2.0), cplx(1.0, -2.0)});
    StateSpaceSystem r6 = ph_to_state_space(ph_structure_reduce(small, d6));
    for (double w : logspace(1e-2, 1e2, 20)) {
      cplx s(0.0, w);
      CHECK(rel_diff(eval_transfer(r6, s), dense_transfer(s6, s)) <= 1e-8);
    }
  }
  SECTION("residual check is sensitive to the direction") {
    StateSpaceSystem rs = ph_to_state_space(red);
    InterpolationData wrong = data;
    for (auto& b : wrong.directions) b = CVec(b.reverse().conjugate());
    CHECK(max_of(interpolation_residuals(sys, rs, wrong)) > 1e-3);
  }
  SECTION("residuals of the full model against itself vanish") {
    CHECK(max_of(interpolation_residuals(sys, sys, data)) <= 1e-14);
  }
}

TEST_CASE("tolerant reduction completes rank-deficient bases", "[reduction]") {
  PortHamiltonianSystem ph = msd(100);
  StateSpaceSystem sys = ph_to_state_space(ph);
  InterpolationData data = default_init(sys, 20, 1e-3, 1e-1);
  CHECK_THROWS_AS(ph_structure_reduce(ph, data), RankDeficient);
  ReduceOptions opt;
  opt.allow_rank_deficient = true;
  PhProjection proj = ph_structure_reduce_detailed(ph, data, opt);
  CHECK(proj.reduced.n() == 20);
  CHECK_FALSE(proj.warnings.empty());
  CHECK(passes_ph_invariants(structure_report(proj.reduced)));
}
