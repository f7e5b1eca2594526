#include "doctest.h"

#include <numbers>

#include "test_support.hpp"
#include "zeno/errors.hpp"
#include "zeno/linalg.hpp"

using namespace zeno;
using namespace zeno::testing;

TEST_CASE("adjoint") {
    CHECK(max_abs(adjoint(Operator::Identity(2, 2)) - Operator::Identity(2, 2)) == 0.0);
    CHECK(max_abs(adjoint(pauli_y()) - pauli_y()) == 0.0);
    Operator raising(2, 2);
    raising << 0, 1, 0, 0;
    Operator lowering(2, 2);
    lowering << 0, 0, 1, 0;
    CHECK(max_abs(adjoint(raising) - lowering) == 0.0);
}

TEST_CASE("commutator") {
    CHECK(max_abs(commutator(pauli_x(), pauli_z()) - (-2.0 * kI) * pauli_y()) == 0.0);
    CHECK(max_abs(commutator(pauli_y(), pauli_y())) == 0.0);

    // diag(1,0) sx = [[0,1],[0,0]], sx diag(1,0) = [[0,0],[1,0]]
    Operator expected(2, 2);
    expected << 0, 1, -1, 0;
    CHECK(max_abs(commutator(diag({1, 0}), pauli_x()) - expected) == 0.0);

    CHECK_THROWS_AS(commutator(Operator::Identity(2, 2), Operator::Identity(3, 3)), ValidationError);
}

TEST_CASE("commutator adjoint identity on random inputs") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index d = 1 + trial % 6;
        Operator a(d, d), b(d, d);
        for (Eigen::Index i = 0; i < d * d; ++i) {
            a(i) = Complex(normal(rng), normal(rng));
            b(i) = Complex(normal(rng), normal(rng));
        }
        // [b^dagger, a^dagger]^dagger = [a, b] and [a^dagger, b^dagger]^dagger = -[a, b]
        CHECK(max_abs(commutator(a, b) - adjoint(commutator(adjoint(b), adjoint(a)))) < 1e-12);
        CHECK(max_abs(commutator(a, b) + adjoint(commutator(adjoint(a), adjoint(b)))) < 1e-12);
    }
}

TEST_CASE("expm_skew_hermitian closed forms") {
    const Operator half_turn = expm_skew_hermitian(pauli_x(), std::numbers::pi / 2);
    CHECK(max_abs(half_turn - (-kI) * pauli_x()) < 1e-15);

    std::mt19937_64 rng(1);
    CHECK(max_abs(expm_skew_hermitian(random_hermitian(4, rng), 0.0) - Operator::Identity(4, 4)) == 0.0);

    const Operator d = expm_skew_hermitian(diag({1, 2}), 0.3);
    CHECK(max_abs(d - diag({std::polar(1.0, -0.3), std::polar(1.0, -0.6)})) < 1e-15);

    Operator skew(2, 2);
    skew << 0, 1, 0, 0;
    CHECK_THROWS_AS(expm_skew_hermitian(skew, 0.1), ValidationError);
}

TEST_CASE("expm_skew_hermitian matches Taylor oracle, is unitary, and is a semigroup") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> times(-2.0, 2.0);
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::Index d = 1 + trial % 8;
        const Operator h = random_hermitian(d, rng);
        const double dt1 = times(rng);
        const double dt2 = times(rng);
        const Operator u1 = expm_skew_hermitian(h, dt1);
        const Operator u2 = expm_skew_hermitian(h, dt2);
        CHECK(unitarity_residual(u1) < 1e-10);
        CHECK(max_abs(u1 * u2 - expm_skew_hermitian(h, dt1 + dt2)) < 1e-9);
        CHECK(max_abs(u1 - taylor_expm(-kI * dt1 * h)) < 1e-10);
    }
}

TEST_CASE("is_projector") {
    const auto two = is_projector(diag({1, 1, 0}), 1e-10);
    CHECK(two.ok);
    CHECK(two.rank == 2);

    CHECK_FALSE(is_projector(pauli_x(), 1e-10).ok);

    const Operator plus = 0.5 * (Operator::Identity(2, 2) + pauli_x());
    CHECK(max_abs(plus * plus - plus) == 0.0);
    const auto one = is_projector(plus, 1e-10);
    CHECK(one.ok);
    CHECK(one.rank == 1);

    // Hermitian and close to idempotent, but the trace is far from an integer.
    CHECK_FALSE(is_projector(diag({1, 0.5}), 1.0).ok);
}

TEST_CASE("Projector and StateVector validation") {
    CHECK_THROWS_AS(Projector{pauli_x()}, ValidationError);
    CHECK_THROWS_AS(Projector{Operator::Zero(2, 3)}, ValidationError);
    CHECK_THROWS_AS(StateVector{vec({1, 1})}, ValidationError);
    CHECK_NOTHROW(StateVector(vec({1, 0})));
    CHECK(Projector::diagonal(3, 2).rank() == 2);
    CHECK(Projector::diagonal(3, 2).complement().rank() == 1);
    CHECK(eigen_rank(Projector::diagonal(5, 3).op()) == 3);
}

TEST_CASE("top eigenvector phase convention") {
    const Amplitudes v = vec({std::polar(0.6, 1.0), std::polar(0.8, -2.0)});
    const Projector e(v * v.adjoint());
    const StateVector top = e.top_eigenvector();
    CHECK(top[1].imag() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(top[1].real() == doctest::Approx(0.8));
    CHECK(max_abs(top.outer() - e.op()) < 1e-14);
}

TEST_CASE("project_and_renormalize") {
    const Projector e = Projector::diagonal(2, 1);

    const Measurement eigen = project_and_renormalize(e, StateVector(vec({1, 0})));
    CHECK(eigen.probability == 1.0);
    CHECK((eigen.state.amplitudes() - vec({1, 0})).norm() == 0.0);

    CHECK_THROWS_AS(project_and_renormalize(e, StateVector(vec({0, 1}))), ImpossibleOutcome);

    const double r = 1.0 / std::sqrt(2.0);
    const Measurement half = project_and_renormalize(e, StateVector(vec({r, r})));
    CHECK(half.probability == doctest::Approx(0.5).epsilon(1e-15));
    CHECK((half.state.amplitudes() - vec({1, 0})).norm() < 1e-15);
}

TEST_CASE("project_and_renormalize matches <psi|E|psi> on random inputs") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index d = 2 + trial % 6;
        const Operator h = random_hermitian(d, rng);
        Eigen::SelfAdjointEigenSolver<Operator> eig(h);
        const int rank = 1 + trial % static_cast<int>(d - 1);
        const Operator basis = eig.eigenvectors().leftCols(rank);
        const Projector e(hermitian_part(basis * basis.adjoint()));
        const StateVector psi = StateVector::normalized(random_vector(d, rng));
        const Measurement m = project_and_renormalize(e, psi);
        const double expectation = psi.amplitudes().dot(e.op() * psi.amplitudes()).real();
        CHECK(std::abs(m.probability - expectation) < 1e-12);
        CHECK(m.state.norm_residual() < 1e-12);
        CHECK(m.probability >= 0.0);
        CHECK(m.probability <= 1.0 + 1e-12);
    }
}
