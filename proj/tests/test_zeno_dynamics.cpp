#include "doctest.h"

#include <cmath>
#include <numbers>

#include "test_support.hpp"
#include "zeno/errors.hpp"
#include "zeno/zeno_dynamics.hpp"

using namespace zeno;
using namespace zeno::testing;

namespace {

const double kPi = std::numbers::pi;

ProjectorPath dragging_path(double omega, double horizon = 1.0) {
    return ProjectorPath(Projector::diagonal(2, 1),
                         UnitaryGeneratorPath{HamiltonianPath::constant(0.5 * omega * pauli_y(), horizon)});
}

struct RandomScenario {
    HamiltonianPath h;
    ProjectorPath path;
    StateVector psi0;
};

RandomScenario random_scenario(std::uint64_t seed, Eigen::Index d, int rank) {
    std::mt19937_64 rng(seed);
    // unit-scale generators: spectral norms of order one
    auto h = HamiltonianPath::linear_combination({{random_hermitian_normed(d, rng, 1.0), Waveform::constant(1.0)},
                                                  {random_hermitian_normed(d, rng, 0.5), Waveform::sine(1.5, 0.2)}},
                                                 1.0);
    auto a = HamiltonianPath::linear_combination({{random_hermitian_normed(d, rng, 1.0), Waveform::constant(1.0)},
                                                  {random_hermitian_normed(d, rng, 0.5), Waveform::cosine(2.0)}},
                                                 1.0);
    const Projector base = Projector::diagonal(d, rank);
    Amplitudes psi = random_vector(d, rng);
    psi = base.op() * psi;
    return {std::move(h), ProjectorPath(base, UnitaryGeneratorPath{std::move(a)}), StateVector::normalized(psi)};
}

}  // namespace

TEST_CASE("effective_hamiltonian examples") {
    const auto frozen = effective_hamiltonian(HamiltonianPath::constant(pauli_x(), 1.0),
                                              ProjectorPath::constant(Projector::diagonal(2, 1), 1.0), 0.3);
    CHECK(max_abs(frozen.k) == 0.0);

    const auto commuting = effective_hamiltonian(HamiltonianPath::constant(pauli_z(), 1.0),
                                                 ProjectorPath::constant(Projector::diagonal(2, 1), 1.0), 0.3);
    CHECK(max_abs(commuting.k - diag({1, 0})) == 0.0);

    // dE/dt(0) = -i[A, E] = (omega/2) sigma_x, and i[(omega/2) sigma_x, diag(1,0)] = (omega/2) sigma_y.
    const double omega = 1.3;
    const auto moving = effective_hamiltonian(HamiltonianPath::zero(2, 1.0), dragging_path(omega), 0.0);
    CHECK(max_abs(moving.k - 0.5 * omega * pauli_y()) < 1e-15);
}

TEST_CASE("effective generator is Hermitian on random smooth scenarios") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Eigen::Index d = 2 + static_cast<Eigen::Index>(seed);
        const auto s = random_scenario(seed, d, 1 + static_cast<int>(seed % (d - 1)));
        const auto report = probe_hermiticity(s.h, s.path, 100);
        CHECK(report.max_residual <= 1e-9);
        CHECK(report.pass);
    }
}

TEST_CASE("integrate_constant") {
    const auto frozen = integrate_constant(HamiltonianPath::constant(pauli_x(), 1.0), Projector::diagonal(2, 1),
                                           StateVector(vec({1, 0})), 1.0, 1000);
    CHECK(frozen.size() == 1001);
    CHECK((frozen.final_state().amplitudes() - vec({1, 0})).norm() == 0.0);

    const double horizon = 1.7;
    const auto free = integrate_constant(HamiltonianPath::constant(pauli_z(), horizon), Projector::diagonal(2, 2),
                                         StateVector(vec({1, 0})), horizon, 100);
    CHECK((free.final_state().amplitudes() - vec({std::polar(1.0, -horizon), 0})).norm() < 1e-12);

    // Rank-2 block in d = 3: compare with the compressed 2x2 evolution embedded back.
    std::mt19937_64 rng(42);
    const Operator h = random_hermitian(3, rng);
    const Projector e = Projector::diagonal(3, 2);
    Amplitudes psi0 = random_vector(3, rng);
    psi0(2) = 0.0;
    const StateVector start = StateVector::normalized(psi0);
    const auto rec = integrate_constant(HamiltonianPath::constant(h, 1.0), e, start, 1.0, 1000);
    const Operator block = h.topLeftCorner(2, 2);
    for (std::size_t k = 0; k < rec.size(); k += 100) {
        Amplitudes expected = Amplitudes::Zero(3);
        expected.head(2) = taylor_expm(-kI * rec.times[k] * block) * start.amplitudes().head(2);
        CHECK((rec.states[k].amplitudes() - expected).norm() < 1e-8);
    }
    CHECK(rec.max_confinement_residual() <= 1e-8);
    CHECK(rec.max_norm_residual() <= 1e-8);

    CHECK_THROWS_AS(integrate_constant(HamiltonianPath::constant(pauli_x(), 1.0), Projector::diagonal(2, 1),
                                       StateVector(vec({0, 1})), 1.0, 10),
                    ValidationError);
    CHECK_THROWS_AS(integrate_constant(HamiltonianPath::constant(pauli_x(), 1.0), Projector::diagonal(2, 1),
                                       StateVector(vec({1, 0})), 1.0, 0),
                    ValidationError);
}

TEST_CASE("integrate_general reduces to integrate_constant for a constant path") {
    const auto s = random_scenario(9, 4, 2);
    const auto still = ProjectorPath::constant(s.path.base(), 1.0);
    const auto general = integrate_general(s.h, still, s.psi0, 1.0, 500);
    const auto constant = integrate_constant(s.h, s.path.base(), s.psi0, 1.0, 500);
    CHECK(max_state_gap(general, constant) <= 1e-12);

    const auto frame = integrate_rotating_frame(s.h, still, s.psi0, 1.0, 500);
    CHECK(max_state_gap(frame, constant) <= 1e-12);
}

TEST_CASE("dragging: psi psi^dagger follows a rank-1 path for any Hamiltonian") {
    const double horizon = 1.0;
    const auto path = dragging_path(kPi, horizon);
    const StateVector psi0 = path.base().top_eigenvector();
    const int steps = default_steps(horizon);

    const auto bare = integrate_general(HamiltonianPath::zero(2, horizon), path, psi0, horizon, steps);
    const auto driven = integrate_general(HamiltonianPath::constant(pauli_x(), horizon), path, psi0, horizon, steps);
    CHECK(check_dragging(bare, path, 1e-7).pass);
    CHECK(check_dragging(driven, path, 1e-7).pass);
    CHECK(check_confinement(bare, path, 1e-7).pass);
    CHECK(check_confinement(driven, path, 1e-7).pass);
    CHECK(bare.max_norm_residual() <= 1e-8);
    CHECK(driven.max_norm_residual() <= 1e-8);

    // Same ray, different phase: <psi_bare|psi_driven> has modulus 1 and a non-trivial argument.
    const Complex overlap = bare.final_state().amplitudes().dot(driven.final_state().amplitudes());
    CHECK(std::abs(overlap) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(std::abs(std::arg(overlap)) > 1e-2);

    // H = 0: psi_t = U_t psi_0 exactly.
    const Amplitudes expected = vec({std::cos(kPi / 2), std::sin(kPi / 2)});
    CHECK((bare.final_state().amplitudes() - expected).norm() < 1e-10);
}

TEST_CASE("rotating-frame route matches the effective dynamics") {
    const double horizon = 1.0;
    const int steps = default_steps(horizon);
    const auto path = dragging_path(kPi, horizon);
    const StateVector psi0 = path.base().top_eigenvector();
    const auto h0 = HamiltonianPath::zero(2, horizon);
    CHECK(max_state_gap(integrate_general(h0, path, psi0, horizon, steps),
                        integrate_rotating_frame(h0, path, psi0, horizon, steps)) <= 1e-6);

    const auto s = random_scenario(2718, 4, 2);
    const double gap = max_state_gap(integrate_general(s.h, s.path, s.psi0, 1.0, steps),
                                     integrate_rotating_frame(s.h, s.path, s.psi0, 1.0, steps));
    const auto fine_direct = integrate_general(s.h, s.path, s.psi0, 1.0, 2 * steps);
    const auto fine_frame = integrate_rotating_frame(s.h, s.path, s.psi0, 1.0, 2 * steps);
    const double fine_gap = (fine_direct.final_state().amplitudes() - fine_frame.final_state().amplitudes()).norm();
    MESSAGE("route gap " << gap << " -> " << fine_gap);
    CHECK(gap <= 1e-6);
    CHECK(gap / fine_gap >= 3.0);
    CHECK(check_confinement(fine_frame, s.path, 1e-7).pass);
}

TEST_CASE("check_confinement") {
    const auto path = ProjectorPath::constant(Projector::diagonal(2, 1), 1.0);
    auto rec = integrate_constant(HamiltonianPath::constant(pauli_x(), 1.0), path.base(), StateVector(vec({1, 0})),
                                  1.0, 100);
    CHECK(check_confinement(rec, path, 1e-12).max_residual <= 1e-12);

    rec.states[50] = StateVector(vec({0, 1}));
    const auto corrupted = check_confinement(rec, path, 1e-7);
    CHECK_FALSE(corrupted.pass);
    CHECK(corrupted.max_residual == doctest::Approx(1.0));
    CHECK(corrupted.worst_time == doctest::Approx(0.5));
}

TEST_CASE("dynamics depend only on the projector path, not on the frame rotation") {
    const double horizon = 1.0;
    const auto path = dragging_path(kPi, horizon);
    const auto gauged = path.gauge_transform(UnitaryGeneratorPath{
        HamiltonianPath::linear_combination({{diag({1, 0}), Waveform::cosine(4.0)}, {diag({0, 1}), Waveform::constant(0.7)}},
                                            horizon)});
    const StateVector psi0 = path.base().top_eigenvector();
    const auto h = HamiltonianPath::constant(pauli_x(), horizon);
    const auto a = integrate_general(h, path, psi0, horizon, 1000);
    const auto b = integrate_general(h, gauged, psi0, horizon, 1000);
    CHECK(max_state_gap(a, b) <= 1e-8);

    const auto s = random_scenario(31, 4, 2);
    std::mt19937_64 rng(5);
    Operator block = Operator::Zero(4, 4);
    block.topLeftCorner(2, 2) = random_hermitian(2, rng);
    block.bottomRightCorner(2, 2) = random_hermitian(2, rng);
    const auto gauged_random = s.path.gauge_transform(
        UnitaryGeneratorPath{HamiltonianPath::linear_combination({{block, Waveform::sine(3.0)}}, 1.0)});
    CHECK(max_state_gap(integrate_general(s.h, s.path, s.psi0, 1.0, 1000),
                        integrate_general(s.h, gauged_random, s.psi0, 1.0, 1000)) <= 1e-8);
}

TEST_CASE("norm and confinement over random smooth scenarios") {
    for (std::uint64_t seed = 100; seed < 104; ++seed) {
        const auto s = random_scenario(seed, 3 + static_cast<Eigen::Index>(seed % 3), 1 + static_cast<int>(seed % 2));
        const auto rec = integrate_general(s.h, s.path, s.psi0, 1.0, 1000);
        CHECK(rec.max_norm_residual() <= 1e-8);
        const auto report = check_confinement(rec, s.path, 1e-7);
        CHECK(report.pass);
        CHECK(rec.max_hermiticity_residual <= 1e-9);
    }
}
