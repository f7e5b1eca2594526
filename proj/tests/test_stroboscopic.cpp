#include "doctest.h"

#include <cmath>
#include <numbers>

#include "test_support.hpp"
#include "zeno/errors.hpp"
#include "zeno/stroboscopic.hpp"
#include "zeno/zeno_dynamics.hpp"

using namespace zeno;
using namespace zeno::testing;

namespace {

struct Setup {
    HamiltonianPath h;
    ProjectorPath path;
    StateVector psi0;
};

// E = diag(1,0) held fixed, H = sigma_x: each step survives with cos^2(T/n).
Setup frozen() {
    return {HamiltonianPath::constant(pauli_x(), 1.0), ProjectorPath::constant(Projector::diagonal(2, 1), 1.0),
            StateVector(vec({1, 0}))};
}

Setup dragging(HamiltonianPath h) {
    ProjectorPath path(Projector::diagonal(2, 1),
                       UnitaryGeneratorPath{HamiltonianPath::constant(0.5 * std::numbers::pi * pauli_y(), 1.0)});
    StateVector psi0 = path.base().top_eigenvector();
    return {std::move(h), std::move(path), std::move(psi0)};
}

}  // namespace

TEST_CASE("conditional survival matches (cos(T/n))^(2n)") {
    const auto s = frozen();
    // frozen values from the closed form
    const auto ten = run_conditional(s.h, s.path, s.psi0, 1.0, 10);
    CHECK(std::abs(ten.survival_probability - 0.90468622105867484) <= 1e-9);
    const auto hundred = run_conditional(s.h, s.path, s.psi0, 1.0, 100);
    CHECK(std::abs(hundred.survival_probability - 0.99004966873647583) <= 1e-9);

    for (const auto* run : {&ten, &hundred}) {
        double product = 1.0;
        for (double p : run->step_probabilities) {
            product *= p;
        }
        CHECK(std::abs(product - run->survival_probability) <= 1e-12 * product);
        for (const auto& state : run->conditional_states) {
            CHECK(state.norm_residual() <= 1e-10);
        }
        CHECK(run->times.back() == 1.0);
    }
}

TEST_CASE("commuting Hamiltonian never disturbs the measured state") {
    const auto path = ProjectorPath::constant(Projector::diagonal(3, 2), 1.0);
    const auto h = HamiltonianPath::constant(diag({0.3, -1.2, 2.0}), 1.0);
    const StateVector psi0 = StateVector::normalized(vec({1, kI, 0}));
    for (int n : {1, 7, 50}) {
        CHECK(std::abs(run_conditional(h, path, psi0, 1.0, n).survival_probability - 1.0) <= 1e-12);
        CHECK(run_sampled(h, path, psi0, 1.0, n, 1234 + n).all_ones());
    }
}

TEST_CASE("run_conditional errors") {
    const auto s = frozen();
    CHECK_THROWS_AS(run_conditional(s.h, s.path, StateVector(vec({0, 1})), 1.0, 10), ValidationError);
    CHECK_THROWS_AS(run_conditional(s.h, s.path, s.psi0, 1.0, 0), ValidationError);
    // A pi/2 rotation under sigma_x makes the single measurement at T impossible.
    const auto flip = HamiltonianPath::constant(pauli_x(), std::numbers::pi / 2);
    const auto still = ProjectorPath::constant(Projector::diagonal(2, 1), std::numbers::pi / 2);
    CHECK_THROWS_AS(run_conditional(flip, still, s.psi0, std::numbers::pi / 2, 1), ImpossibleOutcome);
}

TEST_CASE("sampled runs: determinism and Monte Carlo consistency") {
    const auto s = frozen();
    const auto a = run_sampled(s.h, s.path, s.psi0, 1.0, 10, 77);
    const auto b = run_sampled(s.h, s.path, s.psi0, 1.0, 10, 77);
    CHECK(a.outcomes == b.outcomes);
    CHECK(a.final_state().amplitudes() == b.final_state().amplitudes());
    CHECK(a.seed == std::optional<std::uint64_t>(77));

    std::vector<std::uint64_t> seeds(10000);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        seeds[i] = 1000 + i;
    }
    const double exact = run_conditional(s.h, s.path, s.psi0, 1.0, 10).survival_probability;
    const auto summary = run_ensemble(s.h, s.path, s.psi0, 1.0, 10, seeds);
    const double sigma = std::sqrt(exact * (1.0 - exact) / seeds.size());
    MESSAGE("all-1 frequency " << summary.frequency() << " vs " << exact << " (sigma " << sigma << ")");
    CHECK(std::abs(summary.frequency() - exact) <= 3.0 * sigma);
    CHECK(run_ensemble(s.h, s.path, s.psi0, 1.0, 10, seeds).all_one_runs == summary.all_one_runs);
}

TEST_CASE("sampled run starting outside the measured subspace") {
    const auto s = frozen();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto run = run_sampled(HamiltonianPath::zero(2, 1.0), s.path, StateVector(vec({0, 1})), 1.0, 5, seed);
        CHECK(run.outcomes.front() == 0);
        CHECK(run.step_probabilities.front() == 1.0);
    }
}

TEST_CASE("convergence sweep on the frozen scenario") {
    const auto s = frozen();
    const auto rows = convergence_sweep(s.h, s.path, s.psi0, 1.0, {10, 20, 40, 80});
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double ratio = rows[i - 1].one_minus_survival / rows[i].one_minus_survival;
        CHECK(ratio >= 1.8);
        CHECK(ratio <= 2.2);
    }
    const double first = rows.front().one_minus_survival * rows.front().n;
    for (const auto& row : rows) {
        CHECK(std::abs(row.one_minus_survival * row.n / first - 1.0) <= 0.1);
        CHECK(row.state_error <= 1e-12);
    }
    std::vector<int> n;
    std::vector<double> loss;
    for (const auto& row : rows) {
        n.push_back(row.n);
        loss.push_back(row.one_minus_survival);
    }
    const auto order = fit_order(n, loss);
    REQUIRE(order.has_value());
    CHECK(*order >= 0.9);
    CHECK(*order <= 1.1);

    CHECK_THROWS_AS(convergence_sweep(s.h, s.path, s.psi0, 1.0, {}), ValidationError);
    CHECK_THROWS_AS(convergence_sweep(s.h, s.path, s.psi0, 1.0, {20, 10}), ValidationError);
}

TEST_CASE("single measurement is one projection of the freely evolved state") {
    const auto s = dragging(HamiltonianPath::constant(pauli_x(), 1.0));
    const auto run = run_conditional(s.h, s.path, s.psi0, 1.0, 1);
    const Amplitudes free = taylor_expm(-kI * pauli_x()) * s.psi0.amplitudes();
    const Amplitudes projected = s.path.projector_at(1.0).op() * free;
    CHECK(run.survival_probability == doctest::Approx(projected.squaredNorm()).epsilon(1e-12));
    CHECK((run.final_state().amplitudes() - projected / projected.norm()).norm() < 1e-12);
}

TEST_CASE("stroboscopic states converge to the effective dynamics when dragging") {
    const std::vector<int> n_list{25, 50, 100, 200};

    const auto driven = dragging(HamiltonianPath::constant(pauli_x(), 1.0));
    const auto rows = convergence_sweep(driven.h, driven.path, driven.psi0, 1.0, n_list);
    std::vector<double> errors;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        errors.push_back(rows[i].state_error);
        if (i > 0) {
            CHECK(rows[i].state_error < rows[i - 1].state_error);
        }
    }
    const auto order = fit_order(n_list, errors);
    REQUIRE(order.has_value());
    MESSAGE("state-error order " << *order);
    CHECK(*order >= 0.9);

    // Without a Hamiltonian each projection carries the state exactly along the path.
    const auto bare = dragging(HamiltonianPath::zero(2, 1.0));
    for (const auto& row : convergence_sweep(bare.h, bare.path, bare.psi0, 1.0, n_list)) {
        CHECK(row.state_error <= 1e-10);
    }
}

TEST_CASE("micro-evolution refinement barely moves survival") {
    std::mt19937_64 rng(12);
    const auto h = HamiltonianPath::linear_combination(
        {{random_hermitian_normed(4, rng, 1.0), Waveform::constant(1.0)},
         {random_hermitian_normed(4, rng, 0.5), Waveform::sine(2.0)}},
        1.0);
    const ProjectorPath path(Projector::diagonal(4, 2),
                             UnitaryGeneratorPath{HamiltonianPath::constant(random_hermitian_normed(4, rng, 1.0), 1.0)});
    const StateVector psi0 = StateVector::normalized(vec({1, kI, 0, 0}));
    for (int n : {10, 100}) {
        const double coarse = run_conditional(h, path, psi0, 1.0, n, 10).survival_probability;
        const double fine = run_conditional(h, path, psi0, 1.0, n, 20).survival_probability;
        CHECK(std::abs(coarse - fine) < 1e-9);
    }
}

TEST_CASE("short-time factorization") {
    const Projector e = Projector::diagonal(2, 1);
    const StateVector up(vec({1, 0}));

    for (const auto& row : short_time_factorization_check(pauli_z(), e, up, {0.0, 0.01, 0.1, 1.0})) {
        CHECK(row.defect <= 1e-15);
    }

    // defect(dt) = 1 - cos(dt) for sigma_x; ratio at 0.01 / 0.005 is 3.99997500005.
    const auto rows = short_time_factorization_check(pauli_x(), e, up, {0.0, 0.01, 0.005});
    CHECK(rows[0].defect == 0.0);
    CHECK(rows[1].defect == doctest::Approx(4.999958333472222e-5).epsilon(1e-9));
    CHECK(rows[1].defect / rows[2].defect == doctest::Approx(3.9999750000520833).epsilon(1e-6));

    CHECK_THROWS_AS(short_time_factorization_check(pauli_x(), e, StateVector(vec({0, 1})), {0.1}), ValidationError);
}

TEST_CASE("fit_order") {
    CHECK_FALSE(fit_order({10}, {0.1}).has_value());
    CHECK(*fit_order({10, 20, 40}, {1.0, 0.25, 0.0625}) == doctest::Approx(2.0));
}
