#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "zeno/hamiltonian_path.hpp"
#include "zeno/linalg.hpp"
#include "zeno/projector_path.hpp"

namespace zeno {

inline constexpr int kDefaultMicroSubsteps = 10;

/// n projective measurements of E_{t_k}, t_k = k T / n, each preceded by
/// free evolution under H_t over [t_{k-1}, t_k] in micro_substeps
/// magnus4_step exponentials. No measurement at t = 0.
struct StroboscopicRun {
    int n = 0;
    /// Product of the per-step probabilities of the recorded outcomes. For
    /// conditional runs this is the survival probability of the all-1 record.
    double survival_probability = 1.0;
    double log_survival = 0.0;
    std::vector<double> times;
    std::vector<double> step_probabilities;
    std::vector<StateVector> conditional_states;
    std::vector<int> outcomes;  // sampled runs only
    std::optional<std::uint64_t> seed;

    bool all_ones() const;
    const StateVector& final_state() const { return conditional_states.back(); }
};

/// Conditions on outcome 1 at every measurement. Requires E_0 psi0 = psi0 and
/// throws ImpossibleOutcome when a step probability drops below the floor.
StroboscopicRun run_conditional(const HamiltonianPath& hpath, const ProjectorPath& ppath, const StateVector& psi0,
                                double horizon, int n, int micro_substeps = kDefaultMicroSubsteps);

/// Draws each outcome with its Born probability from a 64-bit Mersenne
/// Twister seeded with `seed`; outcome 0 continues in the range of I - E_t.
/// The initial state is not required to lie in the range of E_0.
StroboscopicRun run_sampled(const HamiltonianPath& hpath, const ProjectorPath& ppath, const StateVector& psi0,
                            double horizon, int n, std::uint64_t seed, int micro_substeps = kDefaultMicroSubsteps);

struct EnsembleSummary {
    std::size_t runs = 0;
    std::size_t all_one_runs = 0;
    double frequency() const { return runs == 0 ? 0.0 : static_cast<double>(all_one_runs) / runs; }
};

/// Sampled runs for each seed, executed in parallel.
EnsembleSummary run_ensemble(const HamiltonianPath& hpath, const ProjectorPath& ppath, const StateVector& psi0,
                             double horizon, int n, const std::vector<std::uint64_t>& seeds,
                             int micro_substeps = kDefaultMicroSubsteps);

struct SweepRow {
    int n = 0;
    double survival = 0.0;
    double one_minus_survival = 0.0;
    double state_error = 0.0;
};

struct SweepOptions {
    int micro_substeps = kDefaultMicroSubsteps;
    /// Steps of the effective-dynamics reference; <= 0 means 4 * default_steps(T).
    int reference_steps = 0;
};

/// Conditional runs for each n (strictly increasing), compared with the
/// effective dynamics of integrate_general at fine steps.
std::vector<SweepRow> convergence_sweep(const HamiltonianPath& hpath, const ProjectorPath& ppath,
                                        const StateVector& psi0, double horizon, const std::vector<int>& n_list,
                                        const SweepOptions& options = {});

/// Least-squares slope of log(value) against log(1/n); the convergence order
/// in 1/n. Needs at least two points with positive values.
std::optional<double> fit_order(const std::vector<int>& n, const std::vector<double>& values);

struct FactorizationRow {
    double dt = 0.0;
    double defect = 0.0;
};

/// defect(dt) = || E exp(-i dt h) psi - exp(-i dt E h E) psi || for psi in
/// the range of E.
std::vector<FactorizationRow> short_time_factorization_check(const Operator& h, const Projector& e,
                                                             const StateVector& psi,
                                                             const std::vector<double>& dt_list);

}  // namespace zeno
