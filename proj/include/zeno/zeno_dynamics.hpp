#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zeno/hamiltonian_path.hpp"
#include "zeno/linalg.hpp"
#include "zeno/projector_path.hpp"

namespace zeno {

inline constexpr double kGeneratorHermiticityTol = 1e-9;
inline constexpr double kInitialConditionTol = 1e-10;

/// Effective Hamiltonian E_t H_t E_t + i [dE_t/dt, E_t] at a single time.
struct EffectiveGenerator {
    double t = 0.0;
    Operator k;
    double hermiticity_residual = 0.0;
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<StateVector> states;
    std::vector<double> confinement_residual;  // || E_t psi_t - psi_t ||
    std::vector<double> norm_residual;         // | ||psi_t|| - 1 |
    double max_hermiticity_residual = 0.0;

    std::string scenario_id;
    std::string engine;
    double step = 0.0;
    std::optional<std::uint64_t> seed;

    std::size_t size() const noexcept { return times.size(); }
    const StateVector& final_state() const { return states.back(); }
    double max_confinement_residual() const;
    double max_norm_residual() const;
};

/// round(1000 * T) steps, at least one.
int default_steps(double horizon);

/// Throws HermiticityError if the residual exceeds kGeneratorHermiticityTol.
EffectiveGenerator effective_hamiltonian(const HamiltonianPath& hpath, const ProjectorPath& ppath, double t);

/// Throws ValidationError unless E psi0 = psi0 within kInitialConditionTol.
void require_initial_condition(const Projector& e, const StateVector& psi0);

/// psi' = -i E H_t E psi for a constant projector, stepped with the
/// midpoint exponential psi_{k+1} = exp(-i h E H(t_k + h/2) E) psi_k.
TrajectoryRecord integrate_constant(const HamiltonianPath& hpath, const Projector& e, const StateVector& psi0,
                                    double horizon, int n_steps);

/// psi' = -i E_t H_t E_t psi + [dE_t/dt, E_t] psi, stepped with the midpoint
/// exponential of the effective Hamiltonian. Confinement is recorded, never
/// enforced.
TrajectoryRecord integrate_general(const HamiltonianPath& hpath, const ProjectorPath& ppath,
                                   const StateVector& psi0, double horizon, int n_steps);

/// Same dynamics solved in the frame that makes the projector constant:
/// psi~ = U_t^dagger psi evolves under E U_t^dagger (H_t - G_t) U_t E, where
/// G_t is the frame generator (i dU^dagger/dt U = -U^dagger G U taken
/// analytically), and each recorded state is mapped back as U_t psi~.
TrajectoryRecord integrate_rotating_frame(const HamiltonianPath& hpath, const ProjectorPath& ppath,
                                          const StateVector& psi0, double horizon, int n_steps);

struct ResidualReport {
    double max_residual = 0.0;
    double worst_time = 0.0;
    bool pass = false;
};

/// max_t || E_t psi_t - psi_t || recomputed against ppath.
ResidualReport check_confinement(const TrajectoryRecord& rec, const ProjectorPath& ppath, double tol);

/// max_t max_ij | psi_t psi_t^dagger - E_t |, meaningful for rank-1 paths.
ResidualReport check_dragging(const TrajectoryRecord& rec, const ProjectorPath& ppath, double tol);

/// max_t || psi^a_t - psi^b_t ||; both records must share their time grid.
double max_state_gap(const TrajectoryRecord& a, const TrajectoryRecord& b);

/// max over n_probe uniform times of the effective-generator hermiticity
/// residual. Unlike effective_hamiltonian this never throws on a large
/// residual.
ResidualReport probe_hermiticity(const HamiltonianPath& hpath, const ProjectorPath& ppath, int n_probe,
                                 double tol = kGeneratorHermiticityTol);

}  // namespace zeno
