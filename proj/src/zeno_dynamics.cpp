#include "zeno/zeno_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zeno/errors.hpp"

namespace zeno {

namespace {

const Complex kI(0.0, 1.0);

Operator raw_effective(const HamiltonianPath& hpath, const ProjectorPath& ppath, double t) {
    const Operator e = ppath.projector_at(t).op();
    Operator k = e * hpath.evaluate(t) * e;
    if (!ppath.is_constant()) {
        k += kI * commutator(ppath.projector_derivative(t), e);
    }
    return k;
}

void require_run(const HamiltonianPath& hpath, Eigen::Index dim, const StateVector& psi0, double horizon,
                 int n_steps) {
    if (hpath.dim() != dim || psi0.dim() != dim) {
        throw ValidationError("dimension mismatch: Hamiltonian " + std::to_string(hpath.dim()) + ", projector " +
                              std::to_string(dim) + ", state " + std::to_string(psi0.dim()));
    }
    if (n_steps < 1) {
        throw ValidationError("n_steps must be >= 1, got " + std::to_string(n_steps));
    }
    if (!(horizon > 0.0) || horizon > hpath.horizon() * (1.0 + 1e-12)) {
        throw ValidationError("integration horizon " + std::to_string(horizon) +
                              " must lie in (0, " + std::to_string(hpath.horizon()) + "]");
    }
}

void record(TrajectoryRecord& rec, double t, Amplitudes psi, const Projector& e) {
    rec.times.push_back(t);
    rec.confinement_residual.push_back(e.confinement_residual(psi));
    rec.norm_residual.push_back(std::abs(psi.norm() - 1.0));
    rec.states.push_back(StateVector::from_propagation(std::move(psi)));
}

TrajectoryRecord start_record(const char* engine, double h, int n_steps) {
    TrajectoryRecord rec;
    rec.engine = engine;
    rec.step = h;
    const auto size = static_cast<std::size_t>(n_steps) + 1;
    rec.times.reserve(size);
    rec.states.reserve(size);
    rec.confinement_residual.reserve(size);
    rec.norm_residual.reserve(size);
    return rec;
}

// Grid times are computed as k * h so every engine shares the exact grid.
double grid_time(int k, int n_steps, double horizon) {
    return k == n_steps ? horizon : horizon * k / n_steps;
}

}  // namespace

double TrajectoryRecord::max_confinement_residual() const {
    return confinement_residual.empty() ? 0.0
                                        : *std::max_element(confinement_residual.begin(), confinement_residual.end());
}

double TrajectoryRecord::max_norm_residual() const {
    return norm_residual.empty() ? 0.0 : *std::max_element(norm_residual.begin(), norm_residual.end());
}

int default_steps(double horizon) { return std::max(1, static_cast<int>(std::lround(1000.0 * horizon))); }

EffectiveGenerator effective_hamiltonian(const HamiltonianPath& hpath, const ProjectorPath& ppath, double t) {
    if (hpath.dim() != ppath.dim()) {
        throw ValidationError("effective_hamiltonian: Hamiltonian dim " + std::to_string(hpath.dim()) +
                              " vs projector dim " + std::to_string(ppath.dim()));
    }
    EffectiveGenerator gen;
    gen.t = t;
    gen.k = raw_effective(hpath, ppath, t);
    gen.hermiticity_residual = hermiticity_residual(gen.k);
    if (gen.hermiticity_residual > kGeneratorHermiticityTol) {
        throw HermiticityError(gen.hermiticity_residual, t);
    }
    return gen;
}

void require_initial_condition(const Projector& e, const StateVector& psi0) {
    if (e.dim() != psi0.dim()) {
        throw ValidationError("initial state dim " + std::to_string(psi0.dim()) + " does not match projector dim " +
                              std::to_string(e.dim()));
    }
    const double residual = e.confinement_residual(psi0.amplitudes());
    if (residual > kInitialConditionTol) {
        throw ValidationError("initial state is not in the range of E_0 (|| E psi0 - psi0 || = " +
                              std::to_string(residual) + ")");
    }
}

TrajectoryRecord integrate_constant(const HamiltonianPath& hpath, const Projector& e, const StateVector& psi0,
                                    double horizon, int n_steps) {
    require_run(hpath, e.dim(), psi0, horizon, n_steps);
    require_initial_condition(e, psi0);

    const double h = horizon / n_steps;
    TrajectoryRecord rec = start_record("constant", h, n_steps);
    const Operator& eop = e.op();
    Amplitudes psi = psi0.amplitudes();
    record(rec, 0.0, psi, e);
    for (int k = 0; k < n_steps; ++k) {
        const double t0 = grid_time(k, n_steps, horizon);
        const double t1 = grid_time(k + 1, n_steps, horizon);
        const Operator gen = eop * hpath.evaluate(0.5 * (t0 + t1)) * eop;
        rec.max_hermiticity_residual = std::max(rec.max_hermiticity_residual, hermiticity_residual(gen));
        psi = expm_skew_hermitian(hermitian_part(gen), t1 - t0) * psi;
        record(rec, t1, psi, e);
    }
    return rec;
}

TrajectoryRecord integrate_general(const HamiltonianPath& hpath, const ProjectorPath& ppath,
                                   const StateVector& psi0, double horizon, int n_steps) {
    require_run(hpath, ppath.dim(), psi0, horizon, n_steps);
    require_initial_condition(ppath.projector_at(0.0), psi0);

    const double h = horizon / n_steps;
    TrajectoryRecord rec = start_record("effective", h, n_steps);
    Amplitudes psi = psi0.amplitudes();
    record(rec, 0.0, psi, ppath.projector_at(0.0));
    for (int k = 0; k < n_steps; ++k) {
        const double t0 = grid_time(k, n_steps, horizon);
        const double t1 = grid_time(k + 1, n_steps, horizon);
        const EffectiveGenerator gen = effective_hamiltonian(hpath, ppath, 0.5 * (t0 + t1));
        rec.max_hermiticity_residual = std::max(rec.max_hermiticity_residual, gen.hermiticity_residual);
        psi = expm_skew_hermitian(hermitian_part(gen.k), t1 - t0) * psi;
        record(rec, t1, psi, ppath.projector_at(t1));
    }
    return rec;
}

TrajectoryRecord integrate_rotating_frame(const HamiltonianPath& hpath, const ProjectorPath& ppath,
                                          const StateVector& psi0, double horizon, int n_steps) {
    require_run(hpath, ppath.dim(), psi0, horizon, n_steps);
    require_initial_condition(ppath.projector_at(0.0), psi0);

    const double h = horizon / n_steps;
    TrajectoryRecord rec = start_record("frame", h, n_steps);
    const Operator& eop = ppath.base().op();
    // U_0 = I, so the rotated and laboratory states coincide at t = 0.
    Amplitudes rotated = psi0.amplitudes();
    record(rec, 0.0, rotated, ppath.projector_at(0.0));
    for (int k = 0; k < n_steps; ++k) {
        const double t0 = grid_time(k, n_steps, horizon);
        const double t1 = grid_time(k + 1, n_steps, horizon);
        const double tm = 0.5 * (t0 + t1);
        const Operator u = ppath.unitary_at(tm);
        const Operator transformed = u.adjoint() * (hpath.evaluate(tm) - ppath.generator_at(tm)) * u;
        const Operator gen = eop * transformed * eop;
        const double residual = hermiticity_residual(gen);
        if (residual > kGeneratorHermiticityTol) {
            throw HermiticityError(residual, tm);
        }
        rec.max_hermiticity_residual = std::max(rec.max_hermiticity_residual, residual);
        rotated = expm_skew_hermitian(hermitian_part(gen), t1 - t0) * rotated;
        record(rec, t1, ppath.unitary_at(t1) * rotated, ppath.projector_at(t1));
    }
    return rec;
}

ResidualReport check_confinement(const TrajectoryRecord& rec, const ProjectorPath& ppath, double tol) {
    ResidualReport report;
    for (std::size_t k = 0; k < rec.size(); ++k) {
        const double residual = ppath.projector_at(rec.times[k]).confinement_residual(rec.states[k].amplitudes());
        if (residual > report.max_residual) {
            report.max_residual = residual;
            report.worst_time = rec.times[k];
        }
    }
    report.pass = report.max_residual <= tol;
    return report;
}

ResidualReport check_dragging(const TrajectoryRecord& rec, const ProjectorPath& ppath, double tol) {
    ResidualReport report;
    for (std::size_t k = 0; k < rec.size(); ++k) {
        const double residual = max_abs(rec.states[k].outer() - ppath.projector_at(rec.times[k]).op());
        if (residual > report.max_residual) {
            report.max_residual = residual;
            report.worst_time = rec.times[k];
        }
    }
    report.pass = report.max_residual <= tol;
    return report;
}

double max_state_gap(const TrajectoryRecord& a, const TrajectoryRecord& b) {
    if (a.size() != b.size()) {
        throw ValidationError("trajectories have different lengths (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
    }
    double gap = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        gap = std::max(gap, (a.states[k].amplitudes() - b.states[k].amplitudes()).norm());
    }
    return gap;
}

ResidualReport probe_hermiticity(const HamiltonianPath& hpath, const ProjectorPath& ppath, int n_probe,
                                 double tol) {
    ResidualReport report;
    n_probe = std::max(n_probe, 2);
    const double horizon = std::min(hpath.horizon(), ppath.horizon());
    for (int k = 0; k < n_probe; ++k) {
        const double t = horizon * k / (n_probe - 1);
        const double residual = hermiticity_residual(raw_effective(hpath, ppath, t));
        if (residual > report.max_residual) {
            report.max_residual = residual;
            report.worst_time = t;
        }
    }
    report.pass = report.max_residual <= tol;
    return report;
}

}  // namespace zeno
