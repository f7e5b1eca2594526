#include "zeno/stroboscopic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "zeno/errors.hpp"
#include "zeno/zeno_dynamics.hpp"

namespace zeno {

namespace {

void require_protocol(const HamiltonianPath& hpath, const ProjectorPath& ppath, const StateVector& psi0,
                      double horizon, int n, int micro_substeps) {
    if (hpath.dim() != ppath.dim() || psi0.dim() != ppath.dim()) {
        throw ValidationError("dimension mismatch: Hamiltonian " + std::to_string(hpath.dim()) + ", projector " +
                              std::to_string(ppath.dim()) + ", state " + std::to_string(psi0.dim()));
    }
    if (n < 1) {
        throw ValidationError("number of measurements must be >= 1, got " + std::to_string(n));
    }
    if (micro_substeps < 1) {
        throw ValidationError("micro_substeps must be >= 1, got " + std::to_string(micro_substeps));
    }
    const double limit = std::min(hpath.horizon(), ppath.horizon()) * (1.0 + 1e-12);
    if (!(horizon > 0.0) || horizon > limit) {
        throw ValidationError("measurement horizon " + std::to_string(horizon) + " exceeds the path horizons");
    }
}

double measurement_time(int k, int n, double horizon) { return k == n ? horizon : horizon * k / n; }

/// Free evolution across [t0, t1] in fourth-order Magnus substeps.
Amplitudes evolve_free(const HamiltonianPath& hpath, Amplitudes psi, double t0, double t1, int substeps) {
    const double h = (t1 - t0) / substeps;
    for (int j = 0; j < substeps; ++j) {
        psi = magnus4_step(hpath, t0 + j * h, h) * psi;
    }
    return psi;
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&fn, w, workers, count] {
            for (std::size_t i = w; i < count; i += workers) {
                fn(i);
            }
        });
    }
    for (auto& thread : pool) {
        thread.join();
    }
}

}  // namespace

bool StroboscopicRun::all_ones() const {
    return std::all_of(outcomes.begin(), outcomes.end(), [](int o) { return o == 1; });
}

StroboscopicRun run_conditional(const HamiltonianPath& hpath, const ProjectorPath& ppath, const StateVector& psi0,
                                double horizon, int n, int micro_substeps) {
    require_protocol(hpath, ppath, psi0, horizon, n, micro_substeps);
    require_initial_condition(ppath.projector_at(0.0), psi0);

    StroboscopicRun run;
    run.n = n;
    StateVector psi = psi0;
    for (int k = 1; k <= n; ++k) {
        const double t0 = measurement_time(k - 1, n, horizon);
        const double t1 = measurement_time(k, n, horizon);
        const StateVector evolved =
            StateVector::from_propagation(evolve_free(hpath, psi.amplitudes(), t0, t1, micro_substeps));
        Measurement m = project_and_renormalize(ppath.projector_at(t1), evolved, t1);
        run.log_survival += std::log(m.probability);
        run.times.push_back(t1);
        run.step_probabilities.push_back(m.probability);
        run.conditional_states.push_back(m.state);
        psi = std::move(m.state);
    }
    run.survival_probability = std::exp(run.log_survival);
    return run;
}

StroboscopicRun run_sampled(const HamiltonianPath& hpath, const ProjectorPath& ppath, const StateVector& psi0,
                            double horizon, int n, std::uint64_t seed, int micro_substeps) {
    require_protocol(hpath, ppath, psi0, horizon, n, micro_substeps);

    std::mt19937_64 rng(seed);
    StroboscopicRun run;
    run.n = n;
    run.seed = seed;
    StateVector psi = psi0;
    for (int k = 1; k <= n; ++k) {
        const double t0 = measurement_time(k - 1, n, horizon);
        const double t1 = measurement_time(k, n, horizon);
        const StateVector evolved =
            StateVector::from_propagation(evolve_free(hpath, psi.amplitudes(), t0, t1, micro_substeps));
        const Projector e = ppath.projector_at(t1);
        const double p1 = std::clamp((e.op() * evolved.amplitudes()).squaredNorm(), 0.0, 1.0);
        int outcome = uniform01(rng) < p1 ? 1 : 0;
        // Never condition on a branch below the probability floor.
        if (outcome == 1 && p1 < kProbabilityFloor) {
            outcome = 0;
        } else if (outcome == 0 && 1.0 - p1 < kProbabilityFloor) {
            outcome = 1;
        }
        Measurement m = project_and_renormalize(outcome == 1 ? e : e.complement(), evolved, t1);
        run.log_survival += std::log(m.probability);
        run.times.push_back(t1);
        run.step_probabilities.push_back(m.probability);
        run.conditional_states.push_back(m.state);
        run.outcomes.push_back(outcome);
        psi = std::move(m.state);
    }
    run.survival_probability = std::exp(run.log_survival);
    return run;
}

EnsembleSummary run_ensemble(const HamiltonianPath& hpath, const ProjectorPath& ppath, const StateVector& psi0,
                             double horizon, int n, const std::vector<std::uint64_t>& seeds, int micro_substeps) {
    std::vector<char> all_one(seeds.size(), 0);
    parallel_for(seeds.size(), [&](std::size_t i) {
        all_one[i] = run_sampled(hpath, ppath, psi0, horizon, n, seeds[i], micro_substeps).all_ones() ? 1 : 0;
    });
    EnsembleSummary summary;
    summary.runs = seeds.size();
    summary.all_one_runs = static_cast<std::size_t>(std::count(all_one.begin(), all_one.end(), 1));
    return summary;
}

std::vector<SweepRow> convergence_sweep(const HamiltonianPath& hpath, const ProjectorPath& ppath,
                                        const StateVector& psi0, double horizon, const std::vector<int>& n_list,
                                        const SweepOptions& options) {
    if (n_list.empty()) {
        throw ValidationError("convergence sweep needs a non-empty n_list");
    }
    for (std::size_t i = 1; i < n_list.size(); ++i) {
        if (n_list[i] <= n_list[i - 1]) {
            throw ValidationError("n_list must be strictly increasing");
        }
    }
    const int reference_steps = options.reference_steps > 0 ? options.reference_steps : 4 * default_steps(horizon);
    const TrajectoryRecord reference = integrate_general(hpath, ppath, psi0, horizon, reference_steps);
    const Amplitudes& target = reference.final_state().amplitudes();

    std::vector<SweepRow> rows(n_list.size());
    parallel_for(n_list.size(), [&](std::size_t i) {
        const StroboscopicRun run = run_conditional(hpath, ppath, psi0, horizon, n_list[i], options.micro_substeps);
        SweepRow& row = rows[i];
        row.n = n_list[i];
        row.survival = run.survival_probability;
        row.one_minus_survival = -std::expm1(run.log_survival);
        row.state_error = (run.final_state().amplitudes() - target).norm();
    });
    return rows;
}

std::optional<double> fit_order(const std::vector<int>& n, const std::vector<double>& values) {
    if (n.size() != values.size()) {
        throw ValidationError("fit_order: mismatched lengths");
    }
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (n[i] > 0 && values[i] > 0.0 && std::isfinite(values[i])) {
            points.emplace_back(std::log(1.0 / n[i]), std::log(values[i]));
        }
    }
    if (points.size() < 2) {
        return std::nullopt;
    }
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [x, y] : points) {
        mx += x;
        my += y;
    }
    mx /= points.size();
    my /= points.size();
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0) {
        return std::nullopt;
    }
    return sxy / sxx;
}

std::vector<FactorizationRow> short_time_factorization_check(const Operator& h, const Projector& e,
                                                             const StateVector& psi,
                                                             const std::vector<double>& dt_list) {
    require_operator(h, "Hamiltonian");
    if (h.rows() != e.dim()) {
        throw ValidationError("Hamiltonian dim " + std::to_string(h.rows()) + " does not match projector dim " +
                              std::to_string(e.dim()));
    }
    require_initial_condition(e, psi);
    const Operator compressed = hermitian_part(e.op() * h * e.op());
    std::vector<FactorizationRow> rows;
    rows.reserve(dt_list.size());
    for (double dt : dt_list) {
        const Amplitudes measured = e.op() * (expm_skew_hermitian(h, dt) * psi.amplitudes());
        const Amplitudes effective = expm_skew_hermitian(compressed, dt) * psi.amplitudes();
        rows.push_back({dt, (measured - effective).norm()});
    }
    return rows;
}

}  // namespace zeno
