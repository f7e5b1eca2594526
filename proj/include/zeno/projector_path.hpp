#pragma once

#include <optional>
#include <vector>

#include "zeno/errors.hpp"
#include "zeno/hamiltonian_path.hpp"
#include "zeno/linalg.hpp"

namespace zeno {

/// Hermitian generator A_t of a frame rotation, dU/dt = -i A_t U, U_0 = I.
struct UnitaryGeneratorPath {
    HamiltonianPath generator;

    Eigen::Index dim() const noexcept { return generator.dim(); }
    double horizon() const noexcept { return generator.horizon(); }
};

enum class DerivativeMode { Analytic, FiniteDifference };

/// Raised by gauge_transform when the gauge generator does not commute
/// with the base projector.
class GaugePreconditionError : public ValidationError {
public:
    GaugePreconditionError(double residual, double time);

    double residual() const noexcept { return residual_; }
    double time() const noexcept { return time_; }

private:
    double residual_;
    double time_;
};

/// Moving projector E_t = U_t E U_t^dagger.
///
/// U_t is the ordered product of one or more frame factors; a freshly built
/// path has a single factor and gauge_transform appends more. Every factor
/// is propagated once at construction onto a uniform checkpoint grid with
/// stride frame_step; evaluation between checkpoints takes one partial step
/// from the checkpoint below, so results do not depend on query order.
///
/// Each step is a magnus4_step, so U_t is exactly unitary and exact for
/// constant generators.
class ProjectorPath {
public:
    /// frame_step <= 0 selects the default stride of 1e-3 * T.
    ProjectorPath(Projector base, UnitaryGeneratorPath frame, double frame_step = 0.0);

    /// E_t = E on [0, T].
    static ProjectorPath constant(Projector base, double horizon);

    const Projector& base() const noexcept { return base_; }
    Eigen::Index dim() const noexcept { return base_.dim(); }
    double horizon() const noexcept { return horizon_; }
    double frame_step() const noexcept { return step_; }
    const std::vector<UnitaryGeneratorPath>& frames() const noexcept { return frames_; }

    /// True when every frame generator is identically zero.
    bool is_constant() const noexcept { return constant_; }

    Operator unitary_at(double t) const;
    Projector projector_at(double t) const;

    /// Total generator G_t with dU_t/dt = -i G_t U_t.
    Operator generator_at(double t) const;

    /// dE_t/dt. Analytic mode returns -i [G_t, E_t]; finite-difference mode
    /// uses a central stencil with spacing h_fd and second-order one-sided
    /// stencils where the central one would leave [0, T].
    Operator projector_derivative(double t, DerivativeMode mode = DerivativeMode::Analytic,
                                  double h_fd = 1e-5) const;

    /// U_t -> U_t V_t with V generated by `gauge`. Requires [B_t, E] = 0 on
    /// n_probe uniform times, so projector_at is unchanged.
    ProjectorPath gauge_transform(const UnitaryGeneratorPath& gauge, int n_probe = 101) const;

    /// First probed time (n_probe uniform points on [0, T]) at which
    /// max |E_t - target| <= tol, if any.
    std::optional<double> reaches_target(const Projector& target, double tol, int n_probe) const;

private:
    std::vector<Operator> propagate(const HamiltonianPath& generator) const;
    Operator factor_unitary(std::size_t factor, double t) const;
    double checked_time(double t) const;

    Projector base_;
    std::vector<UnitaryGeneratorPath> frames_;
    std::vector<std::vector<Operator>> checkpoints_;  // per factor, U at k * step_
    double horizon_ = 0.0;
    double step_ = 0.0;
    int n_checkpoints_ = 0;
    bool constant_ = false;
};

}  // namespace zeno
