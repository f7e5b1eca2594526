#include "zeno/projector_path.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zeno/errors.hpp"

namespace zeno {

namespace {

bool is_zero_path(const HamiltonianPath& path) {
    if (path.kind() == HamiltonianPath::Kind::Sampled) {
        return std::all_of(path.samples().begin(), path.samples().end(),
                           [](const OperatorSample& s) { return max_abs(s.op) == 0.0; });
    }
    return std::all_of(path.terms().begin(), path.terms().end(),
                       [](const WeightedTerm& term) { return max_abs(term.op) == 0.0; });
}

}  // namespace

GaugePreconditionError::GaugePreconditionError(double residual, double time)
    : ValidationError("gauge generator does not commute with the base projector (residual " +
                      std::to_string(residual) + " at t=" + std::to_string(time) + ")"),
      residual_(residual), time_(time) {}

ProjectorPath::ProjectorPath(Projector base, UnitaryGeneratorPath frame, double frame_step)
    : base_(std::move(base)), horizon_(frame.horizon()) {
    if (frame.dim() != base_.dim()) {
        throw ValidationError("frame generator dim " + std::to_string(frame.dim()) +
                              " does not match projector dim " + std::to_string(base_.dim()));
    }
    const double requested = frame_step > 0.0 ? frame_step : 1e-3 * horizon_;
    n_checkpoints_ = std::max(1, static_cast<int>(std::ceil(horizon_ / requested - 1e-9)));
    step_ = horizon_ / n_checkpoints_;
    constant_ = is_zero_path(frame.generator);
    checkpoints_.push_back(propagate(frame.generator));
    frames_.push_back(std::move(frame));
}

ProjectorPath ProjectorPath::constant(Projector base, double horizon) {
    const Eigen::Index dim = base.dim();
    return ProjectorPath(std::move(base), UnitaryGeneratorPath{HamiltonianPath::zero(dim, horizon)});
}

std::vector<Operator> ProjectorPath::propagate(const HamiltonianPath& generator) const {
    std::vector<Operator> checkpoints;
    checkpoints.reserve(static_cast<std::size_t>(n_checkpoints_) + 1);
    checkpoints.push_back(Operator::Identity(dim(), dim()));
    if (is_zero_path(generator)) {
        checkpoints.resize(static_cast<std::size_t>(n_checkpoints_) + 1, checkpoints.front());
        return checkpoints;
    }
    for (int k = 0; k < n_checkpoints_; ++k) {
        checkpoints.push_back(magnus4_step(generator, k * step_, step_) * checkpoints.back());
    }
    return checkpoints;
}

double ProjectorPath::checked_time(double t) const {
    const double slack = 1e-12 * std::max(1.0, horizon_);
    if (!(t >= -slack && t <= horizon_ + slack)) {
        throw ValidationError("time " + std::to_string(t) + " outside horizon [0, " +
                              std::to_string(horizon_) + "]");
    }
    return std::clamp(t, 0.0, horizon_);
}

Operator ProjectorPath::factor_unitary(std::size_t factor, double t) const {
    const auto& checkpoints = checkpoints_[factor];
    const int k = std::clamp(static_cast<int>(std::floor(t / step_)), 0, n_checkpoints_);
    const double remainder = t - k * step_;
    const Operator& anchor = checkpoints[static_cast<std::size_t>(k)];
    if (remainder <= 0.0 || k == n_checkpoints_) {
        return anchor;
    }
    return magnus4_step(frames_[factor].generator, k * step_, remainder) * anchor;
}

Operator ProjectorPath::unitary_at(double t) const {
    t = checked_time(t);
    Operator u = Operator::Identity(dim(), dim());
    if (constant_) {
        return u;
    }
    for (std::size_t f = 0; f < frames_.size(); ++f) {
        u = u * factor_unitary(f, t);
    }
    return u;
}

Projector ProjectorPath::projector_at(double t) const {
    if (constant_) {
        checked_time(t);
        return base_;
    }
    const Operator u = unitary_at(t);
    return Projector(hermitian_part(u * base_.op() * u.adjoint()), 1e-8);
}

Operator ProjectorPath::generator_at(double t) const {
    t = checked_time(t);
    Operator total = Operator::Zero(dim(), dim());
    if (constant_) {
        return total;
    }
    // d/dt (U_1 ... U_n) = -i sum_k W_k B_k W_k^dagger (U_1 ... U_n), W_k = U_1 ... U_{k-1}
    Operator prefix = Operator::Identity(dim(), dim());
    for (std::size_t f = 0; f < frames_.size(); ++f) {
        total += prefix * frames_[f].generator.evaluate(t) * prefix.adjoint();
        if (f + 1 < frames_.size()) {
            prefix = prefix * factor_unitary(f, t);
        }
    }
    return hermitian_part(total);
}

Operator ProjectorPath::projector_derivative(double t, DerivativeMode mode, double h_fd) const {
    t = checked_time(t);
    if (mode == DerivativeMode::Analytic) {
        if (constant_) {
            return Operator::Zero(dim(), dim());
        }
        const Operator e = projector_at(t).op();
        return Complex(0.0, -1.0) * commutator(generator_at(t), e);
    }
    if (!(h_fd > 0.0)) {
        throw ValidationError("finite-difference spacing must be positive, got " + std::to_string(h_fd));
    }
    if (2.0 * h_fd > horizon_) {
        throw ValidationError("finite-difference spacing too large for the horizon");
    }
    auto at = [this](double s) { return projector_at(s).op(); };
    Operator d;
    if (t - h_fd >= 0.0 && t + h_fd <= horizon_) {
        d = (at(t + h_fd) - at(t - h_fd)) / (2.0 * h_fd);
    } else if (t - h_fd < 0.0) {
        d = (-3.0 * at(t) + 4.0 * at(t + h_fd) - at(t + 2.0 * h_fd)) / (2.0 * h_fd);
    } else {
        d = (3.0 * at(t) - 4.0 * at(t - h_fd) + at(t - 2.0 * h_fd)) / (2.0 * h_fd);
    }
    return hermitian_part(d);
}

ProjectorPath ProjectorPath::gauge_transform(const UnitaryGeneratorPath& gauge, int n_probe) const {
    if (gauge.dim() != dim()) {
        throw ValidationError("gauge generator dim " + std::to_string(gauge.dim()) +
                              " does not match projector dim " + std::to_string(dim()));
    }
    if (std::abs(gauge.horizon() - horizon_) > 1e-12 * std::max(1.0, horizon_)) {
        throw ValidationError("gauge generator horizon differs from the projector path horizon");
    }
    n_probe = std::max(n_probe, 2);
    for (int k = 0; k < n_probe; ++k) {
        const double t = horizon_ * k / (n_probe - 1);
        const double residual = max_abs(commutator(gauge.generator.evaluate(t), base_.op()));
        if (residual > kStructureTol) {
            throw GaugePreconditionError(residual, t);
        }
    }
    ProjectorPath out = *this;
    out.checkpoints_.push_back(propagate(gauge.generator));
    out.frames_.push_back(gauge);
    out.constant_ = constant_ && is_zero_path(gauge.generator);
    return out;
}

std::optional<double> ProjectorPath::reaches_target(const Projector& target, double tol, int n_probe) const {
    if (target.dim() != dim()) {
        throw ValidationError("target dim " + std::to_string(target.dim()) +
                              " does not match projector dim " + std::to_string(dim()));
    }
    if (!(tol > 0.0)) {
        throw ValidationError("reaches_target needs tol > 0");
    }
    n_probe = std::max(n_probe, 2);
    for (int k = 0; k < n_probe; ++k) {
        const double t = horizon_ * k / (n_probe - 1);
        if (max_abs(projector_at(t).op() - target.op()) <= tol) {
            return t;
        }
    }
    return std::nullopt;
}

}  // namespace zeno
