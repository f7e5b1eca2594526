#pragma once

#include <vector>

#include "zeno/linalg.hpp"

namespace zeno {

/// Scalar time dependence of one term of a linear-combination path.
struct Waveform {
    enum class Kind { Const, Sin, Cos, Poly };

    Kind kind = Kind::Const;
    double value = 1.0;              // Const
    double omega = 0.0;              // Sin, Cos
    double phase = 0.0;              // Sin, Cos
    std::vector<double> coefficients;  // Poly, lowest order first

    static Waveform constant(double value) { return {Kind::Const, value, 0.0, 0.0, {}}; }
    static Waveform sine(double omega, double phase = 0.0) { return {Kind::Sin, 1.0, omega, phase, {}}; }
    static Waveform cosine(double omega, double phase = 0.0) { return {Kind::Cos, 1.0, omega, phase, {}}; }
    static Waveform polynomial(std::vector<double> c) { return {Kind::Poly, 1.0, 0.0, 0.0, std::move(c)}; }

    double operator()(double t) const;
};

struct WeightedTerm {
    Operator op;
    Waveform waveform;
};

struct OperatorSample {
    double t;
    Operator op;
};

struct HermiticityReport {
    double max_residual = 0.0;
    double worst_time = 0.0;
};

/// Time-dependent Hermitian operator on a fixed horizon [0, T]. Used for the
/// system Hamiltonian and for the generators of frame rotations.
class HamiltonianPath {
public:
    enum class Kind { Constant, LinearCombination, Sampled };

    static HamiltonianPath constant(Operator h, double horizon);
    static HamiltonianPath zero(Eigen::Index dim, double horizon);
    static HamiltonianPath linear_combination(std::vector<WeightedTerm> terms, double horizon);
    /// Samples must start at t = 0 and be strictly increasing; the last
    /// sample time is the horizon. Samples need not be exactly Hermitian:
    /// evaluation symmetrizes, validate() reports the raw residual.
    static HamiltonianPath sampled(std::vector<OperatorSample> samples);

    Kind kind() const noexcept { return kind_; }
    Eigen::Index dim() const noexcept { return dim_; }
    double horizon() const noexcept { return horizon_; }

    const std::vector<WeightedTerm>& terms() const noexcept { return terms_; }
    const std::vector<OperatorSample>& samples() const noexcept { return samples_; }

    /// H(t) for 0 <= t <= T. Throws ValidationError outside the horizon.
    Operator evaluate(double t) const;

    /// Probes n_probe uniform times on [0, T] and reports the largest
    /// hermiticity residual before symmetrization.
    HermiticityReport validate(int n_probe) const;

    /// Same operator content on a different horizon. Sampled paths cannot be
    /// re-horizoned.
    HamiltonianPath with_horizon(double horizon) const;

private:
    HamiltonianPath() = default;

    double checked_time(double t) const;
    Operator evaluate_raw(double t) const;

    Kind kind_ = Kind::Constant;
    Eigen::Index dim_ = 0;
    double horizon_ = 0.0;
    std::vector<WeightedTerm> terms_;  // Constant stores a single Const(1) term
    std::vector<OperatorSample> samples_;
};

/// One step of the fourth-order commutator-free Magnus exponential for
/// dU/dt = -i H(t) U across [t, t + h]:
///   exp(-i h (a H_1 + b H_2)) exp(-i h (b H_1 + a H_2)),
/// with H_1, H_2 at the two Gauss-Legendre nodes. Exactly unitary, and exact
/// when H is constant.
Operator magnus4_step(const HamiltonianPath& path, double t, double h);

}  // namespace zeno
