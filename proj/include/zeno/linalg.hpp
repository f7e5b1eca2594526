#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>

namespace zeno {

using Complex = std::complex<double>;

/// Dense complex d x d matrix. Hamiltonians, unitaries, projectors and
/// commutators all share this representation.
using Operator = Eigen::MatrixXcd;
using Amplitudes = Eigen::VectorXcd;

inline constexpr double kNormTol = 1e-10;
inline constexpr double kStructureTol = 1e-10;
inline constexpr double kProbabilityFloor = 1e-14;
inline constexpr double kRankTraceTol = 1e-6;

/// Throws ValidationError unless `a` is square, non-empty and finite.
void require_operator(const Operator& a, const char* what = "operator");

/// Largest entrywise modulus.
double max_abs(const Operator& a);

Operator adjoint(const Operator& a);
Operator commutator(const Operator& a, const Operator& b);

/// max |a - a^dagger| entrywise.
double hermiticity_residual(const Operator& a);
/// max |a^2 - a| entrywise.
double idempotency_residual(const Operator& a);
/// max |u^dagger u - I| entrywise.
double unitarity_residual(const Operator& u);

/// (a + a^dagger) / 2
Operator hermitian_part(const Operator& a);

/// exp(-i dt h) for Hermitian h, computed from the eigendecomposition of h
/// so the result is unitary to round-off.
Operator expm_skew_hermitian(const Operator& h, double dt);

struct ProjectorCheck {
    bool ok = false;
    int rank = 0;
};

/// Hermitian and idempotent within `tol`, with a trace that is an integer to
/// within kRankTraceTol. `rank` is round(trace) whenever the trace is close
/// to an integer, even when `ok` is false.
ProjectorCheck is_projector(const Operator& a, double tol = kStructureTol);

/// Unit vector in C^d.
class StateVector {
public:
    /// Validates |norm - 1| <= kNormTol.
    explicit StateVector(Amplitudes amplitudes);

    /// Normalizes `v`; throws on a zero vector.
    static StateVector normalized(const Amplitudes& v);

    /// Integrator output: finite entries are required but the norm may
    /// have drifted, which is what the norm residual records.
    static StateVector from_propagation(Amplitudes amplitudes);

    Eigen::Index dim() const noexcept { return amplitudes_.size(); }
    const Amplitudes& amplitudes() const noexcept { return amplitudes_; }
    Complex operator[](Eigen::Index i) const { return amplitudes_(i); }

    double norm_residual() const { return std::abs(amplitudes_.norm() - 1.0); }

    /// |psi><psi|
    Operator outer() const { return amplitudes_ * amplitudes_.adjoint(); }

private:
    struct Unchecked {};
    StateVector(Amplitudes amplitudes, Unchecked) : amplitudes_(std::move(amplitudes)) {}

    Amplitudes amplitudes_;
};

/// Hermitian idempotent operator with integer rank.
class Projector {
public:
    /// Validates hermiticity and idempotency within `tol` and derives the rank.
    explicit Projector(Operator op, double tol = kStructureTol);

    /// diag(1, ..., 1, 0, ..., 0) with `rank` leading ones.
    static Projector diagonal(Eigen::Index dim, int rank);

    Eigen::Index dim() const noexcept { return op_.rows(); }
    int rank() const noexcept { return rank_; }
    const Operator& op() const noexcept { return op_; }

    /// I - E
    Projector complement() const;

    /// Normalized eigenvector of the largest eigenvalue, with the
    /// largest-magnitude component (first one on ties) made real-positive.
    StateVector top_eigenvector() const;

    /// || E psi - psi ||
    double confinement_residual(const Amplitudes& psi) const;

private:
    struct Unchecked {};
    Projector(Operator op, int rank, Unchecked) : op_(std::move(op)), rank_(rank) {}

    Operator op_;
    int rank_ = 0;
};

struct Measurement {
    StateVector state;
    double probability;
};

/// Conditions psi on outcome 1 of the measurement of e. Throws
/// ImpossibleOutcome when ||E psi||^2 < kProbabilityFloor.
Measurement project_and_renormalize(const Projector& e, const StateVector& psi, double time = 0.0);

/// Number of eigenvalues above 1/2; the rank of a near-projector.
int eigen_rank(const Operator& a);

}  // namespace zeno
