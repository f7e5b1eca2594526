#include "zeno/linalg.hpp"

#include <cmath>
#include <string>

#include "zeno/errors.hpp"

namespace zeno {

void require_operator(const Operator& a, const char* what) {
    if (a.rows() == 0 || a.rows() != a.cols()) {
        throw ValidationError(std::string(what) + " must be a non-empty square matrix, got " +
                              std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
    if (!a.allFinite()) {
        throw ValidationError(std::string(what) + " has non-finite entries");
    }
}

double max_abs(const Operator& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

Operator adjoint(const Operator& a) { return a.adjoint(); }

Operator commutator(const Operator& a, const Operator& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ValidationError("commutator: dimension mismatch (" + std::to_string(a.rows()) +
                              " vs " + std::to_string(b.rows()) + ")");
    }
    return a * b - b * a;
}

double hermiticity_residual(const Operator& a) { return max_abs(a - a.adjoint()); }

double idempotency_residual(const Operator& a) { return max_abs(a * a - a); }

double unitarity_residual(const Operator& u) {
    return max_abs(u.adjoint() * u - Operator::Identity(u.rows(), u.cols()));
}

Operator hermitian_part(const Operator& a) { return (a + a.adjoint()) * 0.5; }

Operator expm_skew_hermitian(const Operator& h, double dt) {
    require_operator(h, "generator");
    const double residual = hermiticity_residual(h);
    if (residual > kStructureTol) {
        throw ValidationError("expm_skew_hermitian: generator is not Hermitian (residual " +
                              std::to_string(residual) + ")");
    }
    if (dt == 0.0) {
        return Operator::Identity(h.rows(), h.cols());
    }
    Eigen::SelfAdjointEigenSolver<Operator> eig(hermitian_part(h));
    const Eigen::VectorXd& w = eig.eigenvalues();
    Amplitudes phases(w.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        phases(k) = std::polar(1.0, -dt * w(k));
    }
    const Operator& v = eig.eigenvectors();
    return v * phases.asDiagonal() * v.adjoint();
}

ProjectorCheck is_projector(const Operator& a, double tol) {
    ProjectorCheck check;
    if (a.rows() == 0 || a.rows() != a.cols() || !a.allFinite()) {
        return check;
    }
    const double trace = a.trace().real();
    const double rounded = std::round(trace);
    const bool integral = std::abs(trace - rounded) <= kRankTraceTol;
    if (integral) {
        check.rank = static_cast<int>(rounded);
    }
    check.ok = integral && hermiticity_residual(a) <= tol && idempotency_residual(a) <= tol;
    return check;
}

int eigen_rank(const Operator& a) {
    Eigen::SelfAdjointEigenSolver<Operator> eig(hermitian_part(a), Eigen::EigenvaluesOnly);
    return static_cast<int>((eig.eigenvalues().array() > 0.5).count());
}

// --- StateVector ---

StateVector::StateVector(Amplitudes amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() == 0) {
        throw ValidationError("state vector must have positive dimension");
    }
    if (!amplitudes_.allFinite()) {
        throw ValidationError("state vector has non-finite amplitudes");
    }
    const double residual = norm_residual();
    if (residual > kNormTol) {
        throw ValidationError("state vector is not normalized (| ||psi|| - 1 | = " +
                              std::to_string(residual) + ")");
    }
}

StateVector StateVector::normalized(const Amplitudes& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw ValidationError("cannot normalize a zero or non-finite vector");
    }
    return StateVector(v / n, Unchecked{});
}

StateVector StateVector::from_propagation(Amplitudes amplitudes) {
    if (!amplitudes.allFinite()) {
        throw ValidationError("propagated state has non-finite amplitudes");
    }
    return StateVector(std::move(amplitudes), Unchecked{});
}

// --- Projector ---

Projector::Projector(Operator op, double tol) : op_(std::move(op)) {
    require_operator(op_, "projector");
    const ProjectorCheck check = is_projector(op_, tol);
    if (!check.ok) {
        throw ValidationError("matrix is not a projector (hermiticity residual " +
                              std::to_string(hermiticity_residual(op_)) +
                              ", idempotency residual " +
                              std::to_string(idempotency_residual(op_)) + ", trace " +
                              std::to_string(op_.trace().real()) + ")");
    }
    rank_ = check.rank;
}

Projector Projector::diagonal(Eigen::Index dim, int rank) {
    if (dim <= 0 || rank < 0 || rank > dim) {
        throw ValidationError("diagonal projector needs 0 <= rank <= dim, got rank " +
                              std::to_string(rank) + " in dim " + std::to_string(dim));
    }
    Operator op = Operator::Zero(dim, dim);
    for (int k = 0; k < rank; ++k) {
        op(k, k) = 1.0;
    }
    return Projector(std::move(op), rank, Unchecked{});
}

Projector Projector::complement() const {
    return Projector(Operator::Identity(dim(), dim()) - op_,
                     static_cast<int>(dim()) - rank_, Unchecked{});
}

StateVector Projector::top_eigenvector() const {
    Eigen::SelfAdjointEigenSolver<Operator> eig(hermitian_part(op_));
    Amplitudes v = eig.eigenvectors().col(dim() - 1);
    Eigen::Index pivot = 0;
    for (Eigen::Index k = 1; k < v.size(); ++k) {
        if (std::abs(v(k)) > std::abs(v(pivot))) {
            pivot = k;
        }
    }
    const Complex phase = v(pivot) / std::abs(v(pivot));
    v /= phase;
    v(pivot) = std::abs(v(pivot));
    return StateVector::normalized(v);
}

double Projector::confinement_residual(const Amplitudes& psi) const {
    return (op_ * psi - psi).norm();
}

Measurement project_and_renormalize(const Projector& e, const StateVector& psi, double time) {
    if (e.dim() != psi.dim()) {
        throw ValidationError("project_and_renormalize: projector dim " + std::to_string(e.dim()) +
                              " vs state dim " + std::to_string(psi.dim()));
    }
    Amplitudes projected = e.op() * psi.amplitudes();
    const double probability = projected.squaredNorm();
    if (probability < kProbabilityFloor) {
        throw ImpossibleOutcome(probability, time);
    }
    projected /= std::sqrt(probability);
    return {StateVector::from_propagation(std::move(projected)), probability};
}

}  // namespace zeno
