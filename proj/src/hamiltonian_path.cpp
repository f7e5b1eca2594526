#include "zeno/hamiltonian_path.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zeno/errors.hpp"

namespace zeno {

namespace {

void require_horizon(double horizon) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw ValidationError("horizon must be positive and finite, got " + std::to_string(horizon));
    }
}

void require_hermitian(const Operator& h, const char* what) {
    require_operator(h, what);
    const double residual = hermiticity_residual(h);
    if (residual > kStructureTol) {
        throw ValidationError(std::string(what) + " is not Hermitian (residual " +
                              std::to_string(residual) + ")");
    }
}

}  // namespace

double Waveform::operator()(double t) const {
    switch (kind) {
        case Kind::Const:
            return value;
        case Kind::Sin:
            return std::sin(omega * t + phase);
        case Kind::Cos:
            return std::cos(omega * t + phase);
        case Kind::Poly: {
            double acc = 0.0;
            for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
                acc = acc * t + *it;
            }
            return acc;
        }
    }
    return 0.0;
}

HamiltonianPath HamiltonianPath::constant(Operator h, double horizon) {
    require_horizon(horizon);
    require_hermitian(h, "constant Hamiltonian");
    HamiltonianPath path;
    path.kind_ = Kind::Constant;
    path.dim_ = h.rows();
    path.horizon_ = horizon;
    path.terms_.push_back({std::move(h), Waveform::constant(1.0)});
    return path;
}

HamiltonianPath HamiltonianPath::zero(Eigen::Index dim, double horizon) {
    return constant(Operator::Zero(dim, dim), horizon);
}

HamiltonianPath HamiltonianPath::linear_combination(std::vector<WeightedTerm> terms, double horizon) {
    require_horizon(horizon);
    if (terms.empty()) {
        throw ValidationError("linear combination needs at least one term");
    }
    const Eigen::Index dim = terms.front().op.rows();
    for (const auto& term : terms) {
        require_hermitian(term.op, "linear-combination term");
        if (term.op.rows() != dim) {
            throw ValidationError("linear-combination terms have mismatched dimensions");
        }
        if (term.waveform.kind == Waveform::Kind::Poly && term.waveform.coefficients.empty()) {
            throw ValidationError("polynomial waveform needs at least one coefficient");
        }
    }
    HamiltonianPath path;
    path.kind_ = Kind::LinearCombination;
    path.dim_ = dim;
    path.horizon_ = horizon;
    path.terms_ = std::move(terms);
    return path;
}

HamiltonianPath HamiltonianPath::sampled(std::vector<OperatorSample> samples) {
    if (samples.size() < 2) {
        throw ValidationError("sampled path needs at least two samples");
    }
    if (samples.front().t != 0.0) {
        throw ValidationError("sampled path must start at t = 0");
    }
    const Eigen::Index dim = samples.front().op.rows();
    for (std::size_t k = 0; k < samples.size(); ++k) {
        require_operator(samples[k].op, "sampled operator");
        if (samples[k].op.rows() != dim) {
            throw ValidationError("sampled operators have mismatched dimensions");
        }
        if (k > 0 && !(samples[k].t > samples[k - 1].t)) {
            throw ValidationError("sample times must be strictly increasing (at index " +
                                  std::to_string(k) + ")");
        }
    }
    HamiltonianPath path;
    path.kind_ = Kind::Sampled;
    path.dim_ = dim;
    path.horizon_ = samples.back().t;
    require_horizon(path.horizon_);
    path.samples_ = std::move(samples);
    return path;
}

double HamiltonianPath::checked_time(double t) const {
    const double slack = 1e-12 * std::max(1.0, horizon_);
    if (!(t >= -slack && t <= horizon_ + slack)) {
        throw ValidationError("time " + std::to_string(t) + " outside horizon [0, " +
                              std::to_string(horizon_) + "]");
    }
    return std::clamp(t, 0.0, horizon_);
}

Operator HamiltonianPath::evaluate_raw(double t) const {
    t = checked_time(t);
    if (kind_ == Kind::Sampled) {
        auto upper = std::upper_bound(samples_.begin(), samples_.end(), t,
                                      [](double value, const OperatorSample& s) { return value < s.t; });
        if (upper == samples_.end()) {
            return samples_.back().op;
        }
        const auto& right = *upper;
        const auto& left = *(upper - 1);
        const double w = (t - left.t) / (right.t - left.t);
        return (1.0 - w) * left.op + w * right.op;
    }
    Operator acc = Operator::Zero(dim_, dim_);
    for (const auto& term : terms_) {
        acc += term.waveform(t) * term.op;
    }
    return acc;
}

Operator HamiltonianPath::evaluate(double t) const {
    Operator h = evaluate_raw(t);
    if (kind_ == Kind::Sampled) {
        return hermitian_part(h);
    }
    return h;
}

HermiticityReport HamiltonianPath::validate(int n_probe) const {
    if (n_probe < 2) {
        throw ValidationError("validate needs n_probe >= 2");
    }
    HermiticityReport report;
    for (int k = 0; k < n_probe; ++k) {
        const double t = horizon_ * k / (n_probe - 1);
        const double residual = hermiticity_residual(evaluate_raw(t));
        if (residual > report.max_residual) {
            report.max_residual = residual;
            report.worst_time = t;
        }
    }
    return report;
}

HamiltonianPath HamiltonianPath::with_horizon(double horizon) const {
    if (kind_ == Kind::Sampled) {
        throw ValidationError("sampled paths carry their own horizon");
    }
    require_horizon(horizon);
    HamiltonianPath path = *this;
    path.horizon_ = horizon;
    return path;
}

Operator magnus4_step(const HamiltonianPath& path, double t, double h) {
    static const double offset = std::sqrt(3.0) / 6.0;
    static const double a = (3.0 - 2.0 * std::sqrt(3.0)) / 12.0;
    static const double b = (3.0 + 2.0 * std::sqrt(3.0)) / 12.0;
    if (path.kind() == HamiltonianPath::Kind::Constant) {
        return expm_skew_hermitian(path.evaluate(t), h);
    }
    const Operator h1 = path.evaluate(t + (0.5 - offset) * h);
    const Operator h2 = path.evaluate(t + (0.5 + offset) * h);
    const Operator first = expm_skew_hermitian(hermitian_part(b * h1 + a * h2), h);
    const Operator second = expm_skew_hermitian(hermitian_part(a * h1 + b * h2), h);
    return second * first;
}

}  // namespace zeno
