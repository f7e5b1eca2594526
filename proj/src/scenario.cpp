#include "zeno/scenario.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "zeno/zeno_dynamics.hpp"

namespace zeno {

using nlohmann::json;

namespace {

const char* const kTopEigenvector = "top-eigenvector-of-E0";

[[noreturn]] void fail(const std::string& field, const std::string& message) { throw ScenarioError(field, message); }

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string index(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const json& require(const json& obj, const std::string& base, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) {
        fail(join(base, key), "missing required field");
    }
    return obj.at(key);
}

double read_number(const json& v, const std::string& field) {
    if (!v.is_number()) {
        fail(field, "expected a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        fail(field, "must be finite");
    }
    return x;
}

std::int64_t read_integer(const json& v, const std::string& field) {
    if (!v.is_number_integer()) {
        fail(field, "expected an integer");
    }
    return v.get<std::int64_t>();
}

Complex read_complex(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 2) {
        fail(field, "expected a [re, im] pair");
    }
    return {read_number(v[0], index(field, 0)), read_number(v[1], index(field, 1))};
}

Operator read_matrix(const json& v, const std::string& field, Eigen::Index dim) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != dim) {
        fail(field, "expected " + std::to_string(dim) + " rows");
    }
    Operator m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const json& row = v[static_cast<std::size_t>(i)];
        const std::string row_field = index(field, static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
            fail(row_field, "expected " + std::to_string(dim) + " [re, im] entries");
        }
        for (Eigen::Index j = 0; j < dim; ++j) {
            m(i, j) = read_complex(row[static_cast<std::size_t>(j)], index(row_field, static_cast<std::size_t>(j)));
        }
    }
    return m;
}

Waveform read_waveform(const json& v, const std::string& field) {
    const json& type = require(v, field, "type");
    if (!type.is_string()) {
        fail(join(field, "type"), "expected a string");
    }
    const std::string name = type.get<std::string>();
    auto optional_number = [&](const char* key, double fallback) {
        return v.contains(key) ? read_number(v.at(key), join(field, key)) : fallback;
    };
    if (name == "const") {
        return Waveform::constant(optional_number("value", 1.0));
    }
    if (name == "sin" || name == "cos") {
        const double omega = read_number(require(v, field, "omega"), join(field, "omega"));
        const double phase = optional_number("phase", 0.0);
        return name == "sin" ? Waveform::sine(omega, phase) : Waveform::cosine(omega, phase);
    }
    if (name == "poly") {
        const json& c = require(v, field, "coefficients");
        if (!c.is_array() || c.empty()) {
            fail(join(field, "coefficients"), "expected a non-empty list of numbers");
        }
        std::vector<double> coefficients;
        for (std::size_t i = 0; i < c.size(); ++i) {
            coefficients.push_back(read_number(c[i], index(join(field, "coefficients"), i)));
        }
        return Waveform::polynomial(std::move(coefficients));
    }
    fail(join(field, "type"), "unknown waveform '" + name + "' (expected const, sin, cos or poly)");
}

Operator read_hermitian(const json& v, const std::string& field, Eigen::Index dim) {
    Operator m = read_matrix(v, field, dim);
    const double residual = hermiticity_residual(m);
    if (residual > kStructureTol) {
        fail(field, "matrix is not Hermitian (residual " + std::to_string(residual) + ")");
    }
    return m;
}

HamiltonianPath read_path(const json& v, const std::string& field, Eigen::Index dim, double horizon) {
    const json& kind = require(v, field, "kind");
    if (!kind.is_string()) {
        fail(join(field, "kind"), "expected a string");
    }
    const std::string name = kind.get<std::string>();
    try {
        if (name == "constant") {
            return HamiltonianPath::constant(read_hermitian(require(v, field, "matrix"), join(field, "matrix"), dim),
                                             horizon);
        }
        if (name == "linear_combination") {
            const json& terms = require(v, field, "terms");
            if (!terms.is_array() || terms.empty()) {
                fail(join(field, "terms"), "expected a non-empty list");
            }
            std::vector<WeightedTerm> parsed;
            for (std::size_t i = 0; i < terms.size(); ++i) {
                const std::string term_field = index(join(field, "terms"), i);
                parsed.push_back({read_hermitian(require(terms[i], term_field, "matrix"), join(term_field, "matrix"), dim),
                                  read_waveform(require(terms[i], term_field, "waveform"), join(term_field, "waveform"))});
            }
            return HamiltonianPath::linear_combination(std::move(parsed), horizon);
        }
        if (name == "sampled") {
            const json& samples = require(v, field, "samples");
            if (!samples.is_array()) {
                fail(join(field, "samples"), "expected a list");
            }
            std::vector<OperatorSample> parsed;
            for (std::size_t i = 0; i < samples.size(); ++i) {
                const std::string sample_field = index(join(field, "samples"), i);
                parsed.push_back({read_number(require(samples[i], sample_field, "t"), join(sample_field, "t")),
                                  read_hermitian(require(samples[i], sample_field, "matrix"), join(sample_field, "matrix"),
                                              dim)});
            }
            HamiltonianPath path = HamiltonianPath::sampled(std::move(parsed));
            if (std::abs(path.horizon() - horizon) > 1e-12 * std::max(1.0, horizon)) {
                fail(join(field, "samples"), "sample times must span [0, horizon]");
            }
            return path;
        }
    } catch (const ScenarioError&) {
        throw;
    } catch (const ValidationError& e) {
        fail(field, e.what());
    }
    fail(join(field, "kind"), "unknown kind '" + name + "' (expected constant, linear_combination or sampled)");
}

Projector read_projector(const json& v, const std::string& field, Eigen::Index dim) {
    if (v.is_object() && v.contains("preset")) {
        const json& preset = v.at("preset");
        if (!preset.is_string() || preset.get<std::string>() != "rank_diagonal") {
            fail(join(field, "preset"), "unknown preset (expected rank_diagonal)");
        }
        const auto rank = read_integer(require(v, field, "rank"), join(field, "rank"));
        if (rank < 0 || rank > dim) {
            fail(join(field, "rank"), "must lie in [0, dim]");
        }
        return Projector::diagonal(dim, static_cast<int>(rank));
    }
    const Operator m = read_matrix(require(v, field, "matrix"), join(field, "matrix"), dim);
    try {
        return Projector(m);
    } catch (const ValidationError& e) {
        fail(join(field, "matrix"), e.what());
    }
}

json path_or_null(const std::optional<HamiltonianPath>& path) {
    return path ? hamiltonian_to_json(*path) : json(nullptr);
}

json waveform_to_json(const Waveform& w) {
    switch (w.kind) {
        case Waveform::Kind::Const:
            return {{"type", "const"}, {"value", w.value}};
        case Waveform::Kind::Sin:
            return {{"type", "sin"}, {"omega", w.omega}, {"phase", w.phase}};
        case Waveform::Kind::Cos:
            return {{"type", "cos"}, {"omega", w.omega}, {"phase", w.phase}};
        case Waveform::Kind::Poly:
            return {{"type", "poly"}, {"coefficients", w.coefficients}};
    }
    return nullptr;
}

}  // namespace

ProjectorPath Scenario::projector_path() const {
    if (!frame_generator) {
        return ProjectorPath::constant(base_projector, horizon);
    }
    return ProjectorPath(base_projector, UnitaryGeneratorPath{*frame_generator});
}

Scenario parse_scenario(const json& doc) {
    if (!doc.is_object()) {
        fail("$", "scenario must be a JSON object");
    }
    Scenario s;
    const json& id = require(doc, "", "id");
    if (!id.is_string() || id.get<std::string>().empty()) {
        fail("id", "expected a non-empty string");
    }
    s.id = id.get<std::string>();
    for (char c : s.id) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) {
            fail("id", "may only contain letters, digits, '-', '_' and '.'");
        }
    }

    const auto dim = read_integer(require(doc, "", "dim"), "dim");
    if (dim < 1 || dim > 512) {
        fail("dim", "must lie in [1, 512]");
    }
    s.dim = static_cast<Eigen::Index>(dim);

    s.horizon = read_number(require(doc, "", "horizon"), "horizon");
    if (!(s.horizon > 0.0)) {
        fail("horizon", "must be positive");
    }

    s.hamiltonian = read_path(require(doc, "", "hamiltonian"), "hamiltonian", s.dim, s.horizon);
    s.base_projector = read_projector(require(doc, "", "base_projector"), "base_projector", s.dim);
    if (doc.contains("frame_generator") && !doc.at("frame_generator").is_null()) {
        s.frame_generator = read_path(doc.at("frame_generator"), "frame_generator", s.dim, s.horizon);
    }
    if (doc.contains("gauge_generator") && !doc.at("gauge_generator").is_null()) {
        s.gauge_generator = read_path(doc.at("gauge_generator"), "gauge_generator", s.dim, s.horizon);
    }

    const json& initial = require(doc, "", "initial_state");
    if (initial.is_string()) {
        if (initial.get<std::string>() != kTopEigenvector) {
            fail("initial_state", std::string("expected '") + kTopEigenvector + "' or a list of [re, im] amplitudes");
        }
        if (s.base_projector.rank() < 1) {
            fail("initial_state", "the base projector has rank 0");
        }
        s.initial_state_from_projector = true;
        s.initial_state = s.base_projector.top_eigenvector();
    } else {
        if (!initial.is_array() || static_cast<Eigen::Index>(initial.size()) != s.dim) {
            fail("initial_state", "expected " + std::to_string(s.dim) + " [re, im] amplitudes");
        }
        Amplitudes psi(s.dim);
        for (Eigen::Index i = 0; i < s.dim; ++i) {
            psi(i) = read_complex(initial[static_cast<std::size_t>(i)], index("initial_state", static_cast<std::size_t>(i)));
        }
        try {
            s.initial_state = StateVector(std::move(psi));
        } catch (const ValidationError& e) {
            fail("initial_state", e.what());
        }
        s.initial_state_from_projector = false;
    }
    try {
        require_initial_condition(s.base_projector, s.initial_state);
    } catch (const ValidationError& e) {
        fail("initial_state", e.what());
    }

    s.n_steps = default_steps(s.horizon);
    if (doc.contains("integrator")) {
        const json& integrator = doc.at("integrator");
        if (integrator.contains("n_steps")) {
            const auto n = read_integer(integrator.at("n_steps"), "integrator.n_steps");
            if (n < 1) {
                fail("integrator.n_steps", "must be >= 1");
            }
            s.n_steps = static_cast<int>(n);
        }
    }

    if (doc.contains("stroboscopic")) {
        const json& strobo = doc.at("stroboscopic");
        if (strobo.contains("n_list")) {
            const json& list = strobo.at("n_list");
            if (!list.is_array() || list.empty()) {
                fail("stroboscopic.n_list", "expected a non-empty list of integers");
            }
            s.stroboscopic.n_list.clear();
            for (std::size_t i = 0; i < list.size(); ++i) {
                const auto n = read_integer(list[i], index("stroboscopic.n_list", i));
                if (n < 1 || (i > 0 && n <= s.stroboscopic.n_list.back())) {
                    fail(index("stroboscopic.n_list", i), "entries must be positive and strictly increasing");
                }
                s.stroboscopic.n_list.push_back(static_cast<int>(n));
            }
        }
        if (strobo.contains("micro_substeps")) {
            const auto m = read_integer(strobo.at("micro_substeps"), "stroboscopic.micro_substeps");
            if (m < 1) {
                fail("stroboscopic.micro_substeps", "must be >= 1");
            }
            s.stroboscopic.micro_substeps = static_cast<int>(m);
        }
        if (strobo.contains("seeds")) {
            const json& seeds = strobo.at("seeds");
            if (!seeds.is_array()) {
                fail("stroboscopic.seeds", "expected a list of non-negative integers");
            }
            s.stroboscopic.seeds.clear();
            for (std::size_t i = 0; i < seeds.size(); ++i) {
                if (!seeds[i].is_number_unsigned()) {
                    fail(index("stroboscopic.seeds", i), "expected a non-negative integer");
                }
                s.stroboscopic.seeds.push_back(seeds[i].get<std::uint64_t>());
            }
        }
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError("file", "cannot open " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ScenarioError("file", std::string("invalid JSON: ") + e.what());
    }
    return parse_scenario(doc);
}

json matrix_to_json(const Operator& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back({m(i, j).real(), m(i, j).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

json hamiltonian_to_json(const HamiltonianPath& path) {
    switch (path.kind()) {
        case HamiltonianPath::Kind::Constant:
            return {{"kind", "constant"}, {"matrix", matrix_to_json(path.terms().front().op)}};
        case HamiltonianPath::Kind::LinearCombination: {
            json terms = json::array();
            for (const auto& term : path.terms()) {
                terms.push_back({{"matrix", matrix_to_json(term.op)}, {"waveform", waveform_to_json(term.waveform)}});
            }
            return {{"kind", "linear_combination"}, {"terms", std::move(terms)}};
        }
        case HamiltonianPath::Kind::Sampled: {
            json samples = json::array();
            for (const auto& sample : path.samples()) {
                samples.push_back({{"t", sample.t}, {"matrix", matrix_to_json(sample.op)}});
            }
            return {{"kind", "sampled"}, {"samples", std::move(samples)}};
        }
    }
    return nullptr;
}

json scenario_to_json(const Scenario& s) {
    json doc;
    doc["id"] = s.id;
    doc["dim"] = s.dim;
    doc["horizon"] = s.horizon;
    doc["hamiltonian"] = hamiltonian_to_json(s.hamiltonian);
    doc["base_projector"] = {{"matrix", matrix_to_json(s.base_projector.op())}};
    doc["frame_generator"] = path_or_null(s.frame_generator);
    if (s.gauge_generator) {
        doc["gauge_generator"] = hamiltonian_to_json(*s.gauge_generator);
    }
    if (s.initial_state_from_projector) {
        doc["initial_state"] = kTopEigenvector;
    } else {
        json amplitudes = json::array();
        for (Eigen::Index i = 0; i < s.dim; ++i) {
            amplitudes.push_back({s.initial_state[i].real(), s.initial_state[i].imag()});
        }
        doc["initial_state"] = std::move(amplitudes);
    }
    doc["integrator"] = {{"n_steps", s.n_steps}};
    doc["stroboscopic"] = {{"n_list", s.stroboscopic.n_list},
                           {"micro_substeps", s.stroboscopic.micro_substeps},
                           {"seeds", s.stroboscopic.seeds}};
    return doc;
}

}  // namespace zeno
