#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "zeno/errors.hpp"
#include "zeno/hamiltonian_path.hpp"
#include "zeno/linalg.hpp"
#include "zeno/projector_path.hpp"

namespace zeno {

/// Scenario validation failure; `field` is a dotted path into the document,
/// e.g. "hamiltonian.terms[1].matrix".
class ScenarioError : public ValidationError {
public:
    ScenarioError(std::string field, const std::string& message)
        : ValidationError(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct StroboscopicSettings {
    std::vector<int> n_list{10, 20, 40, 80};
    int micro_substeps = 10;
    std::vector<std::uint64_t> seeds{1};
};

/// A fully validated simulation scenario.
struct Scenario {
    std::string id;
    Eigen::Index dim = 0;
    double horizon = 1.0;
    HamiltonianPath hamiltonian = HamiltonianPath::zero(1, 1.0);
    Projector base_projector = Projector::diagonal(1, 1);
    std::optional<HamiltonianPath> frame_generator;
    std::optional<HamiltonianPath> gauge_generator;
    bool initial_state_from_projector = true;
    StateVector initial_state = StateVector::normalized(Amplitudes::Ones(1));
    int n_steps = 1000;
    StroboscopicSettings stroboscopic;

    ProjectorPath projector_path() const;
};

/// Parses and validates a scenario document. Throws ScenarioError.
Scenario parse_scenario(const nlohmann::json& doc);

/// Reads a scenario file. Throws ScenarioError (field "file") when the file
/// cannot be read or is not valid JSON.
Scenario load_scenario(const std::filesystem::path& path);

/// Inverse of parse_scenario; matrices are written explicitly.
nlohmann::json scenario_to_json(const Scenario& scenario);

nlohmann::json matrix_to_json(const Operator& m);
nlohmann::json hamiltonian_to_json(const HamiltonianPath& path);

}  // namespace zeno
