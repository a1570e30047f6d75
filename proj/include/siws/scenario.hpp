#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "siws/dynamics.hpp"
#include "siws/model.hpp"

namespace siws {

/// Scripted replacement of one virus's node healing rates at a point in
/// time (used to study mitigation switched on mid-run).
struct ScenarioEvent {
    double time = 0.0;
    int virus = 0; ///< 0-based
    Eigen::VectorXd new_delta;
};

/**
 * A self-contained simulation/analysis input: the model (raw or already
 * normalized, exactly one of the two), an initial state, the horizon,
 * integrator controls, the multi-start settings for equilibrium searches,
 * and optional scripted events.
 *
 * The on-disk form is the documented structured-text format
 * (docs/scenario-format.md); `save` emits the canonical form, for which
 * load/save round-trips are byte-identical.
 */
struct Scenario {
    std::string name;
    std::optional<RawModel> raw;
    std::optional<MultiVirusSystem> normalized;
    Eigen::VectorXd initial; ///< stacked full state, in the sensible domain
    double t_end = 10.0;
    IntegratorControls controls;
    std::uint64_t seed = 0;
    int multistart = 20;
    std::vector<ScenarioEvent> events;

    /// The normalized system (normalizing the raw form on demand).
    MultiVirusSystem system() const;
};

/// Parse and validate a scenario file. Errors carry file/line/field
/// diagnostics (ValidationError).
Scenario load_scenario(const std::string& path);

/// Parse from a stream; `origin` names the source in diagnostics.
Scenario parse_scenario(std::istream& in, const std::string& origin);

/// Canonical text form.
std::string scenario_to_string(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

/// Canonical shortest round-trip decimal form used across text outputs.
std::string format_double(double v);

} // namespace siws
