#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "siws/equilibria.hpp"
#include "siws/mitigation.hpp"
#include "siws/scenario.hpp"

namespace siws {

using ordered_json = nlohmann::ordered_json;

/// Per-virus spectral summary.
struct VirusAnalysis {
    bool irreducible = false;
    double abscissa = 0.0; ///< s(B_w - D_w)
    double r0 = 0.0;
};

/**
 * The full analysis bundle behind `siws analyze`: per-virus thresholds,
 * healthy-state uniqueness, and (for bi-virus systems with both viruses
 * above threshold) endemic equilibria, invasion numbers, the
 * coexistence/exclusion certificate and a stability-classified equilibrium
 * list. Deterministic: repeated runs produce identical JSON.
 */
struct AnalysisReport {
    std::string scenario;
    int n = 0, m = 0;
    bool resource = true;
    std::vector<VirusAnalysis> viruses;
    HealthyUniqueness healthy;
    bool bivirus_analysis = false;
    std::vector<Equilibrium> equilibria; ///< healthy, boundary, coexisting if found
    CoexistenceCertificate certificate;  ///< valid when bivirus_analysis
    double invasion_r12 = 0, invasion_r21 = 0;
    std::uint64_t seed = 0;
};

AnalysisReport analyze(const Scenario& scenario);

/// Canonically ordered, schema-versioned JSON.
ordered_json report_to_json(const AnalysisReport& report);

struct SimulationResult {
    Trajectory trajectory;     ///< spliced across scripted events
    RegimeResult regime;
    std::vector<double> event_times_applied;
};

/// Integrate the scenario, applying scripted events as consecutive
/// integrations with rate replacement at the event times.
SimulationResult simulate(const Scenario& scenario);

ordered_json summary_to_json(const Scenario& scenario, const SimulationResult& result);

/// Trajectory CSV: t, p[k][i] for all k,i, z[k] per virus, then the mean
/// infection pbar[k] per virus; full double precision, LF line endings.
std::string trajectory_to_csv(const MultiVirusSystem& sys, const Trajectory& traj);

/// Static SVG line chart of the per-virus mean infection and contamination.
std::string trajectory_to_svg(const MultiVirusSystem& sys, const Trajectory& traj,
                              const std::string& title);

/// Derived scenario with a mitigation plan scripted at `event_time`.
Scenario scenario_with_plan(const Scenario& base, const MitigationPlan& plan,
                            double event_time);

ordered_json plan_to_json(const MitigationPlan& plan);

/// Deterministic fan-out: analyze several scenarios concurrently, merge
/// results keyed by scenario name.
ordered_json sweep(const std::vector<std::string>& paths);

} // namespace siws
