#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "siws/model.hpp"

namespace siws {

enum class Strategy { heal_boost, virus_as_vaccine };

/// A replacement healing-rate vector for one virus, with the spectral or
/// dominance facts that certify its post-condition.
struct MitigationPlan {
    Strategy strategy = Strategy::heal_boost;
    int target_virus = 0;
    Eigen::VectorXd new_delta;  ///< replacement node healing rates, all > 0
    Eigen::VectorXd epsilon;    ///< heal_boost slack per node
    Eigen::VectorXd margin;     ///< vaccine relative margin per node
    double cost = 0.0;          ///< sum of new_delta
    std::vector<std::pair<std::string, double>> certificate;
    std::vector<std::string> warnings;
};

/**
 * Healing-rate boost: delta_i = beta_w_i + sum_j beta_ij + eps_i. With any
 * eps_i > 0 the layer's abscissa goes strictly negative (exponential
 * eradication); with eps = 0 the next-generation matrix has unit row sums,
 * so rho = 1 and s = 0 exactly (asymptotic eradication, marginal
 * certificate). Requires an irreducible layer and eps >= 0.
 */
MitigationPlan heal_boost(const VirusLayer& layer, const Eigen::VectorXd& epsilon,
                          int target_virus = 0);

/// heal_boost applied to every virus; the aggregate certificate is
/// exponential only if every virus has some positive epsilon entry.
std::vector<MitigationPlan> all_viruses_heal_boost(
    const MultiVirusSystem& sys, const std::vector<Eigen::VectorXd>& epsilons);

/**
 * Virus-as-vaccine rates for virus 2 of a bi-virus system: per node,
 *
 *     delta_i^2 = (1 + margin_i) * max_j { B_w^2(i,j) / (D_w^1^{-1}B_w^1)(i,j) }
 *
 * with the max over columns where B_w^1(i,j) > 0. The resulting
 * next-generation dominance of virus 1 makes (y1~, 0) the only locally
 * asymptotically stable equilibrium.
 *
 * Hypotheses are hard preconditions: both layers irreducible with positive
 * abscissas, c^1 = c^2 entrywise (1e-12), and the edge support of virus 2
 * contained in that of virus 1. If the new rates push virus 2 below its
 * persistence threshold the plan is still valid (eradication then follows
 * from the threshold condition directly) and carries a warning.
 *
 * With `keep_lower_rates`, nodes whose current rate already exceeds the
 * bound keep it, but only if the dominance certificate still passes.
 */
MitigationPlan vaccine_rates(const MultiVirusSystem& sys, const Eigen::VectorXd& margin,
                             bool keep_lower_rates = false);

/// Scalar-margin convenience overload.
MitigationPlan vaccine_rates(const MultiVirusSystem& sys, double margin = 0.05,
                             bool keep_lower_rates = false);

/// Sum of the plan's replacement healing rates.
double plan_cost(const MitigationPlan& plan);

/// Copy of the layer with node healing rates replaced.
VirusLayer with_healing_rates(const VirusLayer& layer, const Eigen::VectorXd& new_delta);

/// Copy of the system with one virus's node healing rates replaced.
MultiVirusSystem apply_plan(const MultiVirusSystem& sys, const MitigationPlan& plan);

} // namespace siws
