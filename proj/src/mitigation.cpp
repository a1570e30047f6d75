#include "siws/mitigation.hpp"

#include <cmath>
#include <string>

#include "siws/errors.hpp"
#include "siws/spectral.hpp"

namespace siws {

VirusLayer with_healing_rates(const VirusLayer& layer, const Eigen::VectorXd& new_delta) {
    if (new_delta.size() != layer.nodes())
        throw ValidationError("with_healing_rates: wrong rate vector length");
    if ((new_delta.array() <= 0).any())
        throw ValidationError("with_healing_rates: healing rates must stay positive");
    VirusLayer out = layer;
    out.delta = new_delta;
    return out;
}

MultiVirusSystem apply_plan(const MultiVirusSystem& sys, const MitigationPlan& plan) {
    if (plan.target_virus < 0 || plan.target_virus >= sys.viruses())
        throw ValidationError("apply_plan: plan targets a virus the system does not have");
    MultiVirusSystem out = sys;
    out.layers[plan.target_virus] =
        with_healing_rates(out.layers[plan.target_virus], plan.new_delta);
    return out;
}

MitigationPlan heal_boost(const VirusLayer& layer, const Eigen::VectorXd& epsilon,
                          int target_virus) {
    layer.validate();
    if (!is_irreducible(layer))
        throw ValidationError("heal_boost: B_w must be irreducible");
    if (epsilon.size() != layer.nodes())
        throw ValidationError("heal_boost: epsilon must have one entry per node");
    if ((epsilon.array() < 0).any())
        throw ValidationError("heal_boost: epsilon entries must be nonnegative");

    MitigationPlan plan;
    plan.strategy = Strategy::heal_boost;
    plan.target_virus = target_virus;
    plan.epsilon = epsilon;
    plan.new_delta = layer.beta.rowwise().sum() + epsilon;
    if (layer.resource)
        plan.new_delta += layer.beta_w;
    plan.cost = plan.new_delta.sum();

    const VirusLayer boosted = with_healing_rates(layer, plan.new_delta);
    const double s_after = layer_abscissa(boosted).value;
    const double rho_after = reproduction_number(boosted);
    const bool exponential = (epsilon.array() > 0).any();
    plan.certificate = {{"s_after", s_after},
                        {"rho_after", rho_after},
                        {"exponential", exponential ? 1.0 : 0.0}};
    if (!exponential)
        plan.warnings.push_back("epsilon is zero everywhere: s = 0 by construction, "
                                "eradication is asymptotic rather than exponential");
    return plan;
}

std::vector<MitigationPlan> all_viruses_heal_boost(
    const MultiVirusSystem& sys, const std::vector<Eigen::VectorXd>& epsilons) {
    sys.validate();
    if (static_cast<int>(epsilons.size()) != sys.viruses())
        throw ValidationError("all_viruses_heal_boost: one epsilon vector per virus required");
    std::vector<MitigationPlan> plans;
    plans.reserve(sys.viruses());
    for (int k = 0; k < sys.viruses(); ++k)
        plans.push_back(heal_boost(sys.layers[k], epsilons[k], k));
    return plans;
}

namespace {

bool support_contained(const Eigen::MatrixXd& inner, const Eigen::MatrixXd& outer) {
    for (int i = 0; i < inner.rows(); ++i)
        for (int j = 0; j < inner.cols(); ++j)
            if (inner(i, j) > 0 && !(outer(i, j) > 0))
                return false;
    return true;
}

} // namespace

MitigationPlan vaccine_rates(const MultiVirusSystem& sys, const Eigen::VectorXd& margin,
                             bool keep_lower_rates) {
    sys.validate();
    if (sys.viruses() != 2)
        throw ValidationError("vaccine_rates needs a bi-virus system (m = 2)");
    if (margin.size() != sys.n)
        throw ValidationError("vaccine_rates: margin must have one entry per node");
    if ((margin.array() < 0).any())
        throw ValidationError("vaccine_rates: margins must be nonnegative");

    const VirusLayer& keep = sys.layers[0];   // the benign virus persists
    const VirusLayer& target = sys.layers[1]; // the malignant virus is displaced
    if (!is_irreducible(keep) || !is_irreducible(target))
        throw ValidationError("vaccine_rates: both B_w matrices must be irreducible");
    const double s1 = layer_abscissa(keep).value;
    const double s2 = layer_abscissa(target).value;
    if (!(s1 > kMarginalBand))
        throw ValidationError("vaccine_rates: s(B_w^1 - D_w^1) must be positive "
                              "(virus 1 must persist)");
    if (!(s2 > kMarginalBand))
        throw ValidationError("vaccine_rates: s(B_w^2 - D_w^2) must be positive before "
                              "the change");
    if (sys.resource && (keep.c - target.c).lpNorm<Eigen::Infinity>() > 1e-12)
        throw ValidationError("vaccine_rates: contamination weights must agree (c^1 = c^2)");
    const Eigen::MatrixXd Bw1 = keep.system_matrix();
    const Eigen::MatrixXd Bw2 = target.system_matrix();
    if (!support_contained(Bw2, Bw1))
        throw ValidationError("vaccine_rates: virus 2's edges must be contained in "
                              "virus 1's (E^2 within E^1)");

    const Eigen::MatrixXd NG1 = keep.next_generation_matrix();
    Eigen::VectorXd new_delta(sys.n);
    for (int i = 0; i < sys.n; ++i) {
        double bound = 0.0;
        for (int j = 0; j < Bw1.cols(); ++j)
            if (Bw1(i, j) > 0)
                bound = std::max(bound, Bw2(i, j) / NG1(i, j));
        // irreducibility gives every node row a positive entry
        new_delta(i) = bound * (1.0 + margin(i));
        if (keep_lower_rates)
            new_delta(i) = std::max(new_delta(i), target.delta(i));
    }
    if ((new_delta.array() <= 0).any())
        throw ValidationError("vaccine_rates: computed rates are not positive");

    MitigationPlan plan;
    plan.strategy = Strategy::virus_as_vaccine;
    plan.target_virus = 1;
    plan.margin = margin;
    plan.new_delta = new_delta;
    plan.cost = new_delta.sum();

    const VirusLayer changed = with_healing_rates(target, new_delta);
    const Eigen::MatrixXd NG2 = changed.next_generation_matrix();
    const bool ge = (NG1.array() >= NG2.array() - 1e-14).all();
    const bool strict = (NG1.array() > NG2.array() + 1e-14).any();
    if (!(ge && strict))
        throw ValidationError("vaccine_rates: next-generation dominance failed; "
                              "increase the margin (strict inequality unmet)");
    const double s2_after = layer_abscissa(changed).value;
    plan.certificate = {{"dominance", 1.0},
                        {"s1", s1},
                        {"s2_before", s2},
                        {"s2_after", s2_after}};
    if (!(s2_after > kMarginalBand))
        plan.warnings.push_back(
            "virus 2 is now below its persistence threshold; the exclusion argument's "
            "persistence hypothesis is void, but eradication still follows from the "
            "threshold condition directly");
    return plan;
}

MitigationPlan vaccine_rates(const MultiVirusSystem& sys, double margin,
                             bool keep_lower_rates) {
    return vaccine_rates(sys, Eigen::VectorXd::Constant(sys.n, margin), keep_lower_rates);
}

double plan_cost(const MitigationPlan& plan) {
    return plan.new_delta.sum();
}

} // namespace siws
