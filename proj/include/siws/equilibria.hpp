#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "siws/dynamics.hpp"
#include "siws/model.hpp"

namespace siws {

enum class Stability { exp_stable, asymp_stable_marginal, unstable, unknown };

enum class EquilibriumKind { healthy, single_virus, coexisting };

/**
 * A classified fixed point. For `single_virus` the state holds one layer
 * block (embed with full_state() for system-level work); for `healthy` and
 * `coexisting` it holds the full stacked state.
 */
struct Equilibrium {
    EquilibriumKind kind = EquilibriumKind::healthy;
    int virus = -1; ///< endemic virus for single_virus
    Eigen::VectorXd state;
    double residual = 0.0; ///< ||vector_field||_inf at the point
    Stability stability = Stability::unknown;
    std::vector<std::pair<std::string, double>> certificates;

    /// Stacked m-block state with zeros for eradicated viruses.
    Eigen::VectorXd full_state(const MultiVirusSystem& sys) const;
};

struct FixedPointOptions {
    double residual_tol = 1e-10;
    double step_tol = 1e-14;
    long max_iterations = 500000;
    double damping = 0.5;      ///< coexistence iteration weight on the map
};

/**
 * The unique single-virus endemic equilibrium of an irreducible layer with
 * s(B_w - D_w) > 0, by monotone fixed-point iteration of
 *
 *     T_i(y)     = q_i / (1 + q_i),                      q = D_w^{-1} B_w y,
 *     T_{n+1}(y) = (q_{n+1} + q_{n+1} y_{n+1}) / (1 + q_{n+1}),
 *
 * started at eps*zeta where zeta is the Perron vector of D_w^{-1} B_w and
 * eps is half the largest value with eps*zeta_i <= (lambda*-1)/lambda*.
 * T is order-preserving with T(eps*zeta) >= eps*zeta and T(1) <= 1, so the
 * iterates increase monotonically and converge; monotonicity is asserted
 * at every step.
 *
 * Throws ValidationError if the hypotheses fail and NumericalError if the
 * iteration stalls above the residual tolerance.
 */
Equilibrium endemic_fixed_point(const VirusLayer& layer,
                                const FixedPointOptions& options = {});

/**
 * Search for a coexisting equilibrium of a bi-virus system from the proof
 * map pair (T^1, T^2), damped y <- (1-w) y + w T(y), started at the
 * epsilon-scaled Perron corner below (y1~, y2~); Newton on the vector
 * field refines or replaces a stalled iteration. Returns nothing when no
 * interior fixed point is found within budget -- which is *not* a
 * certificate of absence.
 *
 * `y1` and `y2` are the single-virus endemic equilibria (layer blocks).
 */
std::optional<Equilibrium> coexistence_fixed_point(const MultiVirusSystem& sys,
                                                   const Equilibrium& y1,
                                                   const Equilibrium& y2,
                                                   const FixedPointOptions& options = {});

/**
 * Multi-start damped-iteration sweep from random interior points; returns
 * all distinct interior equilibria found (deduplicated at 1e-8), sorted
 * lexicographically by state. Deterministic for a fixed seed.
 */
std::vector<Equilibrium> coexistence_search(const MultiVirusSystem& sys,
                                            int starts, std::uint64_t seed,
                                            const FixedPointOptions& options = {});

enum class CoexistenceVerdict { sufficient_coexist, certified_excluded, inconclusive };

struct CoexistenceCertificate {
    CoexistenceVerdict verdict = CoexistenceVerdict::inconclusive;
    int dominant_virus = -1;    ///< 0-based, for certified_excluded
    double s1 = 0, s2 = 0;      ///< s(B_w^k - D_w^k)
    double invasion12 = 0;      ///< s(-D_w^1 + (I - X(y2~)) B_w^1)
    double invasion21 = 0;
    bool dominance12 = false;   ///< (D_w^1)^{-1}B_w^1 > (D_w^2)^{-1}B_w^2
    bool dominance21 = false;
};

/**
 * Bi-virus coexistence/exclusion certificate: `sufficient_coexist` when
 * both invasion abscissas are positive (beyond the marginal band),
 * `certified_excluded` under entrywise next-generation dominance of one
 * virus, `inconclusive` otherwise. Preconditions (irreducibility, both
 * s(B_w^k - D_w^k) > 0) are checked and named on failure.
 */
CoexistenceCertificate coexistence_certificate(const MultiVirusSystem& sys,
                                               const FixedPointOptions& options = {});

struct HealthyUniqueness {
    bool unique = false;
    bool marginal = false;            ///< some |s| within the marginal band
    std::vector<double> abscissas;    ///< s(B_w^k - D_w^k) per virus
};

/// The healthy state is the unique equilibrium iff every layer abscissa is
/// <= 0 (the marginal band counts as zero and is flagged).
HealthyUniqueness healthy_state_unique(const MultiVirusSystem& sys);

struct StabilityResult {
    Stability verdict = Stability::unknown;
    double abscissa = 0.0; ///< s of the Jacobian at the equilibrium
};

/// Linearized stability at an equilibrium: s(J) < -1e-9 exponential,
/// s(J) > 1e-9 unstable, else marginal (linearization inconclusive).
StabilityResult stability_at(const MultiVirusSystem& sys, const Equilibrium& eq);

} // namespace siws
