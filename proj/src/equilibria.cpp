#include "siws/equilibria.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "siws/errors.hpp"
#include "siws/spectral.hpp"

namespace siws {

namespace {

MultiVirusSystem single_layer_system(const VirusLayer& layer) {
    MultiVirusSystem sys;
    sys.n = layer.nodes();
    sys.resource = layer.resource;
    sys.layers = {layer};
    return sys;
}

// the endemic map T of one layer; q = D_w^{-1} B_w y
Eigen::VectorXd endemic_map(const Eigen::MatrixXd& Q, const Eigen::VectorXd& y,
                            bool resource) {
    const Eigen::VectorXd q = Q * y;
    Eigen::VectorXd t = q.array() / (1.0 + q.array());
    if (resource) {
        const int last = static_cast<int>(y.size()) - 1;
        t(last) = (q(last) + q(last) * y(last)) / (1.0 + q(last));
    }
    return t;
}

// T^k of the coexistence pair: own argument ya (virus k), other argument yb
Eigen::VectorXd coexistence_map(const Eigen::MatrixXd& Q, const Eigen::VectorXd& ya,
                                const Eigen::VectorXd& yb, bool resource) {
    const Eigen::VectorXd q = Q * ya;
    const Eigen::VectorXd suppress = infection_mask(yb, resource);
    Eigen::VectorXd t = (1.0 - suppress.array()) * q.array() / (1.0 + q.array());
    if (resource) {
        const int last = static_cast<int>(ya.size()) - 1;
        t(last) = (q(last) + q(last) * ya(last)) / (1.0 + q(last));
    }
    return t;
}

double system_residual(const MultiVirusSystem& sys, const Eigen::VectorXd& full) {
    return vector_field(sys, full).lpNorm<Eigen::Infinity>();
}

bool strictly_interior(const MultiVirusSystem& sys, const Eigen::VectorXd& full,
                       double margin) {
    const int bd = sys.block_dim();
    for (int k = 0; k < sys.viruses(); ++k)
        for (int i = 0; i < bd; ++i)
            if (full(k * bd + i) <= margin)
                return false;
    for (int i = 0; i < sys.n; ++i) {
        double sum = 0.0;
        for (int k = 0; k < sys.viruses(); ++k)
            sum += full(k * bd + i);
        if (sum >= 1.0 - margin)
            return false;
    }
    return true;
}

// Newton refinement on the stationarity system vector_field(y) = 0
bool newton_refine(const MultiVirusSystem& sys, Eigen::VectorXd& y, double residual_tol,
                   int max_steps = 60) {
    for (int it = 0; it < max_steps; ++it) {
        const Eigen::VectorXd f = vector_field(sys, y);
        if (f.lpNorm<Eigen::Infinity>() <= residual_tol)
            return true;
        const Eigen::MatrixXd J = jacobian(sys, y);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible())
            return false;
        const Eigen::VectorXd step = lu.solve(-f);
        if (!step.allFinite())
            return false;
        y += step;
        if (!y.allFinite())
            return false;
    }
    return vector_field(sys, y).lpNorm<Eigen::Infinity>() <= residual_tol;
}

} // namespace

Eigen::VectorXd Equilibrium::full_state(const MultiVirusSystem& sys) const {
    if (kind == EquilibriumKind::healthy)
        return Eigen::VectorXd::Zero(sys.dim());
    if (kind == EquilibriumKind::coexisting) {
        if (state.size() != sys.dim())
            throw ValidationError("coexisting equilibrium state has wrong dimension");
        return state;
    }
    if (virus < 0 || virus >= sys.viruses())
        throw ValidationError("single-virus equilibrium has no virus index");
    Eigen::VectorXd full = Eigen::VectorXd::Zero(sys.dim());
    full.segment(virus * sys.block_dim(), sys.block_dim()) = state;
    return full;
}

Equilibrium endemic_fixed_point(const VirusLayer& layer, const FixedPointOptions& options) {
    layer.validate();
    if (!is_irreducible(layer))
        throw ValidationError("endemic_fixed_point: B_w must be irreducible");

    const SpectralResult s = layer_abscissa(layer);
    if (!(s.value > kMarginalBand))
        throw ValidationError("endemic_fixed_point: s(B_w - D_w) must be positive; "
                              "this virus has no endemic equilibrium (threshold or below)");

    const Eigen::MatrixXd Q = layer.next_generation_matrix();
    const SpectralResult perron = spectral_radius(Q);
    if (!perron.converged)
        throw NumericalError("endemic_fixed_point: Perron iteration did not converge");
    const double lambda = perron.value;
    // start on the proof's lower corner: eps*zeta with eps*zeta_i bounded
    // by (lambda-1)/lambda; half the bound keeps the inequality strict
    const double eps = 0.5 * (lambda - 1.0) / (lambda * perron.vector.maxCoeff());
    Eigen::VectorXd y = eps * perron.vector;

    long it = 0;
    double change = std::numeric_limits<double>::infinity();
    while (it < options.max_iterations && change > options.step_tol) {
        const Eigen::VectorXd next = endemic_map(Q, y, layer.resource);
        // the Brouwer box: iterates may only grow, and never past 1
        if (((next - y).array() < -1e-13).any() || (next.array() > 1.0 + 1e-13).any())
            throw NumericalError("endemic_fixed_point: monotone iteration left the "
                                 "invariant box (non-monotone step)");
        change = (next - y).lpNorm<Eigen::Infinity>();
        y = next;
        ++it;
    }

    const MultiVirusSystem single = single_layer_system(layer);
    const double residual = system_residual(single, y);
    if (residual > options.residual_tol) {
        std::ostringstream os;
        os << "endemic_fixed_point: iteration stalled with residual " << residual
           << " after " << it << " iterations";
        throw NumericalError(os.str());
    }

    Equilibrium eq;
    eq.kind = EquilibriumKind::single_virus;
    eq.virus = 0;
    eq.state = y;
    eq.residual = residual;
    eq.certificates = {{"lambda_star", lambda},
                       {"abscissa", s.value},
                       {"iterations", static_cast<double>(it)},
                       {"epsilon", eps}};
    return eq;
}

namespace {

struct CoexistenceIteration {
    Eigen::MatrixXd Q1, Q2;
    const MultiVirusSystem* sys;

    Eigen::VectorXd step(const Eigen::VectorXd& full, double damping) const {
        const int bd = sys->block_dim();
        const auto y1 = full.head(bd);
        const auto y2 = full.tail(bd);
        Eigen::VectorXd next(full.size());
        next.head(bd) = coexistence_map(Q1, y1, y2, sys->resource);
        next.tail(bd) = coexistence_map(Q2, y2, y1, sys->resource);
        return (1.0 - damping) * full + damping * next;
    }
};

std::optional<Equilibrium> run_coexistence_iteration(const MultiVirusSystem& sys,
                                                     Eigen::VectorXd full,
                                                     const FixedPointOptions& options) {
    CoexistenceIteration iter{sys.layers[0].next_generation_matrix(),
                              sys.layers[1].next_generation_matrix(), &sys};
    long it = 0;
    double change = std::numeric_limits<double>::infinity();
    while (it < options.max_iterations && change > options.step_tol) {
        const Eigen::VectorXd next = iter.step(full, options.damping);
        change = (next - full).lpNorm<Eigen::Infinity>();
        full = next;
        ++it;
    }
    double residual = system_residual(sys, full);
    if (residual > options.residual_tol) {
        // oscillation or slow tail: Newton from the damped iterate
        if (!newton_refine(sys, full, options.residual_tol))
            return std::nullopt;
        residual = system_residual(sys, full);
    }
    if (!strictly_interior(sys, full, 1e-9))
        return std::nullopt; // collapsed to a boundary equilibrium
    Equilibrium eq;
    eq.kind = EquilibriumKind::coexisting;
    eq.state = full;
    eq.residual = residual;
    eq.certificates = {{"iterations", static_cast<double>(it)}};
    return eq;
}

} // namespace

std::optional<Equilibrium> coexistence_fixed_point(const MultiVirusSystem& sys,
                                                   const Equilibrium& y1,
                                                   const Equilibrium& y2,
                                                   const FixedPointOptions& options) {
    sys.validate();
    if (sys.viruses() != 2)
        throw ValidationError("coexistence_fixed_point needs a bi-virus system");
    const int bd = sys.block_dim();
    if (y1.state.size() != bd || y2.state.size() != bd)
        throw ValidationError("coexistence_fixed_point: endemic states have wrong dimension");

    // the proof's starting corner: epsilon-scaled Perron vectors of the
    // cross-suppressed next-generation matrices, when both invasion
    // thresholds are exceeded
    Eigen::VectorXd start(2 * bd);
    bool have_corner = false;
    {
        const Eigen::VectorXd m2 = infection_mask(y2.state, sys.resource);
        const Eigen::VectorXd m1 = infection_mask(y1.state, sys.resource);
        const Eigen::MatrixXd S1 =
            (1.0 - m2.array()).matrix().asDiagonal() * sys.layers[0].next_generation_matrix();
        const Eigen::MatrixXd S2 =
            (1.0 - m1.array()).matrix().asDiagonal() * sys.layers[1].next_generation_matrix();
        const SpectralResult p1 = spectral_radius(S1);
        const SpectralResult p2 = spectral_radius(S2);
        if (p1.converged && p2.converged && p1.value > 1.0 && p2.value > 1.0 &&
            p1.vector.size() == bd && p2.vector.size() == bd) {
            const Eigen::VectorXd q1 = sys.layers[0].next_generation_matrix() * p1.vector;
            const Eigen::VectorXd q2 = sys.layers[1].next_generation_matrix() * p2.vector;
            const double eps1 =
                0.5 * std::min((p1.value - 1.0) / q1.maxCoeff(),
                               (y1.state.array() / p1.vector.array()).minCoeff());
            const double eps2 =
                0.5 * std::min((p2.value - 1.0) / q2.maxCoeff(),
                               (y2.state.array() / p2.vector.array()).minCoeff());
            start.head(bd) = eps1 * p1.vector;
            start.tail(bd) = eps2 * p2.vector;
            have_corner = true;
        }
    }
    if (!have_corner) {
        // no certified corner; probe from the midpoint between the two
        // boundary equilibria
        start.head(bd) = 0.5 * y1.state;
        start.tail(bd) = 0.5 * y2.state;
    }
    return run_coexistence_iteration(sys, start, options);
}

std::vector<Equilibrium> coexistence_search(const MultiVirusSystem& sys, int starts,
                                            std::uint64_t seed,
                                            const FixedPointOptions& options) {
    sys.validate();
    if (sys.viruses() != 2)
        throw ValidationError("coexistence_search needs a bi-virus system");
    const int bd = sys.block_dim();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.05, 0.95);

    std::vector<Equilibrium> found;
    for (int s = 0; s < starts; ++s) {
        Eigen::VectorXd y(2 * bd);
        for (int i = 0; i < sys.n; ++i) {
            const double a = unit(rng);
            const double b = unit(rng) * (1.0 - a); // keep p1 + p2 < 1 per node
            y(i) = a;
            y(bd + i) = b;
        }
        if (sys.resource) {
            y(sys.n) = unit(rng);
            y(bd + sys.n) = unit(rng);
        }
        auto eq = run_coexistence_iteration(sys, y, options);
        if (!eq)
            continue;
        const bool duplicate =
            std::any_of(found.begin(), found.end(), [&](const Equilibrium& other) {
                return (other.state - eq->state).lpNorm<Eigen::Infinity>() < 1e-8;
            });
        if (!duplicate)
            found.push_back(std::move(*eq));
    }
    std::sort(found.begin(), found.end(), [](const Equilibrium& a, const Equilibrium& b) {
        return std::lexicographical_compare(a.state.data(), a.state.data() + a.state.size(),
                                            b.state.data(), b.state.data() + b.state.size());
    });
    return found;
}

namespace {

// entrywise A >= B with A != B (the dominance order of the exclusion result)
bool dominates(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    if ((A.array() < B.array() - 1e-14).any())
        return false;
    return (A.array() > B.array() + 1e-14).any();
}

} // namespace

CoexistenceCertificate coexistence_certificate(const MultiVirusSystem& sys,
                                               const FixedPointOptions& options) {
    sys.validate();
    if (sys.viruses() != 2)
        throw ValidationError("coexistence_certificate needs a bi-virus system (m = 2)");
    for (int k = 0; k < 2; ++k)
        if (!is_irreducible(sys.layers[k]))
            throw ValidationError("coexistence_certificate: B_w^" + std::to_string(k + 1) +
                                  " must be irreducible");
    CoexistenceCertificate cert;
    cert.s1 = layer_abscissa(sys.layers[0]).value;
    cert.s2 = layer_abscissa(sys.layers[1]).value;
    if (!(cert.s1 > kMarginalBand))
        throw ValidationError("coexistence_certificate: s(B_w^1 - D_w^1) must be positive");
    if (!(cert.s2 > kMarginalBand))
        throw ValidationError("coexistence_certificate: s(B_w^2 - D_w^2) must be positive");

    const Equilibrium e1 = endemic_fixed_point(sys.layers[0], options);
    const Equilibrium e2 = endemic_fixed_point(sys.layers[1], options);
    cert.invasion12 = invasion_abscissa(sys.layers[0], e2.state);
    cert.invasion21 = invasion_abscissa(sys.layers[1], e1.state);

    cert.dominance12 = dominates(sys.layers[0].next_generation_matrix(),
                                 sys.layers[1].next_generation_matrix());
    cert.dominance21 = dominates(sys.layers[1].next_generation_matrix(),
                                 sys.layers[0].next_generation_matrix());

    if (cert.invasion12 > kMarginalBand && cert.invasion21 > kMarginalBand) {
        cert.verdict = CoexistenceVerdict::sufficient_coexist;
    } else if (cert.dominance12 || cert.dominance21) {
        cert.verdict = CoexistenceVerdict::certified_excluded;
        cert.dominant_virus = cert.dominance12 ? 0 : 1;
    } else {
        cert.verdict = CoexistenceVerdict::inconclusive;
    }
    return cert;
}

HealthyUniqueness healthy_state_unique(const MultiVirusSystem& sys) {
    sys.validate();
    HealthyUniqueness res;
    res.unique = true;
    for (int k = 0; k < sys.viruses(); ++k) {
        if (!is_irreducible(sys.layers[k]))
            throw ValidationError("healthy_state_unique: B_w^" + std::to_string(k + 1) +
                                  " must be irreducible");
        const double s = layer_abscissa(sys.layers[k]).value;
        res.abscissas.push_back(s);
        if (std::abs(s) <= kMarginalBand)
            res.marginal = true;
        else if (s > 0)
            res.unique = false;
    }
    return res;
}

StabilityResult stability_at(const MultiVirusSystem& sys, const Equilibrium& eq) {
    if (eq.residual > 1e-10)
        throw ValidationError("stability_at: equilibrium residual exceeds 1e-10");
    const Eigen::VectorXd full = eq.full_state(sys);
    const Eigen::MatrixXd J = jacobian(sys, full);
    // the full Jacobian is not Metzler off the boundary, so use a dense
    // eigensolver rather than the nonnegative-shift route
    Eigen::EigenSolver<Eigen::MatrixXd> solver(J, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("stability_at: eigensolver failed");
    const double s = solver.eigenvalues().real().maxCoeff();
    StabilityResult res;
    res.abscissa = s;
    if (s < -kMarginalBand)
        res.verdict = Stability::exp_stable;
    else if (s > kMarginalBand)
        res.verdict = Stability::unstable;
    else
        res.verdict = Stability::asymp_stable_marginal;
    return res;
}

} // namespace siws
