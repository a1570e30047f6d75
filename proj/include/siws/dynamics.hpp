#pragma once

#include <Eigen/Dense>
#include <vector>

#include "siws/model.hpp"

namespace siws {

/// State layout: m consecutive blocks, block k = (p^k, z^k) with the
/// resource, or just p^k without it.

/// dy/dt of the full system at state y. Throws ValidationError on
/// dimension mismatch.
Eigen::VectorXd vector_field(const MultiVirusSystem& sys, const Eigen::VectorXd& y);

/**
 * Jacobian of the vector field over all m*(n+1) coordinates.
 *
 * Diagonal block (k,k):  -D_w^k + (I - sum_l X(y^l)) B_w^k - X(B_w^k y^k),
 * off-diagonal block (k,l): -X(B_w^k y^k) acting on the node coordinates
 * of y^l. X(.) zeroes the resource coordinate, so resource rows and
 * columns carry no nonlinear terms.
 */
Eigen::MatrixXd jacobian(const MultiVirusSystem& sys, const Eigen::VectorXd& y);

struct IntegratorControls {
    double abs_tol = 1e-9;
    double rel_tol = 1e-7;
    double initial_step = 1e-3;
    double max_step = 0.0;        ///< 0: t_span / 100
    double guard = 1e-9;          ///< domain-violation tolerance before hard error
    bool stop_on_convergence = false;
    double convergence_tol = 1e-9;   ///< trailing max ||dy/dt||_inf
    int convergence_window = 20;     ///< accepted steps in the trailing window
};

enum class Termination { reached_end, converged, domain_violation };

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    Termination reason = Termination::reached_end;
    double max_guard_excess = 0.0; ///< worst pre-clamp domain excursion seen
    long steps_accepted = 0;
    long steps_rejected = 0;

    const Eigen::VectorXd& last_state() const { return states.back(); }
    double last_time() const { return times.back(); }
};

/**
 * Adaptive embedded Runge-Kutta-Fehlberg 4(5) integration from (t0, y0) to
 * t_end. Every accepted state is checked against the sensible domain
 * (p in [0,1], z >= 0, per-node sum of infections <= 1) and clamped within
 * `guard`; excursions beyond the guard abort with NumericalError, since
 * the domain is invariant for valid models. Step-size underflow also
 * raises NumericalError.
 */
Trajectory integrate(const MultiVirusSystem& sys, const Eigen::VectorXd& y0,
                     double t0, double t_end,
                     const IntegratorControls& controls = {});

inline Trajectory integrate(const MultiVirusSystem& sys, const Eigen::VectorXd& y0,
                            double t_end, const IntegratorControls& controls = {}) {
    return integrate(sys, y0, 0.0, t_end, controls);
}

enum class Regime { healthy, single_virus_endemic, coexisting, undecided };

struct RegimeResult {
    Regime regime = Regime::undecided;
    int virus = -1;                 ///< endemic virus for single_virus_endemic
    std::vector<bool> endemic;      ///< per-virus verdict
    bool converged = false;         ///< trailing window below tolerance
};

/// Long-run classification of a trajectory: per-virus eradicated when
/// ||y^k||_inf < 1e-6 at the end, provided the trailing window of states
/// has settled (max ||dy/dt||_inf < 1e-9); `undecided` otherwise.
RegimeResult classify_long_run(const MultiVirusSystem& sys, const Trajectory& traj);

/// Membership check for the sensible domain, with tolerance.
bool in_domain(const MultiVirusSystem& sys, const Eigen::VectorXd& y, double tol = 1e-9);

} // namespace siws
