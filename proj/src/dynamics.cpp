#include "siws/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "siws/errors.hpp"

namespace siws {

namespace {

void check_dim(const MultiVirusSystem& sys, const Eigen::VectorXd& y, const char* who) {
    if (y.size() != sys.dim()) {
        std::ostringstream os;
        os << who << ": state has dimension " << y.size() << ", system expects " << sys.dim();
        throw ValidationError(os.str());
    }
}

// sum over viruses of the masked infection fractions, per coordinate
Eigen::VectorXd total_infection(const MultiVirusSystem& sys, const Eigen::VectorXd& y) {
    const int bd = sys.block_dim();
    Eigen::VectorXd total = Eigen::VectorXd::Zero(bd);
    for (int k = 0; k < sys.viruses(); ++k)
        total += infection_mask(y.segment(k * bd, bd), sys.resource);
    return total;
}

} // namespace

Eigen::VectorXd vector_field(const MultiVirusSystem& sys, const Eigen::VectorXd& y) {
    check_dim(sys, y, "vector_field");
    const int bd = sys.block_dim();
    const Eigen::VectorXd total = total_infection(sys, y);
    Eigen::VectorXd dy(sys.dim());
    for (int k = 0; k < sys.viruses(); ++k) {
        const VirusLayer& l = sys.layers[k];
        const auto yk = y.segment(k * bd, bd);
        const Eigen::VectorXd flow = l.system_matrix() * yk;
        dy.segment(k * bd, bd) = (1.0 - total.array()).matrix().cwiseProduct(flow) -
                                 l.healing_diagonal().cwiseProduct(yk);
    }
    return dy;
}

Eigen::MatrixXd jacobian(const MultiVirusSystem& sys, const Eigen::VectorXd& y) {
    check_dim(sys, y, "jacobian");
    const int bd = sys.block_dim();
    const int dim = sys.dim();
    const Eigen::VectorXd total = total_infection(sys, y);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
    for (int k = 0; k < sys.viruses(); ++k) {
        const VirusLayer& l = sys.layers[k];
        const auto yk = y.segment(k * bd, bd);
        const Eigen::MatrixXd Bw = l.system_matrix();
        // the row-scaling correction only touches node rows
        const Eigen::VectorXd mask_flow = infection_mask(Bw * yk, sys.resource);
        Eigen::MatrixXd diag_block = (1.0 - total.array()).matrix().asDiagonal() * Bw;
        diag_block -= Eigen::MatrixXd(l.healing_diagonal().asDiagonal());
        diag_block -= Eigen::MatrixXd(mask_flow.asDiagonal());
        J.block(k * bd, k * bd, bd, bd) = diag_block;
        for (int other = 0; other < sys.viruses(); ++other) {
            if (other == k)
                continue;
            // d/dp_i^other of (1 - sum_l p_i^l) * (B_w y^k)_i
            J.block(k * bd, other * bd, bd, bd) -= Eigen::MatrixXd(mask_flow.asDiagonal());
        }
    }
    return J;
}

bool in_domain(const MultiVirusSystem& sys, const Eigen::VectorXd& y, double tol) {
    if (y.size() != sys.dim())
        return false;
    const int bd = sys.block_dim();
    for (int k = 0; k < sys.viruses(); ++k) {
        const auto yk = y.segment(k * bd, bd);
        for (int i = 0; i < sys.n; ++i)
            if (yk(i) < -tol || yk(i) > 1.0 + tol)
                return false;
        if (sys.resource && yk(bd - 1) < -tol)
            return false;
    }
    for (int i = 0; i < sys.n; ++i) {
        double sum = 0.0;
        for (int k = 0; k < sys.viruses(); ++k)
            sum += y(k * bd + i);
        if (sum > 1.0 + tol)
            return false;
    }
    return true;
}

namespace {

// clamp an accepted state to the sensible domain; returns the worst
// excursion, throws past the guard
double enforce_domain(const MultiVirusSystem& sys, Eigen::VectorXd& y, double guard,
                      double t) {
    const int bd = sys.block_dim();
    double worst = 0.0;
    auto fail = [&](const std::string& what) {
        std::ostringstream os;
        os << "domain violation at t=" << t << ": " << what
           << " (exceeds guard " << guard << "; the sensible domain is invariant, so this "
           << "signals an invalid model or an integrator bug)";
        throw NumericalError(os.str());
    };
    for (int k = 0; k < sys.viruses(); ++k) {
        for (int i = 0; i < sys.n; ++i) {
            double& p = y(k * bd + i);
            if (p < 0.0) {
                worst = std::max(worst, -p);
                if (-p > guard)
                    fail("p < 0 for virus " + std::to_string(k + 1) + ", node " +
                         std::to_string(i + 1));
                p = 0.0;
            } else if (p > 1.0) {
                worst = std::max(worst, p - 1.0);
                if (p - 1.0 > guard)
                    fail("p > 1 for virus " + std::to_string(k + 1) + ", node " +
                         std::to_string(i + 1));
                p = 1.0;
            }
        }
        if (sys.resource) {
            double& z = y(k * bd + sys.n);
            if (z < 0.0) {
                worst = std::max(worst, -z);
                if (-z > guard)
                    fail("z < 0 for virus " + std::to_string(k + 1));
                z = 0.0;
            }
        }
    }
    for (int i = 0; i < sys.n; ++i) {
        double sum = 0.0;
        for (int k = 0; k < sys.viruses(); ++k)
            sum += y(k * bd + i);
        if (sum > 1.0) {
            worst = std::max(worst, sum - 1.0);
            if (sum - 1.0 > guard)
                fail("per-node infection sum > 1 at node " + std::to_string(i + 1));
            for (int k = 0; k < sys.viruses(); ++k)
                y(k * bd + i) /= sum;
        }
    }
    return worst;
}

// Fehlberg 4(5) tableau
constexpr double A21 = 1.0 / 4.0;
constexpr double A31 = 3.0 / 32.0, A32 = 9.0 / 32.0;
constexpr double A41 = 1932.0 / 2197.0, A42 = -7200.0 / 2197.0, A43 = 7296.0 / 2197.0;
constexpr double A51 = 439.0 / 216.0, A52 = -8.0, A53 = 3680.0 / 513.0,
                 A54 = -845.0 / 4104.0;
constexpr double A61 = -8.0 / 27.0, A62 = 2.0, A63 = -3544.0 / 2565.0, A64 = 1859.0 / 4104.0,
                 A65 = -11.0 / 40.0;
constexpr double B51 = 16.0 / 135.0, B53 = 6656.0 / 12825.0, B54 = 28561.0 / 56430.0,
                 B55 = -9.0 / 50.0, B56 = 2.0 / 55.0;
constexpr double B41 = 25.0 / 216.0, B43 = 1408.0 / 2565.0, B44 = 2197.0 / 4104.0,
                 B45 = -1.0 / 5.0;

} // namespace

Trajectory integrate(const MultiVirusSystem& sys, const Eigen::VectorXd& y0, double t0,
                     double t_end, const IntegratorControls& controls) {
    check_dim(sys, y0, "integrate");
    if (!(t_end >= t0))
        throw ValidationError("integrate: t_end must not precede t0");
    if (!in_domain(sys, y0, controls.guard))
        throw ValidationError("integrate: initial state outside the sensible domain");

    const double span = t_end - t0;
    const double max_step = controls.max_step > 0 ? controls.max_step
                                                  : std::max(span / 100.0, 1e-12);
    const double min_step = 1e-14 * std::max(1.0, std::abs(t_end));

    Trajectory traj;
    Eigen::VectorXd y = y0;
    enforce_domain(sys, y, controls.guard, t0);
    double t = t0;
    traj.times.push_back(t);
    traj.states.push_back(y);

    if (span == 0.0)
        return traj;

    double h = std::min(controls.initial_step, max_step);
    std::deque<double> window;

    while (t < t_end) {
        h = std::min(h, t_end - t);
        const Eigen::VectorXd k1 = vector_field(sys, y);
        const Eigen::VectorXd k2 = vector_field(sys, y + h * (A21 * k1));
        const Eigen::VectorXd k3 = vector_field(sys, y + h * (A31 * k1 + A32 * k2));
        const Eigen::VectorXd k4 = vector_field(sys, y + h * (A41 * k1 + A42 * k2 + A43 * k3));
        const Eigen::VectorXd k5 =
            vector_field(sys, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        const Eigen::VectorXd k6 = vector_field(
            sys, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));

        const Eigen::VectorXd y5 =
            y + h * (B51 * k1 + B53 * k3 + B54 * k4 + B55 * k5 + B56 * k6);
        const Eigen::VectorXd y4 = y + h * (B41 * k1 + B43 * k3 + B44 * k4 + B45 * k5);

        double err = 0.0;
        for (int i = 0; i < y.size(); ++i) {
            const double scale =
                controls.abs_tol +
                controls.rel_tol * std::max(std::abs(y(i)), std::abs(y5(i)));
            err = std::max(err, std::abs(y5(i) - y4(i)) / scale);
        }

        if (err <= 1.0) {
            t += h;
            y = y5;
            traj.max_guard_excess =
                std::max(traj.max_guard_excess, enforce_domain(sys, y, controls.guard, t));
            traj.times.push_back(t);
            traj.states.push_back(y);
            ++traj.steps_accepted;

            window.push_back(vector_field(sys, y).lpNorm<Eigen::Infinity>());
            if (static_cast<int>(window.size()) > controls.convergence_window)
                window.pop_front();
            if (controls.stop_on_convergence &&
                static_cast<int>(window.size()) == controls.convergence_window &&
                *std::max_element(window.begin(), window.end()) < controls.convergence_tol) {
                traj.reason = Termination::converged;
                return traj;
            }
        } else {
            ++traj.steps_rejected;
        }

        const double factor =
            err > 0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
        h = std::min(h * factor, max_step);
        if (h < min_step) {
            std::ostringstream os;
            os << "integrate: step size underflow at t=" << t << " (h=" << h << ")";
            throw NumericalError(os.str());
        }
    }
    traj.reason = Termination::reached_end;
    return traj;
}

RegimeResult classify_long_run(const MultiVirusSystem& sys, const Trajectory& traj) {
    RegimeResult res;
    if (traj.states.empty())
        return res;

    // post-hoc settling check on the trailing samples
    const int window = std::min<std::size_t>(20, traj.states.size());
    double worst = 0.0;
    for (int i = 0; i < window; ++i) {
        const auto& s = traj.states[traj.states.size() - 1 - i];
        worst = std::max(worst, vector_field(sys, s).lpNorm<Eigen::Infinity>());
    }
    res.converged = worst < 1e-9;
    if (!res.converged) {
        res.regime = Regime::undecided;
        return res;
    }

    const int bd = sys.block_dim();
    const Eigen::VectorXd& end = traj.states.back();
    int n_endemic = 0;
    int which = -1;
    res.endemic.resize(sys.viruses());
    for (int k = 0; k < sys.viruses(); ++k) {
        const bool endemic = end.segment(k * bd, bd).lpNorm<Eigen::Infinity>() >= 1e-6;
        res.endemic[k] = endemic;
        if (endemic) {
            ++n_endemic;
            which = k;
        }
    }
    if (n_endemic == 0) {
        res.regime = Regime::healthy;
    } else if (n_endemic == 1) {
        res.regime = Regime::single_virus_endemic;
        res.virus = which;
    } else {
        res.regime = Regime::coexisting;
    }
    return res;
}

} // namespace siws
