#include "siws/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "siws/errors.hpp"

namespace siws {

namespace {

// Power iteration on a nonnegative matrix with strictly positive diagonal
// (caller shifts), 1-norm normalization, deterministic uniform start.
SpectralResult power_iteration(const Eigen::MatrixXd& A, double tol, long max_iterations) {
    const int n = static_cast<int>(A.rows());
    SpectralResult res;
    if (n == 0)
        return res;
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / n);
    double lambda = 0.0;
    for (long it = 1; it <= max_iterations; ++it) {
        Eigen::VectorXd w = A * v;
        const double next = w.sum(); // 1-norm of w, since everything is nonnegative
        if (!(next > 0)) {           // zero matrix (or zero row pattern absorbed everything)
            res.value = 0.0;
            res.vector = v;
            res.iterations = it;
            res.converged = true;
            return res;
        }
        w /= next;
        const bool ratio_ok = std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next));
        lambda = next;
        v = w;
        if (ratio_ok) {
            const double residual = (A * v - lambda * v).lpNorm<Eigen::Infinity>();
            if (residual <= 1e-11 * std::max(1.0, lambda)) {
                res.value = lambda;
                res.vector = v;
                res.iterations = it;
                res.converged = true;
                return res;
            }
        }
    }
    res.value = lambda;
    res.vector = v;
    res.iterations = max_iterations;
    res.converged = false;
    return res;
}

// Tarjan-style strongly connected components via two DFS passes
// (Kosaraju); fine at these sizes.
std::vector<std::vector<int>> strong_components(const Eigen::MatrixXd& M) {
    const int n = static_cast<int>(M.rows());
    std::vector<int> order;
    order.reserve(n);
    std::vector<char> seen(n, 0);
    for (int s = 0; s < n; ++s) {
        if (seen[s])
            continue;
        // iterative DFS with explicit post-order
        std::vector<std::pair<int, int>> stack{{s, 0}};
        seen[s] = 1;
        while (!stack.empty()) {
            auto& [u, next] = stack.back();
            bool descended = false;
            for (int v = next; v < n; ++v) {
                // edge u -> v in the "column to row" orientation: M(v,u) != 0
                if (v != u && M(v, u) != 0.0 && !seen[v]) {
                    stack.back().second = v + 1;
                    stack.emplace_back(v, 0);
                    seen[v] = 1;
                    descended = true;
                    break;
                }
            }
            if (!descended) {
                order.push_back(u);
                stack.pop_back();
            }
        }
    }
    std::vector<std::vector<int>> comps;
    std::vector<char> assigned(n, 0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (assigned[*it])
            continue;
        std::vector<int> comp;
        std::vector<int> stack{*it};
        assigned[*it] = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            comp.push_back(u);
            for (int v = 0; v < n; ++v) {
                if (v != u && M(u, v) != 0.0 && !assigned[v]) { // reversed edge
                    assigned[v] = 1;
                    stack.push_back(v);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

} // namespace

SpectralResult spectral_radius(const Eigen::MatrixXd& N, double tol, long max_iterations) {
    if (N.rows() != N.cols())
        throw ValidationError("spectral_radius needs a square matrix");
    if ((N.array() < 0).any())
        throw ValidationError("spectral_radius needs a nonnegative matrix");
    const int n = static_cast<int>(N.rows());
    if (n == 0)
        return {0.0, {}, 0, true};

    // shift by +I so irreducible inputs are primitive (cycles cannot stall
    // the iteration); rho(N) = rho(N + I) - 1 with the same Perron vector
    const Eigen::MatrixXd A = N + Eigen::MatrixXd::Identity(n, n);

    if (is_irreducible(N)) {
        SpectralResult res = power_iteration(A, tol, max_iterations);
        res.value -= 1.0;
        return res;
    }

    // reducible: maximum over strongly connected components; the Perron
    // vector is not globally meaningful, so none is reported
    SpectralResult res;
    res.converged = true;
    for (const auto& comp : strong_components(N)) {
        if (comp.size() == 1) {
            const double d = N(comp[0], comp[0]);
            res.value = std::max(res.value, d);
            continue;
        }
        Eigen::MatrixXd sub(comp.size(), comp.size());
        for (std::size_t a = 0; a < comp.size(); ++a)
            for (std::size_t b = 0; b < comp.size(); ++b)
                sub(a, b) = A(comp[a], comp[b]);
        SpectralResult part = power_iteration(sub, tol, max_iterations);
        res.value = std::max(res.value, part.value - 1.0);
        res.iterations += part.iterations;
        res.converged = res.converged && part.converged;
    }
    res.vector = Eigen::VectorXd();
    return res;
}

SpectralResult spectral_abscissa(const Eigen::MatrixXd& M, double tol, long max_iterations) {
    if (M.rows() != M.cols())
        throw ValidationError("spectral_abscissa needs a square matrix");
    const int n = static_cast<int>(M.rows());
    if (n == 0)
        return {0.0, {}, 0, true};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && M(i, j) < 0)
                throw ValidationError("spectral_abscissa needs a Metzler matrix "
                                      "(nonnegative off-diagonal entries)");
    const double shift = 1.0 + M.diagonal().cwiseAbs().maxCoeff();
    Eigen::MatrixXd A = M + shift * Eigen::MatrixXd::Identity(n, n);
    SpectralResult res = spectral_radius(A, tol, max_iterations);
    res.value -= shift;
    return res;
}

SpectralResult layer_abscissa(const VirusLayer& layer) {
    const Eigen::MatrixXd M =
        layer.system_matrix() - Eigen::MatrixXd(layer.healing_diagonal().asDiagonal());
    return spectral_abscissa(M);
}

double reproduction_number(const VirusLayer& layer) {
    SpectralResult res = spectral_radius(layer.next_generation_matrix());
    if (!res.converged)
        throw NumericalError("reproduction_number: power iteration did not converge");
    return res.value;
}

namespace {

Eigen::MatrixXd suppressed(const Eigen::MatrixXd& M, const VirusLayer& invader,
                           const Eigen::VectorXd& resident_state) {
    if (resident_state.size() != invader.dim())
        throw ValidationError("invasion threshold: resident state has wrong dimension");
    for (int i = 0; i < invader.nodes(); ++i)
        if (resident_state(i) < 0.0 || resident_state(i) > 1.0)
            throw ValidationError("invasion threshold: resident node coordinates must "
                                  "lie in [0, 1]");
    const Eigen::VectorXd x = infection_mask(resident_state, invader.resource);
    return (1.0 - x.array()).matrix().asDiagonal() * M;
}

} // namespace

double invasion_reproduction_number(const VirusLayer& invader,
                                    const Eigen::VectorXd& resident_state) {
    SpectralResult res =
        spectral_radius(suppressed(invader.next_generation_matrix(), invader, resident_state));
    if (!res.converged)
        throw NumericalError("invasion_reproduction_number: power iteration did not converge");
    return res.value;
}

double invasion_abscissa(const VirusLayer& invader, const Eigen::VectorXd& resident_state) {
    const Eigen::MatrixXd M =
        suppressed(invader.system_matrix(), invader, resident_state) -
        Eigen::MatrixXd(invader.healing_diagonal().asDiagonal());
    SpectralResult res = spectral_abscissa(M);
    if (!res.converged)
        throw NumericalError("invasion_abscissa: power iteration did not converge");
    return res.value;
}

} // namespace siws
