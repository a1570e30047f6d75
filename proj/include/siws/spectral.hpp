#pragma once

#include <Eigen/Dense>

#include "siws/model.hpp"

namespace siws {

/// |s| at or below this band is treated as "marginal zero": floating point
/// cannot certify an exact threshold crossing except in structurally exact
/// cases.
inline constexpr double kMarginalBand = 1e-9;

struct SpectralResult {
    double value = 0.0;       ///< rho(.) or s(.)
    Eigen::VectorXd vector;   ///< Perron vector, unit 1-norm; empty for reducible inputs
    long iterations = 0;
    bool converged = false;
};

/**
 * Spectral radius of a nonnegative matrix by power iteration.
 *
 * The iteration runs on N + I (the shift keeps irreducible inputs
 * primitive, so the iteration cannot cycle) with 1-norm normalization and
 * a deterministic uniform start; `tol` bounds the successive-ratio change.
 * Reducible inputs are handled by taking the maximum over strongly
 * connected components; no Perron vector is reported for them.
 *
 * Non-convergence is flagged in the result, never silent.
 */
SpectralResult spectral_radius(const Eigen::MatrixXd& N, double tol = 1e-12,
                               long max_iterations = 100000);

/**
 * Spectral abscissa s(M) = max Re(lambda) of a Metzler matrix, computed as
 * rho(M + cI) - c with c = 1 + max|M_ii|; the shifted matrix is nonnegative
 * with strictly positive diagonal.
 */
SpectralResult spectral_abscissa(const Eigen::MatrixXd& M, double tol = 1e-12,
                                 long max_iterations = 100000);

/// s(B_w - D_w) for one layer.
SpectralResult layer_abscissa(const VirusLayer& layer);

/// Basic reproduction number rho(D_w^{-1} B_w). Its position relative to 1
/// carries the same sign information as s(B_w - D_w).
double reproduction_number(const VirusLayer& layer);

/**
 * Invasion reproduction number rho((I - X(y)) D_w^{-1} B_w) of `invader`
 * against a resident endemic state y (a layer-dim state of the *other*
 * virus). Node coordinates of y must lie in [0, 1].
 */
double invasion_reproduction_number(const VirusLayer& invader,
                                    const Eigen::VectorXd& resident_state);

/// Abscissa form of the invasion threshold: s(-D_w + (I - X(y)) B_w).
double invasion_abscissa(const VirusLayer& invader,
                         const Eigen::VectorXd& resident_state);

} // namespace siws
