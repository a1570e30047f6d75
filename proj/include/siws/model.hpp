#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "siws/errors.hpp"

namespace siws {

/**
 * Raw epidemiological parameters of a networked multi-virus SIS model with
 * a shared resource: per-node populations and birth/death rates, per-virus
 * recovery, contact, resource-contact, contamination and resource-decay
 * rates. Units are 1/time except population sizes.
 */
struct RawModel {
    int n = 0; ///< population nodes
    int m = 0; ///< viruses

    Eigen::VectorXd population;      ///< N_i > 0
    Eigen::VectorXd birth_death;     ///< mu_i (birth rate == death rate)

    std::vector<Eigen::VectorXd> recovery;         ///< gamma[k], size n
    std::vector<Eigen::MatrixXd> contact;          ///< alpha[k], n x n, >= 0
    std::vector<Eigen::VectorXd> resource_contact; ///< alpha_w[k], size n, >= 0
    std::vector<Eigen::VectorXd> contamination;    ///< zeta[k], size n, >= 0
    Eigen::VectorXd resource_decay;                ///< delta_w[k] > 0

    /// Throws ValidationError on dimension mismatches or invariant
    /// violations (nonpositive populations, negative rates, ...).
    void validate() const;
};

/**
 * One virus layer in normalized coordinates: the node-to-node rate matrix
 * B, healing rates delta, resource coupling beta_w (b), contamination
 * weights c (sum to 1), and the resource decay rate delta_w.
 *
 * With `resource` set, the assembled system matrix is the (n+1)x(n+1)
 *
 *     B_w = [ B        b ]
 *           [ dw*c     0 ]
 *
 * and D_w = diag(delta, delta_w). Without the resource (plain SIS), B_w
 * reduces to B and D_w to diag(delta); beta_w and c are unused.
 */
struct VirusLayer {
    Eigen::MatrixXd beta;    ///< B, n x n, >= 0
    Eigen::VectorXd delta;   ///< healing rates, > 0
    Eigen::VectorXd beta_w;  ///< b, >= 0 (resource mode)
    Eigen::VectorXd c;       ///< contamination weights, sums to 1 (resource mode)
    double delta_w = 0.0;    ///< resource decay, > 0 (resource mode)
    bool resource = true;

    int nodes() const { return static_cast<int>(delta.size()); }
    /// State dimension of this layer: n+1 with resource, n without.
    int dim() const { return nodes() + (resource ? 1 : 0); }

    /// Assembled B_w (or B in SIS mode).
    Eigen::MatrixXd system_matrix() const;
    /// Diagonal of D_w (or D in SIS mode).
    Eigen::VectorXd healing_diagonal() const;
    /// D_w^{-1} B_w, the next-generation matrix behind R0.
    Eigen::MatrixXd next_generation_matrix() const;

    /// Throws ValidationError if the layer is malformed.
    void validate() const;
};

/// The full m-virus system over one shared node set.
struct MultiVirusSystem {
    int n = 0;
    bool resource = true;
    std::vector<VirusLayer> layers;

    int viruses() const { return static_cast<int>(layers.size()); }
    /// Per-virus state block size.
    int block_dim() const { return n + (resource ? 1 : 0); }
    /// Total stacked state dimension m*(n+1) (or m*n).
    int dim() const { return viruses() * block_dim(); }

    void validate() const;
};

/// Build the normalized system from raw parameters. Throws ValidationError
/// on invalid input, including zero total contamination mass for a virus.
MultiVirusSystem normalize(const RawModel& raw);

/// Strong connectivity of the digraph with an edge j -> i whenever
/// M(i,j) != 0 (self-loops ignored).
bool is_irreducible(const Eigen::MatrixXd& M);
/// Irreducibility of the layer's assembled system matrix.
bool is_irreducible(const VirusLayer& layer);

struct Violation {
    int virus = -1; ///< 0-based, -1 if not virus-specific
    int node = -1;  ///< 0-based, -1 if not node-specific
    std::string what;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

/// Non-throwing positivity check: every violated inequality of the model's
/// standing positivity assumption, with (virus, node) coordinates.
ValidationReport validate_assumption1(const MultiVirusSystem& sys);

/// Diagonal mask used by the nonlinearity: the node part of a layer state,
/// with the resource coordinate zeroed (identity on SIS states).
inline Eigen::VectorXd infection_mask(const Eigen::VectorXd& block, bool resource) {
    Eigen::VectorXd x = block;
    if (resource && x.size() > 0)
        x(x.size() - 1) = 0.0;
    return x;
}

} // namespace siws
