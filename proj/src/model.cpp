#include "siws/model.hpp"

#include <sstream>
#include <vector>

namespace siws {

namespace {

std::string at(int k, int i) {
    std::ostringstream os;
    os << " (virus " << k + 1;
    if (i >= 0)
        os << ", node " << i + 1;
    os << ")";
    return os.str();
}

} // namespace

void RawModel::validate() const {
    if (n <= 0 || m <= 0)
        throw ValidationError("raw model needs n > 0 nodes and m > 0 viruses");
    if (population.size() != n || birth_death.size() != n)
        throw ValidationError("raw model: population/birth-death vectors must have length n");
    if (static_cast<int>(recovery.size()) != m || static_cast<int>(contact.size()) != m ||
        static_cast<int>(resource_contact.size()) != m ||
        static_cast<int>(contamination.size()) != m || resource_decay.size() != m)
        throw ValidationError("raw model: per-virus parameter lists must have length m");
    for (int i = 0; i < n; ++i) {
        if (!(population(i) > 0))
            throw ValidationError("raw model: population must be positive (node " +
                                  std::to_string(i + 1) + ")");
        if (birth_death(i) < 0)
            throw ValidationError("raw model: negative birth/death rate (node " +
                                  std::to_string(i + 1) + ")");
    }
    for (int k = 0; k < m; ++k) {
        if (recovery[k].size() != n || resource_contact[k].size() != n ||
            contamination[k].size() != n || contact[k].rows() != n || contact[k].cols() != n)
            throw ValidationError("raw model: wrong parameter dimensions" + at(k, -1));
        if (!(resource_decay(k) > 0))
            throw ValidationError("raw model: resource decay rate must be positive" + at(k, -1));
        for (int i = 0; i < n; ++i) {
            if (recovery[k](i) < 0)
                throw ValidationError("raw model: negative recovery rate" + at(k, i));
            if (resource_contact[k](i) < 0 || contamination[k](i) < 0)
                throw ValidationError("raw model: negative resource rate" + at(k, i));
            if (!(recovery[k](i) + birth_death(i) > 0))
                throw ValidationError("raw model: recovery + birth rate must be positive" +
                                      at(k, i));
        }
        if ((contact[k].array() < 0).any())
            throw ValidationError("raw model: negative contact rate" + at(k, -1));
    }
}

Eigen::MatrixXd VirusLayer::system_matrix() const {
    const int n = nodes();
    if (!resource)
        return beta;
    Eigen::MatrixXd Bw = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Bw.topLeftCorner(n, n) = beta;
    Bw.topRightCorner(n, 1) = beta_w;
    Bw.bottomLeftCorner(1, n) = delta_w * c.transpose();
    return Bw;
}

Eigen::VectorXd VirusLayer::healing_diagonal() const {
    if (!resource)
        return delta;
    Eigen::VectorXd d(nodes() + 1);
    d.head(nodes()) = delta;
    d(nodes()) = delta_w;
    return d;
}

Eigen::MatrixXd VirusLayer::next_generation_matrix() const {
    const Eigen::VectorXd d = healing_diagonal();
    if ((d.array() <= 0).any())
        throw ValidationError("layer: singular D_w, healing rates must be positive");
    return d.cwiseInverse().asDiagonal() * system_matrix();
}

void VirusLayer::validate() const {
    const int n = nodes();
    if (n <= 0)
        throw ValidationError("layer: no nodes");
    if (beta.rows() != n || beta.cols() != n)
        throw ValidationError("layer: beta must be n x n");
    if ((beta.array() < 0).any())
        throw ValidationError("layer: negative beta entry");
    if ((delta.array() <= 0).any())
        throw ValidationError("layer: healing rates must be positive");
    if (resource) {
        if (beta_w.size() != n || c.size() != n)
            throw ValidationError("layer: beta_w and c must have length n");
        if ((beta_w.array() < 0).any() || (c.array() < 0).any())
            throw ValidationError("layer: negative resource coupling entry");
        if (!(delta_w > 0))
            throw ValidationError("layer: delta_w must be positive");
        if (std::abs(c.sum() - 1.0) > 1e-12)
            throw ValidationError("layer: contamination weights c must sum to 1");
    }
}

void MultiVirusSystem::validate() const {
    if (layers.empty())
        throw ValidationError("system has no virus layers");
    for (int k = 0; k < viruses(); ++k) {
        const VirusLayer& l = layers[k];
        if (l.nodes() != n || l.resource != resource)
            throw ValidationError("layer " + std::to_string(k + 1) +
                                  " disagrees with the system's node count or resource mode");
        l.validate();
    }
}

MultiVirusSystem normalize(const RawModel& raw) {
    raw.validate();
    MultiVirusSystem sys;
    sys.n = raw.n;
    sys.resource = true;
    sys.layers.reserve(raw.m);
    for (int k = 0; k < raw.m; ++k) {
        const double mass = raw.contamination[k].dot(raw.population);
        if (!(mass > 0))
            throw ValidationError(
                "normalize: total contamination mass sum_j zeta_j N_j is zero for virus " +
                std::to_string(k + 1) + "; the resource never receives it");
        VirusLayer layer;
        layer.resource = true;
        layer.delta = raw.recovery[k] + raw.birth_death;
        layer.delta_w = raw.resource_decay(k);
        layer.beta.resize(raw.n, raw.n);
        for (int i = 0; i < raw.n; ++i)
            for (int j = 0; j < raw.n; ++j)
                layer.beta(i, j) = raw.contact[k](i, j) * raw.population(j) / raw.population(i);
        layer.beta_w = raw.resource_contact[k] * (mass / raw.resource_decay(k));
        layer.c = raw.contamination[k].cwiseProduct(raw.population) / mass;
        if ((layer.delta.array() <= 0).any())
            throw ValidationError("normalize: nonpositive healing rate for virus " +
                                  std::to_string(k + 1));
        layer.validate();
        sys.layers.push_back(std::move(layer));
    }
    return sys;
}

bool is_irreducible(const Eigen::MatrixXd& M) {
    const int n = static_cast<int>(M.rows());
    if (M.cols() != n)
        throw ValidationError("irreducibility check needs a square matrix");
    if (n == 1)
        return true;

    // forward and backward reachability from vertex 0; an edge j -> i
    // exists when M(i,j) != 0
    auto reach = [&](bool transpose) {
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < n; ++v) {
                const double w = transpose ? M(u, v) : M(v, u);
                if (v != u && w != 0.0 && !seen[v]) {
                    seen[v] = 1;
                    ++count;
                    stack.push_back(v);
                }
            }
        }
        return count == n;
    };
    return reach(false) && reach(true);
}

bool is_irreducible(const VirusLayer& layer) {
    return is_irreducible(layer.system_matrix());
}

ValidationReport validate_assumption1(const MultiVirusSystem& sys) {
    ValidationReport report;
    auto add = [&](int k, int i, const std::string& what) {
        report.violations.push_back({k, i, what});
    };
    for (int k = 0; k < sys.viruses(); ++k) {
        const VirusLayer& l = sys.layers[k];
        for (int i = 0; i < l.nodes(); ++i) {
            if (!(l.delta(i) > 0))
                add(k, i, "healing rate delta must be positive");
            for (int j = 0; j < l.nodes(); ++j)
                if (l.beta(i, j) < 0)
                    add(k, i, "beta(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                  ") is negative");
        }
        if (l.resource) {
            if (!(l.delta_w > 0))
                add(k, -1, "resource decay delta_w must be positive");
            for (int i = 0; i < l.nodes(); ++i) {
                if (l.beta_w(i) < 0)
                    add(k, i, "beta_w is negative");
                if (l.c(i) < 0)
                    add(k, i, "contamination weight c is negative");
            }
            if (!(l.c.maxCoeff() > 0))
                add(k, -1, "no positive contamination weight c_l");
        }
    }
    return report;
}

} // namespace siws
