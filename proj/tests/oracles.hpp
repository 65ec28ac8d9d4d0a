#pragma once

// Reference implementations used only by tests. Each one restates its
// quantity from the definition with a different mechanism than the library,
// so agreement is evidence rather than tautology.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "apgp/rna.hpp"

namespace oracles {

// Exhaustive-history phrase count, straight from the definition: grow the
// current word one symbol at a time while it still occurs as a substring of
// everything before its last symbol; the first non-reproducible word closes
// the phrase. Quadratic substring search, no production-style source scan.
inline std::size_t lz76_phrases(const std::string& s) {
    const std::size_t n = s.size();
    std::size_t phrases = 0;
    std::size_t p = 0;
    while (p < n) {
        std::size_t len = 1;
        while (p + len <= n) {
            const std::string word = s.substr(p, len);
            const std::string context = s.substr(0, p + len - 1);
            if (context.find(word) == std::string::npos) break;
            ++len;
        }
        ++phrases;  // reaching the end with every word reproducible is the incomplete phrase
        p += std::min(len, n - p);
    }
    return phrases;
}

// Maximum non-crossing base-pair count by exhaustive recursion: position i
// is unpaired, or pairs with every admissible k and the two sides are
// independent subproblems. No memo table, so it shares nothing with the DP.
inline int max_pairs(const std::string& seq, int i, int j, int min_loop) {
    if (j - i < min_loop + 1) return 0;
    int best = max_pairs(seq, i + 1, j, min_loop);
    for (int k = i + min_loop + 1; k <= j; ++k) {
        if (!apgp::can_pair(seq[static_cast<std::size_t>(i)], seq[static_cast<std::size_t>(k)]))
            continue;
        const int inside = max_pairs(seq, i + 1, k - 1, min_loop);
        const int outside = max_pairs(seq, k + 1, j, min_loop);
        best = std::max(best, 1 + inside + outside);
    }
    return best;
}

inline int max_pairs(const std::string& seq, int min_loop) {
    if (seq.empty()) return 0;
    return max_pairs(seq, 0, static_cast<int>(seq.size()) - 1, min_loop);
}

// Multi-output Gaussian log marginal likelihood through an eigendecomposition
// of the noisy kernel: explicit inverse and log-determinant, no Cholesky.
inline double log_marginal_likelihood(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                      const Eigen::VectorXd& mean, double length_scale,
                                      double noise) {
    const Eigen::Index n = x.rows();
    const Eigen::Index c = y.cols();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d2 = (x.row(i) - x.row(j)).squaredNorm();
            k(i, j) = std::exp(-d2 / (2.0 * length_scale * length_scale));
        }
    k.diagonal().array() += noise;

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(eig.eigenvalues()(i));
    const Eigen::MatrixXd kinv = eig.eigenvectors() *
                                 eig.eigenvalues().cwiseInverse().asDiagonal() *
                                 eig.eigenvectors().transpose();

    double quad = 0.0;
    for (Eigen::Index col = 0; col < c; ++col) {
        const Eigen::VectorXd centered = y.col(col).array() - mean(col);
        quad += centered.dot(kinv * centered);
    }
    return -0.5 * quad - 0.5 * static_cast<double>(c) * logdet -
           0.5 * static_cast<double>(n * c) * std::log(2.0 * 3.14159265358979323846);
}

}  // namespace oracles
