#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "apgp/catalog.hpp"
#include "apgp/errors.hpp"
#include "apgp/lz_complexity.hpp"

namespace apgp {

// Knobs of the complexity-to-probability pipeline. m_log2 is log2 of the
// phenotype count bound used by the complexity rescaling; unset means it is
// resolved from the catalog (longest binary shape string).
struct PriorConfig {
    double a = 1.0;
    double b = 0.0;
    double alpha = 1.0;                 // final linear damping, alpha <= 1
    std::optional<double> m_log2;       // unset = auto
    bool smoothing = true;

    void validate() const {
        if (a <= 0.0) throw ConfigError("prior: a must be > 0");
        if (alpha <= 0.0 || alpha > 1.0) throw ConfigError("prior: alpha must be in (0, 1]");
        if (m_log2 && *m_log2 <= 0.0) throw ConfigError("prior: m_log2 must be > 0");
    }
};

// Affine rescaling of raw complexities onto [0, m_log2]. A catalog whose
// classes all share one raw value maps to all zeros.
inline std::vector<double> scale_complexities(const std::vector<double>& raw, double m_log2) {
    const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<double> scaled(raw.size(), 0.0);
    if (hi > lo) {
        for (std::size_t i = 0; i < raw.size(); ++i)
            scaled[i] = m_log2 * (raw[i] - lo) / (hi - lo);
    }
    return scaled;
}

// p(x) = 2^(-a*K(x) - b); with the defaults a=1, b=0 this is the plain
// algorithmic-probability estimate.
inline std::vector<double> raw_prior(const std::vector<double>& k_scaled, const PriorConfig& cfg) {
    std::vector<double> p(k_scaled.size());
    for (std::size_t i = 0; i < k_scaled.size(); ++i)
        p[i] = std::exp2(-cfg.a * k_scaled[i] - cfg.b);
    return p;
}

// Geometric-mean smoothing over probability-sorted classes: interior
// classes average with both neighbours, the two end classes with their
// single neighbour. tie_keys breaks sorting ties (shape strings), so the
// result does not depend on input arrangement.
inline std::vector<double> smooth(const std::vector<double>& probs,
                                  const std::vector<std::string>& tie_keys) {
    const std::size_t c = probs.size();
    if (c <= 1) return probs;

    std::vector<std::size_t> order(c);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (probs[i] != probs[j]) return probs[i] < probs[j];
        return tie_keys[i] < tie_keys[j];
    });

    std::vector<double> logp(c);
    for (std::size_t r = 0; r < c; ++r) logp[r] = std::log2(probs[order[r]]);

    std::vector<double> out(c);
    for (std::size_t r = 0; r < c; ++r) {
        double sum = logp[r];
        double cnt = 1.0;
        if (r > 0) { sum += logp[r - 1]; cnt += 1.0; }
        if (r + 1 < c) { sum += logp[r + 1]; cnt += 1.0; }
        out[order[r]] = std::exp2(sum / cnt);
    }
    return out;
}

// Per-class prior probabilities aligned with the catalog ordering, plus the
// complexity columns behind them. No normalization is applied: the vector
// is used as a mean function, not as a distribution.
struct PriorVector {
    std::vector<double> p_hat;
    std::vector<double> k_raw;
    std::vector<double> k_scaled;
    double sum_total = 0.0;
};

// Full pipeline: shape -> binary -> C_LZ -> rescale -> 2^(-aK-b) ->
// optional smoothing -> alpha damping.
inline PriorVector build_prior(const ClassCatalog& catalog, const PriorConfig& cfg = {}) {
    cfg.validate();
    if (catalog.size() == 0) throw NoClasses("build_prior: empty catalog");

    PriorVector prior;
    prior.k_raw.reserve(catalog.size());
    std::size_t longest_bits = 1;
    for (const AbstractShape& s : catalog.shapes) {
        const BinaryString bits = shape_to_binary(s);
        longest_bits = std::max(longest_bits, bits.size());
        prior.k_raw.push_back(clz(bits).raw_clz);
    }

    const double m_log2 = cfg.m_log2 ? *cfg.m_log2 : static_cast<double>(longest_bits);
    prior.k_scaled = scale_complexities(prior.k_raw, m_log2);
    prior.p_hat = raw_prior(prior.k_scaled, cfg);
    if (cfg.smoothing) {
        std::vector<std::string> keys;
        keys.reserve(catalog.size());
        for (const AbstractShape& s : catalog.shapes) keys.push_back(s.str());
        prior.p_hat = smooth(prior.p_hat, keys);
    }
    for (double& p : prior.p_hat) p *= cfg.alpha;
    prior.sum_total = std::accumulate(prior.p_hat.begin(), prior.p_hat.end(), 0.0);
    return prior;
}

inline void write_prior_csv(std::ostream& out, const ClassCatalog& catalog,
                            const PriorVector& prior) {
    out << "shape,k_raw,k_scaled,p_hat\n";
    out.precision(17);
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        out << catalog.shapes[i].str() << ',' << prior.k_raw[i] << ',' << prior.k_scaled[i]
            << ',' << prior.p_hat[i] << '\n';
    }
}

}  // namespace apgp
