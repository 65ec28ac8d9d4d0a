#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "apgp/errors.hpp"

namespace apgp {

inline constexpr double two_pi = 6.283185307179586476925286766559;

// Squared-exponential kernel with unit signal variance.
inline double rbf(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double length_scale) {
    if (x.size() != y.size()) throw LengthMismatch("rbf: dimension mismatch");
    return std::exp(-(x - y).squaredNorm() / (2.0 * length_scale * length_scale));
}

// Row i carries a single 1 at column labels[i].
inline Eigen::MatrixXd one_hot(const std::vector<std::size_t>& labels, std::size_t num_classes) {
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()),
                                              static_cast<Eigen::Index>(num_classes));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= num_classes) throw std::out_of_range("one_hot: label out of range");
        y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(labels[i])) = 1.0;
    }
    return y;
}

inline Eigen::MatrixXd pairwise_sqdist(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd d2(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d2(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = (x.row(i) - x.row(j)).squaredNorm();
            d2(i, j) = d;
            d2(j, i) = d;
        }
    }
    return d2;
}

namespace detail {

// Cholesky with escalating diagonal jitter: 1e-10 growing tenfold up to
// 1e-4, then NotPositiveDefinite.
inline Eigen::LLT<Eigen::MatrixXd> jittered_llt(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) return llt;
    for (double jitter = 1e-10; jitter <= 1e-4; jitter *= 10.0) {
        Eigen::MatrixXd bumped = m;
        bumped.diagonal().array() += jitter;
        llt.compute(bumped);
        if (llt.info() == Eigen::Success) return llt;
    }
    throw NotPositiveDefinite("kernel matrix not positive definite after jitter escalation");
}

inline Eigen::MatrixXd kernel_from_sqdist(const Eigen::MatrixXd& d2, double length_scale) {
    return (-d2.array() / (2.0 * length_scale * length_scale)).exp().matrix();
}

// Shared implementation for the public entry point and the fitter's cached
// path: one factorization serves every output column.
inline double lml_from_sqdist(const Eigen::MatrixXd& d2, const Eigen::MatrixXd& y,
                              const Eigen::VectorXd& mean, double length_scale, double noise) {
    const Eigen::Index n = y.rows();
    const Eigen::Index c = y.cols();
    Eigen::MatrixXd k = kernel_from_sqdist(d2, length_scale);
    k.diagonal().array() += noise;
    const Eigen::LLT<Eigen::MatrixXd> llt = jittered_llt(k);

    const Eigen::MatrixXd centered = y.rowwise() - mean.transpose();
    const Eigen::MatrixXd alpha = llt.solve(centered);
    const double data_fit = -0.5 * (centered.array() * alpha.array()).sum();
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return data_fit - 0.5 * static_cast<double>(c) * log_det -
           0.5 * static_cast<double>(n * c) * std::log(two_pi);
}

}  // namespace detail

// Log marginal likelihood of the multi-output regressor: the per-column
// Gaussian likelihoods share one kernel factorization.
inline double log_marginal_likelihood(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                      const Eigen::VectorXd& mean, double length_scale,
                                      double noise) {
    if (x.rows() != y.rows()) throw LengthMismatch("log_marginal_likelihood: row mismatch");
    if (mean.size() != y.cols()) throw LengthMismatch("log_marginal_likelihood: mean size");
    return detail::lml_from_sqdist(pairwise_sqdist(x), y, mean, length_scale, noise);
}

// Search box and restart policy for hyperparameter fitting.
struct GpFitConfig {
    double ell_lower_factor = 1e-2;   // times ell0
    double ell_upper_factor = 1e3;    // times ell0
    double noise_lower = 1e-10;
    double noise_upper = 10.0;
    double noise_init = 1e-6;
    int grid_points = 20;             // per axis, log-spaced pre-scan
    int seeded_restarts = 2;
    std::uint64_t restart_seed = 0x5eedf17ull;

    void validate() const {
        if (ell_lower_factor <= 0 || ell_upper_factor <= ell_lower_factor)
            throw ConfigError("gp: invalid length-scale bounds");
        if (noise_lower <= 0 || noise_upper <= noise_lower)
            throw ConfigError("gp: invalid noise bounds");
        if (grid_points < 2) throw ConfigError("gp: grid_points must be >= 2");
    }
};

// Trained regressor. coeffs is (K+noise*I)^-1 (Y - mean), so prediction is
// a kernel row times coeffs plus the mean.
struct GpModel {
    Eigen::MatrixXd inputs;      // n x d
    Eigen::VectorXd prior_mean;  // length C
    double length_scale = 1.0;
    double noise = 0.0;
    Eigen::MatrixXd coeffs;      // n x C
    double log_marginal = 0.0;

    Eigen::Index train_size() const noexcept { return inputs.rows(); }
    Eigen::Index num_classes() const noexcept { return prior_mean.size(); }

    // Model with no observations: predictions are exactly the prior mean.
    static GpModel prior_only(Eigen::VectorXd mean, Eigen::Index dim) {
        GpModel m;
        m.inputs = Eigen::MatrixXd(0, dim);
        m.coeffs = Eigen::MatrixXd(0, mean.size());
        m.prior_mean = std::move(mean);
        return m;
    }
};

namespace detail {

struct SearchBox {
    double lo0, hi0, lo1, hi1;
    void clamp(double& u0, double& u1) const {
        u0 = std::min(std::max(u0, lo0), hi0);
        u1 = std::min(std::max(u1, lo1), hi1);
    }
};

// Compass pattern search in (log ell, log noise); only ever moves uphill.
template <typename F>
void pattern_search(const F& objective, const SearchBox& box, double u0, double u1,
                    double& best_f, double& best_u0, double& best_u1) {
    box.clamp(u0, u1);
    double f = objective(u0, u1);
    if (f > best_f) { best_f = f; best_u0 = u0; best_u1 = u1; }
    double step0 = (box.hi0 - box.lo0) / 10.0;
    double step1 = (box.hi1 - box.lo1) / 10.0;
    int evals = 0;
    while ((step0 > 1e-3 || step1 > 1e-3) && evals < 120) {
        double cand_f = f, cand_u0 = u0, cand_u1 = u1;
        const double moves[4][2] = {
            {u0 + step0, u1}, {u0 - step0, u1}, {u0, u1 + step1}, {u0, u1 - step1}};
        for (const auto& mv : moves) {
            double v0 = mv[0], v1 = mv[1];
            box.clamp(v0, v1);
            const double fv = objective(v0, v1);
            ++evals;
            if (fv > cand_f) { cand_f = fv; cand_u0 = v0; cand_u1 = v1; }
        }
        if (cand_f > f) {
            f = cand_f; u0 = cand_u0; u1 = cand_u1;
        } else {
            step0 *= 0.5;
            step1 *= 0.5;
        }
    }
    if (f > best_f) { best_f = f; best_u0 = u0; best_u1 = u1; }
}

}  // namespace detail

// Maximum-likelihood fit of (length scale, noise) inside a bounded log-space
// box around the caller-supplied starting scale ell0. The search is fully
// deterministic: a log-grid pre-scan plus pattern-search refinement from the
// initial point, two seeded restarts, and the best grid cell. The returned
// likelihood is never below the value at (ell0, noise_init).
inline GpModel fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                   const Eigen::VectorXd& prior_mean, double ell0,
                   const GpFitConfig& cfg = {}) {
    cfg.validate();
    if (x.rows() < 1) throw std::invalid_argument("fit: needs at least one training row");
    if (x.rows() != y.rows()) throw LengthMismatch("fit: row mismatch");
    if (prior_mean.size() != y.cols()) throw LengthMismatch("fit: mean size mismatch");
    if (ell0 <= 0.0) throw std::invalid_argument("fit: ell0 must be positive");

    const Eigen::MatrixXd d2 = pairwise_sqdist(x);
    const detail::SearchBox box{std::log(cfg.ell_lower_factor * ell0),
                                std::log(cfg.ell_upper_factor * ell0),
                                std::log(cfg.noise_lower), std::log(cfg.noise_upper)};

    const auto objective = [&](double u0, double u1) -> double {
        try {
            return detail::lml_from_sqdist(d2, y, prior_mean, std::exp(u0), std::exp(u1));
        } catch (const NotPositiveDefinite&) {
            return -std::numeric_limits<double>::infinity();
        }
    };

    double best_f = -std::numeric_limits<double>::infinity();
    double best_u0 = std::log(ell0), best_u1 = std::log(cfg.noise_init);

    // grid pre-scan; also the anchor for the optimum-vs-grid guarantee
    double grid_u0 = best_u0, grid_u1 = best_u1;
    double grid_f = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.grid_points; ++i) {
        const double u0 =
            box.lo0 + (box.hi0 - box.lo0) * i / static_cast<double>(cfg.grid_points - 1);
        for (int j = 0; j < cfg.grid_points; ++j) {
            const double u1 =
                box.lo1 + (box.hi1 - box.lo1) * j / static_cast<double>(cfg.grid_points - 1);
            const double f = objective(u0, u1);
            if (f > grid_f) { grid_f = f; grid_u0 = u0; grid_u1 = u1; }
        }
    }
    if (grid_f > best_f) { best_f = grid_f; best_u0 = grid_u0; best_u1 = grid_u1; }

    detail::pattern_search(objective, box, std::log(ell0), std::log(cfg.noise_init), best_f,
                           best_u0, best_u1);
    std::mt19937_64 rng(cfg.restart_seed);
    for (int r = 0; r < cfg.seeded_restarts; ++r) {
        const double f0 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double f1 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        detail::pattern_search(objective, box, box.lo0 + (box.hi0 - box.lo0) * f0,
                               box.lo1 + (box.hi1 - box.lo1) * f1, best_f, best_u0, best_u1);
    }
    detail::pattern_search(objective, box, grid_u0, grid_u1, best_f, best_u0, best_u1);

    if (!std::isfinite(best_f))
        throw NotPositiveDefinite("fit: every candidate factorization failed");

    GpModel model;
    model.inputs = x;
    model.prior_mean = prior_mean;
    model.length_scale = std::exp(best_u0);
    model.noise = std::exp(best_u1);
    Eigen::MatrixXd k = detail::kernel_from_sqdist(d2, model.length_scale);
    k.diagonal().array() += model.noise;
    model.coeffs = detail::jittered_llt(k).solve(y.rowwise() - prior_mean.transpose());
    model.log_marginal = best_f;
    return model;
}

// Conditional mean at x: prior mean plus the kernel row against the
// training inputs applied to the cached solve. No training data returns the
// prior mean unchanged.
inline Eigen::VectorXd predict_scores(const GpModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.inputs.cols() && model.train_size() > 0)
        throw LengthMismatch("predict_scores: dimension mismatch");
    if (model.train_size() == 0) return model.prior_mean;
    Eigen::VectorXd k(model.train_size());
    const double denom = 2.0 * model.length_scale * model.length_scale;
    for (Eigen::Index i = 0; i < model.train_size(); ++i)
        k(i) = std::exp(-(model.inputs.row(i).transpose() - x).squaredNorm() / denom);
    return model.prior_mean + model.coeffs.transpose() * k;
}

// Argmax class with ties resolved to the lowest index.
inline std::size_t predict_class(const GpModel& model, const Eigen::VectorXd& x) {
    const Eigen::VectorXd scores = predict_scores(model, x);
    std::size_t best = 0;
    for (Eigen::Index i = 1; i < scores.size(); ++i)
        if (scores(i) > scores(best)) best = static_cast<std::size_t>(i);
    return best;
}

inline void write_model_summary(std::ostream& out, const GpModel& model) {
    out.precision(17);
    out << "length_scale=" << model.length_scale << '\n'
        << "noise=" << model.noise << '\n'
        << "n_train=" << model.train_size() << '\n'
        << "n_classes=" << model.num_classes() << '\n';
    out << "prior_mean=";
    for (Eigen::Index i = 0; i < model.prior_mean.size(); ++i) {
        if (i) out << ' ';
        out << model.prior_mean(i);
    }
    out << '\n' << "log_marginal_likelihood=" << model.log_marginal << '\n';
}

}  // namespace apgp
