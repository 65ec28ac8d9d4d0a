// Generate a small dataset, build its class catalog, and print the
// complexity-derived prior next to the observed shape frequencies.

#include <iostream>

#include "apgp/apgp.hpp"

int main() {
    apgp::DatasetConfig cfg;
    cfg.L = 30;
    cfg.N = 2000;
    cfg.test_size = 500;
    cfg.min_class_support = 10;
    cfg.seed = 7;

    const std::vector<apgp::DatasetRecord> samples = apgp::generate_dataset(cfg);
    const auto [catalog, filtered] = apgp::define_classes(samples, cfg.min_class_support);
    const apgp::PriorVector prior = apgp::build_prior(catalog);

    std::cout << "classes=" << catalog.size() << " of N=" << samples.size() << " samples\n";
    std::cout << "shape  count  p_true  k_scaled  p_hat\n";
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        std::cout << catalog.shapes[i].str() << "  " << catalog.counts[i] << "  "
                  << catalog.p_true[i] << "  " << prior.k_scaled[i] << "  " << prior.p_hat[i]
                  << '\n';
    }
    std::cout << "sum p_hat = " << prior.sum_total << '\n';
    try {
        std::cout << "pearson(log10 p_hat, log10 p_true) = "
                  << apgp::pearson_log(prior.p_hat, catalog.p_true) << '\n';
    } catch (const apgp::CorrelationUndefined& e) {
        std::cout << "pearson undefined: " << e.what() << '\n';
    }
    return 0;
}
