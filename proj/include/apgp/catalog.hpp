#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "apgp/shape.hpp"

namespace apgp {

// The classes of one classification problem: unique shapes in lexicographic
// order with their sample counts and empirical probabilities. Probabilities
// are counts over the full pre-filter sample total, so they sum to less
// than 1 whenever rare shapes were filtered away.
struct ClassCatalog {
    std::vector<AbstractShape> shapes;  // lexicographic, defines class indices
    std::vector<std::size_t> counts;
    std::vector<double> p_true;
    std::size_t n_total = 0;  // denominator of p_true

    std::size_t size() const noexcept { return shapes.size(); }

    std::optional<std::size_t> index_of(const AbstractShape& s) const {
        const auto it = std::lower_bound(shapes.begin(), shapes.end(), s);
        if (it == shapes.end() || *it != s) return std::nullopt;
        return static_cast<std::size_t>(it - shapes.begin());
    }
};

}  // namespace apgp
