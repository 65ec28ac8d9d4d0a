#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "apgp/errors.hpp"
#include "apgp/shape.hpp"

namespace apgp {

// Non-empty string over {0,1}.
class BinaryString {
  public:
    explicit BinaryString(std::string bits) : bits_(std::move(bits)) {
        if (bits_.empty()) throw EmptyShape("binary string is empty");
        for (const char c : bits_)
            if (c != '0' && c != '1')
                throw MalformedStructure(std::string("invalid binary symbol '") + c + "'");
    }

    std::string_view view() const noexcept { return bits_; }
    std::size_t size() const noexcept { return bits_.size(); }

    BinaryString reversed() const {
        return BinaryString(std::string(bits_.rbegin(), bits_.rend()));
    }

    bool all_same() const noexcept {
        return bits_.find_first_not_of(bits_.front()) == std::string::npos;
    }

    friend bool operator==(const BinaryString&, const BinaryString&) = default;

  private:
    std::string bits_;
};

struct ComplexityEstimate {
    double raw_clz = 0.0;          // C_LZ in bits
    std::size_t nw_forward = 1;    // LZ76 phrase count of the string
    std::size_t nw_reverse = 1;    // LZ76 phrase count of its reversal
    std::size_t n = 1;             // string length
};

// Number of phrases in the LZ76 exhaustive production history
// (Kaspar-Schuster procedure). Each phrase is the shortest prefix of the
// remaining suffix that cannot be copied from earlier text, where the copy
// source may start anywhere before the phrase and overlap into it. A final
// phrase left incomplete at the end of the string counts as one phrase.
inline std::size_t lz76_phrase_count(const BinaryString& s) {
    const std::string_view v = s.view();
    const std::size_t n = v.size();
    std::size_t phrases = 1;  // v[0] always opens the history
    std::size_t l = 1;        // start of the phrase being parsed
    while (l < n) {
        std::size_t kmax = 0;  // longest copyable prefix of v[l..)
        for (std::size_t i = 0; i < l; ++i) {
            std::size_t k = 0;
            while (l + k < n && v[i + k] == v[l + k]) ++k;
            kmax = std::max(kmax, k);
            if (l + kmax >= n) break;  // remainder is already fully copyable
        }
        ++phrases;
        if (l + kmax >= n) break;  // terminal incomplete phrase
        l += kmax + 1;
    }
    return phrases;
}

// C_LZ complexity in bits. Constant strings 0^n and 1^n are special-cased
// to log2(n); everything else is log2(n) * (N_w(s) + N_w(reverse(s))) / 2,
// which makes the measure invariant under reversal.
inline ComplexityEstimate clz(const BinaryString& s) {
    ComplexityEstimate est;
    est.n = s.size();
    est.nw_forward = lz76_phrase_count(s);
    est.nw_reverse = lz76_phrase_count(s.reversed());
    const double log2n = std::log2(static_cast<double>(est.n));
    if (s.all_same()) {
        est.raw_clz = log2n;
    } else {
        est.raw_clz = log2n * static_cast<double>(est.nw_forward + est.nw_reverse) / 2.0;
    }
    return est;
}

// '[' -> 0, ']' -> 1, order preserved. The open chain "_" carries no
// brackets; it is encoded as the single symbol "0" so that it sits at the
// complexity floor log2(1) = 0, below every bracketed shape.
inline BinaryString shape_to_binary(const AbstractShape& shape) {
    if (shape.is_open_chain()) return BinaryString("0");
    std::string bits;
    bits.reserve(shape.str().size());
    for (const char c : shape.str()) bits.push_back(c == '[' ? '0' : '1');
    return BinaryString(std::move(bits));
}

}  // namespace apgp
