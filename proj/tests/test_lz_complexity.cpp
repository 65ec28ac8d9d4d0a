#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>
#include <string>

#include "apgp/lz_complexity.hpp"
#include "apgp/rng.hpp"
#include "apgp/shape.hpp"
#include "oracles.hpp"

using apgp::BinaryString;
using apgp::clz;
using apgp::lz76_phrase_count;

namespace {

std::string random_bits(std::mt19937_64& rng, std::size_t len) {
    std::string s(len, '0');
    for (char& c : s) c = (rng() & 1) ? '1' : '0';
    return s;
}

}  // namespace

TEST_CASE("binary string validation") {
    CHECK_THROWS_AS(BinaryString(""), apgp::EmptyShape);
    CHECK_THROWS_AS(BinaryString("012"), apgp::MalformedStructure);
    CHECK_THROWS_AS(BinaryString("ab"), apgp::MalformedStructure);
    CHECK(BinaryString("0101").view() == "0101");
    CHECK(BinaryString("0101").reversed().view() == "1010");
    CHECK(BinaryString("000").all_same());
    CHECK(BinaryString("111").all_same());
    CHECK_FALSE(BinaryString("010").all_same());
}

TEST_CASE("phrase count on hand-checked strings") {
    CHECK(lz76_phrase_count(BinaryString("0")) == 1);
    CHECK(lz76_phrase_count(BinaryString("1")) == 1);
    CHECK(lz76_phrase_count(BinaryString("00")) == 2);
    CHECK(lz76_phrase_count(BinaryString("0000")) == 2);
    CHECK(lz76_phrase_count(BinaryString("01")) == 2);
    CHECK(lz76_phrase_count(BinaryString("0010")) == 3);
    CHECK(lz76_phrase_count(BinaryString("0101")) == 3);
}

TEST_CASE("phrase count equals the definitional re-parser on short strings") {
    // every binary string of length 1..12
    for (std::size_t len = 1; len <= 12; ++len) {
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << len); ++bits) {
            std::string s(len, '0');
            for (std::size_t i = 0; i < len; ++i)
                if (bits & (std::uint64_t{1} << i)) s[i] = '1';
            INFO("string " << s);
            CHECK(lz76_phrase_count(BinaryString(s)) == oracles::lz76_phrases(s));
        }
    }
}

TEST_CASE("phrase count equals the definitional re-parser on long random strings") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 200; ++i) {
        const std::string s = random_bits(rng, 1 + static_cast<std::size_t>(rng() % 300));
        INFO("string " << s);
        CHECK(lz76_phrase_count(BinaryString(s)) == oracles::lz76_phrases(s));
    }
}

TEST_CASE("constant strings sit on the log2(n) branch") {
    for (std::size_t n = 1; n <= 1024; n *= 2) {
        const apgp::ComplexityEstimate zeros = clz(BinaryString(std::string(n, '0')));
        const apgp::ComplexityEstimate ones = clz(BinaryString(std::string(n, '1')));
        CHECK(zeros.raw_clz == std::log2(static_cast<double>(n)));
        CHECK(ones.raw_clz == std::log2(static_cast<double>(n)));
    }
}

TEST_CASE("complexity is invariant under reversal") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 2000; ++i) {
        const BinaryString s(random_bits(rng, 1 + static_cast<std::size_t>(rng() % 200)));
        const BinaryString r = s.reversed();
        CHECK(clz(s).raw_clz == clz(r).raw_clz);
    }
}

TEST_CASE("complexity formula composes phrase counts") {
    const BinaryString s("00100110");  // not constant
    const apgp::ComplexityEstimate est = clz(s);
    const double expected = std::log2(8.0) *
                            static_cast<double>(est.nw_forward + est.nw_reverse) / 2.0;
    CHECK(est.raw_clz == expected);
    CHECK(est.n == 8);
}

TEST_CASE("single symbols have zero complexity") {
    CHECK(clz(BinaryString("0")).raw_clz == 0.0);
    CHECK(clz(BinaryString("1")).raw_clz == 0.0);
}

TEST_CASE("shapes encode brackets as bits") {
    CHECK(apgp::shape_to_binary(apgp::AbstractShape("[]")).view() == "01");
    CHECK(apgp::shape_to_binary(apgp::AbstractShape("[[][]]")).view() == "001011");
    CHECK(apgp::shape_to_binary(apgp::AbstractShape("[][]")).view() == "0101");
}

TEST_CASE("open chain encodes to the complexity floor") {
    const BinaryString bits = apgp::shape_to_binary(apgp::AbstractShape("_"));
    CHECK(bits.view() == "0");
    CHECK(clz(bits).raw_clz == 0.0);
}
