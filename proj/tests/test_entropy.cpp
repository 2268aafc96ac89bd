#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "ucvf/entropy.hpp"
#include "ucvf/errors.hpp"

using namespace ucvf;

namespace {

// Independent straight-line implementation used as the comparison oracle.
double oracle_entropy(const std::vector<int>& labels) {
    std::map<int, int> counts;
    for (int l : labels) counts[l]++;
    double n = static_cast<double>(labels.size());
    double h = 0.0;
    for (const auto& [l, c] : counts) {
        double p = c / n;
        h -= p * std::log2(p);
    }
    return h;
}

double oracle_gain(const std::vector<LabeledSample>& samples) {
    std::vector<int> all;
    std::map<int, std::vector<int>> by_value;
    for (const auto& s : samples) {
        all.push_back(s.view_label);
        by_value[s.context_value].push_back(s.view_label);
    }
    double h = oracle_entropy(all);
    double cond = 0.0;
    for (const auto& [v, group] : by_value)
        cond += static_cast<double>(group.size()) / static_cast<double>(all.size()) *
                oracle_entropy(group);
    return h - cond;
}

}  // namespace

TEST_CASE("entropy of canonical distributions") {
    CHECK(entropy({1.0}) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(entropy({0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(entropy({0.25, 0.25, 0.25, 0.25}) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(entropy({0.5, 0.5, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("entropy rejects empty and zero-mass input") {
    CHECK_THROWS_AS(entropy({}), EmptySampleError);
    CHECK_THROWS_AS(entropy({0.0, 0.0}), EmptySampleError);
    CHECK_THROWS_AS(entropy({0.5, -0.5}), EmptySampleError);
}

TEST_CASE("entropy from counts matches the probability form") {
    CHECK(entropy_from_counts({1, 1, 1, 1}) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(entropy_from_counts({2, 1}) ==
          doctest::Approx(entropy({2.0 / 3.0, 1.0 / 3.0})).epsilon(1e-15));
    CHECK(entropy_from_counts({7}) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("worked gain value: balanced labels, one bucket holds A,A,B") {
    // Four samples with two labels (entropy 1); context bucket 0 carries
    // {A,A,B} and bucket 1 carries {B}, so the gain is 1 - 0.75*H(1/3).
    std::vector<LabeledSample> s = {{0, 0}, {0, 0}, {0, 1}, {1, 1}};
    CHECK(sample_entropy(s) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(information_gain(s) == doctest::Approx(0.3112781244591328).epsilon(1e-6));
    CHECK(std::abs(information_gain(s) - 0.3112781244591328) < 1e-12);
    CHECK(gain_ratio(s) == doctest::Approx(0.3112781244591328).epsilon(1e-6));
}

TEST_CASE("gain and ratio agree with a direct-summation oracle on random samples") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + static_cast<int>(rng() % 50);
        int labels = 1 + static_cast<int>(rng() % 5);
        int values = 1 + static_cast<int>(rng() % 4);
        std::vector<LabeledSample> s;
        for (int i = 0; i < n; ++i)
            s.push_back({static_cast<int>(rng() % values), static_cast<int>(rng() % labels)});
        double g = oracle_gain(s);
        CHECK(std::abs(information_gain(s) - g) < 1e-12);
        std::vector<int> all;
        for (const auto& x : s) all.push_back(x.view_label);
        double h = oracle_entropy(all);
        if (h > 0.0)
            CHECK(std::abs(gain_ratio(s) - g / h) < 1e-12);
        else
            CHECK_THROWS_AS(gain_ratio(s), ZeroEntropyError);
    }
}

TEST_CASE("gain is zero when the context carries no information") {
    std::vector<LabeledSample> s = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    CHECK(information_gain(s) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("degenerate samples raise the documented errors") {
    CHECK_THROWS_AS(information_gain({}), EmptySampleError);
    std::vector<LabeledSample> single_label = {{0, 3}, {1, 3}, {2, 3}};
    CHECK_THROWS_AS(gain_ratio(single_label), ZeroEntropyError);
}
