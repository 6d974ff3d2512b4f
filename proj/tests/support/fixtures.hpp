#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "turtle/classifier.hpp"
#include "turtle/core.hpp"

namespace fixture {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline double gaussian(std::mt19937_64& rng, double mean, double sd) {
    // Box-Muller on the raw stream keeps the fixtures stable across toolchains.
    double u1 = uniform(rng, 1e-12, 1.0);
    double u2 = uniform(rng, 0.0, 1.0);
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline turtle::ScoreVector turtle_vector(std::vector<double> v) {
    return turtle::ScoreVector(turtle::Schema::turtle(), std::move(v));
}

/// Class "A" uniformly in [0, 0.25]^6 and class "B" in [0.75, 1]^6: every
/// coordinate is separated by at least 0.5.
inline std::vector<turtle::classifier::LabeledExample> separable_clusters(std::size_t per_class,
                                                                          std::uint64_t seed = 7) {
    std::mt19937_64 rng(seed);
    std::vector<turtle::classifier::LabeledExample> out;
    for (std::size_t i = 0; i < per_class; ++i) {
        std::vector<double> a(6), b(6);
        for (auto& x : a) x = uniform(rng, 0.0, 0.25);
        for (auto& x : b) x = uniform(rng, 0.75, 1.0);
        out.push_back({turtle_vector(a), std::string("A")});
        out.push_back({turtle_vector(b), std::string("B")});
    }
    return out;
}

/// Three Gaussian clusters (sd 0.08, clamped to [0,1]) with `noise` of the
/// labels flipped to a different class.
inline std::vector<turtle::classifier::LabeledExample> noisy_three_class(std::size_t per_class, double noise,
                                                                         std::uint64_t seed) {
    const std::vector<std::vector<double>> centers = {
        {0.2, 0.2, 0.2, 0.2, 0.2, 0.2},
        {0.8, 0.8, 0.8, 0.2, 0.2, 0.2},
        {0.2, 0.2, 0.8, 0.8, 0.8, 0.8},
    };
    const std::vector<std::string> labels = {"backend", "data_science", "frontend"};
    std::mt19937_64 rng(seed);
    std::vector<turtle::classifier::LabeledExample> out;
    for (std::size_t i = 0; i < per_class; ++i)
        for (std::size_t c = 0; c < centers.size(); ++c) {
            std::vector<double> v(6);
            for (std::size_t j = 0; j < 6; ++j) v[j] = std::clamp(gaussian(rng, centers[c][j], 0.08), 0.0, 1.0);
            std::size_t label = c;
            if (uniform(rng, 0.0, 1.0) < noise) label = (c + 1 + static_cast<std::size_t>(rng() % 2)) % 3;
            out.push_back({turtle_vector(v), labels[label]});
        }
    return out;
}

inline turtle::CandidateProfile profile(const std::string& id, std::vector<double> values,
                                        std::optional<std::string> role = std::nullopt) {
    turtle::RawScores raw;
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = values[i];
    return turtle::make_profile(id, "Candidate " + id, raw, std::move(role),
                                turtle::Timestamp::parse("2024-03-01T09:00:00Z"));
}

}  // namespace fixture
