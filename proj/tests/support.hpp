#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "crnerg/netparse.hpp"
#include "crnerg/network.hpp"

namespace crnerg::testing {

inline ReactionNetwork load(const std::string& name) {
    return parse_network(read_source(std::string(CRNERG_TEST_DATA) + "/" + name));
}

enum class RateStyle { Fixed, Interval, Free };

/// Random first-order network (plus constitutive production) on d species.
/// Every species degrades; the other reactions convert or catalyze.
inline ReactionNetwork random_unimolecular(std::mt19937_64& rng, std::size_t d, std::size_t extra, RateStyle style) {
    ReactionNetwork net;
    for (std::size_t i = 0; i < d; ++i) net.add_species("X" + std::to_string(i));
    std::uniform_real_distribution<double> rate(0.2, 2.0);
    std::size_t next = 0;
    auto param = [&] {
        const std::string name = "p" + std::to_string(next++);
        const double a = rate(rng);
        switch (style) {
            case RateStyle::Fixed: net.add_param({name, Fixed{a}}); break;
            case RateStyle::Interval: {
                const double b = a * (1.0 + rate(rng));
                net.add_param({name, Interval{a, b}});
                break;
            }
            case RateStyle::Free: net.add_param({name, Free{}}); break;
        }
        return name;
    };
    net.add_reaction({{}, {{0, 1}}, param()});
    for (std::size_t i = 0; i < d; ++i) net.add_reaction({{{i, 1}}, {}, param()});
    for (std::size_t k = 0; k < extra; ++k) {
        const std::size_t r = rng() % d;
        Complex products;
        const std::size_t np = 1 + rng() % 2;
        for (std::size_t j = 0; j < np; ++j) products.push_back({rng() % d, 1});
        net.add_reaction({{{r, 1}}, products, param()});
    }
    return net;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace crnerg::testing
