#pragma once

// Two-class 2-D synthetic generators for fixtures and tests.
//
//   banana      two interleaving circular arcs:
//                 class 0: (cos t, sin t),          t in [0, pi]
//                 class 1: (1 - cos t, 0.5 - sin t), t in [0, pi]
//   lithuanian  two interlocking bell curves over u in [-3, 3]:
//                 class 0: (u,  exp(-u^2/2) - 0.5)
//                 class 1: (u,  0.5 - exp(-u^2/2))
//
// Isotropic Gaussian noise of scale `noise` is added to both coordinates.
// Class 0 rows come first, so label encoding is stable under CSV round-trips.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "dsens/dataset.hpp"
#include "dsens/rng.hpp"

namespace dsens {

enum class SyntheticKind { Banana, Lithuanian };

inline SyntheticKind synthetic_kind_from_name(const std::string& name) {
    if (name == "banana") return SyntheticKind::Banana;
    if (name == "lithuanian") return SyntheticKind::Lithuanian;
    throw std::runtime_error("generate_synthetic: unknown kind '" + name + "'");
}

inline std::string to_string(SyntheticKind kind) {
    return kind == SyntheticKind::Banana ? "banana" : "lithuanian";
}

inline Dataset generate_synthetic(SyntheticKind kind, std::size_t n, double noise,
                                  std::uint64_t seed) {
    if (n < 4 || n % 2 != 0) {
        throw std::runtime_error("generate_synthetic: n must be even and >= 4");
    }
    constexpr double kPi = 3.14159265358979323846;
    Dataset ds;
    ds.name = to_string(kind) + "-" + std::to_string(n);
    ds.rows = n;
    ds.dim = 2;
    ds.class_count = 2;
    ds.features.reserve(n * 2);
    ds.labels.reserve(n);

    Rng rng(derive_seed(seed, kind == SyntheticKind::Banana ? 0x6261 : 0x6c69));
    const std::size_t half = n / 2;
    for (int cls = 0; cls < 2; ++cls) {
        for (std::size_t i = 0; i < half; ++i) {
            double x = 0.0;
            double y = 0.0;
            if (kind == SyntheticKind::Banana) {
                const double t = rng.next_uniform(0.0, kPi);
                if (cls == 0) {
                    x = std::cos(t);
                    y = std::sin(t);
                } else {
                    x = 1.0 - std::cos(t);
                    y = 0.5 - std::sin(t);
                }
            } else {
                const double u = rng.next_uniform(-3.0, 3.0);
                const double bell = std::exp(-0.5 * u * u);
                x = u;
                y = cls == 0 ? bell - 0.5 : 0.5 - bell;
            }
            ds.features.push_back(x + noise * rng.next_normal());
            ds.features.push_back(y + noise * rng.next_normal());
            ds.labels.push_back(cls);
        }
    }
    return ds;
}

inline Dataset generate_synthetic(const std::string& kind, std::size_t n, double noise,
                                  std::uint64_t seed) {
    return generate_synthetic(synthetic_kind_from_name(kind), n, noise, seed);
}

}  // namespace dsens
