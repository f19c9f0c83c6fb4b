#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace flatcert {

// Seeded Gaussian sampler. Box-Muller on top of mt19937_64 instead of
// std::normal_distribution, whose output is implementation-defined; this
// keeps sampled clouds bit-identical across standard libraries.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {
        // (0, 1): never returns 0, safe under log().
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
    }

    double gaussian() {
        double u1 = uniform01();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    Eigen::VectorXd gaussian_vector(int dim, double scale = 1.0) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v(i) = scale * gaussian();
        return v;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace flatcert
