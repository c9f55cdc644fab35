#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace cvp {

// Seeded RNG wrapper. All sampling in the library goes through this type so
// that a run is reproducible from a single 64-bit seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }

    double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

    int uniform_int(int lo, int hi) { // inclusive
        return std::uniform_int_distribution<int>(lo, hi)(gen_);
    }

    Eigen::VectorXd gaussian_vector(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = gaussian();
        return v;
    }

    // Uniform direction on the unit sphere in R^n.
    Eigen::VectorXd unit_vector(int n) {
        Eigen::VectorXd v = gaussian_vector(n);
        while (v.norm() < 1e-12) v = gaussian_vector(n);
        return v / v.norm();
    }

    Eigen::MatrixXd gaussian_matrix(int r, int c) {
        Eigen::MatrixXd m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m(i, j) = gaussian();
        return m;
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

} // namespace cvp
