#pragma once

// Random test matrices with a controlled spectrum.

#include <cmath>
#include <random>

#include "newton/linalg.hpp"

namespace testing_support {

inline newton::Vector random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> z(0.0, scale);
    newton::Vector v(n);
    for (double& x : v) x = z(rng);
    return v;
}

// Q diag(lambda) Q^T with Q from Gram-Schmidt on a Gaussian matrix and
// eigenvalues log-uniform in [1, condition].
inline newton::DenseMatrix random_spd(std::mt19937_64& rng, std::size_t n, double condition) {
    std::vector<newton::Vector> q;
    while (q.size() < n) {
        newton::Vector v = random_vector(rng, n);
        for (const auto& u : q) v = newton::axpy(-newton::dot(u, v), u, v);
        const double len = newton::norm2(v);
        if (len < 1e-6) continue;
        q.push_back(newton::scaled(1.0 / len, v));
    }
    std::uniform_real_distribution<double> u(0.0, std::log(condition));
    newton::DenseMatrix a(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lambda = std::exp(u(rng));
        a += lambda * newton::DenseMatrix::outer(q[k], q[k]);
    }
    return a.symmetrized();
}

}  // namespace testing_support
