#pragma once

#include "eulac/data/synthetic.hpp"

namespace eulac::testing {

inline GaussianMixture gaussian(const std::initializer_list<double> mean, const double variance = 1.0) {
    GaussianComponent c;
    c.mean = Vector(static_cast<Eigen::Index>(mean.size()));
    Eigen::Index i = 0;
    for (const double m : mean) {
        c.mean[i++] = m;
    }
    c.covariance = variance * Matrix::Identity(c.mean.size(), c.mean.size());
    return GaussianMixture{ { c } };
}

/// Two known unit Gaussians at (+-2, 0), new class at (0, novel_y).
inline SyntheticSpec plane_spec(const double theta, const Seed seed, const double novel_y = 3.0) {
    SyntheticSpec spec;
    spec.dimension = 2;
    spec.theta = theta;
    spec.seed = seed;
    spec.known_priors = { 0.5, 0.5 };
    spec.known = { gaussian({ -2.0, 0.0 }), gaussian({ 2.0, 0.0 }) };
    spec.novel = gaussian({ 0.0, novel_y });
    return spec;
}

}  // namespace eulac::testing
