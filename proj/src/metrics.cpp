#include "cvqt/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace cvqt {

namespace {

void require(bool ok, const char* message) {
    if (!ok) {
        throw std::invalid_argument(message);
    }
}

}  // namespace

double to_db(double linear) {
    require(std::isfinite(linear) && linear > 0.0, "to_db: value must be > 0");
    return 10.0 * std::log10(linear);
}

double from_db(double db) {
    require(std::isfinite(db), "from_db: value must be finite");
    return std::pow(10.0, db / 10.0);
}

double fidelity_theory(double r, double n_units) {
    require(std::isfinite(r), "fidelity_theory: r must be finite");
    require(std::isfinite(n_units) && n_units >= 0.0,
            "fidelity_theory: n_units must be >= 0");
    return 1.0 / (1.0 + n_units * std::exp(-2.0 * r));
}

double fidelity_from_variances(double sigma_x, double sigma_p) {
    require(std::isfinite(sigma_x) && sigma_x > 0.0,
            "fidelity_from_variances: sigma_x must be > 0");
    require(std::isfinite(sigma_p) && sigma_p > 0.0,
            "fidelity_from_variances: sigma_p must be > 0");
    return 2.0 / std::sqrt((1.0 + sigma_x) * (1.0 + sigma_p));
}

double fidelity_gaussian(const Eigen::Matrix2d& cov, const Eigen::Vector2d& delta) {
    require(cov.allFinite() && delta.allFinite(), "fidelity_gaussian: moments must be finite");
    const Eigen::Matrix2d total = Eigen::Matrix2d::Identity() + cov;
    const double det = total.determinant();
    require(det > 0.0, "fidelity_gaussian: I + cov must be positive definite");
    const double quad = delta.dot(total.inverse() * delta);
    return 2.0 / std::sqrt(det) * std::exp(-quad / 2.0);
}

SequentialCapacity sequential_capacity(double fidelity) {
    require(std::isfinite(fidelity) && fidelity > 0.0 && fidelity < 1.0,
            "sequential_capacity: fidelity must be in (0, 1)");
    const double n_s = fidelity / (1.0 - fidelity);
    return SequentialCapacity{n_s, std::log(n_s) / 2.0};
}

}  // namespace cvqt
