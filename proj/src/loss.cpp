#include "eulac/loss.hpp"

#include "eulac/types.hpp"

#include <algorithm>
#include <cmath>

namespace eulac {

namespace {

void require_finite(const double z) {
    if (!std::isfinite(z)) {
        throw invalid_input{ "loss evaluated at a non-finite margin" };
    }
}

// log(1 + exp(-z)) without overflow for large |z|.
double softplus_neg(const double z) {
    if (z < -30.0) {
        return -z + std::log1p(std::exp(z));
    }
    return std::log1p(std::exp(-z));
}

}  // namespace

LossKind parse_loss(const std::string_view name) {
    if (name == "square") {
        return LossKind::square;
    }
    if (name == "logistic") {
        return LossKind::logistic;
    }
    if (name == "double-hinge" || name == "double_hinge") {
        return LossKind::double_hinge;
    }
    if (name == "hinge") {
        throw invalid_input{ "hinge loss violates psi(z) - psi(-z) = -z and cannot be used for the unbiased risk" };
    }
    throw invalid_input{ "unknown loss '" + std::string{ name } + "' (expected square, logistic or double-hinge)" };
}

std::string to_string(const LossKind kind) {
    switch (kind) {
        case LossKind::square:
            return "square";
        case LossKind::logistic:
            return "logistic";
        case LossKind::double_hinge:
            return "double-hinge";
    }
    return "unknown";
}

double loss_value(const LossKind kind, const double z) {
    require_finite(z);
    switch (kind) {
        case LossKind::square:
            return 0.25 * (1.0 - z) * (1.0 - z);
        case LossKind::logistic:
            return softplus_neg(z);
        case LossKind::double_hinge:
            return std::max(-z, std::max(0.0, 0.5 - 0.5 * z));
    }
    return 0.0;
}

double loss_derivative(const LossKind kind, const double z) {
    require_finite(z);
    switch (kind) {
        case LossKind::square:
            return 0.5 * (z - 1.0);
        case LossKind::logistic:
            // -1 / (1 + e^z), written to stay finite for large |z|
            if (z > 0.0) {
                const double e = std::exp(-z);
                return -e / (1.0 + e);
            }
            return -1.0 / (1.0 + std::exp(z));
        case LossKind::double_hinge:
            if (z < -1.0) {
                return -1.0;
            }
            if (z == -1.0) {
                return -0.75;
            }
            if (z < 1.0) {
                return -0.5;
            }
            if (z == 1.0) {
                return -0.25;
            }
            return 0.0;
    }
    return 0.0;
}

double check_lac_condition(const LossKind kind, std::span<const double> grid) {
    double worst = 0.0;
    for (const double z : grid) {
        worst = std::max(worst, std::abs(loss_value(kind, z) - loss_value(kind, -z) + z));
    }
    return worst;
}

LossBounds loss_bounds(const LossKind kind, const double radius) {
    if (!(radius >= 0.0) || !std::isfinite(radius)) {
        throw invalid_input{ "loss bounds need a finite non-negative radius" };
    }
    // all three are convex and decreasing near -radius, so sup psi sits there
    const double sup = loss_value(kind, -radius);
    switch (kind) {
        case LossKind::square:
            return { sup, 0.5 * (1.0 + radius) };
        case LossKind::logistic:
            return { sup, 1.0 / (1.0 + std::exp(-radius)) };
        case LossKind::double_hinge:
            return { sup, radius > 1.0 ? 1.0 : 0.5 };
    }
    return { sup, 0.0 };
}

}  // namespace eulac
