#pragma once

#include <span>
#include <string>
#include <string_view>

namespace eulac {

/// Convex binary surrogates satisfying psi(z) - psi(-z) = -z. That identity is
/// what turns the unlabeled-data risk into a convex problem, so losses without
/// it (hinge, exponential) are deliberately absent.
enum class LossKind { square, logistic, double_hinge };

/// Accepts "square", "logistic", "double-hinge". Rejects "hinge" with an
/// explanation, and any other name.
[[nodiscard]] LossKind parse_loss(std::string_view name);
[[nodiscard]] std::string to_string(LossKind kind);

/// square: (1 - z)^2 / 4; logistic: log(1 + e^-z); double hinge:
/// max(-z, max(0, 1/2 - z/2)).
[[nodiscard]] double loss_value(LossKind kind, double z);

/// Derivative (double hinge: midpoint subgradient at the kinks z = -1, z = 1).
[[nodiscard]] double loss_derivative(LossKind kind, double z);

/// max over the grid of |psi(z) - psi(-z) + z|.
[[nodiscard]] double check_lac_condition(LossKind kind, std::span<const double> grid);

/// Sup of psi and of |psi'| on [-radius, radius].
struct LossBounds {
    double sup = 0.0;
    double lipschitz = 0.0;
};
[[nodiscard]] LossBounds loss_bounds(LossKind kind, double radius);

}  // namespace eulac
