#pragma once

#include "eulac/solver.hpp"

namespace eulac::detail {

void check_objective_inputs(const Matrix &alpha, const Matrix &gram, std::span<const Label> labels, const ObjectiveSetup &setup);

/// d objective / d scores (without the penalty), n x (K+1).
Matrix score_derivatives(const Matrix &scores, std::span<const Label> labels, const ObjectiveSetup &setup);

/// Objective given scores = gram * alpha.
double objective_from_scores(const Matrix &alpha, const Matrix &scores, std::span<const Label> labels, const ObjectiveSetup &setup);

}  // namespace eulac::detail
