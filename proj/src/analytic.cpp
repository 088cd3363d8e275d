#include "vshift/analytic.hpp"

#include <cmath>
#include <limits>

#include "vshift/errors.hpp"

namespace vshift {

namespace {

bool finite(double x) { return std::isfinite(x); }

double sum_weights(std::span<const double> w) {
    double s = 0.0;
    for (double x : w) s += x;
    return s;
}

double sum_sq_weights(std::span<const double> w) {
    double s = 0.0;
    for (double x : w) s += x * x;
    return s;
}

}  // namespace

void ShiftScenario::validate() const {
    if (!finite(input_mean)) {
        throw DomainError("input mean must be finite");
    }
    if (!finite(input_variance) || input_variance <= 0.0) {
        throw DomainError("input variance must be positive");
    }
    if (!finite(retain_ratio) || retain_ratio <= 0.0 || retain_ratio > 1.0) {
        throw DomainError("retain ratio must lie in (0, 1]");
    }
    if (width == 0) {
        throw DomainError("width must be at least 1");
    }
    if (!finite(input_correlation) || input_correlation < 0.0 || input_correlation > 1.0) {
        throw DomainError("input correlation must lie in [0, 1]");
    }
    if (!finite(cos2_alignment) || cos2_alignment < 0.0 || cos2_alignment > 1.0) {
        throw DomainError("squared alignment must lie in [0, 1]");
    }
    if (!finite(uout_halfwidth) || uout_halfwidth < 0.0 || uout_halfwidth > 1.0) {
        throw DomainError("noise half-width must lie in [0, 1]");
    }
}

double var_train_case_a(const ShiftScenario& s) {
    s.validate();
    const double c = s.input_mean;
    const double v = s.input_variance;
    const double p = s.retain_ratio;
    // E[(a x / p)^2] - (E[a x / p])^2 with a ~ Bernoulli(p), E[x]=c, Var[x]=v.
    return (1.0 / p) * (c * c + v) - c * c;
}

ShiftResult shift_ratio_case_a(const ShiftScenario& s) {
    ShiftResult r;
    r.var_train = var_train_case_a(s);
    r.var_test = s.input_variance;
    r.ratio = r.var_test / r.var_train;
    return r;
}

double rho_ax_from_rho_x(const ShiftScenario& s) {
    return shift_ratio_case_a(s).ratio * s.input_correlation;
}

namespace {

void require_nondegenerate(std::span<const double> w) {
    for (double x : w) {
        if (x != 0.0) return;
    }
    throw DomainError("all-zero weight vector gives zero train variance");
}

}  // namespace

double var_train_case_b(const ShiftScenario& s, std::span<const double> weights) {
    s.validate();
    if (weights.size() != s.width) {
        throw ShapeError("weight count does not match scenario width");
    }
    require_nondegenerate(weights);
    const double unit = var_train_case_a(s);
    const double rho_ax = rho_ax_from_rho_x(s);
    const double s2 = sum_sq_weights(weights);
    const double sw = sum_weights(weights);
    const double cross = sw * sw - s2;  // sum over i != j of w_i w_j
    return unit * (s2 + rho_ax * cross);
}

double var_test_case_b(const ShiftScenario& s, std::span<const double> weights) {
    s.validate();
    if (weights.size() != s.width) {
        throw ShapeError("weight count does not match scenario width");
    }
    require_nondegenerate(weights);
    const double s2 = sum_sq_weights(weights);
    const double sw = sum_weights(weights);
    const double cross = sw * sw - s2;
    return s.input_variance * (s2 + s.input_correlation * cross);
}

double cos_sq_theta(std::span<const double> weights) {
    if (weights.empty()) {
        throw DomainError("weight vector must be non-empty");
    }
    const double s2 = sum_sq_weights(weights);
    if (s2 <= 0.0) {
        throw DomainError("weight vector must be non-zero");
    }
    const double sw = sum_weights(weights);
    return (sw * sw) / (static_cast<double>(weights.size()) * s2);
}

ShiftResult shift_ratio_case_b(const ShiftScenario& s) {
    s.validate();
    const double v = s.input_variance;
    const double rho = s.input_correlation;
    const double d = static_cast<double>(s.width);
    const double align = d * s.cos2_alignment - 1.0;  // cross term per unit sum of squares
    const double unit_train = var_train_case_a(s);
    const double rho_ax = rho_ax_from_rho_x(s);
    ShiftResult r;
    r.var_train = unit_train * (1.0 + rho_ax * align);
    r.var_test = v * (1.0 + rho * align);
    if (r.var_train <= 0.0) {
        throw DomainError("requested (width, alignment, correlation) give a non-positive variance");
    }
    r.ratio = r.var_test / r.var_train;
    return r;
}

double uout_shift_ratio(double beta) {
    if (!finite(beta) || beta < 0.0 || beta > 1.0) {
        throw DomainError("noise half-width must lie in [0, 1]");
    }
    return 3.0 / (3.0 + beta * beta);
}

}  // namespace vshift
