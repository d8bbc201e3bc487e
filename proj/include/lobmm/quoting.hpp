#pragma once

#include <variant>

#include "lobmm/types.hpp"

namespace lobmm {

// lambda(delta) = A * exp(-kappa * delta)
struct ClassicalIntensity {
    double A = 0.0;
    double kappa = 0.0;
};

// lambda(delta) = (Lambda / alpha) * exp(-alpha * exp(K * delta))
struct InformalIntensity {
    double Lambda = 0.0;
    double alpha = 0.0;
    double K = 0.0;
};

using IntensityModel = std::variant<ClassicalIntensity, InformalIntensity>;

struct QuoteParams {
    double gamma = 0.1;  // CARA risk aversion
    double sigma = 0.0;  // mid-price volatility, CUP per sqrt(day)
    double T = 1.0;      // terminal time, days
    double t = 0.0;
    IntensityModel intensity;
    // Reproduces the 2/gamma per-side margin variant of the closed form.
    bool legacy_main_text_spread = false;
};

struct QuotePair {
    double r = 0.0;  // reservation price
    double delta_b = 0.0;
    double delta_a = 0.0;
    double bid = 0.0;  // s - delta_b
    double ask = 0.0;  // s + delta_a
    double residual_b = 0.0;
    double residual_a = 0.0;
    bool clamped_b = false;
    bool clamped_a = false;
};

// r = s - q * gamma * sigma^2 * (T - t)
double reservation_price(double s, double q, const QuoteParams& params);

double intensity(double delta, const IntensityModel& model);

// Classical model only: delta_b = q*gamma*sigma^2*(T-t) + margin,
// delta_a = -q*gamma*sigma^2*(T-t) + margin with margin = (1/gamma)ln(1+gamma/kappa).
// first = delta_b, second = delta_a. Throws if the model is not classical.
std::pair<double, double> closed_form_deltas(double q, const QuoteParams& params);

struct SolveResult {
    double delta = 0.0;
    double residual = 0.0;  // |delta - rhs(delta)|; meaningful when not clamped
    bool clamped = false;   // negative fixed point clamped to 0
};

// Root of delta = skew + (1/gamma) ln(1 + gamma / (alpha*K*exp(K*delta))) on
// [0, 50/K], by damped fixed-point iteration with a bracketed Newton
// fallback; unclamped residual <= 1e-10. Throws std::runtime_error
// ("no admissible root") when no root exists in the bracket.
SolveResult solve_informal_delta(double skew, const InformalIntensity& model, double gamma);

// skew_b = +q*gamma*sigma^2*(T-t), skew_a = -q*gamma*sigma^2*(T-t).
std::pair<SolveResult, SolveResult> solve_informal_deltas(double q, const QuoteParams& params);

// Dispatches on the intensity model and assembles bid/ask around s.
QuotePair quotes(double s, double q, double t, const QuoteParams& params);

}  // namespace lobmm
