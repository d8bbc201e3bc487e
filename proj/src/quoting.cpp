#include "lobmm/quoting.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lobmm {

double reservation_price(double s, double q, const QuoteParams& params) {
    return s - q * params.gamma * params.sigma * params.sigma * (params.T - params.t);
}

double intensity(double delta, const IntensityModel& model) {
    if (const auto* c = std::get_if<ClassicalIntensity>(&model))
        return c->A * std::exp(-c->kappa * delta);
    const auto& inf = std::get<InformalIntensity>(model);
    return inf.Lambda / inf.alpha * std::exp(-inf.alpha * std::exp(inf.K * delta));
}

std::pair<double, double> closed_form_deltas(double q, const QuoteParams& params) {
    const auto* c = std::get_if<ClassicalIntensity>(&params.intensity);
    if (!c) throw std::invalid_argument("closed_form_deltas: classical intensity required");
    const double g = params.gamma;
    const double coeff = params.legacy_main_text_spread ? 2.0 / g : 1.0 / g;
    const double margin = coeff * std::log1p(g / c->kappa);
    const double skew = q * g * params.sigma * params.sigma * (params.T - params.t);
    return {skew + margin, -skew + margin};
}

namespace {

// rhs(delta) = skew + (1/gamma) ln(1 + gamma * exp(-K*delta) / (alpha*K))
double informal_rhs(double delta, double skew, double alpha_k, double k, double gamma) {
    return skew + std::log1p(gamma / alpha_k * std::exp(-k * delta)) / gamma;
}

// d/d(delta) of rhs
double informal_rhs_deriv(double delta, double alpha_k, double k, double gamma) {
    const double u = gamma / alpha_k * std::exp(-k * delta);
    return -(k / gamma) * u / (1.0 + u);
}

}  // namespace

SolveResult solve_informal_delta(double skew, const InformalIntensity& model, double gamma) {
    const double k = model.K;
    const double alpha_k = model.alpha * k;
    if (!(k > 0.0) || !(model.alpha > 0.0) || !(gamma > 0.0))
        throw std::invalid_argument("solve_informal_delta: parameters must be positive");

    auto rhs = [&](double d) { return informal_rhs(d, skew, alpha_k, k, gamma); };
    auto f = [&](double d) { return d - rhs(d); };  // strictly increasing in d

    // Large |q| skew can drive the fixed point negative; clamp at 0.
    if (f(0.0) >= 0.0) {
        SolveResult res;
        res.delta = 0.0;
        res.residual = std::abs(f(0.0));
        res.clamped = res.residual > 0.0;
        return res;
    }

    const double delta_max = 50.0 / k;  // intensity is numerically zero beyond
    if (f(delta_max) < 0.0) {
        std::ostringstream msg;
        msg << "no admissible root in [0, " << delta_max << "]: f(0)=" << f(0.0)
            << " f(max)=" << f(delta_max) << " skew=" << skew;
        throw std::runtime_error(msg.str());
    }

    double lo = 0.0, hi = delta_max;
    double d = std::min(std::max(rhs(0.0), 0.0), delta_max);

    // Damped fixed-point sweep to get close.
    for (int i = 0; i < 8; ++i) {
        const double step = rhs(d) - d;
        if (step > 0.0)
            lo = std::max(lo, d);
        else
            hi = std::min(hi, d);
        d += 0.5 * step;
        d = std::min(std::max(d, lo), hi);
    }

    // Newton with bisection safeguard; f' = 1 - rhs' >= 1.
    for (int i = 0; i < 100; ++i) {
        const double fd = f(d);
        if (std::abs(fd) <= 1e-13) break;
        if (fd > 0.0)
            hi = d;
        else
            lo = d;
        const double fp = 1.0 - informal_rhs_deriv(d, alpha_k, k, gamma);
        double next = d - fd / fp;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (next == d) break;
        d = next;
    }

    SolveResult res;
    res.delta = d;
    res.residual = std::abs(f(d));
    return res;
}

std::pair<SolveResult, SolveResult> solve_informal_deltas(double q, const QuoteParams& params) {
    const auto* inf = std::get_if<InformalIntensity>(&params.intensity);
    if (!inf) throw std::invalid_argument("solve_informal_deltas: informal intensity required");
    const double skew = q * params.gamma * params.sigma * params.sigma * (params.T - params.t);
    return {solve_informal_delta(skew, *inf, params.gamma),
            solve_informal_delta(-skew, *inf, params.gamma)};
}

QuotePair quotes(double s, double q, double t, const QuoteParams& params) {
    QuoteParams p = params;
    p.t = t;
    QuotePair out;
    out.r = reservation_price(s, q, p);
    if (std::holds_alternative<ClassicalIntensity>(p.intensity)) {
        auto [db, da] = closed_form_deltas(q, p);
        out.delta_b = db;
        out.delta_a = da;
    } else {
        auto [b, a] = solve_informal_deltas(q, p);
        out.delta_b = b.delta;
        out.delta_a = a.delta;
        out.residual_b = b.residual;
        out.residual_a = a.residual;
        out.clamped_b = b.clamped;
        out.clamped_a = a.clamped;
    }
    out.bid = s - out.delta_b;
    out.ask = s + out.delta_a;
    return out;
}

}  // namespace lobmm
