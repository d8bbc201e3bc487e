#include <doctest.h>

#include <cmath>
#include <random>

#include "lobmm/quoting.hpp"
#include "oracles.hpp"

using namespace lobmm;

namespace {

QuoteParams classical_params(double gamma, double kappa, double sigma = 2.0, double horizon = 1.0) {
    QuoteParams p;
    p.gamma = gamma;
    p.sigma = sigma;
    p.T = horizon;
    p.t = 0.0;
    p.intensity = ClassicalIntensity{1.0, kappa};
    return p;
}

QuoteParams informal_params(double gamma = 0.1, double sigma = 2.38, double K = 0.55,
                            double alpha = 8.87e-5, double Lambda = 2.0) {
    QuoteParams p;
    p.gamma = gamma;
    p.sigma = sigma;
    p.T = 1.0;
    p.t = 0.0;
    p.intensity = InformalIntensity{Lambda, alpha, K};
    return p;
}

}  // namespace

TEST_CASE("reservation price") {
    auto p = classical_params(0.1, 1.5, 2.0);
    SUBCASE("zero inventory returns the mid") { CHECK(reservation_price(100, 0, p) == 100.0); }
    SUBCASE("direct formula value") {
        // s=100, q=1, gamma=0.1, sigma=2, T-t=1 -> 100 - 0.1*4 = 99.6
        CHECK(reservation_price(100, 1, p) == doctest::Approx(99.6).epsilon(1e-12));
    }
    SUBCASE("odd symmetry in inventory") {
        for (double q : {0.5, 1.0, 3.0, 17.0})
            CHECK(reservation_price(100, -q, p) - 100.0 ==
                  doctest::Approx(-(reservation_price(100, q, p) - 100.0)).epsilon(1e-12));
    }
}

TEST_CASE("intensity") {
    SUBCASE("classical at zero distance returns A") {
        CHECK(intensity(0.0, ClassicalIntensity{3.0, 1.5}) == 3.0);
    }
    SUBCASE("informal at zero distance") {
        InformalIntensity inf{2.0, 0.5, 0.55};
        CHECK(intensity(0.0, inf) == doctest::Approx(2.0 / 0.5 * std::exp(-0.5)).epsilon(1e-14));
    }
    SUBCASE("informal against a direct evaluation") {
        InformalIntensity inf{2.0, 0.001, 0.55};
        // (Lambda/alpha) * exp(-alpha * exp(K*delta)) at delta = 5
        const double expected = 2.0 / 0.001 * std::exp(-0.001 * std::exp(0.55 * 5.0));
        CHECK(intensity(5.0, inf) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("closed_form_deltas") {
    SUBCASE("zero inventory is symmetric") {
        auto p = classical_params(0.1, 1.5);
        auto [db, da] = closed_form_deltas(0, p);
        CHECK(db == da);
        CHECK(db == doctest::Approx(10.0 * std::log1p(1.0 / 15.0)).epsilon(1e-14));
    }
    SUBCASE("spread is invariant in inventory") {
        auto p = classical_params(0.1, 1.5);
        auto [db0, da0] = closed_form_deltas(0, p);
        for (double q : {-50.0, -7.0, 1.0, 33.0, 50.0}) {
            auto [db, da] = closed_form_deltas(q, p);
            CHECK(db + da == doctest::Approx(db0 + da0).epsilon(1e-12));
        }
    }
    SUBCASE("inventory skew is linear") {
        auto p = classical_params(0.1, 1.5);
        const double unit = p.gamma * p.sigma * p.sigma * (p.T - p.t);
        for (double q : {-3.0, 0.0, 8.0}) {
            auto [db1, da1] = closed_form_deltas(q + 1, p);
            auto [db0, da0] = closed_form_deltas(q, p);
            CHECK(db1 - db0 == doctest::Approx(unit).epsilon(1e-12));
            CHECK(da1 - da0 == doctest::Approx(-unit).epsilon(1e-12));
        }
    }
    SUBCASE("legacy main-text coefficient doubles the margin") {
        auto p = classical_params(0.1, 1.5);
        auto [db, da] = closed_form_deltas(0, p);
        p.legacy_main_text_spread = true;
        auto [lb, la] = closed_form_deltas(0, p);
        CHECK(lb == doctest::Approx(2.0 * db).epsilon(1e-14));
        CHECK(la == doctest::Approx(2.0 * da).epsilon(1e-14));
    }
}

TEST_CASE("solve_informal_deltas") {
    auto p = informal_params();
    const auto& inf = std::get<InformalIntensity>(p.intensity);

    SUBCASE("zero inventory gives identical roots") {
        auto [b, a] = solve_informal_deltas(0, p);
        CHECK(b.delta == a.delta);
        CHECK(b.residual <= 1e-10);
    }
    SUBCASE("residual contract and bisection oracle agreement") {
        for (double q : {-5.0, -1.0, 0.0, 0.5, 2.0}) {
            auto [b, a] = solve_informal_deltas(q, p);
            for (const auto& side : {b, a}) {
                if (side.clamped) continue;
                CHECK(side.residual <= 1e-10);
            }
            // independent bisection on the same equation
            const double skew = q * p.gamma * p.sigma * p.sigma * (p.T - p.t);
            auto equation = [&](double skw) {
                return [&, skw](double d) {
                    return d - (skw + std::log1p(p.gamma / (inf.alpha * inf.K * std::exp(inf.K * d))) /
                                          p.gamma);
                };
            };
            if (!b.clamped) {
                const double ref = oracle::bisect(equation(skew), 0.0, 50.0 / inf.K);
                CHECK(std::abs(b.delta - ref) <= 1e-8);
            }
            if (!a.clamped) {
                const double ref = oracle::bisect(equation(-skew), 0.0, 50.0 / inf.K);
                CHECK(std::abs(a.delta - ref) <= 1e-8);
            }
        }
    }
    SUBCASE("q and -q mirror across the sides") {
        for (double q : {0.25, 1.0, 4.0}) {
            auto [b_pos, a_pos] = solve_informal_deltas(q, p);
            auto [b_neg, a_neg] = solve_informal_deltas(-q, p);
            CHECK(b_pos.delta == a_neg.delta);
            CHECK(a_pos.delta == b_neg.delta);
        }
    }
    SUBCASE("inventory monotonicity") {
        double prev_b = -1.0, prev_a = 1e18;
        for (double q = -10.0; q <= 10.0; q += 1.0) {
            auto [b, a] = solve_informal_deltas(q, p);
            CHECK(b.delta >= prev_b);
            CHECK(a.delta <= prev_a);
            prev_b = b.delta;
            prev_a = a.delta;
        }
    }
    SUBCASE("horizon collapse at t = T") {
        QuoteParams pT = p;
        pT.t = pT.T;
        for (double q : {-20.0, 0.0, 20.0}) {
            auto [b, a] = solve_informal_deltas(q, pT);
            CHECK(b.delta == a.delta);
        }
    }
    SUBCASE("large negative skew clamps the bid distance to zero") {
        // skew of -80 drives the bid fixed point negative while the ask root
        // stays inside the admissible range
        const double q = -80.0 / (p.gamma * p.sigma * p.sigma * (p.T - p.t));
        auto [b, a] = solve_informal_deltas(q, p);
        CHECK(b.delta == 0.0);
        CHECK(b.clamped);
        CHECK(a.delta > 0.0);
        CHECK_FALSE(a.clamped);
    }
    SUBCASE("a skew beyond the admissible range reports no root") {
        CHECK_THROWS_AS(solve_informal_deltas(-1e6, p), std::runtime_error);
    }
    SUBCASE("solver is deterministic") {
        auto [b1, a1] = solve_informal_deltas(1.7, p);
        auto [b2, a2] = solve_informal_deltas(1.7, p);
        CHECK(b1.delta == b2.delta);
        CHECK(a1.delta == a2.delta);
    }
}

TEST_CASE("quotes") {
    SUBCASE("zero inventory is symmetric about the mid") {
        auto qp = quotes(200.0, 0.0, 0.0, informal_params());
        CHECK(200.0 - qp.bid == doctest::Approx(qp.ask - 200.0).epsilon(1e-12));
        CHECK(qp.r == 200.0);
    }
    SUBCASE("positive inventory pushes the bid down") {
        auto q0 = quotes(200.0, 0.0, 0.0, informal_params());
        auto q1 = quotes(200.0, 2.0, 0.0, informal_params());
        CHECK(q1.r < 200.0);
        CHECK(q1.bid < q0.bid);
    }
    SUBCASE("default configuration yields finite quotes with bid < ask") {
        auto qp = quotes(200.0, 0.0, 0.0, informal_params(0.1, 2.38, 0.55, 8.87e-5));
        CHECK(std::isfinite(qp.bid));
        CHECK(std::isfinite(qp.ask));
        CHECK(qp.bid < qp.ask);
    }
    SUBCASE("classical model routes through the closed form") {
        auto p = classical_params(0.1, 1.5);
        auto qp = quotes(100.0, 1.0, 0.0, p);
        auto [db, da] = closed_form_deltas(1.0, p);
        CHECK(qp.bid == doctest::Approx(100.0 - db).epsilon(1e-14));
        CHECK(qp.ask == doctest::Approx(100.0 + da).epsilon(1e-14));
    }
}
