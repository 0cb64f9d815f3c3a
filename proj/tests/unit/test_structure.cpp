#include <gtest/gtest.h>

#include <cmath>

#include "convarb/error.hpp"
#include "convarb/structure.hpp"

using namespace convarb;

namespace {

ModelConfig config(const std::string& name, std::size_t steps = 200, double horizon = 1.0) {
    ModelConfig c;
    c.name = name;
    c.grid = {horizon, steps};
    c.seed = 7;
    return c;
}

const char* kModels[] = {"two_defaults", "random_barrier", "survival_claim", "predictable_default_variant",
                         "insider_defaultable", "risk_attitudes", "filtering", "deterministic_h"};

}  // namespace

TEST(NormalForm, SurvivalClaimXIsNormalForm) {
    auto c = config("survival_claim");
    c.params = {{"lambda_x", 1.0}, {"lambda_y", 2.0}};
    for (std::uint64_t s = 0; s < 50; ++s) EXPECT_EQ(check_normal_form(simulate(c, s)).X, NormalFormVerdict::normal_form);
}

TEST(NormalForm, TwoDefaultsYIncreasingJump) {
    auto c = config("two_defaults");
    int seen = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto p = simulate(c, s);
        if (!p.meta.event("theta2")) continue;
        EXPECT_EQ(check_normal_form(p).Y, NormalFormVerdict::J_not_decreasing);
        ++seen;
    }
    EXPECT_GT(seen, 0);
}

TEST(NormalForm, FilteringYTerminalJump) {
    auto c = config("filtering", 200);
    int up = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        auto p = simulate(c, s);
        auto v = check_normal_form(p).Y;
        if (p.dJY[p.steps() - 1] > 0) {
            EXPECT_EQ(v, NormalFormVerdict::J_not_decreasing);
            ++up;
        }
    }
    EXPECT_GT(up, 0);
}

TEST(NormalForm, VerdictNames) {
    EXPECT_STREQ(to_string(NormalFormVerdict::J_not_decreasing), "J_not_decreasing");
    EXPECT_STREQ(to_string(NormalFormVerdict::singularity_violated), "singularity_violated");
}

TEST(SplitA, ReconstructsExactly) {
    for (const char* name : kModels) {
        auto c = config(name, 100, std::string(name) == "risk_attitudes" ? 2.0 : 1.0);
        for (std::uint64_t s = 0; s < 20; ++s) {
            auto p = simulate(c, s);
            auto a = split_A(p);
            for (std::size_t i = 0; i < p.steps(); ++i) ASSERT_EQ(a.A1[i] + a.A2[i], p.dA[i]) << name << " " << i;
        }
    }
}

TEST(SplitA, NonpositiveRhoHasNoSingularPart) {
    auto c = config("risk_attitudes", 200, 2.0);
    c.params = {{"rho", -0.5}};
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto a = split_A(simulate(c, s));
        for (double x : a.A2.mass) EXPECT_LE(std::abs(x), 1e-15);
    }
}

TEST(SplitA, DeterministicHDensity) {
    // a1 = 1{h>0} (f M)^+ / h^2 with f = -r e^{rt}, M = X - x0
    auto c = config("deterministic_h", 200);
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto p = simulate(c, s);
        auto a = split_A(p);
        for (std::size_t i = 0; i < p.steps(); ++i) {
            if (p.meta.absorption_point && i >= *p.meta.absorption_point) break;
            double t = p.grid.points[i];
            double f = -std::exp(t);
            double expect = p.h[i] > 0 ? std::max(f * (p.X[i] - 1.0), 0.0) / (p.h[i] * p.h[i]) : 0.0;
            EXPECT_NEAR(a.a1_tilde[i], expect, 1e-12 * std::max(1.0, expect)) << "step " << i;
        }
    }
}

TEST(SplitA, NonpositiveIntegrandSendsEverythingSingular) {
    auto p = simulate(config("survival_claim"), 0);
    for (std::size_t i = 0; i < p.steps(); ++i) {
        p.h[i] = -std::abs(p.h[i]);
        p.dA[i] = 0.01;
    }
    auto a = split_A(p);
    for (std::size_t i = 0; i < p.steps(); ++i) {
        EXPECT_EQ(a.A1[i], 0.0);
        EXPECT_EQ(a.A2[i], p.dA[i]);
    }
}

TEST(C1C2, PredictableDefaultFailsC1) {
    auto c = config("predictable_default_variant");
    for (std::uint64_t s = 0; s < 50; ++s) {
        auto r = analyze_structure(simulate(c, s));
        EXPECT_FALSE(r.c12.C1);
    }
}

TEST(C1C2, RiskAttitudesExamplePoint) {
    // rho = 0.8, T = 2, t = 0.2, W = -1: drift+ = 0.44 dt, d<M2> = (1 - rho^2)(T - t)^2 dt
    auto c = config("risk_attitudes", 10, 2.0);
    c.params = {{"rho", 0.8}};
    auto p = simulate(c, 0);
    const double dt = p.grid.dt(1);
    ASSERT_NEAR(p.h[1], -0.44, 1e-15);
    p.dA[1] = 0.44 * dt;
    p.da[1] = 0.0;
    p.M2.qv[1] = 0.36 * 1.8 * 1.8 * dt;
    auto s = split_A(p);
    auto r = check_C1_C2(p, s.A2);
    EXPECT_NEAR(r.a2_tilde[1], 0.44 / (0.36 * 3.24), 1e-12);
    EXPECT_NEAR(r.a2_tilde[1], 0.3772, 5e-5);
}

TEST(C1C2, RiskAttitudesClosedFormAlongPath) {
    auto c = config("risk_attitudes", 400, 2.0);
    c.params = {{"rho", 0.8}};
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto p = simulate(c, s);
        auto r = analyze_structure(p);
        EXPECT_TRUE(r.c12.C1);
        EXPECT_TRUE(r.c12.C2);
        for (std::size_t i = 0; i < p.steps(); ++i) {
            if (p.meta.absorption_point && i >= *p.meta.absorption_point) break;
            if (p.h[i] > 0) continue;
            double t = p.grid.points[i], dt = p.grid.dt(i);
            double drift = p.dA[i] - p.da[i];  // h W dt
            double expect = std::max(drift, 0.0) / ((1 - 0.64) * (2.0 - t) * (2.0 - t) * dt);
            EXPECT_NEAR(r.c12.a2_tilde[i], expect, 1e-12 * std::max(1.0, expect));
        }
    }
}

TEST(C1C2, A2TildeVanishesWherePositiveIntegrand) {
    for (const char* name : kModels) {
        auto c = config(name, 100, std::string(name) == "risk_attitudes" ? 2.0 : 1.0);
        if (std::string(name) == "risk_attitudes") c.params = {{"rho", 0.8}};
        for (std::uint64_t s = 0; s < 20; ++s) {
            auto p = simulate(c, s);
            auto r = analyze_structure(p);
            for (std::size_t i = 0; i < p.steps(); ++i)
                if (p.h[i] > 0) ASSERT_EQ(r.c12.a2_tilde[i], 0.0) << name << " step " << i;
        }
    }
}

TEST(C1C2, ContinuousM2HoldsC2Vacuously) {
    auto c = config("risk_attitudes", 100, 2.0);
    auto p = simulate(c, 0);
    ASSERT_TRUE(p.M2.jumps.empty());
    EXPECT_TRUE(analyze_structure(p).c12.C2);
}

TEST(C1C2, LargeJumpFailsC2) {
    auto p = simulate(config("risk_attitudes", 10, 2.0), 0);
    DiscreteMeasure A2(p.steps());
    A2[3] = 2.0 * p.M2.qv[3];
    p.M2.jumps.push_back({3, 0.6});
    auto r = check_C1_C2(p, A2);
    EXPECT_TRUE(r.C1);
    EXPECT_FALSE(r.C2);
    EXPECT_EQ(r.C2_jumps, (std::vector<std::size_t>{3}));
}

TEST(Covariation, DeterministicHFailsOnNegativeExcursions) {
    auto c = config("deterministic_h", 200);
    int failing = 0;
    for (std::uint64_t s = 0; s < 30; ++s) {
        auto p = simulate(c, s);
        auto v = covariation_rule(p);
        for (std::size_t i : v.violation_cells) {
            EXPECT_LT(p.h[i], 0.0);
            EXPECT_LT(p.X[i], 1.0);
        }
        failing += !v.holds;
    }
    EXPECT_GT(failing, 0);
}

TEST(Covariation, SurvivalClaimHolds) {
    auto c = config("survival_claim");
    c.params = {{"lambda_x", 1.0}, {"lambda_y", 2.0}};
    for (std::uint64_t s = 0; s < 50; ++s) EXPECT_TRUE(covariation_rule(simulate(c, s)).holds);
}

TEST(Covariation, ZeroFiniteVariationHolds) {
    auto p = simulate(config("deterministic_h"), 0);
    for (std::size_t i = 0; i < p.steps(); ++i) p.dA[i] = p.da[i] = 0.0;
    EXPECT_TRUE(covariation_rule(p).holds);
}

TEST(Covariation, RequiresVanishingM2) {
    EXPECT_THROW(covariation_rule(simulate(config("risk_attitudes", 50, 2.0), 0)), PreconditionError);
}
