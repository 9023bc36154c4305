#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "perex/levy_model.hpp"
#include "test_models.hpp"

using namespace perex;

TEST(LevyModel, PsiVanishesAtZero) {
    for (const auto& m : {testing_models::standard_model(JumpSide::SpectrallyNegative),
                          testing_models::standard_model(JumpSide::SpectrallyPositive), testing_models::brownian(0.3, -0.1)}) {
        EXPECT_EQ(psi(m, 0.0), 0.0);
        EXPECT_EQ(m.log_mgf(0.0), 0.0);
    }
}

TEST(LevyModel, PsiOfCalibratedModelAtOne) {
    const LevyModel m{JumpSide::SpectrallyNegative, 0.2, 1.0 / 3.0, 1.0, 2.0};
    // 1/3 + 0.02 + (2/3 - 1)
    EXPECT_NEAR(psi(m, 1.0), 0.02, 1e-15);
}

TEST(LevyModel, PsiPureBrownian) {
    const LevyModel m = testing_models::brownian(0.2, 0.0);
    EXPECT_NEAR(psi(m, 2.0), 0.08, 1e-15);
}

TEST(LevyModel, PsiPoleIsADomainError) {
    const LevyModel m = testing_models::standard_model(JumpSide::SpectrallyNegative);
    EXPECT_THROW(psi(m, -2.0), DomainError);
    EXPECT_THROW(psi(m, -3.0), DomainError);
    EXPECT_NO_THROW(psi(m, -1.5));
}

TEST(LevyModel, PhiDriftlessBrownianClosedForm) {
    const LevyModel m = testing_models::brownian(0.2, 0.0);
    EXPECT_NEAR(phi(m, 0.05), std::sqrt(2.5), 1e-13);
}

TEST(LevyModel, PhiExceedsOneWhenPsiOfOneIsBelowP) {
    const LevyModel m = testing_models::standard_model(JumpSide::SpectrallyNegative);
    const double p = phi(m, 0.05);
    EXPECT_GT(p, 1.0);
    EXPECT_NEAR(psi(m, p), 0.05, 1e-12);
}

TEST(LevyModel, PhiRoundTripAndMonotone) {
    for (const auto& m : {testing_models::standard_model(JumpSide::SpectrallyNegative),
                          testing_models::standard_model(JumpSide::SpectrallyPositive), testing_models::brownian(0.2, 0.3),
                          LevyModel{JumpSide::SpectrallyNegative, 0.0, 0.8, 1.5, 3.0}}) {
        double prev = 0.0;
        for (double p : {1e-6, 1e-3, 0.05, 0.3, 1.0, 1.05, 10.0, 1e3, 1e6}) {
            const double f = phi(m, p);
            EXPECT_LE(std::fabs(psi(m, f) - p), 1e-12 * std::max(1.0, p)) << "p = " << p;
            EXPECT_GT(f, prev);
            prev = f;
        }
    }
}

TEST(LevyModel, PhiRejectsNonPositive) {
    const LevyModel m = testing_models::standard_model(JumpSide::SpectrallyNegative);
    EXPECT_THROW(phi(m, 0.0), DomainError);
    EXPECT_THROW(phi(m, -1.0), DomainError);
}

TEST(LevyModel, CalibrateDriftSpectrallyNegative) {
    EXPECT_NEAR(calibrate_drift(0.2, 1.0, 2.0, JumpSide::SpectrallyNegative, 0.05, 0.03), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(calibrate_drift(0.2, 0.0, 2.0, JumpSide::SpectrallyNegative, 0.05, 0.05), -0.02, 1e-15);
}

TEST(LevyModel, CalibrateDriftSpectrallyPositive) {
    const double c = calibrate_drift(0.2, 1.0, 2.0, JumpSide::SpectrallyPositive, 0.05, 0.03);
    EXPECT_NEAR(c, -1.0, 1e-15);
    const LevyModel m{JumpSide::SpectrallyPositive, 0.2, c, 1.0, 2.0};
    // log E[S_1] of X equals psi of the dual at -1.
    EXPECT_NEAR(psi(m, -1.0), 0.02, 1e-15);
    EXPECT_NEAR(m.log_mgf(1.0), 0.02, 1e-15);
    EXPECT_THROW(calibrate_drift(0.2, 1.0, 1.0, JumpSide::SpectrallyPositive, 0.05, 0.03), DomainError);
    EXPECT_THROW(calibrate_drift(0.2, 1.0, 0.5, JumpSide::SpectrallyPositive, 0.05, 0.03), DomainError);
}

TEST(LevyModel, CallAssumption) {
    EXPECT_TRUE(check_call_assumption(testing_models::standard_model(JumpSide::SpectrallyNegative), 0.05));
    EXPECT_TRUE(check_call_assumption(testing_models::standard_model(JumpSide::SpectrallyPositive), 0.05));
    // delta = 0: psi(1) = r exactly, boundary excluded.
    const double c = calibrate_drift(0.2, 1.0, 2.0, JumpSide::SpectrallyNegative, 0.05, 0.0);
    EXPECT_FALSE(check_call_assumption(LevyModel{JumpSide::SpectrallyNegative, 0.2, c, 1.0, 2.0}, 0.05));
    // SP with rho <= 1: E[S_1] is infinite.
    EXPECT_FALSE(check_call_assumption(LevyModel{JumpSide::SpectrallyPositive, 0.2, -2.0, 1.0, 1.0}, 0.05));
    EXPECT_FALSE(check_call_assumption(LevyModel{JumpSide::SpectrallyPositive, 0.2, -2.0, 1.0, 0.7}, 0.05));
}

TEST(LevyModel, ValidationRejectsDegenerateModels) {
    EXPECT_THROW((LevyModel{JumpSide::SpectrallyNegative, 0.0, 0.1, 0.0, 2.0}.validate()), DomainError);
    EXPECT_THROW((LevyModel{JumpSide::SpectrallyNegative, 0.0, -0.1, 1.0, 2.0}.validate()), DomainError);
    EXPECT_THROW((LevyModel{JumpSide::SpectrallyPositive, 0.0, 0.1, 1.0, 2.0}.validate()), DomainError);
    EXPECT_THROW((LevyModel{JumpSide::SpectrallyNegative, -0.2, 0.1, 1.0, 2.0}.validate()), DomainError);
    EXPECT_THROW((LevyModel{JumpSide::SpectrallyNegative, 0.2, 0.1, -1.0, 2.0}.validate()), DomainError);
    EXPECT_THROW((LevyModel{JumpSide::SpectrallyNegative, 0.2, 0.1, 1.0, 0.0}.validate()), DomainError);
    EXPECT_NO_THROW((LevyModel{JumpSide::SpectrallyNegative, 0.0, 0.1, 1.0, 2.0}.validate()));
    EXPECT_NO_THROW((LevyModel{JumpSide::SpectrallyPositive, 0.0, -0.1, 1.0, 2.0}.validate()));
}

TEST(LevyModel, DualOfDualIsIdentity) {
    const LevyModel m = testing_models::standard_model(JumpSide::SpectrallyPositive);
    const LevyModel dd = m.dual().dual();
    EXPECT_EQ(dd.side, m.side);
    EXPECT_EQ(dd.sigma, m.sigma);
    EXPECT_EQ(dd.drift, m.drift);
    EXPECT_EQ(dd.jump_rate, m.jump_rate);
    EXPECT_EQ(dd.jump_param, m.jump_param);
    // Y = -X: psi_Y(theta) = log E[e^{-theta X_1}].
    for (double t : {-1.5, -0.3, 0.4, 2.0}) EXPECT_NEAR(m.dual().log_mgf(t), m.log_mgf(-t), 1e-14);
}

TEST(LevyModel, PsiIsConvex) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> theta(0.0, 20.0), weight(0.0, 1.0);
    for (const auto& m : {testing_models::standard_model(JumpSide::SpectrallyNegative),
                          testing_models::standard_model(JumpSide::SpectrallyPositive)}) {
        for (int i = 0; i < 2000; ++i) {
            double a = theta(gen), b = theta(gen);
            if (a > b) std::swap(a, b);
            const double t = weight(gen);
            EXPECT_LE(psi(m, t * a + (1 - t) * b), t * psi(m, a) + (1 - t) * psi(m, b) + 1e-12);
        }
    }
}

TEST(LevyModel, PsiMinusRateOverOneMinusPhiIsPositive) {
    const LevyModel m = testing_models::standard_model(JumpSide::SpectrallyNegative);
    for (double s = 0.001; s < 30.0; s *= 1.37) {
        double ss = s;
        if (std::fabs(phi(m, ss) - 1.0) < 1e-9) ss *= 1.0 + 1e-6;
        EXPECT_GT((psi(m, 1.0) - ss) / (1.0 - phi(m, ss)), 0.0) << "s = " << ss;
    }
}

TEST(LevyModel, DividedDifferencesMatchDirectEvaluation) {
    for (const auto& m : {testing_models::standard_model(JumpSide::SpectrallyNegative),
                          testing_models::standard_model(JumpSide::SpectrallyPositive)}) {
        const LevyModel sn = m.sn_view();
        const double a = 0.7, b = 2.9, c = -0.4;
        EXPECT_NEAR(sn.slope(a, b), (sn.log_mgf(a) - sn.log_mgf(b)) / (a - b), 1e-13);
        const double second = (sn.slope(a, b) - sn.slope(b, c)) / (a - c);
        EXPECT_NEAR(sn.curvature(a, b, c), second, 1e-12);
        EXPECT_NEAR(sn.slope(a, a), sn.log_mgf_prime(a), 1e-15);
    }
}

TEST(LevyModel, EsscherExponentIsShiftedPsi) {
    for (JumpSide side : {JumpSide::SpectrallyNegative, JumpSide::SpectrallyPositive}) {
        const LevyModel m = testing_models::standard_model(side);
        for (double h : {0.5, 1.0}) {
            const LevyModel t = m.esscher(h);
            for (double theta : {-0.7, 0.3, 0.9}) {
                const double expected = m.log_mgf(theta + h) - m.log_mgf(h);
                EXPECT_NEAR(t.log_mgf(theta), expected, 1e-14 * std::max(1.0, std::fabs(expected)));
            }
        }
    }
    EXPECT_THROW(testing_models::standard_model(JumpSide::SpectrallyPositive).esscher(2.0), DomainError);
}
