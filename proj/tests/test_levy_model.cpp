#include <cmath>

#include <gtest/gtest.h>

#include "lsc/levy_model.hpp"
#include "oracles.hpp"

using lsc::LevyModel;

namespace {

LevyModel jd() { return LevyModel::jump_diffusion(0.1, 0.3, 1.0, 4.0, 1.5, 5.0); }
LevyModel cpp() { return LevyModel::compound_poisson(4.0 / 7.0, 3.0, 3.0 / 7.0, 4.0); }

}  // namespace

TEST(LevyModel, ExponentMatchesHandValues) {
    // 0.5 * 0.09 + 0.1 + 1/3 - 1.5/6
    EXPECT_NEAR(jd().characteristic_exponent(1.0), 0.045 + 0.1 + 1.0 / 3.0 - 0.25, 1e-15);
    EXPECT_NEAR(cpp().characteristic_exponent(1.0), 0.2, 1e-15);
    EXPECT_NEAR(cpp().characteristic_exponent(-1.0), 0.0, 1e-15);
    EXPECT_EQ(jd().characteristic_exponent(0.0), 0.0);
}

TEST(LevyModel, MeanIsSlopeAtZero) {
    for (const auto& m : {jd(), cpp()}) {
        const double fd = oracle::central_difference([&](double z) { return m.characteristic_exponent(z); }, 0.0, 1e-5);
        EXPECT_NEAR(m.mean(), fd, 1e-9);
        EXPECT_NEAR(m.exponent_derivative(0.3), oracle::central_difference(
                                                    [&](double z) { return m.characteristic_exponent(z); }, 0.3, 1e-5),
                    1e-8);
    }
    EXPECT_NEAR(cpp().mean(), 1.0 / 12.0, 1e-15);
}

TEST(LevyModel, CumulantsAreTaylorCoefficients) {
    const auto m = jd();
    auto phi = [&](double z) { return m.characteristic_exponent(z); };
    const double h = 1e-3;
    const double second = (phi(h) - 2.0 * phi(0.0) + phi(-h)) / (h * h);
    EXPECT_NEAR(m.variance_rate(), second, 1e-6);
    const double third = (phi(2 * h) - 2 * phi(h) + 2 * phi(-h) - phi(-2 * h)) / (2 * h * h * h);
    EXPECT_NEAR(m.cumulant(3), third, 1e-4);
}

TEST(LevyModel, DomainIsBoundedByPoles) {
    const auto m = jd();
    EXPECT_EQ(m.upper_domain(), 4.0);
    EXPECT_EQ(m.lower_domain(), -5.0);
    EXPECT_THROW((void)m.characteristic_exponent(4.0), lsc::DomainError);
    EXPECT_THROW((void)m.characteristic_exponent(-5.5), lsc::DomainError);
    EXPECT_NO_THROW((void)m.characteristic_exponent(3.999));

    const auto bm = LevyModel::brownian(0.1, 0.2);
    EXPECT_TRUE(std::isinf(bm.upper_domain()));
    EXPECT_NEAR(bm.characteristic_exponent(10.0), 0.5 * 0.04 * 100.0 + 1.0, 1e-12);
}

TEST(LevyModel, RejectsInvalidParameters) {
    EXPECT_THROW(LevyModel::jump_diffusion(0.0, -0.1, 1.0, 1.0, 1.0, 1.0), lsc::ParameterError);
    EXPECT_THROW(LevyModel::jump_diffusion(0.0, 0.1, -1.0, 1.0, 1.0, 1.0), lsc::ParameterError);
    EXPECT_THROW(LevyModel::jump_diffusion(0.0, 0.1, 1.0, 0.0, 1.0, 1.0), lsc::ParameterError);
    EXPECT_THROW(LevyModel::compound_poisson(0.0, 1.0, 0.0, 1.0), lsc::ParameterError);
    EXPECT_THROW(LevyModel(lsc::ProcessKind::CompoundPoisson, 0.1, 0.0, 1.0, 1.0, 1.0, 1.0), lsc::ParameterError);
    EXPECT_THROW(LevyModel::jump_diffusion(NAN, 0.1, 1.0, 1.0, 1.0, 1.0), lsc::ParameterError);
}

TEST(Assumption1, PassesForBundledExample) {
    const auto rep = lsc::check_assumption1(cpp(), 1.0, 1.0);
    EXPECT_TRUE(rep.passed);
    EXPECT_NEAR(rep.phi_plus, 0.2, 1e-15);
    EXPECT_NEAR(rep.phi_minus, 0.0, 1e-15);
}

TEST(Assumption1, ThetaOutsideDomain) {
    const auto rep = lsc::check_assumption1(cpp(), 1.0, 3.0);
    EXPECT_FALSE(rep.passed);
    EXPECT_FALSE(rep.theta_in_domain);
    EXPECT_EQ(rep.reason, "θ outside domain of φ");
}

TEST(Assumption1, FailsWhenExponentReachesDelta) {
    const auto rep = lsc::check_assumption1(jd(), 0.5, 1.5);
    EXPECT_TRUE(rep.theta_in_domain);
    EXPECT_FALSE(rep.passed);
    EXPECT_GE(std::max(rep.phi_plus, rep.phi_minus), 0.5);
}
