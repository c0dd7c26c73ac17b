#include <cmath>

#include <gtest/gtest.h>

#include "kgedmd/operators.hpp"
#include "kgedmd/rng.hpp"
#include "kgedmd/sampling.hpp"
#include "kgedmd/systems.hpp"

using namespace kgedmd;

namespace {

Vec s1(double x) { return Vec::Constant(1, x); }

SecondOrderSpec constant_a(int d, double a0) {
    SecondOrderSpec s;
    s.dim = d;
    s.a = [a0, d](const Vec&) -> Mat { return a0 * Mat::Identity(d, d); };
    return s;
}

}  // namespace

TEST(Operators, FirstOrderCoefficientTrivial) {
    SecondOrderSpec s = constant_a(2, 1.3);
    EXPECT_EQ(eval_first_order_coeff(s, Vec::Ones(2)), Vec::Zero(2));
}

TEST(Operators, FirstOrderCoefficientFromPotential) {
    SecondOrderSpec s = constant_a(1, 1.0);
    s.gradF = [](const Vec& x) -> Vec { return 2.0 * x; };
    for (double x : {-1.5, 0.0, 0.3, 2.0}) EXPECT_DOUBLE_EQ(eval_first_order_coeff(s, s1(x))(0), x);
}

TEST(Operators, FirstOrderCoefficientNonFiniteThrows) {
    SecondOrderSpec s = constant_a(1, 1.0);
    s.J = [](const Vec&) -> Vec { return Vec::Constant(1, NAN); };
    EXPECT_THROW(eval_first_order_coeff(s, s1(0.0)), EvaluationError);
}

TEST(Operators, GeneratorDecompositionCollapsesToMinusDrift) {
    // F = beta V, a = 2/beta, J = 1/2 e^F div(e^-F a) - b = -b - 1/2 a F'  for constant a
    auto ou = systems::ou().drift_diffusion;
    double beta = 1.0 / ou.inv_beta;
    SecondOrderSpec s = constant_a(1, 2.0 * ou.inv_beta);
    s.gradF = [&](const Vec& x) -> Vec { return beta * ou.grad_potential(x); };
    s.J = [&](const Vec& x) -> Vec {
        Vec b = -ou.grad_potential(x);
        return -b - 0.5 * (2.0 * ou.inv_beta) * beta * ou.grad_potential(x);
    };
    for (double x : {-2.0, -0.4, 1.1}) EXPECT_NEAR(eval_first_order_coeff(s, s1(x))(0), x, 1e-15);
}

TEST(Operators, GeneratorAsT) {
    GeneratorSpec g;
    g.dim = 1;
    g.drift = [](const Vec& x) -> Vec { return -x; };
    g.diffusion = [](const Vec&) -> Mat { return std::sqrt(2.0) * Mat::Identity(1, 1); };
    auto t = generator_as_T(g);
    EXPECT_NEAR(t.a(s1(0.7))(0, 0), 2.0, 1e-15);
    EXPECT_DOUBLE_EQ(t.c(s1(0.7))(0), 0.7);
    EXPECT_FALSE(static_cast<bool>(t.W));

    GeneratorSpec free;
    free.dim = 2;
    free.drift = [](const Vec&) -> Vec { return Vec::Zero(2); };
    free.diffusion = [](const Vec&) -> Mat { return Mat::Identity(2, 2); };
    auto tf = generator_as_T(free);
    EXPECT_EQ(tf.c(Vec::Ones(2)), Vec::Zero(2));
    EXPECT_EQ(tf.a(Vec::Ones(2)), Mat::Identity(2, 2));

    auto qw = systems::quadwell().drift_diffusion;
    auto tq = generator_as_T(qw.to_generator());
    Vec x(2);
    x << 0.3, -1.2;
    EXPECT_EQ(tq.c(x), qw.grad_potential(x));
}

TEST(Operators, GroundStateTransformOrnsteinUhlenbeck) {
    DriftDiffusionSpec ou;
    ou.dim = 1;
    ou.inv_beta = 0.5;  // beta = 2, F = x^2, a = 1
    ou.potential = [](const Vec& x) { return 0.5 * x(0) * x(0); };
    ou.grad_potential = [](const Vec& x) -> Vec { return x; };
    ou.hess_potential = [](const Vec&) -> Mat { return Mat::Identity(1, 1); };
    auto h = generator_to_schrodinger(ou);
    for (double x : {-2.0, 0.0, 0.5, 3.0}) EXPECT_NEAR(h.W(s1(x)), -0.5 + 0.5 * x * x, 1e-14);
    EXPECT_NEAR(h.hbar * h.hbar / h.mass, 1.0, 1e-15);

    DriftDiffusionSpec no_hess = ou;
    no_hess.hess_potential = nullptr;
    auto hf = generator_to_schrodinger(no_hess);
    for (double x : {-2.0, 0.5}) EXPECT_NEAR(hf.W(s1(x)), -0.5 + 0.5 * x * x, 1e-9);
    EXPECT_THROW(generator_to_schrodinger(no_hess, false), ConfigError);
}

TEST(Operators, GroundStateTransformConstantPotential) {
    SecondOrderSpec s = constant_a(2, 1.0);
    s.gradF = [](const Vec&) -> Vec { return Vec::Zero(2); };
    auto h = generator_to_schrodinger(s);
    EXPECT_EQ(h.W(Vec::Ones(2)), 0.0);
}

TEST(Operators, GroundStateAnnihilation) {
    for (auto sys : {systems::ou(), systems::quadwell()}) {
        const auto& dd = sys.drift_diffusion;
        auto so = drift_diffusion_as_second_order(dd);
        auto h = generator_to_schrodinger(dd);
        Mat grid = sys.dim == 1 ? tensor_grid(Vec::Constant(1, -3.0), Vec::Constant(1, 3.0), 101)
                                : tensor_grid(Vec::Constant(2, -2.0), Vec::Constant(2, 2.0), 31);
        double beta = 1.0 / dd.inv_beta;
        for (Eigen::Index i = 0; i < grid.cols(); ++i) {
            Vec x = grid.col(i);
            EXPECT_LT(std::abs(ground_state_residual(h, so, x, beta * dd.potential(x))), 1e-8) << sys.id;
        }
    }
}

TEST(Operators, SchrodingerToGenerator) {
    auto qho = systems::qho();
    auto g = schrodinger_to_generator(qho.schrodinger, qho.eta, qho.grad_eta, qho.ground_energy);
    EXPECT_DOUBLE_EQ(g.inv_beta, 0.5);
    EXPECT_DOUBLE_EQ(g.energy_shift, 0.5);
    EXPECT_DOUBLE_EQ(g.potential(s1(1.5)), 0.5 * 1.5 * 1.5);
    auto gen = g.to_generator();
    EXPECT_DOUBLE_EQ(gen.drift(s1(0.8))(0), -0.8);
    EXPECT_DOUBLE_EQ(gen.diffusion(s1(0.8))(0, 0), 1.0);

    auto hyd = systems::hydrogen();
    auto gh = schrodinger_to_generator(hyd.schrodinger, hyd.eta, hyd.grad_eta, hyd.ground_energy);
    Vec x(3);
    x << 1.0, 2.0, -2.0;
    EXPECT_DOUBLE_EQ(gh.potential(x), 3.0);
    EXPECT_TRUE(gh.grad_potential(x).isApprox(x / 3.0));
    EXPECT_EQ(gh.grad_potential(Vec::Zero(3)), Vec::Zero(3));
    EXPECT_DOUBLE_EQ(gh.energy_shift, -0.5);

    SchrodingerSpec free;
    free.dim = 2;
    auto gf = schrodinger_to_generator(
        free, [](const Vec&) { return 0.0; }, [](const Vec&) -> Vec { return Vec::Zero(2); }, 0.0);
    EXPECT_EQ(gf.potential(Vec::Ones(2)), 0.0);

    auto bad = schrodinger_to_generator(
        free, [](const Vec&) { return INFINITY; }, [](const Vec&) -> Vec { return Vec::Zero(2); }, 0.0);
    EXPECT_THROW(bad.potential(Vec::Ones(2)), DomainError);
}

TEST(Operators, RoundTrip) {
    auto ou = systems::ou().drift_diffusion;
    Mat g1 = tensor_grid(Vec::Constant(1, -3.0), Vec::Constant(1, 3.0), 101);
    EXPECT_LT(roundtrip_check(ou, g1), 1e-10);

    auto qw = systems::quadwell().drift_diffusion;
    Philox rng(2);
    Mat g2(2, 1000);
    for (int i = 0; i < 1000; ++i) g2.col(i) << -2.0 + 4.0 * rng.uniform(), -2.0 + 4.0 * rng.uniform();
    EXPECT_LT(roundtrip_check(qw, g2), 1e-8);

    DriftDiffusionSpec zero;
    zero.dim = 1;
    zero.inv_beta = 1.0;
    zero.potential = [](const Vec&) { return 0.0; };
    zero.grad_potential = [](const Vec&) -> Vec { return Vec::Zero(1); };
    EXPECT_EQ(roundtrip_check(zero, g1), 0.0);
    EXPECT_THROW(roundtrip_check(zero, Mat(1, 0)), InputError);
}

TEST(Operators, HydrogenDriftDefinedAtOrigin) {
    auto hyd = systems::hydrogen();
    EXPECT_EQ(hyd.grad_eta(Vec::Zero(3)), Vec::Zero(3));
    Vec tiny = Vec::Constant(3, 1e-14);
    EXPECT_EQ(hyd.grad_eta(tiny), Vec::Zero(3));
}

TEST(Operators, EnergyShiftReconstruction) {
    auto qho = systems::qho();
    auto g = schrodinger_to_generator(qho.schrodinger, qho.eta, qho.grad_eta, qho.ground_energy);
    for (int l = 0; l < 5; ++l) EXPECT_DOUBLE_EQ(g.energy_shift + l, l + 0.5);
}
