#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cha/entropy.hpp"
#include "oracles.hpp"

using namespace cha;
using std::numbers::pi;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Orders, ConjugateBetaIsExact) {
    EntropicOrders o;
    EXPECT_EQ(o.alpha_exact(), (Rational{3, 5}));
    EXPECT_EQ(o.beta_exact(), (Rational{3, 1}));
    EXPECT_NEAR(1 / o.alpha() + 1 / o.beta(), 2.0, 1e-15);
    EntropicOrders two(Rational{7, 10});
    EXPECT_EQ(two.beta_exact(), (Rational{7, 4}));
}

TEST(Orders, ConjugacyEnforced) {
    EXPECT_THROW(EntropicOrders(Rational{2, 5}), ValidationError);
    EXPECT_THROW(EntropicOrders(Rational{1, 1}), ValidationError);
    EXPECT_THROW(EntropicOrders(Rational{3, 5}, Rational{2, 1}), ValidationError);
    EXPECT_NO_THROW(EntropicOrders(Rational{3, 5}, Rational{3, 1}));
}

TEST(Entropy, RenyiRejectsShannonOrder) { EXPECT_THROW(renyi(0.5, 0, 0, 1.0), DomainError); }

TEST(Entropy, FreeGroundStateOnicescu) {
    auto m = compute_all({1, 0, 0}, {1.0});
    EXPECT_NEAR(m.E_r, 1.0 / (8 * pi), 1e-12);
}

TEST(Entropy, FreeAtomFootnotes) {
    auto p = compute_all({2, 1, 0}, {1.0});
    EXPECT_NEAR(p.S_r, 7.264897118452, 1e-10);
    EXPECT_NEAR(p.S_p, 0.042420799485, 1e-10);
    EXPECT_NEAR(p.S_t, 7.307317917937, 1e-10);
    EXPECT_NEAR(p.R_t, 6.952126298319, 1e-10);
    auto d = compute_all({3, 2, 0}, {1.0});
    EXPECT_NEAR(d.R_p, -2.311283609195, 1e-10);
}

TEST(Entropy, FactoredMatchesBruteForce3D) {
    for (auto qn : {QuantumNumbers{1, 0, 0}, QuantumNumbers{2, 1, 0}})
        for (double rc : {0.5, 5.0}) {
            auto rs = solve_state(qn, {1.0, rc});
            auto ms = to_momentum(rs);
            auto m = measures_from(rs, ms, {});
            const double a = m.orders.alpha(), b = m.orders.beta();
            std::vector<double> rcuts{0.0, rc};
            std::vector<double> pcuts{0.0};
            pcuts.insert(pcuts.end(), ms.zeros.begin(), ms.zeros.end());
            pcuts.push_back(ms.p_max);
            const double pw = pi / (4 * rc);  // an eighth of the wall oscillation period

            double wr = oracle::brute_force(rs.amplitude, qn.l, 0, rcuts, rc / 32, [&](double x) { return std::pow(x, a); });
            double sr = oracle::brute_force(rs.amplitude, qn.l, 0, rcuts, rc / 32,
                                    [](double x) { return x > 0 ? -x * std::log(x) : 0.0; });
            double wp = oracle::brute_force(ms.amplitude, qn.l, 0, pcuts, pw, [&](double x) { return std::pow(x, b); });
            double sp = oracle::brute_force(ms.amplitude, qn.l, 0, pcuts, pw,
                                    [](double x) { return x > 0 ? -x * std::log(x) : 0.0; });
            EXPECT_NEAR(m.R_r, std::log(wr) / (1 - a), 1e-7) << state_label(qn) << rc;
            EXPECT_NEAR(m.R_p, std::log(wp) / (1 - b), 1e-7) << state_label(qn) << rc;
            EXPECT_NEAR(m.S_r, sr, 1e-7) << state_label(qn) << rc;
            EXPECT_NEAR(m.S_p, sp, 1e-7) << state_label(qn) << rc;
        }
}

TEST(Entropy, RenyiApproachesShannon) {
    const double h = 1e-4;
    for (auto [qn, rc] : {std::pair{QuantumNumbers{2, 1, 0}, 1.0}, {QuantumNumbers{3, 2, 0}, 7.5}}) {
        auto rs = solve_state(qn, {1.0, rc});
        auto ms = to_momentum(rs);
        auto s = shannon(rs.density(), ms.density(), qn.l, qn.m);
        for (auto [view, target] : {std::pair{rs.density(), s.S_r}, {ms.density(), s.S_p}}) {
            double lo = renyi(radial_moment(view, 1 - h), qn.l, qn.m, 1 - h);
            double hi = renyi(radial_moment(view, 1 + h), qn.l, qn.m, 1 + h);
            EXPECT_GT(lo, target);  // Renyi entropy decreases with order
            EXPECT_LT(hi, target);
            EXPECT_NEAR(0.5 * (lo + hi), target, 1e-5);
        }
    }
}

TEST(Entropy, OrderTwoConsistency) {
    // confined p-space moments of order 2/3 diverge, so the order-2 pair runs on r space
    auto rs = solve_state({2, 1, 0}, {1.0, 2.0});
    auto m = measures_from(rs, to_momentum(rs), {});
    EntropicOrders two(Rational{2, 1});
    double w2 = full_moment(radial_moment(rs.density(), 2.0), *angular_factor(1, 0), 2.0);
    EXPECT_EQ(w2, m.W_r_2);
    EXPECT_NEAR(renyi(radial_moment(rs.density(), 2.0), 1, 0, 2.0), -std::log(m.E_r), 1e-12);
    EXPECT_NEAR(tsallis(w2, 1.0, two).T_r, 1 - m.E_r, 1e-12);

    auto free = compute_all({3, 2, 0}, {1.0}, two);
    EXPECT_NEAR(free.R_r, -std::log(free.E_r), 1e-12);
    EXPECT_NEAR(free.T_r, 1 - free.E_r, 1e-12);
}

TEST(Entropy, BBMBound) {
    for (auto [n, l] : {std::pair{1, 0}, {2, 1}, {3, 2}, {4, 0}})
        for (double rc : {0.1, 1.0, 10.0, std::numeric_limits<double>::infinity()}) {
            auto m = compute_all({n, l, 0}, {1.0, rc});
            EXPECT_GT(m.S_t, 6.43419) << n << l << ' ' << rc;
        }
}

TEST(Entropy, ChargeScalingRoundTrip) {
    for (auto qn : {QuantumNumbers{1, 0, 0}, QuantumNumbers{2, 1, 0}})
        for (double Z : {2.0, 5.0})
            for (double rc : {0.5, 2.0}) {
                auto direct = compute_all(qn, {Z, rc});
                auto scaled = scale_measures(compute_all(qn, {1.0, Z * rc}), Z);
                for (auto [a, b] : {std::pair{direct.R_r, scaled.R_r}, {direct.R_p, scaled.R_p},
                                    {direct.R_t, scaled.R_t}, {direct.S_r, scaled.S_r},
                                    {direct.S_p, scaled.S_p}, {direct.S_t, scaled.S_t},
                                    {direct.T_r, scaled.T_r}, {direct.T_p, scaled.T_p},
                                    {direct.T_t, scaled.T_t}, {direct.E_r, scaled.E_r},
                                    {direct.E_p, scaled.E_p}, {direct.E_t, scaled.E_t},
                                    {direct.diag.energy, scaled.diag.energy}})
                    EXPECT_LE(rel(a, b), 1e-8) << state_label(qn) << " Z=" << Z << " rc=" << rc;
                EXPECT_DOUBLE_EQ(scaled.rc, rc);
            }
}

TEST(Entropy, ScaledCompositesBitIdentical) {
    auto base = compute_all({2, 1, 0}, {1.0, 3.0});
    auto s = scale_measures(base, 5.0);
    EXPECT_EQ(s.S_t, base.S_t);
    EXPECT_EQ(s.R_t, base.R_t);
    EXPECT_EQ(s.E_t, base.E_t);
    // the Tsallis product is not charge invariant
    EXPECT_EQ(s.T_t, s.T_r * s.T_p);
    auto same = scale_measures(base, 1.0);
    EXPECT_EQ(same.T_t, base.T_t);
    EXPECT_EQ(same.R_r, base.R_r);
}

TEST(Entropy, MonotoneInRadius) {
    for (auto qn : {QuantumNumbers{2, 1, 0}, QuantumNumbers{3, 2, 0}}) {
        std::optional<InfoMeasures> prev;
        for (double rc : {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0}) {
            auto m = compute_all(qn, {1.0, rc});
            if (prev) {
                EXPECT_GT(m.R_r, prev->R_r);
                EXPECT_GT(m.S_r, prev->S_r);
                EXPECT_LT(m.R_p, prev->R_p);
                EXPECT_LT(m.S_p, prev->S_p);
                EXPECT_LT(m.E_r, prev->E_r);
                EXPECT_GT(m.E_p, prev->E_p);
            }
            prev = m;
        }
    }
}

TEST(Entropy, TsallisMomentumPlateau) {
    auto m = compute_all({2, 1, 0}, {1.0, 0.1});
    EXPECT_NEAR(m.T_p, 0.5, 1e-7);
    EXPECT_LT(m.T_p, 0.5);
}

TEST(Entropy, DivergentMomentumOrderRejected) {
    // alpha = 3/2 gives beta = 3/4, where the p^-4 tail makes the moment diverge
    EXPECT_THROW(compute_all({2, 1, 0}, {1.0, 1.0}, EntropicOrders(Rational{3, 2})), DomainError);
    EXPECT_NO_THROW(compute_all({2, 1, 0}, {1.0}, EntropicOrders(Rational{3, 2})));
}

TEST(Entropy, BatchIsOrderedAndDeterministic) {
    std::vector<WorkItem> items{{{2, 1, 0}, {1.0, 0.5}}, {{1, 0, 0}, {1.0, 2.0}}, {{3, 2, 0}, {1.0, 5.0}},
                                {{2, 2, 0}, {1.0, 1.0}}};
    auto serial = compute_batch(items, {}, {}, 1);
    auto pooled = compute_batch(items, {}, {}, 3);
    ASSERT_EQ(serial.size(), items.size());
    EXPECT_TRUE(serial[3].error.has_value());
    EXPECT_EQ(*serial[3].error, ErrorKind::validation);
    for (std::size_t i = 0; i < 3; ++i) {
        ASSERT_TRUE(serial[i].measures && pooled[i].measures);
        EXPECT_EQ(serial[i].measures->qn, items[i].qn);
        EXPECT_EQ(serial[i].measures->S_t, pooled[i].measures->S_t);
        EXPECT_EQ(serial[i].measures->R_p, pooled[i].measures->R_p);
    }
}
