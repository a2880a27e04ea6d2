#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pe/safeguard.hpp"

using namespace pe;

namespace {

SafeguardConfig reference_config() {
    SafeguardConfig cfg;  // defaults match the reference scenario
    return cfg;
}

PursuerState random_state(Rng& rng, double pos_range, double vel_range) {
    return PursuerState{{pos_range * rng.next_symmetric(), pos_range * rng.next_symmetric()},
                        {vel_range * rng.next_symmetric(), vel_range * rng.next_symmetric()}};
}

}  // namespace

TEST_CASE("position barrier values") {
    const SafeguardConfig cfg = reference_config();
    const PursuerState zp{{0.0, 0.0}, {0.0, 0.0}};
    CHECK(barrier_position(zp, {10.0, 10.0}, cfg) == doctest::Approx(17.5));

    const PursuerState on_boundary{{5.0, 0.0}, {0.0, 0.0}};
    CHECK(barrier_position(on_boundary, {0.0, 0.0}, cfg) == doctest::Approx(0.0));

    const PursuerState at_center{{3.0, 3.0}, {0.0, 0.0}};
    CHECK(barrier_position(at_center, {3.0, 3.0}, cfg) == doctest::Approx(-2.5));
}

TEST_CASE("velocity barrier values") {
    const SafeguardConfig cfg = reference_config();
    PursuerState zp{{0.0, 0.0}, {-20.0, 0.0}};
    CHECK(barrier_velocity(zp, cfg) == doctest::Approx(0.0));
    zp.v[0] = 0.0;
    CHECK(barrier_velocity(zp, cfg) == doctest::Approx(20.0));
    zp.v[0] = -25.0;
    CHECK(barrier_velocity(zp, cfg) == doctest::Approx(-5.0));
}

TEST_CASE("robust margin: pinned values") {
    SafeguardConfig cfg = reference_config();
    const PursuerState at_center{{3.0, 3.0}, {0.0, 0.0}};
    CHECK(robust_lower_derivative(at_center, {3.0, 3.0}, cfg) ==
          doctest::Approx(-cfg.k * cfg.eta * cfg.eta));

    // eta = 0, k = 1: margin equals -(1/4)|db/dxo|^2 = -k_p^2 |e|^2
    cfg.eta = 0.0;
    cfg.k = 1.0;
    const PursuerState zp{{1.0, 2.0}, {0.0, 0.0}};
    const Vec2 xo{4.0, 6.0};
    const Vec2 e = zp.x - xo;
    CHECK(robust_lower_derivative(zp, xo, cfg) ==
          doctest::Approx(-cfg.k_p * cfg.k_p * dot(e, e)));

    // large k with eta = 0 recovers the drift term of the barrier rate
    cfg.k = 1e12;
    const PursuerState moving{{1.0, 2.0}, {3.0, -1.0}};
    CHECK(robust_lower_derivative(moving, xo, cfg) ==
          doctest::Approx(2.0 * cfg.k_p * dot(moving.x - xo, moving.v)).epsilon(1e-9));
}

TEST_CASE("robust margin lower-bounds the true barrier rate") {
    // For any obstacle velocity with |w| <= eta the margin must sit below
    // L_f b + (db/dxo . w); Monte-Carlo over 10^4 random configurations.
    const SafeguardConfig cfg = reference_config();
    Rng rng(2024);
    for (int i = 0; i < 10000; ++i) {
        const PursuerState zp = random_state(rng, 30.0, 20.0);
        const Vec2 xo{30.0 * rng.next_symmetric(), 30.0 * rng.next_symmetric()};
        const double ang = 2.0 * 3.14159265358979323846 * rng.next_unit();
        const double speed = cfg.eta * rng.next_unit();
        const Vec2 w{speed * std::cos(ang), speed * std::sin(ang)};

        const Vec2 e = zp.x - xo;
        const double lf_b = 2.0 * cfg.k_p * dot(e, zp.v);
        const Vec2 db_dxo = -2.0 * cfg.k_p * e;
        const double true_rate = lf_b + dot(db_dxo, w);
        CHECK(robust_lower_derivative(zp, xo, cfg) <= true_rate + 1e-12);
    }
}

TEST_CASE("paper_sim_variant changes only the published coefficients") {
    SafeguardConfig cfg = reference_config();
    const PursuerState zp{{0.0, 0.0}, {2.0, 1.0}};
    const Vec2 xo{10.0, 10.0};
    const Vec2 e = zp.x - xo;

    const double general = robust_lower_derivative(zp, xo, cfg);
    CHECK(general == doctest::Approx(2.0 * cfg.k_p * dot(e, zp.v) -
                                     cfg.k_p * cfg.k_p / cfg.k * dot(e, e) -
                                     cfg.k * cfg.eta * cfg.eta));

    cfg.paper_sim_variant = true;
    const double published = robust_lower_derivative(zp, xo, cfg);
    CHECK(published == doctest::Approx(2.0 * cfg.k_p * dot(e, zp.v) -
                                       cfg.k_p / (4.0 * cfg.k) * dot(e, e) -
                                       cfg.k * cfg.k_p * cfg.eta * cfg.eta));
}

TEST_CASE("barrier chain") {
    SafeguardConfig cfg = reference_config();
    const PursuerState zp{{0.0, 0.0}, {1.0, -2.0}};
    const Vec2 xo{10.0, 10.0};
    const PhiChain chain = phi_chain(zp, xo, cfg);
    CHECK(chain.phi_x0 == doctest::Approx(barrier_position(zp, xo, cfg)));
    CHECK(chain.phi_x1 ==
          doctest::Approx(robust_lower_derivative(zp, xo, cfg) + 50.0 * chain.phi_x0));
    CHECK(chain.phi_x1 - robust_lower_derivative(zp, xo, cfg) == doctest::Approx(875.0));

    cfg.p1 = 1e-300;  // p1 -> 0 limit (config requires positive)
    CHECK(phi_chain(zp, xo, cfg).phi_x1 ==
          doctest::Approx(robust_lower_derivative(zp, xo, cfg)));
}

TEST_CASE("constraint rows: closed forms") {
    const PursuerState zp{{0.0, 0.0}, {0.0, 0.0}};
    Vec2 b1, b2;
    constraint_rows(zp, {10.0, 10.0}, b1, b2);
    CHECK(b1[0] == doctest::Approx(-20.0));
    CHECK(b1[1] == doctest::Approx(-20.0));
    CHECK(b2[0] == 1.0);
    CHECK(b2[1] == 0.0);

    constraint_rows(PursuerState{{3.0, 3.0}, {0.0, 0.0}}, {3.0, 3.0}, b1, b2);
    CHECK(norm(b1) == 0.0);

    // generic rows differ from the closed forms only by the barrier scale
    const SafeguardConfig cfg = reference_config();
    const PursuerState q{{1.0, 4.0}, {0.0, 0.0}};
    const Vec2 lie = lie_row_position(q, {10.0, 10.0}, cfg);
    constraint_rows(q, {10.0, 10.0}, b1, b2);
    CHECK(norm(lie - cfg.k_p * b1) < 1e-15);
    CHECK(norm(lie_row_velocity() - b2) == 0.0);
}

TEST_CASE("safeguard policy: interior behavior") {
    const SafeguardConfig cfg = reference_config();
    const PursuerState zp{{0.0, 0.0}, {0.0, 0.0}};
    const Vec2 xo{10.0, 10.0};
    const BarrierEval ev = safeguard_policy(zp, xo, cfg);
    CHECK_FALSE(ev.breach);
    CHECK(ev.zeta_x > 0.0);
    CHECK(ev.zeta_v > 0.0);

    // reference closed form: 2 Kx/phi^2 (x_p - x_o) + Kv/b_v^2 e_1
    const Vec2 expected = (2.0 * cfg.Kx / (ev.phi_x1 * ev.phi_x1)) * (zp.x - xo) +
                          (cfg.Kv / (ev.b_v * ev.b_v)) * Vec2{1.0, 0.0};
    CHECK(norm(ev.u_s - expected) < 1e-12 * norm(expected) + 1e-15);

    // energy form: B(phi) * phi == 1 up to rounding
    CHECK(std::abs((1.0 / ev.phi_x1) * ev.phi_x1 - 1.0) < 4e-16);
    CHECK(std::abs((1.0 / ev.b_v) * ev.b_v - 1.0) < 4e-16);
}

TEST_CASE("safeguard decays in the far field and obeys the pointwise bound") {
    const SafeguardConfig cfg = reference_config();
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const PursuerState zp = random_state(rng, 50.0, 25.0);
        const Vec2 xo{50.0 * rng.next_symmetric(), 50.0 * rng.next_symmetric()};
        const BarrierEval ev = safeguard_policy(zp, xo, cfg);
        if (ev.breach) continue;
        const double bound =
            cfg.Kx * norm(ev.beta1) / (ev.phi_x1 * ev.phi_x1) + cfg.Kv / (ev.b_v * ev.b_v);
        CHECK(norm(ev.u_s) <= bound + 1e-9 * bound + 1e-12);
    }

    // far field: with both margins huge the inverse-square gains vanish
    const PursuerState far{{1e4, 1e4}, {1e6, 0.0}};
    const BarrierEval ev = safeguard_policy(far, {0.0, 0.0}, cfg);
    CHECK_FALSE(ev.breach);
    CHECK(ev.phi_x1 > 1e6);
    CHECK(ev.b_v > 1e5);
    CHECK(norm(ev.u_s) < 1e-4);
}

TEST_CASE("safeguard flags breaches and stays finite") {
    const SafeguardConfig cfg = reference_config();
    const PursuerState inside{{1.0, 0.0}, {0.0, 0.0}};
    const BarrierEval ev = safeguard_policy(inside, {0.0, 0.0}, cfg);
    CHECK(ev.breach);
    CHECK(all_finite(ev.u_s));

    const PursuerState slow{{0.0, 0.0}, {-25.0, 0.0}};
    const BarrierEval ev2 = safeguard_policy(slow, {10.0, 10.0}, cfg);
    CHECK(ev2.b_v < 0.0);
    CHECK(ev2.breach);
    CHECK(all_finite(ev2.u_s));

    // degenerate row at the obstacle center: position term dropped
    const PursuerState center{{3.0, 3.0}, {0.0, 0.0}};
    const BarrierEval ev3 = safeguard_policy(center, {3.0, 3.0}, cfg);
    CHECK(all_finite(ev3.u_s));
    CHECK(ev3.u_s[1] == 0.0);
}

TEST_CASE("kkt oracle: slack cases and equivalence with brute enumeration") {
    const SafeguardConfig cfg = reference_config();
    Rng rng(99);
    int active_seen = 0;
    for (int i = 0; i < 10000; ++i) {
        const PursuerState zp = random_state(rng, 25.0, 25.0);
        const Vec2 xo{25.0 * rng.next_symmetric(), 25.0 * rng.next_symmetric()};
        KktOracleInput in;
        in.d = Vec2{8.0 * rng.next_symmetric(), 8.0 * rng.next_symmetric()};
        in.obstacle_velocity = Vec2{rng.next_symmetric(), rng.next_symmetric()};
        in.u_nominal = Vec2{40.0 * rng.next_symmetric(), 40.0 * rng.next_symmetric()};

        // interior states only: the constraint rows are then well scaled
        if (!(barrier_position(zp, xo, cfg) > 0.0 && barrier_velocity(zp, cfg) > 0.0 &&
              phi_chain(zp, xo, cfg).phi_x1 > 0.0))
            continue;

        const KktSolution sol = kkt_safeguard_oracle(zp, xo, in, cfg);
        if (sol.active == KktActiveSet::infeasible) continue;

        // rebuild the constraint data exactly as the oracle sees it
        const Vec2 ud = in.u_nominal + in.d;
        const Vec2 b1 = lie_row_position(zp, xo, cfg);
        const Vec2 b2 = lie_row_velocity();
        const double Lx = sol.slack_x - dot(b1, sol.u_s);
        const double Lv = sol.slack_v - dot(b2, sol.u_s);
        (void)ud;

        const auto brute = pe::testing::brute_qp(Lx, Lv, b1, b2);
        REQUIRE(brute.feasible);
        CHECK(norm(sol.u_s - brute.mu) < 1e-9 * (1.0 + norm(brute.mu)));

        // complementary slackness and primal feasibility
        CHECK(sol.slack_x >= -1e-9);
        CHECK(sol.slack_v >= -1e-9);
        CHECK(std::abs(sol.lambda_x * sol.slack_x) < 1e-7 * (1.0 + std::abs(Lx)));
        CHECK(std::abs(sol.lambda_v * sol.slack_v) < 1e-7 * (1.0 + std::abs(Lv)));
        if (sol.active != KktActiveSet::none) ++active_seen;
    }
    CHECK(active_seen > 20);  // the sweep must actually exercise active cases
}

TEST_CASE("kkt oracle: zero correction when constraints hold strictly") {
    const SafeguardConfig cfg = reference_config();
    const PursuerState zp{{0.0, 0.0}, {1.0, 0.0}};
    KktOracleInput in;
    in.d = Vec2{0.0, 0.0};
    in.obstacle_velocity = Vec2{0.0, 0.0};
    in.u_nominal = Vec2{0.0, 0.0};
    const KktSolution sol = kkt_safeguard_oracle(zp, {10.0, 10.0}, in, cfg);
    CHECK(sol.active == KktActiveSet::none);
    CHECK(norm(sol.u_s) == 0.0);
    CHECK(sol.lambda_x == 0.0);
    CHECK(sol.lambda_v == 0.0);
}

TEST_CASE("kkt oracle: antiparallel rows with conflicting demands are infeasible") {
    // Pursuer inside the exclusion ball left of center while the velocity
    // constraint is violated: the position row (-0.6, 0) wants mu_1 very
    // negative, the velocity row (1, 0) wants mu_1 positive. The Gram matrix
    // of the two rows is singular, so no correction satisfies both.
    const SafeguardConfig cfg = reference_config();
    const PursuerState zp{{-3.0, 0.0}, {-25.0, 0.0}};
    const Vec2 xo{0.0, 0.0};
    KktOracleInput in;
    in.d = Vec2{0.0, 0.0};
    in.obstacle_velocity = Vec2{0.0, 0.0};
    in.u_nominal = Vec2{0.0, 0.0};
    const Vec2 b1 = lie_row_position(zp, xo, cfg);
    CHECK(b1[1] == 0.0);  // antiparallel with the velocity row
    CHECK_FALSE(gram_condition(b1, lie_row_velocity()).is_pd);
    const KktSolution sol = kkt_safeguard_oracle(zp, xo, in, cfg);
    CHECK(sol.active == KktActiveSet::infeasible);
}

TEST_CASE("chain invariance under an exactly informed constrained controller") {
    // Keeping the input inside the admissible set (via the KKT correction
    // with true disturbance and obstacle velocity) must keep phi_x1, and
    // therefore b_x, nonnegative along the trajectory.
    SafeguardConfig cfg = reference_config();
    Rng rng(2718);
    for (int trial = 0; trial < 10; ++trial) {
        StateBundle b;
        b.zp = Vec4{-10.0 - 5.0 * rng.next_unit(), -10.0 - 5.0 * rng.next_unit(),
                    5.0 * rng.next_symmetric(), 5.0 * rng.next_symmetric()};
        b.xo = Vec2{10.0, 10.0};
        const Vec2 dest{40.0, 40.0};
        const double k_o = 0.05;
        DisturbanceSpec dist;
        Rng drng(100 + trial);
        double min_phi = 1e300, min_bx = 1e300;
        bool started_inside = true;
        {
            const PursuerState p0 = unpack_pursuer(b.zp);
            started_inside = barrier_position(p0, b.xo, cfg) > 0.0 &&
                             phi_chain(p0, b.xo, cfg).phi_x1 > 0.0 &&
                             barrier_velocity(p0, cfg) > 0.0;
        }
        if (!started_inside) continue;
        for (int j = 0; j < 8000; ++j) {
            const PursuerState p = unpack_pursuer(b.zp);
            const Vec2 d = disturbance_sample(j * 1e-3, dist, drng);
            KktOracleInput in;
            in.d = d;
            in.obstacle_velocity = -k_o * (b.xo - dest);
            in.u_nominal = Vec2{10.0 * std::sin(0.37 * j * 1e-3 + trial),
                                10.0 * std::cos(0.53 * j * 1e-3)};
            const KktSolution sol = kkt_safeguard_oracle(p, b.xo, in, cfg);
            REQUIRE(sol.active != KktActiveSet::infeasible);
            StepInputs si{in.u_nominal + sol.u_s, in.u_nominal + sol.u_s, Vec2{0, 0}, d};
            REQUIRE(integrate_step(b, si, 1e-3, k_o, dest, true));
            const PursuerState pn = unpack_pursuer(b.zp);
            min_phi = std::min(min_phi, phi_chain(pn, b.xo, cfg).phi_x1);
            min_bx = std::min(min_bx, barrier_position(pn, b.xo, cfg));
        }
        // zero-order-hold enforcement leaves O(dt^2) excursions when riding
        // the constraint boundary; the position barrier itself stays clear
        CHECK(min_phi > -1e-3);
        CHECK(min_bx > 0.0);
    }
}

TEST_CASE("safeguard repulsion keeps the chain interior on random interior starts") {
    SafeguardConfig cfg = reference_config();
    Rng rng(11235);
    int tested = 0;
    for (int trial = 0; trial < 12; ++trial) {
        PursuerState p0{{rng.next_in(-20.0, 25.0), rng.next_in(-20.0, 25.0)},
                        {rng.next_in(-5.0, 10.0), rng.next_in(-5.0, 10.0)}};
        const Vec2 xo0{10.0, 10.0};
        if (!(barrier_position(p0, xo0, cfg) > 1.0 && phi_chain(p0, xo0, cfg).phi_x1 > 1.0 &&
              barrier_velocity(p0, cfg) > 1.0))
            continue;
        ++tested;
        StateBundle b;
        b.zp = pack(p0);
        b.xo = xo0;
        DisturbanceSpec dist;
        Rng drng(500 + trial);
        double min_phi = 1e300, min_bv = 1e300;
        for (int j = 0; j < 5000; ++j) {
            const PursuerState p = unpack_pursuer(b.zp);
            const BarrierEval ev = safeguard_policy(p, b.xo, cfg);
            const double ang = 2.0 * 3.14159265358979323846 * drng.next_unit();
            const double mag = 10.0 * std::sqrt(drng.next_unit());
            const Vec2 u_n{mag * std::cos(ang), mag * std::sin(ang)};
            const Vec2 d = disturbance_sample(j * 1e-3, dist, drng);
            StepInputs si{ev.u_s + u_n, ev.u_s + u_n, Vec2{0, 0}, d};
            REQUIRE(integrate_step(b, si, 1e-3, 0.05, Vec2{40.0, 40.0}, true));
            const PursuerState pn = unpack_pursuer(b.zp);
            min_phi = std::min(min_phi, phi_chain(pn, b.xo, cfg).phi_x1);
            min_bv = std::min(min_bv, barrier_velocity(pn, cfg));
        }
        CHECK(min_phi > 0.0);
        CHECK(min_bv > 0.0);
    }
    CHECK(tested >= 5);
}

TEST_CASE("gram condition") {
    GramCondition g = gram_condition(Vec2{-20.0, -20.0}, Vec2{1.0, 0.0});
    CHECK(g.is_pd);
    CHECK(g.sin2_term == doctest::Approx(400.0));

    g = gram_condition(Vec2{3.0, 0.0}, Vec2{1.0, 0.0});
    CHECK_FALSE(g.is_pd);
    CHECK(g.sin2_term == doctest::Approx(0.0));
    CHECK(g.min_eig <= 1e-12);

    // PD flag matches positive norms + nonzero angle on random pairs
    Rng rng(5);
    for (int i = 0; i < 100000; ++i) {
        Vec2 b1{rng.next_symmetric(), rng.next_symmetric()};
        Vec2 b2{rng.next_symmetric(), rng.next_symmetric()};
        const bool parallel = (i % 7 == 0);
        if (parallel) b2 = rng.next_symmetric() * b1;
        const GramCondition c = gram_condition(b1, b2);
        const double n1 = dot(b1, b1), n2 = dot(b2, b2);
        if (parallel) {
            CHECK_FALSE(c.is_pd);
            CHECK(c.min_eig <= 1e-12);
        } else {
            const bool expected = n1 > 0.0 && n2 > 0.0 && c.sin2_term > 1e-12 * n1 * n2;
            CHECK(c.is_pd == expected);
        }
        const double det = n1 * n2 - dot(b1, b2) * dot(b1, b2);
        CHECK(c.sin2_term == doctest::Approx(det).epsilon(1e-12));
    }
}
