#include <fptower/tower.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <chrono>

using namespace fptower;

namespace {
BigInt pow3(unsigned long e)
{
    BigInt r = 1;
    for (unsigned long i = 0; i < e; ++i)
        r *= 3;
    return r;
}
} // namespace

TEST_CASE("known levels", "[tower]")
{
    auto one = tower_row(1);
    CHECK(one.x_tilde == SurfaceInvariants{2, 2});
    CHECK(one.s == SurfaceInvariants{9, 1});
    CHECK(one.x_tilde.pg == 1);
    CHECK(one.s.q == 1);

    auto two = tower_row(2);
    CHECK(two.x_tilde == SurfaceInvariants{9, 3});
    CHECK(two.residual == 0);

    auto five = tower_row(5);
    CHECK(five.x_tilde == SurfaceInvariants{243, 29});
    CHECK(five.s == SurfaceInvariants{729, 81});

    // 3^10 / (3^8 + 2)
    CHECK(tower_row(10).ratio == Rational(59049, 6563));
    CHECK(abs(Rational(9) - tower_row(10).ratio) < Rational(1, 100));
    CHECK_THROWS(tower_row(0));
}

TEST_CASE("triple covers", "[tower]")
{
    CHECK(triple_cover_invariants(tower_row(1).x_tilde, first_step_branch()) == tower_row(2).x_tilde);
    auto x = tower_row(2).x_tilde;
    for (int n = 3; n <= 12; ++n) {
        x = triple_cover_invariants(x, next_level_branch());
        auto n_ul = static_cast<unsigned long>(n);
        CHECK(x == SurfaceInvariants{pow3(n_ul), pow3(n_ul - 2) + 2});
        CHECK(triple_cover_invariants(x, ball_quotient_branch()) == SurfaceInvariants{pow3(n_ul + 1), pow3(n_ul - 1)});
    }
}

TEST_CASE("diagnostics", "[tower]")
{
    auto ball = bmy_diagnostics({9, 1});
    CHECK(ball.residual_line == 0);
    CHECK(ball.c2 == 3);
    for (int n = 2; n <= 40; ++n) {
        auto d = bmy_diagnostics(tower_row(n).x_tilde);
        CHECK(d.c1sq_minus_3c2_plus_72 == 0);
        CHECK(d.shifted_residual == 0);
        CHECK(bmy_diagnostics(tower_row(n).s).residual_line == 0);
    }
    CHECK_THROWS(bmy_diagnostics({9, 0}));
}

TEST_CASE("forty levels in well under a second", "[tower]")
{
    auto t0 = std::chrono::steady_clock::now();
    auto check = verify_tower(40);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (auto & f : check.failures)
        UNSCOPED_INFO(f);
    CHECK(check.holds());
    CHECK(seconds < 1.0);

    Rational previous = 0;
    for (int n = 2; n <= 40; ++n) {
        auto r = tower_row(n).ratio;
        CHECK(r > previous);
        CHECK(r < 9);
        previous = r;
    }
}
