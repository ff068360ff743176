#ifndef FPTOWER_TOWER_HPP
#define FPTOWER_TOWER_HPP

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fptower {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Numerical invariants of a smooth surface. c2 is always derived via
/// Noether's formula, never stored.
struct SurfaceInvariants {
    BigInt K2;
    BigInt chi;
    std::optional<int> pg, q; ///< annotations only where known

    [[nodiscard]] BigInt c1sq() const { return K2; }
    [[nodiscard]] BigInt c2() const { return 12 * chi - K2; }

    friend bool operator==(const SurfaceInvariants & a, const SurfaceInvariants & b)
    {
        return a.K2 == b.K2 && a.chi == b.chi;
    }
};

/// A Z/3 cover branched at n triples of cusps and m triples of 1/3(1,1) points.
struct CoverBranchData {
    BigInt n = 0;
    BigInt m = 0;
};

inline SurfaceInvariants triple_cover_invariants(const SurfaceInvariants & base, const CoverBranchData & branch)
{
    if (branch.n < 0 || branch.m < 0)
        throw std::invalid_argument("triple_cover_invariants: negative branch data");
    return {3 * base.K2 + 3 * branch.m, 3 * base.chi - 2 * branch.n - branch.m, std::nullopt, std::nullopt};
}

struct BmyDiagnostics {
    BigInt residual_line;            ///< K2 - 9 chi (zero on the ball-quotient line)
    BigInt shifted_residual;         ///< 9 chi - 18 - K2 (zero on the parallel line)
    BigInt c2;
    BigInt c1sq_minus_3c2_plus_72;   ///< zero iff c1^2 = 3 c2 - 72
    Rational ratio;                  ///< K2 / chi
};

inline BmyDiagnostics bmy_diagnostics(const SurfaceInvariants & inv)
{
    if (inv.chi == 0)
        throw std::invalid_argument("bmy_diagnostics: chi = 0");
    BmyDiagnostics d;
    d.residual_line = inv.K2 - 9 * inv.chi;
    d.shifted_residual = 9 * inv.chi - 18 - inv.K2;
    d.c2 = inv.c2();
    d.c1sq_minus_3c2_plus_72 = inv.c1sq() - 3 * d.c2 + 72;
    d.ratio = Rational(inv.K2, inv.chi);
    d.ratio.canonicalize();
    return d;
}

namespace detail {
    inline BigInt pow3(unsigned long e)
    {
        BigInt r;
        mpz_ui_pow_ui(r.get_mpz_t(), 3, e);
        return r;
    }
} // namespace detail

struct TowerRow {
    int level = 0;
    SurfaceInvariants x_tilde; ///< smooth minimal resolution of X_n
    SurfaceInvariants s;       ///< the ball quotient S_n
    BigInt residual;           ///< 9 chi - 18 - K2 of x_tilde
    Rational ratio;            ///< K2 / chi of x_tilde
};

/// Closed-form invariants at a level. Level 1 uses the known base surfaces,
/// which the general formulas do not cover.
inline TowerRow tower_row(int level)
{
    if (level < 1)
        throw std::invalid_argument("tower_row: level must be >= 1");
    TowerRow row;
    row.level = level;
    if (level == 1) {
        row.x_tilde = {2, 2, 1, 0};
        row.s = {9, 1, 1, 1};
    }
    else {
        auto n = static_cast<unsigned long>(level);
        row.x_tilde = {detail::pow3(n), detail::pow3(n - 2) + 2, std::nullopt, std::nullopt};
        row.s = {detail::pow3(n + 1), detail::pow3(n - 1), std::nullopt, std::nullopt};
    }
    row.residual = 9 * row.x_tilde.chi - 18 - row.x_tilde.K2;
    row.ratio = Rational(row.x_tilde.K2, row.x_tilde.chi);
    row.ratio.canonicalize();
    return row;
}

/// Branch data of the covers used to climb the tower.
inline CoverBranchData first_step_branch() { return {1, 1}; }  // X~_1 -> X~_2
inline CoverBranchData next_level_branch() { return {2, 0}; }  // X~_n -> X~_{n+1}, n >= 2
inline CoverBranchData ball_quotient_branch() { return {3, 0}; } // X~_n -> S_n, n >= 2

struct TowerCheck {
    int levels = 0;
    std::vector<std::string> failures; ///< empty when every identity holds
    [[nodiscard]] bool holds() const { return failures.empty(); }
};

/// Checks levels 1..levels: the closed forms against the triple-cover
/// recurrences started at level 1, the residual lines, the c1^2 = 3 c2 - 72
/// identity, and monotone convergence of the ratio to 9 with
/// 0 < 9 - ratio < 18 / 3^(n-2), a bound that shrinks threefold per level.
inline TowerCheck verify_tower(int levels)
{
    TowerCheck out;
    out.levels = levels;
    auto fail = [&](int n, const std::string & what) { out.failures.push_back("level " + std::to_string(n) + ": " + what); };
    SurfaceInvariants x = tower_row(1).x_tilde;
    Rational previous_gap;
    for (int n = 1; n <= levels; ++n) {
        auto row = tower_row(n);
        if (n >= 2) {
            x = triple_cover_invariants(x, n == 2 ? first_step_branch() : next_level_branch());
            if (! (x == row.x_tilde))
                fail(n, "X~ recurrence disagrees with the closed form");
            if (! (triple_cover_invariants(row.x_tilde, ball_quotient_branch()) == row.s))
                fail(n, "S recurrence disagrees with the closed form");
            auto d = bmy_diagnostics(row.x_tilde);
            if (d.shifted_residual != 0)
                fail(n, "9 chi - 18 - K2 = " + d.shifted_residual.get_str());
            if (d.c1sq_minus_3c2_plus_72 != 0)
                fail(n, "c1^2 - 3 c2 + 72 = " + d.c1sq_minus_3c2_plus_72.get_str());
            Rational gap = Rational(9) - row.ratio;
            Rational eps(BigInt(18), detail::pow3(static_cast<unsigned long>(n - 2)));
            eps.canonicalize();
            if (gap <= 0 || gap >= eps)
                fail(n, "9 - ratio is not in (0, 18 / 3^(n-2))");
            if (n >= 3 && gap >= previous_gap)
                fail(n, "ratio is not increasing");
            previous_gap = gap;
        }
        if (bmy_diagnostics(row.s).residual_line != 0)
            fail(n, "S is off the line K2 = 9 chi");
    }
    return out;
}

} // namespace fptower

#endif // FPTOWER_TOWER_HPP
