// Independent reference implementations used as test oracles. Nothing here
// calls into the library beyond its plain data types.
#ifndef FPTOWER_TESTS_ORACLES_HPP
#define FPTOWER_TESTS_ORACLES_HPP

#include <fptower/word.hpp>

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Perm = std::vector<int>;

inline Perm identity(std::size_t n)
{
    Perm p(n);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

// Apply p first, then q.
inline Perm compose(const Perm & p, const Perm & q)
{
    Perm r(p.size());
    for (std::size_t x = 0; x < p.size(); ++x)
        r[x] = q[static_cast<std::size_t>(p[x])];
    return r;
}

inline Perm inverse(const Perm & p)
{
    Perm r(p.size());
    for (std::size_t x = 0; x < p.size(); ++x)
        r[static_cast<std::size_t>(p[x])] = static_cast<int>(x);
    return r;
}

// 0-based cycles on n points.
inline Perm cycles(std::size_t n, std::initializer_list<std::initializer_list<int>> cs)
{
    Perm p = identity(n);
    for (auto & c : cs) {
        std::vector<int> v(c);
        for (std::size_t i = 0; i < v.size(); ++i)
            p[static_cast<std::size_t>(v[i])] = v[(i + 1) % v.size()];
    }
    return p;
}

inline Perm evaluate(const fptower::Word & w, const std::vector<Perm> & gens, std::size_t degree)
{
    Perm acc = identity(degree);
    for (auto l : w) {
        auto & g = gens[static_cast<std::size_t>(fptower::generator_of(l))];
        acc = compose(acc, fptower::is_inverse(l) ? inverse(g) : g);
    }
    return acc;
}

// Order of the group generated by gens, by closing the element set under
// right multiplication.
inline std::size_t closure_order(const std::vector<Perm> & gens, std::size_t degree)
{
    std::set<Perm> seen{identity(degree)};
    std::vector<Perm> frontier{identity(degree)};
    while (! frontier.empty()) {
        std::vector<Perm> next;
        for (auto & e : frontier)
            for (auto & g : gens) {
                Perm p = compose(e, g);
                if (seen.insert(p).second)
                    next.push_back(std::move(p));
            }
        frontier = std::move(next);
    }
    return seen.size();
}

// Letter-pair cancellation repeated until nothing changes.
inline std::vector<fptower::Letter> naive_reduce(std::vector<fptower::Letter> v)
{
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i + 1 < v.size(); ++i)
            if (v[i] == -v[i + 1]) {
                v.erase(v.begin() + static_cast<std::ptrdiff_t>(i), v.begin() + static_cast<std::ptrdiff_t>(i) + 2);
                changed = true;
                break;
            }
    }
    return v;
}

using Dense = std::vector<std::vector<mpz_class>>;

// Leibniz expansion; fine for the k <= 4 minors used here.
inline mpz_class leibniz_det(const Dense & m)
{
    std::size_t n = m.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    mpz_class total = 0;
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (perm[i] > perm[j])
                    ++inversions;
        mpz_class term = inversions % 2 ? -1 : 1;
        for (std::size_t i = 0; i < n; ++i)
            term *= m[i][perm[i]];
        total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

inline void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t> & cur,
    std::vector<std::vector<std::size_t>> & out)
{
    if (cur.size() == k) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = start; i < n; ++i) {
        cur.push_back(i);
        subsets(n, k, i + 1, cur, out);
        cur.pop_back();
    }
}

// Invariant factors from gcds of k x k minors: d_k = g_k / g_{k-1}.
inline std::vector<mpz_class> minors_invariant_factors(const Dense & m, std::size_t cols)
{
    std::size_t rows = m.size();
    std::vector<mpz_class> out;
    mpz_class previous = 1;
    for (std::size_t k = 1; k <= std::min(rows, cols); ++k) {
        std::vector<std::vector<std::size_t>> rs, cs;
        std::vector<std::size_t> cur;
        subsets(rows, k, 0, cur, rs);
        subsets(cols, k, 0, cur, cs);
        mpz_class g = 0;
        for (auto & r : rs)
            for (auto & c : cs) {
                Dense sub(k, std::vector<mpz_class>(k));
                for (std::size_t i = 0; i < k; ++i)
                    for (std::size_t j = 0; j < k; ++j)
                        sub[i][j] = m[r[i]][c[j]];
                mpz_class d = leibniz_det(sub);
                mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
            }
        if (g == 0)
            break;
        out.push_back(g / previous);
        previous = g;
    }
    return out;
}

// Right regular representation of the group generated by 3x3 matrices mod p.
using Mat3 = std::array<int, 9>;

inline Mat3 mat_mul(const Mat3 & a, const Mat3 & b, int p)
{
    Mat3 c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            long s = 0;
            for (int k = 0; k < 3; ++k)
                s += static_cast<long>(a[static_cast<std::size_t>(3 * i + k)]) * b[static_cast<std::size_t>(3 * k + j)];
            c[static_cast<std::size_t>(3 * i + j)] = static_cast<int>(((s % p) + p) % p);
        }
    return c;
}

inline std::vector<Perm> regular_matrix_model(const std::vector<Mat3> & gens, int p)
{
    Mat3 id{1, 0, 0, 0, 1, 0, 0, 0, 1};
    std::vector<Mat3> elements{id};
    std::map<Mat3, int> index{{id, 0}};
    for (std::size_t k = 0; k < elements.size(); ++k)
        for (auto & g : gens) {
            Mat3 e = mat_mul(elements[k], g, p);
            if (index.emplace(e, static_cast<int>(elements.size())).second)
                elements.push_back(e);
        }
    std::vector<Perm> out;
    for (auto & g : gens) {
        Perm perm(elements.size());
        for (std::size_t k = 0; k < elements.size(); ++k)
            perm[k] = index.at(mat_mul(elements[k], g, p));
        out.push_back(std::move(perm));
    }
    return out;
}

} // namespace oracle

#endif
