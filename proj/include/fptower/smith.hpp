#ifndef FPTOWER_SMITH_HPP
#define FPTOWER_SMITH_HPP

#include <fptower/int_matrix.hpp>

#include <algorithm>
#include <functional>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace fptower {

/// D = U * A * V with unimodular U, V and d1 | d2 | ... | d_rank, all positive.
struct SNFResult {
    IntMatrix D;
    std::optional<IntMatrix> U, V; ///< present only when transforms were requested
    int rank = 0;
    std::vector<BigInt> diagonal; ///< the nonzero diagonal entries, in order
};

namespace detail {

    inline BigInt rounded_quotient(const BigInt & a, const BigInt & b)
    {
        BigInt q = a / b; // truncating
        BigInt r = a - q * b;
        BigInt r2 = 2 * abs(r);
        if (r2 > abs(b))
            q += (sgn(r) == sgn(b)) ? 1 : -1;
        return q;
    }

    // Dense Smith form, optionally accumulating the transforms.
    class DenseSmith {
    public:
        DenseSmith(std::vector<std::vector<BigInt>> a, int cols, bool transforms) :
            a_(std::move(a)), m_(static_cast<int>(a_.size())), n_(cols)
        {
            if (transforms) {
                u_ = IntMatrix::identity(m_).dense();
                v_ = IntMatrix::identity(n_).dense();
            }
        }

        void run()
        {
            int t = 0;
            for (; t < std::min(m_, n_); ++t) {
                auto [pi, pj] = min_entry(t, t);
                if (pi < 0)
                    break;
                swap_rows(t, pi);
                swap_cols(t, pj);
                for (;;) {
                    bool residue = false;
                    for (int i = t + 1; i < m_; ++i)
                        if (cell(i, t) != 0) {
                            add_row(i, t, -rounded_quotient(cell(i, t), cell(t, t)));
                            residue = residue || cell(i, t) != 0;
                        }
                    for (int j = t + 1; j < n_; ++j)
                        if (cell(t, j) != 0) {
                            add_col(j, t, -rounded_quotient(cell(t, j), cell(t, t)));
                            residue = residue || cell(t, j) != 0;
                        }
                    if (residue) {
                        move_smallest_in_cross(t);
                        continue;
                    }
                    int bad = -1;
                    for (int i = t + 1; i < m_ && bad < 0; ++i)
                        for (int j = t + 1; j < n_; ++j)
                            if (cell(i, j) != 0 && ! mpz_divisible_p(cell(i, j).get_mpz_t(), cell(t, t).get_mpz_t())) {
                                bad = i;
                                break;
                            }
                    if (bad < 0)
                        break;
                    add_row(t, bad, 1);
                }
                if (cell(t, t) < 0)
                    negate_row(t);
            }
            rank_ = t;
        }

        [[nodiscard]] int rank() const noexcept { return rank_; }
        [[nodiscard]] const BigInt & at(int i, int j) const { return a_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
        std::vector<std::vector<BigInt>> & matrix() { return a_; }
        std::vector<std::vector<BigInt>> & u() { return u_; }
        std::vector<std::vector<BigInt>> & v() { return v_; }

    private:
        BigInt & cell(int i, int j) { return a_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }

        std::pair<int, int> min_entry(int r0, int c0) const
        {
            int bi = -1, bj = -1;
            BigInt best;
            for (int i = r0; i < m_; ++i)
                for (int j = c0; j < n_; ++j) {
                    const BigInt & x = at(i, j);
                    if (x != 0 && (bi < 0 || abs(x) < best)) {
                        best = abs(x);
                        bi = i;
                        bj = j;
                        if (best == 1)
                            return {bi, bj};
                    }
                }
            return {bi, bj};
        }

        void move_smallest_in_cross(int t)
        {
            int bi = t, bj = t;
            BigInt best = abs(cell(t, t));
            for (int i = t + 1; i < m_; ++i)
                if (cell(i, t) != 0 && abs(cell(i, t)) < best) {
                    best = abs(cell(i, t));
                    bi = i;
                    bj = t;
                }
            for (int j = t + 1; j < n_; ++j)
                if (cell(t, j) != 0 && abs(cell(t, j)) < best) {
                    best = abs(cell(t, j));
                    bi = t;
                    bj = j;
                }
            swap_rows(t, bi);
            swap_cols(t, bj);
        }

        void swap_rows(int i, int j)
        {
            if (i == j)
                return;
            std::swap(a_[static_cast<std::size_t>(i)], a_[static_cast<std::size_t>(j)]);
            if (! u_.empty())
                std::swap(u_[static_cast<std::size_t>(i)], u_[static_cast<std::size_t>(j)]);
        }

        void swap_cols(int i, int j)
        {
            if (i == j)
                return;
            for (auto & r : a_)
                std::swap(r[static_cast<std::size_t>(i)], r[static_cast<std::size_t>(j)]);
            for (auto & r : v_)
                std::swap(r[static_cast<std::size_t>(i)], r[static_cast<std::size_t>(j)]);
        }

        static void axpy(std::vector<BigInt> & dst, const std::vector<BigInt> & src, const BigInt & q)
        {
            for (std::size_t k = 0; k < dst.size(); ++k)
                if (src[k] != 0)
                    dst[k] += q * src[k];
        }

        // row i += q * row j
        void add_row(int i, int j, const BigInt & q)
        {
            axpy(a_[static_cast<std::size_t>(i)], a_[static_cast<std::size_t>(j)], q);
            if (! u_.empty())
                axpy(u_[static_cast<std::size_t>(i)], u_[static_cast<std::size_t>(j)], q);
        }

        // col i += q * col j
        void add_col(int i, int j, const BigInt & q)
        {
            for (auto & r : a_)
                if (r[static_cast<std::size_t>(j)] != 0)
                    r[static_cast<std::size_t>(i)] += q * r[static_cast<std::size_t>(j)];
            for (auto & r : v_)
                if (r[static_cast<std::size_t>(j)] != 0)
                    r[static_cast<std::size_t>(i)] += q * r[static_cast<std::size_t>(j)];
        }

        void negate_row(int i)
        {
            for (auto & x : a_[static_cast<std::size_t>(i)])
                x = -x;
            if (! u_.empty())
                for (auto & x : u_[static_cast<std::size_t>(i)])
                    x = -x;
        }

        std::vector<std::vector<BigInt>> a_, u_, v_;
        int m_, n_;
        int rank_ = 0;
    };

    // Sparse elimination on unit pivots. Pivots on the shortest row holding a
    // +-1 entry, choosing its least-populated column. What is left has no
    // unit entries and is handed to the dense routine.
    class SparseUnitEliminator {
    public:
        explicit SparseUnitEliminator(const IntMatrix & a) :
            rows_(static_cast<std::size_t>(a.rows())), col_rows_(static_cast<std::size_t>(a.cols())),
            row_alive_(static_cast<std::size_t>(a.rows()), true), col_alive_(static_cast<std::size_t>(a.cols()), true),
            cols_(a.cols())
        {
            for (int i = 0; i < a.rows(); ++i) {
                rows_[static_cast<std::size_t>(i)] = a.row(i);
                for (auto & e : a.row(i))
                    col_rows_[static_cast<std::size_t>(e.first)].push_back(i);
                enqueue(i);
            }
        }

        void run()
        {
            while (! queue_.empty()) {
                auto [len, r] = queue_.top();
                queue_.pop();
                auto ur = static_cast<std::size_t>(r);
                if (! row_alive_[ur] || rows_[ur].size() != len)
                    continue;
                int best_col = -1;
                std::size_t best_count = 0;
                BigInt pivot;
                for (auto & [c, v] : rows_[ur])
                    if (v == 1 || v == -1) {
                        std::size_t count = col_rows_[static_cast<std::size_t>(c)].size();
                        if (best_col < 0 || count < best_count) {
                            best_col = c;
                            best_count = count;
                            pivot = v;
                        }
                    }
                if (best_col < 0)
                    continue;
                eliminate(r, best_col, pivot);
            }
        }

        [[nodiscard]] int unit_pivots() const noexcept { return pivots_; }

        /// Remaining nonzero rows restricted to live columns, and the live column count.
        [[nodiscard]] std::pair<std::vector<IntMatrix::Row>, std::vector<int>> remainder() const
        {
            std::vector<int> live_cols;
            std::vector<int> remap(static_cast<std::size_t>(cols_), -1);
            for (int c = 0; c < cols_; ++c)
                if (col_alive_[static_cast<std::size_t>(c)]) {
                    remap[static_cast<std::size_t>(c)] = static_cast<int>(live_cols.size());
                    live_cols.push_back(c);
                }
            std::vector<IntMatrix::Row> out;
            for (std::size_t i = 0; i < rows_.size(); ++i) {
                if (! row_alive_[i] || rows_[i].empty())
                    continue;
                IntMatrix::Row r;
                for (auto & [c, v] : rows_[i])
                    r.emplace_back(remap[static_cast<std::size_t>(c)], v);
                out.push_back(std::move(r));
            }
            return {std::move(out), std::move(live_cols)};
        }

    private:
        void enqueue(int i)
        {
            auto & r = rows_[static_cast<std::size_t>(i)];
            for (auto & e : r)
                if (e.second == 1 || e.second == -1) {
                    queue_.emplace(r.size(), i);
                    return;
                }
        }

        static const BigInt * find(const IntMatrix::Row & r, int c)
        {
            auto it = std::lower_bound(r.begin(), r.end(), c, [](const IntMatrix::Entry & e, int k) { return e.first < k; });
            return it != r.end() && it->first == c ? &it->second : nullptr;
        }

        void eliminate(int r, int c, const BigInt & pivot)
        {
            const IntMatrix::Row pivot_row = rows_[static_cast<std::size_t>(r)];
            auto & users = col_rows_[static_cast<std::size_t>(c)];
            std::sort(users.begin(), users.end());
            users.erase(std::unique(users.begin(), users.end()), users.end());
            for (int s : users) {
                auto us = static_cast<std::size_t>(s);
                if (s == r || ! row_alive_[us])
                    continue;
                const BigInt * coef = find(rows_[us], c);
                if (! coef)
                    continue;
                BigInt q = -(*coef) * pivot; // pivot is its own inverse
                combine(s, pivot_row, q);
                if (rows_[us].empty())
                    row_alive_[us] = false;
                else
                    enqueue(s);
            }
            row_alive_[static_cast<std::size_t>(r)] = false;
            col_alive_[static_cast<std::size_t>(c)] = false;
            users.clear();
            ++pivots_;
        }

        // row s += q * pivot_row
        void combine(int s, const IntMatrix::Row & p, const BigInt & q)
        {
            auto & row = rows_[static_cast<std::size_t>(s)];
            IntMatrix::Row out;
            out.reserve(row.size() + p.size());
            std::size_t i = 0, j = 0;
            while (i < row.size() || j < p.size()) {
                if (j == p.size() || (i < row.size() && row[i].first < p[j].first))
                    out.push_back(std::move(row[i++]));
                else if (i == row.size() || p[j].first < row[i].first) {
                    out.emplace_back(p[j].first, q * p[j].second);
                    col_rows_[static_cast<std::size_t>(p[j].first)].push_back(s);
                    ++j;
                }
                else {
                    BigInt v = row[i].second + q * p[j].second;
                    if (v != 0)
                        out.emplace_back(row[i].first, std::move(v));
                    ++i;
                    ++j;
                }
            }
            row = std::move(out);
        }

        std::vector<IntMatrix::Row> rows_;
        std::vector<std::vector<int>> col_rows_;
        std::vector<bool> row_alive_, col_alive_;
        int cols_;
        int pivots_ = 0;
        std::priority_queue<std::pair<std::size_t, int>, std::vector<std::pair<std::size_t, int>>, std::greater<>> queue_;
    };

    /// Restores d1 | d2 | ... on a list of positive diagonal entries.
    inline void repair_divisibility(std::vector<BigInt> & d)
    {
        for (std::size_t i = 0; i < d.size(); ++i)
            for (std::size_t j = i + 1; j < d.size(); ++j) {
                if (mpz_divisible_p(d[j].get_mpz_t(), d[i].get_mpz_t()))
                    continue;
                BigInt g = gcd(d[i], d[j]);
                BigInt l = lcm(d[i], d[j]);
                d[i] = g;
                d[j] = l;
            }
    }

} // namespace detail

/// Smith normal form. With `transforms` the dense algorithm runs and U, V are
/// returned; without, unit pivots are first eliminated sparsely and only D is
/// produced (suitable for large relation matrices).
inline SNFResult smith_normal_form(const IntMatrix & a, bool transforms = true)
{
    SNFResult res;
    res.D = IntMatrix(a.rows(), a.cols());
    if (transforms) {
        detail::DenseSmith s(a.dense(), a.cols(), true);
        s.run();
        res.rank = s.rank();
        res.D = IntMatrix::from_dense(s.matrix(), a.cols());
        res.U = IntMatrix::from_dense(s.u(), a.rows());
        res.V = IntMatrix::from_dense(s.v(), a.cols());
        for (int i = 0; i < res.rank; ++i)
            res.diagonal.push_back(s.at(i, i));
        return res;
    }
    detail::SparseUnitEliminator e(a);
    e.run();
    auto [rest, live_cols] = e.remainder();
    std::vector<std::vector<BigInt>> dense(rest.size(), std::vector<BigInt>(live_cols.size()));
    for (std::size_t i = 0; i < rest.size(); ++i)
        for (auto & [c, v] : rest[i])
            dense[i][static_cast<std::size_t>(c)] = v;
    detail::DenseSmith s(std::move(dense), static_cast<int>(live_cols.size()), false);
    s.run();
    res.diagonal.assign(static_cast<std::size_t>(e.unit_pivots()), BigInt(1));
    for (int i = 0; i < s.rank(); ++i)
        res.diagonal.push_back(s.at(i, i));
    detail::repair_divisibility(res.diagonal);
    res.rank = static_cast<int>(res.diagonal.size());
    for (int i = 0; i < res.rank; ++i)
        res.D.set(i, i, res.diagonal[static_cast<std::size_t>(i)]);
    return res;
}

inline bool is_prime(long p)
{
    if (p < 2)
        return false;
    for (long d = 2; d * d <= p; ++d)
        if (p % d == 0)
            return false;
    return true;
}

namespace detail {
    inline long mod(const BigInt & v, long p)
    {
        return static_cast<long>(mpz_fdiv_ui(v.get_mpz_t(), static_cast<unsigned long>(p)));
    }

    inline long inverse_mod(long a, long p)
    {
        long r = 1, base = a % p, e = p - 2;
        while (e > 0) {
            if (e & 1)
                r = r * base % p;
            base = base * base % p;
            e >>= 1;
        }
        return r;
    }

    // Row echelon form mod p in place; returns pivot columns.
    inline std::vector<int> echelon_mod_p(std::vector<std::vector<long>> & m, int cols, long p)
    {
        std::vector<int> pivots;
        std::size_t row = 0;
        for (int c = 0; c < cols && row < m.size(); ++c) {
            auto uc = static_cast<std::size_t>(c);
            std::size_t sel = row;
            while (sel < m.size() && m[sel][uc] == 0)
                ++sel;
            if (sel == m.size())
                continue;
            std::swap(m[row], m[sel]);
            long inv = inverse_mod(m[row][uc], p);
            for (auto & x : m[row])
                x = x * inv % p;
            for (std::size_t i = 0; i < m.size(); ++i)
                if (i != row && m[i][uc] != 0) {
                    long f = m[i][uc];
                    for (std::size_t k = 0; k < m[i].size(); ++k)
                        m[i][k] = ((m[i][k] - f * m[row][k]) % p + p) % p;
                }
            pivots.push_back(c);
            ++row;
        }
        return pivots;
    }
} // namespace detail

/// Rank over the field with p elements. Throws if p is not prime.
inline int mod_p_rank(const IntMatrix & a, long p)
{
    if (! is_prime(p))
        throw std::invalid_argument("mod_p_rank: " + std::to_string(p) + " is not prime");
    // Sparse row reduction: keep one reduced row per leading column.
    std::vector<std::vector<std::pair<int, long>>> basis(static_cast<std::size_t>(a.cols()));
    int rank = 0;
    for (int i = 0; i < a.rows(); ++i) {
        std::vector<std::pair<int, long>> row;
        for (auto & [c, v] : a.row(i))
            if (long r = detail::mod(v, p); r != 0)
                row.emplace_back(c, r);
        while (! row.empty()) {
            int lead = row.front().first;
            auto & b = basis[static_cast<std::size_t>(lead)];
            if (b.empty()) {
                long inv = detail::inverse_mod(row.front().second, p);
                for (auto & e : row)
                    e.second = e.second * inv % p;
                b = std::move(row);
                ++rank;
                break;
            }
            long f = row.front().second;
            std::vector<std::pair<int, long>> out;
            std::size_t x = 0, y = 0;
            while (x < row.size() || y < b.size()) {
                if (y == b.size() || (x < row.size() && row[x].first < b[y].first))
                    out.push_back(row[x++]);
                else if (x == row.size() || b[y].first < row[x].first) {
                    out.emplace_back(b[y].first, ((p - f) * b[y].second) % p);
                    ++y;
                }
                else {
                    long v = ((row[x].second - f * b[y].second) % p + p) % p;
                    if (v)
                        out.emplace_back(row[x].first, v);
                    ++x;
                    ++y;
                }
            }
            row = std::move(out);
        }
    }
    return rank;
}

/// Basis of {v : A v = 0 (mod p)}, each vector normalized so its first nonzero entry is 1.
inline std::vector<std::vector<long>> nullspace_mod_p(const IntMatrix & a, long p)
{
    if (! is_prime(p))
        throw std::invalid_argument("nullspace_mod_p: " + std::to_string(p) + " is not prime");
    int n = a.cols();
    std::vector<std::vector<long>> m(static_cast<std::size_t>(a.rows()), std::vector<long>(static_cast<std::size_t>(n)));
    for (int i = 0; i < a.rows(); ++i)
        for (auto & [c, v] : a.row(i))
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] = detail::mod(v, p);
    auto pivots = detail::echelon_mod_p(m, n, p);
    std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
    for (int c : pivots)
        is_pivot[static_cast<std::size_t>(c)] = true;
    std::vector<std::vector<long>> basis;
    for (int f = 0; f < n; ++f) {
        if (is_pivot[static_cast<std::size_t>(f)])
            continue;
        std::vector<long> v(static_cast<std::size_t>(n), 0);
        v[static_cast<std::size_t>(f)] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r)
            v[static_cast<std::size_t>(pivots[r])] = (p - m[r][static_cast<std::size_t>(f)]) % p;
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Abelian invariants: torsion d1 | d2 | ... (entries > 1) and free rank.
struct AbelianInvariants {
    std::vector<BigInt> torsion;
    int free_rank = 0;

    /// Bracket notation: torsion entries then one 0 per free factor, e.g. [3,21,0,0].
    [[nodiscard]] std::string to_string() const
    {
        std::string s = "[";
        bool first = true;
        for (auto & t : torsion) {
            s += (first ? "" : ",") + t.get_str();
            first = false;
        }
        for (int i = 0; i < free_rank; ++i) {
            s += first ? "0" : ",0";
            first = false;
        }
        return s + "]";
    }

    static AbelianInvariants from_string(const std::string & text)
    {
        AbelianInvariants a;
        std::string body = text;
        std::erase_if(body, [](char c) { return c == '[' || c == ']' || c == ' '; });
        std::size_t pos = 0;
        while (pos < body.size()) {
            std::size_t comma = body.find(',', pos);
            if (comma == std::string::npos)
                comma = body.size();
            BigInt v(body.substr(pos, comma - pos));
            if (v == 0)
                ++a.free_rank;
            else if (v != 1)
                a.torsion.push_back(v);
            pos = comma + 1;
        }
        return a;
    }

    /// Number of cyclic factors of order divisible by p (the p-rank).
    [[nodiscard]] int p_rank(long p) const
    {
        int r = free_rank;
        for (auto & t : torsion)
            if (mpz_divisible_ui_p(t.get_mpz_t(), static_cast<unsigned long>(p)))
                ++r;
        return r;
    }

    friend bool operator==(const AbelianInvariants &, const AbelianInvariants &) = default;

    /// Listing order: larger free rank first, then larger torsion product, then lexicographic.
    friend bool listing_before(const AbelianInvariants & a, const AbelianInvariants & b)
    {
        if (a.free_rank != b.free_rank)
            return a.free_rank > b.free_rank;
        BigInt pa = 1, pb = 1;
        for (auto & t : a.torsion)
            pa *= t;
        for (auto & t : b.torsion)
            pb *= t;
        if (pa != pb)
            return pa > pb;
        return a.torsion < b.torsion;
    }
};

inline AbelianInvariants invariants_from_diagonal(const std::vector<BigInt> & diagonal, int generators)
{
    AbelianInvariants inv;
    for (auto & d : diagonal)
        if (d > 1)
            inv.torsion.push_back(d);
    inv.free_rank = generators - static_cast<int>(diagonal.size());
    return inv;
}

inline AbelianInvariants abelian_invariants(const Presentation & pres)
{
    auto snf = smith_normal_form(exponent_matrix(pres), false);
    return invariants_from_diagonal(snf.diagonal, pres.generator_count());
}

} // namespace fptower

#endif // FPTOWER_SMITH_HPP
