#ifndef FPTOWER_INT_MATRIX_HPP
#define FPTOWER_INT_MATRIX_HPP

#include <fptower/presentation.hpp>

#include <gmpxx.h>

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fptower {

using BigInt = mpz_class;

/// Exact integer matrix with sparse rows (column indices strictly increasing,
/// no stored zeros). Dimensions are fixed at construction.
class IntMatrix {
public:
    using Entry = std::pair<int, BigInt>;
    using Row = std::vector<Entry>;

    IntMatrix() = default;
    IntMatrix(int rows, int cols) : cols_(cols), rows_(static_cast<std::size_t>(rows))
    {
        if (rows < 0 || cols < 0)
            throw std::invalid_argument("IntMatrix: negative dimension");
    }

    static IntMatrix identity(int n)
    {
        IntMatrix m(n, n);
        for (int i = 0; i < n; ++i)
            m.rows_[static_cast<std::size_t>(i)].emplace_back(i, 1);
        return m;
    }

    static IntMatrix from_dense(const std::vector<std::vector<long>> & d, int cols = -1)
    {
        int c = cols >= 0 ? cols : (d.empty() ? 0 : static_cast<int>(d.front().size()));
        IntMatrix m(static_cast<int>(d.size()), c);
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (static_cast<int>(d[i].size()) != c)
                throw std::invalid_argument("IntMatrix: ragged rows");
            for (int j = 0; j < c; ++j)
                if (d[i][static_cast<std::size_t>(j)] != 0)
                    m.rows_[i].emplace_back(j, d[i][static_cast<std::size_t>(j)]);
        }
        return m;
    }

    static IntMatrix from_dense(const std::vector<std::vector<BigInt>> & d, int cols)
    {
        IntMatrix m(static_cast<int>(d.size()), cols);
        for (std::size_t i = 0; i < d.size(); ++i)
            for (int j = 0; j < cols; ++j)
                if (d[i][static_cast<std::size_t>(j)] != 0)
                    m.rows_[i].emplace_back(j, d[i][static_cast<std::size_t>(j)]);
        return m;
    }

    [[nodiscard]] int rows() const noexcept { return static_cast<int>(rows_.size()); }
    [[nodiscard]] int cols() const noexcept { return cols_; }
    [[nodiscard]] const Row & row(int i) const { return rows_.at(static_cast<std::size_t>(i)); }

    /// Replaces row i; entries need not be sorted and may contain zeros or repeats.
    void set_row(int i, Row entries)
    {
        std::sort(entries.begin(), entries.end(), [](const Entry & a, const Entry & b) { return a.first < b.first; });
        Row merged;
        for (auto & [c, v] : entries) {
            if (c < 0 || c >= cols_)
                throw std::out_of_range("IntMatrix: column out of range");
            if (! merged.empty() && merged.back().first == c)
                merged.back().second += v;
            else
                merged.emplace_back(c, v);
        }
        std::erase_if(merged, [](const Entry & e) { return e.second == 0; });
        rows_.at(static_cast<std::size_t>(i)) = std::move(merged);
    }

    [[nodiscard]] BigInt get(int i, int j) const
    {
        auto & r = row(i);
        auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry & e, int c) { return e.first < c; });
        return it != r.end() && it->first == j ? it->second : BigInt(0);
    }

    void set(int i, int j, const BigInt & v)
    {
        if (j < 0 || j >= cols_)
            throw std::out_of_range("IntMatrix: column out of range");
        auto & r = rows_.at(static_cast<std::size_t>(i));
        auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry & e, int c) { return e.first < c; });
        if (it != r.end() && it->first == j) {
            if (v == 0)
                r.erase(it);
            else
                it->second = v;
        }
        else if (v != 0)
            r.insert(it, Entry{j, v});
    }

    [[nodiscard]] std::size_t nonzeros() const noexcept
    {
        std::size_t n = 0;
        for (auto & r : rows_)
            n += r.size();
        return n;
    }

    [[nodiscard]] std::vector<std::vector<BigInt>> dense() const
    {
        std::vector<std::vector<BigInt>> d(rows_.size(), std::vector<BigInt>(static_cast<std::size_t>(cols_)));
        for (std::size_t i = 0; i < rows_.size(); ++i)
            for (auto & [c, v] : rows_[i])
                d[i][static_cast<std::size_t>(c)] = v;
        return d;
    }

    friend IntMatrix operator*(const IntMatrix & a, const IntMatrix & b)
    {
        if (a.cols() != b.rows())
            throw std::invalid_argument("IntMatrix: dimension mismatch in product");
        IntMatrix m(a.rows(), b.cols());
        for (int i = 0; i < a.rows(); ++i) {
            Row acc;
            for (auto & [k, v] : a.row(i))
                for (auto & [j, w] : b.row(k))
                    acc.emplace_back(j, v * w);
            m.set_row(i, std::move(acc));
        }
        return m;
    }

    friend bool operator==(const IntMatrix & a, const IntMatrix & b)
    {
        return a.cols_ == b.cols_ && a.rows_ == b.rows_;
    }

    /// Matrix-market style dump: `rows cols` header then 1-based `i j v` triplets.
    [[nodiscard]] std::string to_market() const
    {
        std::ostringstream os;
        os << rows() << ' ' << cols() << '\n';
        for (int i = 0; i < rows(); ++i)
            for (auto & [c, v] : row(i))
                os << i + 1 << ' ' << c + 1 << ' ' << v.get_str() << '\n';
        return os.str();
    }

    static IntMatrix from_market(const std::string & text)
    {
        std::istringstream is(text);
        int r = 0, c = 0;
        if (! (is >> r >> c))
            throw std::invalid_argument("matrix dump: bad header");
        IntMatrix m(r, c);
        std::vector<Row> pending(static_cast<std::size_t>(r));
        int i, j;
        std::string v;
        while (is >> i >> j >> v) {
            if (i < 1 || i > r || j < 1 || j > c)
                throw std::invalid_argument("matrix dump: index out of range");
            pending[static_cast<std::size_t>(i - 1)].emplace_back(j - 1, BigInt(v));
        }
        for (int k = 0; k < r; ++k)
            m.set_row(k, std::move(pending[static_cast<std::size_t>(k)]));
        return m;
    }

private:
    int cols_ = 0;
    std::vector<Row> rows_;
};

/// Exact determinant (fraction-free Bareiss elimination).
inline BigInt determinant(const IntMatrix & m)
{
    if (m.rows() != m.cols())
        throw std::invalid_argument("determinant: matrix is not square");
    int n = m.rows();
    if (n == 0)
        return 1;
    auto a = m.dense();
    BigInt prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        auto uk = static_cast<std::size_t>(k);
        if (a[uk][uk] == 0) {
            int swap_with = -1;
            for (int i = k + 1; i < n; ++i)
                if (a[static_cast<std::size_t>(i)][uk] != 0) {
                    swap_with = i;
                    break;
                }
            if (swap_with < 0)
                return 0;
            std::swap(a[uk], a[static_cast<std::size_t>(swap_with)]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
                a[ui][uj] = (a[ui][uj] * a[uk][uk] - a[ui][uk] * a[uk][uj]) / prev;
            }
        prev = a[uk][uk];
    }
    return sign * a[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(n - 1)];
}

/// Relator exponent-sum matrix: one row per relator, one column per generator.
inline IntMatrix exponent_matrix(const Presentation & pres)
{
    IntMatrix m(static_cast<int>(pres.relators().size()), pres.generator_count());
    for (std::size_t i = 0; i < pres.relators().size(); ++i) {
        IntMatrix::Row entries;
        for (auto l : pres.relators()[i])
            entries.emplace_back(generator_of(l), l > 0 ? 1 : -1);
        m.set_row(static_cast<int>(i), std::move(entries));
    }
    return m;
}

} // namespace fptower

#endif // FPTOWER_INT_MATRIX_HPP
