#ifndef FPTOWER_COSET_TABLE_HPP
#define FPTOWER_COSET_TABLE_HPP

#include <fptower/presentation.hpp>
#include <fptower/word.hpp>

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fptower {

enum class Strategy {
    hlt,   ///< relator-first (Haselgrove-Leech-Trotter)
    felsch ///< definition-first
};

struct EnumerationLimits {
    std::size_t max_cosets = 1'000'000; ///< table capacity, live plus dead rows
    Strategy strategy = Strategy::hlt;
    bool lookahead = true;
    std::size_t max_deductions = 100'000; ///< Felsch stack cap; overflow triggers a full scan
};

/// Thrown when an enumeration does not close within its coset limit.
class LimitExceeded : public std::runtime_error {
public:
    explicit LimitExceeded(std::size_t limit) :
        std::runtime_error("coset enumeration exceeded " + std::to_string(limit) + " cosets"), limit_(limit)
    {
    }
    [[nodiscard]] std::size_t limit() const noexcept { return limit_; }

private:
    std::size_t limit_;
};

/// Column of a letter: generator g occupies columns 2g (g) and 2g+1 (g^-1).
constexpr int column_of(Letter l) noexcept { return 2 * generator_of(l) + (l < 0 ? 1 : 0); }
constexpr Letter letter_of_column(int col) noexcept { return make_letter(col / 2, (col & 1) != 0); }

/// A closed, standardized coset table. Cosets are numbered 0..index-1 and
/// coset 0 is the subgroup itself.
class CosetTable {
public:
    CosetTable() = default;

    /// Builds from complete column data (row-major, 2*generators columns).
    /// Standardizes; throws if the data is not a consistent permutation action.
    CosetTable(int generators, std::vector<std::int32_t> data) : generators_(generators), data_(std::move(data))
    {
        if (generators_ == 0 && data_.empty())
            return; // trivial group, a single coset
        if (generators_ <= 0 || data_.size() % static_cast<std::size_t>(columns()) != 0 || data_.empty())
            throw std::invalid_argument("CosetTable: bad dimensions");
        std::size_t n = data_.size() / static_cast<std::size_t>(columns());
        for (std::size_t c = 0; c < n; ++c)
            for (int x = 0; x < columns(); ++x) {
                auto d = data_[c * static_cast<std::size_t>(columns()) + static_cast<std::size_t>(x)];
                if (d < 0 || static_cast<std::size_t>(d) >= n
                    || data_[static_cast<std::size_t>(d) * static_cast<std::size_t>(columns()) + static_cast<std::size_t>(x ^ 1)] != static_cast<std::int32_t>(c))
                    throw std::invalid_argument("CosetTable: inconsistent entry");
            }
        standardize();
    }

    /// From one permutation (images of 0..n-1) per generator.
    static CosetTable from_permutations(const std::vector<std::vector<int>> & perms)
    {
        if (perms.empty())
            return CosetTable(0, std::vector<std::int32_t>(0));
        std::size_t n = perms.front().size();
        int gens = static_cast<int>(perms.size());
        std::vector<std::int32_t> data(n * 2 * perms.size());
        for (int g = 0; g < gens; ++g) {
            if (perms[static_cast<std::size_t>(g)].size() != n)
                throw std::invalid_argument("from_permutations: degree mismatch");
            for (std::size_t c = 0; c < n; ++c) {
                int d = perms[static_cast<std::size_t>(g)][c];
                data[c * 2 * perms.size() + 2 * static_cast<std::size_t>(g)] = d;
                data[static_cast<std::size_t>(d) * 2 * perms.size() + 2 * static_cast<std::size_t>(g) + 1] = static_cast<std::int32_t>(c);
            }
        }
        return CosetTable(gens, std::move(data));
    }

    [[nodiscard]] int generator_count() const noexcept { return generators_; }
    [[nodiscard]] int columns() const noexcept { return 2 * generators_; }
    [[nodiscard]] std::size_t index() const noexcept
    {
        return generators_ == 0 ? 1 : data_.size() / static_cast<std::size_t>(columns());
    }

    [[nodiscard]] int entry(int coset, int column) const
    {
        return data_[static_cast<std::size_t>(coset) * static_cast<std::size_t>(columns()) + static_cast<std::size_t>(column)];
    }
    [[nodiscard]] int act(int coset, Letter l) const { return entry(coset, column_of(l)); }

    [[nodiscard]] int trace(const Word & w, int start = 0) const
    {
        int c = start;
        for (auto l : w)
            c = act(c, l);
        return c;
    }

    [[nodiscard]] bool contains(const Word & w) const { return trace(w, 0) == 0; }

    /// One permutation of {0..index-1} per generator.
    [[nodiscard]] std::vector<std::vector<int>> permutation_representation() const
    {
        std::vector<std::vector<int>> perms(static_cast<std::size_t>(generators_), std::vector<int>(index()));
        for (int g = 0; g < generators_; ++g)
            for (std::size_t c = 0; c < index(); ++c)
                perms[static_cast<std::size_t>(g)][c] = entry(static_cast<int>(c), 2 * g);
        return perms;
    }

    /// Plain-text form: header, then one row of 1-based entries per coset.
    [[nodiscard]] std::string serialize(std::uint64_t presentation_hash) const
    {
        std::ostringstream os;
        os << "fptower-coset-table 1\n";
        os << "presentation " << std::hex << std::setw(16) << std::setfill('0') << presentation_hash << std::dec << '\n';
        os << "generators " << generators_ << '\n';
        os << "index " << index() << '\n';
        for (std::size_t c = 0; c < index() && generators_ > 0; ++c) {
            for (int x = 0; x < columns(); ++x)
                os << (x ? " " : "") << entry(static_cast<int>(c), x) + 1;
            os << '\n';
        }
        return os.str();
    }

    struct Loaded;
    static Loaded deserialize(const std::string & text);

    friend bool operator==(const CosetTable &, const CosetTable &) = default;

private:
    void standardize()
    {
        std::size_t n = index();
        std::vector<std::int32_t> order, newidx(n, -1);
        order.reserve(n);
        order.push_back(0);
        newidx[0] = 0;
        for (std::size_t k = 0; k < order.size(); ++k)
            for (int x = 0; x < columns(); ++x) {
                int d = entry(order[k], x);
                if (newidx[static_cast<std::size_t>(d)] < 0) {
                    newidx[static_cast<std::size_t>(d)] = static_cast<std::int32_t>(order.size());
                    order.push_back(d);
                }
            }
        if (order.size() != n)
            throw std::invalid_argument("CosetTable: action is not transitive");
        std::vector<std::int32_t> out(data_.size());
        for (std::size_t k = 0; k < n; ++k)
            for (int x = 0; x < columns(); ++x)
                out[k * static_cast<std::size_t>(columns()) + static_cast<std::size_t>(x)] = newidx[static_cast<std::size_t>(entry(order[k], x))];
        data_ = std::move(out);
    }

    int generators_ = 0;
    std::vector<std::int32_t> data_;
};

struct CosetTable::Loaded {
    std::uint64_t presentation_hash;
    CosetTable table;
};

inline CosetTable::Loaded CosetTable::deserialize(const std::string & text)
{
    std::istringstream is(text);
    std::string tag;
    int version = 0, gens = 0;
    std::size_t n = 0;
    std::uint64_t hash = 0;
    if (! (is >> tag >> version) || tag != "fptower-coset-table" || version != 1)
        throw std::invalid_argument("not a coset table file");
    if (! (is >> tag >> std::hex >> hash >> std::dec) || tag != "presentation")
        throw std::invalid_argument("coset table: missing presentation hash");
    if (! (is >> tag >> gens) || tag != "generators" || ! (is >> tag >> n) || tag != "index")
        throw std::invalid_argument("coset table: bad header");
    if (gens == 0)
        return {hash, CosetTable(0, {})};
    std::vector<std::int32_t> data(n * 2 * static_cast<std::size_t>(gens));
    for (auto & v : data) {
        long e;
        if (! (is >> e))
            throw std::invalid_argument("coset table: truncated body");
        v = static_cast<std::int32_t>(e - 1);
    }
    return {hash, CosetTable(gens, std::move(data))};
}

namespace detail {

    class Enumerator {
    public:
        Enumerator(const Presentation & pres, const std::vector<Word> & subgroup, const EnumerationLimits & limits) :
            cols_(2 * pres.generator_count()), limits_(limits)
        {
            if (limits.max_cosets < 1)
                throw std::invalid_argument("max_cosets must be positive");
            std::vector<Word> rels;
            for (auto & r : pres.relators())
                if (! r.empty())
                    rels.push_back(r);
            std::stable_sort(rels.begin(), rels.end(), [](const Word & a, const Word & b) { return a.size() < b.size(); });
            for (auto & r : rels)
                relators_.push_back(to_columns(r));
            for (auto & h : subgroup) {
                if (h.max_generator() >= pres.generator_count())
                    throw std::invalid_argument("subgroup generator over a foreign alphabet");
                if (! h.empty())
                    subgroup_.push_back(to_columns(h));
            }
            if (limits_.strategy == Strategy::felsch) {
                rotations_.resize(static_cast<std::size_t>(cols_));
                for (auto & r : rels)
                    for (const Word & v : {r, r.inverse()})
                        for (std::size_t k = 0; k < v.size(); ++k) {
                            auto rc = to_columns(rotate(v, k));
                            auto & bucket = rotations_[static_cast<std::size_t>(rc.front())];
                            if (std::find(bucket.begin(), bucket.end(), rc) == bucket.end())
                                bucket.push_back(std::move(rc));
                        }
            }
            new_coset();
        }

        CosetTable run()
        {
            if (cols_ == 0)
                return CosetTable(0, {});
            for (auto & h : subgroup_)
                while (fill_from(0, h) == ScanResult::restart) {
                }
            if (limits_.strategy == Strategy::hlt)
                run_hlt();
            else
                run_felsch();
            return finish();
        }

    private:
        static constexpr std::int32_t undefined = -1;

        static std::vector<int> to_columns(const Word & w)
        {
            std::vector<int> v;
            v.reserve(w.size());
            for (auto l : w)
                v.push_back(column_of(l));
            return v;
        }

        std::int32_t & at(std::size_t c, int x) { return table_[c * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(x)]; }

        bool alive(std::size_t c) const { return parent_[c] == static_cast<std::int32_t>(c); }

        std::size_t rep(std::size_t c)
        {
            std::size_t r = c;
            while (parent_[r] != static_cast<std::int32_t>(r))
                r = static_cast<std::size_t>(parent_[r]);
            while (parent_[c] != static_cast<std::int32_t>(c)) {
                auto next = static_cast<std::size_t>(parent_[c]);
                parent_[c] = static_cast<std::int32_t>(r);
                c = next;
            }
            return r;
        }

        std::size_t new_coset()
        {
            std::size_t c = parent_.size();
            parent_.push_back(static_cast<std::int32_t>(c));
            table_.resize(table_.size() + static_cast<std::size_t>(cols_), undefined);
            ++live_;
            return c;
        }

        // Makes room for one more coset: compaction first, then lookahead.
        // Returns false if the row pointers were remapped (callers restart).
        bool ensure_capacity()
        {
            if (parent_.size() < limits_.max_cosets)
                return true;
            if (parent_.size() - live_ >= std::max<std::size_t>(1, parent_.size() / 8)) {
                compact();
                return false;
            }
            if (limits_.lookahead && ! in_lookahead_) {
                lookahead();
                if (live_ < parent_.size()) {
                    compact();
                    return false;
                }
            }
            throw LimitExceeded(limits_.max_cosets);
        }

        void set_entry(std::size_t c, int x, std::size_t d)
        {
            at(c, x) = static_cast<std::int32_t>(d);
            at(d, x ^ 1) = static_cast<std::int32_t>(c);
            if (limits_.strategy == Strategy::felsch)
                push_deduction(c, x);
        }

        void push_deduction(std::size_t c, int x)
        {
            if (deductions_.size() >= limits_.max_deductions) {
                deductions_.clear();
                deduction_overflow_ = true;
                return;
            }
            deductions_.emplace_back(c, x);
        }

        // Returns false if a restart is required (table was compacted).
        bool define(std::size_t c, int x)
        {
            if (! ensure_capacity())
                return false;
            std::size_t d = new_coset();
            set_entry(c, x, d);
            return true;
        }

        void merge(std::size_t a, std::size_t b, std::vector<std::size_t> & queue)
        {
            a = rep(a);
            b = rep(b);
            if (a == b)
                return;
            if (a > b)
                std::swap(a, b);
            parent_[b] = static_cast<std::int32_t>(a);
            --live_;
            queue.push_back(b);
        }

        void coincidence(std::size_t a, std::size_t b)
        {
            std::vector<std::size_t> queue;
            merge(a, b, queue);
            for (std::size_t i = 0; i < queue.size(); ++i) {
                std::size_t g = queue[i];
                for (int x = 0; x < cols_; ++x) {
                    std::int32_t dd = at(g, x);
                    if (dd == undefined)
                        continue;
                    auto d = static_cast<std::size_t>(dd);
                    if (at(d, x ^ 1) == static_cast<std::int32_t>(g))
                        at(d, x ^ 1) = undefined;
                    std::size_t mu = rep(g), nu = rep(d);
                    if (at(mu, x) != undefined)
                        merge(nu, static_cast<std::size_t>(at(mu, x)), queue);
                    else if (at(nu, x ^ 1) != undefined)
                        merge(mu, static_cast<std::size_t>(at(nu, x ^ 1)), queue);
                    else
                        set_entry(mu, x, nu);
                }
            }
        }

        enum class ScanResult { done, restart };

        // Scan-and-fill of w from coset c. Defines cosets as needed.
        ScanResult fill_from(std::size_t c, const std::vector<int> & w)
        {
            std::size_t f = c, b = c;
            std::size_t i = 0, j = w.size();
            for (;;) {
                while (i < j && at(f, w[i]) != undefined)
                    f = static_cast<std::size_t>(at(f, w[i++]));
                if (i == j) {
                    if (f != b)
                        coincidence(f, b);
                    return ScanResult::done;
                }
                while (j > i && at(b, w[j - 1] ^ 1) != undefined)
                    b = static_cast<std::size_t>(at(b, w[--j] ^ 1));
                if (j == i) {
                    coincidence(f, b);
                    return ScanResult::done;
                }
                if (j == i + 1) {
                    set_entry(f, w[i], b);
                    return ScanResult::done;
                }
                if (! define(f, w[i]))
                    return ScanResult::restart;
            }
        }

        // Scan without defining; deduces a single missing entry.
        void scan(std::size_t c, const std::vector<int> & w)
        {
            std::size_t f = c, b = c;
            std::size_t i = 0, j = w.size();
            while (i < j && at(f, w[i]) != undefined)
                f = static_cast<std::size_t>(at(f, w[i++]));
            if (i == j) {
                if (f != b)
                    coincidence(f, b);
                return;
            }
            while (j > i && at(b, w[j - 1] ^ 1) != undefined)
                b = static_cast<std::size_t>(at(b, w[--j] ^ 1));
            if (j == i)
                coincidence(f, b);
            else if (j == i + 1)
                set_entry(f, w[i], b);
        }

        void lookahead()
        {
            in_lookahead_ = true;
            for (std::size_t c = 0; c < parent_.size(); ++c)
                for (auto & r : relators_) {
                    if (! alive(c))
                        break;
                    scan(c, r);
                }
            in_lookahead_ = false;
        }

        void compact()
        {
            std::vector<std::int32_t> newidx(parent_.size(), -1);
            std::size_t n = 0;
            for (std::size_t c = 0; c < parent_.size(); ++c)
                if (alive(c))
                    newidx[c] = static_cast<std::int32_t>(n++);
            std::vector<std::int32_t> table(n * static_cast<std::size_t>(cols_), undefined);
            for (std::size_t c = 0; c < parent_.size(); ++c) {
                if (! alive(c))
                    continue;
                for (int x = 0; x < cols_; ++x) {
                    std::int32_t d = at(c, x);
                    table[static_cast<std::size_t>(newidx[c]) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(x)] =
                        d == undefined ? undefined : newidx[rep(static_cast<std::size_t>(d))];
                }
            }
            auto remap_pointer = [&](std::size_t p) {
                while (p < parent_.size() && ! alive(p))
                    ++p;
                return p < parent_.size() ? static_cast<std::size_t>(newidx[p]) : n;
            };
            cursor_ = remap_pointer(cursor_);
            std::vector<std::pair<std::size_t, int>> deds;
            for (auto [c, x] : deductions_)
                if (alive(c))
                    deds.emplace_back(static_cast<std::size_t>(newidx[c]), x);
            deductions_ = std::move(deds);
            table_ = std::move(table);
            parent_.resize(n);
            std::iota(parent_.begin(), parent_.end(), 0);
            live_ = n;
        }

        void run_hlt()
        {
            cursor_ = 0;
            while (cursor_ < parent_.size()) {
                std::size_t c = cursor_;
                bool restart = false;
                if (alive(c)) {
                    for (auto & r : relators_) {
                        if (fill_from(c, r) == ScanResult::restart) {
                            restart = true;
                            break;
                        }
                        if (! alive(c))
                            break;
                    }
                    if (! restart && alive(c))
                        for (int x = 0; x < cols_; ++x)
                            if (at(c, x) == undefined && ! define(c, x)) {
                                restart = true;
                                break;
                            }
                }
                if (! restart)
                    ++cursor_;
            }
        }

        void process_deductions()
        {
            while (! deductions_.empty() || deduction_overflow_) {
                if (deduction_overflow_) {
                    deduction_overflow_ = false;
                    lookahead();
                    continue;
                }
                auto [c, x] = deductions_.back();
                deductions_.pop_back();
                if (! alive(c))
                    continue;
                for (auto & r : rotations_[static_cast<std::size_t>(x)]) {
                    if (! alive(c))
                        break;
                    scan(c, r);
                }
                if (! alive(c) || at(c, x) == undefined)
                    continue;
                std::size_t d = static_cast<std::size_t>(at(c, x));
                for (auto & r : rotations_[static_cast<std::size_t>(x ^ 1)]) {
                    if (! alive(d))
                        break;
                    scan(d, r);
                }
            }
        }

        void run_felsch()
        {
            // Relator cycles at the base coset, then definitions in row order.
            for (auto & r : relators_)
                scan(0, r);
            process_deductions();
            for (;;) {
                bool defined_any = false;
                cursor_ = 0;
                while (cursor_ < parent_.size()) {
                    std::size_t c = cursor_;
                    bool restart = false;
                    if (alive(c))
                        for (int x = 0; x < cols_ && alive(c); ++x)
                            if (at(c, x) == undefined) {
                                if (! define(c, x)) {
                                    restart = true;
                                    break;
                                }
                                defined_any = true;
                                process_deductions();
                            }
                    if (! restart)
                        ++cursor_;
                }
                if (! defined_any)
                    break;
            }
        }

        CosetTable finish()
        {
            std::vector<std::int32_t> newidx(parent_.size(), -1);
            std::size_t n = 0;
            for (std::size_t c = 0; c < parent_.size(); ++c)
                if (alive(c))
                    newidx[c] = static_cast<std::int32_t>(n++);
            std::vector<std::int32_t> data(n * static_cast<std::size_t>(cols_));
            for (std::size_t c = 0; c < parent_.size(); ++c) {
                if (! alive(c))
                    continue;
                for (int x = 0; x < cols_; ++x) {
                    std::int32_t d = at(c, x);
                    if (d == undefined)
                        throw std::logic_error("coset enumeration finished with an incomplete table");
                    data[static_cast<std::size_t>(newidx[c]) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(x)] = newidx[rep(static_cast<std::size_t>(d))];
                }
            }
            return CosetTable(cols_ / 2, std::move(data));
        }

        int cols_;
        EnumerationLimits limits_;
        std::vector<std::vector<int>> relators_, subgroup_;
        std::vector<std::vector<std::vector<int>>> rotations_;
        std::vector<std::int32_t> table_, parent_;
        std::size_t live_ = 0;
        std::size_t cursor_ = 0;
        std::vector<std::pair<std::size_t, int>> deductions_;
        bool deduction_overflow_ = false;
        bool in_lookahead_ = false;
    };

} // namespace detail

/// Todd-Coxeter enumeration of the cosets of <subgroup> in the group
/// presented by `pres`. Throws LimitExceeded if the table does not close.
inline CosetTable todd_coxeter(const Presentation & pres, const std::vector<Word> & subgroup,
    const EnumerationLimits & limits = {})
{
    return detail::Enumerator(pres, subgroup, limits).run();
}

inline int trace(const CosetTable & table, const Word & w, int start = 0) { return table.trace(w, start); }
inline bool contains(const CosetTable & table, const Word & w) { return table.contains(w); }
inline std::vector<std::vector<int>> permutation_representation(const CosetTable & table)
{
    return table.permutation_representation();
}

} // namespace fptower

#endif // FPTOWER_COSET_TABLE_HPP
