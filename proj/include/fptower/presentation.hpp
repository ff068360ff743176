#ifndef FPTOWER_PRESENTATION_HPP
#define FPTOWER_PRESENTATION_HPP

#include <fptower/word.hpp>

#include <cctype>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fptower {

/// Syntax errors carry the byte offset into the parsed text.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string & what, std::size_t position) :
        std::runtime_error(what + " at offset " + std::to_string(position)),
        position_(position)
    {
    }
    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Generators and relators. Relators are kept freely and cyclically reduced.
class Presentation {
public:
    Presentation() = default;

    explicit Presentation(std::vector<std::string> generator_names, std::vector<Word> relators = {}) :
        names_(std::move(generator_names))
    {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (! index_.emplace(names_[i], static_cast<int>(i)).second)
                throw std::invalid_argument("duplicate generator name '" + names_[i] + "'");
        }
        for (auto & r : relators)
            add_relator(r);
    }

    /// Generators named prefix1, prefix2, ...
    static Presentation with_generators(int count, const std::string & prefix = "g")
    {
        std::vector<std::string> names;
        for (int i = 0; i < count; ++i)
            names.push_back(prefix + std::to_string(i + 1));
        return Presentation(std::move(names));
    }

    [[nodiscard]] int generator_count() const noexcept { return static_cast<int>(names_.size()); }
    [[nodiscard]] const std::vector<std::string> & generator_names() const noexcept { return names_; }
    [[nodiscard]] const std::string & name(int g) const { return names_.at(static_cast<std::size_t>(g)); }
    [[nodiscard]] const std::vector<Word> & relators() const noexcept { return relators_; }

    [[nodiscard]] std::optional<int> find_generator(std::string_view name) const
    {
        auto it = index_.find(std::string(name));
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    void add_relator(const Word & w)
    {
        if (w.max_generator() >= generator_count())
            throw std::invalid_argument("relator references an undeclared generator");
        relators_.push_back(cyclic_reduce(w).word);
    }

    [[nodiscard]] std::size_t total_length() const noexcept
    {
        std::size_t n = 0;
        for (auto & r : relators_)
            n += r.size();
        return n;
    }

    /// Renders a word with this presentation's names, compressing runs as powers.
    [[nodiscard]] std::string format_word(const Word & w) const
    {
        if (w.empty())
            return "1";
        std::string out;
        std::size_t i = 0;
        while (i < w.size()) {
            std::size_t j = i;
            while (j < w.size() && w[j] == w[i])
                ++j;
            long run = static_cast<long>(j - i);
            if (! out.empty())
                out += '*';
            out += names_.at(static_cast<std::size_t>(generator_of(w[i])));
            long exponent = is_inverse(w[i]) ? -run : run;
            if (exponent != 1)
                out += "^" + std::to_string(exponent);
            i = j;
        }
        return out;
    }

    /// The `gens:` / `rel:` file format.
    [[nodiscard]] std::string to_text() const
    {
        std::ostringstream os;
        os << "gens:";
        for (auto & n : names_)
            os << ' ' << n;
        os << '\n';
        for (auto & r : relators_)
            os << "rel: " << format_word(r) << '\n';
        return os.str();
    }

    /// Compact angle-bracket form.
    [[nodiscard]] std::string to_brackets() const
    {
        std::string out = "<";
        for (std::size_t i = 0; i < names_.size(); ++i)
            out += (i ? "," : "") + names_[i];
        out += " | ";
        for (std::size_t i = 0; i < relators_.size(); ++i)
            out += (i ? ", " : "") + format_word(relators_[i]);
        return out + ">";
    }

    /// 64-bit FNV-1a of the canonical text form.
    [[nodiscard]] std::uint64_t hash() const noexcept
    {
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char c : to_text()) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        return h;
    }

    friend bool operator==(const Presentation & a, const Presentation & b)
    {
        return a.names_ == b.names_ && a.relators_ == b.relators_;
    }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
    std::vector<Word> relators_;
};

namespace detail {

    // Recursive-descent parser for word expressions:
    //   expr    := factor (('*' | juxtaposition) factor)*
    //   factor  := primary ('^' (integer | '-' integer | primary))*
    //   primary := name | '1' | '(' expr ')' | '(' expr ',' expr ')' | '{' expr '}'
    class WordParser {
    public:
        WordParser(std::string_view text, std::size_t offset, const Presentation & pres) :
            text_(text), pos_(offset), pres_(pres)
        {
        }

        [[nodiscard]] std::size_t position() const noexcept { return pos_; }

        void skip_space()
        {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        }

        [[nodiscard]] bool at_end()
        {
            skip_space();
            return pos_ >= text_.size();
        }

        [[nodiscard]] char peek()
        {
            skip_space();
            return pos_ < text_.size() ? text_[pos_] : '\0';
        }

        void expect(char c)
        {
            if (peek() != c)
                throw ParseError(std::string("expected '") + c + "'", pos_);
            ++pos_;
        }

        Word expr()
        {
            Word w = factor();
            for (;;) {
                char c = peek();
                if (c == '*') {
                    ++pos_;
                    w *= factor();
                }
                else if (starts_primary(c))
                    w *= factor();
                else
                    return w;
            }
        }

    private:
        static bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

        bool starts_primary(char c) const
        {
            return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '(' || c == '{' || c == '1';
        }

        Word factor()
        {
            Word w = primary();
            while (peek() == '^') {
                ++pos_;
                char c = peek();
                if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
                    bool negative = false;
                    if (c == '-') {
                        negative = true;
                        ++pos_;
                        skip_space();
                    }
                    std::size_t start = pos_;
                    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                        ++pos_;
                    if (start == pos_)
                        throw ParseError("expected integer exponent", pos_);
                    long n = std::stol(std::string(text_.substr(start, pos_ - start)));
                    w = w.power(negative ? -n : n);
                }
                else
                    w = conjugate(w, primary());
            }
            return w;
        }

        Word primary()
        {
            char c = peek();
            if (c == '(') {
                ++pos_;
                Word a = expr();
                if (peek() == ',') {
                    ++pos_;
                    Word b = expr();
                    expect(')');
                    return commutator(a, b);
                }
                expect(')');
                return a;
            }
            if (c == '{') {
                ++pos_;
                Word a = expr();
                expect('}');
                return a;
            }
            if (c == '1' && (pos_ + 1 >= text_.size() || ! is_name_char(text_[pos_ + 1]))) {
                ++pos_;
                return {};
            }
            std::size_t start = pos_;
            if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                while (pos_ < text_.size() && is_name_char(text_[pos_]))
                    ++pos_;
            }
            if (start == pos_)
                throw ParseError("expected generator, '(' or '{'", pos_);
            std::string_view name = text_.substr(start, pos_ - start);
            auto g = pres_.find_generator(name);
            if (! g)
                throw ParseError("undeclared generator '" + std::string(name) + "'", start);
            return Word::generator(*g);
        }

        std::string_view text_;
        std::size_t pos_;
        const Presentation & pres_;
    };

    inline std::string_view strip(std::string_view s)
    {
        while (! s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
            s.remove_prefix(1);
        while (! s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
            s.remove_suffix(1);
        return s;
    }

    inline bool is_name(std::string_view s)
    {
        if (s.empty() || ! (std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
            return false;
        for (char c : s)
            if (! (std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
                return false;
        return true;
    }

    inline Presentation parse_file_format(std::string_view text)
    {
        std::optional<Presentation> pres;
        std::size_t line_start = 0;
        while (line_start <= text.size()) {
            std::size_t line_end = text.find('\n', line_start);
            if (line_end == std::string_view::npos)
                line_end = text.size();
            std::string_view line = text.substr(line_start, line_end - line_start);
            if (auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            std::string_view body = strip(line);
            std::size_t body_offset = line_start + static_cast<std::size_t>(body.data() - line.data());
            if (! body.empty()) {
                if (body.starts_with("gens:")) {
                    if (pres)
                        throw ParseError("duplicate 'gens:' line", body_offset);
                    std::vector<std::string> names;
                    std::istringstream is{std::string(body.substr(5))};
                    for (std::string n; is >> n;) {
                        if (! is_name(n))
                            throw ParseError("invalid generator name '" + n + "'", body_offset);
                        names.push_back(n);
                    }
                    try {
                        pres.emplace(std::move(names));
                    }
                    catch (const std::invalid_argument & e) {
                        throw ParseError(e.what(), body_offset);
                    }
                }
                else if (body.starts_with("rel:")) {
                    if (! pres)
                        throw ParseError("'rel:' before 'gens:'", body_offset);
                    WordParser p(text.substr(0, body_offset + body.size()), body_offset + 4, *pres);
                    Word w = p.expr();
                    if (! p.at_end())
                        throw ParseError("unexpected trailing input", p.position());
                    pres->add_relator(w);
                }
                else
                    throw ParseError("expected 'gens:' or 'rel:'", body_offset);
            }
            line_start = line_end + 1;
        }
        if (! pres)
            throw ParseError("missing 'gens:' line", 0);
        return *pres;
    }

    inline Presentation parse_bracket_format(std::string_view text)
    {
        static constexpr std::string_view open_utf8 = "\xE2\x9F\xA8", close_utf8 = "\xE2\x9F\xA9";
        std::size_t pos = 0;
        auto skip = [&] {
            while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
                ++pos;
        };
        skip();
        if (text.substr(pos).starts_with(open_utf8))
            pos += open_utf8.size();
        else if (pos < text.size() && text[pos] == '<')
            ++pos;
        else
            throw ParseError("expected '<' or 'gens:'", pos);

        std::size_t bar = text.find('|', pos);
        if (bar == std::string_view::npos)
            throw ParseError("expected '|'", text.size());
        std::vector<std::string> names;
        std::size_t p = pos;
        while (p <= bar) {
            std::size_t comma = text.find(',', p);
            if (comma == std::string_view::npos || comma > bar)
                comma = bar;
            std::string_view name = strip(text.substr(p, comma - p));
            if (! name.empty() || comma != bar) {
                if (! is_name(name))
                    throw ParseError("invalid generator name '" + std::string(name) + "'", p);
                names.emplace_back(name);
            }
            p = comma + 1;
        }
        Presentation pres;
        try {
            pres = Presentation(std::move(names));
        }
        catch (const std::invalid_argument & e) {
            throw ParseError(e.what(), pos);
        }

        std::size_t close = text.rfind(close_utf8);
        std::size_t close_len = close_utf8.size();
        if (close == std::string_view::npos || close < bar) {
            close = text.rfind('>');
            close_len = 1;
        }
        if (close == std::string_view::npos || close < bar)
            throw ParseError("expected closing '>'", text.size());
        if (! strip(text.substr(close + close_len)).empty())
            throw ParseError("unexpected trailing input", close + close_len);

        std::string_view inner = text.substr(0, close);
        WordParser parser(inner, bar + 1, pres);
        if (parser.at_end())
            return pres;
        for (;;) {
            pres.add_relator(parser.expr());
            if (parser.at_end())
                break;
            parser.expect(',');
        }
        return pres;
    }

} // namespace detail

/// Parses either `<a,b | rel, ...>` (ASCII or U+27E8/U+27E9 brackets) or the
/// line-oriented `gens:` / `rel:` file format.
inline Presentation parse_presentation(std::string_view text)
{
    std::string_view body = detail::strip(text);
    while (body.starts_with("#")) {
        auto nl = body.find('\n');
        body = nl == std::string_view::npos ? std::string_view{} : detail::strip(body.substr(nl + 1));
    }
    if (body.starts_with("gens:"))
        return detail::parse_file_format(text);
    return detail::parse_bracket_format(text);
}

/// Parses a single word expression over the generators of `pres`.
inline Word parse_word(std::string_view text, const Presentation & pres)
{
    detail::WordParser p(text, 0, pres);
    if (p.at_end())
        return {};
    Word w = p.expr();
    if (! p.at_end())
        throw ParseError("unexpected trailing input", p.position());
    return w;
}

} // namespace fptower

#endif // FPTOWER_PRESENTATION_HPP
