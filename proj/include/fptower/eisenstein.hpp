#ifndef FPTOWER_EISENSTEIN_HPP
#define FPTOWER_EISENSTEIN_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fptower {

namespace detail {
    inline std::int64_t checked_add(std::int64_t a, std::int64_t b)
    {
        std::int64_t r;
        if (__builtin_add_overflow(a, b, &r))
            throw std::overflow_error("Eisenstein arithmetic overflow");
        return r;
    }
    inline std::int64_t checked_sub(std::int64_t a, std::int64_t b)
    {
        std::int64_t r;
        if (__builtin_sub_overflow(a, b, &r))
            throw std::overflow_error("Eisenstein arithmetic overflow");
        return r;
    }
    inline std::int64_t checked_mul(std::int64_t a, std::int64_t b)
    {
        std::int64_t r;
        if (__builtin_mul_overflow(a, b, &r))
            throw std::overflow_error("Eisenstein arithmetic overflow");
        return r;
    }
} // namespace detail

/// a + b*omega with omega a primitive cube root of unity (omega^2 = -1 - omega).
/// Arithmetic is exact; overflow throws.
struct EisensteinInt {
    std::int64_t a = 0, b = 0;

    static constexpr EisensteinInt omega() noexcept { return {0, 1}; }

    friend EisensteinInt operator+(EisensteinInt x, EisensteinInt y)
    {
        return {detail::checked_add(x.a, y.a), detail::checked_add(x.b, y.b)};
    }
    friend EisensteinInt operator-(EisensteinInt x, EisensteinInt y)
    {
        return {detail::checked_sub(x.a, y.a), detail::checked_sub(x.b, y.b)};
    }
    friend EisensteinInt operator-(EisensteinInt x) { return EisensteinInt{} - x; }
    friend EisensteinInt operator*(EisensteinInt x, EisensteinInt y)
    {
        using namespace detail;
        // (a + b w)(c + d w) = ac + (ad + bc) w + bd w^2 = (ac - bd) + (ad + bc - bd) w
        std::int64_t ac = checked_mul(x.a, y.a), bd = checked_mul(x.b, y.b);
        std::int64_t ad = checked_mul(x.a, y.b), bc = checked_mul(x.b, y.a);
        return {checked_sub(ac, bd), checked_sub(checked_add(ad, bc), bd)};
    }

    /// omega^k * z for k in Z/3.
    [[nodiscard]] EisensteinInt rotate(int k) const
    {
        EisensteinInt z = *this;
        for (int i = 0; i < ((k % 3) + 3) % 3; ++i)
            z = {-z.b, detail::checked_sub(z.a, z.b)};
        return z;
    }

    /// Norm a^2 - ab + b^2.
    [[nodiscard]] std::int64_t norm() const
    {
        using namespace detail;
        return checked_add(checked_sub(checked_mul(a, a), checked_mul(a, b)), checked_mul(b, b));
    }

    [[nodiscard]] bool is_zero() const noexcept { return a == 0 && b == 0; }

    [[nodiscard]] std::string to_string() const
    {
        if (b == 0)
            return std::to_string(a);
        std::string s = a != 0 ? std::to_string(a) : "";
        if (b == 1)
            s += a != 0 ? "+w" : "w";
        else if (b == -1)
            s += "-w";
        else
            s += (b > 0 && a != 0 ? "+" : "") + std::to_string(b) + "w";
        return s;
    }

    friend bool operator==(const EisensteinInt &, const EisensteinInt &) = default;
};

/// z -> omega^k z + t. Multiplication is composition: (f * g)(z) = f(g(z)).
struct AffineIsometry {
    EisensteinInt t;
    int k = 0; ///< in {0, 1, 2}

    static AffineIsometry identity() noexcept { return {}; }

    friend AffineIsometry operator*(const AffineIsometry & f, const AffineIsometry & g)
    {
        return {g.t.rotate(f.k) + f.t, (f.k + g.k) % 3};
    }

    [[nodiscard]] AffineIsometry inverse() const
    {
        int kin = (3 - k) % 3;
        return {-(t.rotate(kin)), kin};
    }

    [[nodiscard]] bool is_identity() const noexcept { return k == 0 && t.is_zero(); }

    /// 1, 3, or 0 for infinite order.
    [[nodiscard]] int order() const noexcept
    {
        if (k != 0)
            return 3;
        return t.is_zero() ? 1 : 0;
    }

    [[nodiscard]] std::string to_string() const { return "(" + t.to_string() + ", " + std::to_string(k) + ")"; }

    friend bool operator==(const AffineIsometry &, const AffineIsometry &) = default;
};

} // namespace fptower

#endif // FPTOWER_EISENSTEIN_HPP
