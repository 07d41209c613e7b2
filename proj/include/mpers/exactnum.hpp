#pragma once

// Exact scalars: arbitrary-precision rationals and prime-field residues,
// plus the field descriptors the linear algebra is templated on.

#include <boost/multiprecision/cpp_int.hpp>

#include <cassert>
#include <compare>
#include <concepts>
#include <cstdint>
#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "errors.hpp"

namespace mpers {

namespace detail {

using i128 = __int128;
using u128 = unsigned __int128;

inline u128 gcd_u128(u128 a, u128 b) noexcept {
    while (b != 0) {
        const u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline u128 abs_u128(i128 x) noexcept { return x < 0 ? u128(0) - u128(x) : u128(x); }

// INT64_MIN is excluded so that negation never overflows.
inline bool fits_small(i128 x) noexcept {
    return x > i128(std::numeric_limits<std::int64_t>::min()) &&
           x <= i128(std::numeric_limits<std::int64_t>::max());
}

inline boost::multiprecision::cpp_int to_big_int(i128 x) {
    const u128 mag = abs_u128(x);
    boost::multiprecision::cpp_int out = static_cast<std::uint64_t>(mag >> 64);
    out <<= 64;
    out += static_cast<std::uint64_t>(mag);
    return x < 0 ? boost::multiprecision::cpp_int(-out) : out;
}

inline bool big_fits_small(const boost::multiprecision::cpp_int& x) {
    static const boost::multiprecision::cpp_int lo = std::numeric_limits<std::int64_t>::min() + 1;
    static const boost::multiprecision::cpp_int hi = std::numeric_limits<std::int64_t>::max();
    return x >= lo && x <= hi;
}

inline std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

// cpp_int reads a leading 0 as an octal prefix.
inline boost::multiprecision::cpp_int parse_decimal(std::string_view digits) {
    while (digits.size() > 1 && digits.front() == '0')
        digits.remove_prefix(1);
    return boost::multiprecision::cpp_int(std::string{digits});
}

inline bool all_digits(std::string_view s) noexcept {
    if (s.empty())
        return false;
    for (char c : s)
        if (c < '0' || c > '9')
            return false;
    return true;
}

} // namespace detail

/// Exact rational number, always in lowest terms with a positive denominator.
///
/// Values whose numerator and denominator fit in 64 bits are stored inline and
/// combined with 128-bit intermediates; anything larger is promoted to a
/// heap-allocated `cpp_rational` and demoted again as soon as it fits.
class Rational {
public:
    using BigInt = boost::multiprecision::cpp_int;
    using BigRational = boost::multiprecision::cpp_rational;

    Rational() noexcept = default;

    template <std::integral I>
    Rational(I value) { assign(static_cast<detail::i128>(value), 1); }

    Rational(std::int64_t num, std::int64_t den) {
        if (den == 0)
            throw DivisionByZero();
        assign(num, den);
    }

    explicit Rational(const BigRational& value) { assign_big(value); }

    Rational(const Rational& other)
        : num_(other.num_), den_(other.den_),
          big_(other.big_ ? std::make_unique<BigRational>(*other.big_) : nullptr) {}
    Rational(Rational&&) noexcept = default;
    Rational& operator=(const Rational& other) {
        if (this != &other) {
            num_ = other.num_;
            den_ = other.den_;
            big_ = other.big_ ? std::make_unique<BigRational>(*other.big_) : nullptr;
        }
        return *this;
    }
    Rational& operator=(Rational&&) noexcept = default;
    ~Rational() = default;

    /// Parses "p/q", an integer, or a decimal such as "-0.125" or "3e-2".
    /// Decimals are converted exactly.
    static Rational parse(std::string_view text);

    BigInt numerator() const { return big_ ? BigInt(boost::multiprecision::numerator(*big_)) : BigInt(num_); }
    BigInt denominator() const { return big_ ? BigInt(boost::multiprecision::denominator(*big_)) : BigInt(den_); }
    BigRational to_big() const { return big_ ? *big_ : BigRational(BigInt(num_), BigInt(den_)); }

    int sign() const noexcept {
        if (big_)
            return big_->sign();
        return (num_ > 0) - (num_ < 0);
    }
    bool is_zero() const noexcept { return !big_ && num_ == 0; }
    bool is_integer() const { return big_ ? boost::multiprecision::denominator(*big_) == 1 : den_ == 1; }
    bool is_small() const noexcept { return !big_; }

    Rational abs() const { return sign() < 0 ? -*this : *this; }

    Rational inverse() const {
        if (is_zero())
            throw DivisionByZero();
        if (big_)
            return Rational(BigRational(1) / *big_);
        Rational out;
        out.num_ = num_ < 0 ? -den_ : den_;
        out.den_ = num_ < 0 ? -num_ : num_;
        return out;
    }

    double to_double() const {
        return big_ ? big_->convert_to<double>() : static_cast<double>(num_) / static_cast<double>(den_);
    }

    /// "p/q", or just "p" for integers.
    std::string to_string() const {
        if (big_) {
            const BigInt n = boost::multiprecision::numerator(*big_);
            const BigInt d = boost::multiprecision::denominator(*big_);
            return d == 1 ? n.str() : n.str() + "/" + d.str();
        }
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

    Rational operator-() const {
        if (big_)
            return Rational(BigRational(-*big_));
        Rational out;
        out.num_ = -num_;
        out.den_ = den_;
        return out;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        if (!a.big_ && !b.big_) {
            if (a.den_ == 1 && b.den_ == 1)
                return make(detail::i128(a.num_) + b.num_, 1);
            const std::int64_t g = gcd64(a.den_, b.den_);
            const detail::i128 num = detail::i128(a.num_) * (b.den_ / g) + detail::i128(b.num_) * (a.den_ / g);
            const detail::i128 den = detail::i128(a.den_) * (b.den_ / g);
            return make(num, den);
        }
        return Rational(a.to_big() + b.to_big());
    }

    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

    friend Rational operator*(const Rational& a, const Rational& b) {
        if (!a.big_ && !b.big_) {
            if (a.num_ == 0 || b.num_ == 0)
                return Rational();
            const std::int64_t g1 = gcd64(a.num_ < 0 ? -a.num_ : a.num_, b.den_);
            const std::int64_t g2 = gcd64(b.num_ < 0 ? -b.num_ : b.num_, a.den_);
            const detail::i128 num = detail::i128(a.num_ / g1) * (b.num_ / g2);
            const detail::i128 den = detail::i128(a.den_ / g2) * (b.den_ / g1);
            if (detail::fits_small(num) && detail::fits_small(den)) {
                Rational out;
                out.num_ = static_cast<std::int64_t>(num);
                out.den_ = static_cast<std::int64_t>(den);
                return out;
            }
            return make(num, den);
        }
        return Rational(a.to_big() * b.to_big());
    }

    friend Rational operator/(const Rational& a, const Rational& b) { return a * b.inverse(); }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        if (!a.big_ && !b.big_)
            return a.num_ == b.num_ && a.den_ == b.den_;
        if (a.big_ && b.big_)
            return *a.big_ == *b.big_;
        return false; // canonical: a big value never fits the inline form
    }

    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        if (!a.big_ && !b.big_) {
            if (a.den_ == b.den_)
                return a.num_ <=> b.num_;
            const detail::i128 lhs = detail::i128(a.num_) * b.den_;
            const detail::i128 rhs = detail::i128(b.num_) * a.den_;
            return lhs < rhs ? std::strong_ordering::less
                             : (lhs == rhs ? std::strong_ordering::equal : std::strong_ordering::greater);
        }
        const BigRational x = a.to_big();
        const BigRational y = b.to_big();
        return x < y ? std::strong_ordering::less
                     : (x == y ? std::strong_ordering::equal : std::strong_ordering::greater);
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

private:
    static std::int64_t gcd64(std::int64_t a, std::int64_t b) noexcept {
        while (b != 0) {
            const std::int64_t t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    static Rational make(detail::i128 num, detail::i128 den) {
        Rational out;
        out.assign(num, den);
        return out;
    }

    void assign(detail::i128 num, detail::i128 den) {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        if (num == 0) {
            num_ = 0;
            den_ = 1;
            big_.reset();
            return;
        }
        const detail::u128 g = detail::gcd_u128(detail::abs_u128(num), detail::u128(den));
        num /= detail::i128(g);
        den /= detail::i128(g);
        if (detail::fits_small(num) && detail::fits_small(den)) {
            num_ = static_cast<std::int64_t>(num);
            den_ = static_cast<std::int64_t>(den);
            big_.reset();
        } else {
            num_ = 0;
            den_ = 1;
            big_ = std::make_unique<BigRational>(detail::to_big_int(num), detail::to_big_int(den));
        }
    }

    void assign_big(const BigRational& value) {
        const BigInt n = boost::multiprecision::numerator(value);
        const BigInt d = boost::multiprecision::denominator(value);
        if (detail::big_fits_small(n) && detail::big_fits_small(d)) {
            num_ = n.convert_to<std::int64_t>();
            den_ = d.convert_to<std::int64_t>();
            big_.reset();
        } else {
            num_ = 0;
            den_ = 1;
            big_ = std::make_unique<BigRational>(value);
        }
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    std::unique_ptr<BigRational> big_;
};

inline Rational Rational::parse(std::string_view text) {
    const std::string_view s = detail::trim(text);
    if (s.empty())
        throw ParseError("empty number");
    const auto bad = [&] { return ParseError("not a rational number: '" + std::string(s) + "'"); };

    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        std::string_view num = detail::trim(s.substr(0, slash));
        std::string_view den = detail::trim(s.substr(slash + 1));
        bool negative = false;
        if (!num.empty() && (num.front() == '-' || num.front() == '+')) {
            negative = num.front() == '-';
            num.remove_prefix(1);
        }
        if (!detail::all_digits(num) || !detail::all_digits(den))
            throw bad();
        const BigInt d = detail::parse_decimal(den);
        if (d == 0)
            throw ParseError("zero denominator in '" + std::string(s) + "'");
        BigInt n = detail::parse_decimal(num);
        if (negative)
            n = -n;
        return Rational(BigRational(n, d));
    }

    std::string_view rest = s;
    bool negative = false;
    if (rest.front() == '-' || rest.front() == '+') {
        negative = rest.front() == '-';
        rest.remove_prefix(1);
    }
    long long exponent = 0;
    if (const auto e = rest.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp = rest.substr(e + 1);
        rest = rest.substr(0, e);
        bool exp_negative = false;
        if (!exp.empty() && (exp.front() == '-' || exp.front() == '+')) {
            exp_negative = exp.front() == '-';
            exp.remove_prefix(1);
        }
        if (!detail::all_digits(exp) || exp.size() > 6)
            throw bad();
        exponent = std::stoll(std::string{exp});
        if (exp_negative)
            exponent = -exponent;
    }
    std::string digits;
    if (const auto dot = rest.find('.'); dot != std::string_view::npos) {
        const std::string_view whole = rest.substr(0, dot);
        const std::string_view frac = rest.substr(dot + 1);
        if ((!whole.empty() && !detail::all_digits(whole)) || (!frac.empty() && !detail::all_digits(frac)) ||
            (whole.empty() && frac.empty()))
            throw bad();
        digits = std::string{whole} + std::string{frac};
        exponent -= static_cast<long long>(frac.size());
    } else {
        if (!detail::all_digits(rest))
            throw bad();
        digits = std::string{rest};
    }
    BigInt n = detail::parse_decimal(digits);
    if (negative)
        n = -n;
    BigInt scale = 1;
    for (long long i = 0; i < (exponent < 0 ? -exponent : exponent); ++i)
        scale *= 10;
    return exponent < 0 ? Rational(BigRational(n, scale)) : Rational(BigRational(n * scale));
}

inline std::strong_ordering rational_cmp(const Rational& a, const Rational& b) { return a <=> b; }

inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }

/// Element of the prime field F_p.
class ModP {
public:
    ModP() noexcept = default;
    ModP(std::uint64_t residue, std::uint64_t modulus) noexcept : residue_(residue % modulus), modulus_(modulus) {}

    std::uint64_t residue() const noexcept { return residue_; }
    std::uint64_t modulus() const noexcept { return modulus_; }
    bool is_zero() const noexcept { return residue_ == 0; }

    ModP inverse() const {
        if (residue_ == 0)
            throw DivisionByZero();
        // extended Euclid on (residue, p)
        detail::i128 r0 = modulus_, r1 = residue_, t0 = 0, t1 = 1;
        while (r1 != 0) {
            const detail::i128 q = r0 / r1;
            std::tie(r0, r1) = std::pair{r1, r0 - q * r1};
            std::tie(t0, t1) = std::pair{t1, t0 - q * t1};
        }
        if (t0 < 0)
            t0 += modulus_;
        return {static_cast<std::uint64_t>(t0), modulus_};
    }

    ModP operator-() const noexcept { return {residue_ == 0 ? 0 : modulus_ - residue_, modulus_}; }

    friend ModP operator+(ModP a, ModP b) noexcept {
        assert(a.modulus_ == b.modulus_);
        const detail::u128 s = detail::u128(a.residue_) + b.residue_;
        return {static_cast<std::uint64_t>(s % a.modulus_), a.modulus_};
    }
    friend ModP operator-(ModP a, ModP b) noexcept { return a + (-b); }
    friend ModP operator*(ModP a, ModP b) noexcept {
        assert(a.modulus_ == b.modulus_);
        const detail::u128 p = detail::u128(a.residue_) * b.residue_;
        return {static_cast<std::uint64_t>(p % a.modulus_), a.modulus_};
    }
    friend ModP operator/(ModP a, ModP b) { return a * b.inverse(); }

    ModP& operator+=(ModP o) noexcept { return *this = *this + o; }
    ModP& operator-=(ModP o) noexcept { return *this = *this - o; }
    ModP& operator*=(ModP o) noexcept { return *this = *this * o; }

    friend bool operator==(ModP a, ModP b) noexcept { return a.residue_ == b.residue_; }

    std::string to_string() const { return std::to_string(residue_); }
    friend std::ostream& operator<<(std::ostream& os, ModP x) { return os << x.residue_; }

private:
    std::uint64_t residue_ = 0;
    std::uint64_t modulus_ = 0;
};

/// Deterministic Miller-Rabin for 64-bit integers.
inline bool is_prime(std::uint64_t n) noexcept {
    if (n < 2)
        return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0)
            return n == p;
    }
    const auto mulmod = [n](std::uint64_t a, std::uint64_t b) {
        return static_cast<std::uint64_t>(detail::u128(a) * b % n);
    };
    const auto powmod = [&](std::uint64_t a, std::uint64_t e) {
        std::uint64_t r = 1;
        for (; e != 0; e >>= 1, a = mulmod(a, a))
            if (e & 1)
                r = mulmod(r, a);
        return r;
    };
    std::uint64_t d = n - 1;
    int s = 0;
    for (; (d & 1) == 0; d >>= 1)
        ++s;
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod(a, d);
        if (x == 1 || x == n - 1)
            continue;
        bool composite = true;
        for (int i = 1; i < s && composite; ++i) {
            x = mulmod(x, x);
            composite = x != n - 1;
        }
        if (composite)
            return false;
    }
    return true;
}

/// Coefficients in Q.
struct RationalField {
    using Scalar = Rational;

    Scalar zero() const { return {}; }
    Scalar one() const { return 1; }
    Scalar from_int(long long v) const { return v; }
    std::string name() const { return "Q"; }

    friend bool operator==(const RationalField&, const RationalField&) = default;
};

/// Coefficients in F_p.
class PrimeField {
public:
    using Scalar = ModP;

    explicit PrimeField(std::uint64_t p) : p_(p) {
        if (!is_prime(p))
            throw PreconditionError("field modulus " + std::to_string(p) + " is not prime");
    }

    std::uint64_t modulus() const noexcept { return p_; }
    Scalar zero() const { return {0, p_}; }
    Scalar one() const { return {1, p_}; }
    Scalar from_int(long long v) const {
        detail::i128 r = detail::i128(v) % detail::i128(p_);
        if (r < 0)
            r += p_;
        return {static_cast<std::uint64_t>(r), p_};
    }
    std::string name() const { return "Fp:" + std::to_string(p_); }

    friend bool operator==(const PrimeField&, const PrimeField&) = default;

private:
    std::uint64_t p_;
};

template <class F>
concept CoefficientField = requires(const F& f, const typename F::Scalar& a, long long n) {
    { f.zero() } -> std::same_as<typename F::Scalar>;
    { f.one() } -> std::same_as<typename F::Scalar>;
    { f.from_int(n) } -> std::same_as<typename F::Scalar>;
    { f.name() } -> std::convertible_to<std::string>;
    { a + a } -> std::convertible_to<typename F::Scalar>;
    { a - a } -> std::convertible_to<typename F::Scalar>;
    { a * a } -> std::convertible_to<typename F::Scalar>;
    { -a } -> std::convertible_to<typename F::Scalar>;
    { a.inverse() } -> std::convertible_to<typename F::Scalar>;
    { a.is_zero() } -> std::convertible_to<bool>;
    { a == a } -> std::convertible_to<bool>;
};

template <CoefficientField F>
typename F::Scalar field_inverse(const typename F::Scalar& x) {
    return x.inverse();
}

inline Rational field_inverse(const Rational& x) { return x.inverse(); }
inline ModP field_inverse(const ModP& x) { return x.inverse(); }

using AnyField = std::variant<RationalField, PrimeField>;

/// "Q" or "Fp:<p>" (also accepts "Fp<p>" and "F<p>").
inline AnyField parse_field(std::string_view text) {
    const std::string_view s = detail::trim(text);
    if (s == "Q" || s == "q")
        return RationalField{};
    std::string_view digits;
    if (s.starts_with("Fp:"))
        digits = s.substr(3);
    else if (s.starts_with("Fp"))
        digits = s.substr(2);
    else if (s.starts_with("F"))
        digits = s.substr(1);
    if (!detail::all_digits(digits) || digits.size() > 19)
        throw ParseError("unknown coefficient field '" + std::string(s) + "' (expected Q or Fp:<prime>)");
    return PrimeField(std::stoull(std::string{digits}));
}

inline std::string field_name(const AnyField& f) {
    return std::visit([](const auto& x) { return x.name(); }, f);
}

} // namespace mpers
