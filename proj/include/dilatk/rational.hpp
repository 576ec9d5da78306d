#pragma once

// Exact rational scalars and 2d primitives. All geometric predicates in the
// toolkit are sign computations over these types; no floating point enters
// any decision.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dilatk {

using Rat = mpq_class;
using Int = mpz_class;

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};
struct IndexError : Error {
    explicit IndexError(const std::string& what) : Error(what) {}
};
struct BadParams : Error {
    explicit BadParams(const std::string& what) : Error(what) {}
};

inline Rat rat(long num, long den = 1) {
    if (den == 0) throw BadParams("rational with zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

// Parses "p", "p/q" or a decimal like "1.25" into an exact rational.
inline Rat rat_from_string(const std::string& s) {
    if (s.empty()) throw BadParams("empty rational literal");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den == 0) throw BadParams("zero denominator in '" + s + "'");
        Rat q(num, den);
        q.canonicalize();
        return q;
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        Int num(digits);
        Int den(1);
        for (size_t i = dot + 1; i < s.size(); ++i) den *= 10;
        Rat q(num, den);
        q.canonicalize();
        return q;
    }
    return Rat(Int(s));
}

inline std::string rat_to_string(const Rat& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline double rat_to_double(const Rat& q) { return q.get_d(); }

inline int sign(const Rat& q) { return sgn(q); }

struct Vec2 {
    Rat x, y;

    Vec2() : x(0), y(0) {}
    Vec2(Rat px, Rat py) : x(std::move(px)), y(std::move(py)) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(const Rat& s) const { return {x * s, y * s}; }
    Vec2 operator/(const Rat& s) const { return {x / s, y / s}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
    bool operator!=(const Vec2& o) const { return !(*this == o); }
    bool is_zero() const { return x == 0 && y == 0; }
};

inline Vec2 operator*(const Rat& s, const Vec2& v) { return {s * v.x, s * v.y}; }

inline Rat cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline Rat dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline Rat norm2(const Vec2& a) { return a.x * a.x + a.y * a.y; }

// > 0 iff (a, b, c) makes a left turn.
inline int orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    return sign(cross(b - a, c - a));
}

// Lexicographic order on (x, y); used for canonical orientations.
inline bool lex_less(const Vec2& a, const Vec2& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
}

// True iff a and b point the same way (positive multiples of each other).
inline bool same_direction(const Vec2& a, const Vec2& b) {
    return cross(a, b) == 0 && sign(dot(a, b)) > 0;
}
inline bool antiparallel(const Vec2& a, const Vec2& b) {
    return cross(a, b) == 0 && sign(dot(a, b)) < 0;
}

// Directions are non-zero vectors compared projectively with orientation.
// normalize_direction maps every positive ray representative to the unique
// primitive integer vector on it.
inline Vec2 normalize_direction(const Vec2& v) {
    if (v.is_zero()) throw BadParams("zero vector has no direction");
    Int nx = v.x.get_num() * v.y.get_den();
    Int ny = v.y.get_num() * v.x.get_den();
    Int g = gcd(abs(nx), abs(ny));
    if (g == 0) g = 1;
    return Vec2{Rat(nx / g), Rat(ny / g)};
}

// Strict total order on oriented directions for use in ordered containers.
inline bool direction_less(const Vec2& a, const Vec2& b) {
    Vec2 na = normalize_direction(a), nb = normalize_direction(b);
    return lex_less(na, nb);
}

// ccw angular test: is d strictly inside the wedge swept ccw from a to b?
// Requires the wedge to be proper: 0 < angle(a,b) < pi, i.e. cross(a,b) > 0.
inline bool strictly_inside_wedge(const Vec2& a, const Vec2& b, const Vec2& d) {
    return sign(cross(a, d)) > 0 && sign(cross(d, b)) > 0;
}

// Half-open membership d in (a, b] for a ccw wedge of angle < pi.
inline bool in_wedge_half_open(const Vec2& a, const Vec2& b, const Vec2& d) {
    if (same_direction(d, b)) return true;
    return strictly_inside_wedge(a, b, d);
}

struct Mat2 {
    // Row-major: [[a, b], [c, d]].
    Rat a, b, c, d;

    Mat2() : a(1), b(0), c(0), d(1) {}
    Mat2(Rat pa, Rat pb, Rat pc, Rat pd)
        : a(std::move(pa)), b(std::move(pb)), c(std::move(pc)), d(std::move(pd)) {}

    Rat det() const { return a * d - b * c; }

    Vec2 apply(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }

    Mat2 inverse() const {
        Rat dt = det();
        if (dt == 0) throw BadParams("singular matrix");
        return {d / dt, -b / dt, -c / dt, a / dt};
    }

    bool operator==(const Mat2& o) const {
        return a == o.a && b == o.b && c == o.c && d == o.d;
    }
};

// Affine map z -> a*z + b with positive real linear part: the structural
// group of dilation surfaces.
struct Aff {
    Rat a;
    Vec2 b;

    Aff() : a(1), b() {}
    Aff(Rat pa, Vec2 pb) : a(std::move(pa)), b(std::move(pb)) {
        if (sign(a) <= 0) throw BadParams("dilation map needs positive linear part");
    }

    Vec2 apply(const Vec2& v) const { return {a * v.x + b.x, a * v.y + b.y}; }
    Vec2 apply_vector(const Vec2& v) const { return {a * v.x, a * v.y}; }

    // (this o o)(z) = this(o(z))
    Aff compose(const Aff& o) const { return Aff{a * o.a, b + o.b * a}; }

    Aff inverse() const { return Aff{Rat(1) / a, Vec2{-b.x / a, -b.y / a}}; }

    bool is_identity() const { return a == 1 && b.is_zero(); }
};

// Square root of a rational if it is exactly rational.
inline std::optional<Rat> exact_sqrt(const Rat& q) {
    if (sign(q) < 0) return std::nullopt;
    Int num = q.get_num(), den = q.get_den();
    Int rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    if (rn * rn != num || rd * rd != den) return std::nullopt;
    return Rat(rn, rd);
}

// Multiplicative commensurability of positive rationals: exists p, q >= 1
// with a^p = b^q. Decided on factor exponent vectors; a == 1 or b == 1 only
// pairs with itself.
inline bool log_commensurable(const Rat& a, const Rat& b) {
    if (a == 1 || b == 1) return a == b;
    // Factor the integers involved; entries are small in this toolkit.
    auto factor_exponents = [](Rat v) {
        std::vector<std::pair<Int, long>> out;
        auto add = [&out](Int n, int s) {
            for (Int p = 2; p * p <= n;) {
                if (n % p == 0) {
                    long e = 0;
                    while (n % p == 0) { n /= p; ++e; }
                    out.emplace_back(p, s * e);
                }
                p += 1;
            }
            if (n > 1) out.emplace_back(n, s);
        };
        add(v.get_num(), +1);
        add(v.get_den(), -1);
        return out;
    };
    auto ea = factor_exponents(a), eb = factor_exponents(b);
    // sort by prime
    auto by_prime = [](const std::pair<Int, long>& l, const std::pair<Int, long>& r) {
        return l.first < r.first;
    };
    std::sort(ea.begin(), ea.end(), by_prime);
    std::sort(eb.begin(), eb.end(), by_prime);
    if (ea.size() != eb.size()) return false;
    // Need eb = (q/p) * ea componentwise for a single positive ratio.
    std::optional<std::pair<long, long>> ratio;  // (num, den) with eb*den == ea*num ... fixed below
    for (size_t i = 0; i < ea.size(); ++i) {
        if (ea[i].first != eb[i].first) return false;
        long x = ea[i].second, y = eb[i].second;
        if ((x == 0) != (y == 0)) return false;
        if (!ratio) {
            ratio = {y, x};
        } else {
            // require y/x constant: y * ratio.den == x * ratio.num
            if (static_cast<long long>(y) * ratio->second !=
                static_cast<long long>(x) * ratio->first)
                return false;
        }
    }
    if (!ratio) return true;
    // ratio must be positive: a^p = b^q with p,q positive integers.
    return (ratio->first > 0) == (ratio->second > 0);
}

}  // namespace dilatk
