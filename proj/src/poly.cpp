#include "qml/poly.hpp"

#include <cctype>
#include <sstream>

namespace qml {

Poly::Poly(Rational constant) {
    if (constant != 0)
        c_.push_back(std::move(constant));
}

Poly::Poly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) {
    strip();
}

Poly Poly::one() {
    return Poly(Rational(1));
}

Poly Poly::monomial(long k, Rational c) {
    if (k < 0)
        throw error("negative monomial exponent");
    if (c == 0)
        return Poly();
    std::vector<Rational> v(static_cast<size_t>(k) + 1, Rational(0));
    v.back() = std::move(c);
    return Poly(std::move(v));
}

void Poly::strip() {
    while (!c_.empty() && c_.back() == 0)
        c_.pop_back();
}

long Poly::order() const {
    for (size_t i = 0; i < c_.size(); ++i)
        if (c_[i] != 0)
            return static_cast<long>(i);
    return -1;
}

Rational Poly::coeff(long k) const {
    if (k < 0 || k >= static_cast<long>(c_.size()))
        return Rational(0);
    return c_[static_cast<size_t>(k)];
}

Poly Poly::operator+(const Poly& o) const {
    std::vector<Rational> v(std::max(c_.size(), o.c_.size()), Rational(0));
    for (size_t i = 0; i < c_.size(); ++i)
        v[i] = c_[i];
    for (size_t i = 0; i < o.c_.size(); ++i)
        v[i] += o.c_[i];
    return Poly(std::move(v));
}

Poly Poly::operator-(const Poly& o) const {
    return *this + (-o);
}

Poly Poly::operator-() const {
    std::vector<Rational> v(c_);
    for (auto& x : v)
        x = -x;
    return Poly(std::move(v));
}

Poly Poly::operator*(const Poly& o) const {
    if (is_zero() || o.is_zero())
        return Poly();
    std::vector<Rational> v(c_.size() + o.c_.size() - 1, Rational(0));
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0)
            continue;
        for (size_t j = 0; j < o.c_.size(); ++j)
            if (o.c_[j] != 0)
                v[i + j] += c_[i] * o.c_[j];
    }
    return Poly(std::move(v));
}

Poly Poly::scaled(const Rational& s) const {
    if (s == 0)
        return Poly();
    std::vector<Rational> v(c_);
    for (auto& x : v)
        x *= s;
    return Poly(std::move(v));
}

Poly Poly::shifted(long k) const {
    if (k < 0)
        throw error("negative shift");
    if (is_zero())
        return Poly();
    std::vector<Rational> v(static_cast<size_t>(k), Rational(0));
    v.insert(v.end(), c_.begin(), c_.end());
    return Poly(std::move(v));
}

Poly Poly::truncated(long k) const {
    if (k <= 0)
        return Poly();
    if (static_cast<long>(c_.size()) <= k)
        return *this;
    std::vector<Rational> v(c_.begin(), c_.begin() + k);
    return Poly(std::move(v));
}

bool Poly::divisible_by_zpow(long k) const {
    for (long i = 0; i < k && i < static_cast<long>(c_.size()); ++i)
        if (c_[static_cast<size_t>(i)] != 0)
            return false;
    return true;
}

Poly Poly::shifted_down(long k) const {
    if (!divisible_by_zpow(k))
        throw error("polynomial not divisible by z^" + std::to_string(k));
    if (static_cast<long>(c_.size()) <= k)
        return Poly();
    std::vector<Rational> v(c_.begin() + k, c_.end());
    return Poly(std::move(v));
}

Rational Poly::eval(const Rational& x) const {
    Rational acc(0);
    for (size_t i = c_.size(); i-- > 0;) {
        acc *= x;
        acc += c_[i];
    }
    return acc;
}

std::string Poly::str() const {
    if (is_zero())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (long k = degree(); k >= 0; --k) {
        const Rational& a = c_[static_cast<size_t>(k)];
        if (a == 0)
            continue;
        Rational mag = abs(a);
        if (first) {
            if (sgn(a) < 0)
                os << "-";
            first = false;
        } else {
            os << (sgn(a) < 0 ? "-" : "+");
        }
        if (k == 0) {
            os << mag.get_str();
        } else {
            if (mag != 1)
                os << mag.get_str() << "*";
            os << "z";
            if (k > 1)
                os << "^" << k;
        }
    }
    return os.str();
}

namespace {

// One term of the form [coef][*][z[^exp]].
struct TermParser {
    const std::string& s;
    size_t i = 0;

    explicit TermParser(const std::string& str) : s(str) {}

    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
            ++i;
    }

    bool done() {
        skip_ws();
        return i >= s.size();
    }

    std::string read_number() {
        skip_ws();
        size_t start = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
            ++i;
        if (i < s.size() && s[i] == '/') {
            ++i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
                ++i;
        }
        return s.substr(start, i - start);
    }

    Poly parse() {
        Poly result;
        skip_ws();
        while (!done()) {
            int sign = 1;
            skip_ws();
            while (i < s.size() && (s[i] == '+' || s[i] == '-')) {
                if (s[i] == '-')
                    sign = -sign;
                ++i;
                skip_ws();
            }
            if (done())
                throw error("dangling sign in polynomial: '" + s + "'");
            Rational coef(1);
            bool have_coef = false;
            if (std::isdigit(static_cast<unsigned char>(s[i]))) {
                coef = parse_rational(read_number());
                have_coef = true;
                skip_ws();
                if (i < s.size() && s[i] == '*') {
                    ++i;
                    skip_ws();
                }
            }
            long exp = 0;
            if (i < s.size() && s[i] == 'z') {
                ++i;
                exp = 1;
                skip_ws();
                if (i < s.size() && s[i] == '^') {
                    ++i;
                    skip_ws();
                    std::string e = read_number();
                    if (e.empty())
                        throw error("missing exponent in polynomial: '" + s + "'");
                    exp = std::stol(e);
                }
            } else if (!have_coef) {
                throw error("unexpected character in polynomial: '" + s + "'");
            }
            if (sign < 0)
                coef = -coef;
            result = result + Poly::monomial(exp, coef);
            skip_ws();
        }
        return result;
    }
};

}  // namespace

Poly parse_poly(const std::string& s) {
    TermParser p(s);
    if (p.done())
        throw error("empty polynomial literal");
    return p.parse();
}

Poly gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
        // Remainder of a by b.
        while (a.degree() >= b.degree() && !a.is_zero()) {
            Rational q = a.coeff(a.degree()) / b.coeff(b.degree());
            a = a - b.shifted(a.degree() - b.degree()).scaled(q);
        }
        std::swap(a, b);
    }
    if (!a.is_zero())
        a = a.scaled(1 / a.coeff(a.degree()));
    return a;
}

}  // namespace qml
