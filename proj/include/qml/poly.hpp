#pragma once

#include <string>
#include <vector>

#include "qml/rational.hpp"

namespace qml {

// Dense univariate polynomial in z over the rationals. The zero polynomial
// has degree -1. Coefficient vectors are kept free of trailing zeros so that
// equality is coefficient comparison.
class Poly {
public:
    Poly() = default;
    explicit Poly(Rational constant);
    explicit Poly(std::vector<Rational> coeffs);

    static Poly zero() { return Poly(); }
    static Poly one();
    // c * z^k
    static Poly monomial(long k, Rational c = Rational(1));

    bool is_zero() const { return c_.empty(); }
    long degree() const { return static_cast<long>(c_.size()) - 1; }
    // Degree of the lowest nonzero term; -1 for the zero polynomial.
    long order() const;
    Rational coeff(long k) const;
    const std::vector<Rational>& coeffs() const { return c_; }

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator-() const;
    Poly scaled(const Rational& s) const;
    // z^k * this (k >= 0)
    Poly shifted(long k) const;
    // this mod z^k (truncation; k <= 0 gives zero)
    Poly truncated(long k) const;
    // Exact division by z^k; throws if a lower coefficient is nonzero.
    Poly shifted_down(long k) const;
    bool divisible_by_zpow(long k) const;

    Rational eval(const Rational& x) const;

    bool operator==(const Poly& o) const { return c_ == o.c_; }
    bool operator!=(const Poly& o) const { return c_ != o.c_; }

    std::string str() const;

private:
    void strip();
    std::vector<Rational> c_;
};

// Parses expressions like "z^2+3*z-1/2" (sums of rational multiples of
// powers of z).
Poly parse_poly(const std::string& s);

Poly gcd(Poly a, Poly b);

}  // namespace qml
