#include "qml/rational.hpp"

namespace qml {

Rational parse_rational(const std::string& s) {
    if (s.empty())
        throw error("empty rational literal");
    mpq_class q;
    if (q.set_str(s, 10) != 0)
        throw error("bad rational literal: '" + s + "'");
    if (q.get_den() == 0)
        throw error("zero denominator in rational literal: '" + s + "'");
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& r) {
    return r.get_str();
}

long to_long(const Integer& z) {
    if (!z.fits_slong_p())
        throw error("integer out of range for report field: " + z.get_str());
    return z.get_si();
}

Integer binomial(long n, long k) {
    if (k < 0 || k > n)
        return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

}  // namespace qml
