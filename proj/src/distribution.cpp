#include "asep/distribution.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace asep {

namespace {

template <class A, class B>
void check_support(const Distribution<A>& d1, const Distribution<B>& d2) {
    if (d1.size() != d2.size()) throw std::invalid_argument("total_variation: mismatched supports");
    auto it = d2.begin();
    for (const auto& [c, p] : d1) {
        if (!(it->first == c)) throw std::invalid_argument("total_variation: mismatched supports");
        ++it;
    }
}

}  // namespace

mpq_class total_variation(const Distribution<mpq_class>& d1, const Distribution<mpq_class>& d2) {
    check_support(d1, d2);
    mpq_class s = 0;
    auto it = d2.begin();
    for (const auto& [c, p] : d1) s += abs(p - (it++)->second);
    return s / 2;
}

double total_variation(const Distribution<double>& d1, const Distribution<double>& d2) {
    check_support(d1, d2);
    double s = 0;
    auto it = d2.begin();
    for (const auto& [c, p] : d1) s += std::fabs(p - (it++)->second);
    return s / 2;
}

double total_variation(const Distribution<double>& d1, const Distribution<mpq_class>& d2) {
    return total_variation(d1, to_double(d2));
}

Distribution<double> to_double(const Distribution<mpq_class>& d) {
    Distribution<double> out;
    for (const auto& [c, p] : d) out.emplace(c, p.get_d());
    return out;
}

Distribution<mpq_class> evaluate_at(const Distribution<QRational>& d, const mpq_class& q) {
    Distribution<mpq_class> out;
    for (const auto& [c, p] : d) out.emplace(c, p.evaluate_at(q));
    return out;
}

void dump(std::ostream& os, const Distribution<mpq_class>& d) {
    for (const auto& [c, p] : d) os << to_string(c) << '\t' << p.get_str() << '\n';
}

void dump(std::ostream& os, const Distribution<QRational>& d) {
    for (const auto& [c, p] : d) os << to_string(c) << '\t' << to_string(p) << '\n';
}

void dump(std::ostream& os, const Distribution<double>& d) {
    char buf[64];
    for (const auto& [c, p] : d) {
        std::snprintf(buf, sizeof buf, "%.17g", p);
        os << to_string(c) << '\t' << buf << '\n';
    }
}

mpq_class RationalField::q_pow(unsigned n) const {
    mpq_class r;
    mpz_pow_ui(r.get_num_mpz_t(), q.get_num_mpz_t(), n);
    mpz_pow_ui(r.get_den_mpz_t(), q.get_den_mpz_t(), n);
    return r;
}

mpq_class RationalField::geometric(unsigned j) const {
    if (j == 0) throw std::domain_error("geometric sum with ratio 1 diverges");
    return mpq_class(1) / (mpq_class(1) - q_pow(j));
}

}  // namespace asep
