#pragma once

#include <gmpxx.h>

#include <map>
#include <ostream>
#include <string>

#include "asep/qpoly.hpp"
#include "asep/ring.hpp"

namespace asep {

/// State -> probability. Value is mpq_class (fixed rational q), QRational
/// (symbolic q) or double.
template <class V>
using Distribution = std::map<RingConfig, V>;

/// 1/2 sum |d1 - d2|. Throws std::invalid_argument on mismatched supports.
mpq_class total_variation(const Distribution<mpq_class>& d1, const Distribution<mpq_class>& d2);
double total_variation(const Distribution<double>& d1, const Distribution<double>& d2);
double total_variation(const Distribution<double>& d1, const Distribution<mpq_class>& d2);

Distribution<double> to_double(const Distribution<mpq_class>& d);
Distribution<mpq_class> evaluate_at(const Distribution<QRational>& d, const mpq_class& q);

/// Law of project(., n) under d.
template <class V>
Distribution<V> project_distribution(const Distribution<V>& d, Type n) {
    Distribution<V> out;
    for (const auto& [c, p] : d) {
        auto [it, inserted] = out.emplace(project(c, n), p);
        if (!inserted) it->second += p;
    }
    return out;
}

void dump(std::ostream& os, const Distribution<mpq_class>& d);
void dump(std::ostream& os, const Distribution<QRational>& d);
void dump(std::ostream& os, const Distribution<double>& d);

/// Value types used by the generic exact computations. Each field fixes how
/// q and the geometric sums 1/(1-q^j) are represented.
struct RationalField {
    using Value = mpq_class;
    mpq_class q;

    Value from_int(long v) const { return mpq_class(v); }
    Value from_rational(const mpq_class& v) const { return v; }
    Value from_qpoly(const QPoly& p) const { return p.evaluate_at(q); }
    Value q_pow(unsigned n) const;
    Value geometric(unsigned j) const;  // 1/(1-q^j), j >= 1
};

struct SymbolicField {
    using Value = QRational;

    Value from_int(long v) const { return QRational(v); }
    Value from_rational(const mpq_class& v) const { return QRational(v); }
    Value from_qpoly(const QPoly& p) const { return QRational(p); }
    Value q_pow(unsigned n) const { return QRational(QPoly::q_power(n)); }
    Value geometric(unsigned j) const { return QRational(QPoly(1), QPoly::one_minus_q_power(j)); }
};

}  // namespace asep
