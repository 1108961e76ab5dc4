#pragma once

#include <gmpxx.h>

#include <map>
#include <vector>

#include "asep/distribution.hpp"
#include "asep/ring.hpp"

namespace asep {

/// Off-diagonal generator entry: rate = ones + qs * q.
struct Transition {
    std::size_t to;
    unsigned ones;
    unsigned qs;
};

/// Generator of the multi-type ASEP on Z_L restricted to fixed counts.
/// Rates are kept as (ones, qs) multiplicities so one structure serves every q.
struct GeneratorMatrix {
    ParticleCounts counts;
    std::vector<RingConfig> states;  // lexicographic order
    std::vector<std::vector<Transition>> out;

    std::size_t size() const { return states.size(); }
    std::size_t index_of(const RingConfig& c) const;
};

inline constexpr std::size_t kDefaultStateCap = 100000;
inline constexpr std::size_t kSymbolicStateCap = 120;

GeneratorMatrix build_generator(const ParticleCounts& counts, std::size_t cap = kDefaultStateCap);

/// Fraction-free elimination at rational q.
Distribution<mpq_class> solve_stationary_exact(const GeneratorMatrix& g, const mpq_class& q);
/// Fraction-free elimination over Z[q], then back-substitution over Q(q).
Distribution<QRational> solve_stationary_symbolic(const GeneratorMatrix& g,
                                                  std::size_t cap = kSymbolicStateCap);
/// Dense LU.
Distribution<double> solve_stationary_float(const GeneratorMatrix& g, double q);

/// max_i |(pi G)_i| at rational q; zero for a stationary vector.
mpq_class balance_residual(const GeneratorMatrix& g, const Distribution<mpq_class>& pi, const mpq_class& q);

/// p * denom for every state. Throws std::domain_error if one is not a polynomial.
Distribution<QPoly> clear_denominator(const Distribution<QRational>& d, const QPoly& denom);
/// The same polynomials without a symbolic solve: exact solves at deg(denom) + 1
/// points are interpolated (numerators cannot exceed deg(denom) by the q <-> 1/q
/// symmetry) and the result is confirmed at two further points. Throws
/// std::domain_error if the confirmation fails.
Distribution<QPoly> clear_denominator_interpolated(const GeneratorMatrix& g, const QPoly& denom);
/// One value per rotation class, sorted. Throws std::domain_error if a class is not constant.
std::vector<QPoly> rotation_class_values(const Distribution<QPoly>& d);

}  // namespace asep
