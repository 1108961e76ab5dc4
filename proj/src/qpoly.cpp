#include "asep/qpoly.hpp"

#include <algorithm>
#include <stdexcept>

namespace asep {

QPoly::QPoly(long c) {
    if (c != 0) c_.emplace_back(c);
}

QPoly::QPoly(const mpq_class& c) {
    if (c != 0) c_.push_back(c);
}

QPoly::QPoly(std::vector<mpq_class> coeffs) : c_(std::move(coeffs)) {
    for (auto& x : c_) x.canonicalize();
    trim();
}

QPoly QPoly::q_power(unsigned n) {
    std::vector<mpq_class> c(n + 1, mpq_class(0));
    c[n] = 1;
    return QPoly(std::move(c));
}

QPoly QPoly::one_minus_q_power(unsigned n) { return QPoly(1) - q_power(n); }

void QPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

int QPoly::degree() const { return c_.empty() ? kMinusInfinity : static_cast<int>(c_.size()) - 1; }

QPoly& QPoly::operator+=(const QPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), mpq_class(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
}

QPoly& QPoly::operator-=(const QPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), mpq_class(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
}

QPoly& QPoly::operator*=(const QPoly& o) {
    if (c_.empty() || o.c_.empty()) {
        c_.clear();
        return *this;
    }
    std::vector<mpq_class> r(c_.size() + o.c_.size() - 1, mpq_class(0));
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    }
    c_ = std::move(r);
    trim();
    return *this;
}

QPoly& QPoly::operator*=(const mpq_class& s) {
    if (s == 0) {
        c_.clear();
        return *this;
    }
    for (auto& x : c_) x *= s;
    return *this;
}

QPoly QPoly::operator-() const {
    QPoly r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

mpq_class QPoly::evaluate_at(const mpq_class& q) const {
    mpq_class acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * q + *it;
    return acc;
}

double QPoly::evaluate_at(double q) const {
    double acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * q + it->get_d();
    return acc;
}

bool QPoly::has_integer_coeffs() const {
    return std::all_of(c_.begin(), c_.end(), [](const mpq_class& x) { return x.get_den() == 1; });
}

bool QPoly::has_nonnegative_coeffs() const {
    return std::all_of(c_.begin(), c_.end(), [](const mpq_class& x) { return x >= 0; });
}

mpq_class QPoly::content() const {
    if (c_.empty()) return 0;
    mpz_class g = 0, l = 1;
    for (const auto& x : c_) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_num_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    }
    mpq_class r(g, l);
    r.canonicalize();
    return r;
}

QPoly QPoly::primitive_part() const {
    if (c_.empty()) return *this;
    QPoly r = *this;
    r *= mpq_class(1) / content();
    return r;
}

std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
    if (b.is_zero()) throw std::domain_error("division by the zero polynomial");
    std::vector<mpq_class> rem = a.coeffs();
    const auto& bc = b.coeffs();
    const std::size_t db = bc.size() - 1;
    if (rem.size() < bc.size()) return {QPoly(), a};
    std::vector<mpq_class> quot(rem.size() - db, mpq_class(0));
    const mpq_class lead_inv = mpq_class(1) / bc.back();
    for (std::size_t i = rem.size(); i-- > db;) {
        if (rem[i] == 0) continue;
        const mpq_class f = rem[i] * lead_inv;
        quot[i - db] = f;
        for (std::size_t j = 0; j <= db; ++j) rem[i - db + j] -= f * bc[j];
    }
    rem.resize(db);
    return {QPoly(std::move(quot)), QPoly(std::move(rem))};
}

QPoly exact_divide(const QPoly& a, const QPoly& b) {
    auto [quot, rem] = divmod(a, b);
    if (!rem.is_zero()) throw std::domain_error("exact_divide: nonzero remainder");
    return quot;
}

QPoly gcd(const QPoly& a, const QPoly& b) {
    if (a.is_zero() && b.is_zero()) throw std::domain_error("gcd of two zero polynomials");
    QPoly x = a.is_zero() ? a : a.primitive_part();
    QPoly y = b.is_zero() ? b : b.primitive_part();
    if (x.degree() < y.degree()) std::swap(x, y);
    while (!y.is_zero()) {
        QPoly r = divmod(x, y).second;
        x = std::move(y);
        y = r.is_zero() ? r : r.primitive_part();
    }
    x *= mpq_class(1) / x.leading();
    return x;
}

QPoly qint(long n) {
    if (n <= 0) throw std::invalid_argument("qint: n must be positive");
    return QPoly(std::vector<mpq_class>(static_cast<std::size_t>(n), mpq_class(1)));
}

QPoly qfact(long n) {
    if (n <= 0) throw std::invalid_argument("qfact: n must be positive");
    QPoly r(1);
    for (long i = 2; i <= n; ++i) r *= qint(i);
    return r;
}

mpz_class binomial(unsigned long n, unsigned long k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

QPoly denominator_formula(const ParticleCounts& counts) {
    if (counts.k.empty()) throw std::invalid_argument("denominator: no particle types");
    for (std::size_t kn : counts.k)
        if (kn == 0) throw std::invalid_argument("denominator: every k_n must be >= 1");
    counts.validate();
    mpz_class scalar = 1;
    QPoly poly(1);
    std::size_t K = 0;
    for (std::size_t n = 0; n < counts.k.size(); ++n) {
        K += counts.k[n];
        scalar *= binomial(counts.L, K);
        if (n >= 1) poly *= exact_divide(qfact(static_cast<long>(K)), qfact(static_cast<long>(counts.k[n])));
    }
    poly *= mpq_class(scalar);
    return poly;
}

QPoly common_denominator(const ParticleCounts& counts) {
    if (counts.k.empty()) throw std::invalid_argument("denominator: no particle types");
    ParticleCounts reduced = reduce_full_ring(counts);
    if (reduced.k.empty()) return QPoly(1);  // one type filling the ring
    return denominator_formula(reduced);
}

QRational::QRational(const QPoly& num, const QPoly& den) : num_(num), den_(den) {
    if (den_.is_zero()) throw std::domain_error("zero denominator");
    normalize();
}

void QRational::normalize() {
    if (num_.is_zero()) {
        den_ = QPoly(1);
        return;
    }
    if (den_.degree() > 0) {
        QPoly g = gcd(num_, den_);
        if (g.degree() > 0) {
            num_ = exact_divide(num_, g);
            den_ = exact_divide(den_, g);
        }
    }
    // integer coefficients, jointly primitive, positive leading denominator coefficient
    mpz_class l = 1, g = 0;
    for (const QPoly* p : {&num_, &den_})
        for (const auto& c : p->coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
    for (const QPoly* p : {&num_, &den_})
        for (const auto& c : p->coeffs()) {
            const mpz_class v = c.get_num() * (l / c.get_den());
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
        }
    mpq_class s(l, g);
    if (den_.leading() < 0) s = -s;
    num_ *= s;
    den_ *= s;
}

QRational& QRational::operator+=(const QRational& o) {
    if (den_ == o.den_) {
        num_ += o.num_;
    } else {
        num_ = num_ * o.den_ + o.num_ * den_;
        den_ *= o.den_;
    }
    normalize();
    return *this;
}

QRational& QRational::operator-=(const QRational& o) { return *this += -o; }

QRational& QRational::operator*=(const QRational& o) {
    num_ *= o.num_;
    den_ *= o.den_;
    normalize();
    return *this;
}

QRational& QRational::operator/=(const QRational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero rational function");
    num_ *= o.den_;
    den_ *= o.num_;
    normalize();
    return *this;
}

mpq_class QRational::evaluate_at(const mpq_class& q) const {
    const mpq_class d = den_.evaluate_at(q);
    if (d == 0) throw std::domain_error("denominator vanishes at evaluation point");
    return num_.evaluate_at(q) / d;
}

double QRational::evaluate_at(double q) const { return num_.evaluate_at(q) / den_.evaluate_at(q); }

std::string coeff_to_string(const mpq_class& c) { return c.get_str(); }

std::string to_string(const QPoly& p) {
    std::string out = "[";
    for (std::size_t i = 0; i < p.coeffs().size(); ++i) {
        if (i) out += ", ";
        out += coeff_to_string(p.coeffs()[i]);
    }
    if (p.is_zero()) out += "0";
    return out + "]";
}

std::string to_string(const QRational& r) { return to_string(r.num()) + " / " + to_string(r.den()); }

QPoly parse_qpoly(const std::string& text) {
    const auto open = text.find('['), close = text.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw std::invalid_argument("polynomial must look like [c0, c1, ...]");
    std::vector<mpq_class> c;
    std::string body = text.substr(open + 1, close - open - 1);
    std::size_t start = 0;
    while (start <= body.size()) {
        auto comma = body.find(',', start);
        if (comma == std::string::npos) comma = body.size();
        std::string item = body.substr(start, comma - start);
        item.erase(std::remove(item.begin(), item.end(), ' '), item.end());
        if (!item.empty()) c.push_back(parse_rational(item));
        start = comma + 1;
    }
    return QPoly(std::move(c));
}

std::string pretty(const QPoly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    for (std::size_t i = 0; i < p.coeffs().size(); ++i) {
        const mpq_class& c = p.coeffs()[i];
        if (c == 0) continue;
        const bool neg = c < 0;
        const mpq_class a = neg ? mpq_class(-c) : c;
        if (!out.empty()) out += neg ? " - " : " + ";
        else if (neg) out += "-";
        if (i == 0 || a != 1) out += a.get_str();
        if (i >= 1) out += "q";
        if (i >= 2) out += "^" + std::to_string(i);
    }
    return out;
}

mpq_class parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational");
    const auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            mpq_class r(mpz_class(text.substr(0, slash), 10), mpz_class(text.substr(slash + 1), 10));
            if (r.get_den() == 0) throw std::invalid_argument(text);
            r.canonicalize();
            return r;
        }
        const auto dot = text.find('.');
        if (dot == std::string::npos) return mpq_class(mpz_class(text, 10));
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        if (digits.empty() || digits == "-" || digits == "+") throw std::invalid_argument(text);
        if (digits[0] == '+') digits.erase(0, 1);
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, text.size() - dot - 1);
        mpq_class r(mpz_class(digits, 10), scale);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("cannot parse rational: " + text);
    }
}

}  // namespace asep
