#include "asep/ring.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace asep {

std::size_t ParticleCounts::total() const {
    return std::accumulate(k.begin(), k.end(), std::size_t{0});
}

std::size_t ParticleCounts::prefix(std::size_t n) const {
    if (n > k.size()) throw std::out_of_range("prefix: type out of range");
    return std::accumulate(k.begin(), k.begin() + static_cast<long>(n), std::size_t{0});
}

void ParticleCounts::validate() const {
    if (L == 0) throw std::invalid_argument("ring size must be positive");
    if (total() > L) throw std::invalid_argument("more particles than sites");
}

RingConfig::RingConfig(std::vector<Type> sites) : sites_(std::move(sites)) {
    for (Type t : sites_) {
        if (t == 0) throw std::invalid_argument("type 0 is not a valid symbol");
        if (!is_hole(t)) N_ = std::max(N_, t);
    }
}

RingConfig::RingConfig(std::vector<Type> sites, Type num_types)
    : sites_(std::move(sites)), N_(num_types) {
    for (Type t : sites_) {
        if (t == 0 || (!is_hole(t) && t > N_))
            throw std::invalid_argument("symbol outside {1..N, inf}");
    }
}

Type RingConfig::at_cyclic(long i) const {
    const long L = static_cast<long>(sites_.size());
    return sites_[static_cast<std::size_t>(((i % L) + L) % L)];
}

RingConfig project(const RingConfig& c, Type n) {
    if (n < 1 || n > c.num_types()) throw std::out_of_range("project: threshold out of range");
    std::vector<Type> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i] <= n ? 1 : kHole;
    return RingConfig(std::move(out), 1);
}

RingConfig rotate(const RingConfig& c, long s) {
    std::vector<Type> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c.at_cyclic(static_cast<long>(i) + s);
    return RingConfig(std::move(out), c.num_types());
}

ParticleCounts particle_counts(const RingConfig& c) {
    ParticleCounts pc;
    pc.L = c.size();
    pc.k.assign(c.num_types(), 0);
    for (Type t : c.sites())
        if (!is_hole(t)) ++pc.k[t - 1];
    return pc;
}

RingConfig canonical_rotation(const RingConfig& c) {
    RingConfig best = c;
    for (std::size_t s = 1; s < c.size(); ++s) best = std::min(best, rotate(c, static_cast<long>(s)));
    return best;
}

std::vector<RingConfig> enumerate_configs(const ParticleCounts& counts) {
    counts.validate();
    std::vector<Type> v;
    v.reserve(counts.L);
    for (std::size_t n = 0; n < counts.k.size(); ++n) v.insert(v.end(), counts.k[n], static_cast<Type>(n + 1));
    v.insert(v.end(), counts.holes(), kHole);
    std::vector<RingConfig> out;
    const Type N = static_cast<Type>(counts.k.size());
    do {
        out.emplace_back(v, N);
    } while (std::next_permutation(v.begin(), v.end()));
    return out;
}

std::size_t config_count(const ParticleCounts& counts) {
    // product of binomials C(remaining, k_n), each step exact
    std::size_t result = 1, remaining = counts.L;
    auto binom = [](std::size_t n, std::size_t r) {
        std::size_t b = 1;
        for (std::size_t i = 1; i <= r; ++i) b = b * (n - r + i) / i;
        return b;
    };
    for (std::size_t kn : counts.k) {
        result *= binom(remaining, kn);
        remaining -= kn;
    }
    return result;
}

ParticleCounts reduce_full_ring(const ParticleCounts& counts) {
    ParticleCounts out = counts;
    if (!out.k.empty() && out.total() == out.L) out.k.pop_back();
    return out;
}

RingConfig relabel_top_as_hole(const RingConfig& c) {
    const Type N = c.num_types();
    if (N == 0) return c;
    std::vector<Type> v = c.sites();
    for (Type& t : v)
        if (t == N) t = kHole;
    return RingConfig(std::move(v), N - 1);
}

long centered_index(std::size_t i, std::size_t L) {
    return static_cast<long>(i) - static_cast<long>(L / 2);
}

std::string type_to_string(Type t) { return is_hole(t) ? "inf" : std::to_string(t); }

Type type_from_string(const std::string& s) {
    if (s == "inf" || s == "∞") return kHole;
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad symbol: " + s);
    }
    if (pos != s.size() || v == 0 || v >= kHole) throw std::invalid_argument("bad symbol: " + s);
    return static_cast<Type>(v);
}

std::string to_string(const RingConfig& c) {
    std::string out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) out += ' ';
        out += type_to_string(c[i]);
    }
    return out;
}

RingConfig parse_config(const std::string& line) {
    std::istringstream in(line);
    std::vector<Type> v;
    std::string tok;
    while (in >> tok) v.push_back(type_from_string(tok));
    return RingConfig(std::move(v));
}

RingConfig parse_config(const std::string& line, Type num_types) {
    return RingConfig(parse_config(line).sites(), num_types);
}

std::string to_string(const WindowConfig& w) {
    std::string out = std::to_string(w.offset) + ":";
    for (Type t : w.sites) out += " " + type_to_string(t);
    return out;
}

std::vector<std::size_t> parse_counts(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw std::invalid_argument("empty item in counts");
        std::size_t value = 0, repeat = 1;
        const auto x = item.find('x');
        try {
            std::size_t pos = 0;
            const std::string head = item.substr(0, x);
            value = std::stoul(head, &pos);
            if (pos != head.size()) throw std::invalid_argument(item);
            if (x != std::string::npos) {
                const std::string tail = item.substr(x + 1);
                repeat = std::stoul(tail, &pos);
                if (pos != tail.size()) throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw std::invalid_argument("bad counts item: " + item);
        }
        out.insert(out.end(), repeat, value);
    }
    if (out.empty()) throw std::invalid_argument("empty counts");
    return out;
}

}  // namespace asep
