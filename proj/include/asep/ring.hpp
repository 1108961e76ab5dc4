#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace asep {

using Type = std::uint32_t;

/// Hole symbol. Sorts above every finite type.
inline constexpr Type kHole = std::numeric_limits<Type>::max();

inline bool is_hole(Type t) { return t == kHole; }

struct ParticleCounts {
    std::vector<std::size_t> k;  // k[n-1] = number of type-n particles
    std::size_t L = 0;

    std::size_t num_types() const { return k.size(); }
    std::size_t total() const;
    std::size_t holes() const { return L - total(); }
    /// k_1 + ... + k_n
    std::size_t prefix(std::size_t n) const;
    void validate() const;

    auto operator<=>(const ParticleCounts&) const = default;
};

class RingConfig {
public:
    RingConfig() = default;
    /// num_types defaults to the largest finite entry.
    explicit RingConfig(std::vector<Type> sites);
    RingConfig(std::vector<Type> sites, Type num_types);

    std::size_t size() const { return sites_.size(); }
    Type num_types() const { return N_; }
    Type operator[](std::size_t i) const { return sites_[i]; }
    Type at_cyclic(long i) const;
    const std::vector<Type>& sites() const { return sites_; }

    auto operator<=>(const RingConfig&) const = default;
    bool operator==(const RingConfig&) const = default;

private:
    std::vector<Type> sites_;
    Type N_ = 0;
};

struct WindowConfig {
    long offset = 0;
    std::vector<Type> sites;
};

/// Threshold projection: entries <= n become 1, everything else a hole.
RingConfig project(const RingConfig& c, Type n);

/// output_i = input_{(i+s) mod L}
RingConfig rotate(const RingConfig& c, long s);

ParticleCounts particle_counts(const RingConfig& c);

/// Smallest representative among all rotations.
RingConfig canonical_rotation(const RingConfig& c);

/// All configurations with the given counts, in lexicographic order.
std::vector<RingConfig> enumerate_configs(const ParticleCounts& counts);

/// Number of configurations with the given counts (multinomial).
std::size_t config_count(const ParticleCounts& counts);

/// When the particles fill the ring the last type plays the role of holes.
/// Returns counts with that type dropped, otherwise the input unchanged.
ParticleCounts reduce_full_ring(const ParticleCounts& counts);

/// Relabel the largest type as holes (companion of reduce_full_ring).
RingConfig relabel_top_as_hole(const RingConfig& c);

/// Site i on a ring of size L as an offset from the centre, in
/// [-floor(L/2), ceil(L/2)-1].
long centered_index(std::size_t i, std::size_t L);

std::string type_to_string(Type t);
Type type_from_string(const std::string& s);

/// "1 2 inf 2"
std::string to_string(const RingConfig& c);
RingConfig parse_config(const std::string& line);
RingConfig parse_config(const std::string& line, Type num_types);

std::string to_string(const WindowConfig& w);

/// "1,1,1,1" or "1x1000"; items may be mixed, e.g. "2x3,1".
std::vector<std::size_t> parse_counts(const std::string& text);

}  // namespace asep
