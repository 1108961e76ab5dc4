#pragma once

#include <gmpxx.h>

#include <random>
#include <string>
#include <vector>

#include "asep/ring.hpp"
#include "asep/weights.hpp"

namespace asep {

using Rng = std::mt19937_64;

/// Offers are accepted independently with probability 1-q. Built from a
/// double (std::geometric_distribution) or from an exact q = num/den, in
/// which case each offer is an integer Bernoulli trial and the law is exact.
class OfferLaw {
public:
    explicit OfferLaw(double q);
    OfferLaw(unsigned long num, unsigned long den);
    static OfferLaw from_rational(const mpq_class& q);

    double q() const { return q_; }
    bool exact() const { return den_ != 0; }
    /// Number of rejected offers before the first acceptance.
    unsigned long rejections(Rng& rng) const;

private:
    double q_ = 0;
    unsigned long num_ = 0, den_ = 0;
};

/// One queue assignment: the type-n arrival at `from` departs at `to` after
/// `tours` complete passes around the remaining services.
struct Assignment {
    std::size_t from = 0;
    std::size_t to = 0;
    Type type = 1;
    unsigned long tours = 0;
};

struct AssignResult {
    std::vector<Assignment> edges;
    RingConfig D;
};

/// One step of the multi-line construction. A has types 1..N-1 (N-1 = A.num_types()),
/// S is a one-type configuration marking services. Arrivals are handled by type,
/// then left to right.
AssignResult assign_departures(const RingConfig& A, const RingConfig& S, const OfferLaw& law, Rng& rng);

/// b[i] is the number of offers the service at i rejects before accepting;
/// kNoMark at sites without service.
using Marks = std::vector<long>;
inline constexpr long kNoMark = -1;

Marks sample_marks(const RingConfig& S, const OfferLaw& law, Rng& rng);

/// Same procedure driven by fixed marks instead of fresh randomness.
AssignResult assign_with_marks(const RingConfig& A, const RingConfig& S, const Marks& b);

/// Q compatible with b at every service site and every level n.
bool compatible(const RingConfig& A, const RingConfig& S, const QueueProcess& Q, const Marks& b);

struct MinimalProcess {
    QueueProcess Q;
    RingConfig D;
};

/// Queue process built from the marks-driven assignment (occupancy intervals
/// plus one full-ring contribution per tour), lowered to the prefix-minimal one.
MinimalProcess qmin_from_marks(const RingConfig& A, const RingConfig& S, const Marks& b);

struct MultiLineDiagram {
    std::vector<RingConfig> lines;                 // line n has types 1..n
    std::vector<std::vector<Assignment>> edges;    // edges[n-2]: line n-1 -> line n
    const RingConfig& bottom() const { return lines.back(); }
};

/// Uniform K-subset of Z_L as a one-type configuration.
RingConfig uniform_subset(std::size_t L, std::size_t K, Rng& rng);

MultiLineDiagram sample_multitype(const ParticleCounts& counts, const OfferLaw& law, Rng& rng);
/// Bottom line only; no diagram is kept.
RingConfig sample_bottom(const ParticleCounts& counts, const OfferLaw& law, Rng& rng);

/// Lines in ring text format, then "assign n: i->j" per edge.
std::string dump(const MultiLineDiagram& d);

}  // namespace asep
