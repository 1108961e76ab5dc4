#include "asep/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "asep/ctmc.hpp"
#include "asep/line.hpp"
#include "asep/matrix_product.hpp"
#include "asep/sampler.hpp"
#include "asep/stats.hpp"
#include "asep/weights.hpp"

#ifndef ASEP_VERSION
#define ASEP_VERSION "dev"
#endif

namespace asep {

std::string Manifest::serialize() const {
    std::string s;
    for (const auto& [k, v] : entries) s += k + "=" + v + "\n";
    return s;
}

Manifest Manifest::parse(const std::string& text) {
    Manifest m;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("manifest line without '=': " + line);
        m.entries[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return m;
}

std::vector<std::string> Manifest::argv() const {
    const auto it = entries.find("argv");
    if (it == entries.end()) throw std::invalid_argument("manifest has no argv entry");
    std::vector<std::string> out;
    std::istringstream is(it->second);
    for (std::string w; is >> w;) out.push_back(w);
    return out;
}

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Counts given as "1e6" or "1000000".
std::size_t parse_size(const std::string& s, const char* what) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw UsageError(std::string("bad ") + what + ": " + s);
    }
    if (pos != s.size() || v < 0 || v != std::floor(v) || v > 1e15) throw UsageError(std::string("bad ") + what + ": " + s);
    return static_cast<std::size_t>(v);
}

mpq_class parse_q(const std::string& s) {
    mpq_class q;
    try {
        q = parse_rational(s);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (q < 0 || q >= 1) throw UsageError("q must lie in [0,1)");
    return q;
}

OfferLaw law_for(const mpq_class& q) {
    try {
        return OfferLaw::from_rational(q);
    } catch (const std::invalid_argument&) {
        return OfferLaw(q.get_d());
    }
}

ParticleCounts parse_ring(std::size_t L, const std::string& counts) {
    ParticleCounts pc;
    try {
        pc = ParticleCounts{parse_counts(counts), L};
        pc.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    for (std::size_t k : pc.k)
        if (k == 0) throw UsageError("every count must be at least 1");
    return pc;
}

std::string join(const std::vector<std::string>& v, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
    return s;
}

/// Output stream: a file when --out is given, else the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::runtime_error("cannot open " + path);
        }
        os_ = file_ ? file_.get() : &fallback;
    }
    std::ostream& os() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

struct Common {
    std::string out_path, manifest_path;
    std::uint64_t seed = 1;
};

void write_manifest(const Common& c, const std::string& command, const std::vector<std::string>& args,
                    const std::map<std::string, std::string>& params) {
    std::string path = c.manifest_path;
    if (path.empty() && !c.out_path.empty()) path = c.out_path + ".manifest";
    if (path.empty()) return;
    Manifest m;
    m.entries = params;
    m.entries["command"] = command;
    m.entries["seed"] = std::to_string(c.seed);
    m.entries["version"] = ASEP_VERSION;
    m.entries["output"] = c.out_path.empty() ? "-" : c.out_path;
    m.entries["argv"] = join(args, " ");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write manifest " + path);
    f << m.serialize();
}

void add_common(CLI::App* app, Common& c, bool seeded) {
    app->add_option("--out", c.out_path, "Write output to this file instead of stdout");
    app->add_option("--manifest", c.manifest_path, "Manifest path (default: <out>.manifest when --out is given)");
    if (seeded) app->add_option("--seed", c.seed, "Random seed");
}

// ---------------------------------------------------------------------------

struct SampleOpts {
    Common common;
    std::size_t L = 0;
    std::string counts, q = "0", n = "1";
    bool diagrams = false;
};

int cmd_sample(const SampleOpts& o, std::ostream& out) {
    const ParticleCounts pc = parse_ring(o.L, o.counts);
    const mpq_class q = parse_q(o.q);
    const std::size_t n = parse_size(o.n, "--n");
    const OfferLaw law = law_for(q);
    Rng rng(o.common.seed);
    Sink sink(o.common.out_path, out);
    for (std::size_t i = 0; i < n; ++i) {
        if (o.diagrams) {
            sink.os() << "# sample " << i << '\n' << dump(sample_multitype(pc, law, rng));
        } else {
            sink.os() << to_string(sample_bottom(pc, law, rng)) << '\n';
        }
    }
    return kExitPass;
}

// ---------------------------------------------------------------------------

struct VerifyOpts {
    Common common;
    std::size_t L = 0;
    std::string counts, q, methods = "weights,matprod,oracle", n = "100000";
    bool symbolic = false;
    double alpha = 1e-3;
};

struct MethodResult {
    std::string name;
    std::string error;
    bool exact = false;
    std::optional<Distribution<mpq_class>> rational;
    std::optional<Distribution<QRational>> symbolic;
    std::optional<Distribution<double>> numeric;
    std::map<RingConfig, std::size_t> samples;
    std::size_t n = 0;
};

// lcm of the denominators, scaled to make every numerator integral
QPoly common_reduced_denominator(const Distribution<QRational>& d) {
    QPoly den(1);
    for (const auto& [c, p] : d) den = exact_divide(den * p.den(), gcd(den, p.den()));
    den = den.primitive_part();
    mpz_class scale = 1;
    for (const auto& [c, p] : d) {
        const QRational r = p * QRational(den);
        QPoly num = r.num();
        num *= mpq_class(1) / r.den().leading();
        for (const auto& co : num.coeffs()) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), co.get_den_mpz_t());
    }
    den *= mpq_class(scale);
    return den;
}

// c [a]_q^e ... when den splits into q-integers, else the expanded form
std::string describe(const QPoly& den) {
    QPoly rest = den;
    std::string factors;
    for (long j = std::max(den.degree() + 1, 2); j >= 2; --j) {
        const QPoly f = qint(j);
        while (rest.degree() >= f.degree()) {
            auto [quot, rem] = divmod(rest, f);
            if (!rem.is_zero()) break;
            factors = "(" + pretty(f) + ")" + factors;
            rest = quot;
        }
    }
    if (rest.degree() != 0) return pretty(den);
    return pretty(rest) + factors;
}

int cmd_verify(const VerifyOpts& o, std::ostream& out) {
    const ParticleCounts pc = parse_ring(o.L, o.counts);
    if (o.symbolic == !o.q.empty()) throw UsageError("give exactly one of --q and --symbolic");
    std::vector<std::string> names;
    {
        std::istringstream is(o.methods);
        for (std::string m; std::getline(is, m, ',');) {
            if (m != "mlq" && m != "weights" && m != "matprod" && m != "oracle") throw UsageError("unknown method: " + m);
            names.push_back(m);
        }
    }
    if (names.empty()) throw UsageError("no methods");
    const mpq_class q = o.symbolic ? mpq_class(0) : parse_q(o.q);
    const std::size_t n = parse_size(o.n, "--n");
    Sink sink(o.common.out_path, out);
    std::ostream& os = sink.os();
    os << std::setprecision(12);
    os << "system L=" << pc.L << " counts=" << o.counts << " q=" << (o.symbolic ? std::string("symbolic") : q.get_str()) << '\n';

    std::vector<MethodResult> results;
    for (const auto& name : names) {
        MethodResult r;
        r.name = name;
        try {
            if (name == "oracle") {
                const auto g = build_generator(pc);
                r.exact = true;
                if (o.symbolic)
                    r.symbolic = solve_stationary_symbolic(g);
                else
                    r.rational = solve_stationary_exact(g, q);
            } else if (name == "weights") {
                r.exact = true;
                if (o.symbolic)
                    r.symbolic = exact_departure_distribution(pc, SymbolicField{});
                else
                    r.rational = exact_departure_distribution(pc, RationalField{q});
            } else if (name == "matprod") {
                if (o.symbolic) {
                    r.exact = true;
                    r.symbolic = trace_distribution_exact(pc, SymbolicField{});
                } else {
                    const TraceTable t = trace_distribution(pc, q.get_d(), 1e-13);
                    Distribution<double> d;
                    for (const auto& [c, e] : t.entries) d[c] = e.normalized;
                    r.numeric = std::move(d);
                }
            } else {
                if (o.symbolic) throw UsageError("mlq needs a numeric --q");
                const OfferLaw law = law_for(q);
                Rng rng(o.common.seed);
                for (std::size_t i = 0; i < n; ++i) ++r.samples[sample_bottom(pc, law, rng)];
                r.n = n;
            }
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        os << "method " << name << ": ";
        if (!r.error.empty())
            os << "error: " << r.error << '\n';
        else if (r.n)
            os << r.n << " samples, " << r.samples.size() << " distinct states\n";
        else
            os << (r.symbolic ? r.symbolic->size() : r.rational ? r.rational->size() : r.numeric->size()) << " states\n";
        results.push_back(std::move(r));
    }

    bool pass = true;
    for (const auto& r : results) pass = pass && r.error.empty();

    auto as_double = [](const MethodResult& r) {
        if (r.numeric) return *r.numeric;
        return to_double(*r.rational);
    };
    for (std::size_t i = 0; i < results.size(); ++i)
        for (std::size_t j = i + 1; j < results.size(); ++j) {
            const MethodResult& a = results[i];
            const MethodResult& b = results[j];
            if (!a.error.empty() || !b.error.empty()) continue;
            if (a.n && b.n) continue;
            if (a.n || b.n) {
                const MethodResult& s = a.n ? a : b;
                const MethodResult& ref = a.n ? b : a;
                const ChiSquare c = chi_square_gof(s.samples, as_double(ref));
                const bool ok = c.p_value > o.alpha;
                pass = pass && ok;
                os << "chi2 " << s.name << " vs " << ref.name << ": statistic=" << c.statistic << " dof=" << c.dof
                   << " p=" << c.p_value << (ok ? " PASS" : " FAIL") << '\n';
            } else if (a.symbolic && b.symbolic) {
                const bool ok = *a.symbolic == *b.symbolic;
                pass = pass && ok;
                os << "equal " << a.name << " " << b.name << ": " << (ok ? "identical PASS" : "differ FAIL") << '\n';
            } else if (a.rational && b.rational) {
                const mpq_class tv = total_variation(*a.rational, *b.rational);
                const bool ok = tv == 0;
                pass = pass && ok;
                os << "tv " << a.name << " " << b.name << " = " << tv.get_str() << (ok ? " PASS" : " FAIL") << '\n';
            } else {
                const double tv = total_variation(as_double(a), as_double(b));
                const bool ok = tv < 1e-10;
                pass = pass && ok;
                os << "tv " << a.name << " " << b.name << " = " << tv << (ok ? " PASS" : " FAIL") << '\n';
            }
        }

    // symbolic tables: numerators by rotation class over the reduced denominator,
    // and the check that the product denominator clears every state
    for (const auto& r : results) {
        if (!r.symbolic) continue;
        const QPoly den = common_reduced_denominator(*r.symbolic);
        os << "denominator (" << r.name << "): " << describe(den) << '\n';
        for (const auto& v : rotation_class_values(clear_denominator(*r.symbolic, den))) os << "  " << pretty(v) << '\n';
        bool ok = true;
        try {
            for (const auto& [c, p] : clear_denominator(*r.symbolic, common_denominator(pc)))
                ok = ok && p.has_integer_coeffs() && p.has_nonnegative_coeffs();
        } catch (const std::domain_error&) {
            ok = false;
        }
        pass = pass && ok;
        os << "common denominator " << describe(common_denominator(pc)) << " clears every state: " << (ok ? "PASS" : "FAIL")
           << '\n';
        break;
    }
    os << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------

struct StatsOpts {
    Common common;
    std::string mode;
    double lambda = 0.3, mu = 0.6, alpha = 0.5, x = 0.5, z_max = 4, tol = 1e-12;
    std::string q = "0", sites = "1000000", n = "200", steps = "1000000", runs = "1";
    std::size_t L = 1000, window = 0, terms = 60, batches = 100;
};

int cmd_stats(const StatsOpts& o, std::ostream& out) {
    Rng rng(o.common.seed);
    Sink sink(o.common.out_path, out);
    std::ostream& os = sink.os();
    os << std::setprecision(10);
    const mpq_class q = parse_q(o.q);
    const double qd = q.get_d();
    bool pass = true;
    try {
        if (o.mode == "pairs") {
            const auto stats = pair_statistics(o.lambda, o.mu, qd, parse_size(o.sites, "--sites"), rng, o.batches);
            os << csv(stats);
            for (const auto& s : stats) pass = pass && std::fabs(s.z()) <= o.z_max;
        } else if (o.mode == "cluster") {
            const std::size_t w = o.window ? o.window : default_cluster_window(o.L);
            const auto e = ring_cluster_estimate(o.L, law_for(q), parse_size(o.n, "--n"), w, rng);
            os << csv({e.stat});
            os << "# window=" << e.window << " raw=" << e.raw << " correction=" << e.correction << '\n';
            pass = std::fabs(e.stat.z()) <= o.z_max;
        } else if (o.mode == "identity") {
            const auto c = q_series_identity_check(o.alpha, qd, static_cast<unsigned>(o.terms));
            os << "alpha,q,terms,lhs,rhs,residual,boundary\n"
               << o.alpha << ',' << qd << ',' << o.terms << ',' << c.lhs << ',' << c.rhs << ',' << c.residual << ','
               << c.boundary << '\n';
            pass = c.residual < o.tol;
        } else if (o.mode == "convoy") {
            const std::size_t steps = parse_size(o.steps, "--steps"), runs = parse_size(o.runs, "--runs");
            os << "run,steps,recorded,first\n";
            for (std::size_t r = 0; r < runs; ++r) {
                const auto u = convoy_walk(o.x, qd, steps, rng);
                os << r << ',' << steps << ',' << u.size() << ',' << (u.empty() ? 0 : u.front()) << '\n';
            }
        } else {
            throw UsageError("unknown mode: " + o.mode);
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------

struct DistOpts {
    Common common;
    std::size_t L = 0;
    std::string counts, q, method = "oracle";
    bool symbolic = false;
};

int cmd_distribution(const DistOpts& o, std::ostream& out) {
    const ParticleCounts pc = parse_ring(o.L, o.counts);
    if (o.symbolic == !o.q.empty()) throw UsageError("give exactly one of --q and --symbolic");
    Sink sink(o.common.out_path, out);
    std::ostream& os = sink.os();
    if (o.symbolic) {
        if (o.method == "oracle") dump(os, solve_stationary_symbolic(build_generator(pc)));
        else if (o.method == "weights") dump(os, exact_departure_distribution(pc, SymbolicField{}));
        else if (o.method == "matprod") dump(os, trace_distribution_exact(pc, SymbolicField{}));
        else throw UsageError("unknown method: " + o.method);
        return kExitPass;
    }
    const mpq_class q = parse_q(o.q);
    if (o.method == "oracle") dump(os, solve_stationary_exact(build_generator(pc), q));
    else if (o.method == "weights") dump(os, exact_departure_distribution(pc, RationalField{q}));
    else if (o.method == "matprod") os << report(trace_distribution(pc, q.get_d()));
    else throw UsageError("unknown method: " + o.method);
    return kExitPass;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-type ASEP on a ring: sampling, exact stationary laws, verification and line statistics", "asep"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ASEP_VERSION);

    SampleOpts so;
    auto* sample = app.add_subcommand("sample", "Draw bottom lines of multi-line diagrams");
    sample->add_option("--ring", so.L, "Ring size L")->required();
    sample->add_option("--counts", so.counts, "k1,...,kN or e.g. 1x1000")->required();
    sample->add_option("--q", so.q, "Asymmetry q in [0,1), as p/r or decimal");
    sample->add_option("--n", so.n, "Number of samples");
    sample->add_flag("--dump-diagrams", so.diagrams, "Write full diagrams instead of bottom lines");
    add_common(sample, so.common, true);

    VerifyOpts vo;
    auto* verify = app.add_subcommand("verify", "Compare stationary laws computed by several methods");
    verify->add_option("--L", vo.L, "Ring size")->required();
    verify->add_option("--counts", vo.counts, "k1,...,kN")->required();
    verify->add_option("--q", vo.q, "Asymmetry q in [0,1)");
    verify->add_flag("--symbolic", vo.symbolic, "Work in Q(q)");
    verify->add_option("--methods", vo.methods, "Comma list of mlq,weights,matprod,oracle");
    verify->add_option("--n", vo.n, "Samples for mlq");
    verify->add_option("--alpha", vo.alpha, "Significance level for the chi-square test");
    add_common(verify, vo.common, true);

    StatsOpts to;
    auto* stats = app.add_subcommand("stats", "Monte Carlo statistics against closed forms (CSV)");
    stats->add_option("--mode", to.mode, "cluster | pairs | identity | convoy")->required();
    stats->add_option("--q", to.q, "Asymmetry q in [0,1)");
    stats->add_option("--lambda", to.lambda, "pairs: first-class density");
    stats->add_option("--mu", to.mu, "pairs: service rate");
    stats->add_option("--sites", to.sites, "pairs: sites to emit");
    stats->add_option("--batches", to.batches, "pairs: batches for standard errors");
    stats->add_option("--L", to.L, "cluster: ring size");
    stats->add_option("--n", to.n, "cluster: ring samples");
    stats->add_option("--window", to.window, "cluster: label window (default 5% of L)");
    stats->add_option("--alpha", to.alpha, "identity: alpha");
    stats->add_option("--terms", to.terms, "identity: number of terms");
    stats->add_option("--tol", to.tol, "identity: residual tolerance");
    stats->add_option("--x", to.x, "convoy: label x in (0,1)");
    stats->add_option("--steps", to.steps, "convoy: walk length");
    stats->add_option("--runs", to.runs, "convoy: independent walks");
    stats->add_option("--z-max", to.z_max, "Largest accepted |z|");
    add_common(stats, to.common, true);

    DistOpts dopts;
    auto* dist = app.add_subcommand("distribution", "Print an exact or truncated stationary law");
    dist->add_option("--L", dopts.L, "Ring size")->required();
    dist->add_option("--counts", dopts.counts, "k1,...,kN")->required();
    dist->add_option("--q", dopts.q, "Asymmetry q in [0,1)");
    dist->add_flag("--symbolic", dopts.symbolic, "Work in Q(q)");
    dist->add_option("--method", dopts.method, "oracle | weights | matprod");
    add_common(dist, dopts.common, false);

    std::string manifest_file;
    auto* rerun = app.add_subcommand("rerun", "Run the command recorded in a manifest");
    rerun->add_option("manifest", manifest_file, "Manifest file")->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (*rerun) {
            std::ifstream f(manifest_file);
            if (!f) throw UsageError("cannot read " + manifest_file);
            std::stringstream ss;
            ss << f.rdbuf();
            return run_cli(Manifest::parse(ss.str()).argv(), out, err);
        }
        std::map<std::string, std::string> params;
        auto record = [&](CLI::App* sub) {
            for (const CLI::Option* opt : sub->get_options())
                if (opt->count() > 0 && opt->get_name() != "--help") params[opt->get_name().substr(2)] = opt->as<std::string>();
        };
        int code = kExitPass;
        if (*sample) {
            record(sample);
            write_manifest(so.common, "sample", args, params);
            code = cmd_sample(so, out);
        } else if (*verify) {
            record(verify);
            write_manifest(vo.common, "verify", args, params);
            code = cmd_verify(vo, out);
        } else if (*stats) {
            record(stats);
            write_manifest(to.common, "stats", args, params);
            code = cmd_stats(to, out);
        } else if (*dist) {
            record(dist);
            write_manifest(dopts.common, "distribution", args, params);
            code = cmd_distribution(dopts, out);
        }
        return code;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFail;
    }
}

}  // namespace asep
