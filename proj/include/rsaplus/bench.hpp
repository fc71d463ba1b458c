#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rsaplus/bigint.hpp"
#include "rsaplus/keys.hpp"
#include "rsaplus/schemes.hpp"

namespace rsaplus::bench {

using keys::Scheme;

// Nanosecond clock, injectable so harness logic can be tested with a fake.
using Clock = std::function<std::uint64_t()>;

inline Clock steady_clock_ns() {
    return [] {
        return static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(
                std::chrono::steady_clock::now().time_since_epoch())
                .count());
    };
}

struct BenchConfig {
    unsigned keys = 20;
    unsigned msgs_per_key = 10;
    unsigned warmup = 3;  // untimed enc+dec pairs per scheme
    std::uint64_t seed = 1;
    schemes::ExponentProfile profile = schemes::ExponentProfile::production();
    primes::PrimalityConfig primality;
    Clock clock = steady_clock_ns();
};

struct SchemeTiming {
    Scheme scheme;
    double mean_ms = 0.0;  // one encryption and immediate decryption
};

struct BenchReport {
    unsigned bit_length = 0;
    std::vector<SchemeTiming> timings;
    unsigned keys = 0;
    unsigned msgs_per_key = 0;
    std::optional<double> ratio_rsaplus_rsa;
    std::optional<double> ratio_rsaplus_rabin;

    std::optional<double> mean_ms(Scheme s) const {
        for (const auto& t : timings)
            if (t.scheme == s) return t.mean_ms;
        return std::nullopt;
    }
};

namespace detail {

inline BigInt random_unit(const BigInt& n, Rng& rng) {
    for (;;) {
        BigInt m = rng.in_range(BigInt(2), n - 1);
        BigInt g;
        mpz_gcd(g.get_mpz_t(), m.get_mpz_t(), n.get_mpz_t());
        if (g == 1) return m;
    }
}

struct Trial {
    bool round_trip_ok = false;
    std::uint64_t elapsed_ns = 0;
};

inline Trial time_rsa(const keys::RsaKeyPair& key, const BigInt& m, const Clock& clock) {
    std::uint64_t t0 = clock();
    BigInt c = schemes::rsa_encrypt(m, key.public_key());
    BigInt back = schemes::rsa_decrypt(c, key);
    std::uint64_t t1 = clock();
    return {back == m, t1 - t0};
}

inline Trial time_rabin(const keys::RabinKeyPair& key, const BigInt& m, const Clock& clock) {
    std::uint64_t t0 = clock();
    BigInt c = schemes::rabin_encrypt(m, key.n);
    auto roots = schemes::rabin_decrypt(c, key);
    std::uint64_t t1 = clock();
    bool ok = std::find(roots.begin(), roots.end(), m) != roots.end();
    return {ok, t1 - t0};
}

inline Trial time_rsaplus(const keys::RsaPlusPrivateKey& priv, const BigInt& m,
                          const BenchConfig& cfg, Rng& rng, const Clock& clock) {
    const auto pub = priv.public_key();
    // Exponent sampling is part of the encryption cost by design.
    std::uint64_t t0 = clock();
    auto sample = schemes::sample_exponent(pub, schemes::ExponentMode::fast, cfg.profile,
                                           cfg.primality, rng);
    BigInt g;
    mpz_gcd(g.get_mpz_t(), sample.x.get_mpz_t(), priv.phi.get_mpz_t());
    if (g != 1)
        // Only detectable with the private key; at toy scale ell0 can divide
        // phi(n), so the harness discards the draw rather than failing.
        throw NoInvertibleRoot("time_rsaplus: sampled exponent not invertible mod phi(n)");
    auto ct = schemes::rsaplus_encrypt_with(m, pub.n, sample.x);
    auto candidates = schemes::rsaplus_decrypt(ct, priv);
    std::uint64_t t1 = clock();
    bool ok = std::any_of(candidates.begin(), candidates.end(),
                          [&m](const auto& cand) { return cand.m == m; });
    return {ok, t1 - t0};
}

}  // namespace detail

// Mean wall-clock enc+dec per scheme at each bit length; key generation is
// excluded from the timed sections. Any round-trip failure aborts the run.
inline std::vector<BenchReport> run_benchmark(const std::vector<unsigned>& bit_lengths,
                                              const std::set<Scheme>& which,
                                              const BenchConfig& cfg) {
    if (cfg.keys < 1 || cfg.msgs_per_key < 1)
        throw DomainError("run_benchmark: counts must be >= 1");
    std::vector<BenchReport> reports;
    Rng rng(cfg.seed);

    for (unsigned b : bit_lengths) {
        BenchReport report;
        report.bit_length = b;
        report.keys = cfg.keys;
        report.msgs_per_key = cfg.msgs_per_key;

        for (Scheme scheme : which) {
            std::uint64_t total_ns = 0;
            std::uint64_t trials = 0;

            for (unsigned ki = 0; ki < cfg.keys; ++ki) {
                std::optional<keys::RsaKeyPair> rsa_key;
                std::optional<keys::RabinKeyPair> rabin_key;
                std::optional<keys::RsaPlusPrivateKey> plus_key;
                BigInt n;
                if (scheme == Scheme::rsa) {
                    rsa_key = keys::keygen_rsa(b, cfg.primality, rng);
                    n = rsa_key->n;
                } else if (scheme == Scheme::rabin) {
                    rabin_key = keys::keygen_rabin(b, cfg.primality, rng);
                    n = rabin_key->n;
                } else {
                    plus_key = keys::keygen_rsaplus(b, cfg.primality, rng).second;
                    n = plus_key->n();
                }

                unsigned done = 0;
                unsigned warmups_left = (ki == 0) ? cfg.warmup : 0;
                while (done < cfg.msgs_per_key) {
                    BigInt m = detail::random_unit(n, rng);
                    detail::Trial trial;
                    try {
                        if (scheme == Scheme::rsa)
                            trial = detail::time_rsa(*rsa_key, m, cfg.clock);
                        else if (scheme == Scheme::rabin)
                            trial = detail::time_rabin(*rabin_key, m, cfg.clock);
                        else
                            trial = detail::time_rsaplus(*plus_key, m, cfg, rng, cfg.clock);
                    } catch (const NoInvertibleRoot&) {
                        continue;  // resample the trial
                    }
                    if (!trial.round_trip_ok)
                        throw DomainError("run_benchmark: round-trip verification failed");
                    if (warmups_left > 0) {
                        --warmups_left;
                        continue;
                    }
                    total_ns += trial.elapsed_ns;
                    ++trials;
                    ++done;
                }
            }
            report.timings.push_back(
                {scheme, static_cast<double>(total_ns) / static_cast<double>(trials) / 1e6});
        }

        auto plus = report.mean_ms(Scheme::rsaplus);
        auto rsa = report.mean_ms(Scheme::rsa);
        auto rabin = report.mean_ms(Scheme::rabin);
        if (plus && rsa && *rsa > 0) report.ratio_rsaplus_rsa = *plus / *rsa;
        if (plus && rabin && *rabin > 0) report.ratio_rsaplus_rabin = *plus / *rabin;
        reports.push_back(std::move(report));
    }
    return reports;
}

struct SamplerBench {
    double naive_ms = 0.0;
    double fast_ms = 0.0;
    double ratio = 0.0;  // naive / fast
};

// Micro-benchmark of the two exponent samplers on one key.
inline SamplerBench bench_samplers(unsigned b, unsigned samples, const BenchConfig& cfg) {
    Rng rng(cfg.seed);
    auto [pub, priv] = keys::keygen_rsaplus(b, cfg.primality, rng);
    (void)priv;
    SamplerBench out;
    for (unsigned mode = 0; mode < 2; ++mode) {
        std::uint64_t total = 0;
        for (unsigned i = 0; i < samples; ++i) {
            std::uint64_t t0 = cfg.clock();
            if (mode == 0)
                schemes::sample_exponent_naive(pub.n, cfg.primality, rng);
            else
                schemes::sample_exponent_fast(pub.n, pub.ell1, cfg.profile, cfg.primality, rng);
            total += cfg.clock() - t0;
        }
        double mean_ms = static_cast<double>(total) / samples / 1e6;
        (mode == 0 ? out.naive_ms : out.fast_ms) = mean_ms;
    }
    if (out.fast_ms > 0) out.ratio = out.naive_ms / out.fast_ms;
    return out;
}

namespace detail {

inline std::string fmt_ms(double ms) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3) << ms;
    return out.str();
}

}  // namespace detail

enum class ReportFormat { table, csv };

// Table mirrors the published layout (bit length | RSA+ | RSA | Rabin);
// CSV columns: bit_length, scheme, mean_ms, keys, msgs_per_key.
inline std::string emit_report(const std::vector<BenchReport>& reports, ReportFormat format) {
    if (reports.empty()) throw DomainError("emit_report: no reports");
    std::ostringstream out;
    if (format == ReportFormat::csv) {
        out << "bit_length,scheme,mean_ms,keys,msgs_per_key\n";
        for (const auto& r : reports)
            for (const auto& t : r.timings)
                out << r.bit_length << "," << scheme_name(t.scheme) << ","
                    << detail::fmt_ms(t.mean_ms) << "," << r.keys << "," << r.msgs_per_key << "\n";
        return out.str();
    }
    out << "bit length | RSA+ | RSA | Rabin\n";
    for (const auto& r : reports) {
        auto cell = [&r](Scheme s) {
            auto v = r.mean_ms(s);
            return v ? detail::fmt_ms(*v) : std::string("-");
        };
        out << r.bit_length << " | " << cell(Scheme::rsaplus) << " | " << cell(Scheme::rsa)
            << " | " << cell(Scheme::rabin) << "\n";
    }
    return out.str();
}

}  // namespace rsaplus::bench
