#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rsaplus/analysis.hpp"

using namespace rsaplus;
using namespace rsaplus::analysis;

namespace {

keys::RsaPlusPrivateKey toy_key() { return keys::make_rsaplus_private(7, 19, 5); }

}  // namespace

TEST_CASE("unique_decryption_probability") {
    CHECK(unique_decryption_probability({}) == 0);
    CHECK(unique_decryption_probability({BigInt(3)}) == mpq_class(1, 3));
    mpq_class expected(57, 105);
    expected.canonicalize();
    CHECK(unique_decryption_probability({BigInt(3), BigInt(5), BigInt(7)}) == expected);
    CHECK_THROWS_AS(unique_decryption_probability({BigInt(3), BigInt(3)}), DuplicatePrime);
}

TEST_CASE("unique_decryption_probability is monotone in the prime set") {
    std::vector<BigInt> primes;
    mpq_class prev(0);
    for (unsigned ell : {3u, 5u, 7u, 11u, 13u, 101u}) {
        primes.emplace_back(ell);
        mpq_class cur = unique_decryption_probability(primes);
        CHECK(cur >= prev);
        CHECK(cur <= 1);
        prev = cur;
    }
}

TEST_CASE("factor_odd_primes") {
    auto f = factor_odd_primes(BigInt(108));  // 2^2 * 3^3
    CHECK(f.complete);
    CHECK(f.odd_primes == std::vector<BigInt>{3});

    auto g = factor_odd_primes(BigInt(2) * 3 * 5 * 1000003);
    CHECK(g.complete);  // the leftover cofactor is certified prime
    CHECK(g.odd_primes == std::vector<BigInt>{3, 5, 1000003});

    // a composite cofactor above the bound cannot be split by trial division
    auto h = factor_odd_primes(BigInt(2) * 1000003 * 1000003, 1000);
    CHECK_FALSE(h.complete);
}

TEST_CASE("measure_decryption_multiplicity on the 7*19 fixture") {
    primes::PrimalityConfig cfg;
    Rng rng(1);
    auto report = measure_decryption_multiplicity(toy_key(), 10000, cfg, rng);
    CHECK(report.predicted == mpq_class(1, 3));
    CHECK(report.primes_used == std::vector<BigInt>{3});
    CHECK(report.factoring_complete);
    CHECK(report.trials == 10000);
    // For this fixed key the exact rate is 12/26: of the 26 admissible prime
    // exponents in (sqrt(133), 133), twelve have their partner odd root
    // divisible by 3. The product formula's 1/3 is the average over keys.
    double p = 12.0 / 26.0;
    double sigma = std::sqrt(p * (1 - p) / 10000.0);
    CHECK(std::abs(report.observed - p) <= 5 * sigma);
}

TEST_CASE("measure_decryption_multiplicity with a single trial") {
    primes::PrimalityConfig cfg;
    Rng rng(2);
    auto report = measure_decryption_multiplicity(toy_key(), 1, cfg, rng);
    CHECK((report.observed == 0.0 || report.observed == 1.0));
}

TEST_CASE("two-preimage rate complements the single-candidate rate") {
    primes::PrimalityConfig cfg;
    Rng r1(3), r2(3);
    auto report = measure_decryption_multiplicity(toy_key(), 2000, cfg, r1);
    double a = estimate_two_preimage_rate(toy_key(), 2000, cfg, r2);
    CHECK(a == doctest::Approx(1.0 - report.observed).epsilon(1e-12));
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
    CHECK(a == doctest::Approx(14.0 / 26.0).epsilon(0.1));
}

TEST_CASE("multiplicity report serialization") {
    MultiplicityReport r;
    r.predicted = mpq_class(1, 3);
    r.observed = 0.3341;
    r.trials = 10000;
    r.primes_used = {BigInt(3)};
    CHECK(multiplicity_report_json(r) ==
          "{\"predicted_num\": 1, \"predicted_den\": 3, \"observed\": 0.3341, "
          "\"trials\": 10000, \"primes\": [3]}");
    CHECK(multiplicity_report_table(r).find("1/3") != std::string::npos);
}

TEST_CASE("factor_from_two_roots") {
    auto [p, q] = factor_from_two_roots(13, 127, 133);
    CHECK(p == 7);
    CHECK(q == 19);
    auto [p2, q2] = factor_from_two_roots(2, 93, 133);
    CHECK(p2 == 7);
    CHECK(q2 == 19);
    CHECK_THROWS_AS(factor_from_two_roots(2, 131, 133), TrivialPair);
    CHECK_THROWS_AS(factor_from_two_roots(2, 2, 133), TrivialPair);
}

TEST_CASE("factor_from_two_roots succeeds for every nontrivial pair from sqrt_mod_n") {
    primes::PrimalityConfig cfg;
    Rng rng(4);
    for (int t = 0; t < 1000; ++t) {
        auto [pub, priv] = keys::keygen_rsaplus(4, cfg, rng);
        BigInt m;
        BigInt g;
        do {
            m = rng.in_range(BigInt(2), pub.n - 2);
            mpz_gcd(g.get_mpz_t(), m.get_mpz_t(), pub.n.get_mpz_t());
        } while (g != 1);
        auto roots = modarith::sqrt_mod_n((m * m) % pub.n, priv.p, priv.q);
        REQUIRE(roots.roots.size() == 4);
        // roots[0] and roots[1] are never negatives of each other
        auto [p, q] = factor_from_two_roots(roots.roots[0], roots.roots[1], pub.n);
        CHECK(p == std::min(priv.p, priv.q));
        CHECK(q == std::max(priv.p, priv.q));
    }
}

TEST_CASE("factor_from_exponent_multiple worked example") {
    Rng rng(5);
    // 13 * 25 - 1 = 324 = 3 * 108 = 3 * phi(133)
    auto [p, q] = factor_from_exponent_multiple(13, 25, 133, {}, rng);
    CHECK(p == 7);
    CHECK(q == 19);
}

TEST_CASE("factor_from_exponent_multiple rejects degenerate witnesses") {
    Rng rng(6);
    CHECK_THROWS_AS(factor_from_exponent_multiple(1, 1, 133, {}, rng), BadWitness);
    CHECK_THROWS_AS(factor_from_exponent_multiple(2, 4, 133, {}, rng), BadWitness);  // 7 is odd
}

TEST_CASE("factor_from_exponent_multiple succeeds on randomized toy keys") {
    primes::PrimalityConfig cfg;
    Rng rng(7);
    int ok = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        auto [pub, priv] = keys::keygen_rsaplus(4, cfg, rng);
        auto sample = schemes::sample_exponent_naive(pub.n, cfg, rng);
        BigInt y = sample.x % priv.phi;
        auto inv = modarith::mod_inv(y, priv.phi);
        if (!inv.ok) {
            --t;
            continue;
        }
        try {
            auto [p, q] = factor_from_exponent_multiple(y, inv.value, pub.n, {}, rng);
            if (p == std::min(priv.p, priv.q) && q == std::max(priv.p, priv.q)) ++ok;
        } catch (const DomainError&) {
        }
    }
    CHECK(ok >= trials * 99 / 100);
}

TEST_CASE("rsa_break_via_rsaplus_oracle") {
    primes::PrimalityConfig cfg;
    Rng rng(8);
    auto key = keys::keygen_rsa(10, cfg, rng);
    auto priv = keys::make_rsaplus_private(key.p, key.q, 5);
    OracleHandle oracle = [&priv](const BigInt& c, const BigInt& y) {
        std::vector<BigInt> out;
        for (const auto& cand : schemes::rsaplus_decrypt({c, y}, priv)) out.push_back(cand.m);
        return out;
    };

    SUBCASE("recovers random messages") {
        for (int i = 0; i < 50; ++i) {
            BigInt m, g;
            do {
                m = rng.in_range(BigInt(2), key.n - 1);
                mpz_gcd(g.get_mpz_t(), m.get_mpz_t(), key.n.get_mpz_t());
            } while (g != 1);
            BigInt c = schemes::rsa_encrypt(m, key.public_key());
            BigInt recovered = rsa_break_via_rsaplus_oracle(c, key.e, key.n, oracle);
            CHECK(recovered == m);
            CHECK(modarith::mod_pow(recovered, key.e, key.n) == c);
        }
    }

    SUBCASE("c = 1 recovers 1") {
        CHECK(rsa_break_via_rsaplus_oracle(1, key.e, key.n, oracle) == 1);
    }

    SUBCASE("corrupted oracle is rejected") {
        OracleHandle garbage = [](const BigInt&, const BigInt&) {
            return std::vector<BigInt>{BigInt(12345), BigInt(6789)};
        };
        BigInt c = schemes::rsa_encrypt(2, key.public_key());
        CHECK_THROWS_AS(rsa_break_via_rsaplus_oracle(c, key.e, key.n, garbage), OracleFailure);
    }
}

TEST_CASE("jacobi_leak_check") {
    CHECK(jacobi_leak_check(2, {79, 36}, 133));
    CHECK(modarith::jacobi(2, 133) == -1);
    CHECK(modarith::jacobi(79, 133) == -1);
    CHECK(jacobi_leak_check(1, {1, 36}, 133));
}
