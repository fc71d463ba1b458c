#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "rsaplus/primes.hpp"

#include "oracles.hpp"

using namespace rsaplus;
using namespace rsaplus::primes;

TEST_CASE("is_probable_prime basics") {
    PrimalityConfig cfg;
    Rng rng(1);
    CHECK_FALSE(is_probable_prime(1, cfg, rng));
    CHECK(is_probable_prime(2, cfg, rng));
    CHECK(is_probable_prime(65537, cfg, rng));
    CHECK_FALSE(is_probable_prime(561, cfg, rng));  // Carmichael
    CHECK_FALSE(is_probable_prime(BigInt("3215031751"), cfg, rng));  // strong pseudoprime to 2,3,5,7
}

TEST_CASE("is_probable_prime agrees with trial division below 10^6") {
    PrimalityConfig cfg;
    Rng rng(2);
    for (std::uint64_t n = 1; n < 1000000; ++n)
        if (is_probable_prime(BigInt(static_cast<unsigned long>(n)), cfg, rng) !=
            oracles::trial_division_prime(n)) {
            CAPTURE(n);
            CHECK(false);
        }
}

TEST_CASE("random_prime_in") {
    PrimalityConfig cfg;
    Rng rng(3);
    SUBCASE("residue filter") {
        std::set<unsigned long> seen;
        for (int i = 0; i < 50; ++i) {
            BigInt p = random_prime_in(8, 16, not_1_mod_8, cfg, rng);
            seen.insert(p.get_ui());
        }
        CHECK(seen == std::set<unsigned long>{11, 13});
    }
    SUBCASE("singleton interval") { CHECK(random_prime_in(2, 2, nullptr, cfg, rng) == 2); }
    SUBCASE("no primes in range") {
        PrimalityConfig small = cfg;
        small.attempt_budget = 2000;
        CHECK_THROWS_AS(random_prime_in(24, 28, nullptr, small, rng), Exhausted);
    }
}

TEST_CASE("gen_prime_pair constraints hold across scales") {
    PrimalityConfig cfg;
    Rng rng(4);
    for (unsigned b : {3u, 8u, 64u, 256u}) {
        int draws = b <= 8 ? 100 : (b == 64 ? 100 : 20);
        for (int i = 0; i < draws; ++i) {
            auto [p, q] = gen_prime_pair(b, cfg, rng);
            CHECK(p >= pow2(b));
            CHECK(p <= pow2(b + 1));
            CHECK(q >= pow2(b + 2));
            CHECK(q <= pow2(b + 3));
            CHECK(4 * p <= q);
            CHECK(q <= 8 * p);
            CHECK(p != q);
            CHECK(mpz_fdiv_ui(p.get_mpz_t(), 8) != 1);
            CHECK(mpz_fdiv_ui(q.get_mpz_t(), 8) != 1);
            if (b == 3) {
                CHECK(is_probable_prime(p, cfg, rng));
                CHECK(is_probable_prime(q, cfg, rng));
            }
        }
    }
}

TEST_CASE("gen_prime_pair at b=3 stays in the enumerated admissible set") {
    PrimalityConfig cfg;
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        auto [p, q] = gen_prime_pair(3, cfg, rng);
        CHECK((p == 11 || p == 13));
        // admissible q: primes != 1 (mod 8) in [4p, 64]
        std::set<unsigned long> admissible;
        for (unsigned long c = mpz_get_ui(BigInt(4 * p).get_mpz_t()); c <= 64; ++c)
            if (oracles::trial_division_prime(c) && c % 8 != 1) admissible.insert(c);
        CHECK(admissible.count(q.get_ui()) == 1);
    }
}

TEST_CASE("gen_prime_pair bit-length gap at b=256") {
    PrimalityConfig cfg;
    Rng rng(6);
    auto [p, q] = gen_prime_pair(256, cfg, rng);
    auto gap = bit_length(q) - bit_length(p);
    CHECK(gap >= 2);
    CHECK(gap <= 3);
}

TEST_CASE("pick_ell1") {
    Rng rng(7);
    // phi(7*19) = 108 = 2^2 * 3^3: every odd prime <= 100 except 3 is admissible
    for (int i = 0; i < 200; ++i) {
        BigInt ell = pick_ell1(7, 19, rng);
        CHECK(ell != 2);
        CHECK(ell != 3);
        CHECK(mpz_odd_p(ell.get_mpz_t()));
        CHECK(ell <= 97);
        CHECK(BigInt(6 * 18) % ell != 0);
    }
}

TEST_CASE("pick_ell1 admits 3 when 3 divides neither p-1 nor q-1") {
    // p = 23, q = 107: p-1 = 22, q-1 = 106, both coprime with 3
    Rng rng(8);
    bool saw_3 = false;
    for (int i = 0; i < 500; ++i)
        if (pick_ell1(23, 107, rng) == 3) saw_3 = true;
    CHECK(saw_3);
}

TEST_CASE("generation is reproducible under a fixed seed") {
    PrimalityConfig cfg;
    Rng a(99), b(99);
    auto pa = gen_prime_pair(16, cfg, a);
    auto pb = gen_prime_pair(16, cfg, b);
    CHECK(pa.first == pb.first);
    CHECK(pa.second == pb.second);
    CHECK(pick_ell1(pa.first, pa.second, a) == pick_ell1(pb.first, pb.second, b));
}
