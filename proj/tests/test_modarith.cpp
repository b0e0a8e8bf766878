#include <doctest.h>

#include "orbitsum/modarith.hpp"
#include "orbitsum/rng.hpp"
#include "oracles.hpp"

using namespace orbitsum;

TEST_CASE("PrimeModulus validates its argument") {
  CHECK_NOTHROW(PrimeModulus(5));
  CHECK_NOTHROW(PrimeModulus(7));
  CHECK_NOTHROW(PrimeModulus(1000003));
  CHECK_NOTHROW(PrimeModulus(2305843009213693951ull));  // 2^61 - 1
  CHECK_THROWS_AS(PrimeModulus(2), InvalidModulus);
  CHECK_THROWS_AS(PrimeModulus(3), InvalidModulus);
  CHECK_THROWS_AS(PrimeModulus(4), InvalidModulus);
  CHECK_THROWS_AS(PrimeModulus(9), InvalidModulus);
  CHECK_THROWS_AS(PrimeModulus(1), InvalidModulus);
  CHECK_THROWS_AS(PrimeModulus(0), InvalidModulus);
  CHECK_THROWS_AS(PrimeModulus(u64(1) << 62), InvalidModulus);
}

TEST_CASE("deterministic primality agrees with trial division") {
  int primes = 0;
  for (u64 n = 0; n <= 5000; ++n) {
    CHECK(is_prime_u64(n) == oracle::is_prime_trial(n));
    primes += is_prime_u64(n);
  }
  CHECK(primes == 669);  // pi(5000)
  CHECK(is_prime_u64(2305843009213693951ull));
  CHECK_FALSE(is_prime_u64(2305843009213693951ull - 2));
}

TEST_CASE("mod_inv examples and involution") {
  PrimeModulus p7(7);
  CHECK(mod_inv(Residue(3, p7)).value() == 5);
  CHECK(mod_inv(Residue(1, p7)).value() == 1);

  PrimeModulus big(1000003);
  Residue a(123456, big);
  Residue b = mod_inv(a);
  CHECK((a * b).value() == 1);
  CHECK(b.value() == oracle::invmod(123456, 1000003));
  CHECK_THROWS_AS(mod_inv(Residue(0, p7)), ZeroInverse);
}

TEST_CASE("inverse is an involution: exhaustive small, randomized large") {
  for (u64 pv : {5ull, 11ull, 101ull}) {
    PrimeModulus p(pv);
    for (u64 a = 1; a < pv; ++a) {
      u64 b = p.inv(a);
      CHECK(p.mul(a, b) == 1);
      CHECK(p.inv(b) == a);
    }
  }
  PrimeModulus p(2305843009213693951ull);
  Rng rng(42);
  for (int i = 0; i < 10000; ++i) {
    u64 a = rng.uniform(1, p.value() - 1);
    u64 b = p.inv(a);
    CHECK(p.mul(a, b) == 1);
    CHECK(p.inv(b) == a);
  }
}

TEST_CASE("mod_pow examples, identities, Fermat") {
  PrimeModulus p101(101);
  CHECK(mod_pow(Residue(2, p101), 10).value() == 14);  // 1024 = 10*101 + 14
  PrimeModulus p(1000003);
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    u64 x = rng.uniform(1, p.value() - 1);
    CHECK(p.pow(x, 0) == 1);
    CHECK(p.pow(x, 1) == x);
    CHECK(p.pow(x, p.value() - 1) == 1);  // Fermat
    u64 e = rng.uniform(0, 1 << 20);
    CHECK(p.pow(x, e) == oracle::powmod(x, e, p.value()));
  }
  CHECK(p.pow(0, 0) == 1);
}

TEST_CASE("legendre symbol: examples, exhaustive squares oracle, multiplicativity") {
  PrimeModulus p7(7);
  CHECK(legendre(Residue(0, p7)) == 0);
  CHECK(legendre(Residue(2, p7)) == 1);   // squares mod 7: {1,2,4}
  CHECK(legendre(Residue(3, p7)) == -1);

  for (u64 pv : {5ull, 7ull, 11ull, 101ull}) {
    PrimeModulus p(pv);
    std::vector<bool> is_square(pv, false);
    for (u64 x = 1; x < pv; ++x) is_square[p.mul(x, x)] = true;
    for (u64 a = 1; a < pv; ++a)
      CHECK(p.legendre(a) == (is_square[a] ? 1 : -1));
    for (u64 a = 1; a < pv; ++a)
      for (u64 b = 1; b < pv; ++b)
        CHECK(p.legendre(a) * p.legendre(b) == p.legendre(p.mul(a, b)));
  }
}

TEST_CASE("factorize: examples and exhaustive roundtrip") {
  CHECK(factorize(12) == std::vector<PrimePower>{{2, 2}, {3, 1}});
  CHECK(factorize(1).empty());
  CHECK(factorize(10403) == std::vector<PrimePower>{{101, 1}, {103, 1}});

  for (u64 n = 1; n <= 100000; ++n) {
    auto f = factorize(n);
    CHECK(factorization_product(f) == n);
  }
  // primality + ordering on a sample, against trial division
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    u64 n = rng.uniform(2, 100000);
    auto f = factorize(n);
    u64 prev = 0;
    for (const auto& pp : f) {
      CHECK(pp.prime > prev);
      CHECK(oracle::is_prime_trial(pp.prime));
      prev = pp.prime;
    }
    CHECK(factorization_product(f) == n);
  }
}

TEST_CASE("factorize splits large semiprimes deterministically") {
  u64 n = 1000003ull * 1000033ull;
  auto f = factorize(n);
  REQUIRE(f.size() == 2);
  CHECK(f[0] == PrimePower{1000003, 1});
  CHECK(f[1] == PrimePower{1000033, 1});
  auto again = factorize(n);
  CHECK(f == again);
  CHECK_THROWS_AS(factorize(0), OutOfRange);
}

TEST_CASE("Residue arithmetic and modulus mismatch") {
  PrimeModulus p5(5), p7(7);
  Residue a(3, p5), b(4, p5);
  CHECK((a + b).value() == 2);
  CHECK((a - b).value() == 4);
  CHECK((a * b).value() == 2);
  CHECK((a / b).value() == 2);  // 3 * inv(4) = 3*4 = 12 = 2
  CHECK((-a).value() == 2);
  CHECK(Residue::from_signed(-1, p5).value() == 4);
  CHECK_THROWS_AS(a + Residue(1, p7), ModulusMismatch);
}
