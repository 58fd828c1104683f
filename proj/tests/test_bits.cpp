#include <doctest.h>

#include "htr/bits.hpp"
#include "htr/rng.hpp"

using htr::Bits;

TEST_SUITE("bits") {

TEST_CASE("msb-first layout") {
  Bits b(4);
  b.set(0, true);
  b.set(2, true);
  b.set(3, true);
  CHECK(b.bytes().size() == 1);
  CHECK(b.bytes()[0] == 0xB0);  // 1011 0000
  CHECK(b.to_hex() == "b0");
}

TEST_CASE("block read/write round-trip") {
  Bits b(9);
  b.write_block(1, 3, 0b101);
  b.write_block(4, 3, 0b011);
  CHECK(b.read_block(1, 3) == 0b101);
  CHECK(b.read_block(4, 3) == 0b011);
  CHECK(b.get(1));
  CHECK_FALSE(b.get(2));
}

TEST_CASE("hex round-trip over random strings") {
  htr::SplitMix64 rng(42);
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t n = 1 + rng.below(70);
    Bits b(n);
    for (std::size_t i = 0; i < n; ++i) b.set(i, rng.below(2));
    const Bits back = Bits::from_hex(b.to_hex(), n);
    CHECK(back == b);
  }
}

TEST_CASE("from_hex rejects malformed input") {
  CHECK_THROWS_AS(Bits::from_hex("zz", 8), htr::HtrError);
  CHECK_THROWS_AS(Bits::from_hex("ff", 4), htr::HtrError);   // dirty padding
  CHECK_THROWS_AS(Bits::from_hex("ff00", 8), htr::HtrError); // length mismatch
  CHECK(Bits::from_hex("f0", 4).read_block(0, 4) == 0xF);
}

TEST_CASE("push_back grows correctly") {
  Bits b;
  for (int i = 0; i < 12; ++i) b.push_back(i % 3 == 0);
  CHECK(b.size() == 12);
  CHECK(b.get(0));
  CHECK_FALSE(b.get(1));
  CHECK(b.get(9));
}

}  // TEST_SUITE
