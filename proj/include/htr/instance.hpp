#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "htr/bits.hpp"
#include "htr/error.hpp"
#include "htr/rng.hpp"

namespace htr {

// ---------------------------------------------------------------------------
// Problem instances
// ---------------------------------------------------------------------------
//
// An instance describes an N-hop relay run down a d-ary hierarchy: one
// address digit per hop, a validation family, and a final-check target.
// The canonical payload is a_0 || a_1 || ... || a_N where a_0 is the fixed
// header bit 1 and each digit occupies ceil(log2 d) bits, big-endian.

enum class Family : std::uint8_t { Checksum, Parity };

inline const char* family_name(Family f) {
  return f == Family::Checksum ? "CHECKSUM" : "PARITY";
}

inline Family family_from_name(const std::string& name) {
  if (name == "CHECKSUM") return Family::Checksum;
  if (name == "PARITY") return Family::Parity;
  throw HtrError(Err::ParseError, "unknown family '" + name + "'");
}

// Bits per address digit: ceil(log2 d).
inline std::uint32_t block_width(std::uint32_t d) {
  std::uint32_t w = 0;
  while ((1ull << w) < d) ++w;
  return std::max(w, 1u);
}

constexpr std::uint32_t kMaxBranching = 1u << 16;
constexpr std::uint32_t kMaxDepth = 1u << 20;

struct HtrInstance {
  std::uint32_t d = 2;                 // branching factor, >= 2
  std::uint32_t hops = 1;              // N, >= 1
  std::vector<std::uint32_t> address;  // digit per hop, each < d
  Family family = Family::Checksum;
  std::uint32_t target = 0;            // final-check value

  std::uint32_t width() const { return block_width(d); }

  // Token state space size; covers both families uniformly.
  std::uint32_t state_space() const { return std::max(d, 2u); }

  std::size_t payload_bits() const {
    return 1 + static_cast<std::size_t>(hops) * width();
  }

  bool operator==(const HtrInstance&) const = default;
};

inline std::uint32_t target_space(Family family, std::uint32_t d) {
  return family == Family::Checksum ? d : 2u;
}

inline HtrInstance new_instance(std::uint32_t d, std::uint32_t hops,
                                std::vector<std::uint32_t> address,
                                Family family, std::uint32_t target) {
  if (d < 2 || d > kMaxBranching)
    throw HtrError(Err::BadShape, "branching factor out of range");
  if (hops < 1 || hops > kMaxDepth)
    throw HtrError(Err::BadShape, "hop count out of range");
  if (address.size() != hops)
    throw HtrError(Err::BadShape, "address length does not match hop count");
  for (std::size_t i = 0; i < address.size(); ++i)
    if (address[i] >= d)
      throw HtrError(Err::DigitOutOfRange,
                     "address digit " + std::to_string(i) + " not below " +
                         std::to_string(d),
                     static_cast<long>(i));
  if (target >= target_space(family, d))
    throw HtrError(Err::BadTarget, "target out of range for family");
  return HtrInstance{d, hops, std::move(address), family, target};
}

// Seeded uniform instance: digits i.i.d. on [0, d), target uniform on its
// range. Same seed, same instance, on every platform.
inline HtrInstance random_instance(std::uint32_t d, std::uint32_t hops,
                                   Family family, std::uint64_t seed) {
  if (d < 2 || d > kMaxBranching)
    throw HtrError(Err::BadShape, "branching factor out of range");
  if (hops < 1 || hops > kMaxDepth)
    throw HtrError(Err::BadShape, "hop count out of range");
  SplitMix64 rng(seed);
  std::vector<std::uint32_t> address(hops);
  for (auto& digit : address)
    digit = static_cast<std::uint32_t>(rng.below(d));
  const auto target =
      static_cast<std::uint32_t>(rng.below(target_space(family, d)));
  return new_instance(d, hops, std::move(address), family, target);
}

// ---------------------------------------------------------------------------
// Canonical codec
// ---------------------------------------------------------------------------

inline Bits encode(const HtrInstance& inst) {
  const std::uint32_t w = inst.width();
  Bits out(inst.payload_bits());
  out.set(0, true);  // header a_0 = 1
  for (std::uint32_t i = 0; i < inst.hops; ++i)
    out.write_block(1 + static_cast<std::size_t>(i) * w, w, inst.address[i]);
  return out;
}

inline HtrInstance decode(const Bits& payload, std::uint32_t d,
                          std::uint32_t hops, Family family,
                          std::uint32_t target) {
  if (d < 2 || d > kMaxBranching)
    throw HtrError(Err::BadShape, "branching factor out of range");
  if (hops < 1 || hops > kMaxDepth)
    throw HtrError(Err::BadShape, "hop count out of range");
  const std::uint32_t w = block_width(d);
  const std::size_t want = 1 + static_cast<std::size_t>(hops) * w;
  if (payload.size() != want)
    throw HtrError(Err::BadLength, "payload is " + std::to_string(payload.size()) +
                                       " bits, expected " + std::to_string(want));
  if (!payload.get(0))
    throw HtrError(Err::BadHeader, "header bit a_0 must be 1");
  std::vector<std::uint32_t> address(hops);
  for (std::uint32_t i = 0; i < hops; ++i) {
    const std::uint32_t digit =
        payload.read_block(1 + static_cast<std::size_t>(i) * w, w);
    if (digit >= d)
      throw HtrError(Err::DigitOutOfRange,
                     "block " + std::to_string(i) + " decodes to " +
                         std::to_string(digit),
                     static_cast<long>(i));
    address[i] = digit;
  }
  return new_instance(d, hops, std::move(address), family, target);
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

inline nlohmann::json instance_to_json(const HtrInstance& inst) {
  return nlohmann::json{{"d", inst.d},
                        {"N", inst.hops},
                        {"family", family_name(inst.family)},
                        {"address", inst.address},
                        {"target", inst.target}};
}

inline HtrInstance instance_from_json(const nlohmann::json& j) {
  try {
    return new_instance(j.at("d").get<std::uint32_t>(),
                        j.at("N").get<std::uint32_t>(),
                        j.at("address").get<std::vector<std::uint32_t>>(),
                        family_from_name(j.at("family").get<std::string>()),
                        j.at("target").get<std::uint32_t>());
  } catch (const nlohmann::json::exception& e) {
    throw HtrError(Err::ParseError, std::string("instance file: ") + e.what());
  }
}

inline nlohmann::json payload_to_json(const Bits& payload) {
  return nlohmann::json{{"bits", payload.to_hex()},
                        {"bit_len", payload.size()}};
}

inline Bits payload_from_json(const nlohmann::json& j) {
  try {
    return Bits::from_hex(j.at("bits").get<std::string>(),
                          j.at("bit_len").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw HtrError(Err::ParseError, std::string("payload file: ") + e.what());
  }
}

}  // namespace htr
