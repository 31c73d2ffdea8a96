#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace touchcore {

struct OscBlob {
  std::vector<std::uint8_t> bytes;

  friend bool operator==(const OscBlob&, const OscBlob&) = default;
};

/// One OSC argument. Only the i/f/s/b type tags are supported.
using OscArgument = std::variant<std::int32_t, float, std::string, OscBlob>;

struct OscMessage {
  std::string address;
  std::vector<OscArgument> args;

  /// Floats compare by bit pattern, so NaN payloads round-trip as equal.
  friend bool operator==(const OscMessage& a, const OscMessage& b);
};

enum class OscErrc {
  InvalidAddress,
  InvalidString,
  Truncated,
  UnknownTypeTag,
  BadPadding,
  NestingTooDeep,
};

class OscError : public std::runtime_error {
 public:
  OscError(OscErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  OscErrc code() const noexcept { return code_; }

 private:
  OscErrc code_;
};

/// Big-endian OSC 1.0 encoding. Output length is always a multiple of 4.
std::vector<std::uint8_t> encode_osc_message(const OscMessage& msg);

/// Wraps encoded messages in a "#bundle" with the given 64-bit NTP time tag
/// (1 means "immediately").
std::vector<std::uint8_t> encode_osc_bundle(std::span<const OscMessage> msgs,
                                            std::uint64_t time_tag = 1);

/// Decodes a single message or a (possibly nested) bundle. Bundles are
/// flattened in wire order; their time tags are read and ignored.
std::vector<OscMessage> decode_osc_packet(std::span<const std::uint8_t> packet);

}  // namespace touchcore
