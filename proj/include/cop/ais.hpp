#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "cop/geo.hpp"

namespace cop::ais {

using Mmsi = std::uint32_t;

/// MSB-first bit sequence as produced by de-armoring an AIS payload.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void push_back(bool b) { bits_.push_back(b ? 1 : 0); }
  void append(const BitVector& other);

  /// Unsigned field of `len` bits starting at `start`; caller checks bounds.
  std::uint64_t get_uint(std::size_t start, std::size_t len) const;
  /// Two's-complement signed field.
  std::int64_t get_int(std::size_t start, std::size_t len) const;

  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::string to_string() const;

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct RawSentence {
  std::string talker;  // e.g. "AIVDM"
  int fragment_count = 1;
  int fragment_number = 1;
  std::optional<int> sequence_id;
  char channel = ' ';
  std::string armored_payload;
  int fill_bits = 0;
  std::uint8_t checksum = 0;

  bool complete() const { return fragment_count == 1; }
};

struct AisPositionReport {
  Mmsi mmsi = 0;
  int message_type = 1;
  double timestamp = 0.0;  // UTC seconds, from receipt time
  std::optional<double> lat;
  std::optional<double> lon;
  std::optional<double> sog;      // knots
  std::optional<double> cog;      // degrees
  std::optional<double> heading;  // degrees

  std::optional<geo::GeoPoint> position() const {
    if (lat && lon) return geo::GeoPoint{*lat, *lon};
    return std::nullopt;
  }
  bool has_kinematics() const { return sog.has_value() && cog.has_value(); }

  friend bool operator==(const AisPositionReport&, const AisPositionReport&) = default;
};

struct AisStaticReport {
  Mmsi mmsi = 0;
  std::string vessel_name;
  int ship_type = 0;
  std::string callsign;

  friend bool operator==(const AisStaticReport&, const AisStaticReport&) = default;
};

/// XOR of every character between the leading '!' / '\\' and '*'.
std::uint8_t nmea_checksum(std::string_view body);

/// Splits an optional NMEA 4.0 tag block ("\\c:1700000000*hh\\!AIVDM...") off a
/// line. Returns the unix receipt time from the `c:` field when present and
/// valid; `sentence` receives the remainder.
std::optional<double> split_tag_block(std::string_view line, std::string_view* sentence);

RawSentence parse_sentence(std::string_view line);

/// 6-bit de-armoring: v = code - 48, minus 8 more when v > 40.
BitVector dearmor_payload(std::string_view armored, int fill_bits);

/// 6-bit ASCII as used by AIS text fields.
char sixbit_to_ascii(unsigned v);

AisPositionReport decode_position_report(const BitVector& bits, double receipt_time);
AisStaticReport decode_static_report(const BitVector& bits);

struct AssembledMessage {
  BitVector bits;
  double receipt_time = 0.0;
};

/// Reassembles multi-fragment sentences of one input stream. Not thread-safe;
/// use one assembler per stream.
class FragmentAssembler {
 public:
  explicit FragmentAssembler(double max_age_s = 30.0) : max_age_s_(max_age_s) {}

  std::optional<AssembledMessage> push(const RawSentence& sentence, double receipt_time);
  /// Discards partial groups older than max_age at `now`.
  void expire(double now);

  std::size_t timeouts() const { return timeouts_; }
  std::size_t pending() const { return groups_.size(); }

 private:
  using Key = std::tuple<int, char, int>;
  struct Group {
    double first_seen = 0.0;
    double last_seen = 0.0;
    std::vector<std::optional<RawSentence>> parts;
  };

  double max_age_s_;
  std::size_t timeouts_ = 0;
  std::map<Key, Group> groups_;
};

struct DecoderCounters {
  std::size_t lines = 0;
  std::size_t checksum_failures = 0;
  std::size_t malformed = 0;
  std::size_t invalid_armor = 0;
  std::size_t unsupported_types = 0;
  std::size_t truncated = 0;
  std::size_t fragment_timeouts = 0;
  std::size_t position_reports = 0;
  std::size_t static_reports = 0;
};

using DecodedMessage = std::variant<AisPositionReport, AisStaticReport>;

/// Line-level decoder for one stream: drops and counts bad input instead of
/// throwing.
class AisDecoder {
 public:
  explicit AisDecoder(double fragment_max_age_s = 30.0) : assembler_(fragment_max_age_s) {}

  std::optional<DecodedMessage> decode_line(std::string_view line, double receipt_time);
  void expire(double now) { assembler_.expire(now); }

  DecoderCounters counters() const;

 private:
  FragmentAssembler assembler_;
  DecoderCounters counters_;
};

}  // namespace cop::ais
