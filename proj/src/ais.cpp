#include "cop/ais.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "cop/error.hpp"

namespace cop::ais {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

int parse_int(std::string_view s, const char* what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw Error(Errc::MalformedField, std::string("non-numeric ") + what);
  return v;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::string strip_padding(std::string s) {
  while (!s.empty() && (s.back() == '@' || s.back() == ' ')) s.pop_back();
  return s;
}

std::string decode_text(const BitVector& bits, std::size_t start, std::size_t chars) {
  std::string out;
  out.reserve(chars);
  for (std::size_t i = 0; i < chars; ++i)
    out.push_back(sixbit_to_ascii(static_cast<unsigned>(bits.get_uint(start + 6 * i, 6))));
  return strip_padding(std::move(out));
}

}  // namespace

void BitVector::append(const BitVector& other) {
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

std::uint64_t BitVector::get_uint(std::size_t start, std::size_t len) const {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < len; ++i) v = (v << 1) | bits_[start + i];
  return v;
}

std::int64_t BitVector::get_int(std::size_t start, std::size_t len) const {
  const std::uint64_t u = get_uint(start, len);
  if (len > 0 && (u >> (len - 1)) & 1U) return static_cast<std::int64_t>(u) - (std::int64_t{1} << len);
  return static_cast<std::int64_t>(u);
}

std::string BitVector::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

std::uint8_t nmea_checksum(std::string_view body) {
  std::uint8_t x = 0;
  for (char c : body) x ^= static_cast<std::uint8_t>(c);
  return x;
}

std::optional<double> split_tag_block(std::string_view line, std::string_view* sentence) {
  line = trim(line);
  *sentence = line;
  if (line.empty() || line.front() != '\\') return std::nullopt;
  const auto close = line.find('\\', 1);
  if (close == std::string_view::npos) return std::nullopt;
  *sentence = line.substr(close + 1);
  std::string_view block = line.substr(1, close - 1);
  const auto star = block.find('*');
  if (star != std::string_view::npos) {
    const auto cs = block.substr(star + 1);
    block = block.substr(0, star);
    if (cs.size() == 2) {
      const int hi = hex_value(cs[0]);
      const int lo = hex_value(cs[1]);
      if (hi < 0 || lo < 0 || nmea_checksum(block) != static_cast<std::uint8_t>(hi * 16 + lo))
        return std::nullopt;
    }
  }
  for (auto field : split(block, ',')) {
    if (field.size() > 2 && field.substr(0, 2) == "c:") {
      double t = 0;
      const auto digits = field.substr(2);
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t);
      if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
      if (t > 1e11) t /= 1000.0;  // millisecond stamps
      return t;
    }
  }
  return std::nullopt;
}

RawSentence parse_sentence(std::string_view line) {
  line = trim(line);
  if (line.empty() || line.front() != '!') throw Error(Errc::MalformedField, "sentence must start with '!'");
  const auto star = line.rfind('*');
  if (star == std::string_view::npos || star + 3 != line.size())
    throw Error(Errc::MalformedField, "missing or malformed checksum");
  const int hi = hex_value(line[star + 1]);
  const int lo = hex_value(line[star + 2]);
  if (hi < 0 || lo < 0) throw Error(Errc::MalformedField, "checksum is not hex");
  const auto body = line.substr(1, star - 1);
  const auto expected = static_cast<std::uint8_t>(hi * 16 + lo);
  if (nmea_checksum(body) != expected) throw Error(Errc::ChecksumMismatch, std::string(line));

  const auto fields = split(body, ',');
  if (fields.size() != 7) throw Error(Errc::MalformedField, "expected 7 fields");
  RawSentence s;
  s.talker = std::string(fields[0]);
  if (s.talker.size() != 5 || (s.talker.substr(2) != "VDM" && s.talker.substr(2) != "VDO"))
    throw Error(Errc::MalformedField, "unsupported sentence type " + s.talker);
  s.fragment_count = parse_int(fields[1], "fragment count");
  s.fragment_number = parse_int(fields[2], "fragment number");
  if (s.fragment_count < 1 || s.fragment_count > 9 || s.fragment_number < 1 ||
      s.fragment_number > s.fragment_count)
    throw Error(Errc::MalformedField, "fragment indices out of range");
  if (!fields[3].empty()) s.sequence_id = parse_int(fields[3], "sequence id");
  if (fields[4].size() > 1) throw Error(Errc::MalformedField, "channel");
  s.channel = fields[4].empty() ? ' ' : fields[4][0];
  s.armored_payload = std::string(fields[5]);
  s.fill_bits = parse_int(fields[6], "fill bits");
  if (s.fill_bits < 0 || s.fill_bits > 5) throw Error(Errc::MalformedField, "fill bits out of range");
  s.checksum = expected;
  return s;
}

BitVector dearmor_payload(std::string_view armored, int fill_bits) {
  if (fill_bits < 0 || fill_bits > 5) throw Error(Errc::MalformedField, "fill bits out of range");
  std::vector<std::uint8_t> bits;
  bits.reserve(armored.size() * 6);
  for (char ch : armored) {
    const int code = static_cast<unsigned char>(ch);
    if (!((code >= 48 && code <= 87) || (code >= 96 && code <= 119)))
      throw Error(Errc::InvalidArmorCharacter, std::string("invalid armor character '") + ch + "'");
    int v = code - 48;
    if (v > 40) v -= 8;
    for (int b = 5; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((v >> b) & 1));
  }
  if (static_cast<std::size_t>(fill_bits) > bits.size())
    throw Error(Errc::MalformedField, "fill bits exceed payload");
  bits.resize(bits.size() - static_cast<std::size_t>(fill_bits));
  return BitVector(std::move(bits));
}

char sixbit_to_ascii(unsigned v) {
  v &= 0x3F;
  return static_cast<char>(v < 32 ? v + 64 : v);
}

AisPositionReport decode_position_report(const BitVector& bits, double receipt_time) {
  if (bits.size() < 6) throw Error(Errc::TruncatedPayload, "no message type");
  const auto type = static_cast<int>(bits.get_uint(0, 6));
  if (type < 1 || type > 3)
    throw Error(Errc::UnsupportedMessageType, "type " + std::to_string(type) + " is not a position report");
  if (bits.size() < 137) throw Error(Errc::TruncatedPayload, "position report shorter than 137 bits");

  AisPositionReport r;
  r.message_type = type;
  r.mmsi = static_cast<Mmsi>(bits.get_uint(8, 30));
  if (r.mmsi == 0) throw Error(Errc::MalformedField, "mmsi 0");
  r.timestamp = receipt_time;

  const auto sog = bits.get_uint(50, 10);
  if (sog != 1023) r.sog = static_cast<double>(sog) / 10.0;

  const double lon = static_cast<double>(bits.get_int(61, 28)) / 600000.0;
  const double lat = static_cast<double>(bits.get_int(89, 27)) / 600000.0;
  if (lon >= -180.0 && lon <= 180.0) r.lon = lon;
  if (lat >= -90.0 && lat <= 90.0) r.lat = lat;

  const auto cog = bits.get_uint(116, 12);
  if (cog < 3600) r.cog = static_cast<double>(cog) / 10.0;

  const auto heading = bits.get_uint(128, 9);
  if (heading < 360) r.heading = static_cast<double>(heading);
  return r;
}

AisStaticReport decode_static_report(const BitVector& bits) {
  if (bits.size() < 6) throw Error(Errc::TruncatedPayload, "no message type");
  const auto type = static_cast<int>(bits.get_uint(0, 6));
  if (type != 5) throw Error(Errc::UnsupportedMessageType, "type " + std::to_string(type) + " is not static data");
  if (bits.size() < 420) throw Error(Errc::TruncatedPayload, "static report shorter than 420 bits");
  AisStaticReport s;
  s.mmsi = static_cast<Mmsi>(bits.get_uint(8, 30));
  if (s.mmsi == 0) throw Error(Errc::MalformedField, "mmsi 0");
  s.callsign = decode_text(bits, 70, 7);
  s.vessel_name = decode_text(bits, 112, 20);
  s.ship_type = static_cast<int>(bits.get_uint(232, 8));
  return s;
}

std::optional<AssembledMessage> FragmentAssembler::push(const RawSentence& sentence,
                                                        double receipt_time) {
  expire(receipt_time);
  if (sentence.complete())
    return AssembledMessage{dearmor_payload(sentence.armored_payload, sentence.fill_bits), receipt_time};

  const Key key{sentence.sequence_id.value_or(-1), sentence.channel, sentence.fragment_count};
  auto [it, inserted] = groups_.try_emplace(key);
  Group& g = it->second;
  if (inserted) {
    g.first_seen = receipt_time;
    g.last_seen = receipt_time;
    g.parts.resize(static_cast<std::size_t>(sentence.fragment_count));
  }
  g.first_seen = std::min(g.first_seen, receipt_time);
  g.last_seen = std::max(g.last_seen, receipt_time);
  g.parts[static_cast<std::size_t>(sentence.fragment_number - 1)] = sentence;

  const bool done = std::all_of(g.parts.begin(), g.parts.end(), [](const auto& p) { return p.has_value(); });
  if (!done) return std::nullopt;

  AssembledMessage msg;
  msg.receipt_time = g.last_seen;
  try {
    for (const auto& part : g.parts) msg.bits.append(dearmor_payload(part->armored_payload, part->fill_bits));
  } catch (...) {
    groups_.erase(it);
    throw;
  }
  groups_.erase(it);
  return msg;
}

void FragmentAssembler::expire(double now) {
  for (auto it = groups_.begin(); it != groups_.end();) {
    if (now - it->second.first_seen > max_age_s_) {
      ++timeouts_;
      it = groups_.erase(it);
    } else {
      ++it;
    }
  }
}

std::optional<DecodedMessage> AisDecoder::decode_line(std::string_view line, double receipt_time) {
  ++counters_.lines;
  std::string_view sentence_text;
  split_tag_block(line, &sentence_text);
  if (trim(sentence_text).empty()) return std::nullopt;
  try {
    const RawSentence sentence = parse_sentence(sentence_text);
    auto assembled = assembler_.push(sentence, receipt_time);
    if (!assembled) return std::nullopt;
    const auto type = assembled->bits.size() >= 6 ? assembled->bits.get_uint(0, 6) : 0;
    if (type >= 1 && type <= 3) {
      auto r = decode_position_report(assembled->bits, assembled->receipt_time);
      ++counters_.position_reports;
      return r;
    }
    if (type == 5) {
      auto s = decode_static_report(assembled->bits);
      ++counters_.static_reports;
      return s;
    }
    ++counters_.unsupported_types;
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::ChecksumMismatch: ++counters_.checksum_failures; break;
      case Errc::InvalidArmorCharacter: ++counters_.invalid_armor; break;
      case Errc::UnsupportedMessageType: ++counters_.unsupported_types; break;
      case Errc::TruncatedPayload: ++counters_.truncated; break;
      default: ++counters_.malformed; break;
    }
  }
  return std::nullopt;
}

DecoderCounters AisDecoder::counters() const {
  DecoderCounters c = counters_;
  c.fragment_timeouts = assembler_.timeouts();
  return c;
}

}  // namespace cop::ais
