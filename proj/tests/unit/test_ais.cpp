#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "cop/ais.hpp"
#include "cop/error.hpp"
#include "cop/simulator.hpp"
#include "gen.hpp"

using namespace cop;
using namespace cop::ais;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no cop::Error thrown";
  return Errc::InvalidArgument;
}

BitVector bits_of(const std::vector<bool>& v) {
  BitVector b;
  for (bool x : v) b.push_back(x);
  return b;
}

std::string sentence_with_checksum(const std::string& body) {
  char cs[3];
  std::snprintf(cs, sizeof cs, "%02X", nmea_checksum(body));
  return "!" + body + "*" + cs;
}

}  // namespace

TEST(Checksum, XorOfBody) {
  EXPECT_EQ(nmea_checksum(""), 0);
  EXPECT_EQ(nmea_checksum("A"), 'A');
  EXPECT_EQ(nmea_checksum("AB"), 'A' ^ 'B');
}

TEST(ParseSentence, ReferenceSentenceValidatesWithComputedChecksum) {
  const std::string body = "AIVDM,1,1,,A,15M67FC000G?ufbE`FepT@3n00Sa,0";
  EXPECT_EQ(nmea_checksum(body), 0x5F);
  const auto s = parse_sentence("!" + body + "*5F");
  EXPECT_EQ(s.fragment_count, 1);
  EXPECT_EQ(s.fragment_number, 1);
  EXPECT_EQ(s.channel, 'A');
  EXPECT_EQ(s.fill_bits, 0);
  EXPECT_FALSE(s.sequence_id.has_value());
  EXPECT_TRUE(s.complete());
  EXPECT_EQ(s.armored_payload, "15M67FC000G?ufbE`FepT@3n00Sa");
}

TEST(ParseSentence, WrongChecksumIsRejected) {
  EXPECT_EQ(code_of([] { parse_sentence("!AIVDM,1,1,,A,15M67FC000G?ufbE`FepT@3n00Sa,0*5C"); }),
            Errc::ChecksumMismatch);
}

TEST(ParseSentence, AlteredPayloadCharacterIsRejected) {
  EXPECT_EQ(code_of([] { parse_sentence("!AIVDM,1,1,,A,15M67FC000G?ufbE`FepT@3n00Sb,0*5F"); }),
            Errc::ChecksumMismatch);
}

TEST(ParseSentence, FirstOfTwoFragmentsIsIncomplete) {
  const auto s = parse_sentence(sentence_with_checksum("AIVDM,2,1,3,B,55P5TL01VIaAL@7WKO@mBplU@<PDhh000000001S;AJ::4A80?4i@E53,0"));
  EXPECT_FALSE(s.complete());
  EXPECT_EQ(s.fragment_count, 2);
  EXPECT_EQ(s.fragment_number, 1);
  EXPECT_EQ(s.sequence_id, 3);
  EXPECT_EQ(s.channel, 'B');
}

TEST(ParseSentence, MalformedInputs) {
  EXPECT_EQ(code_of([] { parse_sentence(sentence_with_checksum("AIVDM,1,1,,A,15M67FC0")); }), Errc::MalformedField);
  EXPECT_EQ(code_of([] { parse_sentence(sentence_with_checksum("AIVDM,x,1,,A,15M67FC0,0")); }), Errc::MalformedField);
  EXPECT_EQ(code_of([] { parse_sentence(sentence_with_checksum("AIVDM,1,2,,A,15M67FC0,0")); }), Errc::MalformedField);
  EXPECT_EQ(code_of([] { parse_sentence(sentence_with_checksum("AIVDM,1,1,,A,15M67FC0,6")); }), Errc::MalformedField);
  EXPECT_EQ(code_of([] { parse_sentence(sentence_with_checksum("GPGGA,1,1,,A,15M67FC0,0")); }), Errc::MalformedField);
  EXPECT_EQ(code_of([] { parse_sentence("AIVDM,1,1,,A,15M67FC0,0*00"); }), Errc::MalformedField);
  EXPECT_EQ(code_of([] { parse_sentence("!AIVDM,1,1,,A,15M67FC0,0"); }), Errc::MalformedField);
  EXPECT_EQ(code_of([] { parse_sentence("!AIVDM,1,1,,A,15M67FC0,0*ZZ"); }), Errc::MalformedField);
}

TEST(ParseSentence, ToleratesTrailingCarriageReturn) {
  const auto s = parse_sentence("!AIVDM,1,1,,A,15M67FC000G?ufbE`FepT@3n00Sa,0*5F\r\n");
  EXPECT_EQ(s.channel, 'A');
}

TEST(TagBlock, ReceiptTimeFromCField) {
  char cs[3];
  std::snprintf(cs, sizeof cs, "%02X", nmea_checksum("c:1700000000"));
  const std::string line = std::string("\\c:1700000000*") + cs + "\\!AIVDM,1,1,,A,0,0*00";
  std::string_view rest;
  EXPECT_EQ(split_tag_block(line, &rest), 1700000000.0);
  EXPECT_EQ(rest, "!AIVDM,1,1,,A,0,0*00");
}

TEST(TagBlock, AbsentOrBadBlockYieldsNoTime) {
  std::string_view rest;
  EXPECT_FALSE(split_tag_block("!AIVDM,1,1,,A,0,0*00", &rest).has_value());
  EXPECT_EQ(rest, "!AIVDM,1,1,,A,0,0*00");
  EXPECT_FALSE(split_tag_block("\\c:1700000000*00\\!AIVDM", &rest).has_value());
  EXPECT_EQ(rest, "!AIVDM");
  EXPECT_FALSE(split_tag_block("\\s:base\\!AIVDM", &rest).has_value());
}

TEST(TagBlock, MillisecondStampsAreScaled) {
  std::string_view rest;
  EXPECT_DOUBLE_EQ(*split_tag_block("\\c:1700000000500\\!AIVDM", &rest), 1700000000.5);
}

TEST(Dearmor, SingleCharacters) {
  EXPECT_EQ(dearmor_payload("0", 0).to_string(), "000000");
  EXPECT_EQ(dearmor_payload("w", 0).to_string(), "111111");
  EXPECT_EQ(dearmor_payload("W", 0).to_string(), "100111");   // 87 - 48 = 39
  EXPECT_EQ(dearmor_payload("`", 0).to_string(), "101000");   // 96 - 56 = 40
  EXPECT_EQ(dearmor_payload("w", 2).to_string(), "1111");
}

TEST(Dearmor, InvalidCharacters) {
  for (const char* s : {"~", "X", "_", "/", "x", " "})
    EXPECT_EQ(code_of([s] { dearmor_payload(s, 0); }), Errc::InvalidArmorCharacter) << s;
}

TEST(Dearmor, FillBitsBeyondPayload) {
  EXPECT_EQ(code_of([] { dearmor_payload("", 1); }), Errc::MalformedField);
  EXPECT_EQ(code_of([] { dearmor_payload("0", 6); }), Errc::MalformedField);
}

TEST(Dearmor, ArmorInverseForAllSixtyFourValues) {
  std::vector<std::string> seen;
  for (unsigned v = 0; v < 64; ++v) {
    sim::BitWriter w;
    w.put_uint(v, 6);
    int fill = -1;
    const auto armored = sim::armor(w.bits(), &fill);
    ASSERT_EQ(armored.size(), 1u);
    EXPECT_EQ(fill, 0);
    EXPECT_EQ(dearmor_payload(armored, 0).get_uint(0, 6), v);
    seen.push_back(armored);
  }
  std::sort(seen.begin(), seen.end());
  EXPECT_EQ(std::unique(seen.begin(), seen.end()), seen.end());
}

TEST(BitVector, SignedFields) {
  sim::BitWriter w;
  w.put_int(-1, 8);
  w.put_int(-128, 8);
  w.put_int(127, 8);
  const auto b = bits_of(w.bits());
  EXPECT_EQ(b.get_int(0, 8), -1);
  EXPECT_EQ(b.get_int(8, 8), -128);
  EXPECT_EQ(b.get_int(16, 8), 127);
  EXPECT_EQ(b.get_uint(0, 8), 255u);
}

TEST(DecodePosition, HandPackedFields) {
  sim::PositionFields f;
  f.mmsi = 367000000;
  f.sog_tenths = 123;
  f.lon_raw = 0;
  f.lat_raw = 0;
  f.cog_tenths = 2345;
  f.heading = 270;
  const auto r = decode_position_report(bits_of(sim::encode_position(f)), 42.0);
  EXPECT_EQ(r.mmsi, 367000000u);
  EXPECT_EQ(r.message_type, 1);
  EXPECT_DOUBLE_EQ(*r.sog, 12.3);
  EXPECT_DOUBLE_EQ(*r.lon, 0.0);
  EXPECT_DOUBLE_EQ(*r.lat, 0.0);
  EXPECT_DOUBLE_EQ(*r.cog, 234.5);
  EXPECT_DOUBLE_EQ(*r.heading, 270.0);
  EXPECT_DOUBLE_EQ(r.timestamp, 42.0);
}

TEST(DecodePosition, SentinelsMapToUnavailable) {
  sim::PositionFields f;
  f.mmsi = 367000000;
  const auto r = decode_position_report(bits_of(sim::encode_position(f)), 0.0);
  EXPECT_FALSE(r.sog);
  EXPECT_FALSE(r.lon);
  EXPECT_FALSE(r.lat);
  EXPECT_FALSE(r.cog);
  EXPECT_FALSE(r.heading);
  EXPECT_FALSE(r.position());
  EXPECT_FALSE(r.has_kinematics());
}

TEST(DecodePosition, OutOfRangeCoordinatesAreUnavailable) {
  sim::PositionFields f;
  f.mmsi = 1;
  f.lon_raw = -181 * 600000;
  f.lat_raw = -91 * 600000;
  f.cog_tenths = 3601;
  f.heading = 400;
  const auto r = decode_position_report(bits_of(sim::encode_position(f)), 0.0);
  EXPECT_FALSE(r.lon);
  EXPECT_FALSE(r.lat);
  EXPECT_FALSE(r.cog);
  EXPECT_FALSE(r.heading);
}

TEST(DecodePosition, BoundaryCoordinatesAreKept) {
  sim::PositionFields f;
  f.mmsi = 1;
  f.lon_raw = -180 * 600000;
  f.lat_raw = 90 * 600000;
  const auto r = decode_position_report(bits_of(sim::encode_position(f)), 0.0);
  EXPECT_DOUBLE_EQ(*r.lon, -180.0);
  EXPECT_DOUBLE_EQ(*r.lat, 90.0);
}

TEST(DecodePosition, Errors) {
  sim::PositionFields f;
  f.mmsi = 5;
  auto bits = sim::encode_position(f);
  bits.resize(136);
  EXPECT_EQ(code_of([&] { decode_position_report(bits_of(bits), 0); }), Errc::TruncatedPayload);
  f.message_type = 4;
  EXPECT_EQ(code_of([&] { decode_position_report(bits_of(sim::encode_position(f)), 0); }),
            Errc::UnsupportedMessageType);
  f.message_type = 1;
  f.mmsi = 0;
  EXPECT_EQ(code_of([&] { decode_position_report(bits_of(sim::encode_position(f)), 0); }), Errc::MalformedField);
}

TEST(DecodeStatic, EmptyAndPackedNames) {
  sim::StaticFields f;
  f.mmsi = 353136000;
  f.ship_type = 70;
  auto r = decode_static_report(bits_of(sim::encode_static(f)));
  EXPECT_EQ(r.vessel_name, "");
  EXPECT_EQ(r.callsign, "");
  EXPECT_EQ(r.ship_type, 70);

  f.name = "EVER GIVEN";
  f.callsign = "H3RC";
  r = decode_static_report(bits_of(sim::encode_static(f)));
  EXPECT_EQ(r.vessel_name, "EVER GIVEN");
  EXPECT_EQ(r.callsign, "H3RC");
  EXPECT_EQ(r.mmsi, 353136000u);
}

TEST(DecodeStatic, TruncatedAndWrongType) {
  sim::BitWriter w;
  w.put_uint(5, 6);
  w.put_uint(0, 2);
  w.put_uint(123456789, 30);
  for (int i = 0; i < 62; ++i) w.put_uint(0, 1);
  ASSERT_EQ(w.bits().size(), 100u);
  EXPECT_EQ(code_of([&] { decode_static_report(bits_of(w.bits())); }), Errc::TruncatedPayload);
  sim::PositionFields p;
  p.mmsi = 1;
  EXPECT_EQ(code_of([&] { decode_static_report(bits_of(sim::encode_position(p))); }),
            Errc::UnsupportedMessageType);
}

TEST(Assembler, SingleFragmentImmediately) {
  FragmentAssembler a;
  auto m = a.push(parse_sentence("!AIVDM,1,1,,A,15M67FC000G?ufbE`FepT@3n00Sa,0*5F"), 10.0);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->bits.size(), 168u);
  EXPECT_EQ(a.pending(), 0u);
}

namespace {

std::vector<RawSentence> two_part_message(const std::vector<bool>& bits, int seq) {
  std::vector<RawSentence> out;
  for (const auto& line : sim::to_sentences(bits, seq, 'B', std::nullopt, 40)) out.push_back(parse_sentence(line));
  return out;
}

}  // namespace

TEST(Assembler, ReorderedFragmentsGiveSameBits) {
  sim::StaticFields f;
  f.mmsi = 211000000;
  f.name = "REORDERED";
  const auto bits = sim::encode_static(f);
  const auto parts = two_part_message(bits, 4);
  ASSERT_EQ(parts.size(), 2u);

  FragmentAssembler in_order, reversed;
  EXPECT_FALSE(in_order.push(parts[0], 0.0));
  const auto a = in_order.push(parts[1], 1.0);
  EXPECT_FALSE(reversed.push(parts[1], 0.0));
  const auto b = reversed.push(parts[0], 1.0);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->bits, b->bits);
  EXPECT_EQ(a->bits, bits_of(bits));
}

TEST(Assembler, TimeoutDiscardsPartialGroup) {
  sim::StaticFields f;
  f.mmsi = 211000000;
  const auto parts = two_part_message(sim::encode_static(f), 1);
  FragmentAssembler a(30.0);
  EXPECT_FALSE(a.push(parts[0], 100.0));
  EXPECT_EQ(a.pending(), 1u);
  a.expire(135.0);
  EXPECT_EQ(a.pending(), 0u);
  EXPECT_EQ(a.timeouts(), 1u);
  // The late second half starts a new group and never completes.
  EXPECT_FALSE(a.push(parts[1], 135.0));
}

TEST(Assembler, IndependentOfArrivalOrderProperty) {
  gen::Rng rng(11);
  for (int iter = 0; iter < 200; ++iter) {
    sim::StaticFields f;
    f.mmsi = static_cast<Mmsi>(rng.integer(1, 999999999));
    f.name = rng.sixbit_text(20);
    std::vector<RawSentence> parts;
    for (const auto& line : sim::to_sentences(sim::encode_static(f), iter % 10, 'A', std::nullopt,
                                              static_cast<std::size_t>(rng.integer(10, 40))))
      parts.push_back(parse_sentence(line));
    std::vector<std::size_t> order(parts.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng.engine());
    FragmentAssembler a;
    std::optional<AssembledMessage> out;
    for (std::size_t i = 0; i < order.size(); ++i) {
      out = a.push(parts[order[i]], 0.0);
      EXPECT_EQ(out.has_value(), i + 1 == order.size());
    }
    ASSERT_TRUE(out);
    EXPECT_EQ(decode_static_report(out->bits).vessel_name, f.name);
  }
}

TEST(Decoder, CountsEachFailureKind) {
  AisDecoder d;
  EXPECT_FALSE(d.decode_line("!AIVDM,1,1,,A,15M67FC000G?ufbE`FepT@3n00Sa,0*5C", 0));
  EXPECT_FALSE(d.decode_line(sentence_with_checksum("AIVDM,1,1,,A,~~,0"), 0));
  EXPECT_FALSE(d.decode_line(sentence_with_checksum("AIVDM,1,1,,A,15M67,0"), 0));
  EXPECT_FALSE(d.decode_line("garbage", 0));
  EXPECT_FALSE(d.decode_line("", 0));
  sim::BitWriter w;
  w.put_uint(18, 6);
  for (int i = 0; i < 162; ++i) w.put_uint(0, 1);
  EXPECT_FALSE(d.decode_line(sim::to_sentences(w.bits(), 0, 'A', std::nullopt)[0], 0));
  EXPECT_TRUE(d.decode_line("!AIVDM,1,1,,A,15M67FC000G?ufbE`FepT@3n00Sa,0*5F", 0));

  const auto c = d.counters();
  EXPECT_EQ(c.lines, 7u);
  EXPECT_EQ(c.checksum_failures, 1u);
  EXPECT_EQ(c.invalid_armor, 1u);
  EXPECT_EQ(c.truncated, 1u);
  EXPECT_EQ(c.malformed, 1u);
  EXPECT_EQ(c.unsupported_types, 1u);
  EXPECT_EQ(c.position_reports, 1u);
}

TEST(Decoder, ReferenceSentenceFields) {
  AisDecoder d;
  const auto m = d.decode_line("!AIVDM,1,1,,A,15M67FC000G?ufbE`FepT@3n00Sa,0*5F", 1000.0);
  ASSERT_TRUE(m);
  const auto& r = std::get<AisPositionReport>(*m);
  EXPECT_EQ(r.mmsi, 366053209u);
  EXPECT_DOUBLE_EQ(r.timestamp, 1000.0);
  ASSERT_TRUE(r.lat && r.lon);
  EXPECT_DOUBLE_EQ(*r.lat, 22681271 / 600000.0);
  EXPECT_DOUBLE_EQ(*r.lon, -73404971 / 600000.0);
  EXPECT_DOUBLE_EQ(*r.sog, 0.0);
  EXPECT_DOUBLE_EQ(*r.cog, 219.3);
  EXPECT_DOUBLE_EQ(*r.heading, 1.0);
}

TEST(RoundTrip, RandomPositionReportsDecodeToInputs) {
  gen::Rng rng(2024);
  AisDecoder d;
  for (int i = 0; i < 2000; ++i) {
    sim::PositionFields f;
    f.message_type = static_cast<int>(rng.integer(1, 3));
    f.mmsi = static_cast<Mmsi>(rng.integer(1, 999999999));
    f.sog_tenths = static_cast<int>(rng.integer(0, 1022));
    f.lon_raw = static_cast<std::int32_t>(rng.integer(-180 * 600000, 180 * 600000));
    f.lat_raw = static_cast<std::int32_t>(rng.integer(-90 * 600000, 90 * 600000));
    f.cog_tenths = static_cast<int>(rng.integer(0, 3599));
    f.heading = static_cast<int>(rng.integer(0, 359));
    const auto lines = sim::to_sentences(sim::encode_position(f), 0, 'A', std::nullopt);
    ASSERT_EQ(lines.size(), 1u);
    const auto m = d.decode_line(lines[0], 7.0);
    ASSERT_TRUE(m);
    const auto& r = std::get<AisPositionReport>(*m);
    EXPECT_EQ(r.message_type, f.message_type);
    EXPECT_EQ(r.mmsi, f.mmsi);
    EXPECT_DOUBLE_EQ(*r.sog, f.sog_tenths / 10.0);
    EXPECT_DOUBLE_EQ(*r.lon, f.lon_raw / 600000.0);
    EXPECT_DOUBLE_EQ(*r.lat, f.lat_raw / 600000.0);
    EXPECT_DOUBLE_EQ(*r.cog, f.cog_tenths / 10.0);
    EXPECT_DOUBLE_EQ(*r.heading, static_cast<double>(f.heading));
  }
  EXPECT_EQ(d.counters().position_reports, 2000u);
}

TEST(RoundTrip, RandomStaticReportsDecodeToInputs) {
  gen::Rng rng(99);
  AisDecoder d;
  for (int i = 0; i < 500; ++i) {
    sim::StaticFields f;
    f.mmsi = static_cast<Mmsi>(rng.integer(1, 999999999));
    f.name = rng.sixbit_text(20);
    f.callsign = rng.sixbit_text(7);
    f.ship_type = static_cast<int>(rng.integer(0, 255));
    std::optional<DecodedMessage> m;
    for (const auto& line : sim::to_sentences(sim::encode_static(f), i % 10, 'B', 1.0 * i)) m = d.decode_line(line, i);
    ASSERT_TRUE(m);
    const auto& r = std::get<AisStaticReport>(*m);
    EXPECT_EQ(r.mmsi, f.mmsi);
    EXPECT_EQ(r.vessel_name, f.name);
    EXPECT_EQ(r.callsign, f.callsign);
    EXPECT_EQ(r.ship_type, f.ship_type);
  }
}

TEST(SixBit, CharacterTable) {
  EXPECT_EQ(sixbit_to_ascii(0), '@');
  EXPECT_EQ(sixbit_to_ascii(1), 'A');
  EXPECT_EQ(sixbit_to_ascii(32), ' ');
  EXPECT_EQ(sixbit_to_ascii(48), '0');
  EXPECT_EQ(sixbit_to_ascii(63), '?');
}
