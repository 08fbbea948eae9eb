#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "saasim/trace.hpp"

using namespace saasim;

namespace {

contact_event up(seconds t, node_id a, node_id b) { return {t, link_state::up, a, b}; }
contact_event down(seconds t, node_id a, node_id b) { return {t, link_state::down, a, b}; }

} // namespace

TEST(ParseTrace, SampleLinesFromMitExtract) {
  const auto ev = parse_contact_trace("0 CONN 93 96 up\n"
                                      "0 CONN 93 14 up\n"
                                      "128 CONN 85 17 up\n"
                                      "129 CONN 94 29 up\n"
                                      "1169 CONN 28 5 down\n"
                                      "1169 CONN 28 17 down\n"
                                      "1100 CONN 5 28 up\n"
                                      "1100 CONN 17 28 up\n");
  const std::vector<contact_event> expected{up(0, 93, 96),    up(0, 14, 93),    up(128, 17, 85),
                                            up(129, 29, 94),  up(1100, 5, 28),  up(1100, 17, 28),
                                            down(1169, 5, 28), down(1169, 17, 28)};
  EXPECT_EQ(ev, expected);
}

TEST(ParseTrace, SingleLine) {
  const auto ev = parse_contact_trace("0 CONN 93 96 up");
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0], up(0, 93, 96));
}

TEST(ParseTrace, EmptyStream) {
  EXPECT_TRUE(parse_contact_trace("").empty());
  EXPECT_TRUE(parse_contact_trace("\n\n   \n# only a comment\n").empty());
}

TEST(ParseTrace, PairNormalizationMatchesDown) {
  const auto ev = parse_contact_trace("5 CONN 1 2 up\n9 CONN 2 1 down\n");
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0], up(5, 1, 2));
  EXPECT_EQ(ev[1], down(9, 1, 2));
}

TEST(ParseTrace, StableSortKeepsInputOrderForTies) {
  const auto ev = parse_contact_trace("10 CONN 3 4 up\n5 CONN 1 2 up\n10 CONN 1 2 down\n5 CONN 7 8 up\n");
  const std::vector<contact_event> expected{up(5, 1, 2), up(5, 7, 8), up(10, 3, 4), down(10, 1, 2)};
  EXPECT_EQ(ev, expected);
}

TEST(ParseTrace, RepeatedUpIsAccepted) {
  const auto ev = parse_contact_trace("1 CONN 1 2 up\n2 CONN 1 2 up\n3 CONN 1 2 down\n");
  EXPECT_EQ(ev.size(), 3u);
}

TEST(ParseTrace, MalformedLinesCarryLineNumbers) {
  const std::vector<std::pair<std::string, std::size_t>> cases{
      {"0 CONN 1 2 up\n0 CONN 1 2\n", 2},
      {"x CONN 1 2 up\n", 1},
      {"0 CONN 1 2 up\n\n0 CONN a 2 up\n", 3},
      {"0 CONN 1 2 sideways\n", 1},
      {"0 LINK 1 2 up\n", 1},
      {"-5 CONN 1 2 up\n", 1},
      {"0 CONN 1 2 up extra\n", 1},
      {"0 CONN 4 4 up\n", 1},
  };
  for (const auto& [text, line] : cases) {
    try {
      parse_contact_trace(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const parse_error& e) {
      EXPECT_EQ(e.line(), line) << text;
      EXPECT_NE(std::string(e.what()).find("line " + std::to_string(line)), std::string::npos);
      EXPECT_EQ(e.exit_code(), 4);
    }
  }
}

TEST(ParseTrace, DownWithoutUpIsValidationError) {
  try {
    parse_contact_trace("0 CONN 1 2 up\n4 CONN 1 2 down\n7 CONN 2 1 down\n");
    FAIL();
  } catch (const validation_error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("{1,2}"), std::string::npos);
    EXPECT_NE(msg.find("t=7"), std::string::npos);
  }
}

TEST(ParseTrace, SerializeRoundTrip) {
  const std::string text = "0 CONN 93 96 up\n0   CONN 14 93 up\n\n12 CONN 96 93 down\n";
  const auto ev = parse_contact_trace(text);
  const auto again = parse_contact_trace(serialize_contact_trace(ev));
  EXPECT_EQ(ev, again);
  EXPECT_EQ(serialize_contact_trace(again), serialize_contact_trace(ev));
}

TEST(DesignateAps, ExhaustiveSelection) {
  std::vector<node_id> u(10);
  std::iota(u.begin(), u.end(), 0);
  const auto d = designate_aps(u, 10, 3);
  EXPECT_EQ(d.aps, u);
  EXPECT_EQ(d.ring.size(), 10u);
}

TEST(DesignateAps, ReproducibleForSeed) {
  std::vector<node_id> u(97);
  std::iota(u.begin(), u.end(), 0);
  const auto a = designate_aps(u, 15, 42), b = designate_aps(u, 15, 42);
  EXPECT_EQ(a.ring, b.ring);
  EXPECT_EQ(a.aps.size(), 15u);
  EXPECT_EQ(std::adjacent_find(a.aps.begin(), a.aps.end()), a.aps.end());
  for (node_id n : a.aps) EXPECT_LT(n, 97u);
  EXPECT_NE(designate_aps(u, 15, 43).ring, a.ring);
}

TEST(DesignateAps, CountBounds) {
  std::vector<node_id> u{1, 2, 3};
  EXPECT_THROW(designate_aps(u, 0, 1), config_error);
  EXPECT_THROW(designate_aps(u, 4, 1), config_error);
}

TEST(ApList, ParsesRingOrder) {
  std::istringstream in("# ring\n7\n3\n\n5\n");
  const auto d = parse_ap_list(in);
  EXPECT_EQ(d.ring, (std::vector<node_id>{7, 3, 5}));
  EXPECT_EQ(d.aps, (std::vector<node_id>{3, 5, 7}));
  std::istringstream dup("1\n1\n");
  EXPECT_THROW(parse_ap_list(dup), validation_error);
  std::istringstream bad("1 2\n");
  EXPECT_THROW(parse_ap_list(bad), parse_error);
  std::istringstream none("");
  EXPECT_THROW(parse_ap_list(none), config_error);
}

TEST(ContactsPerInterval, SingleContact) {
  const auto c = contacts_per_interval(parse_contact_trace("10 CONN 1 2 up\n"), 100);
  EXPECT_EQ(c.at(0).count({1, 2}), 1u);
  EXPECT_EQ(c.at(0).total, 1u);
}

TEST(ContactsPerInterval, HandCount) {
  const auto c = contacts_per_interval(
      parse_contact_trace("1 CONN 1 2 up\n2 CONN 1 2 down\n3 CONN 2 1 up\n4 CONN 3 4 up\n"), 100);
  EXPECT_EQ(c.at(0).count({1, 2}), 2u);
  EXPECT_EQ(c.at(0).count({3, 4}), 1u);
  EXPECT_EQ(c.at(0).total, 3u);
}

TEST(ContactsPerInterval, EmptyIntervalAndBoundary) {
  const auto c = contacts_per_interval(parse_contact_trace("0 CONN 1 2 up\n200 CONN 3 4 up\n"), 100);
  EXPECT_EQ(c.at(1).total, 0u);
  EXPECT_TRUE(c.at(1).pairs.empty());
  EXPECT_EQ(c.at(2).count({3, 4}), 1u); // t=200 opens interval 2
  EXPECT_EQ(c.at(57).total, 0u);
  EXPECT_THROW(contacts_per_interval({}, 0), config_error);
}

TEST(ContactsPerInterval, TotalsAreConsistent) {
  std::string text;
  for (int i = 0; i < 200; ++i)
    text += std::to_string(i * 37 % 1000) + " CONN " + std::to_string(i % 7) + " " + std::to_string(7 + i % 5) + " up\n";
  const auto c = contacts_per_interval(parse_contact_trace(text), 64);
  for (const auto& tab : c.intervals) {
    std::uint64_t sum = 0;
    for (const auto& [p, n] : tab.pairs) sum += n;
    EXPECT_EQ(sum, tab.total);
  }
}
