#include <gtest/gtest.h>

#include "oidcsim/codec.hpp"
#include "oidcsim/rng.hpp"
#include "oidcsim/url.hpp"

namespace oidcsim {
namespace {

// Expected values below were produced with Python's base64, hmac and
// urllib.parse modules.

TEST(Base64Url, EncodesTheClassicVectorsWithoutPadding) {
  EXPECT_EQ(base64url_encode(""), "");
  EXPECT_EQ(base64url_encode("f"), "Zg");
  EXPECT_EQ(base64url_encode("fo"), "Zm8");
  EXPECT_EQ(base64url_encode("foo"), "Zm9v");
  EXPECT_EQ(base64url_encode("foob"), "Zm9vYg");
  EXPECT_EQ(base64url_encode("fooba"), "Zm9vYmE");
  EXPECT_EQ(base64url_encode("foobar"), "Zm9vYmFy");
  EXPECT_EQ(base64url_encode("\xfb\xff\xfe"), "-__-");
}

TEST(Base64Url, RoundTripsEveryByte) {
  std::string all;
  for (int i = 0; i < 256; ++i) all.push_back(static_cast<char>(i));
  for (std::size_t n = 0; n <= all.size(); n += 7) {
    const auto prefix = all.substr(0, n);
    EXPECT_EQ(base64url_decode(base64url_encode(prefix)), prefix);
  }
}

TEST(Base64Url, RejectsMalformedInput) {
  EXPECT_FALSE(base64url_decode("Z"));        // impossible length
  EXPECT_FALSE(base64url_decode("Zm9v+A"));   // standard alphabet
  EXPECT_FALSE(base64url_decode("Zm9v="));    // padding
  EXPECT_FALSE(base64url_decode("Zh"));       // non-zero trailing bits
  EXPECT_EQ(base64url_decode("Zg"), "f");
}

TEST(HmacSha256, MatchesRfc4231Case2) {
  const auto mac = hmac_sha256("Jefe", "what do ya want for nothing?");
  std::string hex;
  static constexpr char kHex[] = "0123456789abcdef";
  for (auto b : mac) {
    hex.push_back(kHex[b >> 4]);
    hex.push_back(kHex[b & 15]);
  }
  EXPECT_EQ(hex, "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST(ConstantTimeEqual, ComparesContentAndLength) {
  EXPECT_TRUE(constant_time_equal("abc", "abc"));
  EXPECT_FALSE(constant_time_equal("abc", "abd"));
  EXPECT_FALSE(constant_time_equal("abc", "abcd"));
}

TEST(Hashing, MatchesReferenceValues) {
  EXPECT_EQ(fnv1a(""), 14695981039346656037ull);
  EXPECT_EQ(fnv1a("a"), 12638187200555641996ull);
  EXPECT_EQ(fnv1a("rp-A"), 17047482621900386997ull);
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafull);
  EXPECT_EQ(splitmix64(1), 0x910a2dec89025cc1ull);
}

TEST(SeededRng, TokensAre22UrlSafeCharsAndReproducible) {
  SeededRng a(42), b(42), c(43);
  const auto t = a.token();
  EXPECT_EQ(t.size(), 22u);
  EXPECT_EQ(t.find_first_not_of("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_"), std::string::npos);
  EXPECT_EQ(t, b.token());
  EXPECT_NE(t, c.token());
  EXPECT_EQ(base64url_decode(t)->size(), 16u);
}

TEST(Url, PercentEncodingMatchesPython) {
  EXPECT_EQ(percent_encode("a b&c=d/\xc3\xa9~"), "a%20b%26c%3Dd%2F%C3%A9~");
  EXPECT_EQ(percent_decode("a%20b%26c%3Dd%2F%C3%A9~"), "a b&c=d/\xc3\xa9~");
  EXPECT_EQ(percent_decode("100%"), "100%");
}

TEST(Url, ParsesAndSerializes) {
  const auto u = Url::parse("http://rp.example/callback?code=a%2Bb&state=null#access_token=x");
  EXPECT_EQ(u.scheme, "http");
  EXPECT_EQ(u.host, "rp.example");
  EXPECT_EQ(u.path, "/callback");
  EXPECT_EQ(find_param(u.query, "code"), "a+b");
  EXPECT_EQ(u.fragment, "access_token=x");
  EXPECT_EQ(u.without_fragment(), "http://rp.example/callback?code=a%2Bb&state=null");
  EXPECT_EQ(Url::parse(u.str()), u);
  EXPECT_EQ(u.origin(), "http://rp.example");
}

TEST(Url, ParamsKeepOrderAndDuplicates) {
  const Params p{{"b", "2"}, {"a", "1"}, {"b", "3"}};
  EXPECT_EQ(parse_params(encode_params(p)), p);
  EXPECT_EQ(find_param(p, "b"), "2");
  EXPECT_FALSE(find_param(p, "c"));
}

}  // namespace
}  // namespace oidcsim
