#include <gtest/gtest.h>

#include "contactkit/config.hpp"
#include "contactkit/errors.hpp"

using namespace contactkit;

TEST(KeyValueConfig, TypedGetters) {
  const auto cfg = KeyValueConfig::parse(
      "; comment\n[a]\nx = 1.5\nn = 3\nflag = true\nv = 1 2 3\nname = hello\n[b]\nlist = 0.5 -1e-3\n");
  EXPECT_EQ(cfg.get_double("a.x"), 1.5);
  EXPECT_EQ(cfg.get_int("a.n"), 3);
  EXPECT_TRUE(cfg.get_bool("a.flag", false));
  EXPECT_EQ(cfg.get_vec3("a.v"), Vec3(1, 2, 3));
  EXPECT_EQ(cfg.get_string("a.name"), "hello");
  EXPECT_EQ(cfg.get_doubles("b.list"), (std::vector<double>{0.5, -1e-3}));
  EXPECT_EQ(cfg.get_double("a.missing", 7.0), 7.0);
  EXPECT_TRUE(cfg.has("b.list"));
  EXPECT_FALSE(cfg.has("b.nope"));
}

TEST(KeyValueConfig, ErrorsNameTheKey) {
  const auto cfg = KeyValueConfig::parse("[a]\nx = abc\nn = 1.5\nv = 1 2\nflag = maybe\n");
  const auto expect_key = [](auto fn, const std::string& key) {
    try {
      fn();
      FAIL() << "expected ConfigError for " << key;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
    }
  };
  expect_key([&] { (void)cfg.get_double("a.x"); }, "a.x");
  expect_key([&] { (void)cfg.get_int("a.n"); }, "a.n");
  expect_key([&] { (void)cfg.get_vec3("a.v"); }, "a.v");
  expect_key([&] { (void)cfg.get_bool("a.flag", false); }, "a.flag");
  expect_key([&] { (void)cfg.get_double("a.absent"); }, "a.absent");
  EXPECT_THROW(KeyValueConfig::parse("[unterminated\nx=1"), ConfigError);
}

TEST(KeyValueConfig, CanonicalTextIgnoresOrder) {
  const auto a = KeyValueConfig::parse("[s]\nx = 1\ny = 2\n[t]\nz = 3\n");
  const auto b = KeyValueConfig::parse("[t]\nz = 3\n[s]\ny = 2\nx = 1\n");
  EXPECT_EQ(a.canonical_text(), b.canonical_text());
  auto c = a;
  c.set("s.x", "5");
  EXPECT_NE(a.canonical_text(), c.canonical_text());
  EXPECT_EQ(c.get_double("s.x"), 5.0);
}
