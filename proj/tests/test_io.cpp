#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bfw/bfw.hpp"

namespace {

using namespace bfw;

TEST(Parse, MixedSeparators) {
  const auto d = parse_dataset("1.0 2.0\n3.0");
  EXPECT_EQ(d.times, (std::vector<double>{1.0, 2.0, 3.0}));
  const auto e = parse_dataset("1,2, 3\t4\r\n\n+5e-1,\n");
  EXPECT_EQ(e.times, (std::vector<double>{1.0, 2.0, 3.0, 4.0, 0.5}));
}

TEST(Parse, FullPrecisionRoundTrip) {
  const double v = 0.1 + 0.2;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  EXPECT_EQ(parse_dataset(buf).times[0], v);
}

void expect_parse_error(std::string_view text, std::size_t line, std::size_t column) {
  try {
    parse_dataset(text);
    FAIL() << "expected parse_error for '" << text << "'";
  } catch (const parse_error& e) {
    EXPECT_EQ(e.line(), line) << text;
    EXPECT_EQ(e.column(), column) << text;
  }
}

TEST(Parse, ErrorsCarryPosition) {
  expect_parse_error("-1.0", 1, 1);
  expect_parse_error("1.0 2.0\n3.0 0", 2, 5);
  expect_parse_error("1.0\n  abc", 2, 3);
  expect_parse_error("1.0,1.5x", 1, 5);
  expect_parse_error("inf", 1, 1);
  expect_parse_error("nan", 1, 1);
  expect_parse_error("", 1, 1);
  expect_parse_error("\n \n", 2, 1);
}

TEST(Ingest, BuiltinPumps) {
  const auto d = ingest("pumps");
  ASSERT_EQ(d.size(), 23u);
  EXPECT_EQ(d.times.front(), 2.160);
  EXPECT_EQ(d.times.back(), 5.320);
  EXPECT_EQ(*std::max_element(d.times.begin(), d.times.end()), 6.560);
  const auto h = ingest("pumps-hundreds");
  ASSERT_EQ(h.size(), 23u);
  for (std::size_t i = 0; i < 23; ++i) EXPECT_NEAR(h.times[i], 10.0 * d.times[i], 1e-12);
}

TEST(Ingest, FileAndMissingFile) {
  const auto path = std::filesystem::temp_directory_path() / "bfw_test_io_data.txt";
  {
    std::ofstream out(path);
    out << "0.5, 1.5\n2.5\n";
  }
  const auto d = ingest(path.string());
  EXPECT_EQ(d.times, (std::vector<double>{0.5, 1.5, 2.5}));
  EXPECT_EQ(d.label, "bfw_test_io_data.txt");
  std::filesystem::remove(path);
  EXPECT_THROW(ingest(path.string()), io_error);
}

}  // namespace
