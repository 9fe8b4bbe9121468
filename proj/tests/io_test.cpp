#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "riskcut/io.hpp"
#include "test_data.hpp"

using namespace riskcut;

namespace {

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset_csv(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ParseCsv, MapsZeroToNegative) {
  const Dataset data = parse("label,score\n1,0.7\n0,0.2\n");
  ASSERT_EQ(data.size(), 2u);
  EXPECT_EQ(data[0].label, 1);
  EXPECT_EQ(data[0].score, 0.7);
  EXPECT_EQ(data[1].label, -1);
  EXPECT_EQ(data[1].score, 0.2);
}

TEST(ParseCsv, AcceptsSignedLabelsAndCrlf) {
  const Dataset data = parse("label,score\r\n-1,1e-3\r\n1, -2.5 \r\n");
  ASSERT_EQ(data.size(), 2u);
  EXPECT_EQ(data[0].label, -1);
  EXPECT_EQ(data[0].score, 1e-3);
  EXPECT_EQ(data[1].score, -2.5);
}

TEST(ParseCsv, Errors) {
  EXPECT_EQ(error_of("label,score\n1,abc\n"), "line 2: invalid score");
  EXPECT_EQ(error_of("label,score\n2,0.5\n"), "line 2: invalid label");
  EXPECT_EQ(error_of("label,score\n1,0.5\n1,nan\n"), "line 3: invalid score");
  EXPECT_EQ(error_of("label,score\n1,inf\n"), "line 2: invalid score");
  EXPECT_EQ(error_of("label,score\n1,0.5,3\n"), "line 2: expected 2 fields");
  EXPECT_EQ(error_of(""), "empty file");
  EXPECT_EQ(error_of("score,label\n0.5,1\n"), "line 1: expected header 'label,score'");
  EXPECT_EQ(error_of("label,score\n"), "no data rows");
  EXPECT_THROW(read_dataset_csv("/nonexistent/file.csv"), DataError);
}

TEST(WriteCsv, RoundTripIsExact) {
  std::mt19937_64 rng(17);
  const Dataset data = fixtures::random_dataset(rng, 500);
  std::ostringstream out;
  write_dataset_csv(out, data);
  const Dataset back = parse(out.str());
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(back[i].label, data[i].label);
    EXPECT_EQ(back[i].score, data[i].score);
  }
}

TEST(FormatNumber, TwelveSignificantDigits) {
  EXPECT_EQ(format_number(0.275), "0.275");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(1e-20), "1e-20");
  EXPECT_EQ(format_number(-2.0), "-2");
}
