#include <rankad/dataset.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace rankad;

namespace {

Dataset parse(const std::string& text, CsvOptions opts = {}) {
  std::istringstream in(text);
  return parse_csv(in, opts);
}

}  // namespace

TEST(Dataset, AddAndIndex) {
  Dataset d(2);
  const double a[] = {1.0, 2.0}, b[] = {3.0, 4.0};
  d.add(a);
  d.add(b);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.dim(), 2u);
  EXPECT_DOUBLE_EQ(d[1][0], 3.0);
  EXPECT_DOUBLE_EQ(d.point(0)[1], 2.0);
  EXPECT_FALSE(d.has_labels());
}

TEST(Dataset, RejectsWrongDimensionAndNonFinite) {
  Dataset d(2);
  const double three[] = {1.0, 2.0, 3.0};
  EXPECT_THROW(d.add(three), DimensionMismatch);
  const double bad[] = {1.0, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(d.add(bad), InvalidArgument);
  const double inf[] = {std::numeric_limits<double>::infinity(), 0.0};
  EXPECT_THROW(d.add(inf), InvalidArgument);
}

TEST(Dataset, LabeledAndUnlabeledDoNotMix) {
  Dataset d(1);
  const double x[] = {0.0};
  d.add(x, Label::anomalous);
  EXPECT_THROW(d.add(x), InvalidArgument);
  Dataset u(1);
  u.add(x);
  EXPECT_THROW(u.add(x, Label::nominal), InvalidArgument);
}

TEST(Dataset, SubsetFilterUnlabeled) {
  Dataset d(1);
  for (int i = 0; i < 6; ++i) {
    const double x[] = {static_cast<double>(i)};
    d.add(x, i % 2 ? Label::anomalous : Label::nominal);
  }
  const std::size_t idx[] = {5, 0};
  auto s = d.subset(idx);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s[0][0], 5.0);
  EXPECT_EQ(s.label(0), Label::anomalous);
  auto anom = d.filter(Label::anomalous);
  ASSERT_EQ(anom.size(), 3u);
  EXPECT_DOUBLE_EQ(anom[2][0], 5.0);
  auto plain = d.unlabeled();
  EXPECT_FALSE(plain.has_labels());
  EXPECT_EQ(plain.size(), 6u);
}

TEST(Csv, ParsesHeaderAndRows) {
  auto d = parse("x0,x1\n1,2\n 3.5 , -4e-1\n\n");
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.dim(), 2u);
  EXPECT_DOUBLE_EQ(d[1][0], 3.5);
  EXPECT_DOUBLE_EQ(d[1][1], -0.4);
}

TEST(Csv, HeaderlessOption) {
  CsvOptions opts;
  opts.has_header = false;
  auto d = parse("1,2\n3,4\n", opts);
  EXPECT_EQ(d.size(), 2u);
}

TEST(Csv, LabelColumn) {
  CsvOptions opts;
  opts.label_column = 2;
  auto d = parse("x0,x1,label\n1,2,0\n3,4,1\n", opts);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.dim(), 2u);
  EXPECT_EQ(d.label(0), Label::nominal);
  EXPECT_EQ(d.label(1), Label::anomalous);
  EXPECT_THROW(parse("a,b,l\n1,2,2\n", opts), ParseError);
}

TEST(Csv, NonNumericCellNamesRowAndColumn) {
  try {
    parse("x0,x1\n1,2\n3,abc\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column 2"), std::string::npos) << msg;
  }
}

TEST(Csv, RaggedRowsRejected) { EXPECT_THROW(parse("x0,x1\n1,2\n3\n"), ParseError); }

TEST(Csv, EmptyFile) {
  EXPECT_THROW(parse("x0,x1\n"), Error);
  CsvOptions opts;
  opts.allow_empty = true;
  EXPECT_TRUE(parse("x0,x1\n", opts).empty());
}

TEST(Csv, RoundTripIsExact) {
  Dataset d(3);
  const double a[] = {0.1, 1.0 / 3.0, -1e-300};
  const double b[] = {12345.678901234567, -0.0, 5e300};
  d.add(a, Label::nominal);
  d.add(b, Label::anomalous);
  std::stringstream buf;
  write_csv(buf, d);
  EXPECT_EQ(buf.str().substr(0, buf.str().find('\n')), "x0,x1,x2,label");
  CsvOptions opts;
  opts.label_column = 3;
  auto back = parse_csv(buf, opts);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.label(i), d.label(i));
    for (std::size_t a = 0; a < 3; ++a) EXPECT_EQ(back[i][a], d[i][a]);
  }
}
