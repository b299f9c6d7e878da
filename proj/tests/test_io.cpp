#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "projcap/io.hpp"

using namespace projcap;

TEST(Io, NumbersWithInfinity) {
  EXPECT_EQ(io::number(kInf), "inf");
  EXPECT_EQ(io::number(kNegInf), "-inf");
  EXPECT_EQ(io::to_number(io::Json("-inf")), kNegInf);
  EXPECT_EQ(io::to_number(io::Json(0.25)), 0.25);
  EXPECT_THROW(io::to_number(io::Json("x")), Error);
}

TEST(Io, PointRoundTrip) {
  auto pts = sample_fs(3, 20, 1);
  auto back = io::points_from_json(io::Json::parse(io::points_json(pts).dump()));
  ASSERT_EQ(back.size(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_LT(sine_distance(pts[i], back[i]), 1e-15);
}

TEST(Io, MeasureRoundTrip) {
  auto pts = sample_fs(2, 5, 2);
  DiscreteMeasure mu(pts, {0.1, 0.2, 0.3, 0.15, 0.25});
  auto j = io::measure_json(mu);
  EXPECT_EQ(j["atoms"][0].size(), 2u);
  auto back = io::measure_from_json(io::Json::parse(j.dump()));
  EXPECT_EQ(back.weights(), mu.weights());
  EXPECT_EQ(energy(back).value, energy(mu).value);
}

TEST(Io, Errors) {
  EXPECT_THROW(io::point_from_json(io::Json::parse(R"({"re":[1],"im":[0]})")), Error);
  EXPECT_THROW(io::measure_from_json(io::Json::parse(R"({"atoms":[[[1,0]]],"weights":[1]})")), Error);
  EXPECT_THROW(io::read_json_file("/nonexistent/file.json"), Error);
  EXPECT_THROW(io::points_from_json(io::Json::parse(R"([{"re":[1,0],"im":[0,0]},{"re":[1,0,0],"im":[0,0,0]}])")),
               Error);
}

TEST(Io, FileRoundTrip) {
  auto path = (std::filesystem::temp_directory_path() / "projcap_io_test.json").string();
  auto pts = sample_fs(1, 4, 3);
  io::write_text(path, io::points_json(pts).dump());
  auto back = io::read_points_file(path);
  EXPECT_EQ(back.size(), 4u);
  std::filesystem::remove(path);
}

TEST(Io, CsvNumberRoundTrips) {
  double v = 0.1 + 0.2;
  EXPECT_EQ(std::stod(io::csv_number(v)), v);
  EXPECT_EQ(io::csv_number(kNegInf), "-inf");
}
