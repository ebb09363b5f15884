#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "stpn/timeseries.hpp"

using namespace stpn;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "stpn_ts_tests";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path p = temp_file(name);
  std::ofstream out(p);
  out << content;
  return p;
}

TimeSeriesFrame ramp_frame(long samples, int channels) {
  TimeSeriesFrame f;
  for (int c = 0; c < channels; ++c) f.channels.push_back("s" + std::to_string(c + 1));
  f.data.resize(samples, channels);
  for (long t = 0; t < samples; ++t) {
    for (int c = 0; c < channels; ++c) f.data(t, c) = static_cast<double>(t + 100 * c);
  }
  return f;
}

}  // namespace

TEST_CASE("load_csv parses a plain numeric file") {
  std::string body = "s1,s2,s3\n";
  for (int i = 0; i < 100; ++i) {
    body += std::to_string(i) + "," + std::to_string(2 * i) + "," + std::to_string(3 * i) + "\n";
  }
  const auto path = write_file("plain.csv", body);
  const LoadResult r = load_csv(path.string());
  CHECK(r.frame.samples() == 100);
  CHECK(r.frame.channel_count() == 3);
  CHECK(r.dropped_rows == 0);
  CHECK(r.frame.channels == std::vector<std::string>{"s1", "s2", "s3"});
  CHECK(r.frame.data(5, 1) == doctest::Approx(10.0));
}

TEST_CASE("load_csv drops rows holding non-finite values and counts them") {
  std::string body = "a,b\n";
  for (int i = 0; i < 50; ++i) body += "1,2\n";
  body += "NaN,2\n";
  for (int i = 0; i < 49; ++i) body += "3,4\n";
  const auto path = write_file("nan.csv", body);
  const LoadResult r = load_csv(path.string());
  CHECK(r.frame.samples() == 99);
  CHECK(r.dropped_rows == 1);
}

TEST_CASE("load_csv error paths") {
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_csv("/nonexistent/nowhere.csv"), ValidationError);
  }
  SUBCASE("empty body") {
    const auto path = write_file("header_only.csv", "a,b\n");
    CHECK_THROWS_AS(load_csv(path.string()), ValidationError);
  }
  SUBCASE("schema channel absent") {
    const auto path = write_file("schema.csv", "a,b\n1,2\n");
    CHECK_THROWS_WITH_AS(load_csv(path.string(), {{"a", "s7"}}),
                         doctest::Contains("s7"), ValidationError);
  }
  SUBCASE("non-numeric cell is an error, not a dropped row") {
    const auto path = write_file("text_cell.csv", "a,b\n1,2\n1,oops\n");
    CHECK_THROWS_AS(load_csv(path.string()), ValidationError);
  }
  SUBCASE("ragged row") {
    const auto path = write_file("ragged.csv", "a,b\n1,2\n1\n");
    CHECK_THROWS_AS(load_csv(path.string()), ValidationError);
  }
}

TEST_CASE("load_csv schema selects and reorders columns") {
  const auto path = write_file("reorder.csv", "a,b,c\n1,2,3\n4,5,6\n");
  const LoadResult r = load_csv(path.string(), {{"c", "a"}});
  CHECK(r.frame.channels == std::vector<std::string>{"c", "a"});
  CHECK(r.frame.data(0, 0) == doctest::Approx(3.0));
  CHECK(r.frame.data(1, 1) == doctest::Approx(4.0));
}

TEST_CASE("csv round trip preserves values") {
  const TimeSeriesFrame f = ramp_frame(17, 3);
  const auto path = temp_file("roundtrip.csv");
  write_csv(f, path.string());
  const LoadResult r = load_csv(path.string());
  CHECK(r.frame.channels == f.channels);
  CHECK(r.frame.data.isApprox(f.data));
}

TEST_CASE("windows: counts and coverage") {
  const TimeSeriesFrame f = ramp_frame(10, 2);
  SUBCASE("T=10 L=5 stride=5 gives two non-overlapping windows") {
    const auto w = windows(f, {5, 5});
    REQUIRE(w.size() == 2);
    CHECK(w[0].data(0, 0) == doctest::Approx(0.0));
    CHECK(w[0].data(4, 0) == doctest::Approx(4.0));
    CHECK(w[1].data(0, 0) == doctest::Approx(5.0));
    CHECK(w[1].data(4, 0) == doctest::Approx(9.0));
  }
  SUBCASE("T=10 L=5 stride=1 gives six windows") {
    CHECK(windows(f, {5, 1}).size() == 6);
  }
  SUBCASE("frame shorter than the window is an error") {
    const TimeSeriesFrame tiny = ramp_frame(4, 2);
    CHECK_THROWS_AS(windows(tiny, {5, 1}), ValidationError);
  }
}

TEST_CASE("windowing at stride == length is lossless on divisible frames") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> len(2, 9);
  for (int rep = 0; rep < 20; ++rep) {
    const int l = len(rng);
    const int k = len(rng);
    const TimeSeriesFrame f = ramp_frame(static_cast<long>(l) * k, 3);
    const auto w = windows(f, {l, l});
    REQUIRE(static_cast<int>(w.size()) == k);
    CHECK(concat(w).data.isApprox(f.data));
  }
}

TEST_CASE("window count formula holds for random shapes") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<long> t_dist(2, 400);
  for (int rep = 0; rep < 200; ++rep) {
    const long t = t_dist(rng);
    std::uniform_int_distribution<int> l_dist(2, static_cast<int>(t));
    const int l = l_dist(rng);
    std::uniform_int_distribution<int> s_dist(1, 50);
    const int s = s_dist(rng);
    const TimeSeriesFrame f = ramp_frame(t, 1);
    const auto w = windows(f, {l, s});
    CHECK(static_cast<long>(w.size()) == (t - l) / s + 1);
    for (const auto& win : w) CHECK(win.samples() == l);
  }
}
