#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "stpn/symbolic.hpp"

using namespace stpn;

namespace {

TimeSeriesFrame frame_of(std::vector<std::vector<double>> columns) {
  TimeSeriesFrame f;
  const auto channels = static_cast<int>(columns.size());
  const auto samples = static_cast<long>(columns.front().size());
  for (int c = 0; c < channels; ++c) f.channels.push_back("s" + std::to_string(c + 1));
  f.data.resize(samples, channels);
  for (int c = 0; c < channels; ++c) {
    for (long t = 0; t < samples; ++t) f.data(t, c) = columns[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)];
  }
  return f;
}

}  // namespace

TEST_CASE("uniform partitioner puts edges at equal splits of the training range") {
  SUBCASE("range [0,1], two symbols: single edge at 0.5") {
    const auto f = frame_of({{0.0, 1.0, 0.3}});
    const Partitioner p = fit_partitioner(f, 2);
    const auto e = p.edges(0);
    REQUIRE(e.size() == 1);
    CHECK(e[0] == doctest::Approx(0.5));
  }
  SUBCASE("range [-2,2], four symbols: edges at -1, 0, 1") {
    const auto f = frame_of({{-2.0, 2.0, 0.1}});
    const Partitioner p = fit_partitioner(f, 4);
    const auto e = p.edges(0);
    REQUIRE(e.size() == 3);
    CHECK(e[0] == doctest::Approx(-1.0));
    CHECK(e[1] == doctest::Approx(0.0));
    CHECK(e[2] == doctest::Approx(1.0));
  }
  SUBCASE("constant channel has no range") {
    const auto f = frame_of({{3.0, 3.0, 3.0}});
    CHECK_THROWS_AS(fit_partitioner(f, 2), ValidationError);
  }
  SUBCASE("alphabet below 2 rejected") {
    const auto f = frame_of({{0.0, 1.0}});
    CHECK_THROWS_AS(fit_partitioner(f, 1), ValidationError);
  }
}

TEST_CASE("symbolize: cell membership, edge ties, clamping") {
  const auto train = frame_of({{0.0, 1.0}});
  const Partitioner p = fit_partitioner(train, 2);

  const auto probe = frame_of({{0.25, 0.75, 0.5, -3.0, 42.0}});
  const SymbolFrame s = symbolize(probe, p);
  CHECK(s.symbols(0, 0) == 0);
  CHECK(s.symbols(1, 0) == 1);
  CHECK(s.symbols(2, 0) == 1);  // edge value belongs to the upper cell
  CHECK(s.symbols(3, 0) == 0);  // clamped below
  CHECK(s.symbols(4, 0) == 1);  // clamped above

  SUBCASE("channel mismatch") {
    const auto two = frame_of({{0.0, 1.0}, {0.0, 1.0}});
    CHECK_THROWS_AS(symbolize(two, p), ValidationError);
  }
}

TEST_CASE("states: positional encoding of symbol histories") {
  SUBCASE("depth 1 leaves symbols unchanged") {
    const auto f = frame_of({{0.1, 0.9, 0.1, 0.9}});
    const Partitioner p = fit_partitioner(f, 2);
    const SymbolFrame s = symbolize(f, p);
    const StateFrame q = states(s, 1);
    REQUIRE(q.length() == 4);
    CHECK(q.states(0, 0) == 0);
    CHECK(q.states(1, 0) == 1);
    CHECK(q.states(2, 0) == 0);
    CHECK(q.states(3, 0) == 1);
    CHECK(q.state_counts[0] == 2);
  }
  SUBCASE("depth 2 over binary symbols [0,1,1] encodes pairs 01->1, 11->3") {
    SymbolFrame s;
    s.symbols.resize(3, 1);
    s.symbols << 0, 1, 1;
    s.alphabet_sizes = {2};
    const StateFrame q = states(s, 2);
    REQUIRE(q.length() == 2);
    CHECK(q.states(0, 0) == 1);
    CHECK(q.states(1, 0) == 3);
    CHECK(q.state_counts[0] == 4);
  }
  SUBCASE("sequence shorter than the depth") {
    SymbolFrame s;
    s.symbols.resize(1, 1);
    s.symbols << 0;
    s.alphabet_sizes = {2};
    CHECK_THROWS_AS(states(s, 2), ValidationError);
  }
}

TEST_CASE("symbolization is monotone per channel") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> val(-5.0, 5.0);
  std::uniform_int_distribution<int> sigma(2, 8);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> train(64);
    for (auto& v : train) v = val(rng);
    const auto f = frame_of({train});
    const Partitioner p = fit_partitioner(f, sigma(rng));
    double v1 = val(rng), v2 = val(rng);
    if (v1 > v2) std::swap(v1, v2);
    CHECK(p.symbol(0, v1) <= p.symbol(0, v2));
  }
}

TEST_CASE("a symbol's cell contains the in-range value it came from") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> val(0.0, 10.0);
  std::vector<double> train(128);
  for (auto& v : train) v = val(rng);
  const auto f = frame_of({train});
  const int sigma = 5;
  const Partitioner p = fit_partitioner(f, sigma);
  const auto& ch = p.channels[0];
  const double width = (ch.hi - ch.lo) / sigma;
  for (double v : train) {
    const int s = p.symbol(0, v);
    const double cell_lo = ch.lo + s * width;
    const double cell_hi = ch.lo + (s + 1) * width;
    CHECK(v >= cell_lo - 1e-12);
    CHECK(v <= cell_hi + 1e-12);
  }
}

TEST_CASE("depth-1 states equal symbols for random sequences") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> a(40), b(40);
    for (auto& v : a) v = val(rng);
    for (auto& v : b) v = val(rng);
    const auto f = frame_of({a, b});
    const Partitioner p = fit_partitioner(f, 4);
    const SymbolFrame s = symbolize(f, p);
    const StateFrame q = states(s, 1);
    CHECK(q.states == s.symbols);
  }
}
