#include <sstream>

#include "cdsim/scenarios.hpp"
#include "doctest.h"

using namespace cdsim;

namespace {

std::string csv(const std::vector<MetricsRecord>& records) {
  std::ostringstream out;
  emit_csv(records, out);
  return out.str();
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

MetricsRecord record(Algorithm a, std::size_t n, std::uint64_t seed, double lifetime) {
  MetricsRecord r;
  r.algorithm = a;
  r.nodes = n;
  r.v_max = 5.0;
  r.seed = seed;
  r.lifetime = lifetime;
  r.cds_size_mean = 10.0;
  r.sent = 3;
  r.delivered = 2;
  r.rreq_total = 7;
  return r;
}

ScenarioConfig quick_matrix() {
  ScenarioConfig c;
  c.node_counts = {20};
  c.v_max = {5.0};
  c.algorithms = {Algorithm::EasCds, Algorithm::WuEmpr};
  c.duration = 8.0;
  return c;
}

}  // namespace

TEST_CASE("empty config gives the reference defaults") {
  const auto c = parse_config("");
  CHECK(c == ScenarioConfig{});
  CHECK(c.node_counts == std::vector<std::size_t>{50, 100, 150, 200, 250});
  CHECK(c.range == 250.0);
  CHECK(c.v_max == std::vector<double>{5, 15, 25});
  CHECK(c.duration == 600.0);
  CHECK(c.flows == 20);
  CHECK(c.packet_rate == 5.0);
  CHECK(c.packet_size == 512);
  CHECK(c.pause == 100.0);
  CHECK(c.energy_min == 1.0);
  CHECK(c.energy_max == 15.0);
  CHECK(c.area == Area{1000, 1000});
  CHECK(c.power == PowerRatings{1.4, 1.0, 0.013});
  CHECK(c.seeds.size() == 10);
}

TEST_CASE("config parsing") {
  SUBCASE("overrides only the named key") {
    const auto c = parse_config("nodes = 50,100\n");
    CHECK(c.node_counts == std::vector<std::size_t>{50, 100});
    ScenarioConfig expected;
    expected.node_counts = {50, 100};
    CHECK(c == expected);
  }
  SUBCASE("comments, blanks, ranges, modes") {
    const auto c = parse_config(
        "# header\n\n  seeds = 3..5, 9  # trailing\nalgorithms = EAS_CDS, CHEN_DEMPR\nmode = both\n");
    CHECK(c.seeds == std::vector<std::uint64_t>{3, 4, 5, 9});
    CHECK(c.algorithms == std::vector<Algorithm>{Algorithm::EasCds, Algorithm::ChenDempr});
    CHECK(c.modes == std::vector<RouteMode>{RouteMode::Cds, RouteMode::Flooding});
    CHECK(parse_config("mode = flooding").modes == std::vector<RouteMode>{RouteMode::Flooding});
    CHECK(parse_config("pause = 0").pause == 0.0);
  }
  SUBCASE("errors name the line and key") {
    try {
      parse_config("nodes = 10\nrange = -5\n");
      FAIL("expected an error");
    } catch (const ConfigError& e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("range") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("colour = blue"), ConfigError);
    CHECK_THROWS_AS(parse_config("range 250"), ConfigError);
    CHECK_THROWS_AS(parse_config("range ="), ConfigError);
    CHECK_THROWS_AS(parse_config("nodes = 0"), ConfigError);
    CHECK_THROWS_AS(parse_config("nodes = 5.5"), ConfigError);
    CHECK_THROWS_AS(parse_config("duration = 1e999"), ConfigError);
    CHECK_THROWS_AS(parse_config("seeds = 5..2"), ConfigError);
    CHECK_THROWS_AS(parse_config("algorithms = FASTEST"), ConfigError);
    CHECK_THROWS_AS(parse_config("mode = sometimes"), ConfigError);
    CHECK_THROWS_AS(parse_config("pause = -1"), ConfigError);
    CHECK_THROWS_AS(parse_config("energy_min = 5\nenergy_max = 2"), ConfigError);
  }
}

TEST_CASE("format then parse reproduces the config") {
  CHECK(parse_config(format_config(ScenarioConfig{})) == ScenarioConfig{});
  ScenarioConfig c;
  c.area = {777.25, 1234.5};
  c.node_counts = {7};
  c.v_max = {0.1, 2.0 / 3.0};
  c.seeds = {42};
  c.algorithms = {Algorithm::MinVelocity};
  c.modes = {RouteMode::Flooding};
  c.power.idle_w = 1e-7;
  CHECK(parse_config(format_config(c)) == c);
}

TEST_CASE("matrix expansion") {
  ScenarioConfig c;
  c.node_counts = {50};
  c.v_max = {5};
  c.algorithms = {Algorithm::EasCds, Algorithm::WuEmpr};
  CHECK(expand_matrix(c).size() == 20);
  ScenarioConfig full;
  full.algorithms = {Algorithm::EasCds, Algorithm::WuEmpr};
  CHECK(expand_matrix(full).size() == 300);
  full.modes = {RouteMode::Cds, RouteMode::Flooding};
  CHECK(expand_matrix(full).size() == 600);
  const auto shifted = expand_matrix(c, 100);
  CHECK(shifted.front().seed == 101);
}

TEST_CASE("matrix runs are complete and independent of scheduling") {
  const auto c = quick_matrix();
  std::size_t streamed = 0;
  MatrixOptions serial;
  serial.on_record = [&](const MetricsRecord&) { ++streamed; };
  const auto a = run_matrix(c, serial);
  CHECK(a.size() == 20);
  CHECK(streamed == 20);
  MatrixOptions parallel;
  parallel.jobs = 4;
  const auto b = run_matrix(c, parallel);
  CHECK(csv(a) == csv(b));
  CHECK(csv(a) == csv(run_matrix(c, serial)));
  for (const auto& r : a) CHECK_FALSE(r.failed);
}

TEST_CASE("CSV emission") {
  CHECK(csv({}) == "algorithm,mode,n,v_max,seed,cds_size_mean,lifetime_s,rreq_total,sent,delivered,pdr\n");
  const auto one = csv({record(Algorithm::EasCds, 50, 1, 12.5)});
  CHECK(line_count(one) == 2);
  CHECK(one.substr(one.find('\n') + 1) == "EAS_CDS,cds,50,5,1,10,12.5,7,3,2,0.666667\n");

  // Rows come out sorted whatever the input order.
  const auto sorted = csv({record(Algorithm::WuEmpr, 50, 2, 1), record(Algorithm::EasCds, 100, 1, 1),
                           record(Algorithm::EasCds, 50, 3, 1), record(Algorithm::EasCds, 50, 2, 1)});
  std::istringstream lines(sorted);
  std::string line;
  std::getline(lines, line);
  std::vector<std::string> keys;
  while (std::getline(lines, line)) keys.push_back(line.substr(0, line.find(",10,")));
  CHECK(keys == std::vector<std::string>{"EAS_CDS,cds,50,5,2", "EAS_CDS,cds,50,5,3",
                                         "EAS_CDS,cds,100,5,1", "WU_EMPR,cds,50,5,2"});

  auto failed = record(Algorithm::EasCds, 50, 1, 0);
  failed.failed = true;
  const auto na = csv({failed});
  CHECK(na.substr(na.find('\n') + 1) == "EAS_CDS,cds,50,5,1,NA,NA,NA,NA,NA,NA\n");

  auto nothing = record(Algorithm::EasCds, 50, 1, 0);
  nothing.sent = 0;
  nothing.delivered = 0;
  CHECK(csv({nothing}).find(",0,0,0\n") != std::string::npos);

  CHECK_THROWS_AS(emit_csv({}, std::filesystem::path("/nonexistent-dir/x.csv")), Error);
}

TEST_CASE("CSV read back") {
  auto failed = record(Algorithm::ChenDempr, 20, 4, 0);
  failed.failed = true;
  const std::vector<MetricsRecord> in = {record(Algorithm::EasCds, 50, 1, 12.5), failed};
  std::istringstream text(csv(in));
  const auto back = read_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(csv(back) == csv(in));
  CHECK(back[0].failed);  // CHEN_DEMPR sorts first

  std::istringstream bad_header("a,b\n");
  CHECK_THROWS_AS(read_csv(bad_header), Error);
  std::istringstream short_row(
      "algorithm,mode,n,v_max,seed,cds_size_mean,lifetime_s,rreq_total,sent,delivered,pdr\nEAS_CDS,cds\n");
  CHECK_THROWS_AS(read_csv(short_row), Error);
}

TEST_CASE("summaries") {
  SUBCASE("single record") {
    const auto rows = summarize({record(Algorithm::EasCds, 50, 1, 12.5)}, Algorithm::WuEmpr);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].lifetime.mean == 12.5);
    CHECK(rows[0].lifetime.stddev == 0.0);
    CHECK_FALSE(rows[0].lifetime_vs_base.has_value());
  }
  SUBCASE("sample deviation and improvement") {
    const auto rows = summarize({record(Algorithm::EasCds, 50, 1, 10), record(Algorithm::EasCds, 50, 2, 14),
                                 record(Algorithm::WuEmpr, 50, 1, 8), record(Algorithm::WuEmpr, 50, 2, 12)},
                                Algorithm::WuEmpr);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].algorithm == Algorithm::EasCds);
    CHECK(rows[0].lifetime.mean == 12.0);
    CHECK(rows[0].lifetime.stddev == doctest::Approx(std::sqrt(8.0)));
    REQUIRE(rows[0].lifetime_vs_base.has_value());
    CHECK(*rows[0].lifetime_vs_base == doctest::Approx((12.0 - 10.0) / 10.0));
    CHECK(*rows[1].lifetime_vs_base == 0.0);
  }
  SUBCASE("groups without a successful run are dropped with a warning") {
    auto failed = record(Algorithm::EasCds, 50, 1, 0);
    failed.failed = true;
    std::vector<std::string> warnings;
    const auto rows = summarize({failed, record(Algorithm::WuEmpr, 50, 1, 3)}, Algorithm::WuEmpr, &warnings);
    CHECK(rows.size() == 1);
    CHECK(warnings.size() == 1);
  }
  SUBCASE("written table") {
    std::ostringstream out;
    write_summary(summarize({record(Algorithm::EasCds, 50, 1, 12.5)}, Algorithm::EasCds), out);
    CHECK(line_count(out.str()) == 2);
    CHECK(out.str().find("EAS_CDS,cds,50,5,1,0,10,0,12.5,0") != std::string::npos);
  }
}
