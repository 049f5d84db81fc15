#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "seqcover/experiment.hpp"
#include "seqcover/stats.hpp"

using namespace seqcover;
using nlohmann::json;

namespace {

std::string csv_without_wall(const RunOutput& out) {
  std::string s = csv_header();
  for (const auto& r : out.rows) {
    auto line = to_csv(r);
    s += line.substr(0, line.rfind(','));
    s += '\n';
  }
  return s;
}

}  // namespace

TEST_CASE("rational strings") {
  CHECK(parse_rational("1/T", 256) == doctest::Approx(1.0 / 256));
  CHECK(parse_rational("T^2", 8) == doctest::Approx(64));
  CHECK(parse_rational("1/T^2", 8) == doctest::Approx(1.0 / 64));
  CHECK(parse_rational("2T", 8) == doctest::Approx(16));
  CHECK(parse_rational("3/4", 8) == doctest::Approx(0.75));
  CHECK(parse_rational(0.125, 8) == 0.125);
  CHECK_THROWS(parse_rational("1/0", 8));
  CHECK_THROWS(parse_rational("T^", 8));
}

TEST_CASE("config round trip and unknown keys") {
  const json j = {{"command", "sweep"}, {"T_pow2", {8, 10}}, {"trials", 3}, {"seed", 5}};
  const auto c = ExperimentConfig::from_json(j);
  CHECK(c.T_list == std::vector<std::int64_t>{256, 512, 1024});
  const auto c2 = ExperimentConfig::from_json(c.to_json());
  CHECK(c2.to_json() == c.to_json());
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"trails", 3}}), Error);
}

TEST_CASE("csv header carries the schema and 22 columns") {
  const auto h = csv_header();
  CHECK(h.rfind("# schema: seqcover.results.v1\n", 0) == 0);
  const auto cols = h.substr(h.find('\n') + 1);
  CHECK(std::count(cols.begin(), cols.end(), ',') == 21);
  ResultRecord r;
  r.cls = "a,b";
  const auto line = to_csv(r);
  CHECK(line.find("\"a,b\"") != std::string::npos);
}

TEST_CASE("zero trials give a header-only table") {
  auto c = ExperimentConfig::from_json({{"trials", 0}});
  CHECK(run_experiment(c, nullptr).rows.empty());
  c.command = "oracle";
  c.claim = "coupon_collector";
  CHECK(run_experiment(c, nullptr).rows.empty());
}

TEST_CASE("sweep rows are byte-identical across runs and thread counts") {
  auto c = ExperimentConfig::from_json({{"T", {64, 128}},
                                        {"trials", 4},
                                        {"seed", 11},
                                        {"cover", {{"kind", "realization_tree"}}},
                                        {"adversary", {{"kind", "greedy"}, {"depth", 1}}}});
  const auto a = run_experiment(c, nullptr);
  c.threads = 3;
  const auto b = run_experiment(c, nullptr);
  CHECK(csv_without_wall(a) == csv_without_wall(b));
  REQUIRE(a.rows.size() == 8);
  for (const auto& r : a.rows) {
    CHECK(r.status == "ok");
    CHECK(r.pass.value_or(false));
    CHECK(r.cover_failed == false);
  }
}

TEST_CASE("failures become rows") {
  auto c = ExperimentConfig::from_json({{"T", {16}}, {"trials", 2}, {"class", {{"kind", "interval1d"}}},
                                        {"cover", {{"kind", "realization_tree"}}}});
  const auto out = run_experiment(c, nullptr);
  REQUIRE(out.rows.size() == 2);
  for (const auto& r : out.rows) CHECK(r.status.rfind("error: ", 0) == 0);
}

TEST_CASE("outputs on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "seqcover_test_out";
  std::filesystem::remove_all(dir);
  auto c = ExperimentConfig::from_json({{"command", "oracle"}, {"claim", "game_value"}, {"T", {32}}});
  c.out = dir.string();
  std::ostringstream progress;
  const auto out = run_experiment(c, &progress);
  write_outputs(c, out);
  CHECK(json::parse(progress.str().substr(0, progress.str().find('\n')))["status"] == "ok");
  std::ifstream m(dir / "manifest.json");
  const auto man = json::parse(m);
  CHECK(man["schema"] == kSchema);
  CHECK(man["config"]["claim"] == "game_value");
  std::ifstream csv(dir / "results.csv");
  std::string first;
  std::getline(csv, first);
  CHECK(first == "# schema: seqcover.results.v1");
  std::filesystem::remove_all(dir);
}

TEST_CASE("configured oracles pass at small scale") {
  for (const auto* claim : {"coupon_collector", "game_value", "bayes_threshold", "shtarkov", "permutation_tail"}) {
    json j = {{"command", "oracle"}, {"claim", claim}, {"T", {8}}, {"trials", 200}};
    if (std::string(claim) == "shtarkov") j["class"] = {{"kind", "interval1d"}};
    const auto out = run_experiment(ExperimentConfig::from_json(j), nullptr);
    REQUIRE(out.rows.size() == 1);
    CHECK_MESSAGE(out.rows[0].status == "ok", claim);
    CHECK_MESSAGE(out.rows[0].pass.value_or(false), claim);
  }
  json p = {{"command", "oracle"},
            {"claim", "singleton_minimax"},
            {"T", {6}},
            {"class", {{"kind", "toy5"}}},
            {"distribution", {{"kind", "singleton"}, {"sequence", {0, 1, 2, 2, 1, 0}}}}};
  const auto out = run_experiment(ExperimentConfig::from_json(p), nullptr);
  CHECK(out.rows[0].pass.value_or(false));
}

TEST_CASE("cover verification summary row") {
  auto c = ExperimentConfig::from_json({{"command", "cover-verify"}, {"T", {128}}, {"trials", 20},
                                        {"cover", {{"kind", "realization_tree"}}}});
  const auto out = run_experiment(c, nullptr);
  REQUIRE(out.rows.size() == 21);
  CHECK(out.rows.back().status == "summary");
  CHECK(out.rows.back().measured == 0.0);
  CHECK(out.rows.back().pass == true);
}

TEST_CASE("least squares recovers an exact fit") {
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  for (int i = 1; i <= 8; ++i) {
    X.push_back({1.0, static_cast<double>(i), static_cast<double>(i * i)});
    y.push_back(2 + 3 * i - 0.5 * i * i);
  }
  const auto f = ols_fit(X, y);
  CHECK(f.coef[0] == doctest::Approx(2));
  CHECK(f.coef[1] == doctest::Approx(3));
  CHECK(f.coef[2] == doctest::Approx(-0.5));
  CHECK(f.se[2] == doctest::Approx(0).epsilon(1e-6).scale(1));
}
