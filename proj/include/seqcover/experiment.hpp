#pragma once

#include <iosfwd>
#include <json.hpp>

#include "seqcover/covers.hpp"
#include "seqcover/game.hpp"

namespace seqcover {

inline constexpr const char* kSchema = "seqcover.results.v1";

// Numbers, or strings of the form "a", "a/b", "T", "1/T", "T^2", "1/T^2", "2T"
// with T bound to the current horizon.
double parse_rational(const nlohmann::json& v, std::int64_t T);

// Every field of a run; unresolved specs stay as JSON and are built per horizon.
struct ExperimentConfig {
  std::string command = "sweep";
  std::string claim;  // oracle name for the `oracle` command
  std::vector<std::int64_t> T_list{256};
  nlohmann::json class_spec = {{"kind", "threshold1d"}};
  nlohmann::json loss_spec = {{"kind", "log"}};
  nlohmann::json predictor_spec = {{"kind", "stb"}, {"alpha", "1/T"}};
  nlohmann::json cover_spec = nullptr;
  nlohmann::json distribution_spec = {{"kind", "iid"}, {"marginal", {{"kind", "uniform"}}}};
  nlohmann::json adversary_spec = {{"kind", "realizable"}};
  nlohmann::json oracle_params = nlohmann::json::object();
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  double delta = 0.05;
  nlohmann::json alpha = "1/T";
  nlohmann::json clamp_eps = "1/T";
  unsigned threads = 1;
  std::string out = "seqcover_out";

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

HypothesisClass class_from_json(const nlohmann::json& j, std::int64_t T);
LossSpec loss_from_json(const nlohmann::json& j, const nlohmann::json& clamp_eps, std::int64_t T);
DistributionSpec distribution_from_json(const nlohmann::json& j);
AdversarySpec adversary_from_json(const nlohmann::json& j);
CoverPtr cover_from_json(const nlohmann::json& j, const HypothesisClass& cls, std::int64_t T, double delta,
                         const nlohmann::json& alpha);
// xs is the realized feature sequence, needed only by fixed-design learners.
std::unique_ptr<OnlinePredictor> predictor_from_json(const nlohmann::json& j, const HypothesisClass& cls,
                                                     std::int64_t T, std::span<const Feature> xs,
                                                     const CoverPtr& cover, const LossSpec& loss);

// One CSV row; unset numeric fields are written empty.
struct ResultRecord {
  std::string command, claim;
  std::int64_t T = 0, trial = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";
  std::string cls, predictor, adversary, distribution;
  std::optional<double> regret, avg_regret, learner_loss, comparator_loss;
  std::optional<std::int64_t> mistakes;
  std::optional<double> cover_log2_size;
  std::optional<std::int64_t> cover_M;
  std::optional<bool> cover_failed;
  std::optional<double> measured, bound;
  std::optional<bool> pass;
  double wall_ms = 0;
};

std::string csv_header();  // schema comment line plus column names
std::string to_csv(const ResultRecord& r);

struct RunOutput {
  std::vector<ResultRecord> rows;
  nlohmann::json summary = nlohmann::json::object();
};

// Rows are ordered by (T, trial) whatever the thread count. Progress goes to
// `progress` as one JSON object per line when it is non-null.
RunOutput run_experiment(const ExperimentConfig& cfg, std::ostream* progress);
// Writes results.csv and manifest.json into cfg.out.
void write_outputs(const ExperimentConfig& cfg, const RunOutput& out);

}  // namespace seqcover
