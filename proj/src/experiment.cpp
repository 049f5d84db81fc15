#include "seqcover/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <ostream>

#include "seqcover/complexity.hpp"
#include "seqcover/oracles.hpp"
#include "seqcover/parallel.hpp"

namespace seqcover {

using nlohmann::json;

namespace {

std::string trim(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  return s;
}

double parse_term(const std::string& s, std::int64_t T) {
  if (s.empty()) throw Error("empty term in rational");
  const auto p = s.find('T');
  if (p == std::string::npos) return std::stod(s);
  const double coef = p == 0 ? 1.0 : std::stod(s.substr(0, p));
  double e = 1;
  if (p + 1 < s.size()) {
    if (s[p + 1] != '^') throw Error("bad term '" + s + "'");
    e = std::stod(s.substr(p + 2));
  }
  return coef * std::pow(static_cast<double>(T), e);
}

template <class V>
V get_or(const json& j, const char* key, V dflt) {
  return j.is_object() && j.contains(key) && !j[key].is_null() ? j[key].get<V>() : dflt;
}

Feature key_feature(const json& v) {
  if (v.is_array()) return make_point(v.get<std::vector<std::int64_t>>());
  return Feature(v.get<std::int64_t>());
}

Marginal marginal_from_json(const json& j) {
  Marginal m;
  const auto kind = get_or<std::string>(j, "kind", "uniform");
  if (kind == "uniform") {
    m.kind = Marginal::Kind::Uniform;
    m.lo = get_or<std::int64_t>(j, "lo", 0);
    m.hi = get_or<std::int64_t>(j, "hi", -1);
  } else if (kind == "discrete") {
    m.kind = Marginal::Kind::Discrete;
    m.points = j.at("points").get<std::vector<std::int64_t>>();
    m.weights = j.contains("weights") ? j["weights"].get<std::vector<double>>()
                                      : std::vector<double>(m.points.size(), 1.0);
  } else if (kind == "point_mass") {
    m.kind = Marginal::Kind::PointMass;
    m.points = {j.at("point").get<std::int64_t>()};
  } else {
    throw Error("unknown marginal kind '" + kind + "'");
  }
  return m;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) o += c == '"' ? std::string("\"\"") : std::string(1, c);
  return o + "\"";
}

template <class V>
std::string opt(const std::optional<V>& v) {
  if (!v) return "";
  if constexpr (std::is_same_v<V, bool>) return *v ? "1" : "0";
  else if constexpr (std::is_integral_v<V>) return std::to_string(*v);
  else return fmt(*v);
}

double log_pool_plus_one(double log_n) { return log_n + std::log1p(std::exp(-log_n)); }

std::unique_ptr<ExpertPool> pool_from_json(const json& j, const HypothesisClass& cls, std::int64_t T,
                                           const CoverPtr& cover) {
  const auto name = get_or<std::string>(j, "pool", cover ? "cover" : "class_bayes");
  if (name == "cover") {
    if (!cover) throw Error("predictor asks for the cover pool but no cover is configured");
    return cover->pool();
  }
  if (name == "class_bayes") return make_class_bayes_pool(cls);
  if (name == "realization_tree") {
    const auto M = j.contains("M") ? j["M"].get<std::int64_t>()
                                   : default_index_bits(vc_dimension(cls), star_number(cls), T, 0.05);
    return make_realization_pool(cls, M);
  }
  throw Error("unknown pool '" + name + "'");
}

}  // namespace

double parse_rational(const json& v, std::int64_t T) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) throw Error("expected a number or a rational string");
  const auto s = trim(v.get<std::string>());
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse_term(s, T);
  const double den = parse_term(s.substr(slash + 1), T);
  if (den == 0) throw Error("zero denominator in '" + s + "'");
  return parse_term(s.substr(0, slash), T) / den;
}

// ---- config ----

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  static const std::set<std::string> known{"command", "claim",   "T",       "T_pow2",     "class",     "loss",
                                           "predictor", "cover", "distribution", "adversary", "oracle",
                                           "trials",  "seed",    "delta",   "alpha",      "clamp_eps", "threads",
                                           "out"};
  for (const auto& [k, _] : j.items())
    if (!known.count(k)) throw Error("unknown config key '" + k + "'");
  ExperimentConfig c;
  c.command = get_or<std::string>(j, "command", c.command);
  c.claim = get_or<std::string>(j, "claim", c.claim);
  if (j.contains("T")) {
    c.T_list = j["T"].is_array() ? j["T"].get<std::vector<std::int64_t>>()
                                 : std::vector<std::int64_t>{j["T"].get<std::int64_t>()};
  }
  if (j.contains("T_pow2")) {
    const auto r = j["T_pow2"].get<std::vector<int>>();
    if (r.size() != 2 || r[0] > r[1] || r[0] < 0 || r[1] > 40) throw Error("T_pow2 expects [lo, hi]");
    c.T_list.clear();
    for (int e = r[0]; e <= r[1]; ++e) c.T_list.push_back(std::int64_t{1} << e);
  }
  if (c.T_list.empty()) throw Error("T list must be nonempty");
  if (j.contains("class")) c.class_spec = j["class"];
  if (j.contains("loss")) c.loss_spec = j["loss"];
  if (j.contains("predictor")) c.predictor_spec = j["predictor"];
  if (j.contains("cover")) c.cover_spec = j["cover"];
  if (j.contains("distribution")) c.distribution_spec = j["distribution"];
  if (j.contains("adversary")) c.adversary_spec = j["adversary"];
  if (j.contains("oracle")) c.oracle_params = j["oracle"];
  c.trials = get_or<std::size_t>(j, "trials", c.trials);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.delta = get_or<double>(j, "delta", c.delta);
  if (j.contains("alpha")) c.alpha = j["alpha"];
  if (j.contains("clamp_eps")) c.clamp_eps = j["clamp_eps"];
  c.threads = get_or<unsigned>(j, "threads", c.threads);
  c.out = get_or<std::string>(j, "out", c.out);
  return c;
}

json ExperimentConfig::to_json() const {
  return {{"command", command},
          {"claim", claim},
          {"T", T_list},
          {"class", class_spec},
          {"loss", loss_spec},
          {"predictor", predictor_spec},
          {"cover", cover_spec},
          {"distribution", distribution_spec},
          {"adversary", adversary_spec},
          {"oracle", oracle_params},
          {"trials", trials},
          {"seed", seed},
          {"delta", delta},
          {"alpha", alpha},
          {"clamp_eps", clamp_eps},
          {"threads", threads},
          {"out", out}};
}

// ---- spec builders ----

HypothesisClass class_from_json(const json& j, std::int64_t T) {
  const auto kind = j.at("kind").get<std::string>();
  const auto R = get_or<std::int64_t>(j, "grid_denominator", kDefaultGrid);
  if (kind == "threshold1d") return HypothesisClass::threshold(R);
  if (kind == "interval1d") return HypothesisClass::interval(R);
  if (kind == "rectangle") return HypothesisClass::rectangle(get_or<int>(j, "dims", 2), R);
  if (kind == "sparse") {
    std::int64_t N;
    const auto& d = j.at("domain");
    if (d.is_string() && d.get<std::string>() == "T/ln2T") {
      const double lt = std::log(static_cast<double>(T));
      N = static_cast<std::int64_t>(std::ceil(static_cast<double>(T) / (lt * lt)));
    } else {
      N = static_cast<std::int64_t>(std::llround(parse_rational(d, T)));
    }
    return HypothesisClass::sparse(N, j.at("budget").get<int>());
  }
  if (kind == "monotone1d") return HypothesisClass::monotone(j.at("levels").get<std::vector<double>>(), R);
  if (kind == "finite_table") return HypothesisClass::finite_table(j.at("rows").get<std::vector<std::vector<std::uint8_t>>>());
  if (kind == "toy5") return toy5_class();
  if (kind == "composite") {
    std::vector<HypothesisClass> parts;
    for (const auto& p : j.at("parts")) parts.push_back(class_from_json(p, T));
    const int m = static_cast<int>(parts.size());
    return HypothesisClass::composite(std::move(parts), Combiner::by_name(j.at("combiner").get<std::string>(), m));
  }
  throw Error("unknown class kind '" + kind + "'");
}

LossSpec loss_from_json(const json& j, const json& clamp_eps, std::int64_t T) {
  const auto eps = parse_rational(j.contains("clamp_eps") ? j["clamp_eps"] : clamp_eps, T);
  return LossSpec::by_name(get_or<std::string>(j, "kind", "log"), eps);
}

DistributionSpec distribution_from_json(const json& j) {
  DistributionSpec d;
  const auto kind = get_or<std::string>(j, "kind", "iid");
  auto keys = [](const json& arr) {
    std::vector<Feature> xs;
    for (const auto& v : arr) xs.push_back(key_feature(v));
    return xs;
  };
  if (kind == "iid") {
    d.kind = DistributionSpec::Kind::Iid;
    d.marginal = marginal_from_json(j.contains("marginal") ? j["marginal"] : json::object());
  } else if (kind == "exchangeable") {
    d.kind = DistributionSpec::Kind::Exchangeable;
    d.multiset = keys(j.at("multiset"));
  } else if (kind == "product_type_k") {
    d.kind = DistributionSpec::Kind::ProductTypeK;
    for (const auto& m : j.at("marginals")) d.marginals.push_back(marginal_from_json(m));
    d.assignment = get_or<std::vector<std::size_t>>(j, "assignment", {});
  } else if (kind == "singleton") {
    d.kind = DistributionSpec::Kind::Singleton;
    d.sequence = keys(j.at("sequence"));
  } else {
    throw Error("unknown distribution kind '" + kind + "'");
  }
  return d;
}

AdversarySpec adversary_from_json(const json& j) {
  AdversarySpec a;
  const auto kind = get_or<std::string>(j, "kind", "realizable");
  if (kind == "realizable") {
    a.kind = AdversarySpec::Kind::Realizable;
    if (j.contains("target") && !j["target"].is_null()) a.target = Hypothesis{j["target"].get<std::vector<std::int64_t>>()};
  } else if (kind == "random") {
    a.kind = AdversarySpec::Kind::Random;
  } else if (kind == "greedy") {
    a.kind = AdversarySpec::Kind::Greedy;
    a.depth = get_or<int>(j, "depth", 2);
  } else if (kind == "exact_minimax") {
    a.kind = AdversarySpec::Kind::ExactMinimax;
  } else {
    throw Error("unknown adversary kind '" + kind + "'");
  }
  return a;
}

CoverPtr cover_from_json(const json& j, const HypothesisClass& cls, std::int64_t T, double delta, const json& alpha) {
  if (j.is_null()) return nullptr;
  const auto kind = j.at("kind").get<std::string>();
  const double d = get_or<double>(j, "delta", delta);
  if (kind == "realization_tree") {
    const auto M = j.contains("M") ? j["M"].get<std::int64_t>()
                                   : default_index_bits(vc_dimension(cls), star_number(cls), T, d);
    return std::make_shared<RealizationTreeCover>(cls, M, T, d);
  }
  if (kind == "star_littlestone")
    return std::make_shared<StarLittlestoneCover>(cls, j.at("s").get<std::int64_t>(), get_or<int>(j, "d_cap", 1), T, d);
  if (kind == "error_pattern") {
    const auto err = static_cast<std::int64_t>(std::ceil(parse_rational(j.at("err_budget"), T) - 1e-9));
    std::shared_ptr<const OnlinePredictor> p =
        predictor_from_json(get_or<json>(j, "predictor", {{"kind", "one_inclusion"}}), cls, T, {}, nullptr,
                            LossSpec{});
    return std::make_shared<ErrorPatternCover>(std::move(p), T, err);
  }
  if (kind == "fat_shattering")
    return std::make_shared<FatShatteringCover>(cls, parse_rational(j.contains("alpha") ? j["alpha"] : alpha, T), T, d);
  if (kind == "composite") {
    if (cls.kind() != ClassKind::Composite) throw Error("composite cover needs a composite class");
    std::vector<CoverPtr> parts;
    const auto& specs = j.at("parts");
    if (specs.size() != cls.parts().size()) throw Error("one cover spec per class part is required");
    for (std::size_t i = 0; i < specs.size(); ++i)
      parts.push_back(cover_from_json(specs[i], cls.parts()[i], T, d, alpha));
    return compose_covers(std::move(parts), cls.combiner());
  }
  if (kind == "hypothesis_list") {
    std::vector<Hypothesis> hs;
    for (const auto& m : j.at("members")) hs.push_back({m.get<std::vector<std::int64_t>>()});
    return std::make_shared<HypothesisListCover>(cls, std::move(hs), T);
  }
  if (kind == "offline") return std::make_shared<HypothesisListCover>(cls, std::vector<Hypothesis>{}, T, true);
  throw Error("unknown cover kind '" + kind + "'");
}

std::unique_ptr<OnlinePredictor> predictor_from_json(const json& j, const HypothesisClass& cls, std::int64_t T,
                                                     std::span<const Feature> xs, const CoverPtr& cover,
                                                     const LossSpec& loss) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "stb") {
    const double a = parse_rational(get_or<json>(j, "alpha", "1/T"), T);
    return std::make_unique<MixtureLearner>(pool_from_json(j, cls, T, cover), MixMode::SmoothTruncatedBayes, a, loss,
                                            get_or<double>(j, "prune_log", 0.0));
  }
  if (kind == "ewa") {
    auto pool = pool_from_json(j, cls, T, cover);
    const auto e = get_or<json>(j, "eta", "auto");
    const double eta = e.is_string() && e.get<std::string>() == "auto"
                           ? std::sqrt(8 * std::max(pool->log_size(), 1e-12) / static_cast<double>(T))
                           : parse_rational(e, T);
    return std::make_unique<MixtureLearner>(std::move(pool), MixMode::Ewa, eta, loss, get_or<double>(j, "prune_log", 0.0));
  }
  if (kind == "aa") {
    const auto mix = loss.eta_mixable();
    const double eta = j.contains("eta") ? parse_rational(j["eta"], T) : mix.value_or(0);
    if (!(eta > 0)) throw Error("aggregating algorithm needs a mixable loss or an explicit eta");
    return std::make_unique<MixtureLearner>(pool_from_json(j, cls, T, cover), MixMode::Aggregating, eta, loss,
                                            get_or<double>(j, "prune_log", 0.0));
  }
  if (kind == "one_inclusion") return std::make_unique<OneInclusionPredictor>(cls, true);
  if (kind == "soa")
    return std::make_unique<SoaStarPredictor>(cls, j.at("s").get<std::int64_t>(), get_or<int>(j, "depth_cap", 4));
  if (kind == "nml") return std::make_unique<NmlPredictor>(cls, std::vector<Feature>(xs.begin(), xs.end()), loss.clamp_eps);
  if (kind == "bayes") return std::make_unique<ClassBayesPredictor>(cls);
  if (kind == "constant") {
    const double p = get_or<double>(j, "p", 0.5);
    return std::make_unique<ConstantPredictor>(p, "constant");
  }
  throw Error("unknown predictor kind '" + kind + "'");
}

// ---- CSV ----

std::string csv_header() {
  return std::string("# schema: ") + kSchema +
         "\ncommand,claim,T,trial,seed,status,class,predictor,adversary,distribution,regret,avg_regret,"
         "learner_loss,comparator_loss,mistakes,cover_log2_size,cover_M,cover_failed,measured,bound,pass,wall_ms\n";
}

std::string to_csv(const ResultRecord& r) {
  std::string s;
  auto add = [&](const std::string& v) {
    if (!s.empty()) s += ',';
    s += csv_field(v);
  };
  add(r.command.empty() ? "-" : r.command);
  add(r.claim);
  add(std::to_string(r.T));
  add(std::to_string(r.trial));
  add(std::to_string(r.seed));
  add(r.status);
  add(r.cls);
  add(r.predictor);
  add(r.adversary);
  add(r.distribution);
  add(opt(r.regret));
  add(opt(r.avg_regret));
  add(opt(r.learner_loss));
  add(opt(r.comparator_loss));
  add(opt(r.mistakes));
  add(opt(r.cover_log2_size));
  add(opt(r.cover_M));
  add(opt(r.cover_failed));
  add(opt(r.measured));
  add(opt(r.bound));
  add(opt(r.pass));
  add(fmt(r.wall_ms));
  return s + "\n";
}

// ---- runs ----

namespace {

struct Job {
  std::int64_t T;
  std::int64_t trial;
};

ResultRecord base_row(const ExperimentConfig& cfg, const Job& job) {
  ResultRecord r;
  r.command = cfg.command;
  r.claim = cfg.claim;
  r.T = job.T;
  r.trial = job.trial;
  r.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(job.T), static_cast<std::uint64_t>(job.trial));
  return r;
}

void game_row(const ExperimentConfig& cfg, ResultRecord& r) {
  const auto T = r.T;
  Rng rng(r.seed);
  const auto cls = class_from_json(cfg.class_spec, T);
  const auto loss = loss_from_json(cfg.loss_spec, cfg.clamp_eps, T);
  const auto dist = distribution_from_json(cfg.distribution_spec);
  r.cls = cls.name();
  r.distribution = dist.name();
  const auto xs = dist.sample(cls, static_cast<std::size_t>(T), rng);
  const auto cover = cover_from_json(cfg.cover_spec, cls, T, cfg.delta, cfg.alpha);
  auto learner = predictor_from_json(cfg.predictor_spec, cls, T, xs, cover, loss);
  r.predictor = learner->name();
  const auto aspec = adversary_from_json(cfg.adversary_spec);
  r.adversary = aspec.name();
  auto adv = make_adversary(aspec, cls, rng);
  const auto tr = run_game(cls, xs, *learner, *adv, loss, rng);
  r.regret = tr.regret;
  if (tr.target_loss) r.avg_regret = tr.learner_loss - *tr.target_loss;
  r.learner_loss = tr.learner_loss;
  r.comparator_loss = tr.comparator_loss;
  r.mistakes = tr.mistakes;
  r.measured = tr.regret;
  if (cover) {
    r.cover_log2_size = cover->info().log2_size();
    r.cover_M = cover->info().M;
    if (cls.binary() && cover->info().construction == "realization_tree")
      r.cover_failed = cover->first_uncovered(cls, xs, cover->info().alpha).has_value();
  }
  if (const auto* mix = dynamic_cast<const MixtureLearner*>(learner.get())) {
    if (!cover) r.cover_log2_size = mix->log_pool_size() / std::log(2.0);
    if (cfg.predictor_spec.at("kind") == "stb") {
      // Per-sequence guarantee of the truncated mixture against its best pool member.
      const double a = parse_rational(get_or<json>(cfg.predictor_spec, "alpha", "1/T"), T);
      r.bound = 2 * a * static_cast<double>(T) + log_pool_plus_one(mix->log_pool_size());
      r.pass = !r.cover_failed.value_or(false) && tr.regret <= *r.bound;
    }
  }
}

void verify_row(const ExperimentConfig& cfg, ResultRecord& r) {
  Rng rng(r.seed);
  const auto cls = class_from_json(cfg.class_spec, r.T);
  const auto dist = distribution_from_json(cfg.distribution_spec);
  r.cls = cls.name();
  r.distribution = dist.name();
  const auto cover = cover_from_json(cfg.cover_spec, cls, r.T, cfg.delta, cfg.alpha);
  if (!cover) throw Error("cover-verify needs a cover spec");
  const auto xs = dist.sample(cls, static_cast<std::size_t>(r.T), rng);
  const bool failed = cover->first_uncovered(cls, xs, cover->info().alpha).has_value();
  r.cover_log2_size = cover->info().log2_size();
  r.cover_M = cover->info().M;
  r.cover_failed = failed;
  r.measured = failed ? 1.0 : 0.0;
}

void oracle_row(const ExperimentConfig& cfg, ResultRecord& r) {
  const auto& p = cfg.oracle_params;
  const auto T = r.T;
  const auto trials = cfg.trials;
  const auto seed = r.seed;
  const auto& claim = cfg.claim;
  if (claim.empty()) throw Error("oracle command needs a claim");
  if (claim == "coupon_collector") {
    const double c = get_or<double>(p, "c", 2.0);
    r.measured = coupon_collector_tail(T, c, trials, seed, cfg.threads);
    r.bound = std::exp(-c);
    r.pass = *r.measured <= *r.bound + binomial_slack(*r.bound, trials);
  } else if (claim == "game_value") {
    const auto f = threshold_game_value(T);
    double worst = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (std::int64_t t = 2; t <= T; ++t) {
      worst = std::min(worst, f[static_cast<std::size_t>(t)].get_d() - 0.01 * std::log(static_cast<double>(t)));
      monotone = monotone && f[static_cast<std::size_t>(t)] >= f[static_cast<std::size_t>(t - 1)];
    }
    r.measured = T >= 2 ? worst : 0.0;
    r.bound = 0.0;
    r.pass = *r.measured >= 0 && monotone;
  } else if (claim == "bayes_threshold") {
    r.measured = bayes_threshold_errors(T, trials, seed, std::nullopt, cfg.threads);
    const double lt = std::log(static_cast<double>(T));
    r.bound = 2 * lt + 5;
    r.pass = *r.measured >= 0.01 * lt && *r.measured <= *r.bound;
  } else if (claim == "double_sampling") {
    const auto cls = class_from_json(cfg.class_spec, T);
    r.cls = cls.name();
    const auto nu = marginal_from_json(get_or<json>(p, "marginal", json::object()));
    const double eps = parse_rational(get_or<json>(p, "eps", "1/T^2"), T);
    const auto F = greedy_distribution_cover(cls, nu, eps);
    r.measured = double_sampling_gap(cls, nu, F, T, trials, seed, cfg.threads);
    r.bound = 3.0 * static_cast<double>(vc_dimension(cls)) + get_or<double>(p, "slack", 10.0);
    r.pass = *r.measured <= *r.bound;
  } else if (claim == "type_k") {
    const auto cls = class_from_json(cfg.class_spec, T);
    const auto dist = distribution_from_json(cfg.distribution_spec);
    r.cls = cls.name();
    r.distribution = dist.name();
    r.measured = type_k_error_bound(cls, dist, T, trials, seed, cfg.threads);
    const auto k = static_cast<std::int64_t>(dist.type_k());
    r.bound = get_or<double>(p, "slack", 4.0) * type_k_reference(k, vc_dimension(cls), T);
    r.pass = *r.measured <= *r.bound;
  } else if (claim == "shtarkov") {
    const auto cls = class_from_json(cfg.class_spec, T);
    const auto dist = distribution_from_json(cfg.distribution_spec);
    r.cls = cls.name();
    r.distribution = dist.name();
    Rng rng(seed);
    const auto xs = dist.sample(cls, static_cast<std::size_t>(T), rng);
    r.measured = shtarkov_logloss_regret(cls, xs);
    r.bound = T <= 12 ? shtarkov_by_enumeration(cls, xs, 0.0) : *r.measured;
    r.pass = std::abs(*r.measured - *r.bound) <= 1e-9;
  } else if (claim == "singleton_minimax") {
    const auto cls = class_from_json(cfg.class_spec, T);
    const auto dist = distribution_from_json(cfg.distribution_spec);
    const auto loss = loss_from_json(cfg.loss_spec, cfg.clamp_eps, T);
    r.cls = cls.name();
    r.distribution = dist.name();
    Rng rng(seed);
    const auto xs = dist.sample(cls, static_cast<std::size_t>(T), rng);
    NmlPredictor nml(cls, xs, loss.clamp_eps);
    r.predictor = nml.name();
    r.adversary = "exact_minimax";
    auto adv = make_adversary({AdversarySpec::Kind::ExactMinimax, std::nullopt, 2}, cls, rng);
    const auto tr = run_game(cls, xs, nml, *adv, loss, rng);
    r.regret = tr.regret;
    r.learner_loss = tr.learner_loss;
    r.comparator_loss = tr.comparator_loss;
    r.mistakes = tr.mistakes;
    r.measured = tr.regret;
    r.bound = fixed_design_minimax_value(cls, xs, loss.clamp_eps);
    r.pass = std::abs(*r.measured - *r.bound) <= 1e-9;
  } else if (claim == "permutation_tail") {
    // T distinct, evenly spaced grid points; every cut of the sorted sample.
    const double lt = std::log(static_cast<double>(T));
    const double delta = get_or<double>(p, "delta", 0.05);
    const auto k = static_cast<std::int64_t>(std::ceil(4 * 2 * lt + std::log(1 / delta)));
    std::vector<std::int64_t> keys;
    for (std::int64_t i = 0; i < T; ++i) keys.push_back((i + 1) * kDefaultGrid / (T + 1));
    std::vector<std::int64_t> over(static_cast<std::size_t>(T) + 1, 0);
    for (std::size_t i = 0; i < trials; ++i) {
      Rng rng(derive_seed(seed, i));
      std::shuffle(keys.begin(), keys.end(), rng);
      const auto m = threshold_mistakes_all_cuts(keys);
      for (std::size_t c = 0; c < m.size(); ++c) over[c] += m[c] >= k;
    }
    const double worst = static_cast<double>(*std::max_element(over.begin(), over.end()));
    r.cls = "threshold1d";
    r.measured = trials ? worst / static_cast<double>(trials) : 0.0;
    r.bound = delta + binomial_slack(delta, trials);
    r.pass = *r.measured <= *r.bound;
  } else {
    throw Error("unknown oracle claim '" + claim + "'");
  }
}

void complexity_rows(const ExperimentConfig& cfg, std::vector<ResultRecord>& rows, json& summary) {
  const auto T = cfg.T_list.front();
  const auto cls = class_from_json(cfg.class_spec, T);
  const auto scales = get_or<std::vector<std::int64_t>>(cfg.oracle_params, "scales", {});
  std::vector<double> alphas;
  for (const auto& a : get_or<json>(cfg.oracle_params, "alphas", json::array())) alphas.push_back(parse_rational(a, T));
  const auto rep = complexity_report(cls, scales, alphas);
  auto row = [&](const std::string& claim, double v) {
    ResultRecord r;
    r.command = cfg.command;
    r.claim = claim;
    r.T = T;
    r.cls = cls.name();
    r.measured = v;
    rows.push_back(r);
  };
  json j = {{"class", cls.name()}};
  if (cls.binary()) {
    row("vc", static_cast<double>(rep.vc));
    row("star", rep.star == kInfinite ? std::numeric_limits<double>::infinity() : static_cast<double>(rep.star));
    j["vc"] = rep.vc;
    j["star"] = rep.star == kInfinite ? json("inf") : json(rep.star);
    for (auto [s, v] : rep.sl_at_scale) {
      row("sl_" + std::to_string(s), static_cast<double>(v));
      j["sl"][std::to_string(s)] = v;
    }
  }
  for (auto [a, v] : rep.fat) {
    row("fat_" + fmt(a), static_cast<double>(v));
    j["fat"][fmt(a)] = v;
  }
  summary["complexity"] = j;
}

}  // namespace

RunOutput run_experiment(const ExperimentConfig& cfg, std::ostream* progress) {
  RunOutput out;
  std::mutex mu;
  auto report = [&](const ResultRecord& r) {
    if (!progress) return;
    const json line = {{"command", r.command}, {"T", r.T}, {"trial", r.trial}, {"status", r.status}};
    std::lock_guard lock(mu);
    *progress << line.dump() << '\n' << std::flush;
  };
  const auto& cmd = cfg.command;
  if (cmd == "complexity") {
    complexity_rows(cfg, out.rows, out.summary);
    for (const auto& r : out.rows) report(r);
    return out;
  }
  std::vector<Job> jobs;
  if (cmd == "game" || cmd == "sweep" || cmd == "cover-verify") {
    for (auto T : cfg.T_list)
      for (std::size_t i = 0; i < cfg.trials; ++i) jobs.push_back({T, static_cast<std::int64_t>(i)});
  } else if (cmd == "oracle" || cmd == "cover-build") {
    if (cfg.trials > 0)
      for (auto T : cfg.T_list) jobs.push_back({T, 0});
  } else {
    throw Error("unknown command '" + cmd + "'");
  }
  std::vector<ResultRecord> rows(jobs.size());
  // Oracles parallelize internally over their own trials.
  const unsigned outer = cmd == "oracle" ? 1u : cfg.threads;
  parallel_for(jobs.size(), outer, [&](std::size_t i) {
    auto r = base_row(cfg, jobs[i]);
    const auto start = std::chrono::steady_clock::now();
    try {
      if (cmd == "game" || cmd == "sweep") game_row(cfg, r);
      else if (cmd == "cover-verify") verify_row(cfg, r);
      else if (cmd == "oracle") oracle_row(cfg, r);
      else {
        const auto cls = class_from_json(cfg.class_spec, r.T);
        r.cls = cls.name();
        const auto cover = cover_from_json(cfg.cover_spec, cls, r.T, cfg.delta, cfg.alpha);
        if (!cover) throw Error("cover-build needs a cover spec");
        r.cover_log2_size = cover->info().log2_size();
        r.cover_M = cover->info().M;
        std::lock_guard lock(mu);
        out.summary["covers"][std::to_string(r.T)] = cover->manifest();
      }
    } catch (const std::exception& e) {
      r.status = std::string("error: ") + e.what();
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rows[i] = std::move(r);
    report(rows[i]);
  });
  if (cmd == "cover-verify") {
    // One summary row per horizon after its trials.
    std::vector<ResultRecord> merged;
    std::size_t i = 0;
    for (auto T : cfg.T_list) {
      std::size_t fails = 0, n = 0;
      ResultRecord last;
      for (; i < rows.size() && rows[i].T == T; ++i, ++n) {
        fails += rows[i].cover_failed.value_or(true);
        last = rows[i];
        merged.push_back(rows[i]);
      }
      if (n == 0) continue;
      ResultRecord s;
      s.command = cmd;
      s.claim = "failure_rate";
      s.T = T;
      s.trial = -1;
      s.seed = cfg.seed;
      s.status = "summary";
      s.cls = last.cls;
      s.distribution = last.distribution;
      s.cover_log2_size = last.cover_log2_size;
      s.cover_M = last.cover_M;
      const double rate = n ? static_cast<double>(fails) / static_cast<double>(n) : 0.0;
      s.measured = rate;
      s.bound = cfg.delta + binomial_slack(cfg.delta, n);
      s.pass = rate <= *s.bound;
      out.summary["failure_rate"][std::to_string(T)] = rate;
      merged.push_back(s);
    }
    rows = std::move(merged);
  }
  out.rows = std::move(rows);
  return out;
}

void write_outputs(const ExperimentConfig& cfg, const RunOutput& out) {
  std::filesystem::create_directories(cfg.out);
  std::ofstream csv(std::filesystem::path(cfg.out) / "results.csv", std::ios::binary);
  csv << csv_header();
  for (const auto& r : out.rows) csv << to_csv(r);
  if (!csv) throw Error("failed to write results.csv");
  json manifest = {{"schema", kSchema},
                   {"config", cfg.to_json()},
                   {"build",
                    {{"compiler", __VERSION__},
                     {"cxx", static_cast<long>(__cplusplus)},
#ifdef NDEBUG
                     {"assertions", false}
#else
                     {"assertions", true}
#endif
                    }},
                   {"rows", out.rows.size()},
                   {"summary", out.summary}};
  std::ofstream mf(std::filesystem::path(cfg.out) / "manifest.json", std::ios::binary);
  mf << manifest.dump(2) << '\n';
  if (!mf) throw Error("failed to write manifest.json");
}

}  // namespace seqcover
