#include "screeneval/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "screeneval/error.hpp"
#include "screeneval/rng.hpp"

namespace screeneval {

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void SimConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::invalid_argument, "simulation config: " + what); };
  if (images_lo < 1) fail("images_per_subject lower bound must be >= 1");
  if (images_lo > images_hi) fail("images_per_subject lower bound exceeds upper bound");
  if (!(positive.sd >= 0.0) || !(negative.sd >= 0.0)) fail("class spread must be >= 0");
  if (!std::isfinite(positive.mean) || !std::isfinite(negative.mean)) fail("class mean must be finite");
  if (!(subject_effect >= 0.0 && subject_effect <= 1.0)) fail("subject_effect must lie in [0,1]");
  double total = 0.0;
  for (double f : split_fractions) {
    if (!(f >= 0.0)) fail("split fractions must be non-negative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) fail("split fractions must sum to 1");
  std::size_t subjects = 0;
  for (const auto& c : cohorts) {
    if (c.name.empty() || c.name.find_first_of(",\r\n") != std::string::npos) {
      fail("cohort names must be non-empty and free of commas and newlines");
    }
    subjects += c.positive + c.negative;
  }
  if (subjects == 0) fail("zero total subjects");
}

namespace {

// Largest-remainder apportionment of `count` subjects over the three splits.
std::array<std::size_t, 3> apportion(std::size_t count, const std::array<double, 3>& fractions) {
  std::array<std::size_t, 3> out{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = fractions[i] * static_cast<double>(count);
    out[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - static_cast<double>(out[i]);
    assigned += out[i];
  }
  std::array<std::size_t, 3> idx{0, 1, 2};
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < count; ++k, ++assigned) ++out[idx[k % 3]];
  return out;
}

std::string subject_name(const std::string& cohort, bool positive, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "-%c%05zu", positive ? 'P' : 'N', index);
  return cohort + buf;
}

}  // namespace

Dataset simulate_cohort(const SimConfig& cfg) {
  cfg.validate();
  constexpr Split kSplits[] = {Split::train, Split::validation, Split::test};
  const double e = cfg.subject_effect;

  std::vector<PredictionRecord> records;
  std::uint64_t subject_index = 0;
  for (const auto& cohort : cfg.cohorts) {
    for (const bool positive : {true, false}) {
      const std::size_t count = positive ? cohort.positive : cohort.negative;
      const ClassModel& model = positive ? cfg.positive : cfg.negative;
      const auto per_split = apportion(count, cfg.split_fractions);

      std::size_t local = 0;
      for (std::size_t s = 0; s < 3; ++s) {
        for (std::size_t k = 0; k < per_split[s]; ++k, ++local, ++subject_index) {
          auto rng = Xoshiro256::stream(cfg.seed, subject_index);
          const std::string subject = subject_name(cohort.name, positive, local);
          const std::size_t images = cfg.images_lo + rng.below(cfg.images_hi - cfg.images_lo + 1);
          const double latent = model.mean + model.sd * rng.normal();
          for (std::size_t i = 0; i < images; ++i) {
            const double fresh = model.mean + model.sd * rng.normal();
            const double score = std::clamp(e * latent + (1.0 - e) * fresh, 0.0, 1.0);
            records.push_back({subject + "-" + std::to_string(i), subject, cohort.name, kSplits[s], positive ? 1 : 0,
                               score});
          }
        }
      }
    }
  }
  char provenance[64];
  std::snprintf(provenance, sizeof provenance, "simulated(seed=%llu)", static_cast<unsigned long long>(cfg.seed));
  return Dataset(std::move(records), provenance);
}

double theoretical_auc(const SimConfig& cfg) {
  const double shrink = std::sqrt(cfg.subject_effect * cfg.subject_effect +
                                  (1.0 - cfg.subject_effect) * (1.0 - cfg.subject_effect));
  const double sd1 = cfg.positive.sd * shrink;
  const double sd0 = cfg.negative.sd * shrink;

  auto tail_below_zero = [](double mean, double sd) {
    if (sd == 0.0) return mean < 0.0 ? 1.0 : 0.0;
    return standard_normal_cdf(-mean / sd);
  };
  auto tail_above_one = [](double mean, double sd) {
    if (sd == 0.0) return mean > 1.0 ? 1.0 : 0.0;
    return standard_normal_cdf((mean - 1.0) / sd);
  };
  // Clamping is monotone; it can only change pairs that land on the same
  // bound, each by at most one half.
  const double clamp_error = 0.5 * (tail_below_zero(cfg.positive.mean, sd1) * tail_below_zero(cfg.negative.mean, sd0) +
                                    tail_above_one(cfg.positive.mean, sd1) * tail_above_one(cfg.negative.mean, sd0));
  if (clamp_error > kClampTolerance) {
    throw Error(ErrorKind::oracle_inapplicable, "oracle inapplicable: clamping to [0,1] distorts the score model");
  }

  const double delta = cfg.positive.mean - cfg.negative.mean;
  const double spread = std::sqrt(sd0 * sd0 + sd1 * sd1);
  if (spread == 0.0) return delta > 0.0 ? 1.0 : (delta < 0.0 ? 0.0 : 0.5);
  return standard_normal_cdf(delta / spread);
}

namespace {

ClassModel class_from_json(const nlohmann::json& doc) {
  return {doc.at("mean").get<double>(), doc.at("sd").get<double>()};
}

}  // namespace

SimConfig sim_config_from_json(const nlohmann::json& doc) {
  SimConfig cfg;
  try {
    const auto& cohorts = doc.at("cohorts");
    if (cohorts.is_array()) {
      for (const auto& c : cohorts) {
        cfg.cohorts.push_back({c.at("name").get<std::string>(), c.at("positive").get<std::size_t>(),
                               c.at("negative").get<std::size_t>()});
      }
    } else if (cohorts.is_object()) {
      for (const auto& [name, c] : cohorts.items()) {
        cfg.cohorts.push_back({name, c.at("positive").get<std::size_t>(), c.at("negative").get<std::size_t>()});
      }
    } else {
      throw Error(ErrorKind::parse, "simulation config: 'cohorts' must be an array or object");
    }
    if (doc.contains("images_per_subject")) {
      const auto& range = doc["images_per_subject"];
      cfg.images_lo = range.at(0).get<std::size_t>();
      cfg.images_hi = range.at(1).get<std::size_t>();
    }
    if (doc.contains("positive")) cfg.positive = class_from_json(doc["positive"]);
    if (doc.contains("negative")) cfg.negative = class_from_json(doc["negative"]);
    cfg.subject_effect = doc.value("subject_effect", cfg.subject_effect);
    if (doc.contains("split_fractions")) {
      const auto& f = doc["split_fractions"];
      if (f.is_object()) {
        cfg.split_fractions = {f.at("train").get<double>(), f.at("validation").get<double>(),
                               f.at("test").get<double>()};
      } else {
        cfg.split_fractions = {f.at(0).get<double>(), f.at(1).get<double>(), f.at(2).get<double>()};
      }
    }
    cfg.seed = doc.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("simulation config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const SimConfig& cfg) {
  auto cohorts = nlohmann::json::array();
  for (const auto& c : cfg.cohorts) {
    cohorts.push_back({{"name", c.name}, {"positive", c.positive}, {"negative", c.negative}});
  }
  return {{"cohorts", std::move(cohorts)},
          {"images_per_subject", {cfg.images_lo, cfg.images_hi}},
          {"positive", {{"mean", cfg.positive.mean}, {"sd", cfg.positive.sd}}},
          {"negative", {{"mean", cfg.negative.mean}, {"sd", cfg.negative.sd}}},
          {"subject_effect", cfg.subject_effect},
          {"split_fractions", cfg.split_fractions},
          {"seed", cfg.seed}};
}

}  // namespace screeneval
