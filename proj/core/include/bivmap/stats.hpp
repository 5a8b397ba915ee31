#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bivmap/scene.hpp"
#include "bivmap/types.hpp"

namespace bivmap {

inline constexpr int kDefaultResamples = 10000;

struct Estimate {
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
  std::string method;  // "percentile-bootstrap" | "antilogged-bootstrap"
};

// Portable seeded stream of uniform indices (mt19937_64 + rejection), so the
// same seed gives the same resamples with any standard library.
class IndexSampler {
 public:
  explicit IndexSampler(std::uint64_t seed);
  std::size_t operator()(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

// Linear interpolation between closest ranks; q in [0, 1].
double percentile(std::vector<double> values, double q);

// Percentile bootstrap of the mean; 2.5th / 97.5th percentiles of the
// resampled means.
Estimate bootstrap_mean_ci(std::span<const double> samples, int resamples,
                           std::uint64_t seed);

// Paired differences a_i - b_i, resampled by participant.
Estimate pairwise_diff_ci(std::span<const double> a, std::span<const double> b,
                          int resamples, std::uint64_t seed);

// Geometric mean with the antilog of the bootstrap CI of the mean log.
Estimate geometric_mean_ci(std::span<const double> times, int resamples,
                           std::uint64_t seed);

// Geometric mean of a_i / b_i: "a is r times slower than b".
Estimate pairwise_ratio_ci(std::span<const double> a, std::span<const double> b,
                           int resamples, std::uint64_t seed);

struct RankRow {
  std::string technique;
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;  // population SD
  std::vector<int> counts;  // counts[r - 1] = participants giving rank r
};

struct RankSummary {
  std::vector<RankRow> rows;  // techniques in first-appearance order
  std::size_t participants = 0;
  std::string sd_convention = "population";
};

RankSummary rank_summary(const std::vector<RankingRecord>& rankings);
std::string rank_summary_csv(const RankSummary& summary);

struct AnalysisRow {
  std::string question;
  std::string technique;  // "A" or "A - B" / "A / B" for pairwise rows
  std::string measure;  // accuracy | accuracy_diff | time | time_ratio
  Estimate estimate;
};

struct AnalysisOptions {
  int resamples = kDefaultResamples;
  std::uint64_t seed = 0;
};

// Per question and technique: bootstrap accuracy, geometric-mean time, and
// all participant-paired differences / ratios between techniques.
std::vector<AnalysisRow> analyze(const TrialSet& trials,
                                 const AnalysisOptions& options);
std::string analysis_csv(const std::vector<AnalysisRow>& rows);

// Dot-and-interval chart for one measure, one block per question.
Scene estimate_chart(const std::vector<AnalysisRow>& rows,
                     const std::string& measure);

}  // namespace bivmap
