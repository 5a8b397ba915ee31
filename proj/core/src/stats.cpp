#include "bivmap/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "bivmap/csv.hpp"
#include "bivmap/error.hpp"

namespace bivmap {

IndexSampler::IndexSampler(std::uint64_t seed) : engine_(seed) {}

std::size_t IndexSampler::operator()(std::size_t n) {
  if (n == 0) throw ValidationError("sampler: empty range");
  const std::uint64_t range = n;
  // Largest multiple of range that fits, to avoid modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("percentile: q outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void check_resamples(int resamples) {
  if (resamples < 1000) throw ValidationError("resamples must be >= 1000");
}

// Percentile bootstrap of the mean of `values`; the interval always contains
// the point estimate.
Estimate bootstrap(std::span<const double> values, int resamples, std::uint64_t seed) {
  check_resamples(resamples);
  const std::size_t n = values.size();
  Estimate e;
  e.point = mean_of(values);
  e.n = n;
  e.method = "percentile-bootstrap";
  IndexSampler sample(seed);
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (auto& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += values[sample(n)];
    m = sum / static_cast<double>(n);
  }
  e.ci_low = std::min(percentile(means, 0.025), e.point);
  e.ci_high = std::max(percentile(means, 0.975), e.point);
  return e;
}

Estimate antilog(Estimate e) {
  e.point = std::pow(10.0, e.point);
  e.ci_low = std::pow(10.0, e.ci_low);
  e.ci_high = std::pow(10.0, e.ci_high);
  e.method = "antilogged-bootstrap";
  return e;
}

std::vector<double> log10_times(std::span<const double> times) {
  std::vector<double> logs;
  for (double t : times) {
    if (!(t > 0.0) || !std::isfinite(t))
      throw ValidationError("times must be positive, got " + format_number(t));
    logs.push_back(std::log10(t));
  }
  return logs;
}

void check_paired(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw ValidationError("paired samples differ in length (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
  if (a.size() < 2) throw ValidationError("need at least 2 pairs");
}

}  // namespace

Estimate bootstrap_mean_ci(std::span<const double> samples, int resamples, std::uint64_t seed) {
  if (samples.empty()) throw ValidationError("bootstrap of an empty sample");
  return bootstrap(samples, resamples, seed);
}

Estimate pairwise_diff_ci(std::span<const double> a, std::span<const double> b, int resamples,
                          std::uint64_t seed) {
  check_paired(a, b);
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return bootstrap(d, resamples, seed);
}

// Log base 10 so that exact powers of ten give exact geometric means.
Estimate geometric_mean_ci(std::span<const double> times, int resamples, std::uint64_t seed) {
  if (times.empty()) throw ValidationError("geometric mean of an empty sample");
  return antilog(bootstrap(log10_times(times), resamples, seed));
}

Estimate pairwise_ratio_ci(std::span<const double> a, std::span<const double> b, int resamples,
                           std::uint64_t seed) {
  check_paired(a, b);
  const auto la = log10_times(a), lb = log10_times(b);
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = la[i] - lb[i];
  return antilog(bootstrap(d, resamples, seed));
}

RankSummary rank_summary(const std::vector<RankingRecord>& rankings) {
  RankSummary s;
  std::vector<std::string> order;
  std::map<std::string, std::vector<int>> ranks;
  std::map<std::string, bool> participants;
  int max_rank = 0;
  for (const auto& r : rankings) {
    if (!ranks.count(r.technique)) order.push_back(r.technique);
    ranks[r.technique].push_back(r.rank);
    participants[r.participant_id] = true;
    max_rank = std::max(max_rank, r.rank);
  }
  s.participants = participants.size();
  for (const auto& t : order) {
    std::vector<double> v(ranks[t].begin(), ranks[t].end());
    RankRow row;
    row.technique = t;
    row.mean = mean_of(v);
    row.median = percentile(v, 0.5);
    double ss = 0.0;
    for (double x : v) ss += (x - row.mean) * (x - row.mean);
    row.sd = std::sqrt(ss / static_cast<double>(v.size()));
    row.counts.assign(static_cast<std::size_t>(max_rank), 0);
    for (int r : ranks[t])
      if (r >= 1) ++row.counts[static_cast<std::size_t>(r - 1)];
    s.rows.push_back(std::move(row));
  }
  return s;
}

namespace {

std::string ordinal(int n) {
  const int tens = n % 100;
  const char* suffix = "th";
  if (tens < 11 || tens > 13) {
    if (n % 10 == 1) suffix = "st";
    if (n % 10 == 2) suffix = "nd";
    if (n % 10 == 3) suffix = "rd";
  }
  return std::to_string(n) + suffix;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string rank_summary_csv(const RankSummary& summary) {
  std::ostringstream out;
  out << "technique,mean,median,sd";
  const std::size_t positions = summary.rows.empty() ? 0 : summary.rows.front().counts.size();
  for (std::size_t r = 1; r <= positions; ++r) out << ',' << ordinal(static_cast<int>(r));
  out << '\n';
  for (const auto& row : summary.rows) {
    out << csv_field(row.technique) << ',' << format_number(row.mean) << ','
        << format_number(row.median) << ',' << format_number(row.sd);
    for (int c : row.counts) out << ',' << c;
    out << '\n';
  }
  return out.str();
}

namespace {

constexpr std::string_view kAllQuestions = "all";

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct Cell {
  double correct = 0.0;
  double log_time = 0.0;
  int trials = 0;
};

// Participant-level values for one question: technique -> participant -> cell.
using QuestionCells = std::map<std::string, std::map<std::string, Cell>>;

}  // namespace

std::vector<AnalysisRow> analyze(const TrialSet& trials, const AnalysisOptions& options) {
  check_resamples(options.resamples);
  if (trials.records.empty()) throw ValidationError("analyze: no trial records");

  std::vector<std::string> questions, techniques;
  std::map<std::string, QuestionCells> by_question;
  auto note = [](std::vector<std::string>& seen, const std::string& v) {
    if (std::find(seen.begin(), seen.end(), v) == seen.end()) seen.push_back(v);
  };
  for (const auto& r : trials.records) {
    if (!(r.time_ms > 0.0)) throw ValidationError("analyze: non-positive time_ms");
    note(questions, r.question);
    note(techniques, r.technique);
    for (const std::string& q : {r.question, std::string(kAllQuestions)}) {
      Cell& c = by_question[q][r.technique][r.participant_id];
      c.correct += r.correct;
      c.log_time += std::log10(r.time_ms);
      ++c.trials;
    }
  }
  if (questions.size() > 1) questions.emplace_back(kAllQuestions);

  auto seed_for = [&](const std::string& q, const std::string& t, std::string_view m) {
    return options.seed ^ fnv1a(q + '\x1f' + t + '\x1f' + std::string(m));
  };

  std::vector<AnalysisRow> rows;
  for (const auto& q : questions) {
    const QuestionCells& cells = by_question[q];
    auto values = [&](const std::string& t, bool time) {
      std::map<std::string, double> v;
      const auto it = cells.find(t);
      if (it == cells.end()) return v;
      for (const auto& [p, c] : it->second)
        v[p] = time ? std::pow(10.0, c.log_time / c.trials) : c.correct / c.trials;
      return v;
    };
    auto flat = [](const std::map<std::string, double>& m) {
      std::vector<double> v;
      for (const auto& [p, x] : m) v.push_back(x);
      return v;
    };

    for (const auto& t : techniques) {
      const auto acc = flat(values(t, false));
      if (acc.empty()) continue;
      rows.push_back({q, t, "accuracy",
                      bootstrap_mean_ci(acc, options.resamples, seed_for(q, t, "accuracy"))});
      rows.push_back({q, t, "time",
                      geometric_mean_ci(flat(values(t, true)), options.resamples,
                                        seed_for(q, t, "time"))});
    }
    for (std::size_t i = 0; i < techniques.size(); ++i) {
      for (std::size_t j = i + 1; j < techniques.size(); ++j) {
        const auto& ta = techniques[i];
        const auto& tb = techniques[j];
        for (bool time : {false, true}) {
          const auto va = values(ta, time), vb = values(tb, time);
          std::vector<double> a, b;
          for (const auto& [p, x] : va) {
            const auto it = vb.find(p);
            if (it == vb.end()) continue;
            a.push_back(x);
            b.push_back(it->second);
          }
          if (a.size() < 2) continue;
          if (time) {
            const std::string label = ta + " / " + tb;
            rows.push_back({q, label, "time_ratio",
                            pairwise_ratio_ci(a, b, options.resamples,
                                              seed_for(q, label, "time_ratio"))});
          } else {
            const std::string label = ta + " - " + tb;
            rows.push_back({q, label, "accuracy_diff",
                            pairwise_diff_ci(a, b, options.resamples,
                                             seed_for(q, label, "accuracy_diff"))});
          }
        }
      }
    }
  }
  return rows;
}

std::string analysis_csv(const std::vector<AnalysisRow>& rows) {
  std::ostringstream out;
  out << "question,technique,measure,point,ci_low,ci_high,n,method\n";
  for (const auto& r : rows) {
    const Estimate& e = r.estimate;
    out << csv_field(r.question) << ',' << csv_field(r.technique) << ',' << r.measure << ','
        << format_number(e.point) << ',' << format_number(e.ci_low) << ','
        << format_number(e.ci_high) << ',' << e.n << ',' << e.method << '\n';
  }
  return out.str();
}

Scene estimate_chart(const std::vector<AnalysisRow>& rows, const std::string& measure) {
  constexpr double kLabelWidth = 220.0, kPlotWidth = 480.0, kRow = 22.0, kHeader = 30.0;
  constexpr double kMarginX = 16.0, kTop = 40.0;

  std::vector<const AnalysisRow*> picked;
  std::vector<std::string> questions;
  for (const auto& r : rows) {
    if (r.measure != measure) continue;
    picked.push_back(&r);
    if (std::find(questions.begin(), questions.end(), r.question) == questions.end())
      questions.push_back(r.question);
  }

  // Axis range; differences and ratios keep their no-effect reference in view.
  double lo = 0.0, hi = 1.0, reference = std::numeric_limits<double>::quiet_NaN();
  if (measure == "accuracy_diff") {
    lo = -1.0;
    reference = 0.0;
  } else if (measure == "time" || measure == "time_ratio") {
    lo = measure == "time" ? 0.0 : 1.0;
    hi = lo;
    if (measure == "time_ratio") reference = 1.0;
    for (const auto* r : picked) {
      hi = std::max(hi, r->estimate.ci_high);
      if (measure == "time_ratio") lo = std::min(lo, r->estimate.ci_low);
    }
    if (hi == lo) hi = lo + 1.0;
    const double pad = 0.05 * (hi - lo);
    hi += pad;
    if (measure == "time_ratio") lo -= pad;
  }
  const double x0 = kMarginX + kLabelWidth;
  auto to_x = [&](double v) { return x0 + kPlotWidth * (v - lo) / (hi - lo); };

  Scene scene;
  scene.width = x0 + kPlotWidth + 2 * kMarginX;
  scene.height = kTop + static_cast<double>(questions.size()) * kHeader +
                 static_cast<double>(picked.size()) * kRow + 40.0;
  scene.add(RectNode{"background", 0, 0, scene.width, scene.height,
                     Style{"#ffffff", "", 0.0, std::nullopt}});
  scene.add(TextNode{{kMarginX, 24.0}, measure + " (95% bootstrap CI)", 15.0, "start", "#000000"});

  const double plot_bottom = scene.height - 30.0;
  if (!std::isnan(reference))
    scene.add(PathNode{"reference", {{{to_x(reference), kTop}, {to_x(reference), plot_bottom}}},
                       Style{"none", "#999999", 1.0, std::nullopt}});
  GroupNode axis{"axis", std::nullopt, {}};
  axis.add(PathNode{"", {{{x0, plot_bottom}, {x0 + kPlotWidth, plot_bottom}}},
                    Style{"none", "#000000", 1.0, std::nullopt}});
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    axis.add(TextNode{{to_x(v), plot_bottom + 16.0}, fmt::format("{:.2f}", v), 11.0, "middle",
                      "#000000"});
  }
  scene.add(std::move(axis));

  double y = kTop;
  for (const auto& q : questions) {
    GroupNode block{"question:" + q, std::nullopt, {}};
    block.add(TextNode{{kMarginX, y + 18.0}, q, 13.0, "start", "#000000"});
    y += kHeader;
    for (const auto* r : picked) {
      if (r->question != q) continue;
      const double cy = y + kRow / 2;
      const std::string id = "est:" + q + "/" + r->technique;
      block.add(TextNode{{x0 - 8.0, cy + 4.0}, r->technique, 11.0, "end", "#000000"});
      block.add(PathNode{id + "/ci",
                         {{{to_x(r->estimate.ci_low), cy}, {to_x(r->estimate.ci_high), cy}}},
                         Style{"none", "#000000", 1.5, std::nullopt}});
      block.add(CircleNode{id, {to_x(r->estimate.point), cy}, 4.0,
                           Style{"#000000", "", 0.0, std::nullopt}});
      y += kRow;
    }
    scene.add(std::move(block));
  }
  return scene;
}

}  // namespace bivmap
