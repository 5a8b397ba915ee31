#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "bivmap/error.hpp"
#include "bivmap/model_io.hpp"
#include "bivmap/stats.hpp"
#include "fixtures.hpp"
#include "stats_checks.hpp"
#include "svg.hpp"

using namespace bivmap;

namespace {

std::vector<double> lognormal(std::mt19937_64& rng, int n) {
  std::lognormal_distribution<double> d(8.0, 0.6);
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(d(rng));
  return v;
}

std::vector<RankingRecord> ranks(const std::string& tech, std::vector<int> rs) {
  std::vector<RankingRecord> out;
  for (std::size_t i = 0; i < rs.size(); ++i)
    out.push_back({"P" + std::to_string(i), tech, rs[i]});
  return out;
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("percentile interpolates between ranks") {
    CHECK(percentile({1, 2, 3, 4}, 0.5) == 2.5);
    CHECK(percentile({5}, 0.975) == 5.0);
    CHECK(percentile({0, 10}, 0.025) == doctest::Approx(0.25));
    CHECK_THROWS_AS(percentile({}, 0.5), ValidationError);
  }

  TEST_CASE("index sampler is seeded and in range") {
    IndexSampler a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
      const auto x = a(7);
      CHECK(x < 7);
      CHECK(x == b(7));
    }
  }

  TEST_CASE("constant samples give a degenerate interval") {
    const std::vector<double> v(20, 0.75);
    const auto e = bootstrap_mean_ci(v, 1000, 1);
    CHECK(e.point == 0.75);
    CHECK(e.ci_low == 0.75);
    CHECK(e.ci_high == 0.75);
    CHECK(e.n == 20);
    CHECK(e.method == "percentile-bootstrap");
  }

  TEST_CASE("balanced binary sample centres on one half") {
    std::vector<double> v;
    for (int i = 0; i < 29; ++i) {
      v.push_back(0);
      v.push_back(1);
    }
    const auto e = bootstrap_mean_ci(v, 2000, 7);
    CHECK(e.point == 0.5);
    CHECK(e.ci_low < 0.5);
    CHECK(e.ci_high > 0.5);
  }

  TEST_CASE("bootstrap arguments are checked") {
    const std::vector<double> v{1, 2};
    CHECK_THROWS_AS(bootstrap_mean_ci(v, 999, 1), ValidationError);
    CHECK_THROWS_AS(bootstrap_mean_ci(std::vector<double>{}, 1000, 1), ValidationError);
    CHECK_THROWS_AS(pairwise_diff_ci(v, std::vector<double>{1}, 1000, 1), ValidationError);
    CHECK_THROWS_AS(geometric_mean_ci(std::vector<double>{1, 0}, 1000, 1), ValidationError);
  }

  TEST_CASE("estimates are deterministic per seed") {
    std::mt19937_64 rng(2);
    const auto v = lognormal(rng, 40);
    const auto a = geometric_mean_ci(v, 2000, 11), b = geometric_mean_ci(v, 2000, 11);
    CHECK(a.ci_low == b.ci_low);
    CHECK(a.ci_high == b.ci_high);
    const auto c = geometric_mean_ci(v, 2000, 12);
    CHECK((c.ci_low != a.ci_low || c.ci_high != a.ci_high));
  }

  TEST_CASE("paired differences") {
    const std::vector<double> a{0.5, 0.7, 0.9, 1.0}, b{0.5, 0.7, 0.9, 1.0};
    auto e = pairwise_diff_ci(a, b, 1000, 3);
    CHECK(e.point == 0.0);
    CHECK(e.ci_low == 0.0);
    CHECK(e.ci_high == 0.0);
    const std::vector<double> c{1.5, 1.7, 1.9, 2.0};
    e = pairwise_diff_ci(c, a, 1000, 3);
    CHECK(e.point == doctest::Approx(1.0));
    CHECK(e.ci_low == doctest::Approx(1.0));
    CHECK(e.ci_high == doctest::Approx(1.0));

    std::mt19937_64 rng(4);
    const auto x = lognormal(rng, 30), y = lognormal(rng, 30);
    double sum = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] - y[i];
    CHECK(pairwise_diff_ci(x, y, 1000, 5).point == doctest::Approx(sum / 30).epsilon(1e-12));
  }

  TEST_CASE("geometric mean of 1, 10, 100 is exactly 10") {
    const auto e = geometric_mean_ci(std::vector<double>{1, 10, 100}, 1000, 1);
    CHECK(e.point == 10.0);
    CHECK(e.method == "antilogged-bootstrap");
    CHECK(geometric_mean_ci(std::vector<double>{5}, 1000, 1).point == doctest::Approx(5.0));
  }

  TEST_CASE("geometric mean equals the product form") {
    std::mt19937_64 rng(9);
    const auto v = lognormal(rng, 50);
    long double log_product = 0;
    for (double t : v) log_product += std::log(static_cast<long double>(t));
    const double product_form = static_cast<double>(std::exp(log_product / 50));
    const auto e = geometric_mean_ci(v, 1000, 1);
    CHECK(std::abs(e.point / product_form - 1.0) < 1e-9);
    const double am = std::accumulate(v.begin(), v.end(), 0.0) / 50;
    CHECK(e.point < am);
    CHECK(e.ci_low <= e.point);
    CHECK(e.point <= e.ci_high);
  }

  TEST_CASE("pairwise ratios") {
    const std::vector<double> b{1000, 2000, 1500, 800};
    std::vector<double> a;
    for (double x : b) a.push_back(2 * x);
    auto e = pairwise_ratio_ci(a, b, 1000, 1);
    CHECK(e.point == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(e.ci_low == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(e.ci_high == doctest::Approx(2.0).epsilon(1e-14));
    e = pairwise_ratio_ci(b, b, 1000, 1);
    CHECK(e.point == 1.0);
    CHECK(e.ci_low == 1.0);

    std::mt19937_64 rng(12);
    const auto x = lognormal(rng, 47), y = lognormal(rng, 47);
    const double r1 = pairwise_ratio_ci(x, y, 1000, 1).point;
    const double r2 = pairwise_ratio_ci(y, x, 1000, 1).point;
    CHECK(std::abs(r1 * r2 - 1.0) < 1e-12);
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::log(x[i]) - std::log(y[i]);
    CHECK(r1 == doctest::Approx(std::exp(s / 47)).epsilon(1e-12));
  }

  TEST_CASE("bootstrap coverage for Bernoulli(0.7), n = 58") {
    const double cov = testkit::bootstrap_coverage(0.7, 58, 1000, 1000, 2019);
    MESSAGE("coverage ", cov);
    CHECK(cov >= 0.90);
    CHECK(cov <= 0.97);
  }

  TEST_CASE("interval width shrinks with n") {
    std::mt19937_64 rng(77);
    std::bernoulli_distribution coin(0.7);
    double w100 = 0, w400 = 0;
    for (int s = 0; s < 20; ++s) {
      std::vector<double> a(100), b(400);
      for (auto& x : a) x = coin(rng);
      for (auto& x : b) x = coin(rng);
      const auto ea = bootstrap_mean_ci(a, 1000, rng()), eb = bootstrap_mean_ci(b, 1000, rng());
      w100 += ea.ci_high - ea.ci_low;
      w400 += eb.ci_high - eb.ci_low;
    }
    CHECK(w400 < w100);
    CHECK(w400 / w100 == doctest::Approx(0.5).epsilon(0.15));
  }

  TEST_CASE("rank summary") {
    auto s = rank_summary(ranks("X", {1, 2, 3}));
    REQUIRE(s.rows.size() == 1);
    CHECK(s.rows[0].mean == 2.0);
    CHECK(s.rows[0].median == 2.0);
    CHECK(s.rows[0].counts == std::vector<int>{1, 1, 1});
    CHECK(s.participants == 3);
    s = rank_summary(ranks("Y", {1, 1, 1, 1}));
    CHECK(s.rows[0].mean == 1.0);
    CHECK(s.rows[0].sd == 0.0);
    s = rank_summary(ranks("Z", {1, 3}));
    CHECK(s.rows[0].sd == 1.0);
  }

  TEST_CASE("rank summary csv has the table shape") {
    std::mt19937_64 rng(8);
    std::vector<RankingRecord> rs;
    const std::vector<std::string> techs{"choropleth", "juxtaposed", "value_by_alpha",
                                         "cartogram"};
    for (int p = 0; p < 49; ++p) {
      std::vector<int> order{1, 2, 3, 4};
      std::shuffle(order.begin(), order.end(), rng);
      for (int t = 0; t < 4; ++t) rs.push_back({"P" + std::to_string(p), techs[t], order[t]});
    }
    const auto s = rank_summary(rs);
    const auto csv = rank_summary_csv(s);
    CHECK(csv.substr(0, csv.find('\n')) == "technique,mean,median,sd,1st,2nd,3rd,4th");
    for (const auto& row : s.rows) CHECK(std::accumulate(row.counts.begin(), row.counts.end(), 0) == 49);
    CHECK(s.rows[0].technique == "choropleth");
  }

  TEST_CASE("analyze the fixture study") {
    const auto trials = parse_trials(read_file(testkit::fixture_path("trials.csv")),
                                     read_file(testkit::fixture_path("rankings.csv")));
    AnalysisOptions o;
    o.resamples = 1000;
    o.seed = 5;
    const auto rows = analyze(trials, o);
    const auto csv = analysis_csv(rows);
    CHECK(csv == analysis_csv(analyze(trials, o)));
    CHECK(csv.substr(0, csv.find('\n')) == "question,technique,measure,point,ci_low,ci_high,n,method");
    std::size_t all = 0, ratios = 0;
    for (const auto& r : rows) {
      CHECK(r.estimate.ci_low <= r.estimate.point);
      CHECK(r.estimate.point <= r.estimate.ci_high);
      all += r.question == "all";
      ratios += r.measure == "time_ratio";
      if (r.measure == "accuracy") CHECK(r.estimate.n == 24);
    }
    // 4 techniques, 6 pairs, 2 measures each: 8 + 12 rows per question.
    CHECK(all == 20);
    CHECK(ratios == 5 * 6);
    o.seed = 6;
    CHECK(analysis_csv(analyze(trials, o)) != csv);
  }

  TEST_CASE("analyze aggregates per participant") {
    TrialSet t;
    // Two participants, one question, two techniques; times are powers of ten.
    t.records = {{"P1", "A", "q", "S1", 1, 100},  {"P1", "A", "q", "S1", 0, 10000},
                 {"P2", "A", "q", "S1", 1, 1000}, {"P1", "B", "q", "S2", 1, 100},
                 {"P2", "B", "q", "S2", 0, 100}};
    AnalysisOptions o;
    o.resamples = 1000;
    o.seed = 1;
    const auto rows = analyze(t, o);
    auto find = [&](const std::string& tech, const std::string& m) {
      for (const auto& r : rows)
        if (r.technique == tech && r.measure == m) return r.estimate;
      FAIL("missing row " << tech << " " << m);
      return Estimate{};
    };
    // P1 accuracy 0.5, P2 1.0; P1 time 10^3, P2 10^3.
    CHECK(find("A", "accuracy").point == doctest::Approx(0.75));
    CHECK(find("A", "time").point == doctest::Approx(1000));
    CHECK(find("A / B", "time_ratio").point == doctest::Approx(10));
    CHECK(find("A - B", "accuracy_diff").point == doctest::Approx(0.25));
    for (const auto& r : rows) CHECK(r.question == "q");
  }

  TEST_CASE("estimate chart") {
    std::vector<AnalysisRow> rows{{"q1", "A", "accuracy", {0.8, 0.7, 0.9, 10, "percentile-bootstrap"}},
                                  {"q1", "B", "accuracy", {0.6, 0.5, 0.7, 10, "percentile-bootstrap"}},
                                  {"q1", "A - B", "accuracy_diff", {0.2, 0.1, 0.3, 10, "x"}}};
    const auto doc = testkit::parse_svg(write_svg(estimate_chart(rows, "accuracy")));
    const double xa = doc.at("est:q1/A").num("cx"), xb = doc.at("est:q1/B").num("cx");
    CHECK(xa > xb);
    CHECK(doc.find("est:q1/A - B") == nullptr);
    CHECK(doc.at("est:q1/A").parent_id == "question:q1");
    const auto ci = testkit::parse_path(doc.at("est:q1/A/ci").attr("d"));
    CHECK(ci[0][0].x < xa);
    CHECK(ci[0][1].x > xa);
    const auto diff = testkit::parse_svg(write_svg(estimate_chart(rows, "accuracy_diff")));
    CHECK(diff.find("reference") != nullptr);
  }
}
