#include <doctest.h>

#include <algorithm>
#include <random>

#include "bivmap/classify.hpp"
#include "bivmap/error.hpp"

using namespace bivmap;

namespace {

// Brute force: sort, then class c holds ranks [ceil(c*n/k), ceil((c+1)*n/k)),
// with equal values pulled into the class of their first occurrence's upper
// neighbour (a tie goes to the upper bin).
std::vector<int> oracle_classes(const std::vector<double>& v, int k) {
  std::vector<double> s = v;
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  std::vector<double> starts;  // smallest value of each class
  for (int c = 1; c < k; ++c) {
    const std::size_t idx = (static_cast<std::size_t>(c) * n + k - 1) / static_cast<std::size_t>(k);
    if (idx < n) starts.push_back(s[idx]);
  }
  std::vector<double> bounds;
  for (double b : starts)
    if (b > s.front() && (bounds.empty() || b > bounds.back())) bounds.push_back(b);
  std::vector<int> out;
  for (double x : v) {
    int c = 0;
    for (double b : bounds) c += x >= b;
    out.push_back(c);
  }
  return out;
}

}  // namespace

TEST_SUITE("classify") {
  TEST_CASE("quantile breaks of 1..10 into five classes") {
    std::vector<double> v;
    for (int i = 1; i <= 10; ++i) v.push_back(i);
    const Breaks b = quantile_breaks(v, 5);
    CHECK(b.boundaries == std::vector<double>{3, 5, 7, 9});
    CHECK(b.effective_k == 5);
    // Equal-count invariant: two values per class.
    std::vector<int> counts(5, 0);
    for (double x : v) ++counts[static_cast<std::size_t>(classify(x, b))];
    CHECK(counts == std::vector<int>{2, 2, 2, 2, 2});
  }

  TEST_CASE("degenerate inputs") {
    const Breaks same = quantile_breaks(std::vector<double>{4, 4, 4, 4}, 5);
    CHECK(same.effective_k == 1);
    CHECK(same.boundaries.empty());
    const Breaks one = quantile_breaks(std::vector<double>{1, 2, 3}, 1);
    CHECK(one.boundaries.empty());
    CHECK(one.effective_k == 1);
    CHECK_THROWS_AS(quantile_breaks(std::vector<double>{}, 3), ValidationError);
    CHECK_THROWS_AS(quantile_breaks(std::vector<double>{1.0}, 0), ValidationError);
  }

  TEST_CASE("classify with explicit boundaries and the tie rule") {
    Breaks b;
    b.k = 5;
    b.effective_k = 5;
    b.boundaries = {2, 4, 6, 8};
    CHECK(classify(5, b) == 2);
    CHECK(classify(-1, b) == 0);
    CHECK(classify(4, b) == 2);
    CHECK(classify(8, b) == 4);
    CHECK(classify(100, b) == 4);
  }

  TEST_CASE("classification agrees with a brute-force oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 400; ++trial) {
      const int n = std::uniform_int_distribution<int>(1, 200)(rng);
      const int k = std::uniform_int_distribution<int>(1, 9)(rng);
      const bool ties = trial % 3 == 0;
      std::vector<double> v;
      for (int i = 0; i < n; ++i)
        v.push_back(ties ? std::uniform_int_distribution<int>(0, 6)(rng)
                         : std::uniform_real_distribution<double>(0, 1)(rng));
      const Breaks b = quantile_breaks(v, k);
      const auto expected = oracle_classes(v, k);
      for (std::size_t i = 0; i < v.size(); ++i) REQUIRE(classify(v[i], b) == expected[i]);
      CHECK(std::is_sorted(b.boundaries.begin(), b.boundaries.end()));
      CHECK(b.effective_k == static_cast<int>(b.boundaries.size()) + 1);
    }
  }

  TEST_CASE("distinct values: class equals floor(rank * k / n)") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
      const int k = std::uniform_int_distribution<int>(1, 9)(rng);
      const int n = std::uniform_int_distribution<int>(k, 200)(rng);
      std::vector<double> v;
      for (int i = 0; i < n; ++i) v.push_back(i * 0.5 + 1.0);
      std::shuffle(v.begin(), v.end(), rng);
      const Breaks b = quantile_breaks(v, k);
      for (double x : v) {
        const int rank = static_cast<int>((x - 1.0) / 0.5);
        REQUIRE(classify(x, b) == rank * k / n);
      }
    }
  }

  TEST_CASE("equal counts when n is divisible by k") {
    std::mt19937_64 rng(5);
    for (int k = 1; k <= 9; ++k) {
      std::vector<double> v;
      for (int i = 0; i < 12 * k; ++i) v.push_back(std::uniform_real_distribution<double>(0, 1)(rng));
      const Breaks b = quantile_breaks(v, k);
      std::vector<int> counts(static_cast<std::size_t>(k), 0);
      for (double x : v) ++counts[static_cast<std::size_t>(classify(x, b))];
      for (int c : counts) CHECK(c == 12);
    }
  }

  TEST_CASE("classify is monotone") {
    std::vector<double> v{0.3, 0.1, 0.7, 0.2, 0.9, 0.5, 0.5, 0.4};
    const Breaks b = quantile_breaks(v, 4);
    int last = 0;
    for (double x = -0.1; x < 1.1; x += 0.01) {
      const int c = classify(x, b);
      CHECK(c >= last);
      last = c;
    }
  }

  TEST_CASE("alpha scale") {
    const AlphaScale s = default_alpha_scale();
    const std::vector<double> pops{1, 2, 3};
    CHECK(alpha_for(3, pops, s) == 1.0);
    CHECK(alpha_for(1, pops, s) == 0.30);
    CHECK(alpha_for(2, pops, s) == 0.65);
    CHECK_THROWS_AS(make_alpha_scale({0.5, 0.4, 1.0}), ValidationError);
    CHECK_THROWS_AS(make_alpha_scale({0.2, 0.5}), ValidationError);
    CHECK_THROWS_AS(make_alpha_scale({0.0, 1.0}), ValidationError);
  }

  TEST_CASE("palettes") {
    const Palette p = default_palette();
    CHECK(p.colors == std::vector<std::string>{"#ffffcc", "#a1dab4", "#41b6c4", "#2c7fb8", "#253494"});
    CHECK(default_palette(5).colors == p.colors);
    const Palette three = default_palette(3);
    CHECK(three.size() == 3);
    CHECK(three[0] == "#ffffcc");
    CHECK(three[2] == "#253494");
    CHECK(parse_palette("#FF0000, #00ff00").colors == std::vector<std::string>{"#ff0000", "#00ff00"});
    CHECK_THROWS_AS(parse_palette("red"), ValidationError);
    const Palette fitted = fit_palette(p, 2);
    CHECK(fitted.colors == std::vector<std::string>{"#ffffcc", "#253494"});
    CHECK(to_hex(scale_rgb(parse_hex_color("#64c8ff"), 0.5)) == "#326480");
  }
}
