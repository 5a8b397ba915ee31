#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bivmap {

// Quantile class boundaries. Class i covers [boundaries[i-1], boundaries[i]);
// a value equal to a boundary belongs to the upper class.
struct Breaks {
  int k = 1;
  std::vector<double> boundaries;
  int effective_k = 1;
  double min_value = 0.0;
  double max_value = 0.0;
};

// boundary_i is the smallest value of the i-th equal-count class of the
// sorted input. Repeated boundaries, and boundaries at the minimum, are
// merged away so no class is empty.
Breaks quantile_breaks(std::span<const double> values, int k);

// 0-based class index.
int classify(double value, const Breaks& breaks);

struct Rgb {
  unsigned char r = 0, g = 0, b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

Rgb parse_hex_color(std::string_view hex);
std::string to_hex(Rgb c);
Rgb scale_rgb(Rgb c, double factor);

struct Palette {
  std::string name;
  std::vector<std::string> colors;  // "#rrggbb"

  std::size_t size() const { return colors.size(); }
  const std::string& operator[](std::size_t i) const { return colors[i]; }
};

// Five-class sequential yellow-green-blue scheme.
Palette default_palette();

// Sequential palette with k colours: the default scheme for k == 5, linear
// RGB interpolation along its anchors otherwise.
Palette default_palette(int k);

// Comma-separated hex colours, e.g. "#ffffcc,#a1dab4,#41b6c4".
Palette parse_palette(std::string_view text);

// Colours for `effective_k` classes taken from a palette built for k >=
// effective_k classes: evenly spaced picks keeping both ends.
Palette fit_palette(const Palette& palette, int effective_k);

struct AlphaScale {
  std::vector<double> levels;  // ascending, last == 1.0

  int k_alpha() const { return static_cast<int>(levels.size()); }
};

AlphaScale default_alpha_scale();  // 0.30, 0.65, 1.00
AlphaScale make_alpha_scale(std::vector<double> levels);

// Opacity of `population` from its quantile class among `populations`.
double alpha_for(double population, std::span<const double> populations,
                 const AlphaScale& scale);

// Level for an already computed class of a breaks object with effective_k
// classes; classes spread over the full scale when effective_k < k_alpha.
double alpha_for_class(int cls, int effective_k, const AlphaScale& scale);

}  // namespace bivmap
