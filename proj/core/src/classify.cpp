#include "bivmap/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "bivmap/error.hpp"

namespace bivmap {

Breaks quantile_breaks(std::span<const double> values, int k) {
  if (values.empty()) throw ValidationError("quantile_breaks: no values");
  if (k < 1) throw ValidationError("quantile_breaks: class count must be >= 1");

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  Breaks b;
  b.k = k;
  b.min_value = sorted.front();
  b.max_value = sorted.back();
  for (int i = 1; i < k; ++i) {
    // First sorted position of class i: ceil(i * n / k).
    const std::size_t pos = (static_cast<std::size_t>(i) * n + k - 1) / k;
    if (pos >= n) continue;
    const double boundary = sorted[pos];
    if (boundary <= b.min_value) continue;
    if (!b.boundaries.empty() && boundary <= b.boundaries.back()) continue;
    b.boundaries.push_back(boundary);
  }
  b.effective_k = static_cast<int>(b.boundaries.size()) + 1;
  return b;
}

int classify(double value, const Breaks& breaks) {
  const auto it = std::upper_bound(breaks.boundaries.begin(), breaks.boundaries.end(), value);
  return static_cast<int>(it - breaks.boundaries.begin());
}

Rgb parse_hex_color(std::string_view hex) {
  auto digit = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw ValidationError("invalid colour '" + std::string(hex) + "'");
  };
  if (hex.size() != 7 || hex[0] != '#')
    throw ValidationError("invalid colour '" + std::string(hex) + "', expected #rrggbb");
  auto byte = [&](std::size_t i) {
    return static_cast<unsigned char>(digit(hex[i]) * 16 + digit(hex[i + 1]));
  };
  return {byte(1), byte(3), byte(5)};
}

std::string to_hex(Rgb c) { return fmt::format("#{:02x}{:02x}{:02x}", c.r, c.g, c.b); }

Rgb scale_rgb(Rgb c, double factor) {
  auto s = [factor](unsigned char v) {
    return static_cast<unsigned char>(std::clamp(std::lround(v * factor), 0L, 255L));
  };
  return {s(c.r), s(c.g), s(c.b)};
}

Palette default_palette() {
  return {"sequential-ylgnbu-5", {"#ffffcc", "#a1dab4", "#41b6c4", "#2c7fb8", "#253494"}};
}

Palette default_palette(int k) {
  if (k < 1) throw ValidationError("palette class count must be >= 1");
  const Palette base = default_palette();
  if (k == static_cast<int>(base.size())) return base;
  Palette out;
  out.name = "sequential-ylgnbu-" + std::to_string(k);
  if (k == 1) {
    out.colors.push_back(base.colors[base.size() / 2]);
    return out;
  }
  const double last = static_cast<double>(base.size() - 1);
  for (int i = 0; i < k; ++i) {
    const double t = last * i / (k - 1);
    const auto lo = static_cast<std::size_t>(std::floor(t));
    const auto hi = std::min(lo + 1, base.size() - 1);
    const double f = t - lo;
    const Rgb a = parse_hex_color(base[lo]);
    const Rgb b = parse_hex_color(base[hi]);
    auto mix = [f](unsigned char x, unsigned char y) {
      return static_cast<unsigned char>(std::lround(x + (y - x) * f));
    };
    out.colors.push_back(to_hex({mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)}));
  }
  return out;
}

Palette parse_palette(std::string_view text) {
  Palette p;
  p.name = "custom";
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    p.colors.push_back(to_hex(parse_hex_color(item)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (p.colors.empty()) throw ValidationError("empty palette");
  return p;
}

Palette fit_palette(const Palette& palette, int effective_k) {
  const int size = static_cast<int>(palette.size());
  if (effective_k < 1 || effective_k > size)
    throw ValidationError("palette has " + std::to_string(size) + " colours, " +
                          std::to_string(effective_k) + " classes requested");
  if (effective_k == size) return palette;
  Palette out;
  out.name = palette.name;
  if (effective_k == 1) {
    out.colors.push_back(palette.colors[size / 2]);
    return out;
  }
  for (int i = 0; i < effective_k; ++i) {
    const auto idx = std::lround(static_cast<double>(i) * (size - 1) / (effective_k - 1));
    out.colors.push_back(palette.colors[static_cast<std::size_t>(idx)]);
  }
  return out;
}

AlphaScale default_alpha_scale() { return {{0.30, 0.65, 1.00}}; }

AlphaScale make_alpha_scale(std::vector<double> levels) {
  if (levels.empty()) throw ValidationError("alpha scale needs at least one level");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0 && levels[i] <= 1.0))
      throw ValidationError("alpha levels must lie in (0, 1]");
    if (i > 0 && !(levels[i] > levels[i - 1]))
      throw ValidationError("alpha levels must be strictly ascending");
  }
  if (levels.back() != 1.0) throw ValidationError("the last alpha level must be 1.0");
  return {std::move(levels)};
}

double alpha_for_class(int cls, int effective_k, const AlphaScale& scale) {
  const int levels = scale.k_alpha();
  if (effective_k >= levels) return scale.levels[static_cast<std::size_t>(std::min(cls, levels - 1))];
  if (effective_k <= 1) return scale.levels.back();
  const auto idx = std::lround(static_cast<double>(cls) * (levels - 1) / (effective_k - 1));
  return scale.levels[static_cast<std::size_t>(idx)];
}

double alpha_for(double population, std::span<const double> populations,
                 const AlphaScale& scale) {
  const Breaks b = quantile_breaks(populations, scale.k_alpha());
  return alpha_for_class(classify(population, b), b.effective_k, scale);
}

}  // namespace bivmap
