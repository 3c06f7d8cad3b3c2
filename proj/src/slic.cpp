#include "spxtrack/slic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

namespace spxtrack {

namespace {

// --- sRGB -> CIELAB (D65) ----------------------------------------------

const std::array<double, 256>& srgb_linear_table() {
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    for (int i = 0; i < 256; ++i) {
      const double s = i / 255.0;
      t[i] = s <= 0.04045 ? s / 12.92 : std::pow((s + 0.055) / 1.055, 2.4);
    }
    return t;
  }();
  return table;
}

inline double lab_f(double t) {
  constexpr double kCube = 0.008856451679035631;  // (6/29)^3
  constexpr double kSlope = 7.787037037037037;    // 1 / (3 (6/29)^2)
  return t > kCube ? std::cbrt(t) : kSlope * t + 4.0 / 29.0;
}

struct Lab {
  double l, a, b;
};

inline Lab rgb_to_lab(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const auto& lin = srgb_linear_table();
  const double r = lin[r8];
  const double g = lin[g8];
  const double b = lin[b8];
  const double x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / 0.95047;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / 1.08883;
  const double fx = lab_f(x);
  const double fy = lab_f(y);
  const double fz = lab_f(z);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

// --- seed grid ----------------------------------------------------------

struct GridShape {
  int nx = 1;
  int ny = 1;
};

// Pick the (nx, ny) grid whose cell count is closest to the requested
// superpixel count, preferring cells shaped like the image.
GridShape choose_grid(int width, int height, int target) {
  GridShape best;
  long long best_count_err = std::numeric_limits<long long>::max();
  double best_aspect_err = std::numeric_limits<double>::max();
  const int ny_limit = std::min(height, target);
  for (int ny = 1; ny <= ny_limit; ++ny) {
    int nx = static_cast<int>(std::llround(static_cast<double>(target) / ny));
    nx = std::clamp(nx, 1, width);
    const long long count_err = std::llabs(static_cast<long long>(nx) * ny - target);
    const double aspect_err =
        std::fabs(std::log((static_cast<double>(width) / nx) / (static_cast<double>(height) / ny)));
    if (count_err < best_count_err ||
        (count_err == best_count_err && aspect_err < best_aspect_err)) {
      best_count_err = count_err;
      best_aspect_err = aspect_err;
      best = {nx, ny};
    }
  }
  return best;
}

struct Cluster {
  double l = 0, a = 0, b = 0, x = 0, y = 0;
};

// --- component merging (shared by connectivity enforcement and the
//     superpixel-count cap) ---------------------------------------------

struct ComponentForest {
  std::vector<int> parent;
  std::vector<std::size_t> size;
  std::vector<std::uint32_t> first_pixel;
  std::vector<std::set<int>> adj;

  int find(int v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }

  // Merge component `loser` into `winner`; both must be roots.
  void merge(int winner, int loser) {
    parent[loser] = winner;
    size[winner] += size[loser];
    first_pixel[winner] = std::min(first_pixel[winner], first_pixel[loser]);
    for (int n : adj[loser]) {
      if (n == winner) continue;
      adj[n].erase(loser);
      adj[n].insert(winner);
      adj[winner].insert(n);
    }
    adj[winner].erase(loser);
    adj[loser].clear();
  }

  int largest_neighbor(int root) const {
    int best = -1;
    for (int n : adj[root]) {
      if (best < 0 || size[n] > size[best] ||
          (size[n] == size[best] && first_pixel[n] < first_pixel[best])) {
        best = n;
      }
    }
    return best;
  }
};

ComponentForest label_components(const std::vector<std::uint32_t>& labels, int w, int h,
                                 std::vector<int>& comp_of) {
  comp_of.assign(labels.size(), -1);
  ComponentForest f;
  std::vector<std::uint32_t> stack;
  for (std::uint32_t p = 0; p < labels.size(); ++p) {
    if (comp_of[p] >= 0) continue;
    const int id = static_cast<int>(f.parent.size());
    f.parent.push_back(id);
    f.size.push_back(0);
    f.first_pixel.push_back(p);
    f.adj.emplace_back();
    stack.clear();
    stack.push_back(p);
    comp_of[p] = id;
    while (!stack.empty()) {
      const std::uint32_t q = stack.back();
      stack.pop_back();
      ++f.size[id];
      const int x = static_cast<int>(q % w);
      const int y = static_cast<int>(q / w);
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
        const std::uint32_t r = static_cast<std::uint32_t>(ny[k]) * w + nx[k];
        if (labels[r] == labels[q]) {
          if (comp_of[r] < 0) {
            comp_of[r] = id;
            stack.push_back(r);
          }
        }
      }
    }
  }
  // adjacency between distinct components over 4-neighbor edges
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      if (x + 1 < w) {
        const int a = comp_of[p];
        const int b = comp_of[p + 1];
        if (a != b) {
          f.adj[a].insert(b);
          f.adj[b].insert(a);
        }
      }
      if (y + 1 < h) {
        const int a = comp_of[p];
        const int b = comp_of[p + w];
        if (a != b) {
          f.adj[a].insert(b);
          f.adj[b].insert(a);
        }
      }
    }
  }
  return f;
}

// Absorb components below min_size into their largest adjacent component,
// then (optionally) keep absorbing the smallest component until at most
// max_count remain. Returns the dense relabeling.
Segmentation merge_and_relabel(const std::vector<std::uint32_t>& labels, int w, int h,
                               std::size_t min_size, std::size_t max_count) {
  std::vector<int> comp_of;
  ComponentForest f = label_components(labels, w, h, comp_of);

  auto roots = [&f] {
    std::vector<int> r;
    for (int i = 0; i < static_cast<int>(f.parent.size()); ++i) {
      if (f.parent[i] == i) r.push_back(i);
    }
    return r;
  };

  for (;;) {
    int victim = -1;
    for (int r : roots()) {
      if (f.size[r] >= min_size || f.adj[r].empty()) continue;
      if (victim < 0 || f.size[r] < f.size[victim] ||
          (f.size[r] == f.size[victim] && f.first_pixel[r] < f.first_pixel[victim])) {
        victim = r;
      }
    }
    if (victim < 0) break;
    f.merge(f.largest_neighbor(victim), victim);
  }

  while (roots().size() > max_count) {
    int victim = -1;
    for (int r : roots()) {
      if (f.adj[r].empty()) continue;
      if (victim < 0 || f.size[r] < f.size[victim] ||
          (f.size[r] == f.size[victim] && f.first_pixel[r] < f.first_pixel[victim])) {
        victim = r;
      }
    }
    if (victim < 0) break;
    f.merge(f.largest_neighbor(victim), victim);
  }

  std::vector<std::uint32_t> dense(f.parent.size(), std::numeric_limits<std::uint32_t>::max());
  std::vector<std::uint32_t> out(labels.size());
  std::uint32_t next = 0;
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const int root = f.find(comp_of[p]);
    if (dense[root] == std::numeric_limits<std::uint32_t>::max()) dense[root] = next++;
    out[p] = dense[root];
  }
  return segmentation_from_labels(out, w, h);
}

}  // namespace

Segmentation enforce_connectivity(const std::vector<std::uint32_t>& labels, int width,
                                  int height, std::size_t min_size) {
  if (width < 1 || height < 1 ||
      labels.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("enforce_connectivity: label map does not cover the grid");
  }
  return merge_and_relabel(labels, width, height, min_size,
                           std::numeric_limits<std::size_t>::max());
}

Segmentation segment(const Frame& frame, const SlicConfig& cfg, std::uint64_t /*seed*/) {
  if (!frame.valid()) throw std::invalid_argument("segment: invalid frame");
  if (cfg.target_count < 1) throw std::invalid_argument("segment: target_count must be >= 1");
  if (cfg.compactness <= 0) throw std::invalid_argument("segment: compactness must be > 0");
  if (cfg.iterations < 1) throw std::invalid_argument("segment: iterations must be >= 1");
  const int w = frame.width;
  const int h = frame.height;
  const std::size_t n = frame.pixel_count();
  if (static_cast<std::size_t>(cfg.target_count) > n) {
    throw std::invalid_argument("segment: target_count exceeds pixel count");
  }

  std::vector<Lab> lab(n);
  for (std::size_t p = 0; p < n; ++p) {
    lab[p] = rgb_to_lab(frame.data[p * 3], frame.data[p * 3 + 1], frame.data[p * 3 + 2]);
  }

  const GridShape grid = choose_grid(w, h, cfg.target_count);
  const int nseeds = grid.nx * grid.ny;

  auto lab_at = [&](int x, int y) -> const Lab& {
    return lab[static_cast<std::size_t>(y) * w + x];
  };
  auto gradient = [&](int x, int y) {
    const Lab& xp = lab_at(std::min(x + 1, w - 1), y);
    const Lab& xm = lab_at(std::max(x - 1, 0), y);
    const Lab& yp = lab_at(x, std::min(y + 1, h - 1));
    const Lab& ym = lab_at(x, std::max(y - 1, 0));
    const double dx1 = xp.l - xm.l, dx2 = xp.a - xm.a, dx3 = xp.b - xm.b;
    const double dy1 = yp.l - ym.l, dy2 = yp.a - ym.a, dy3 = yp.b - ym.b;
    return dx1 * dx1 + dx2 * dx2 + dx3 * dx3 + dy1 * dy1 + dy2 * dy2 + dy3 * dy3;
  };

  const bool perturb = std::min(static_cast<double>(w) / grid.nx,
                                static_cast<double>(h) / grid.ny) >= 3.0;
  std::vector<Cluster> centers(nseeds);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      int sx = static_cast<int>((i + 0.5) * w / grid.nx);
      int sy = static_cast<int>((j + 0.5) * h / grid.ny);
      sx = std::clamp(sx, 0, w - 1);
      sy = std::clamp(sy, 0, h - 1);
      if (perturb) {
        double best = gradient(sx, sy);
        int bx = sx, by = sy;
        for (int yy = std::max(0, sy - 1); yy <= std::min(h - 1, sy + 1); ++yy) {
          for (int xx = std::max(0, sx - 1); xx <= std::min(w - 1, sx + 1); ++xx) {
            const double g = gradient(xx, yy);
            if (g < best) {
              best = g;
              bx = xx;
              by = yy;
            }
          }
        }
        sx = bx;
        sy = by;
      }
      Cluster& c = centers[j * grid.nx + i];
      const Lab& l0 = lab_at(sx, sy);
      c = {l0.l, l0.a, l0.b, static_cast<double>(sx), static_cast<double>(sy)};
    }
  }

  const double spacing = std::sqrt(static_cast<double>(n) / nseeds);
  const double xy_weight = (cfg.compactness / spacing) * (cfg.compactness / spacing);
  const int window = std::max(2, static_cast<int>(std::ceil(1.5 * spacing)));

  std::vector<std::uint32_t> assignment(n, 0);
  std::vector<double> best_dist(n);
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    std::fill(best_dist.begin(), best_dist.end(), std::numeric_limits<double>::infinity());
    for (int k = 0; k < nseeds; ++k) {
      const Cluster& c = centers[k];
      const int x0 = std::max(0, static_cast<int>(c.x) - window);
      const int x1 = std::min(w - 1, static_cast<int>(c.x) + window);
      const int y0 = std::max(0, static_cast<int>(c.y) - window);
      const int y1 = std::min(h - 1, static_cast<int>(c.y) + window);
      for (int y = y0; y <= y1; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        for (int x = x0; x <= x1; ++x) {
          const std::size_t p = row + x;
          const Lab& v = lab[p];
          const double dl = v.l - c.l, da = v.a - c.a, db = v.b - c.b;
          const double dx = x - c.x, dy = y - c.y;
          const double d = dl * dl + da * da + db * db + xy_weight * (dx * dx + dy * dy);
          if (d < best_dist[p]) {
            best_dist[p] = d;
            assignment[p] = static_cast<std::uint32_t>(k);
          }
        }
      }
    }
    // pixels outside every search window fall back to the nearest center
    for (std::size_t p = 0; p < n; ++p) {
      if (best_dist[p] != std::numeric_limits<double>::infinity()) continue;
      const double px = static_cast<double>(p % w);
      const double py = static_cast<double>(p / w);
      double best = std::numeric_limits<double>::infinity();
      for (int k = 0; k < nseeds; ++k) {
        const double dx = px - centers[k].x;
        const double dy = py - centers[k].y;
        const double d = dx * dx + dy * dy;
        if (d < best) {
          best = d;
          assignment[p] = static_cast<std::uint32_t>(k);
        }
      }
    }

    std::vector<Cluster> sum(nseeds);
    std::vector<std::size_t> cnt(nseeds, 0);
    for (std::size_t p = 0; p < n; ++p) {
      Cluster& s = sum[assignment[p]];
      s.l += lab[p].l;
      s.a += lab[p].a;
      s.b += lab[p].b;
      s.x += static_cast<double>(p % w);
      s.y += static_cast<double>(p / w);
      ++cnt[assignment[p]];
    }
    for (int k = 0; k < nseeds; ++k) {
      if (cnt[k] == 0) continue;  // empty cluster keeps its previous center
      const double m = static_cast<double>(cnt[k]);
      centers[k] = {sum[k].l / m, sum[k].a / m, sum[k].b / m, sum[k].x / m, sum[k].y / m};
    }
  }

  const std::size_t min_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(cfg.enforce_min_size * (static_cast<double>(n) / nseeds)));
  return merge_and_relabel(assignment, w, h, min_size,
                           static_cast<std::size_t>(2) * cfg.target_count);
}

}  // namespace spxtrack
