#include "spxtrack/features.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "spxtrack/errors.hpp"
#include "spxtrack/rng.hpp"

namespace spxtrack {

namespace {

void validate_box_sizes(const std::vector<int>& box_sizes) {
  if (box_sizes.empty()) throw std::invalid_argument("feature bank: empty box size set");
  for (int b : box_sizes) {
    if (b < 1 || b % 2 == 0) {
      throw std::invalid_argument("feature bank: box sizes must be odd and >= 1");
    }
  }
}

// Uniform integer point in the closed disc of the given radius.
std::pair<int, int> sample_disc(SplitMix64& rng, int radius) {
  const std::uint64_t span = static_cast<std::uint64_t>(2 * radius + 1);
  for (;;) {
    const int dx = static_cast<int>(rng.next_below(span)) - radius;
    const int dy = static_cast<int>(rng.next_below(span)) - radius;
    if (dx * dx + dy * dy <= radius * radius) return {dx, dy};
  }
}

}  // namespace

FeatureBank generate_bank(std::uint64_t seed, int count, int radius,
                          std::vector<int> box_sizes) {
  validate_box_sizes(box_sizes);
  if (radius < 1) throw std::invalid_argument("feature bank: radius must be >= 1");
  const int forced = static_cast<int>(box_sizes.size()) * 3;
  if (count < forced) {
    throw std::invalid_argument("feature bank: count " + std::to_string(count) +
                                " below the " + std::to_string(forced) +
                                " forced local-color features");
  }

  FeatureBank bank;
  bank.count = count;
  bank.radius = radius;
  bank.box_sizes = std::move(box_sizes);
  bank.seed = seed;
  bank.params.reserve(count);

  for (int b : bank.box_sizes) {
    for (int c = 0; c < 3; ++c) {
      FeatureParam p;
      p.box = b;
      p.box2 = b;
      p.channel = static_cast<std::uint8_t>(c);
      bank.params.push_back(p);
    }
  }

  SplitMix64 rng(seed);
  const std::uint64_t nb = bank.box_sizes.size();
  while (static_cast<int>(bank.params.size()) < count) {
    FeatureParam p;
    const auto [dx, dy] = sample_disc(rng, radius);
    const auto [dx2, dy2] = sample_disc(rng, radius);
    p.dx = dx;
    p.dy = dy;
    p.dx2 = dx2;
    p.dy2 = dy2;
    p.box = bank.box_sizes[rng.next_below(nb)];
    p.box2 = bank.box_sizes[rng.next_below(nb)];
    p.diff = static_cast<std::uint8_t>(rng.next_below(2));
    p.channel = static_cast<std::uint8_t>(rng.next_below(3));
    bank.params.push_back(p);
  }
  return bank;
}

void save_bank(const FeatureBank& bank, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path.string() + ": unwritable path");
  out << "spxbank 1\n";
  out << "count " << bank.count << "\n";
  out << "radius " << bank.radius << "\n";
  out << "boxes";
  for (int b : bank.box_sizes) out << " " << b;
  out << "\n";
  out << "seed " << bank.seed << "\n";
  for (const FeatureParam& p : bank.params) {
    out << "p " << p.box << " " << p.box2 << " " << p.dx << " " << p.dy << " " << p.dx2 << " "
        << p.dy2 << " " << int(p.diff) << " " << int(p.channel) << "\n";
  }
  if (!out) throw DataError(path.string() + ": write failed");
}

FeatureBank load_bank(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": unreadable file");
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "spxbank" || version != 1) {
    throw DataError(path.string() + ": not a version-1 feature bank file");
  }
  FeatureBank bank;
  std::string key;
  in >> key >> bank.count;
  if (key != "count") throw DataError(path.string() + ": malformed bank file");
  in >> key >> bank.radius;
  if (key != "radius") throw DataError(path.string() + ": malformed bank file");
  in >> key;
  if (key != "boxes") throw DataError(path.string() + ": malformed bank file");
  std::string rest;
  std::getline(in, rest);
  std::istringstream boxes(rest);
  int b;
  while (boxes >> b) bank.box_sizes.push_back(b);
  in >> key >> bank.seed;
  if (key != "seed") throw DataError(path.string() + ": malformed bank file");
  for (int i = 0; i < bank.count; ++i) {
    FeatureParam p;
    int diff, channel;
    in >> key >> p.box >> p.box2 >> p.dx >> p.dy >> p.dx2 >> p.dy2 >> diff >> channel;
    if (!in || key != "p") throw DataError(path.string() + ": truncated bank file");
    p.diff = static_cast<std::uint8_t>(diff);
    p.channel = static_cast<std::uint8_t>(channel);
    bank.params.push_back(p);
  }
  return bank;
}

IntegralStack::IntegralStack(const Frame& frame) {
  if (!frame.valid()) throw std::invalid_argument("integral stack: invalid frame");
  width_ = frame.width;
  height_ = frame.height;
  plane_ = static_cast<std::size_t>(width_ + 1) * (height_ + 1);
  sat_.assign(plane_ * 3, 0);
  for (int c = 0; c < 3; ++c) {
    std::uint64_t* t = sat_.data() + plane_ * c;
    const int stride = width_ + 1;
    for (int y = 1; y <= height_; ++y) {
      std::uint64_t row = 0;
      for (int x = 1; x <= width_; ++x) {
        row += frame.at(x - 1, y - 1, c);
        t[y * stride + x] = t[(y - 1) * stride + x] + row;
      }
    }
  }
}

double IntegralStack::box_mean(int cx, int cy, int box, int channel) const {
  cx = std::clamp(cx, 0, width_ - 1);
  cy = std::clamp(cy, 0, height_ - 1);
  const int half = box / 2;
  const int x0 = std::max(0, cx - half);
  const int x1 = std::min(width_ - 1, cx + half);
  const int y0 = std::max(0, cy - half);
  const int y1 = std::min(height_ - 1, cy + half);
  const std::uint64_t sum = table_at(channel, x1 + 1, y1 + 1) - table_at(channel, x0, y1 + 1) -
                            table_at(channel, x1 + 1, y0) + table_at(channel, x0, y0);
  const int area = (x1 - x0 + 1) * (y1 - y0 + 1);
  return static_cast<double>(sum) / area;
}

void features_at(const IntegralStack& stack, int x, int y, const FeatureBank& bank, double* out) {
  for (int m = 0; m < bank.count; ++m) {
    const FeatureParam& p = bank.params[m];
    double v = stack.box_mean(x + p.dx, y + p.dy, p.box, p.channel);
    if (p.diff) v -= stack.box_mean(x + p.dx2, y + p.dy2, p.box2, p.channel);
    out[m] = v;
  }
}

std::vector<double> features_at(const IntegralStack& stack, int x, int y,
                                const FeatureBank& bank) {
  std::vector<double> out(static_cast<std::size_t>(bank.count));
  features_at(stack, x, y, bank, out.data());
  return out;
}

}  // namespace spxtrack
