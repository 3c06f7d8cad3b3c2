#include "spxtrack/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "spxtrack/errors.hpp"

namespace spxtrack {

namespace {

std::string pstr(const std::filesystem::path& p) { return p.string(); }

// --- PNM (P5/P6) ------------------------------------------------------

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string next_pnm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) continue;
    tok.push_back(static_cast<char>(c));
    while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#') {
      tok.push_back(static_cast<char>(in.get()));
    }
    return tok;
  }
  return tok;
}

struct PnmHeader {
  std::string magic;
  int width = 0;
  int height = 0;
  int maxval = 0;
};

PnmHeader read_pnm_header(std::istream& in, const std::filesystem::path& path) {
  PnmHeader h;
  h.magic = next_pnm_token(in);
  const std::string ws = next_pnm_token(in);
  const std::string hs = next_pnm_token(in);
  const std::string ms = next_pnm_token(in);
  try {
    h.width = std::stoi(ws);
    h.height = std::stoi(hs);
    h.maxval = std::stoi(ms);
  } catch (const std::exception&) {
    throw DataError(pstr(path) + ": malformed PNM header");
  }
  if (h.width < 1 || h.height < 1) throw DataError(pstr(path) + ": bad PNM dimensions");
  if (h.maxval != 255) throw DataError(pstr(path) + ": unsupported PNM maxval (want 255)");
  // exactly one whitespace byte separates header and payload
  in.get();
  return h;
}

Frame load_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(pstr(path) + ": unreadable file");
  const PnmHeader h = read_pnm_header(in, path);
  if (h.magic != "P6") throw DataError(pstr(path) + ": unsupported format " + h.magic);
  Frame f(h.width, h.height);
  in.read(reinterpret_cast<char*>(f.data.data()), static_cast<std::streamsize>(f.data.size()));
  if (static_cast<std::size_t>(in.gcount()) != f.data.size()) {
    throw DataError(pstr(path) + ": dimension mismatch between header and payload");
  }
  return f;
}

std::vector<std::uint8_t> load_pnm_gray(const std::filesystem::path& path, int* w, int* h) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(pstr(path) + ": unreadable file");
  const PnmHeader hd = read_pnm_header(in, path);
  std::size_t n = static_cast<std::size_t>(hd.width) * hd.height;
  std::size_t channels;
  if (hd.magic == "P5") {
    channels = 1;
  } else if (hd.magic == "P6") {
    channels = 3;
  } else {
    throw DataError(pstr(path) + ": unsupported format " + hd.magic);
  }
  std::vector<std::uint8_t> raw(n * channels);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw DataError(pstr(path) + ": dimension mismatch between header and payload");
  }
  std::vector<std::uint8_t> gray(n);
  for (std::size_t i = 0; i < n; ++i) gray[i] = raw[i * channels];
  *w = hd.width;
  *h = hd.height;
  return gray;
}

// --- PNG --------------------------------------------------------------

struct PngRead {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::FILE* fp = nullptr;
  ~PngRead() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (fp) std::fclose(fp);
  }
};

struct PngWrite {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::FILE* fp = nullptr;
  ~PngWrite() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    if (fp) std::fclose(fp);
  }
};

// Decodes any supported PNG to tightly packed 8-bit RGB (alpha stripped,
// gray and palette expanded). 16-bit inputs are rejected unless
// allow16 is set, in which case raw 16-bit gray rows are returned.
struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> bytes;  // row-major, network order for 16-bit
};

DecodedPng decode_png(const std::filesystem::path& path, bool want_label_map) {
  PngRead ctx;
  ctx.fp = std::fopen(pstr(path).c_str(), "rb");
  if (!ctx.fp) throw DataError(pstr(path) + ": unreadable file");
  std::uint8_t sig[8];
  if (std::fread(sig, 1, 8, ctx.fp) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw DataError(pstr(path) + ": unsupported format (not a PNG)");
  }
  ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!ctx.png) throw DataError(pstr(path) + ": png init failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw DataError(pstr(path) + ": png init failed");
  if (setjmp(png_jmpbuf(ctx.png))) throw DataError(pstr(path) + ": corrupt PNG");
  png_init_io(ctx.png, ctx.fp);
  png_set_sig_bytes(ctx.png, 8);
  png_read_info(ctx.png, ctx.info);

  const int bit_depth = png_get_bit_depth(ctx.png, ctx.info);
  const int color_type = png_get_color_type(ctx.png, ctx.info);

  DecodedPng out;
  out.width = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
  out.height = static_cast<int>(png_get_image_height(ctx.png, ctx.info));

  if (want_label_map) {
    if (bit_depth != 16 || color_type != PNG_COLOR_TYPE_GRAY) {
      throw DataError(pstr(path) + ": label map must be 16-bit grayscale PNG");
    }
    out.bit_depth = 16;
    out.channels = 1;
  } else {
    if (bit_depth == 16) throw DataError(pstr(path) + ": unsupported format (16-bit PNG)");
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(ctx.png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(ctx.png);
    if (png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(ctx.png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(ctx.png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
      png_set_gray_to_rgb(ctx.png);
    }
    png_set_strip_alpha(ctx.png);
    out.bit_depth = 8;
    out.channels = 3;
  }
  png_read_update_info(ctx.png, ctx.info);

  const std::size_t rowbytes = png_get_rowbytes(ctx.png, ctx.info);
  out.bytes.resize(rowbytes * out.height);
  std::vector<png_bytep> rows(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = out.bytes.data() + rowbytes * y;
  png_read_image(ctx.png, rows.data());
  png_read_end(ctx.png, nullptr);
  return out;
}

void encode_png(const std::filesystem::path& path, int width, int height, int bit_depth,
                int color_type, const std::uint8_t* bytes, std::size_t rowbytes) {
  PngWrite ctx;
  ctx.fp = std::fopen(pstr(path).c_str(), "wb");
  if (!ctx.fp) throw DataError(pstr(path) + ": unwritable path");
  ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!ctx.png) throw DataError(pstr(path) + ": png init failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw DataError(pstr(path) + ": png init failed");
  if (setjmp(png_jmpbuf(ctx.png))) throw DataError(pstr(path) + ": png write failed");
  png_init_io(ctx.png, ctx.fp);
  png_set_IHDR(ctx.png, ctx.info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ctx.png, ctx.info);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(bytes + rowbytes * y);
  }
  png_write_image(ctx.png, rows.data());
  png_write_end(ctx.png, nullptr);
}

bool has_ext(const std::filesystem::path& p, const char* ext) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e == ext;
}

}  // namespace

std::size_t RoiMask::count_true() const {
  return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(),
                                                [](std::uint8_t b) { return b != 0; }));
}

Sequence::Sequence(std::vector<Frame> frames, int ref_index)
    : frames_(std::move(frames)), ref_index_(ref_index) {
  if (frames_.empty()) throw DataError("sequence: no frames");
  for (const Frame& f : frames_) {
    if (!f.valid()) throw DataError("sequence: invalid frame");
    if (f.width != frames_.front().width || f.height != frames_.front().height) {
      throw DataError("sequence: frame dimensions disagree");
    }
  }
  if (ref_index_ < 0 || ref_index_ >= static_cast<int>(frames_.size())) {
    throw DataError("sequence: reference index out of range");
  }
}

Frame load_frame(const std::filesystem::path& path) {
  if (has_ext(path, ".ppm")) return load_ppm(path);
  if (has_ext(path, ".png")) {
    const DecodedPng d = decode_png(path, false);
    Frame f(d.width, d.height);
    f.data = d.bytes;
    if (!f.valid()) throw DataError(pstr(path) + ": dimension mismatch between header and payload");
    return f;
  }
  throw DataError(pstr(path) + ": unsupported format (want .ppm or .png)");
}

void write_frame(const Frame& frame, const std::filesystem::path& path) {
  if (!frame.valid()) throw DataError("write_frame: invalid frame");
  if (has_ext(path, ".ppm")) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(pstr(path) + ": unwritable path");
    out << "P6\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.data.data()),
              static_cast<std::streamsize>(frame.data.size()));
    if (!out) throw DataError(pstr(path) + ": write failed");
    return;
  }
  if (has_ext(path, ".png")) {
    encode_png(path, frame.width, frame.height, 8, PNG_COLOR_TYPE_RGB, frame.data.data(),
               static_cast<std::size_t>(frame.width) * 3);
    return;
  }
  throw DataError(pstr(path) + ": unsupported format (want .ppm or .png)");
}

RoiMask load_mask(const std::filesystem::path& path, int threshold) {
  int w = 0;
  int h = 0;
  std::vector<std::uint8_t> gray;
  if (has_ext(path, ".pgm") || has_ext(path, ".ppm")) {
    gray = load_pnm_gray(path, &w, &h);
  } else if (has_ext(path, ".png")) {
    const DecodedPng d = decode_png(path, false);
    w = d.width;
    h = d.height;
    gray.resize(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = d.bytes[i * 3];
  } else {
    throw DataError(pstr(path) + ": unsupported format (want .pgm, .ppm or .png)");
  }
  RoiMask m(w, h);
  for (std::size_t i = 0; i < gray.size(); ++i) m.bits[i] = gray[i] >= threshold ? 1 : 0;
  return m;
}

void write_mask(const RoiMask& mask, const std::filesystem::path& path) {
  std::vector<std::uint8_t> gray(mask.bits.size());
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = mask.bits[i] ? 255 : 0;
  if (has_ext(path, ".pgm")) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(pstr(path) + ": unwritable path");
    out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(gray.data()),
              static_cast<std::streamsize>(gray.size()));
    return;
  }
  if (has_ext(path, ".png")) {
    encode_png(path, mask.width, mask.height, 8, PNG_COLOR_TYPE_GRAY, gray.data(),
               static_cast<std::size_t>(mask.width));
    return;
  }
  throw DataError(pstr(path) + ": unsupported format (want .pgm or .png)");
}

void write_label_map(const Segmentation& seg, const std::filesystem::path& path) {
  if (seg.count > 65535) {
    throw DataError(pstr(path) + ": more than 65535 superpixels (" + std::to_string(seg.count) +
                    ")");
  }
  const std::size_t n = static_cast<std::size_t>(seg.width) * seg.height;
  std::vector<std::uint8_t> be(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t v = seg.labels[i];
    be[i * 2] = static_cast<std::uint8_t>(v >> 8);
    be[i * 2 + 1] = static_cast<std::uint8_t>(v & 0xFF);
  }
  encode_png(path, seg.width, seg.height, 16, PNG_COLOR_TYPE_GRAY, be.data(),
             static_cast<std::size_t>(seg.width) * 2);

  std::filesystem::path sidecar = path;
  sidecar.replace_extension(".txt");
  std::ofstream out(sidecar);
  if (!out) throw DataError(pstr(sidecar) + ": unwritable path");
  out << "# superpixel centroid_x centroid_y size\n";
  char line[128];
  for (std::uint32_t i = 0; i < seg.count; ++i) {
    std::snprintf(line, sizeof(line), "%u %.6f %.6f %zu\n", i, seg.centroids[i].first,
                  seg.centroids[i].second, seg.members[i].size());
    out << line;
  }
  if (!out) throw DataError(pstr(sidecar) + ": write failed");
}

Segmentation read_label_map(const std::filesystem::path& path) {
  const DecodedPng d = decode_png(path, true);
  const std::size_t n = static_cast<std::size_t>(d.width) * d.height;
  std::vector<std::uint32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = (static_cast<std::uint32_t>(d.bytes[i * 2]) << 8) |
                static_cast<std::uint32_t>(d.bytes[i * 2 + 1]);
  }
  try {
    return segmentation_from_labels(labels, d.width, d.height);
  } catch (const std::invalid_argument& e) {
    throw DataError(pstr(path) + ": " + e.what());
  }
}

}  // namespace spxtrack
