#include "spxtrack/runner.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "spxtrack/errors.hpp"
#include "spxtrack/metrics.hpp"

namespace spxtrack {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw ConfigError("config key '" + key + "': bad value '" + value + "'");
}

long long to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) bad_value(key, value);
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value);
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) bad_value(key, value);
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value);
  }
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) bad_value(key, value);
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value);
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

std::vector<int> to_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::string token;
  std::istringstream in(value);
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (token.empty()) continue;
    out.push_back(static_cast<int>(to_int(key, token)));
  }
  if (out.empty()) bad_value(key, value);
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

const std::map<std::string, ClassifierKind> kClassifiers = {
    {"forest", ClassifierKind::forest}, {"knn", ClassifierKind::knn}};
const std::map<std::string, MatcherKind> kMatchers = {
    {"vote", MatcherKind::vote}, {"soft", MatcherKind::soft}, {"fwbw", MatcherKind::fwbw}};
const std::map<std::string, IntegrationKind> kIntegrations = {
    {"DIR", IntegrationKind::direct},
    {"SEQ", IntegrationKind::sequential},
    {"MSI", IntegrationKind::multistep}};
const std::map<std::string, MsiStrategy> kStrategies = {{"MSId", MsiStrategy::direct_only},
                                                        {"MSIr", MsiStrategy::with_reverse},
                                                        {"MSIm", MsiStrategy::mutual}};
const std::map<std::string, Direction> kDirections = {
    {"to_reference", Direction::to_reference},
    {"from_reference", Direction::from_reference}};

template <typename T>
T to_enum(const std::string& key, const std::string& value, const std::map<std::string, T>& m) {
  auto it = m.find(value);
  if (it == m.end()) bad_value(key, value);
  return it->second;
}

template <typename T>
std::string enum_name(T value, const std::map<std::string, T>& m) {
  for (const auto& [name, v] : m) {
    if (v == value) return name;
  }
  return "?";
}

std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Expand a filename pattern containing one %d or %0<width>d field.
std::string expand_pattern(const std::string& pattern, int index) {
  const std::size_t pos = pattern.find('%');
  if (pos == std::string::npos) throw ConfigError("config key 'pattern': no % field");
  std::size_t cur = pos + 1;
  int width = 0;
  bool zero_pad = false;
  if (cur < pattern.size() && pattern[cur] == '0') {
    zero_pad = true;
    ++cur;
  }
  while (cur < pattern.size() && std::isdigit(static_cast<unsigned char>(pattern[cur]))) {
    width = width * 10 + (pattern[cur] - '0');
    ++cur;
  }
  if (cur >= pattern.size() || pattern[cur] != 'd') {
    throw ConfigError("config key 'pattern': only %d and %0<width>d fields are supported");
  }
  std::string digits = std::to_string(index);
  if (zero_pad && static_cast<int>(digits.size()) < width) {
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  }
  return pattern.substr(0, pos) + digits + pattern.substr(cur + 1);
}

int trailing_number(const std::string& stem, int fallback) {
  std::size_t end = stem.size();
  while (end > 0 && std::isdigit(static_cast<unsigned char>(stem[end - 1]))) --end;
  if (end == stem.size()) return fallback;
  return std::atoi(stem.c_str() + end);
}

std::filesystem::path frame_name(const char* prefix, int index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%04d%s", prefix, index, ext);
  return buf;
}

}  // namespace

RunConfig parse_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");

  RunConfig cfg;
  bool have_seed = false;
  bool have_sequence_dir = false;
  bool have_output_dir = false;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));

    if (key == "sequence_dir") {
      cfg.sequence_dir = value;
      have_sequence_dir = true;
    } else if (key == "pattern") {
      cfg.pattern = value;
    } else if (key == "ref_index") {
      cfg.ref_index = static_cast<int>(to_int(key, value));
    } else if (key == "gt_dir") {
      cfg.gt_dir = value;
    } else if (key == "output_dir") {
      cfg.output_dir = value;
      have_output_dir = true;
    } else if (key == "cache_dir") {
      cfg.cache_dir = value;
    } else if (key == "classifier") {
      cfg.tracker.classifier = to_enum(key, value, kClassifiers);
    } else if (key == "matcher") {
      cfg.tracker.matcher = to_enum(key, value, kMatchers);
    } else if (key == "integration") {
      cfg.integration = to_enum(key, value, kIntegrations);
    } else if (key == "msi_strategy") {
      cfg.tracker.msi_strategy = to_enum(key, value, kStrategies);
    } else if (key == "steps") {
      cfg.tracker.plan.step_set = to_int_list(key, value);
    } else if (key == "k_max") {
      cfg.tracker.plan.k_max = static_cast<int>(to_int(key, value));
    } else if (key == "budget") {
      cfg.tracker.plan.budget = static_cast<int>(to_int(key, value));
    } else if (key == "superpixels") {
      cfg.tracker.slic.target_count = static_cast<int>(to_int(key, value));
    } else if (key == "compactness") {
      cfg.tracker.slic.compactness = to_double(key, value);
    } else if (key == "slic_iterations") {
      cfg.tracker.slic.iterations = static_cast<int>(to_int(key, value));
    } else if (key == "min_size_fraction") {
      cfg.tracker.slic.enforce_min_size = to_double(key, value);
    } else if (key == "features") {
      cfg.tracker.bank_count = static_cast<int>(to_int(key, value));
    } else if (key == "radius") {
      cfg.tracker.bank_radius = static_cast<int>(to_int(key, value));
    } else if (key == "box_sizes") {
      cfg.tracker.box_sizes = to_int_list(key, value);
    } else if (key == "trees") {
      cfg.tracker.forest.trees = static_cast<int>(to_int(key, value));
    } else if (key == "max_depth") {
      cfg.tracker.forest.max_depth = static_cast<int>(to_int(key, value));
    } else if (key == "min_leaf") {
      cfg.tracker.forest.min_leaf = static_cast<int>(to_int(key, value));
    } else if (key == "split_features") {
      cfg.tracker.forest.split_features = static_cast<int>(to_int(key, value));
    } else if (key == "split_thresholds") {
      cfg.tracker.forest.split_thresholds = static_cast<int>(to_int(key, value));
    } else if (key == "bootstrap") {
      cfg.tracker.forest.bootstrap = to_bool(key, value);
    } else if (key == "subsample") {
      cfg.tracker.forest.subsample = to_double(key, value);
    } else if (key == "knn_k") {
      cfg.tracker.knn_k = static_cast<int>(to_int(key, value));
    } else if (key == "direction") {
      cfg.direction = to_enum(key, value, kDirections);
    } else if (key == "seed") {
      cfg.tracker.master_seed = to_u64(key, value);
      have_seed = true;
    } else if (key == "jobs") {
      cfg.tracker.jobs = static_cast<int>(to_int(key, value));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }

  if (!have_sequence_dir) throw ConfigError("missing required config key 'sequence_dir'");
  if (!have_output_dir) throw ConfigError("missing required config key 'output_dir'");
  if (!have_seed) throw ConfigError("missing required config key 'seed'");
  return cfg;
}

std::vector<std::filesystem::path> list_sequence_files(const std::filesystem::path& dir,
                                                       const std::string& pattern) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("sequence directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  if (pattern.empty()) {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      std::string ext = entry.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (ext == ".ppm" || ext == ".png") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    for (int i = 0; i <= 99999; ++i) {
      const std::filesystem::path p = dir / expand_pattern(pattern, i);
      if (std::filesystem::exists(p)) files.push_back(p);
    }
  }
  if (files.empty()) throw DataError("no sequence frames found in " + dir.string());
  return files;
}

Direction resolved_direction(const RunConfig& cfg) {
  if (cfg.direction) return *cfg.direction;
  return cfg.integration == IntegrationKind::multistep ? Direction::from_reference
                                                       : Direction::to_reference;
}

std::filesystem::path resolved_cache_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("SPXTRACK_CACHE")) return env;
  if (cfg.cache_dir) return *cfg.cache_dir;
  return cfg.output_dir / "fields";
}

namespace {

void write_manifest(const RunConfig& cfg, const std::filesystem::path& path,
                    const TrackResult* result, const FieldCache* cache) {
  std::ofstream out(path);
  if (!out) throw DataError(path.string() + ": unwritable path");
  const TrackerConfig& t = cfg.tracker;
  out << "# spxtrack run manifest; this file is itself a runnable config\n";
  out << "sequence_dir = " << std::filesystem::absolute(cfg.sequence_dir).string() << "\n";
  if (!cfg.pattern.empty()) out << "pattern = " << cfg.pattern << "\n";
  out << "ref_index = " << cfg.ref_index << "\n";
  if (cfg.gt_dir) out << "gt_dir = " << std::filesystem::absolute(*cfg.gt_dir).string() << "\n";
  out << "output_dir = " << std::filesystem::absolute(cfg.output_dir).string() << "\n";
  out << "cache_dir = " << std::filesystem::absolute(resolved_cache_dir(cfg)).string() << "\n";
  out << "integration = " << enum_name(cfg.integration, kIntegrations) << "\n";
  out << "classifier = " << enum_name(t.classifier, kClassifiers) << "\n";
  out << "matcher = " << enum_name(t.matcher, kMatchers) << "\n";
  out << "msi_strategy = " << enum_name(t.msi_strategy, kStrategies) << "\n";
  out << "steps = " << join_ints(t.plan.step_set) << "\n";
  out << "k_max = " << t.plan.k_max << "\n";
  out << "budget = " << t.plan.budget << "\n";
  out << "superpixels = " << t.slic.target_count << "\n";
  out << "compactness = " << fmt_double(t.slic.compactness) << "\n";
  out << "slic_iterations = " << t.slic.iterations << "\n";
  out << "min_size_fraction = " << fmt_double(t.slic.enforce_min_size) << "\n";
  out << "features = " << t.bank_count << "\n";
  out << "radius = " << t.bank_radius << "\n";
  out << "box_sizes = " << join_ints(t.box_sizes) << "\n";
  out << "trees = " << t.forest.trees << "\n";
  out << "max_depth = " << t.forest.max_depth << "\n";
  out << "min_leaf = " << t.forest.min_leaf << "\n";
  out << "split_features = " << t.forest.split_features << "\n";
  out << "split_thresholds = " << t.forest.split_thresholds << "\n";
  out << "bootstrap = " << (t.forest.bootstrap ? "true" : "false") << "\n";
  out << "subsample = " << fmt_double(t.forest.subsample) << "\n";
  out << "knn_k = " << t.knn_k << "\n";
  out << "direction = " << enum_name(resolved_direction(cfg), kDirections) << "\n";
  out << "seed = " << t.master_seed << "\n";
  out << "jobs = " << t.jobs << "\n";
  out << "# derived seeds: slic=" << t.slic_seed() << " bank=" << t.bank_seed()
      << " forest=" << t.forest_seed() << " sampling=" << t.sampling_seed()
      << " reverse_sampling=" << t.reverse_sampling_seed() << "\n";
  if (result) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "# timings: prep=%.3fs fields=%.3fs integrate=%.3fs", result->prep_seconds,
                  result->fields_seconds, result->integrate_seconds);
    out << buf << "\n";
  }
  if (cache) {
    out << "# cache: computed=" << cache->computed() << " reused=" << cache->reused() << "\n";
  }
}

Sequence load_sequence(const RunConfig& cfg, std::vector<std::filesystem::path>* files_out) {
  std::vector<std::filesystem::path> files = list_sequence_files(cfg.sequence_dir, cfg.pattern);
  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (const auto& f : files) frames.push_back(load_frame(f));
  if (cfg.ref_index < 0 || cfg.ref_index >= static_cast<int>(frames.size())) {
    throw DataError("reference index " + std::to_string(cfg.ref_index) +
                    " outside the sequence (0.." + std::to_string(frames.size() - 1) + ")");
  }
  if (files_out) *files_out = std::move(files);
  return Sequence(std::move(frames), cfg.ref_index);
}

std::optional<RoiMask> load_reference_mask(const RunConfig& cfg,
                                           const std::vector<std::filesystem::path>& files) {
  if (!cfg.gt_dir) return std::nullopt;
  if (!std::filesystem::is_directory(*cfg.gt_dir)) {
    throw DataError("ground-truth directory not found: " + cfg.gt_dir->string());
  }
  const std::filesystem::path& ref_file = files.at(static_cast<std::size_t>(cfg.ref_index));
  const std::string stem = ref_file.stem().string();
  for (const char* ext : {".png", ".pgm", ".ppm"}) {
    const std::filesystem::path candidate = *cfg.gt_dir / (stem + ext);
    if (std::filesystem::exists(candidate)) return load_mask(candidate);
  }
  const std::filesystem::path same = *cfg.gt_dir / ref_file.filename();
  if (std::filesystem::exists(same)) return load_mask(same);
  throw DataError("missing ground-truth mask for reference frame '" + stem + "'");
}

}  // namespace

void stage_segment(const RunConfig& cfg) {
  std::vector<std::filesystem::path> files;
  const Sequence seq = load_sequence(cfg, &files);
  const std::filesystem::path dir = cfg.output_dir / "segmentation";
  std::filesystem::create_directories(dir);
  for (int i = 0; i < seq.size(); ++i) {
    const Segmentation seg = segment(seq.frame(i), cfg.tracker.slic, cfg.tracker.slic_seed());
    write_label_map(seg, dir / frame_name("labels_", i, ".png"));
  }
}

void stage_fields(const RunConfig& cfg) {
  const Sequence seq = load_sequence(cfg, nullptr);
  FieldCache cache(resolved_cache_dir(cfg));
  compute_elementary_fields(seq, cfg.tracker.plan.step_set, cfg.tracker, cache);
  std::filesystem::create_directories(cfg.output_dir);
  write_manifest(cfg, cfg.output_dir / "run_manifest.txt", nullptr, &cache);
}

void stage_track(const RunConfig& cfg) {
  std::vector<std::filesystem::path> files;
  const Sequence seq = load_sequence(cfg, &files);
  const std::optional<RoiMask> ref_mask = load_reference_mask(cfg, files);

  TrackerConfig tracker = cfg.tracker;
  tracker.direction = resolved_direction(cfg);
  FieldCache cache(resolved_cache_dir(cfg));

  TrackResult result;
  switch (cfg.integration) {
    case IntegrationKind::direct:
      result = track_dir(seq, ref_mask, tracker, &cache);
      break;
    case IntegrationKind::sequential:
      result = track_seq(seq, ref_mask, tracker, &cache);
      break;
    case IntegrationKind::multistep:
      result = track_msi(seq, ref_mask, tracker, &cache);
      break;
  }

  std::filesystem::create_directories(cfg.output_dir / "matches");
  write_label_map(result.segmentations[static_cast<std::size_t>(result.ref_index)],
                  cfg.output_dir / "labels_ref.png");
  if (ref_mask) {
    write_mask(*ref_mask, cfg.output_dir / "ref_mask.png");
    std::filesystem::create_directories(cfg.output_dir / "masks");
  }
  for (std::size_t r = 0; r < result.frames.size(); ++r) {
    const int n = result.frames[r];
    // outputs carry the source frame's stem so eval can align them with
    // ground truth by filename
    const std::string stem = files[static_cast<std::size_t>(n)].stem().string();
    write_match_csv(result.from_ref[r],
                    cfg.output_dir / "matches" / ("from_ref_" + stem + ".csv"));
    write_match_csv(result.to_ref[r], cfg.output_dir / "matches" / ("to_ref_" + stem + ".csv"));
    if (!result.masks.empty()) {
      write_mask(result.masks[r], cfg.output_dir / "masks" / (stem + ".png"));
    }
  }
  write_manifest(cfg, cfg.output_dir / "run_manifest.txt", &result, &cache);
}

void stage_all(const RunConfig& cfg) {
  stage_track(cfg);
  if (cfg.gt_dir) {
    stage_eval(cfg.output_dir / "masks", *cfg.gt_dir, cfg.output_dir,
               cfg.output_dir / "report.csv");
  }
}

void stage_eval(const std::filesystem::path& masks_dir, const std::filesystem::path& gt_dir,
                const std::optional<std::filesystem::path>& fields_dir,
                const std::filesystem::path& report_path) {
  if (!std::filesystem::is_directory(masks_dir)) {
    throw DataError("mask directory not found: " + masks_dir.string());
  }
  if (!std::filesystem::is_directory(gt_dir)) {
    throw DataError("ground-truth directory not found: " + gt_dir.string());
  }
  std::vector<std::filesystem::path> mask_files;
  for (const auto& entry : std::filesystem::directory_iterator(masks_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".png" || ext == ".pgm") mask_files.push_back(entry.path());
  }
  std::sort(mask_files.begin(), mask_files.end());
  if (mask_files.empty()) throw DataError("no masks found in " + masks_dir.string());

  bool with_consistency = false;
  Segmentation ref_seg;
  RoiMask ref_mask;
  if (fields_dir) {
    const std::filesystem::path labels = *fields_dir / "labels_ref.png";
    const std::filesystem::path mask = *fields_dir / "ref_mask.png";
    if (std::filesystem::exists(labels) && std::filesystem::exists(mask)) {
      ref_seg = read_label_map(labels);
      ref_mask = load_mask(mask);
      with_consistency = true;
    }
  }

  struct Row {
    int frame;
    double dice_v, precision, recall, f_measure;
    std::optional<double> consistency;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < mask_files.size(); ++i) {
    const std::filesystem::path& est_path = mask_files[i];
    const std::filesystem::path gt_path = gt_dir / est_path.filename();
    if (!std::filesystem::exists(gt_path)) {
      throw DataError("missing ground truth for '" + est_path.filename().string() + "'");
    }
    const RoiMask est = load_mask(est_path);
    const RoiMask gt = load_mask(gt_path);
    Row row;
    row.frame = trailing_number(est_path.stem().string(), static_cast<int>(i));
    row.dice_v = dice(est, gt);
    const ContourScore c = contour_f_measure(est, gt, default_contour_radius(est.width, est.height));
    row.precision = c.precision;
    row.recall = c.recall;
    row.f_measure = c.f_measure;
    if (with_consistency) {
      const std::string stem = est_path.stem().string();
      const std::filesystem::path fw = *fields_dir / "matches" / ("from_ref_" + stem + ".csv");
      const std::filesystem::path bw = *fields_dir / "matches" / ("to_ref_" + stem + ".csv");
      if (std::filesystem::exists(fw) && std::filesystem::exists(bw)) {
        row.consistency =
            fwbw_consistency(ref_mask, ref_seg, load_match_csv(fw), load_match_csv(bw));
      }
    }
    rows.push_back(row);
  }

  std::filesystem::create_directories(report_path.parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : report_path.parent_path());
  std::ofstream out(report_path);
  if (!out) throw DataError(report_path.string() + ": unwritable path");
  out << "# consistency denominator: quantized reference ROI\n";
  out << "frame,dice,precision,recall,f_measure,consistency\n";
  char buf[256];
  double sum_dice = 0, sum_p = 0, sum_r = 0, sum_f = 0, sum_c = 0;
  int n_c = 0;
  for (const Row& row : rows) {
    std::string cons;
    if (row.consistency) {
      std::snprintf(buf, sizeof(buf), "%.6f", *row.consistency);
      cons = buf;
      sum_c += *row.consistency;
      ++n_c;
    }
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f,%.6f,%s", row.frame, row.dice_v,
                  row.precision, row.recall, row.f_measure, cons.c_str());
    out << buf << "\n";
    sum_dice += row.dice_v;
    sum_p += row.precision;
    sum_r += row.recall;
    sum_f += row.f_measure;
  }
  const double n = static_cast<double>(rows.size());
  std::string cons;
  if (n_c > 0) {
    std::snprintf(buf, sizeof(buf), "%.6f", sum_c / n_c);
    cons = buf;
  }
  std::snprintf(buf, sizeof(buf), "aggregate,%.6f,%.6f,%.6f,%.6f,%s", sum_dice / n, sum_p / n,
                sum_r / n, sum_f / n, cons.c_str());
  out << buf << "\n";
  std::cout << buf << std::endl;
}

namespace {

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}

}  // namespace

int run_track(const std::filesystem::path& config_path, const CliOverrides& overrides,
              const std::string& stage) {
  return guarded([&] {
    RunConfig cfg = parse_run_config(config_path);
    if (overrides.seed) cfg.tracker.master_seed = *overrides.seed;
    if (overrides.jobs) cfg.tracker.jobs = *overrides.jobs;
    if (stage == "segment") {
      stage_segment(cfg);
    } else if (stage == "fields") {
      stage_fields(cfg);
    } else if (stage == "track") {
      stage_track(cfg);
    } else if (stage == "all") {
      stage_all(cfg);
    } else {
      throw ConfigError("unknown stage '" + stage + "'");
    }
  });
}

int run_eval(const std::filesystem::path& masks_dir, const std::filesystem::path& gt_dir,
             const std::optional<std::filesystem::path>& fields_dir,
             const std::filesystem::path& report_path) {
  return guarded([&] { stage_eval(masks_dir, gt_dir, fields_dir, report_path); });
}

}  // namespace spxtrack
