#include "spxtrack/matching.hpp"

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include "spxtrack/errors.hpp"

namespace spxtrack {

std::vector<std::uint32_t> pixel_argmax(const PosteriorField& field) {
  std::vector<std::uint32_t> out(field.probs.size());
  for (std::size_t p = 0; p < field.probs.size(); ++p) out[p] = sparse_argmax(field.probs[p]);
  return out;
}

MatchField match_by_vote(const std::vector<std::uint32_t>& pixel_map,
                         const Segmentation& source_seg) {
  if (pixel_map.size() != source_seg.labels.size()) {
    throw std::invalid_argument("match_by_vote: prediction map and segmentation disagree");
  }
  MatchField field;
  field.map.resize(source_seg.count);
  for (std::uint32_t i = 0; i < source_seg.count; ++i) {
    std::map<std::uint32_t, std::uint32_t> hist;
    for (std::uint32_t p : source_seg.members[i]) ++hist[pixel_map[p]];
    std::uint32_t best = 0;
    std::uint32_t best_n = 0;
    for (const auto& [cls, cnt] : hist) {
      if (cnt > best_n) {
        best_n = cnt;
        best = cls;
      }
    }
    field.map[i] = best;
  }
  return field;
}

std::vector<SparseProbs> superpixel_posteriors(const PosteriorField& field,
                                               const Segmentation& source_seg) {
  if (field.probs.size() != source_seg.labels.size()) {
    throw std::invalid_argument("superpixel_posteriors: field and segmentation disagree");
  }
  std::vector<SparseProbs> out(source_seg.count);
  SparseAccumulator acc;
  for (std::uint32_t i = 0; i < source_seg.count; ++i) {
    const double weight = 1.0 / static_cast<double>(source_seg.members[i].size());
    for (std::uint32_t p : source_seg.members[i]) acc.add(field.probs[p], weight);
    out[i] = acc.take_normalized();
  }
  return out;
}

MatchField match_by_soft_argmax(const std::vector<SparseProbs>& sp_posteriors) {
  MatchField field;
  field.map.resize(sp_posteriors.size());
  for (std::size_t i = 0; i < sp_posteriors.size(); ++i) {
    field.map[i] = sparse_argmax(sp_posteriors[i]);
  }
  field.soft = sp_posteriors;
  return field;
}

MatchField match_fwbw(const std::vector<SparseProbs>& fw, const std::vector<SparseProbs>& bw) {
  MatchField field;
  field.map.resize(fw.size());
  for (std::size_t i = 0; i < fw.size(); ++i) {
    const std::uint32_t source_cls = static_cast<std::uint32_t>(i);
    std::uint32_t best = 0;
    double best_score = 0;
    bool any = false;
    for (const auto& [target, p_fw] : fw[i]) {
      if (target >= bw.size()) {
        throw std::invalid_argument("match_fwbw: target class outside backward posterior set");
      }
      const double score = p_fw * sparse_prob(bw[target], source_cls);
      if (score > best_score) {
        best_score = score;
        best = target;
        any = true;
      }
    }
    field.map[i] = any ? best : sparse_argmax(fw[i]);
  }
  return field;
}

void write_match_csv(const MatchField& field, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path.string() + ": unwritable path");
  for (std::size_t i = 0; i < field.map.size(); ++i) {
    out << i << "," << field.map[i] << "\n";
  }
  if (!out) throw DataError(path.string() + ": write failed");
}

MatchField load_match_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": unreadable file");
  MatchField field;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) throw DataError(path.string() + ": malformed CSV row");
    std::size_t src = 0;
    std::uint32_t tgt = 0;
    try {
      src = std::stoul(line.substr(0, comma));
      tgt = static_cast<std::uint32_t>(std::stoul(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw DataError(path.string() + ": malformed CSV row");
    }
    if (src != row) throw DataError(path.string() + ": non-contiguous source indexes");
    field.map.push_back(tgt);
    ++row;
  }
  return field;
}

}  // namespace spxtrack
