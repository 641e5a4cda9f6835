#include "sctracker/metrics.hpp"

#include "sctracker/assignment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <set>
#include <unordered_map>

namespace sct::metrics {

HypothesesByFrame fromResults(const std::vector<FrameResult>& results) {
  HypothesesByFrame out;
  for (const auto& fr : results) {
    auto& bucket = out[fr.frame_index];
    bucket.insert(bucket.end(), fr.outputs.begin(), fr.outputs.end());
  }
  return out;
}

namespace {

using IdPair = std::pair<std::int64_t, std::int64_t>;

struct IdPairHash {
  std::size_t operator()(const IdPair& p) const {
    return std::hash<std::int64_t>()(p.first) * 1000003u ^ std::hash<std::int64_t>()(p.second);
  }
};

}  // namespace

MetricsReport evaluate(const motio::GroundTruthByFrame& gt, const HypothesesByFrame& hypotheses,
                       double iou_match_thresh) {
  std::set<std::int64_t> frames;
  for (const auto& [f, _] : gt) frames.insert(f);
  for (const auto& [f, _] : hypotheses) frames.insert(f);

  static const std::vector<motio::GroundTruthObject> kNoGt;
  static const std::vector<TrackOutput> kNoHyp;

  MetricsReport report;
  std::unordered_map<std::int64_t, std::int64_t> last_match;  // gt id -> hyp id
  std::unordered_map<IdPair, std::int64_t, IdPairHash> overlap;
  std::map<std::int64_t, std::int64_t> gt_len, hyp_len;
  const double gate = 1.0 - iou_match_thresh;

  for (const auto frame : frames) {
    const auto git = gt.find(frame);
    const auto hit = hypotheses.find(frame);
    std::vector<const motio::GroundTruthObject*> objects;
    for (const auto& o : git == gt.end() ? kNoGt : git->second) {
      if (o.evaluable) objects.push_back(&o);
    }
    const auto& hyps = hit == hypotheses.end() ? kNoHyp : hit->second;

    const auto n_gt = static_cast<int>(objects.size());
    const auto n_hyp = static_cast<int>(hyps.size());
    Eigen::MatrixXd ious(n_gt, n_hyp);
    for (int i = 0; i < n_gt; ++i) {
      ++gt_len[objects[i]->id];
      for (int j = 0; j < n_hyp; ++j) {
        ious(i, j) = iou(objects[i]->box, hyps[j].box);
        if (ious(i, j) >= iou_match_thresh) ++overlap[{objects[i]->id, hyps[j].id}];
      }
    }
    for (const auto& h : hyps) ++hyp_len[h.id];

    std::vector<int> gt_to_hyp(n_gt, -1);
    std::vector<char> hyp_used(n_hyp, 0);

    // Keep previous correspondences that are still valid.
    for (int i = 0; i < n_gt; ++i) {
      const auto prev = last_match.find(objects[i]->id);
      if (prev == last_match.end()) continue;
      for (int j = 0; j < n_hyp; ++j) {
        if (!hyp_used[j] && hyps[j].id == prev->second && ious(i, j) >= iou_match_thresh) {
          gt_to_hyp[i] = j;
          hyp_used[j] = 1;
          break;
        }
      }
    }

    std::vector<int> free_gt, free_hyp;
    for (int i = 0; i < n_gt; ++i) {
      if (gt_to_hyp[i] < 0) free_gt.push_back(i);
    }
    for (int j = 0; j < n_hyp; ++j) {
      if (!hyp_used[j]) free_hyp.push_back(j);
    }
    CostMatrix costs(static_cast<Eigen::Index>(free_gt.size()),
                     static_cast<Eigen::Index>(free_hyp.size()));
    for (std::size_t a = 0; a < free_gt.size(); ++a) {
      for (std::size_t b = 0; b < free_hyp.size(); ++b) {
        const double v = ious(free_gt[a], free_hyp[b]);
        costs(a, b) = v >= iou_match_thresh ? 1.0 - v : 2.0;
      }
    }
    const auto solved = solveAssignment(costs, gate);
    for (const auto& [a, b] : solved.matches) {
      gt_to_hyp[free_gt[a]] = free_hyp[b];
      hyp_used[free_hyp[b]] = 1;
    }

    std::int64_t tp = 0;
    for (int i = 0; i < n_gt; ++i) {
      if (gt_to_hyp[i] < 0) continue;
      ++tp;
      const std::int64_t gid = objects[i]->id;
      const std::int64_t hid = hyps[gt_to_hyp[i]].id;
      const auto prev = last_match.find(gid);
      if (prev != last_match.end() && prev->second != hid) ++report.idsw;
      last_match[gid] = hid;
    }
    report.matches += tp;
    report.fn += n_gt - tp;
    report.fp += n_hyp - tp;
    report.gt_count += n_gt;
  }
  report.frames = static_cast<std::int64_t>(frames.size());

  if (report.gt_count == 0) {
    throw MetricsError("ground truth contains no evaluable objects; MOTA is undefined");
  }
  report.mota = 1.0 - static_cast<double>(report.fn + report.fp + report.idsw) /
                          static_cast<double>(report.gt_count);

  // Global identity matching maximizing frames of overlap between paired ids.
  std::vector<std::int64_t> gt_ids, hyp_ids;
  for (const auto& [id, _] : gt_len) gt_ids.push_back(id);
  for (const auto& [id, _] : hyp_len) hyp_ids.push_back(id);
  std::int64_t max_overlap = 0;
  for (const auto& [_, n] : overlap) max_overlap = std::max(max_overlap, n);
  CostMatrix weights(static_cast<Eigen::Index>(gt_ids.size()),
                     static_cast<Eigen::Index>(hyp_ids.size()));
  for (std::size_t a = 0; a < gt_ids.size(); ++a) {
    for (std::size_t b = 0; b < hyp_ids.size(); ++b) {
      const auto it = overlap.find({gt_ids[a], hyp_ids[b]});
      const double w = it == overlap.end() ? 0.0 : static_cast<double>(it->second);
      weights(a, b) = static_cast<double>(max_overlap) - w;
    }
  }
  const auto identity = solveAssignment(weights, static_cast<double>(max_overlap));
  for (const auto& [a, b] : identity.matches) {
    const auto it = overlap.find({gt_ids[a], hyp_ids[b]});
    if (it != overlap.end()) report.idtp += it->second;
  }
  std::int64_t total_hyp = 0;
  for (const auto& [_, n] : hyp_len) total_hyp += n;
  report.idfn = report.gt_count - report.idtp;
  report.idfp = total_hyp - report.idtp;
  const double denom = static_cast<double>(2 * report.idtp + report.idfp + report.idfn);
  report.idf1 = denom > 0.0 ? 2.0 * static_cast<double>(report.idtp) / denom : 0.0;
  return report;
}

MetricsReport combine(const std::vector<MetricsReport>& reports) {
  MetricsReport total;
  for (const auto& r : reports) {
    total.idsw += r.idsw;
    total.fp += r.fp;
    total.fn += r.fn;
    total.gt_count += r.gt_count;
    total.matches += r.matches;
    total.idtp += r.idtp;
    total.idfp += r.idfp;
    total.idfn += r.idfn;
    total.frames += r.frames;
  }
  if (total.gt_count > 0) {
    total.mota = 1.0 - static_cast<double>(total.fn + total.fp + total.idsw) /
                           static_cast<double>(total.gt_count);
  }
  const double denom = static_cast<double>(2 * total.idtp + total.idfp + total.idfn);
  total.idf1 = denom > 0.0 ? 2.0 * static_cast<double>(total.idtp) / denom : 0.0;
  return total;
}

std::string formatReport(const MetricsReport& r) {
  return fmt::format(
      "MOTA: {:.1f}%\nIDF1: {:.1f}%\nIDSW: {}\nFP: {}\nFN: {}\nGT: {}\nmatches: {}\n"
      "IDTP: {}\nIDFP: {}\nIDFN: {}\nframes: {}\n",
      100.0 * r.mota, 100.0 * r.idf1, r.idsw, r.fp, r.fn, r.gt_count, r.matches, r.idtp, r.idfp,
      r.idfn, r.frames);
}

std::string csvHeader() { return "mota,idf1,idsw,fp,fn,gt_count,matches,idtp,idfp,idfn,frames"; }

std::string formatCsvRow(const MetricsReport& r) {
  return fmt::format("{:.17g},{:.17g},{},{},{},{},{},{},{},{},{}", r.mota, r.idf1, r.idsw, r.fp,
                     r.fn, r.gt_count, r.matches, r.idtp, r.idfp, r.idfn, r.frames);
}

MetricsReport parseCsv(std::string_view text) {
  const auto newline = text.find('\n');
  if (newline == std::string_view::npos) throw MetricsError("report CSV needs a header and a row");
  auto header = text.substr(0, newline);
  if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
  if (header != csvHeader()) throw MetricsError("unexpected report CSV header");
  auto row = text.substr(newline + 1);
  while (!row.empty() && (row.back() == '\n' || row.back() == '\r')) row.remove_suffix(1);

  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = row.find(',', start);
    fields.push_back(row.substr(start, comma == std::string_view::npos ? row.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (fields.size() != 11) throw MetricsError("report CSV row must have 11 fields");

  auto num = [](std::string_view f, auto& out) {
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), out);
    if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
      throw MetricsError(fmt::format("bad report field '{}'", f));
    }
  };
  MetricsReport r;
  num(fields[0], r.mota);
  num(fields[1], r.idf1);
  num(fields[2], r.idsw);
  num(fields[3], r.fp);
  num(fields[4], r.fn);
  num(fields[5], r.gt_count);
  num(fields[6], r.matches);
  num(fields[7], r.idtp);
  num(fields[8], r.idfp);
  num(fields[9], r.idfn);
  num(fields[10], r.frames);
  return r;
}

}  // namespace sct::metrics
