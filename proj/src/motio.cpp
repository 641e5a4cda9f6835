#include "sctracker/motio.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sct::motio {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string describe(const std::string& source, std::size_t line) {
  return source.empty() ? fmt::format("line {}", line) : fmt::format("{}:{}", source, line);
}

double parseNumber(std::string_view field, std::size_t line_no, const std::string& source,
                   const char* name) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(source, line_no, fmt::format("field '{}' is not a number", name));
  }
  if (!std::isfinite(value)) {
    throw ParseError(source, line_no, fmt::format("field '{}' is not finite", name));
  }
  return value;
}

std::int64_t parseInteger(std::string_view field, std::size_t line_no, const std::string& source,
                          const char* name) {
  const double value = parseNumber(field, line_no, source, name);
  if (value != std::floor(value) || std::abs(value) > 9.0e15) {
    throw ParseError(source, line_no, fmt::format("field '{}' is not an integer", name));
  }
  return static_cast<std::int64_t>(value);
}

std::string readFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("failed reading '{}'", path.string()));
  return buffer.str();
}

void writeFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << text;
  out.flush();
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

bool parseBool(std::string_view value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw std::invalid_argument(fmt::format("'{}' is not a boolean", value));
}

double parseDouble(std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size() ||
      !std::isfinite(out)) {
    throw std::invalid_argument(fmt::format("'{}' is not a number", value));
  }
  return out;
}

}  // namespace

ParseError::ParseError(std::string source, std::size_t line, const std::string& what)
    : std::runtime_error(describe(source, line) + ": " + what),
      source_(std::move(source)),
      line_(line) {}

MotRecord parseRecord(std::string_view line, std::size_t line_no, const std::string& source) {
  std::array<std::string_view, 10> fields{};
  std::size_t count = 0;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (count == fields.size()) {
      throw ParseError(source, line_no, "too many fields (expected at most 10)");
    }
    fields[count++] = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (count < 6) {
    throw ParseError(source, line_no, fmt::format("expected at least 6 fields, got {}", count));
  }

  MotRecord r;
  r.frame = parseInteger(fields[0], line_no, source, "frame");
  r.id = parseInteger(fields[1], line_no, source, "id");
  r.bb_left = parseNumber(fields[2], line_no, source, "bb_left");
  r.bb_top = parseNumber(fields[3], line_no, source, "bb_top");
  r.bb_width = parseNumber(fields[4], line_no, source, "bb_width");
  r.bb_height = parseNumber(fields[5], line_no, source, "bb_height");
  if (count > 6) r.conf = parseNumber(fields[6], line_no, source, "conf");
  if (count > 7) r.x = parseNumber(fields[7], line_no, source, "x");
  if (count > 8) r.y = parseNumber(fields[8], line_no, source, "y");
  if (count > 9) r.z = parseNumber(fields[9], line_no, source, "z");
  if (r.frame < 1) throw ParseError(source, line_no, "frame must be >= 1");
  return r;
}

std::vector<MotRecord> parseRecords(std::string_view text, const std::string& source) {
  std::vector<MotRecord> records;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto newline = text.find('\n', start);
    const auto line = text.substr(start, newline == std::string_view::npos ? text.npos
                                                                             : newline - start);
    ++line_no;
    if (!trim(line).empty()) records.push_back(parseRecord(line, line_no, source));
    if (newline == std::string_view::npos) break;
    start = newline + 1;
  }
  return records;
}

std::string formatRecord(const MotRecord& r) {
  return fmt::format("{},{},{:.2f},{:.2f},{:.2f},{:.2f},{:g},{:g},{:g},{:g}", r.frame, r.id,
                     r.bb_left, r.bb_top, r.bb_width, r.bb_height, r.conf, r.x, r.y, r.z);
}

std::string formatRecords(const std::vector<MotRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += formatRecord(r);
    out += '\n';
  }
  return out;
}

std::vector<MotRecord> readRecords(const std::filesystem::path& path) {
  return parseRecords(readFile(path), path.string());
}

void writeRecords(const std::filesystem::path& path, const std::vector<MotRecord>& records) {
  writeFile(path, formatRecords(records));
}

DetectionFile detectionsFromRecords(const std::vector<MotRecord>& records) {
  DetectionFile out;
  for (const auto& r : records) {
    if (!(r.bb_width > 0.0) || !(r.bb_height > 0.0)) {
      ++out.rejected_rows;
      continue;
    }
    double conf = r.conf;
    if (conf < 0.0 || conf > 1.0) {
      ++out.clamped_scores;
      conf = std::clamp(conf, 0.0, 1.0);
    }
    out.frames[r.frame].push_back(
        {BoundingBox::fromTlwh(r.bb_left, r.bb_top, r.bb_width, r.bb_height), conf});
  }
  return out;
}

DetectionFile readDetections(const std::filesystem::path& path) {
  return detectionsFromRecords(readRecords(path));
}

std::vector<MotRecord> detectionsToRecords(const DetectionsByFrame& detections) {
  std::vector<MotRecord> records;
  for (const auto& [frame, dets] : detections) {
    for (const auto& d : dets) {
      records.push_back({frame, -1, d.box.x, d.box.y, d.box.width(), d.box.h, d.score, -1, -1, -1});
    }
  }
  return records;
}

void writeDetections(const std::filesystem::path& path, const DetectionsByFrame& detections) {
  writeRecords(path, detectionsToRecords(detections));
}

GroundTruthFile groundTruthFromRecords(const std::vector<MotRecord>& records,
                                       const std::string& source) {
  GroundTruthFile out;
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.id < 1) {
      throw ParseError(source, i + 1, fmt::format("ground truth id must be >= 1, got {}", r.id));
    }
    if (!seen.emplace(r.frame, r.id).second) {
      throw ParseError(source, i + 1,
                       fmt::format("duplicate ground truth (frame {}, id {})", r.frame, r.id));
    }
    if (!(r.bb_width > 0.0) || !(r.bb_height > 0.0)) {
      ++out.rejected_rows;
      continue;
    }
    const bool evaluable = r.conf != 0.0 && (r.x == -1.0 || r.x == 1.0);
    out.frames[r.frame].push_back(
        {r.id, BoundingBox::fromTlwh(r.bb_left, r.bb_top, r.bb_width, r.bb_height), evaluable});
  }
  for (auto& [frame, objects] : out.frames) {
    std::sort(objects.begin(), objects.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
  }
  return out;
}

GroundTruthFile readGroundTruth(const std::filesystem::path& path) {
  const std::string text = readFile(path);
  const auto source = path.string();
  return groundTruthFromRecords(parseRecords(text, source), source);
}

std::vector<MotRecord> groundTruthToRecords(const GroundTruthByFrame& gt) {
  std::vector<MotRecord> records;
  for (const auto& [frame, objects] : gt) {
    for (const auto& o : objects) {
      records.push_back({frame, o.id, o.box.x, o.box.y, o.box.width(), o.box.h,
                         o.evaluable ? 1.0 : 0.0, -1, -1, -1});
    }
  }
  return records;
}

void writeGroundTruth(const std::filesystem::path& path, const GroundTruthByFrame& gt) {
  writeRecords(path, groundTruthToRecords(gt));
}

std::vector<MotRecord> resultsToRecords(const std::vector<FrameResult>& results) {
  std::vector<const FrameResult*> ordered;
  ordered.reserve(results.size());
  for (const auto& r : results) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->frame_index < b->frame_index; });

  std::vector<MotRecord> records;
  for (const auto* frame : ordered) {
    for (const auto& o : frame->outputs) {
      records.push_back({frame->frame_index, o.id, o.box.x, o.box.y, o.box.width(), o.box.h,
                         o.score, -1, -1, -1});
    }
  }
  return records;
}

void writeResults(const std::filesystem::path& path, const std::vector<FrameResult>& results) {
  writeRecords(path, resultsToRecords(results));
}

std::vector<FrameResult> readResults(const std::filesystem::path& path) {
  const auto source = path.string();
  const auto records = readRecords(path);
  std::map<std::int64_t, FrameResult> frames;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.id < 1) throw ParseError(source, i + 1, "result id must be >= 1");
    if (!(r.bb_width > 0.0) || !(r.bb_height > 0.0)) continue;
    auto& fr = frames[r.frame];
    fr.frame_index = r.frame;
    fr.outputs.push_back({r.id, BoundingBox::fromTlwh(r.bb_left, r.bb_top, r.bb_width, r.bb_height),
                          r.conf});
  }
  std::vector<FrameResult> out;
  out.reserve(frames.size());
  for (auto& [frame, fr] : frames) out.push_back(std::move(fr));
  return out;
}

void applyConfigEntry(TrackerConfig& c, std::string_view key, std::string_view value) {
  if (key == "high_thresh") c.high_thresh = parseDouble(value);
  else if (key == "low_thresh") c.low_thresh = parseDouble(value);
  else if (key == "new_track_thresh") c.new_track_thresh = parseDouble(value);
  else if (key == "match_gate_stage1") c.match_gate_stage1 = parseDouble(value);
  else if (key == "match_gate_stage2") c.match_gate_stage2 = parseDouble(value);
  else if (key == "match_gate_unconfirmed") c.match_gate_unconfirmed = parseDouble(value);
  else if (key == "max_lost_frames") {
    const double v = parseDouble(value);
    if (v != std::floor(v) || v > 1e9 || v < -1e9) {
      throw std::invalid_argument("max_lost_frames must be an integer");
    }
    c.max_lost_frames = static_cast<int>(v);
  }
  else if (key == "confirm_first_frame") c.confirm_first_frame = parseBool(value);
  else if (key == "use_unconfirmed_stage") c.use_unconfirmed_stage = parseBool(value);
  else if (key == "epsilon") c.shape_params.epsilon = parseDouble(value);
  else if (key == "use_height_term") c.shape_params.use_height_term = parseBool(value);
  else if (key == "use_area_term") c.shape_params.use_area_term = parseBool(value);
  else if (key == "std_weight_position") c.noise_config.std_weight_position = parseDouble(value);
  else if (key == "std_weight_velocity") c.noise_config.std_weight_velocity = parseDouble(value);
  else if (key == "use_confidence_noise") c.noise_config.use_confidence_noise = parseBool(value);
  else if (key == "use_velocity_blend") c.noise_config.use_velocity_blend = parseBool(value);
  else throw std::invalid_argument(fmt::format("unknown config key '{}'", key));
}

TrackerConfig parseConfig(std::string_view text, TrackerConfig base, const std::string& source) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto newline = text.find('\n', start);
    std::string_view line =
        text.substr(start, newline == std::string_view::npos ? text.npos : newline - start);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected key = value");
      try {
        applyConfigEntry(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
      } catch (const std::invalid_argument& e) {
        throw ParseError(source, line_no, e.what());
      }
    }
    if (newline == std::string_view::npos) break;
    start = newline + 1;
  }
  return base;
}

TrackerConfig loadConfig(const std::filesystem::path& path, TrackerConfig base) {
  return parseConfig(readFile(path), std::move(base), path.string());
}

std::string formatConfig(const TrackerConfig& c) {
  auto b = [](bool v) { return v ? "true" : "false"; };
  return fmt::format(
      "high_thresh = {}\nlow_thresh = {}\nnew_track_thresh = {}\nmatch_gate_stage1 = {}\n"
      "match_gate_stage2 = {}\nmatch_gate_unconfirmed = {}\nmax_lost_frames = {}\n"
      "confirm_first_frame = {}\nuse_unconfirmed_stage = {}\nepsilon = {}\n"
      "use_height_term = {}\nuse_area_term = {}\nstd_weight_position = {}\n"
      "std_weight_velocity = {}\nuse_confidence_noise = {}\nuse_velocity_blend = {}\n",
      c.high_thresh, c.low_thresh, c.new_track_thresh, c.match_gate_stage1, c.match_gate_stage2,
      c.match_gate_unconfirmed, c.max_lost_frames, b(c.confirm_first_frame),
      b(c.use_unconfirmed_stage), c.shape_params.epsilon, b(c.shape_params.use_height_term),
      b(c.shape_params.use_area_term), c.noise_config.std_weight_position,
      c.noise_config.std_weight_velocity, b(c.noise_config.use_confidence_noise),
      b(c.noise_config.use_velocity_blend));
}

}  // namespace sct::motio
