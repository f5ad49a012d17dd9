#include "vidmem/dataio/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "vidmem/errors.hpp"

namespace vidmem::dataio {
namespace {

using nlohmann::json;

const json& require(const json& doc, const char* key, const std::string& where) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(where + ": missing key '" + key + "'");
  return *it;
}

double as_number(const json& v, const std::string& where, const std::string& field) {
  if (!v.is_number()) throw ParseError(where + ": field '" + field + "' must be a number");
  return v.get<double>();
}

std::vector<double> as_vector(const json& v, const std::string& where, const std::string& field) {
  if (!v.is_array()) throw ParseError(where + ": field '" + field + "' must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& x : v) out.push_back(as_number(x, where, field));
  return out;
}

Matrix as_matrix(const json& v, const std::string& where, const std::string& field) {
  if (!v.is_array()) throw ParseError(where + ": field '" + field + "' must be an array of arrays");
  Matrix m;
  m.rows = v.size();
  for (const json& row : v) {
    std::vector<double> r = as_vector(row, where, field);
    if (m.cols == 0 && m.values.empty()) m.cols = r.size();
    if (r.size() != m.cols) throw ParseError(where + ": field '" + field + "' has ragged rows");
    m.values.insert(m.values.end(), r.begin(), r.end());
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

std::size_t as_count(const json& v, const std::string& where, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ParseError(where + ": field '" + field + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

void check_score(double value, const char* field, const FeatureRecord& rec, const std::string& where) {
  if (!(value >= 0.0 && value <= 1.0)) {
    std::ostringstream msg;
    msg << where << ": field '" << field << "' of record '" << rec.video_id << "' is " << value
        << ", outside [0, 1]";
    throw RangeError(msg.str());
  }
}

}  // namespace

json record_to_json(const FeatureRecord& rec) {
  json doc;
  doc["video_id"] = rec.video_id;
  doc["frames"] = matrix_to_json(rec.frames);
  doc["text"] = rec.text;
  doc["motion_seq"] = matrix_to_json(rec.motion_seq);
  doc["st_score"] = rec.st_score;
  if (rec.lt_score) doc["lt_score"] = *rec.lt_score;
  if (rec.caption) doc["caption"] = *rec.caption;
  return doc;
}

FeatureRecord record_from_json(const json& doc, const std::string& where) {
  if (!doc.is_object()) throw ParseError(where + ": record must be a JSON object");
  static const std::vector<std::string> known = {"video_id", "frames", "text", "motion_seq",
                                                 "st_score", "lt_score", "caption"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  }
  FeatureRecord rec;
  const json& id = require(doc, "video_id", where);
  if (!id.is_string()) throw ParseError(where + ": field 'video_id' must be a string");
  rec.video_id = id.get<std::string>();
  rec.frames = as_matrix(require(doc, "frames", where), where, "frames");
  rec.text = as_vector(require(doc, "text", where), where, "text");
  rec.motion_seq = as_matrix(require(doc, "motion_seq", where), where, "motion_seq");
  rec.st_score = as_number(require(doc, "st_score", where), where, "st_score");
  check_score(rec.st_score, "st_score", rec, where);
  if (auto it = doc.find("lt_score"); it != doc.end()) {
    rec.lt_score = as_number(*it, where, "lt_score");
    check_score(*rec.lt_score, "lt_score", rec, where);
  }
  if (auto it = doc.find("caption"); it != doc.end()) {
    if (!it->is_string()) throw ParseError(where + ": field 'caption' must be a string");
    rec.caption = it->get<std::string>();
  }
  return rec;
}

std::vector<FeatureRecord> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset '" + path.string() + "'");
  std::vector<FeatureRecord> records;
  std::vector<std::size_t> line_of;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.filename().string() + " line " + std::to_string(line_no);
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    records.push_back(record_from_json(doc, where));
    line_of.push_back(line_no);
  }
  if (records.empty()) return records;

  const DatasetDims dims = DatasetDims::of(records.front());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (DatasetDims::of(records[i]) != dims) {
      throw SchemaError("record '" + records[i].video_id + "' (line " + std::to_string(line_of[i]) +
                        ") has dimensions inconsistent with record '" + records.front().video_id + "' (line " +
                        std::to_string(line_of.front()) + ")");
    }
    const auto violations = validate_record(records[i], dims);
    if (!violations.empty()) {
      throw SchemaError("record '" + records[i].video_id + "' (line " + std::to_string(line_of[i]) +
                        "): " + violations.front());
    }
  }
  return records;
}

void write_dataset(const std::filesystem::path& path, const std::vector<FeatureRecord>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write dataset '" + path.string() + "'");
  for (const FeatureRecord& rec : records) out << record_to_json(rec).dump() << '\n';
}

json manifest_to_json(const ClipManifest& m) {
  json doc;
  doc["video_id"] = m.video_id;
  doc["total_frames"] = m.total_frames;
  json clips = json::array();
  for (const Clip& c : m.clips) {
    clips.push_back({{"clip_id", c.clip_id},
                     {"frame_count", c.frame_count},
                     {"base_importance", c.base_importance},
                     {"motion_seq", matrix_to_json(c.motion_seq)}});
  }
  doc["clips"] = std::move(clips);
  doc["ground_truth_frames"] = std::vector<std::size_t>(m.ground_truth_frames.begin(), m.ground_truth_frames.end());
  return doc;
}

ClipManifest manifest_from_json(const json& doc, const std::string& where) {
  if (!doc.is_object()) throw ParseError(where + ": manifest must be a JSON object");
  ClipManifest m;
  const json& id = require(doc, "video_id", where);
  if (!id.is_string()) throw ParseError(where + ": field 'video_id' must be a string");
  m.video_id = id.get<std::string>();
  m.total_frames = as_count(require(doc, "total_frames", where), where, "total_frames");
  const json& clips = require(doc, "clips", where);
  if (!clips.is_array()) throw ParseError(where + ": field 'clips' must be an array");
  for (const json& c : clips) {
    Clip clip;
    const json& cid = require(c, "clip_id", where);
    clip.clip_id = cid.is_string() ? cid.get<std::string>() : cid.dump();
    clip.frame_count = as_count(require(c, "frame_count", where), where, "frame_count");
    clip.base_importance = as_number(require(c, "base_importance", where), where, "base_importance");
    clip.motion_seq = as_matrix(require(c, "motion_seq", where), where, "motion_seq");
    m.clips.push_back(std::move(clip));
  }
  const json& gt = require(doc, "ground_truth_frames", where);
  if (!gt.is_array()) throw ParseError(where + ": field 'ground_truth_frames' must be an array");
  for (const json& f : gt) m.ground_truth_frames.insert(as_count(f, where, "ground_truth_frames"));
  validate_manifest(m);
  return m;
}

std::vector<ClipManifest> load_manifests(const std::filesystem::path& path) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(path)) {
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  std::vector<ClipManifest> out;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open manifest '" + file.string() + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw ParseError(file.filename().string() + ": " + e.what());
    }
    out.push_back(manifest_from_json(doc, file.filename().string()));
  }
  return out;
}

void write_manifest(const std::filesystem::path& path, const ClipManifest& manifest) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write manifest '" + path.string() + "'");
  out << manifest_to_json(manifest).dump() << '\n';
}

}  // namespace vidmem::dataio
