#pragma once

// JSON-lines feature datasets and per-video clip manifests.
//
// Dataset line keys: video_id, frames (n arrays of D_v numbers), text (D_t
// numbers), motion_seq (T_m arrays of D_raw numbers), st_score, and optional
// lt_score / caption. Manifest document keys: video_id, total_frames, clips
// (array of {clip_id, frame_count, base_importance, motion_seq}),
// ground_truth_frames (array of ints).

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidmem/dataio/records.hpp"

namespace vidmem::dataio {

nlohmann::json record_to_json(const FeatureRecord& rec);
// `where` prefixes error messages (e.g. "line 3").
FeatureRecord record_from_json(const nlohmann::json& doc, const std::string& where);

// Empty file -> empty dataset. Throws ParseError (with line number) on
// malformed lines, RangeError naming field and record on out-of-range
// scores, SchemaError naming both records on dimension disagreement.
std::vector<FeatureRecord> load_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, const std::vector<FeatureRecord>& records);

nlohmann::json manifest_to_json(const ClipManifest& manifest);
ClipManifest manifest_from_json(const nlohmann::json& doc, const std::string& where);

// A manifest path is either one JSON document or a directory whose *.json
// files are each one document (loaded in filename order).
std::vector<ClipManifest> load_manifests(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const ClipManifest& manifest);

}  // namespace vidmem::dataio
