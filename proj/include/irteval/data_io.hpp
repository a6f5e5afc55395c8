#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "irteval/calibration.hpp"
#include "irteval/irt.hpp"
#include "irteval/session.hpp"

namespace irteval {

/// Header carried by the versioned text formats. The checksum covers the
/// payload bytes that follow the header.
struct FileManifest {
  std::string format_name;
  int format_version = 1;
  std::string created_by;
  std::uint64_t checksum = 0;
};

/// FNV-1a 64-bit checksum.
std::uint64_t fnv1a64(std::string_view bytes);

/// Shortest exact decimal: %.17g round-trips every double.
std::string format_double(double value);

// ---------------------------------------------------------------------------
// Response matrix: comma-separated text. First row lists item ids, first
// column lists model ids, cells are "1", "0", or "" (missing). UTF-8, LF.
// ---------------------------------------------------------------------------
ResponseMatrix read_response_matrix(const std::filesystem::path& path);
void write_response_matrix(const ResponseMatrix& matrix, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Item bank: tab-separated text with a manifest header, columns item_id,
// discrimination, difficulty. Unknown extra columns are ignored with a
// logged warning; readers reject newer format majors.
// ---------------------------------------------------------------------------
std::vector<ItemParams> read_item_bank(const std::filesystem::path& path);
void write_item_bank(std::span<const ItemParams> bank, const std::filesystem::path& path);

// Train abilities sidecar written by calibration, same manifest mechanics.
std::vector<TrainAbility> read_train_abilities(const std::filesystem::path& path);
void write_train_abilities(std::span<const TrainAbility> abilities, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Session log: line-delimited JSON. Header line with the session config,
// one record per administered item (step, item_id, response, theta,
// standard error), trailer line with final score, stop reason, and the
// checksum of the step lines.
// ---------------------------------------------------------------------------
void write_session_log(const EvalSession& session, const std::filesystem::path& path);
EvalSession read_session_log(const std::filesystem::path& path);

// Shared low-level helpers (also used by the experiment writer).
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace irteval
