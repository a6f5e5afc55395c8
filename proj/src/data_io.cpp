#include "irteval/data_io.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "irteval/logging.hpp"
#include "irteval/version.hpp"

namespace irteval {

namespace {

constexpr int kBankVersion = 1;
constexpr int kAbilitiesVersion = 1;
constexpr int kSessionLogVersion = 1;
constexpr const char* kBankFormat = "irteval.item_bank";
constexpr const char* kAbilitiesFormat = "irteval.train_abilities";
constexpr const char* kSessionLogFormat = "irteval.session_log";

std::vector<std::string> split(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    std::string_view line = text.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = pos + 1;
  }
  return lines;
}

double parse_double(std::string_view text, const std::string& where) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(where + ": invalid number '" + std::string(text) + "'");
  }
  return value;
}

void validate_id(std::string_view id, char delimiter, const std::string& what) {
  if (id.empty()) throw ValidationError(what + " must not be empty");
  if (id.find(delimiter) != std::string_view::npos || id.find('\n') != std::string_view::npos ||
      id.find('\r') != std::string_view::npos) {
    throw ValidationError(what + " '" + std::string(id) + "' contains a delimiter or line break");
  }
}

// Manifest block: "# format: <name>", "# version: <int>", "# created_by:
// <text>", "# checksum: <16 hex>". The checksum covers every byte after
// the manifest lines.
struct ParsedManifest {
  FileManifest manifest;
  std::size_t payload_offset = 0;
};

std::string manifest_header(const char* format_name, int version, std::uint64_t checksum) {
  char checksum_hex[17];
  std::snprintf(checksum_hex, sizeof(checksum_hex), "%016" PRIx64, checksum);
  std::string header;
  header += std::string("# format: ") + format_name + "\n";
  header += "# version: " + std::to_string(version) + "\n";
  header += std::string("# created_by: ") + kToolVersion + "\n";
  header += std::string("# checksum: ") + checksum_hex + "\n";
  return header;
}

ParsedManifest parse_manifest(std::string_view content, const char* expected_format, int supported_version,
                              const std::filesystem::path& path) {
  ParsedManifest out;
  std::size_t offset = 0;
  std::unordered_map<std::string, std::string> fields;
  for (int line_no = 1; line_no <= 4; ++line_no) {
    const std::size_t end = content.find('\n', offset);
    if (offset >= content.size() || content[offset] != '#' || end == std::string_view::npos) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": missing manifest line");
    }
    std::string_view line = content.substr(offset, end - offset);
    line.remove_prefix(1);
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": malformed manifest line");
    }
    std::string key(line.substr(0, colon));
    std::string value(line.substr(colon + 1));
    auto trim = [](std::string& s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    };
    trim(key);
    trim(value);
    fields[key] = value;
    offset = end + 1;
  }
  out.payload_offset = offset;

  out.manifest.format_name = fields["format"];
  out.manifest.created_by = fields["created_by"];
  if (out.manifest.format_name != expected_format) {
    throw ParseError(path.string() + ": expected format '" + expected_format + "', found '" +
                     out.manifest.format_name + "'");
  }
  try {
    out.manifest.format_version = std::stoi(fields["version"]);
  } catch (const std::exception&) {
    throw ParseError(path.string() + ": malformed manifest version '" + fields["version"] + "'");
  }
  if (out.manifest.format_version > supported_version) {
    throw ParseError(path.string() + ": format version " + std::to_string(out.manifest.format_version) +
                     " is newer than the supported version " + std::to_string(supported_version));
  }
  const std::string& checksum_text = fields["checksum"];
  if (checksum_text.size() != 16) {
    throw ParseError(path.string() + ": malformed manifest checksum");
  }
  out.manifest.checksum = std::strtoull(checksum_text.c_str(), nullptr, 16);

  const std::uint64_t actual = fnv1a64(content.substr(out.payload_offset));
  if (actual != out.manifest.checksum) {
    throw ParseError(path.string() + ": checksum mismatch (payload corrupted?)");
  }
  return out;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open file for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ValidationError("write failed: " + path.string());
}

// --------------------------- response matrix ------------------------------

void write_response_matrix(const ResponseMatrix& matrix, const std::filesystem::path& path) {
  for (const auto& id : matrix.model_ids) validate_id(id, ',', "model_id");
  for (const auto& id : matrix.item_ids) validate_id(id, ',', "item_id");

  std::string out = "model_id";
  for (const auto& id : matrix.item_ids) {
    out += ',';
    out += id;
  }
  out += '\n';
  for (int i = 0; i < matrix.model_count(); ++i) {
    out += matrix.model_ids[i];
    for (int j = 0; j < matrix.item_count(); ++j) {
      out += ',';
      const Cell c = matrix.at(i, j);
      if (c == Cell::correct) {
        out += '1';
      } else if (c == Cell::incorrect) {
        out += '0';
      }
    }
    out += '\n';
  }
  write_file(path, out);
}

ResponseMatrix read_response_matrix(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  const std::vector<std::string_view> lines = split_lines(content);
  if (lines.empty()) throw ParseError(path.string() + ": empty file");

  const std::vector<std::string> header = split(lines[0], ',');
  if (header.size() < 2) {
    throw ParseError(path.string() + ":1: header must list at least one item id");
  }

  ResponseMatrix matrix;
  matrix.item_ids.assign(header.begin() + 1, header.end());
  const int l = matrix.item_count();

  std::vector<Cell> cells;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (lines[row].empty()) continue;
    const std::vector<std::string> fields = split(lines[row], ',');
    if (static_cast<int>(fields.size()) != l + 1) {
      throw ParseError(path.string() + ":" + std::to_string(row + 1) + ": expected " + std::to_string(l + 1) +
                       " fields, found " + std::to_string(fields.size()));
    }
    matrix.model_ids.push_back(fields[0]);
    for (int j = 0; j < l; ++j) {
      const std::string& cell = fields[j + 1];
      Cell value;
      if (cell.empty()) {
        value = Cell::missing;
      } else if (cell == "1") {
        value = Cell::correct;
      } else if (cell == "0") {
        value = Cell::incorrect;
      } else {
        throw ParseError(path.string() + ":" + std::to_string(row + 1) + ": invalid cell '" + cell +
                         "' at model '" + fields[0] + "', item '" + matrix.item_ids[j] + "'");
      }
      cells.push_back(value);
    }
  }
  matrix.cells = std::move(cells);

  auto check_duplicates = [&](const std::vector<std::string>& ids, const char* what) {
    std::unordered_set<std::string_view> seen;
    for (const auto& id : ids) {
      if (!seen.insert(id).second) {
        throw ValidationError(path.string() + ": duplicate " + what + " '" + id + "'");
      }
    }
  };
  check_duplicates(matrix.model_ids, "model_id");
  check_duplicates(matrix.item_ids, "item_id");
  return matrix;
}

// ------------------------------ item bank ---------------------------------

void write_item_bank(std::span<const ItemParams> bank, const std::filesystem::path& path) {
  std::string payload = "item_id\tdiscrimination\tdifficulty\n";
  for (const auto& item : bank) {
    validate_id(item.item_id, '\t', "item_id");
    validate_item(item);
    payload += item.item_id;
    payload += '\t';
    payload += format_double(item.discrimination);
    payload += '\t';
    payload += format_double(item.difficulty);
    payload += '\n';
  }
  write_file(path, manifest_header(kBankFormat, kBankVersion, fnv1a64(payload)) + payload);
}

std::vector<ItemParams> read_item_bank(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  const ParsedManifest parsed = parse_manifest(content, kBankFormat, kBankVersion, path);
  const std::vector<std::string_view> lines = split_lines(std::string_view(content).substr(parsed.payload_offset));
  if (lines.empty()) throw ParseError(path.string() + ": missing column header");

  const std::vector<std::string> columns = split(lines[0], '\t');
  int id_col = -1, a_col = -1, b_col = -1;
  for (int c = 0; c < static_cast<int>(columns.size()); ++c) {
    if (columns[c] == "item_id") {
      id_col = c;
    } else if (columns[c] == "discrimination") {
      a_col = c;
    } else if (columns[c] == "difficulty") {
      b_col = c;
    } else {
      log_warning(path.string() + ": ignoring unknown column '" + columns[c] + "'");
    }
  }
  if (id_col < 0 || a_col < 0 || b_col < 0) {
    throw ParseError(path.string() + ": missing required columns (item_id, discrimination, difficulty)");
  }

  std::vector<ItemParams> bank;
  std::unordered_set<std::string> seen;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (lines[row].empty()) continue;
    const std::vector<std::string> fields = split(lines[row], '\t');
    if (fields.size() != columns.size()) {
      throw ParseError(path.string() + ": row " + std::to_string(row) + " has " +
                       std::to_string(fields.size()) + " fields, expected " + std::to_string(columns.size()));
    }
    ItemParams item;
    item.item_id = fields[id_col];
    const std::string where = path.string() + ": item '" + item.item_id + "'";
    item.discrimination = parse_double(fields[a_col], where);
    item.difficulty = parse_double(fields[b_col], where);
    if (!(item.discrimination > 0.0)) {
      throw ValidationError(where + ": discrimination must be positive, got " + fields[a_col]);
    }
    validate_item(item);
    if (!seen.insert(item.item_id).second) {
      throw ValidationError(path.string() + ": duplicate item_id '" + item.item_id + "'");
    }
    bank.push_back(std::move(item));
  }
  return bank;
}

// --------------------------- train abilities ------------------------------

void write_train_abilities(std::span<const TrainAbility> abilities, const std::filesystem::path& path) {
  std::string payload = "model_id\ttheta\n";
  for (const auto& entry : abilities) {
    validate_id(entry.model_id, '\t', "model_id");
    payload += entry.model_id;
    payload += '\t';
    payload += format_double(entry.theta);
    payload += '\n';
  }
  write_file(path, manifest_header(kAbilitiesFormat, kAbilitiesVersion, fnv1a64(payload)) + payload);
}

std::vector<TrainAbility> read_train_abilities(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  const ParsedManifest parsed = parse_manifest(content, kAbilitiesFormat, kAbilitiesVersion, path);
  const std::vector<std::string_view> lines = split_lines(std::string_view(content).substr(parsed.payload_offset));
  if (lines.empty() || split(lines[0], '\t') != std::vector<std::string>{"model_id", "theta"}) {
    throw ParseError(path.string() + ": missing or malformed column header");
  }
  std::vector<TrainAbility> abilities;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (lines[row].empty()) continue;
    const std::vector<std::string> fields = split(lines[row], '\t');
    if (fields.size() != 2) {
      throw ParseError(path.string() + ": row " + std::to_string(row) + " must have 2 fields");
    }
    abilities.push_back({fields[0], parse_double(fields[1], path.string() + ": model '" + fields[0] + "'")});
  }
  return abilities;
}

// ----------------------------- session log --------------------------------

namespace {

std::string json_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace

void write_session_log(const EvalSession& session, const std::filesystem::path& path) {
  if (session.trajectory.size() != session.administered.size()) {
    throw ValidationError("session log: trajectory length must equal administered length");
  }
  std::string out;
  out += "{\"format\":\"";
  out += kSessionLogFormat;
  out += "\",\"version\":" + std::to_string(kSessionLogVersion);
  out += ",\"created_by\":\"" + json_escape(kToolVersion) + "\"";
  out += ",\"strategy\":\"" + std::string(to_string(session.config.strategy)) + "\"";
  out += ",\"budget\":" + (session.config.budget ? std::to_string(*session.config.budget) : "null");
  out += ",\"se_threshold\":" +
         (session.config.se_threshold ? format_double(*session.config.se_threshold) : "null");
  out += ",\"seed\":" + std::to_string(session.config.seed);
  out += ",\"prior_mean\":" + format_double(session.config.prior_mean);
  out += ",\"prior_sd\":" + format_double(session.config.prior_sd);
  out += "}\n";

  std::string steps;
  for (std::size_t t = 0; t < session.administered.size(); ++t) {
    const Response& response = session.administered[t];
    const AbilityEstimate& estimate = session.trajectory[t];
    steps += "{\"step\":" + std::to_string(t);
    steps += ",\"item_id\":\"" + json_escape(response.item_id) + "\"";
    steps += ",\"correct\":" + std::string(response.correct ? "1" : "0");
    steps += ",\"theta\":" + format_double(estimate.theta);
    steps += ",\"standard_error\":" +
             (std::isfinite(estimate.standard_error) ? format_double(estimate.standard_error) : "null");
    steps += ",\"method\":\"" + std::string(to_string(estimate.method)) + "\"";
    steps += ",\"clamped\":" + std::string(estimate.clamped ? "true" : "false");
    steps += "}\n";
  }
  out += steps;

  char checksum_hex[17];
  std::snprintf(checksum_hex, sizeof(checksum_hex), "%016" PRIx64, fnv1a64(steps));
  out += "{\"final_score\":" + format_double(session.final_score);
  out += ",\"stop_reason\":\"" + std::string(to_string(session.stop_reason)) + "\"";
  out += ",\"checksum\":\"";
  out += checksum_hex;
  out += "\"}\n";
  write_file(path, out);
}

EvalSession read_session_log(const std::filesystem::path& path) {
  using nlohmann::json;
  const std::string content = read_file(path);
  const std::vector<std::string_view> lines = split_lines(content);
  if (lines.size() < 2) {
    throw ParseError(path.string() + ": truncated log (header or trailer missing) at line " +
                     std::to_string(lines.size() + 1));
  }

  auto parse_line = [&](std::string_view line, std::size_t line_no) {
    json parsed = json::parse(line, nullptr, false);
    if (parsed.is_discarded()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": malformed JSON record");
    }
    return parsed;
  };

  EvalSession session;
  const json header = parse_line(lines[0], 1);
  if (header.value("format", "") != kSessionLogFormat) {
    throw ParseError(path.string() + ":1: not a session log (format field mismatch)");
  }
  if (header.value("version", 0) > kSessionLogVersion) {
    throw ParseError(path.string() + ":1: format version newer than supported");
  }
  session.config.strategy = strategy_from_string(header.at("strategy").get<std::string>());
  if (!header.at("budget").is_null()) session.config.budget = header.at("budget").get<int>();
  if (!header.at("se_threshold").is_null()) session.config.se_threshold = header.at("se_threshold").get<double>();
  session.config.seed = header.at("seed").get<std::uint64_t>();
  session.config.prior_mean = header.at("prior_mean").get<double>();
  session.config.prior_sd = header.at("prior_sd").get<double>();

  std::string steps_bytes;
  for (std::size_t row = 1; row + 1 < lines.size(); ++row) {
    const json record = parse_line(lines[row], row + 1);
    if (!record.contains("step")) {
      throw ParseError(path.string() + ":" + std::to_string(row + 1) + ": expected a step record");
    }
    const int step = record.at("step").get<int>();
    if (step != static_cast<int>(row - 1)) {
      throw ParseError(path.string() + ":" + std::to_string(row + 1) + ": step indices out of order (found " +
                       std::to_string(step) + ", expected " + std::to_string(row - 1) + ")");
    }
    Response response;
    response.item_id = record.at("item_id").get<std::string>();
    response.correct = record.at("correct").get<int>() == 1;
    session.administered.push_back(std::move(response));

    AbilityEstimate estimate;
    estimate.theta = record.at("theta").get<double>();
    estimate.standard_error = record.at("standard_error").is_null()
                                  ? std::numeric_limits<double>::infinity()
                                  : record.at("standard_error").get<double>();
    estimate.method = estimation_method_from_string(record.at("method").get<std::string>());
    estimate.clamped = record.at("clamped").get<bool>();
    estimate.response_count = step + 1;
    session.trajectory.push_back(estimate);

    steps_bytes += lines[row];
    steps_bytes += '\n';
  }

  const json trailer = parse_line(lines.back(), lines.size());
  if (!trailer.contains("final_score") || !trailer.contains("stop_reason")) {
    throw ParseError(path.string() + ":" + std::to_string(lines.size()) +
                     ": truncated log (trailer record missing)");
  }
  session.final_score = trailer.at("final_score").get<double>();
  session.stop_reason = stop_reason_from_string(trailer.at("stop_reason").get<std::string>());
  if (trailer.contains("checksum")) {
    const std::string checksum_text = trailer.at("checksum").get<std::string>();
    char expected[17];
    std::snprintf(expected, sizeof(expected), "%016" PRIx64, fnv1a64(steps_bytes));
    if (checksum_text != expected) {
      throw ParseError(path.string() + ": checksum mismatch (step records corrupted?)");
    }
  }
  return session;
}

}  // namespace irteval
