#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dspl/action.hpp"
#include "dspl/configuration.hpp"
#include "dspl/error.hpp"
#include "dspl/feature_model.hpp"
#include "dspl/predicate.hpp"

namespace dspl {

/// Whole file as text. Throws FileError when it cannot be read.
std::string read_text_file(const std::filesystem::path& path);
/// Throws FileError when the file cannot be written.
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Reads `path` and hands the text to `parse`; any Error is rethrown as a
/// FileError naming the file.
template <class Parse>
auto parse_file(const std::filesystem::path& path, Parse parse) -> decltype(parse(std::string_view{})) {
  std::string text = read_text_file(path);
  try {
    return parse(std::string_view(text));
  } catch (const FileError&) {
    throw;
  } catch (const Error& e) {
    throw FileError(path.string(), e.what());
  }
}

/// Every `*.json` feature model in `dir`, sorted by model id. Throws
/// FileError on unreadable or malformed files and on duplicate model ids.
std::vector<FeatureModel> load_catalog(const std::filesystem::path& dir);

/// Throws LookupError.
const FeatureModel& catalog_model(const std::vector<FeatureModel>& catalog, std::string_view model_id);

enum class Outcome { Applied, RejectedInvalid, FailedExecution };

std::string_view to_string(Outcome outcome);
std::optional<Outcome> parse_outcome(std::string_view text);

/// One reconfiguration attempt. `model_id` names the model the post
/// configuration belongs to, so replay can follow provider switches.
struct TraceEntry {
  std::int64_t seq = 0;
  std::int64_t tick = 0;
  ContextPredicate condition;
  std::vector<Action> plan_actions;
  std::string pre_config_digest;
  std::string post_config_digest;
  Outcome outcome = Outcome::Applied;
  std::string provider_id;
  std::string model_id;

  bool operator==(const TraceEntry&) const = default;
};

nlohmann::json to_json(const TraceEntry& entry);
TraceEntry trace_entry_from_json(const nlohmann::json& j);
/// One line of the log, without the newline. Keys are sorted.
std::string trace_line(const TraceEntry& entry);

/// Append-only writer. Sequence numbers continue after the lines already
/// present in the file. A memory log keeps entries without touching disk.
class TraceLog {
 public:
  /// Creates the file when missing. Throws TraceError when it cannot be
  /// opened.
  static TraceLog open(const std::filesystem::path& path);
  static TraceLog memory();

  /// Assigns the next seq, writes one line and flushes. Throws TraceError
  /// on storage failure, in which case the seq is not consumed.
  std::int64_t record(TraceEntry entry);

  std::int64_t last_seq() const { return last_seq_; }
  /// Entries recorded through this handle.
  const std::vector<TraceEntry>& recorded() const { return recorded_; }

 private:
  TraceLog() = default;

  std::optional<std::filesystem::path> path_;
  std::ofstream out_;
  std::int64_t last_seq_ = 0;
  std::vector<TraceEntry> recorded_;
};

/// Parses every line; a line that is not a valid entry, or whose seq does
/// not increase, throws TraceError naming the 1-based line number.
std::vector<TraceEntry> parse_trace(std::string_view text);

/// Entries of the log file in seq order, kept when `filter` holds over the
/// entry fields seq, tick, outcome, provider_id, model_id, condition,
/// pre_config_digest, post_config_digest and action_count.
std::vector<TraceEntry> query_trace(const std::filesystem::path& path,
                                    const std::optional<ContextPredicate>& filter = std::nullopt);
bool trace_filter_holds(const ContextPredicate& filter, const TraceEntry& entry);

/// Folds the actions of applied entries over `initial`. An entry on a
/// different model starts from that model's empty configuration.
Configuration replay_trace(const Configuration& initial, const std::vector<TraceEntry>& entries);

}  // namespace dspl
