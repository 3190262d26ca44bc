#include "dspl/knowledge.hpp"

#include <algorithm>
#include <sstream>

#include "json_util.hpp"

namespace dspl {

namespace fs = std::filesystem;
using detail::Fields;
using nlohmann::json;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(path.string(), "cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw FileError(path.string(), "read failed");
  return buf.str();
}

void write_text_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError(path.string(), "cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw FileError(path.string(), "write failed");
}

std::vector<FeatureModel> load_catalog(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw FileError(dir.string(), "not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<FeatureModel> out;
  for (const auto& file : files) {
    auto fm = parse_file(file, parse_feature_model);
    for (const auto& other : out) {
      if (other.model_id() == fm.model_id()) throw FileError(file.string(), "duplicate model id: " + fm.model_id());
    }
    out.push_back(std::move(fm));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.model_id() < b.model_id(); });
  return out;
}

const FeatureModel& catalog_model(const std::vector<FeatureModel>& catalog, std::string_view model_id) {
  for (const auto& fm : catalog) {
    if (fm.model_id() == model_id) return fm;
  }
  throw LookupError("unknown model: " + std::string(model_id));
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Applied:
      return "applied";
    case Outcome::RejectedInvalid:
      return "rejected_invalid";
    case Outcome::FailedExecution:
      return "failed_execution";
  }
  return "?";
}

std::optional<Outcome> parse_outcome(std::string_view text) {
  for (auto o : {Outcome::Applied, Outcome::RejectedInvalid, Outcome::FailedExecution}) {
    if (to_string(o) == text) return o;
  }
  return std::nullopt;
}

json to_json(const TraceEntry& entry) {
  return json{{"seq", entry.seq},
              {"tick", entry.tick},
              {"condition", entry.condition.str()},
              {"plan_actions", to_json(entry.plan_actions)},
              {"pre_config_digest", entry.pre_config_digest},
              {"post_config_digest", entry.post_config_digest},
              {"outcome", std::string(to_string(entry.outcome))},
              {"provider_id", entry.provider_id},
              {"model_id", entry.model_id}};
}

TraceEntry trace_entry_from_json(const json& j) {
  Fields f(j, "", {"seq", "tick", "condition", "plan_actions", "pre_config_digest", "post_config_digest", "outcome",
                   "provider_id", "model_id"});
  std::optional<ContextPredicate> condition;
  try {
    condition = ContextPredicate::parse(f.string("condition"));
  } catch (const FormatError& e) {
    throw FormatError(f.at("condition"), e.detail());
  }
  TraceEntry entry{f.integer("seq"), f.integer("tick"), *condition, {}, f.string("pre_config_digest"),
                   f.string("post_config_digest"), Outcome::Applied, f.string("provider_id"), f.string("model_id")};
  const json& actions = f.array("plan_actions");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    entry.plan_actions.push_back(action_from_json(actions[i], detail::item_path(f.at("plan_actions"), i)));
  }
  auto outcome = parse_outcome(f.string("outcome"));
  if (!outcome) throw FormatError(f.at("outcome"), "unknown outcome");
  entry.outcome = *outcome;
  return entry;
}

std::string trace_line(const TraceEntry& entry) { return to_json(entry).dump(); }

TraceLog TraceLog::open(const fs::path& path) {
  TraceLog log;
  log.path_ = path;
  std::error_code ec;
  if (fs::exists(path, ec)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TraceError("cannot read " + path.string());
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) ++log.last_seq_;
    }
  }
  log.out_.open(path, std::ios::binary | std::ios::app);
  if (!log.out_) throw TraceError("cannot open " + path.string() + " for appending");
  return log;
}

TraceLog TraceLog::memory() { return TraceLog(); }

std::int64_t TraceLog::record(TraceEntry entry) {
  entry.seq = last_seq_ + 1;
  if (path_) {
    std::string line = trace_line(entry) + "\n";
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    out_.flush();
    if (!out_) {
      out_.clear();
      throw TraceError("cannot append to " + path_->string());
    }
  }
  last_seq_ = entry.seq;
  recorded_.push_back(std::move(entry));
  return last_seq_;
}

std::vector<TraceEntry> parse_trace(std::string_view text) {
  std::vector<TraceEntry> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    try {
      auto entry = trace_entry_from_json(detail::parse_json(line));
      if (!out.empty() && entry.seq <= out.back().seq) throw Error("seq does not increase");
      out.push_back(std::move(entry));
    } catch (const Error& e) {
      throw TraceError(std::string("corrupt trace entry: ") + e.what(), line_no);
    }
  }
  return out;
}

bool trace_filter_holds(const ContextPredicate& filter, const TraceEntry& entry) {
  std::map<std::string, Value> fields{
      {"seq", entry.seq},
      {"tick", entry.tick},
      {"outcome", std::string(to_string(entry.outcome))},
      {"provider_id", entry.provider_id},
      {"model_id", entry.model_id},
      {"condition", entry.condition.str()},
      {"pre_config_digest", entry.pre_config_digest},
      {"post_config_digest", entry.post_config_digest},
      {"action_count", static_cast<std::int64_t>(entry.plan_actions.size())},
  };
  return filter.holds(fields);
}

std::vector<TraceEntry> query_trace(const fs::path& path, const std::optional<ContextPredicate>& filter) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const FileError& e) {
    throw TraceError(e.what());
  }
  auto entries = parse_trace(text);
  if (filter) {
    std::erase_if(entries, [&](const TraceEntry& e) { return !trace_filter_holds(*filter, e); });
  }
  return entries;
}

Configuration replay_trace(const Configuration& initial, const std::vector<TraceEntry>& entries) {
  Configuration cfg = initial;
  for (const auto& entry : entries) {
    if (entry.outcome != Outcome::Applied) continue;
    if (entry.model_id != cfg.model_id) cfg = Configuration{entry.model_id, {}, {}};
    cfg = apply_actions(std::move(cfg), entry.plan_actions);
  }
  return cfg;
}

}  // namespace dspl
