#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cellws/metrics.hpp"

namespace cellws::app {

using Field = std::pair<std::string_view, std::string>;

/// logfmt lines on a stream (stderr in the CLI):
///   level=warn cmd=segment msg="empty segmentation" seq=01 frame=t003
class Diagnostics {
 public:
  explicit Diagnostics(std::ostream& out);

  void info(std::string_view cmd, std::string_view msg, std::vector<Field> fields = {});
  void warn(std::string_view cmd, std::string_view msg, std::vector<Field> fields = {});
  void error(std::string_view cmd, std::string_view msg, std::vector<Field> fields = {});

  std::size_t warnings() const noexcept { return warnings_; }

 private:
  void emit(std::string_view level, std::string_view cmd, std::string_view msg, const std::vector<Field>& fields);

  std::ostream* out_;
  std::size_t warnings_ = 0;
};

/// Quotes a logfmt value when it holds spaces, quotes or '='.
std::string logfmt_value(std::string_view v);

struct SequenceScore {
  std::string sequence;
  std::size_t frames = 0;
  EvalReport report;
};

struct EvalSummary {
  std::vector<SequenceScore> sequences;
  /// All frames of all sequences pooled.
  SequenceScore overall;
};

std::string eval_to_json(const EvalSummary& summary);
EvalSummary eval_from_json(std::string_view text);
/// One row per sequence plus an "all" row.
std::string eval_to_csv(const EvalSummary& summary);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace cellws::app
