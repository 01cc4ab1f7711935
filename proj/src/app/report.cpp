#include "cellws/app/report.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "cellws/app/config.hpp"

namespace cellws::app {
namespace {

using json = nlohmann::ordered_json;

json score_to_json(const SequenceScore& s) {
  const EvalReport& r = s.report;
  json regions = json::array();
  for (const RegionScore& g : r.per_region)
    regions.push_back({{"frame", g.frame}, {"reference", g.reference}, {"segment", g.segment}, {"jaccard", g.jaccard}});
  return {{"sequence", s.sequence},
          {"frames", s.frames},
          {"seg", r.seg},
          {"det", r.det},
          {"op_csb", r.op_csb},
          {"references", r.reference_count},
          {"segments", r.segment_count},
          {"events",
           {{"false_negatives", r.events.false_negatives},
            {"false_positives", r.events.false_positives},
            {"splits_needed", r.events.splits_needed}}},
          {"regions", regions}};
}

SequenceScore score_from_json(const json& j) {
  SequenceScore s;
  s.sequence = j.at("sequence").get<std::string>();
  s.frames = j.at("frames").get<std::size_t>();
  EvalReport& r = s.report;
  r.seg = j.at("seg").get<double>();
  r.det = j.at("det").get<double>();
  r.op_csb = j.at("op_csb").get<double>();
  r.reference_count = j.at("references").get<std::size_t>();
  r.segment_count = j.at("segments").get<std::size_t>();
  const json& ev = j.at("events");
  r.events.false_negatives = ev.at("false_negatives").get<std::size_t>();
  r.events.false_positives = ev.at("false_positives").get<std::size_t>();
  r.events.splits_needed = ev.at("splits_needed").get<std::size_t>();
  for (const json& g : j.at("regions"))
    r.per_region.push_back({g.at("frame").get<std::string>(), g.at("reference").get<std::int32_t>(),
                            g.at("segment").get<std::int32_t>(), g.at("jaccard").get<double>()});
  return s;
}

}  // namespace

Diagnostics::Diagnostics(std::ostream& out) : out_(&out) {}

void Diagnostics::info(std::string_view cmd, std::string_view msg, std::vector<Field> fields) {
  emit("info", cmd, msg, fields);
}
void Diagnostics::warn(std::string_view cmd, std::string_view msg, std::vector<Field> fields) {
  ++warnings_;
  emit("warn", cmd, msg, fields);
}
void Diagnostics::error(std::string_view cmd, std::string_view msg, std::vector<Field> fields) {
  emit("error", cmd, msg, fields);
}

void Diagnostics::emit(std::string_view level, std::string_view cmd, std::string_view msg,
                       const std::vector<Field>& fields) {
  std::string line = "level=" + std::string(level) + " cmd=" + logfmt_value(cmd) + " msg=" + logfmt_value(msg);
  for (const auto& [k, v] : fields) line += " " + std::string(k) + "=" + logfmt_value(v);
  *out_ << line << '\n';
  out_->flush();
}

std::string logfmt_value(std::string_view v) {
  if (!v.empty() && v.find_first_of(" \"=\t\n") == std::string_view::npos) return std::string(v);
  std::string q = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') q += '\\';
    if (c == '\n') {
      q += "\\n";
      continue;
    }
    q += c;
  }
  return q + "\"";
}

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string eval_to_json(const EvalSummary& summary) {
  json seqs = json::array();
  for (const auto& s : summary.sequences) seqs.push_back(score_to_json(s));
  const json doc = {{"sequences", seqs}, {"overall", score_to_json(summary.overall)}};
  return doc.dump(2) + "\n";
}

EvalSummary eval_from_json(std::string_view text) {
  EvalSummary s;
  try {
    const json doc = json::parse(text);
    for (const json& j : doc.at("sequences")) s.sequences.push_back(score_from_json(j));
    s.overall = score_from_json(doc.at("overall"));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed evaluation report: ") + e.what());
  }
  return s;
}

std::string eval_to_csv(const EvalSummary& summary) {
  std::ostringstream o;
  o << "sequence,frames,references,segments,seg,det,op_csb,false_negatives,false_positives,splits_needed\n";
  auto row = [&](const SequenceScore& s) {
    const EvalReport& r = s.report;
    o << s.sequence << ',' << s.frames << ',' << r.reference_count << ',' << r.segment_count << ','
      << format_number(r.seg) << ',' << format_number(r.det) << ',' << format_number(r.op_csb) << ','
      << r.events.false_negatives << ',' << r.events.false_positives << ',' << r.events.splits_needed << '\n';
  };
  for (const auto& s : summary.sequences) row(s);
  row(summary.overall);
  return o.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DataError("cannot write " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace cellws::app
