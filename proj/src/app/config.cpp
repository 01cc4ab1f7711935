#include "cellws/app/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace cellws::app {
namespace {

constexpr std::string_view kDicHela = R"(# DIC-C2DH-HeLa: differential interference contrast, whole HeLa cells.
dataset_root = DIC-C2DH-HeLa
sequences = 01,02
normalization = HE
marker_source = eroded_full
k = 0.8
t_m = 0.6
h = 5
t_c = 216
d_inf = 60
connectivity = 8
remove_border = false
seed = 0
)";

constexpr std::string_view kFluoSim = R"(# Fluo-N2DH-SIM+: simulated HL60 nuclei, fluorescence.
dataset_root = Fluo-N2DH-SIM+
sequences = 01,02
normalization = HE
marker_source = eroded_full
k = 0.8
t_m = 0.6
h = 30
t_c = 229
d_inf = 20
connectivity = 8
remove_border = false
seed = 0
)";

constexpr std::string_view kPhcPsc = R"(# PhC-C2DL-PSC: phase contrast, pancreatic stem cells, weak markers.
dataset_root = PhC-C2DL-PSC
sequences = 01,02
normalization = median
marker_source = weak
# Opening ratio for weak markers.
k = 0.5
t_m = 0.6
h = 3
t_c = 156
d_inf = 6
connectivity = 8
remove_border = false
seed = 0
)";

constexpr std::string_view kSynthetic = R"(# Bundled synthetic ellipse dataset with the blurred-reference predictor.
dataset_root = .
sequences = 01
normalization = HE
marker_source = eroded_full
k = 0.4
t_m = 0.6
h = 10
t_c = calibrate
d_inf = measure
connectivity = 8
remove_border = false
seed = 7
oracle_sigma = 2
oracle_k = 0.6
oracle_noise = 0
oracle_boundary_gap = 1
)";

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, std::string_view value, const std::string& what) {
  throw UsageError("config key '" + key + "' = '" + std::string(value) + "': " + what);
}

double to_double(const std::string& key, std::string_view v) {
  double out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, v, "expected a number");
  return out;
}

long long to_int(const std::string& key, std::string_view v) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, v, "expected an integer");
  return out;
}

int to_int32(const std::string& key, std::string_view v) {
  const long long out = to_int(key, v);
  if (out < -2147483647LL || out > 2147483647LL) bad(key, v, "integer out of range");
  return static_cast<int>(out);
}

std::uint64_t to_uint(const std::string& key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, v, "expected a non-negative integer");
  return out;
}

bool to_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, v, "expected true or false");
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const auto item = trim(v.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// Splits `line` into key and value; false for blank/comment lines.
bool split_line(std::string_view line, std::string& key, std::string_view& value) {
  const auto hash = line.find('#');
  if (hash != std::string_view::npos) line = line.substr(0, hash);
  line = trim(line);
  if (line.empty()) return false;
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) throw UsageError("config line without '=': " + std::string(line));
  key = std::string(trim(line.substr(0, eq)));
  value = trim(line.substr(eq + 1));
  if (key.empty()) throw UsageError("config line with empty key");
  return true;
}

}  // namespace

MarkerSource parse_marker_source(std::string_view name) {
  if (name == "eroded_full") return MarkerSource::ErodedFull;
  if (name == "weak") return MarkerSource::Weak;
  throw UsageError("unknown marker source: " + std::string(name));
}

std::string_view to_string(MarkerSource s) noexcept {
  return s == MarkerSource::ErodedFull ? "eroded_full" : "weak";
}

void OraclePredictorSpec::validate() const {
  if (!(sigma >= 0.0)) throw UsageError("oracle_sigma must be >= 0");
  if (!(noise >= 0.0 && noise < 0.5)) throw UsageError("oracle_noise must lie in [0, 0.5)");
  if (!(k >= 0.0 && k <= 1.0)) throw UsageError("oracle_k must lie in [0, 1]");
  if (!(boundary_gap >= 0.0)) throw UsageError("oracle_boundary_gap must be >= 0");
}

void DatasetConfig::validate() const {
  if (sequences.empty()) throw UsageError("config lists no sequences");
  try {
    pipeline.validate();
    weights.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  oracle.validate();
  if (augment_copies < 0) throw UsageError("augment_copies must be >= 0");
  if (clahe.tiles_x < 1 || clahe.tiles_y < 1 || !(clahe.clip_limit > 0))
    throw UsageError("clahe tiles must be >= 1 and clip limit positive");
}

DatasetConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  DatasetConfig c;
  c.root = base_dir;
  std::map<std::string, int> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string key;
    std::string_view v;
    if (!split_line(line, key, v)) continue;
    if (seen[key]++) throw UsageError("config key repeated: " + key);
    try {
      if (key == "dataset_root") {
        const std::filesystem::path p{std::string(v)};
        c.root = p.is_absolute() ? p : (base_dir / p).lexically_normal();
      } else if (key == "sequences") {
        c.sequences = split_list(v);
      } else if (key == "normalization") {
        c.normalization = parse_normalization(v);
      } else if (key == "clahe_tiles_x") {
        c.clahe.tiles_x = to_int32(key, v);
      } else if (key == "clahe_tiles_y") {
        c.clahe.tiles_y = to_int32(key, v);
      } else if (key == "clahe_clip") {
        c.clahe.clip_limit = to_double(key, v);
      } else if (key == "marker_source") {
        c.marker_source = parse_marker_source(v);
      } else if (key == "k") {
        c.pipeline.k = to_double(key, v);
      } else if (key == "t_m") {
        c.pipeline.t_m = to_double(key, v);
      } else if (key == "h") {
        c.pipeline.h = to_int32(key, v);
      } else if (key == "t_c") {
        c.tc_pending = v == "calibrate";
        if (!c.tc_pending) c.pipeline.t_c = to_int32(key, v);
      } else if (key == "d_inf") {
        c.d_inf_pending = v == "measure";
        if (!c.d_inf_pending) c.pipeline.d_inf = to_double(key, v);
      } else if (key == "connectivity") {
        c.pipeline.connectivity = connectivity_from_int(to_int32(key, v));
      } else if (key == "remove_border") {
        c.pipeline.remove_border = to_bool(key, v);
      } else if (key == "seed") {
        c.seed = to_uint(key, v);
      } else if (key == "oracle_sigma") {
        c.oracle.sigma = to_double(key, v);
      } else if (key == "oracle_k") {
        c.oracle.k = to_double(key, v);
      } else if (key == "oracle_noise") {
        c.oracle.noise = to_double(key, v);
      } else if (key == "oracle_boundary_gap") {
        c.oracle.boundary_gap = to_double(key, v);
      } else if (key == "weight_a") {
        c.weights.a = to_double(key, v);
      } else if (key == "weight_d") {
        c.weights.d = to_double(key, v);
      } else if (key == "weight_balance") {
        c.weights.balance = parse_balance_mode(v);
      } else if (key == "augment_copies") {
        c.augment_copies = to_int32(key, v);
      } else if (key == "augment_elastic") {
        c.augment_elastic = to_bool(key, v);
      } else {
        throw UsageError("unknown config key: " + key);
      }
    } catch (const std::invalid_argument& e) {
      bad(key, v, e.what());
    }
  }
  c.validate();
  return c;
}

DatasetConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  DatasetConfig c = parse_config(text.str(), base);
  c.source = path;
  if (!std::filesystem::is_directory(c.root)) throw UsageError("dataset_root is not a directory: " + c.root.string());
  return c;
}

std::string format_config(const DatasetConfig& c, const std::filesystem::path& base_dir) {
  std::filesystem::path root = c.root.lexically_relative(base_dir);
  if (root.empty()) root = c.root;
  std::string seqs;
  for (const auto& s : c.sequences) seqs += (seqs.empty() ? "" : ",") + s;
  std::ostringstream o;
  o << "dataset_root = " << root.generic_string() << "\n"
    << "sequences = " << seqs << "\n"
    << "normalization = " << to_string(c.normalization) << "\n"
    << "clahe_tiles_x = " << c.clahe.tiles_x << "\n"
    << "clahe_tiles_y = " << c.clahe.tiles_y << "\n"
    << "clahe_clip = " << num(c.clahe.clip_limit) << "\n"
    << "marker_source = " << to_string(c.marker_source) << "\n"
    << "k = " << num(c.pipeline.k) << "\n"
    << "t_m = " << num(c.pipeline.t_m) << "\n"
    << "h = " << c.pipeline.h << "\n"
    << "t_c = " << (c.tc_pending ? std::string("calibrate") : std::to_string(c.pipeline.t_c)) << "\n"
    << "d_inf = " << (c.d_inf_pending ? std::string("measure") : num(c.pipeline.d_inf)) << "\n"
    << "connectivity = " << (c.pipeline.connectivity == Connectivity::Eight ? 8 : 4) << "\n"
    << "remove_border = " << (c.pipeline.remove_border ? "true" : "false") << "\n"
    << "seed = " << c.seed << "\n"
    << "oracle_sigma = " << num(c.oracle.sigma) << "\n"
    << "oracle_k = " << num(c.oracle.k) << "\n"
    << "oracle_noise = " << num(c.oracle.noise) << "\n"
    << "oracle_boundary_gap = " << num(c.oracle.boundary_gap) << "\n"
    << "weight_a = " << num(c.weights.a) << "\n"
    << "weight_d = " << num(c.weights.d) << "\n"
    << "weight_balance = " << to_string(c.weights.balance) << "\n"
    << "augment_copies = " << c.augment_copies << "\n"
    << "augment_elastic = " << (c.augment_elastic ? "true" : "false") << "\n";
  return o.str();
}

std::string update_config_text(std::string_view text, const std::vector<std::pair<std::string, std::string>>& values) {
  std::vector<bool> done(values.size(), false);
  std::string out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string key;
    std::string_view v;
    if (split_line(line, key, v)) {
      const auto it = std::find_if(values.begin(), values.end(), [&](const auto& kv) { return kv.first == key; });
      if (it != values.end()) {
        done[static_cast<std::size_t>(it - values.begin())] = true;
        const auto hash = line.find('#');
        line = key + " = " + it->second + (hash == std::string::npos ? "" : "  " + line.substr(hash));
      }
    }
    out += line;
    out += '\n';
  }
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!done[i]) out += values[i].first + " = " + values[i].second + "\n";
  return out;
}

std::vector<std::string> preset_names() { return {"dic-hela", "fluo-sim", "phc-psc", "synthetic"}; }

std::string preset_text(std::string_view name) {
  if (name == "dic-hela") return std::string(kDicHela);
  if (name == "fluo-sim") return std::string(kFluoSim);
  if (name == "phc-psc") return std::string(kPhcPsc);
  if (name == "synthetic") return std::string(kSynthetic);
  throw UsageError("unknown preset: " + std::string(name));
}

}  // namespace cellws::app
