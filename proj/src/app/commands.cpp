#include "cellws/app/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "cellws/app/dataset.hpp"
#include "cellws/app/oracle.hpp"
#include "cellws/dataprep.hpp"
#include "cellws/metrics.hpp"
#include "cellws/morphology.hpp"
#include "cellws/raster_io.hpp"

namespace cellws::app {
namespace {

using json = nlohmann::ordered_json;

Diagnostics& diag(const RunOptions& opt) {
  static Diagnostics fallback(std::cerr);
  return opt.diag ? *opt.diag : fallback;
}

std::uint64_t run_seed(const DatasetConfig& c, const RunOptions& opt) { return opt.seed.value_or(c.seed); }

std::uint64_t frame_seed(std::uint64_t seed, const std::string& seq, const std::string& frame) {
  return mix_seed(seed, stable_hash(seq + "/" + frame));
}

std::string frame_tag(const std::string& seq, const std::string& frame) { return seq + "/" + frame; }

struct FrameRef {
  std::string seq;
  std::string frame;
};

// Raster writes go through IoError; surface them as data errors.
template <class F>
void guarded_write(F&& f) {
  try {
    f();
  } catch (const IoError& e) {
    throw DataError(e.what());
  }
}

// --- ground truth in memory ---------------------------------------------------

struct GtFrame {
  std::string seq;
  std::string frame;
  LabelMap full;
  std::optional<LabelMap> weak;
};

std::vector<GtFrame> load_gt(const DatasetConfig& config, const RunOptions& opt) {
  const CtcLayout layout(config.root);
  std::vector<FrameRef> refs;
  for (const auto& seq : selected_sequences(config, opt.seq))
    for (const auto& frame : layout.seg_frames(seq)) refs.push_back({seq, frame});
  if (refs.empty()) throw DataError("no full annotations under " + config.root.string());
  std::vector<GtFrame> out(refs.size());
  for_each_index(refs.size(), opt.workers, [&](std::size_t i) {
    GtFrame& g = out[i];
    g.seq = refs[i].seq;
    g.frame = refs[i].frame;
    g.full = load_labels(layout.seg_gt(g.seq, g.frame));
    const fs::path tra = layout.tra_gt(g.seq, g.frame);
    if (fs::exists(tra)) {
      g.weak = load_labels(tra);
      if (!same_shape(*g.weak, g.full))
        throw DataError("annotation dimension mismatch at frame " + frame_tag(g.seq, g.frame));
    }
  });
  return out;
}

std::vector<Prediction> predict_all(const std::vector<GtFrame>& gt, const OraclePredictorSpec& spec, bool weak,
                                    std::uint64_t seed, int workers) {
  std::vector<Prediction> out(gt.size());
  for_each_index(gt.size(), workers, [&](std::size_t i) {
    if (weak && !gt[i].weak) throw DataError("missing weak annotation for frame " + frame_tag(gt[i].seq, gt[i].frame));
    out[i] = oracle_predict(gt[i].full, weak ? gt[i].weak : std::nullopt, spec, frame_seed(seed, gt[i].seq, gt[i].frame));
  });
  return out;
}

// Pipeline parameters with t_c / d_inf resolved against the given predictions.
PipelineParams resolve_params(const DatasetConfig& config, const std::vector<GtFrame>& gt,
                              const std::vector<Prediction>& preds) {
  PipelineParams p = config.pipeline;
  if (config.tc_pending) {
    std::vector<GrayImage> fgs;
    std::vector<BinaryMask> refs;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      fgs.push_back(preds[i].fg);
      refs.push_back(binarize(gt[i].full));
    }
    p.t_c = calibrate_tc(fgs, refs);
  }
  if (config.d_inf_pending) {
    std::vector<const LabelMap*> maps;
    for (const auto& g : gt) maps.push_back(&g.full);
    p.d_inf = min_inscribed_diameter(maps);
  }
  return p;
}

EvalReport score(const std::vector<GtFrame>& gt, const std::vector<LabelMap>& segs) {
  std::vector<std::string> ids(gt.size());
  std::vector<FramePair> pairs;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    ids[i] = frame_tag(gt[i].seq, gt[i].frame);
    pairs.push_back({ids[i], &gt[i].full, &segs[i]});
  }
  return evaluate(pairs);
}

std::vector<LabelMap> segment_all(const std::vector<Prediction>& preds, const PipelineParams& p, int workers) {
  std::vector<LabelMap> out(preds.size());
  for_each_index(preds.size(), workers, [&](std::size_t i) { out[i] = segment_image(preds[i].marker, preds[i].fg, p); });
  return out;
}

std::string csv_number(double v) { return format_number(v); }

// --- experiments ------------------------------------------------------------

std::string experiment_segfunction(const DatasetConfig& config, const RunOptions& opt) {
  const auto gt = load_gt(config, opt);
  const bool weak = config.marker_source == MarkerSource::Weak;
  const auto preds = predict_all(gt, config.oracle, weak, run_seed(config, opt), opt.workers);
  const PipelineParams p = resolve_params(config, gt, preds);
  std::vector<LabelMap> ws(gt.size()), base(gt.size());
  for_each_index(gt.size(), opt.workers, [&](std::size_t i) {
    const SegmentationStages st = prepare_stages(preds[i].marker, preds[i].fg, p);
    ws[i] = finish_segmentation(st, p).labels;
    const LabelMap b = distance_baseline(st.markers, st.region);
    base[i] = p.remove_border ? remove_border_cells(b) : canonicalize(b);
  });

  std::ostringstream o;
  o << "sequence,frames,watershed_seg,baseline_seg,diff\n";
  auto row = [&](const std::string& name, const std::vector<std::size_t>& idx) {
    std::vector<GtFrame> g;
    std::vector<LabelMap> a, b;
    for (std::size_t i : idx) {
      g.push_back(gt[i]);
      a.push_back(ws[i]);
      b.push_back(base[i]);
    }
    const double sw = score(g, a).seg, sb = score(g, b).seg;
    o << name << ',' << idx.size() << ',' << csv_number(sw) << ',' << csv_number(sb) << ',' << csv_number(sw - sb)
      << '\n';
  };
  std::vector<std::size_t> all;
  for (const auto& seq : selected_sequences(config, opt.seq)) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < gt.size(); ++i)
      if (gt[i].seq == seq) idx.push_back(i);
    if (idx.empty()) continue;
    row(seq, idx);
    all.insert(all.end(), idx.begin(), idx.end());
  }
  row("all", all);
  return o.str();
}

std::string experiment_markertype(const DatasetConfig& config, const RunOptions& opt) {
  const auto gt = load_gt(config, opt);
  const std::uint64_t seed = run_seed(config, opt);
  // Filter ratio tied to the marker erosion ratio, scaled like the config pair.
  const double ratio = config.pipeline.k / config.oracle.k;
  const auto base_preds = predict_all(gt, config.oracle, false, seed, opt.workers);
  const PipelineParams base = resolve_params(config, gt, base_preds);

  std::ostringstream o;
  o << "markers,k,frames,seg,det,op_csb\n";
  for (double k : {0.2, 0.4, 0.6, 0.8}) {
    OraclePredictorSpec spec = config.oracle;
    spec.k = k;
    const auto preds = predict_all(gt, spec, false, seed, opt.workers);
    PipelineParams p = base;
    p.k = std::min(1.0, k * ratio);
    const EvalReport r = score(gt, segment_all(preds, p, opt.workers));
    o << "eroded_full," << csv_number(k) << ',' << gt.size() << ',' << csv_number(r.seg) << ','
      << csv_number(r.det) << ',' << csv_number(r.op_csb) << '\n';
  }
  const bool have_weak = std::all_of(gt.begin(), gt.end(), [](const GtFrame& g) { return g.weak.has_value(); });
  if (!have_weak) {
    diag(opt).warn("experiment", "weak annotations missing; weak row omitted");
    return o.str();
  }
  const auto preds = predict_all(gt, config.oracle, true, seed, opt.workers);
  PipelineParams p = base;
  std::vector<const LabelMap*> maps;
  for (const auto& g : gt) maps.push_back(&*g.weak);
  p.d_inf = min_inscribed_diameter(maps);
  p.k = std::min(1.0, ratio);
  const EvalReport r = score(gt, segment_all(preds, p, opt.workers));
  o << "weak,," << gt.size() << ',' << csv_number(r.seg) << ',' << csv_number(r.det) << ',' << csv_number(r.op_csb)
    << '\n';
  return o.str();
}

std::string experiment_augmentation(const DatasetConfig& config, const RunOptions& opt) {
  const auto gt = load_gt(config, opt);
  const std::uint64_t seed = run_seed(config, opt);
  const bool weak = config.marker_source == MarkerSource::Weak;
  const auto preds = predict_all(gt, config.oracle, weak, seed, opt.workers);
  const PipelineParams p = resolve_params(config, gt, preds);

  struct Variant {
    const char* name;
    bool elastic;
    bool rigid;
  };
  const Variant variants[] = {{"none", false, false}, {"ED", true, false}, {"ED+RTS", true, true}, {"RTS", false, true}};

  std::ostringstream o;
  o << "augmentation,frames,seg,det,op_csb\n";
  for (std::size_t v = 0; v < std::size(variants); ++v) {
    AugmentationSpec spec;
    spec.rigid = variants[v].rigid;
    if (variants[v].elastic) spec.elastic = ElasticParams{};
    std::vector<GtFrame> aug(gt.size());
    std::vector<LabelMap> segs(gt.size());
    for_each_index(gt.size(), opt.workers, [&](std::size_t i) {
      Rng rng(mix_seed(frame_seed(seed, gt[i].seq, gt[i].frame), v));
      const GrayImage blank(gt[i].full.width(), gt[i].full.height(), 0.0f);
      const AugmentationDraw draw = draw_augmentation(spec, blank.width(), blank.height(), rng);
      aug[i].seq = gt[i].seq;
      aug[i].frame = gt[i].frame;
      aug[i].full = apply_augmentation(Sample{blank, gt[i].full}, draw).labels;
      if (weak) aug[i].weak = apply_augmentation(Sample{blank, *gt[i].weak}, draw).labels;
      const Prediction pr = oracle_predict(aug[i].full, aug[i].weak, config.oracle,
                                           frame_seed(seed, gt[i].seq, gt[i].frame));
      segs[i] = segment_image(pr.marker, pr.fg, p);
    });
    const EvalReport r = score(aug, segs);
    o << variants[v].name << ',' << gt.size() << ',' << csv_number(r.seg) << ',' << csv_number(r.det) << ','
      << csv_number(r.op_csb) << '\n';
  }
  return o.str();
}

}  // namespace

void for_each_index(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers < 1) throw UsageError("--workers must be >= 1");
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t stable_hash(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double min_inscribed_diameter(const std::vector<const LabelMap*>& maps) {
  int best = -1;
  for (const LabelMap* m : maps) {
    const auto boxes = label_boxes(*m);
    for (std::size_t l = 1; l < boxes.size(); ++l) {
      if (!boxes[l].valid()) continue;
      BoundingBox b = boxes[l];
      b.x0 = std::max(0, b.x0 - 1);
      b.y0 = std::max(0, b.y0 - 1);
      b.x1 = std::min(m->width() - 1, b.x1 + 1);
      b.y1 = std::min(m->height() - 1, b.y1 + 1);
      const LabelMap crop_l = crop(*m, b);
      BinaryMask cell(crop_l.width(), crop_l.height(), 0);
      for (std::size_t i = 0; i < cell.size(); ++i) cell[i] = crop_l[i] == static_cast<std::int32_t>(l);
      const int d = max_inscribed_diameter(cell);
      if (best < 0 || d < best) best = d;
    }
  }
  if (best <= 0) throw DataError("no annotated cells to measure d_inf from");
  return best;
}

void cmd_synth(const fs::path& out, const SynthSpec& spec, const RunOptions& opt) {
  guarded_write([&] { write_synthetic_dataset(out, spec); });
  diag(opt).info("synth", "dataset written",
                 {{"out", out.string()}, {"frames", std::to_string(spec.frames)}, {"seq", spec.sequence}});
}

PrepareSummary cmd_prepare(const DatasetConfig& config, const RunOptions& opt) {
  const CtcLayout layout(config.root);
  const fs::path out = opt.out.empty() ? config.root / "prepared" : opt.out;
  const std::uint64_t seed = run_seed(config, opt);
  const bool weak = config.marker_source == MarkerSource::Weak;
  Diagnostics& d = diag(opt);

  std::vector<FrameRef> jobs;
  std::size_t unannotated = 0;
  for (const auto& seq : selected_sequences(config, opt.seq)) {
    const auto ids = weak ? layout.tra_frames(seq) : layout.seg_frames(seq);
    for (const auto& f : ids) jobs.push_back({seq, f});
    const std::set<std::string> annotated(ids.begin(), ids.end());
    for (const auto& f : layout.raw_frames(seq)) unannotated += !annotated.count(f);
  }
  if (unannotated) d.info("prepare", "raw frames without annotation ignored", {{"count", std::to_string(unannotated)}});
  if (weak && config.augment_copies > 0) d.warn("prepare", "augment_copies ignored for weak markers");

  std::vector<json> rows(jobs.size());
  for_each_index(jobs.size(), opt.workers, [&](std::size_t i) {
    const auto& [seq, frame] = jobs[i];
    json row = {{"seq", seq}, {"frame", frame}};
    const fs::path raw = layout.raw(seq, frame);
    if (!fs::exists(raw)) {
      row["status"] = "skipped";
      row["reason"] = "missing raw frame";
      rows[i] = row;
      return;
    }
    const GrayImage img = load_gray(raw);
    std::optional<LabelMap> full;
    if (fs::exists(layout.seg_gt(seq, frame))) full = load_labels(layout.seg_gt(seq, frame));
    std::optional<LabelMap> markers;
    if (weak) markers = load_labels(layout.tra_gt(seq, frame));
    if ((full && !same_shape(*full, img)) || (markers && !same_shape(*markers, img))) {
      row["status"] = "skipped";
      row["reason"] = "annotation size differs from raw frame";
      rows[i] = row;
      return;
    }

    const fs::path dir = out / seq;
    json outputs = json::array();
    auto write_set = [&](const std::string& stem, const GrayImage& norm, const std::optional<LabelMap>& cells,
                         const BinaryMask& ym) {
      guarded_write([&] {
        fs::create_directories(dir);
        write_float(dir / (stem + "_norm.tif"), norm);
        write_mask8(dir / (stem + "_ym.tif"), ym);
        outputs.push_back(seq + "/" + stem + "_norm.tif");
        outputs.push_back(seq + "/" + stem + "_ym.tif");
        if (cells) {
          write_mask8(dir / (stem + "_yc.tif"), binarize(*cells));
          write_float(dir / (stem + "_w.tif"), weight_map(FullAnnotation{*cells}, config.weights));
          outputs.push_back(seq + "/" + stem + "_yc.tif");
          outputs.push_back(seq + "/" + stem + "_w.tif");
        }
      });
    };

    const GrayImage norm = normalize(img, config.normalization, config.clahe);
    const BinaryMask ym =
        weak ? markers_from_weak(WeakAnnotation{*markers}) : make_reference(FullAnnotation{*full}, config.pipeline.k).markers;
    write_set(frame, norm, full, ym);
    int copies = 0;
    if (!weak) {
      AugmentationSpec spec;
      if (config.augment_elastic) spec.elastic = ElasticParams{};
      for (int j = 0; j < config.augment_copies; ++j) {
        Rng rng(mix_seed(frame_seed(seed, seq, frame), static_cast<std::uint64_t>(j)));
        const Sample s = augment(Sample{norm, *full}, spec, rng);
        write_set(frame + "_aug" + std::to_string(j), s.image, s.labels,
                  make_reference(FullAnnotation{s.labels}, config.pipeline.k).markers);
        ++copies;
      }
    }
    row["status"] = "ok";
    row["cells"] = count_labels(weak ? *markers : *full);
    row["foreground"] = full.has_value();
    row["augmented"] = copies;
    row["outputs"] = outputs;
    rows[i] = row;
  });

  PrepareSummary s;
  s.manifest = out / "manifest.jsonl";
  std::string text;
  for (const auto& r : rows) {
    text += r.dump() + "\n";
    if (r["status"] == "ok") {
      ++s.prepared;
      s.augmented += r["augmented"].get<std::size_t>();
    } else {
      ++s.skipped;
      d.warn("prepare", "frame skipped",
             {{"seq", r["seq"].get<std::string>()}, {"frame", r["frame"].get<std::string>()},
              {"reason", r["reason"].get<std::string>()}});
    }
  }
  write_text(s.manifest, text);
  if (jobs.empty()) d.warn("prepare", "no annotated frames found", {{"root", config.root.string()}});
  d.info("prepare", "done", {{"prepared", std::to_string(s.prepared)}, {"skipped", std::to_string(s.skipped)}});
  return s;
}

OracleSummary cmd_oracle_predict(const DatasetConfig& config, const RunOptions& opt) {
  const CtcLayout layout(config.root);
  const fs::path out = opt.out.empty() ? config.root / "pred" : opt.out;
  const std::uint64_t seed = run_seed(config, opt);
  const bool weak = config.marker_source == MarkerSource::Weak;
  Diagnostics& d = diag(opt);

  std::vector<FrameRef> jobs;
  OracleSummary s;
  for (const auto& seq : selected_sequences(config, opt.seq))
    for (const auto& frame : layout.seg_frames(seq)) {
      if (weak && !fs::exists(layout.tra_gt(seq, frame))) {
        d.warn("oracle-predict", "no weak annotation; frame skipped", {{"seq", seq}, {"frame", frame}});
        ++s.skipped;
        continue;
      }
      jobs.push_back({seq, frame});
    }
  if (jobs.empty()) d.warn("oracle-predict", "no annotated frames found", {{"root", config.root.string()}});

  for_each_index(jobs.size(), opt.workers, [&](std::size_t i) {
    const auto& [seq, frame] = jobs[i];
    const LabelMap full = load_labels(layout.seg_gt(seq, frame));
    std::optional<LabelMap> markers;
    if (weak) {
      markers = load_labels(layout.tra_gt(seq, frame));
      if (!same_shape(*markers, full)) throw DataError("annotation dimension mismatch at frame " + frame_tag(seq, frame));
    }
    const Prediction p = oracle_predict(full, markers, config.oracle, frame_seed(seed, seq, frame));
    guarded_write([&] {
      fs::create_directories(out / seq);
      write_probability16(marker_prediction(out, seq, frame), p.marker);
      write_probability16(fg_prediction(out, seq, frame), p.fg);
    });
  });
  s.written = jobs.size();
  d.info("oracle-predict", "done", {{"written", std::to_string(s.written)}, {"out", out.string()}});
  return s;
}

CalibrationResult cmd_calibrate(const DatasetConfig& config, const fs::path& pred_root, const RunOptions& opt) {
  const CtcLayout layout(config.root);
  const fs::path out = opt.out.empty() ? config.root : opt.out;
  Diagnostics& d = diag(opt);

  std::vector<FrameRef> jobs;
  for (const auto& seq : selected_sequences(config, opt.seq))
    for (const auto& frame : layout.seg_frames(seq))
      if (fs::exists(fg_prediction(pred_root, seq, frame))) jobs.push_back({seq, frame});
  if (jobs.empty()) throw DataError("no frames with both a foreground prediction and a full annotation");

  std::vector<GrayImage> fgs(jobs.size());
  std::vector<LabelMap> cells(jobs.size());
  std::vector<std::optional<LabelMap>> weak(jobs.size());
  const bool need_weak = config.d_inf_pending && config.marker_source == MarkerSource::Weak;
  for_each_index(jobs.size(), opt.workers, [&](std::size_t i) {
    const auto& [seq, frame] = jobs[i];
    fgs[i] = load_probability(fg_prediction(pred_root, seq, frame));
    cells[i] = load_labels(layout.seg_gt(seq, frame));
    if (!same_shape(fgs[i], cells[i])) throw DataError("dimension mismatch at frame " + frame_tag(seq, frame));
    if (!is_probability(fgs[i])) throw DataError("prediction outside [0, 1] at frame " + frame_tag(seq, frame));
    if (need_weak) {
      if (!fs::exists(layout.tra_gt(seq, frame)))
        throw DataError("missing weak annotation for frame " + frame_tag(seq, frame));
      weak[i] = load_labels(layout.tra_gt(seq, frame));
    }
  });
  std::vector<BinaryMask> refs;
  for (const auto& c : cells) refs.push_back(binarize(c));

  CalibrationResult r;
  r.frames = jobs.size();
  r.curve = threshold_curve(fgs, refs);
  r.t_c = r.curve.best;
  if (config.d_inf_pending) {
    std::vector<const LabelMap*> maps;
    for (std::size_t i = 0; i < jobs.size(); ++i) maps.push_back(need_weak ? &*weak[i] : &cells[i]);
    r.d_inf = min_inscribed_diameter(maps);
  }

  std::string csv = "t,jaccard\n";
  for (int t = 0; t < 256; ++t) csv += std::to_string(t) + "," + format_number(r.curve.jaccard[static_cast<std::size_t>(t)]) + "\n";
  write_text(out / "calibration_curve.csv", csv);

  if (!config.source.empty()) {
    std::vector<std::pair<std::string, std::string>> values = {{"t_c", std::to_string(r.t_c)}};
    if (r.d_inf) values.emplace_back("d_inf", format_number(*r.d_inf));
    write_text(config.source, update_config_text(read_text(config.source), values));
  }
  std::vector<Field> fields = {{"t_c", std::to_string(r.t_c)},
                               {"jaccard", format_number(r.curve.jaccard[static_cast<std::size_t>(r.t_c)])},
                               {"frames", std::to_string(r.frames)}};
  if (r.d_inf) fields.emplace_back("d_inf", format_number(*r.d_inf));
  d.info("calibrate", "done", fields);
  return r;
}

SegmentSummary cmd_segment(const DatasetConfig& config, const fs::path& pred_root, const RunOptions& opt) {
  if (config.tc_pending || config.d_inf_pending)
    throw UsageError("t_c or d_inf not resolved; run calibrate first");
  const CtcLayout layout(config.root);
  const fs::path out = opt.out.empty() ? config.root : opt.out;
  const CtcLayout results(out);
  const PipelineParams& p = config.pipeline;
  Diagnostics& d = diag(opt);

  std::vector<FrameRef> jobs;
  const auto seqs = selected_sequences(config, opt.seq);
  for (const auto& seq : seqs) {
    const auto frames = layout.raw_frames(seq);
    if (frames.empty()) d.warn("segment", "no raw frames", {{"seq", seq}});
    for (const auto& f : frames) jobs.push_back({seq, f});
  }
  for (const auto& [seq, frame] : jobs)
    for (const auto& path : {marker_prediction(pred_root, seq, frame), fg_prediction(pred_root, seq, frame)})
      if (!fs::exists(path)) throw DataError("missing prediction for frame " + frame_tag(seq, frame) + ": " + path.string());
  for (const auto& seq : seqs) fs::create_directories(results.result_dir(seq));

  SegmentSummary s;
  s.frames.resize(jobs.size());
  for_each_index(jobs.size(), opt.workers, [&](std::size_t i) {
    const auto& [seq, frame] = jobs[i];
    const auto start = std::chrono::steady_clock::now();
    const GrayImage marker = load_probability(marker_prediction(pred_root, seq, frame));
    const GrayImage fg = load_probability(fg_prediction(pred_root, seq, frame));
    if (!same_shape(marker, fg)) throw DataError("prediction dimension mismatch at frame " + frame_tag(seq, frame));
    SegmentationResult r;
    try {
      r = segment_image_detailed(marker, fg, p);
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string(e.what()) + " at frame " + frame_tag(seq, frame));
    }
    if (max_label(r.labels) > 65535) throw DataError("more than 65535 segments at frame " + frame_tag(seq, frame));
    guarded_write([&] { write_labels16(results.result(seq, frame), r.labels); });
    FrameRecord& rec = s.frames[i];
    rec.seq = seq;
    rec.frame = frame;
    rec.markers = r.marker_count;
    rec.dropped_markers = r.dropped_markers;
    rec.segments = count_labels(r.labels);
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  std::string log = json{{"params",
                          {{"t_m", p.t_m},
                           {"h", p.h},
                           {"k", p.k},
                           {"d_inf", p.d_inf},
                           {"marker_diameter", p.marker_diameter()},
                           {"t_c", p.t_c},
                           {"connectivity", p.connectivity == Connectivity::Eight ? 8 : 4},
                           {"remove_border", p.remove_border}}},
                         {"sequences", seqs},
                         {"frames", jobs.size()}}
                        .dump() +
                    "\n";
  std::string timing;
  for (const auto& rec : s.frames) {
    log += json{{"seq", rec.seq},
                {"frame", rec.frame},
                {"markers", rec.markers},
                {"dropped_markers", rec.dropped_markers},
                {"segments", rec.segments}}
               .dump() +
           "\n";
    timing += json{{"seq", rec.seq}, {"frame", rec.frame}, {"seconds", rec.seconds}}.dump() + "\n";
    if (rec.segments == 0) d.warn("segment", "empty segmentation", {{"seq", rec.seq}, {"frame", rec.frame}});
    if (rec.dropped_markers)
      d.warn("segment", "markers outside the cell region dropped",
             {{"seq", rec.seq}, {"frame", rec.frame}, {"count", std::to_string(rec.dropped_markers)}});
  }
  write_text(out / "run_log.jsonl", log);
  write_text(out / "run_timing.jsonl", timing);
  d.info("segment", "done", {{"frames", std::to_string(jobs.size())}, {"out", out.string()}});
  return s;
}

EvalSummary cmd_evaluate(const DatasetConfig& config, const fs::path& res_root, const RunOptions& opt) {
  const CtcLayout layout(config.root);
  const CtcLayout results(res_root);
  const fs::path out = opt.out.empty() ? res_root : opt.out;

  std::vector<FrameRef> jobs;
  const auto seqs = selected_sequences(config, opt.seq);
  for (const auto& seq : seqs)
    for (const auto& frame : layout.seg_frames(seq)) jobs.push_back({seq, frame});
  if (jobs.empty()) throw DataError("no full annotations to evaluate against");

  std::vector<LabelMap> refs(jobs.size()), segs(jobs.size());
  for_each_index(jobs.size(), opt.workers, [&](std::size_t i) {
    const auto& [seq, frame] = jobs[i];
    const fs::path res = results.result(seq, frame);
    if (!fs::exists(res)) throw DataError("missing result mask for frame " + frame_tag(seq, frame) + ": " + res.string());
    refs[i] = load_labels(layout.seg_gt(seq, frame));
    segs[i] = load_labels(res);
    if (!same_shape(refs[i], segs[i]))
      throw DataError("dimension mismatch at frame " + frame_tag(seq, frame) + ": result " +
                      std::to_string(segs[i].width()) + "x" + std::to_string(segs[i].height()) + ", reference " +
                      std::to_string(refs[i].width()) + "x" + std::to_string(refs[i].height()));
  });

  std::vector<std::string> ids(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) ids[i] = frame_tag(jobs[i].seq, jobs[i].frame);
  auto run = [&](const std::string& name, const std::vector<std::size_t>& idx) {
    std::vector<FramePair> pairs;
    for (std::size_t i : idx) pairs.push_back({ids[i], &refs[i], &segs[i]});
    SequenceScore s;
    s.sequence = name;
    s.frames = idx.size();
    try {
      s.report = evaluate(pairs);
    } catch (const std::invalid_argument& e) {
      throw DataError("sequence " + name + ": " + e.what());
    }
    return s;
  };

  EvalSummary summary;
  std::vector<std::size_t> all;
  for (const auto& seq : seqs) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < jobs.size(); ++i)
      if (jobs[i].seq == seq) idx.push_back(i);
    if (idx.empty()) continue;
    summary.sequences.push_back(run(seq, idx));
    all.insert(all.end(), idx.begin(), idx.end());
  }
  summary.overall = run("all", all);
  write_text(out / "eval.json", eval_to_json(summary));
  write_text(out / "eval.csv", eval_to_csv(summary));
  const EvalReport& r = summary.overall.report;
  diag(opt).info("evaluate", "done",
                 {{"seg", format_number(r.seg)}, {"det", format_number(r.det)}, {"op_csb", format_number(r.op_csb)},
                  {"frames", std::to_string(all.size())}});
  return summary;
}

std::string cmd_experiment(const std::string& name, const DatasetConfig& config, const RunOptions& opt) {
  std::string csv;
  if (name == "segfunction")
    csv = experiment_segfunction(config, opt);
  else if (name == "markertype")
    csv = experiment_markertype(config, opt);
  else if (name == "augmentation")
    csv = experiment_augmentation(config, opt);
  else
    throw UsageError("unknown experiment: " + name + " (expected augmentation, segfunction or markertype)");
  const fs::path out = opt.out.empty() ? config.root : opt.out;
  write_text(out / ("experiment_" + name + ".csv"), csv);
  diag(opt).info("experiment", "done", {{"name", name}, {"out", (out / ("experiment_" + name + ".csv")).string()}});
  return csv;
}

}  // namespace cellws::app
