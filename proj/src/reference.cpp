#include <algorithm>
#include <set>
#include <stdexcept>

#include "cellws/dataprep.hpp"
#include "cellws/morphology.hpp"

namespace cellws {

namespace {

// Largest 8-connected component; ties go to the component whose first pixel
// comes first in raster order.
BinaryMask largest_component(const BinaryMask& mask, bool* split = nullptr) {
  const LabelMap comps = connected_components(mask, Connectivity::Eight);
  const auto areas = label_areas(comps);
  if (areas.size() <= 2) {
    if (split) *split = false;
    return mask;
  }
  if (split) *split = true;
  std::size_t best = 1;
  for (std::size_t l = 2; l < areas.size(); ++l)
    if (areas[l] > areas[best]) best = l;
  return label_mask(comps, static_cast<std::int32_t>(best));
}

BinaryMask single_pixel(const BinaryMask& like, std::size_t index) {
  BinaryMask out(like.width(), like.height(), 0);
  out[index] = 1;
  return out;
}

// Labels of the 8-neighbours of (x, y) that differ from `own` and are > 0.
template <class F>
bool touches_other(const LabelMap& labels, int x, int y, std::int32_t own, F&& accept) {
  for (const auto& o : neighbor_offsets(Connectivity::Eight)) {
    const int nx = x + o.dx, ny = y + o.dy;
    if (!labels.contains(nx, ny)) continue;
    const auto v = labels(nx, ny);
    if (v > 0 && v != own && accept(v)) return true;
  }
  return false;
}

void paste(LabelMap& dst, const BinaryMask& src, const BoundingBox& box, std::int32_t label) {
  for (int y = 0; y < src.height(); ++y)
    for (int x = 0; x < src.width(); ++x)
      if (src(x, y)) dst(box.x0 + x, box.y0 + y) = label;
}

}  // namespace

ReferenceDetail make_reference_detailed(const FullAnnotation& full, double k) {
  if (!(k >= 0.0 && k <= 1.0)) throw std::invalid_argument("make_reference: k must lie in [0, 1]");
  const LabelMap& labels = full.labels;
  ReferenceDetail out;
  out.outputs.foreground = binarize(labels);
  out.marker_labels = LabelMap(labels.width(), labels.height(), 0);

  const auto boxes = label_boxes(labels);
  std::vector<std::size_t> cell_index(boxes.size(), 0);
  for (std::size_t l = 1; l < boxes.size(); ++l) {
    if (!boxes[l].valid()) continue;
    const auto label = static_cast<std::int32_t>(l);
    const BoundingBox box = boxes[l];
    const BinaryMask cell = label_mask(crop(labels, box), label);

    CellMarkerInfo info;
    info.label = label;
    info.d_max = max_inscribed_diameter(cell);
    info.d_se = (1.0 - k) * info.d_max;

    BinaryMask marker;
    if (k == 0.0) {
      marker = single_pixel(cell, ultimate_erosion_point(cell));
      info.ultimate_point = true;
    } else {
      marker = info.d_se > 0.0 ? erode(cell, DiskSE(info.d_se)) : cell;
      if (count_set(marker) == 0) {
        marker = single_pixel(cell, ultimate_erosion_point(cell));
        info.ultimate_point = true;
      } else {
        marker = largest_component(marker, &info.largest_component);
      }
    }
    paste(out.marker_labels, marker, box, label);
    cell_index[l] = out.cells.size();
    out.cells.push_back(info);
  }

  // Markers of touching cells may still be adjacent (k near 1, thin
  // contacts). Drop every marker pixel that has a foreign marker neighbour,
  // then repair the markers that lost pixels, until nothing touches.
  LabelMap& markers = out.marker_labels;
  std::set<std::int32_t> dirty;
  for (int round = 0; round < 16; ++round) {
    std::vector<std::size_t> conflicts;
    for (int y = 0; y < markers.height(); ++y)
      for (int x = 0; x < markers.width(); ++x) {
        const auto own = markers(x, y);
        if (own > 0 && touches_other(markers, x, y, own, [](auto) { return true; }))
          conflicts.push_back(markers.index(x, y));
      }
    for (auto i : conflicts) {
      dirty.insert(markers[i]);
      markers[i] = 0;
    }
    if (dirty.empty()) break;

    std::set<std::int32_t> next_dirty;
    for (const auto label : dirty) {
      auto& info = out.cells[cell_index[static_cast<std::size_t>(label)]];
      info.trimmed = true;
      const BoundingBox box = boxes[static_cast<std::size_t>(label)];
      const LabelMap local = crop(markers, box);
      BinaryMask rest = label_mask(local, label);
      for (int y = 0; y < box.height(); ++y)
        for (int x = 0; x < box.width(); ++x)
          if (local(x, y) == label) markers(box.x0 + x, box.y0 + y) = 0;

      if (count_set(rest) > 0) {
        rest = largest_component(rest);
      } else {
        // Deepest cell pixel away from other cells, else away from other
        // markers, else the deepest pixel with its foreign neighbours cleared.
        const BinaryMask cell = label_mask(crop(labels, box), label);
        BinaryMask interior = cell, free = cell;
        for (int y = 0; y < box.height(); ++y)
          for (int x = 0; x < box.width(); ++x) {
            if (!cell(x, y)) continue;
            const int gx = box.x0 + x, gy = box.y0 + y;
            if (touches_other(labels, gx, gy, label, [](auto) { return true; })) interior(x, y) = 0;
            if (touches_other(markers, gx, gy, label, [](auto) { return true; })) free(x, y) = 0;
          }
        const BinaryMask& source = count_set(interior) > 0 ? interior : count_set(free) > 0 ? free : cell;
        const std::size_t p = ultimate_erosion_point(source);
        rest = single_pixel(cell, p);
        info.ultimate_point = true;
        const int gx = box.x0 + static_cast<int>(p) % box.width(), gy = box.y0 + static_cast<int>(p) / box.width();
        for (const auto& o : neighbor_offsets(Connectivity::Eight)) {
          if (!markers.contains(gx + o.dx, gy + o.dy)) continue;
          auto& v = markers(gx + o.dx, gy + o.dy);
          if (v > 0 && v != label) {
            next_dirty.insert(v);
            v = 0;
          }
        }
      }
      paste(markers, rest, box, label);
    }
    dirty = std::move(next_dirty);
  }

  out.outputs.markers = binarize(markers);
  return out;
}

ReferenceOutputs make_reference(const FullAnnotation& full, double k) {
  return make_reference_detailed(full, k).outputs;
}

LabelMap separate_weak_markers(const WeakAnnotation& weak) {
  LabelMap markers = weak.markers;
  const DiskSE se(3.0);
  std::set<std::int32_t> frozen;

  while (true) {
    std::set<std::int32_t> touching;
    for (int y = 0; y < markers.height(); ++y)
      for (int x = 0; x < markers.width(); ++x) {
        const auto own = markers(x, y);
        if (own > 0 && touches_other(markers, x, y, own, [](auto) { return true; })) touching.insert(own);
      }
    bool progressed = false;
    const auto boxes = label_boxes(markers);
    for (const auto label : touching) {
      if (frozen.count(label)) continue;
      progressed = true;
      const BoundingBox box = boxes[static_cast<std::size_t>(label)];
      const BinaryMask current = label_mask(crop(markers, box), label);
      BinaryMask next = erode(current, se);
      if (count_set(next) == 0) {
        next = single_pixel(current, ultimate_erosion_point(current));
        frozen.insert(label);
      } else {
        next = largest_component(next);
      }
      for (int y = 0; y < box.height(); ++y)
        for (int x = 0; x < box.width(); ++x)
          if (current(x, y)) markers(box.x0 + x, box.y0 + y) = 0;
      paste(markers, next, box, label);
    }
    if (!progressed) break;
  }
  return markers;
}

BinaryMask markers_from_weak(const WeakAnnotation& weak) { return binarize(separate_weak_markers(weak)); }

}  // namespace cellws
