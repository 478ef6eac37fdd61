#include "distrep/harness/eval.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace distrep::harness {

namespace {

struct Instance {
  int class_id = 0;
  double score = 0.0;
  std::vector<std::size_t> pixels;  // sorted linear indices
};

double mask_iou(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::size_t inter = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double average_precision(const std::vector<const Instance*>& preds, const std::vector<const Instance*>& gts,
                         double threshold) {
  if (gts.empty()) {
    return 0.0;
  }
  std::vector<bool> taken(gts.size(), false);
  std::vector<double> precision;
  std::vector<double> recall;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    std::size_t best = gts.size();
    double best_iou = threshold;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double v = mask_iou(preds[i]->pixels, gts[g]->pixels);
      if (v >= best_iou && (best == gts.size() || v > best_iou)) {
        best = g;
        best_iou = v;
      }
    }
    if (best != gts.size()) {
      taken[best] = true;
      ++tp;
    }
    precision.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(gts.size()));
  }
  // Monotone envelope, then sum precision over recall increments.
  for (std::size_t i = precision.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < precision.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

}  // namespace

std::vector<double> coco_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) {
    t.push_back(0.5 + 0.05 * i);
  }
  return t;
}

ApReport evaluate_ap(const InstanceMap& pred, const Scene& gt, std::span<const double> iou_thresholds) {
  if (pred.width != gt.width || pred.height != gt.height) {
    throw Error(ErrorCode::DimensionMismatch, "instance map and scene dimensions differ");
  }
  if (iou_thresholds.empty()) {
    throw Error(ErrorCode::InvalidArgument, "at least one IoU threshold is required");
  }

  std::vector<Instance> gt_inst;
  for (const auto& obj : gt.objects) {
    Instance inst{obj.class_id, 1.0, {}};
    for (const auto& p : obj.pixels) {
      inst.pixels.push_back(static_cast<std::size_t>(p.y) * gt.width + p.x);
    }
    std::sort(inst.pixels.begin(), inst.pixels.end());
    gt_inst.push_back(std::move(inst));
  }

  std::vector<Instance> pred_inst(pred.detections.size());
  for (std::size_t k = 0; k < pred.detections.size(); ++k) {
    pred_inst[k].class_id = pred.detections[k].class_id;
    pred_inst[k].score = pred.detections[k].score;
  }
  for (std::size_t i = 0; i < pred.instance_ids.size(); ++i) {
    const int id = pred.instance_ids[i];
    if (id > 0 && static_cast<std::size_t>(id) <= pred_inst.size()) {
      pred_inst[static_cast<std::size_t>(id - 1)].pixels.push_back(i);
    }
  }

  std::set<int> classes;
  for (const auto& g : gt_inst) classes.insert(g.class_id);

  ApReport report;
  report.thresholds.assign(iou_thresholds.begin(), iou_thresholds.end());
  for (int cls : classes) {
    std::vector<const Instance*> gts;
    std::vector<const Instance*> preds;
    for (const auto& g : gt_inst) {
      if (g.class_id == cls) gts.push_back(&g);
    }
    for (const auto& p : pred_inst) {
      if (p.class_id == cls && !p.pixels.empty()) preds.push_back(&p);
    }
    std::stable_sort(preds.begin(), preds.end(),
                     [](const Instance* a, const Instance* b) { return a->score > b->score; });

    ClassAp cap;
    cap.num_gt = static_cast<int>(gts.size());
    cap.num_pred = static_cast<int>(preds.size());
    for (double t : iou_thresholds) {
      cap.ap.push_back(average_precision(preds, gts, t));
    }
    cap.mean_ap = std::accumulate(cap.ap.begin(), cap.ap.end(), 0.0) / static_cast<double>(cap.ap.size());
    cap.ap50 = average_precision(preds, gts, 0.5);
    report.per_class[cls] = cap;
  }
  if (!report.per_class.empty()) {
    for (const auto& [cls, cap] : report.per_class) {
      report.ap50 += cap.ap50;
      report.mean_ap += cap.mean_ap;
    }
    report.ap50 /= static_cast<double>(report.per_class.size());
    report.mean_ap /= static_cast<double>(report.per_class.size());
  }
  return report;
}

}  // namespace distrep::harness
