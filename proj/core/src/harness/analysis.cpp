#include "distrep/harness/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "distrep/divergence.hpp"
#include "distrep/fit.hpp"

namespace distrep::harness {

namespace {

constexpr const char* kHeader = "scene_id,obj_a,obj_b,iou,sym_kl,same_class";
constexpr const char* kHeaderWithClasses = "scene_id,obj_a,obj_b,iou,sym_kl,same_class,class_a,class_b";

template <typename T>
T parse_field(const std::string& field, std::size_t line) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::ParseError, "pairs CSV line " + std::to_string(line) + ": bad field '" + field + "'");
  }
  return value;
}

// Admissible tau for a sorted list: the value at rank floor(f * n) keeps at
// most that many strictly below it.
double largest_admissible(std::vector<double> values, double max_false_merge) {
  std::sort(values.begin(), values.end());
  const auto budget = static_cast<std::size_t>(std::floor(max_false_merge * static_cast<double>(values.size())));
  if (budget >= values.size()) {
    return values.back();
  }
  return values[budget];
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<PairRecord> pair_analysis(std::span<const Scene> scenes, int first_scene_id) {
  std::vector<PairRecord> records;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    const Scene& scene = scenes[s];
    std::vector<Gaussian2D> fits;
    std::vector<BoundingBox> boxes;
    for (const auto& obj : scene.objects) {
      fits.push_back(fit_gaussian(obj.pixels));
      boxes.push_back(bbox_of(obj.pixels));
    }
    for (std::size_t a = 0; a < scene.objects.size(); ++a) {
      for (std::size_t b = a + 1; b < scene.objects.size(); ++b) {
        const auto& oa = scene.objects[a];
        const auto& ob = scene.objects[b];
        records.push_back(PairRecord{first_scene_id + static_cast<int>(s), oa.id, ob.id, iou(boxes[a], boxes[b]),
                                     sym_kl(fits[a], fits[b]), oa.class_id == ob.class_id, oa.class_id,
                                     ob.class_id});
      }
    }
  }
  return records;
}

void write_pairs_csv(std::ostream& out, std::span<const PairRecord> records, bool with_classes) {
  out << (with_classes ? kHeaderWithClasses : kHeader) << '\n';
  for (const auto& r : records) {
    out << r.scene_id << ',' << r.obj_a << ',' << r.obj_b << ',' << format_real(r.iou) << ','
        << format_real(r.sym_kl) << ',' << (r.same_class ? 1 : 0);
    if (with_classes) {
      out << ',' << r.class_a << ',' << r.class_b;
    }
    out << '\n';
  }
}

std::vector<PairRecord> read_pairs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::ParseError, "pairs CSV is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool with_classes = false;
  if (line == kHeaderWithClasses) {
    with_classes = true;
  } else if (line != kHeader) {
    throw Error(ErrorCode::ParseError, "unexpected pairs CSV header '" + line + "'");
  }
  std::vector<PairRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    const std::size_t expected = with_classes ? 8 : 6;
    if (fields.size() != expected) {
      throw Error(ErrorCode::ParseError, "pairs CSV line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(expected) + " fields");
    }
    PairRecord r;
    r.scene_id = parse_field<int>(fields[0], line_no);
    r.obj_a = parse_field<int>(fields[1], line_no);
    r.obj_b = parse_field<int>(fields[2], line_no);
    r.iou = parse_field<double>(fields[3], line_no);
    r.sym_kl = parse_field<double>(fields[4], line_no);
    const int same = parse_field<int>(fields[5], line_no);
    if (same != 0 && same != 1) {
      throw Error(ErrorCode::ParseError, "pairs CSV line " + std::to_string(line_no) + ": same_class must be 0/1");
    }
    r.same_class = same == 1;
    if (with_classes) {
      r.class_a = parse_field<int>(fields[6], line_no);
      r.class_b = parse_field<int>(fields[7], line_no);
    }
    records.push_back(r);
  }
  return records;
}

namespace {

template <typename TauOf>
DecouplingReport count_failures(std::span<const PairRecord> records, TauOf tau_of) {
  DecouplingReport report;
  for (const auto& r : records) {
    if (!r.same_class || !(r.iou > kIouFailureThreshold)) {
      continue;
    }
    ++report.iou_failures;
    if (r.sym_kl < tau_of(r)) {
      ++report.kl_failures;
    }
  }
  if (report.iou_failures == 0) {
    throw Error(ErrorCode::NoOverlappingPairs, "no same-class pair has bbox IoU above 0.5");
  }
  report.reduction = 1.0 - static_cast<double>(report.kl_failures) / static_cast<double>(report.iou_failures);
  return report;
}

void require_tau(double tau) {
  if (!std::isfinite(tau) || tau < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "tau must be finite and non-negative");
  }
}

}  // namespace

DecouplingReport decoupling_report(std::span<const PairRecord> records, double tau) {
  require_tau(tau);
  DecouplingReport report = count_failures(records, [tau](const PairRecord&) { return tau; });
  report.tau = tau;
  return report;
}

DecouplingReport decoupling_report(std::span<const PairRecord> records, const Calibration& calibration) {
  require_tau(calibration.global_tau);
  for (const auto& [cls, tau] : calibration.per_class) {
    require_tau(tau);
  }
  DecouplingReport report =
      count_failures(records, [&](const PairRecord& r) { return calibration.tau_for(r.class_a); });
  report.tau = calibration.global_tau;
  return report;
}

double Calibration::tau_for(int class_id) const {
  auto it = per_class.find(class_id);
  return it == per_class.end() ? global_tau : it->second;
}

Calibration calibrate_tau(std::span<const PairRecord> records, double max_false_merge, std::size_t min_class_pairs) {
  if (!(max_false_merge >= 0.0 && max_false_merge <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "max_false_merge must lie in [0, 1]");
  }
  if (records.empty()) {
    throw Error(ErrorCode::InsufficientData, "no pair records to calibrate on");
  }
  std::vector<double> all;
  std::map<int, std::vector<double>> by_class;
  for (const auto& r : records) {
    all.push_back(r.sym_kl);
    if (r.same_class && r.class_a != 0) {
      by_class[r.class_a].push_back(r.sym_kl);
    }
  }
  Calibration cal;
  cal.pairs_used = all.size();
  cal.global_tau = largest_admissible(std::move(all), max_false_merge);
  for (auto& [cls, values] : by_class) {
    if (values.size() >= min_class_pairs) {
      cal.per_class[cls] = largest_admissible(std::move(values), max_false_merge);
    }
  }
  return cal;
}

}  // namespace distrep::harness
