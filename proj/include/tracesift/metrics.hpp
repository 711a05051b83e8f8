#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "tracesift/errors.hpp"
#include "tracesift/features.hpp"
#include "tracesift/ocsvm.hpp"

namespace tsift {

// Abnormal (-1) is the positive class throughout.
struct confusion {
  std::size_t tp = 0; // abnormal flagged abnormal
  std::size_t fp = 0; // normal flagged abnormal
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t abnormals() const { return tp + fn; }
  std::size_t normals() const { return fp + tn; }
};

inline confusion tally(std::span<const int> actual, std::span<const int> predicted) {
  if (actual.size() != predicted.size())
    throw error(errc::length_mismatch, "label and prediction counts differ");
  confusion c;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const bool is_abnormal = actual[i] < 0;
    const bool flagged = predicted[i] < 0;
    if (is_abnormal)
      flagged ? ++c.tp : ++c.fn;
    else
      flagged ? ++c.fp : ++c.tn;
  }
  return c;
}

struct class_rates {
  double detection_rate = 0.0;   // tp / (tp + fn)
  double false_alarm_rate = 0.0; // fp / (fp + tn)
  std::optional<double> precision; // absent when nothing was flagged
};

inline class_rates rates(const confusion& c) {
  if (c.abnormals() == 0) throw error(errc::empty_class, "no abnormal rows to measure");
  if (c.normals() == 0) throw error(errc::empty_class, "no normal rows to measure");
  class_rates r;
  r.detection_rate = static_cast<double>(c.tp) / static_cast<double>(c.abnormals());
  r.false_alarm_rate = static_cast<double>(c.fp) / static_cast<double>(c.normals());
  if (c.tp + c.fp > 0) r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  return r;
}

// F1 from the two rates and the class sizes; algebraically identical to
// 2tp / (2tp + fp + fn). Zero detection rate means zero F1.
inline double f1_measure(double dr, double far, std::size_t n_normal, std::size_t n_abnormal) {
  if (n_abnormal == 0) throw error(errc::empty_class, "no abnormal rows to measure");
  if (dr <= 0.0) return 0.0;
  const double ratio = static_cast<double>(n_normal) / static_cast<double>(n_abnormal);
  return 2.0 / (1.0 + 1.0 / dr + (far / dr) * ratio);
}

inline double f1_from_confusion(const confusion& c) {
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

// Majority vote over per-detector verdicts; a tie counts as normal.
inline int majority_vote(std::span<const int> votes) {
  int sum = 0;
  for (int v : votes) sum += v < 0 ? -1 : +1;
  return sum < 0 ? -1 : +1;
}

struct roc_point {
  double far = 0.0;
  double dr = 0.0;
  double threshold = 0.0;
};

struct roc_result {
  std::vector<roc_point> points; // ascending far, includes (0,0) and (1,1)
  double auc = 0.0;
};

// Sweeps the decision-value axis: a row is flagged abnormal when its value
// falls below the threshold. Every distinct value is tried once.
inline roc_result sweep_roc(std::span<const double> decisions, std::span<const int> labels) {
  if (decisions.size() != labels.size())
    throw error(errc::length_mismatch, "decision and label counts differ");
  std::size_t n_abnormal = 0, n_normal = 0;
  for (int l : labels) (l < 0 ? n_abnormal : n_normal)++;
  if (n_abnormal == 0 || n_normal == 0)
    throw error(errc::single_class, "ROC needs both classes present");

  std::vector<double> thresholds(decisions.begin(), decisions.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  roc_result result;
  result.points.push_back({0.0, 0.0, -std::numeric_limits<double>::infinity()});
  for (double t : thresholds) {
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
      if (decisions[i] < t) (labels[i] < 0 ? tp : fp)++;
    }
    roc_point p;
    p.threshold = t;
    p.dr = static_cast<double>(tp) / static_cast<double>(n_abnormal);
    p.far = static_cast<double>(fp) / static_cast<double>(n_normal);
    result.points.push_back(p);
  }
  result.points.push_back({1.0, 1.0, std::numeric_limits<double>::infinity()});

  std::sort(result.points.begin(), result.points.end(), [](const roc_point& a, const roc_point& b) {
    if (a.far != b.far) return a.far < b.far;
    return a.dr < b.dr;
  });
  result.points.erase(std::unique(result.points.begin(), result.points.end(),
                                  [](const roc_point& a, const roc_point& b) {
                                    return a.far == b.far && a.dr == b.dr;
                                  }),
                      result.points.end());

  double auc = 0.0;
  for (std::size_t i = 1; i < result.points.size(); ++i) {
    const auto& a = result.points[i - 1];
    const auto& b = result.points[i];
    auc += (b.far - a.far) * (a.dr + b.dr) * 0.5;
  }
  result.auc = auc;
  return result;
}

inline std::vector<double> decision_values(const ocsvm_model& model, const feature_matrix& data) {
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = decision_value(model, data.rows[i].values);
  return out;
}

inline confusion evaluate_model(const ocsvm_model& model, const feature_matrix& data) {
  std::vector<int> actual(data.size()), predicted(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    actual[i] = data.rows[i].label;
    predicted[i] = predict(model, data.rows[i].values);
  }
  return tally(actual, predicted);
}

} // namespace tsift
