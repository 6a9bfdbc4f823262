#include "windtwin/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "windtwin/csv.hpp"
#include "windtwin/errors.hpp"

namespace windtwin {

std::size_t PredictionMatrix::entry_count() const {
  std::size_t n = 0;
  for (const auto& [lead, entries] : by_lead) n += entries.size();
  return n;
}

double nrmse(const std::vector<double>& predictions, const std::vector<double>& actuals,
             double normalizer) {
  if (predictions.size() != actuals.size()) {
    throw ValidationError("nrmse: prediction/actual length mismatch");
  }
  if (normalizer <= 0.0) throw ConfigError("nrmse: normalizer must be > 0");
  double sq = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!std::isfinite(actuals[i])) continue;  // missing actuals dropped
    const double e = predictions[i] - actuals[i];
    sq += e * e;
    ++n;
  }
  if (n == 0) throw ValidationError("nrmse: zero usable pairs");
  return std::sqrt(sq / static_cast<double>(n)) / normalizer;
}

LeadTimeReport evaluate_by_lead(const PredictionMatrix& matrix, const MeasuredSeries& measured,
                                double normalizer) {
  if (normalizer <= 0.0) throw ConfigError("evaluate_by_lead: normalizer must be > 0");
  LeadTimeReport report;
  report.model_id = matrix.model_id;
  report.scope = matrix.scope;
  for (const auto& [lead, entries] : matrix.by_lead) {
    double sq = 0.0;
    std::size_t n = 0;
    for (const auto& [target, pred] : entries) {
      const auto it = measured.find(target);
      if (it == measured.end()) continue;
      const double e = pred - it->second;
      sq += e * e;
      ++n;
    }
    if (n == 0) continue;
    report.nrmse[lead] = std::sqrt(sq / static_cast<double>(n)) / normalizer;
    report.counts[lead] = n;
  }
  if (report.nrmse.empty()) {
    throw ValidationError("evaluate_by_lead: no overlap between predictions and measurements (" +
                          matrix.model_id + ", " + matrix.scope + ")");
  }
  return report;
}

PredictionMatrix farm_aggregate(const std::vector<PredictionMatrix>& turbine_matrices) {
  if (turbine_matrices.empty()) throw ValidationError("farm_aggregate: no matrices");
  PredictionMatrix farm;
  farm.model_id = turbine_matrices.front().model_id;
  farm.scope = kFarmScope;
  for (const auto& m : turbine_matrices) {
    if (m.model_id != farm.model_id) {
      throw ValidationError("farm_aggregate: mixed model ids (" + m.model_id + " vs " +
                            farm.model_id + ")");
    }
  }
  const PredictionMatrix& first = turbine_matrices.front();
  for (const auto& [lead, entries] : first.by_lead) {
    for (const auto& [target, value] : entries) {
      double sum = value;
      bool complete = true;
      for (std::size_t i = 1; i < turbine_matrices.size(); ++i) {
        const auto lit = turbine_matrices[i].by_lead.find(lead);
        if (lit == turbine_matrices[i].by_lead.end()) {
          complete = false;
          break;
        }
        const auto tit = lit->second.find(target);
        if (tit == lit->second.end()) {
          complete = false;
          break;
        }
        sum += tit->second;
      }
      if (complete) farm.by_lead[lead][target] = sum;
    }
  }
  return farm;
}

MeasuredSeries sum_measured(const std::vector<MeasuredSeries>& turbine_series) {
  if (turbine_series.empty()) return {};
  MeasuredSeries farm;
  for (const auto& [t, v] : turbine_series.front()) {
    double sum = v;
    bool complete = true;
    for (std::size_t i = 1; i < turbine_series.size(); ++i) {
      const auto it = turbine_series[i].find(t);
      if (it == turbine_series[i].end()) {
        complete = false;
        break;
      }
      sum += it->second;
    }
    if (complete) farm[t] = sum;
  }
  return farm;
}

namespace {

// Quantile by linear interpolation of order statistics (position (n-1)q).
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = q * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::map<int, SpreadRow> turbine_spread(const std::vector<LeadTimeReport>& reports) {
  std::map<int, std::vector<double>> values;
  for (const auto& r : reports) {
    for (const auto& [lead, score] : r.nrmse) values[lead].push_back(score);
  }
  std::map<int, SpreadRow> out;
  for (auto& [lead, v] : values) {
    std::sort(v.begin(), v.end());
    SpreadRow row;
    row.min = v.front();
    row.q1 = quantile_sorted(v, 0.25);
    row.median = quantile_sorted(v, 0.50);
    row.q3 = quantile_sorted(v, 0.75);
    row.max = v.back();
    out[lead] = row;
  }
  return out;
}

HybridSchedule select_hybrid(const std::vector<LeadTimeReport>& farm_reports,
                             const std::vector<std::string>& priority, int lead_min, int lead_max,
                             const std::string& selection_label) {
  auto rank = [&priority](const std::string& id) {
    for (std::size_t i = 0; i < priority.size(); ++i) {
      if (priority[i] == id) return i;
    }
    return priority.size();
  };
  HybridSchedule schedule;
  schedule.selection_label = selection_label;
  std::vector<int> uncovered;
  for (int lead = lead_min; lead <= lead_max; ++lead) {
    const LeadTimeReport* best = nullptr;
    for (const auto& r : farm_reports) {
      const auto it = r.nrmse.find(lead);
      if (it == r.nrmse.end()) continue;
      if (!best) {
        best = &r;
        continue;
      }
      const double cur = it->second;
      const double best_score = best->nrmse.at(lead);
      if (cur < best_score ||
          (cur == best_score && rank(r.model_id) < rank(best->model_id))) {
        best = &r;
      }
    }
    if (!best) {
      uncovered.push_back(lead);
      continue;
    }
    schedule.model_by_lead[lead] = best->model_id;
    schedule.score_by_lead[lead] = best->nrmse.at(lead);
  }
  if (!uncovered.empty()) {
    std::string list;
    for (int lead : uncovered) list += (list.empty() ? "" : ", ") + std::to_string(lead);
    throw ValidationError("select_hybrid: no model covers leads " + list);
  }
  return schedule;
}

namespace {

void write_comments(std::ofstream& out, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << "\n";
}

}  // namespace

void write_report_csv(const std::filesystem::path& path,
                      const std::vector<LeadTimeReport>& reports,
                      const std::vector<std::string>& header_comment) {
  auto out = open_output(path);
  write_comments(out, header_comment);
  out << "lead,model,nrmse,count\n";
  for (const auto& r : reports) {
    for (const auto& [lead, score] : r.nrmse) {
      out << lead << ',' << r.model_id << ',' << fmt_g6(score) << ',' << r.counts.at(lead)
          << "\n";
    }
  }
}

void write_spread_csv(const std::filesystem::path& path, const std::map<int, SpreadRow>& spread,
                      const std::vector<std::string>& header_comment) {
  auto out = open_output(path);
  write_comments(out, header_comment);
  out << "lead,min,q1,median,q3,max\n";
  for (const auto& [lead, row] : spread) {
    out << lead << ',' << fmt_g6(row.min) << ',' << fmt_g6(row.q1) << ',' << fmt_g6(row.median)
        << ',' << fmt_g6(row.q3) << ',' << fmt_g6(row.max) << "\n";
  }
}

void write_schedule_csv(const std::filesystem::path& path, const HybridSchedule& schedule,
                        const std::vector<std::string>& header_comment) {
  auto out = open_output(path);
  write_comments(out, header_comment);
  out << "lead,model\n";
  for (const auto& [lead, model] : schedule.model_by_lead) {
    out << lead << ',' << model << "\n";
  }
}

}  // namespace windtwin
