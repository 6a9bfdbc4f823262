#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "windtwin/time.hpp"

namespace windtwin {

inline constexpr const char* kFarmScope = "FARM";

// Predicted power per (target time, lead).
struct PredictionMatrix {
  std::string model_id;
  std::string scope;  // turbine id or FARM
  std::map<int, std::map<Timestamp, double>> by_lead;  // lead [h] -> target -> kW

  std::size_t entry_count() const;
};

// Measured hourly power; absent hours are missing.
using MeasuredSeries = std::map<Timestamp, double>;

struct LeadTimeReport {
  std::string model_id;
  std::string scope;
  std::map<int, double> nrmse;           // per lead
  std::map<int, std::size_t> counts;     // usable pairs per lead
};

// sqrt(mean squared error) / normalizer over pairs with present actuals.
double nrmse(const std::vector<double>& predictions, const std::vector<double>& actuals,
             double normalizer);

// One NRMSE per lead over all targets with both prediction and measurement.
// Leads with zero usable pairs are omitted; throws when nothing overlaps.
LeadTimeReport evaluate_by_lead(const PredictionMatrix& matrix, const MeasuredSeries& measured,
                                double normalizer);

// Entrywise sum across turbines; a missing turbine entry at (t, L) voids the
// farm entry. All matrices must belong to the same model.
PredictionMatrix farm_aggregate(const std::vector<PredictionMatrix>& turbine_matrices);

// Farm measured series: per-hour sum where every turbine is present.
MeasuredSeries sum_measured(const std::vector<MeasuredSeries>& turbine_series);

struct SpreadRow {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

// Across-turbine order statistics per lead; quartiles by linear
// interpolation of order statistics.
std::map<int, SpreadRow> turbine_spread(const std::vector<LeadTimeReport>& reports);

struct HybridSchedule {
  std::map<int, std::string> model_by_lead;
  std::map<int, double> score_by_lead;  // selection-period NRMSE of the pick
  std::string selection_label;
};

// Per lead, the model with minimal NRMSE; ties broken by the earlier entry
// of `priority`. Every lead in [lead_min, lead_max] must be covered.
HybridSchedule select_hybrid(const std::vector<LeadTimeReport>& farm_reports,
                             const std::vector<std::string>& priority, int lead_min, int lead_max,
                             const std::string& selection_label);

// Plot-ready CSVs: per-scope report (lead,model,nrmse,count), per-model
// spread (lead,min,q1,median,q3,max), schedule (lead,model). Floats at 6
// significant digits. `header_comment` lines (without '#') are prepended.
void write_report_csv(const std::filesystem::path& path,
                      const std::vector<LeadTimeReport>& reports,
                      const std::vector<std::string>& header_comment);
void write_spread_csv(const std::filesystem::path& path, const std::map<int, SpreadRow>& spread,
                      const std::vector<std::string>& header_comment);
void write_schedule_csv(const std::filesystem::path& path, const HybridSchedule& schedule,
                        const std::vector<std::string>& header_comment);

}  // namespace windtwin
