#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "windtwin/timeseries.hpp"

namespace windtwin {

enum class ModelKind { persistence, dnn, lstm };

std::string model_kind_name(ModelKind k);

struct AdamHyper {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> m;  // first moment
  std::vector<double> v;  // second moment
  long long t = 0;        // completed steps

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// Standard bias-corrected Adam update, in place.
void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               const AdamHyper& hyper);

struct TrainingConfig {
  int lag = 4;                          // DNN input window [h]
  std::vector<int> layer_units{5, 3, 1};  // DNN layer sizes / LSTM cells + head
  int batch_size = 64;
  double validation_fraction = 0.10;
  AdamHyper adam;
  int patience = 10;   // epochs without validation improvement before stopping
  int max_epochs = 200;
  int lstm_warmup_h = 24;  // LSTM training/rollout sequence length
  std::uint64_t seed = 1;
};

// One-step-ahead supervised windows in kW, oldest-to-newest inputs. Windows
// touching a missing hour are dropped. The last rows (chronologically) form
// the validation split.
struct SupervisedDataset {
  int lag = 0;
  std::vector<std::vector<double>> inputs;
  std::vector<double> targets;
  std::size_t train_count = 0;

  std::size_t size() const { return targets.size(); }
};

SupervisedDataset make_supervised(const TimeSeries& hourly_power, int lag,
                                  double validation_fraction);

struct ForecastModel {
  ModelKind kind = ModelKind::persistence;
  int input_window = 0;        // DNN lag / LSTM warm-up length
  std::vector<int> units;      // layer sizes, output last
  std::vector<double> params;  // flattened, layer order (see ddm.cpp)
  double scale = 1.0;          // normalization: rated power [kW]
  std::uint64_t seed = 0;
  TrainingConfig config;
};

// Loss and gradient of the batch-mean squared error over normalized samples.
// Exposed for the finite-difference validation and the data-flow tests.
struct LossGrad {
  double loss = 0.0;
  std::vector<double> grads;
};

LossGrad loss_and_gradient(const ForecastModel& model,
                           const std::vector<std::vector<double>>& inputs,
                           const std::vector<double>& targets);

// Forward pass on one normalized input window; returns the normalized
// one-step prediction.
double forward_one(const ForecastModel& model, const std::vector<double>& input);

// Deterministic weight initialization, uniform +-sqrt(6/(fan_in+fan_out)),
// biases zero.
ForecastModel init_model(ModelKind kind, const TrainingConfig& config, double scale);

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  ForecastModel model;             // best-validation parameters restored
  std::vector<EpochLog> log;
  std::vector<double> final_params;  // parameters when training stopped
  int best_epoch = 0;
};

// Trains a DNN or LSTM from scratch. Dataset values are kW; `scale` (rated
// power) normalizes them. Stops at max_epochs or when validation loss has
// not improved for more than `patience` epochs; best parameters restored.
// Throws NumericError naming the epoch if the loss turns non-finite.
TrainResult train(const SupervisedDataset& data, ModelKind kind, const TrainingConfig& config,
                  double scale);

// The last measured value at or before t0, repeated `horizon` times.
std::vector<double> persistence_forecast(const TimeSeries& hourly_power, Timestamp t0,
                                         int horizon);

// Iterative multi-step forecast: each step feeds the previous prediction
// back as the newest input. Outputs in kW, clamped to [0, scale].
std::vector<double> rollout(const ForecastModel& model, const std::vector<double>& history_kw,
                            int horizon);

// Central finite differences (step 1e-5) against the analytic gradients for
// every parameter; returns the max relative error.
double gradient_check(ModelKind kind, const TrainingConfig& config, int batch_count,
                      std::uint64_t seed);

void save_model(const ForecastModel& model, const std::filesystem::path& path);
ForecastModel load_model(const std::filesystem::path& path);

nlohmann::json training_config_to_json(const TrainingConfig& c);
TrainingConfig training_config_from_json(const nlohmann::json& j);

}  // namespace windtwin
