#include "windtwin/ddm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

#include "windtwin/csv.hpp"
#include "windtwin/errors.hpp"

namespace windtwin {

using nlohmann::json;

std::string model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::persistence: return "persistence";
    case ModelKind::dnn: return "dnn";
    case ModelKind::lstm: return "lstm";
  }
  return "?";
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               const AdamHyper& hyper) {
  if (params.size() != grads.size() || state.m.size() != params.size()) {
    throw NumericError("adam_step: shape mismatch");
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * grads[i];
    state.v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= hyper.learning_rate * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
  }
}

SupervisedDataset make_supervised(const TimeSeries& hourly_power, int lag,
                                  double validation_fraction) {
  if (lag < 1) throw ConfigError("make_supervised: lag must be >= 1");
  if (validation_fraction <= 0.0 || validation_fraction >= 1.0) {
    throw ConfigError("make_supervised: validation fraction must be in (0, 1)");
  }
  const auto& s = hourly_power.samples;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i].timestamp - s[i - 1].timestamp != kSecondsPerHour) {
      throw ValidationError("make_supervised: series is not hourly-equidistant");
    }
  }
  SupervisedDataset out;
  out.lag = lag;
  const std::size_t ulag = static_cast<std::size_t>(lag);
  if (s.size() > ulag) {
    for (std::size_t i = 0; i + ulag < s.size(); ++i) {
      bool complete = true;
      for (std::size_t k = i; k <= i + ulag; ++k) {
        if (!s[k].value) {
          complete = false;
          break;
        }
      }
      if (!complete) continue;
      std::vector<double> window(ulag);
      for (std::size_t k = 0; k < ulag; ++k) window[k] = *s[i + k].value;
      out.inputs.push_back(std::move(window));
      out.targets.push_back(*s[i + ulag].value);
    }
  }
  const std::size_t n = out.size();
  if (n == 0) {
    throw ValidationError("make_supervised: no complete training window (need " +
                          std::to_string(lag + 1) + " consecutive present values)");
  }
  std::size_t n_val = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * validation_fraction));
  if (n >= 2) n_val = std::clamp<std::size_t>(n_val, 1, n - 1);
  out.train_count = n - n_val;
  return out;
}

// ---------------------------------------------------------------------------
// Parameter layout
//
// DNN with input L and units [u0..uk]: per layer W (out x in, row-major)
// then b (out). Hidden layers tanh, output linear.
//
// LSTM with units [u0..uk]: recurrent layers u0..u(k-1), head u(k-1) -> uk
// (uk must be 1). Per recurrent layer: W (4H x in), U (4H x H), b (4H) with
// gate order i, f, g, o; then the linear head W (1 x H), b (1).
// ---------------------------------------------------------------------------

namespace {

struct DnnLayout {
  struct Layer {
    int in = 0, out = 0;
    std::size_t w = 0, b = 0;  // offsets
  };
  std::vector<Layer> layers;
  std::size_t total = 0;
};

DnnLayout dnn_layout(int input, const std::vector<int>& units) {
  DnnLayout lay;
  std::size_t off = 0;
  int in = input;
  for (int u : units) {
    DnnLayout::Layer l;
    l.in = in;
    l.out = u;
    l.w = off;
    off += static_cast<std::size_t>(u) * in;
    l.b = off;
    off += static_cast<std::size_t>(u);
    lay.layers.push_back(l);
    in = u;
  }
  lay.total = off;
  return lay;
}

struct LstmLayout {
  struct Layer {
    int in = 0, hidden = 0;
    std::size_t w = 0, u = 0, b = 0;
  };
  std::vector<Layer> layers;
  std::size_t head_w = 0, head_b = 0;
  int head_in = 0;
  std::size_t total = 0;
};

LstmLayout lstm_layout(const std::vector<int>& units) {
  if (units.size() < 2 || units.back() != 1) {
    throw ConfigError("lstm: layer_units must end in a single output unit");
  }
  LstmLayout lay;
  std::size_t off = 0;
  int in = 1;  // one input per step
  for (std::size_t r = 0; r + 1 < units.size(); ++r) {
    LstmLayout::Layer l;
    l.in = in;
    l.hidden = units[r];
    l.w = off;
    off += static_cast<std::size_t>(4) * l.hidden * l.in;
    l.u = off;
    off += static_cast<std::size_t>(4) * l.hidden * l.hidden;
    l.b = off;
    off += static_cast<std::size_t>(4) * l.hidden;
    lay.layers.push_back(l);
    in = l.hidden;
  }
  lay.head_in = in;
  lay.head_w = off;
  off += static_cast<std::size_t>(in);
  lay.head_b = off;
  off += 1;
  lay.total = off;
  return lay;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Forward caches for one DNN sample.
struct DnnTrace {
  std::vector<std::vector<double>> act;  // per layer activation output
};

double dnn_forward(const std::vector<double>& p, const DnnLayout& lay,
                   const std::vector<double>& x, DnnTrace* trace) {
  std::vector<double> cur = x;
  if (trace) trace->act.clear();
  for (std::size_t li = 0; li < lay.layers.size(); ++li) {
    const auto& l = lay.layers[li];
    std::vector<double> next(static_cast<std::size_t>(l.out));
    for (int j = 0; j < l.out; ++j) {
      double z = p[l.b + j];
      const double* w = &p[l.w + static_cast<std::size_t>(j) * l.in];
      for (int k = 0; k < l.in; ++k) z += w[k] * cur[k];
      next[j] = (li + 1 < lay.layers.size()) ? std::tanh(z) : z;
    }
    if (trace) trace->act.push_back(next);
    cur = std::move(next);
  }
  return cur[0];
}

void dnn_backward(const std::vector<double>& p, const DnnLayout& lay,
                  const std::vector<double>& x, const DnnTrace& trace, double dy,
                  std::vector<double>& grads) {
  std::vector<double> delta{dy};
  for (std::size_t li = lay.layers.size(); li-- > 0;) {
    const auto& l = lay.layers[li];
    const std::vector<double>& input = (li == 0) ? x : trace.act[li - 1];
    for (int j = 0; j < l.out; ++j) {
      grads[l.b + j] += delta[j];
      double* gw = &grads[l.w + static_cast<std::size_t>(j) * l.in];
      for (int k = 0; k < l.in; ++k) gw[k] += delta[j] * input[k];
    }
    if (li == 0) break;
    std::vector<double> prev(static_cast<std::size_t>(l.in), 0.0);
    for (int j = 0; j < l.out; ++j) {
      const double* w = &p[l.w + static_cast<std::size_t>(j) * l.in];
      for (int k = 0; k < l.in; ++k) prev[k] += w[k] * delta[j];
    }
    const std::vector<double>& a = trace.act[li - 1];
    for (int k = 0; k < l.in; ++k) prev[k] *= 1.0 - a[k] * a[k];
    delta = std::move(prev);
  }
}

// Per-step caches for one LSTM layer over a sequence.
struct LstmTrace {
  // [t][unit]
  std::vector<std::vector<double>> x, h_prev, c_prev, gi, gf, gg, go, c, tc, h;
};

// Runs one layer over the whole sequence; xs[t] is the input vector at t.
void lstm_layer_forward(const std::vector<double>& p, const LstmLayout::Layer& l,
                        const std::vector<std::vector<double>>& xs, LstmTrace& tr) {
  const int H = l.hidden;
  const int T = static_cast<int>(xs.size());
  tr.x = xs;
  tr.h_prev.assign(T, {});
  tr.c_prev.assign(T, {});
  tr.gi.assign(T, std::vector<double>(H));
  tr.gf.assign(T, std::vector<double>(H));
  tr.gg.assign(T, std::vector<double>(H));
  tr.go.assign(T, std::vector<double>(H));
  tr.c.assign(T, std::vector<double>(H));
  tr.tc.assign(T, std::vector<double>(H));
  tr.h.assign(T, std::vector<double>(H));
  std::vector<double> h(H, 0.0), c(H, 0.0);
  for (int t = 0; t < T; ++t) {
    tr.h_prev[t] = h;
    tr.c_prev[t] = c;
    for (int j = 0; j < H; ++j) {
      double a[4];
      for (int g = 0; g < 4; ++g) {
        const int row = g * H + j;
        double z = p[l.b + row];
        const double* w = &p[l.w + static_cast<std::size_t>(row) * l.in];
        for (int k = 0; k < l.in; ++k) z += w[k] * xs[t][k];
        const double* u = &p[l.u + static_cast<std::size_t>(row) * H];
        for (int k = 0; k < H; ++k) z += u[k] * h[k];
        a[g] = z;
      }
      const double i_g = sigmoid(a[0]);
      const double f_g = sigmoid(a[1]);
      const double g_g = std::tanh(a[2]);
      const double o_g = sigmoid(a[3]);
      const double c_new = f_g * c[j] + i_g * g_g;
      tr.gi[t][j] = i_g;
      tr.gf[t][j] = f_g;
      tr.gg[t][j] = g_g;
      tr.go[t][j] = o_g;
      tr.c[t][j] = c_new;
      tr.tc[t][j] = std::tanh(c_new);
      tr.h[t][j] = o_g * tr.tc[t][j];
    }
    c = tr.c[t];
    h = tr.h[t];
  }
}

// Backprop through time for one layer. dh_ext[t] holds gradients flowing
// into h_t from outside (upper layer or head). Writes input gradients into
// dx_out[t] when given.
void lstm_layer_backward(const std::vector<double>& p, const LstmLayout::Layer& l,
                         const LstmTrace& tr, const std::vector<std::vector<double>>& dh_ext,
                         std::vector<double>& grads,
                         std::vector<std::vector<double>>* dx_out) {
  const int H = l.hidden;
  const int T = static_cast<int>(tr.h.size());
  std::vector<double> dh_acc(H, 0.0), dc_acc(H, 0.0);
  std::vector<double> da(static_cast<std::size_t>(4) * H);
  for (int t = T - 1; t >= 0; --t) {
    for (int j = 0; j < H; ++j) {
      const double dh = dh_acc[j] + dh_ext[t][j];
      const double i_g = tr.gi[t][j], f_g = tr.gf[t][j], g_g = tr.gg[t][j], o_g = tr.go[t][j];
      const double tc = tr.tc[t][j];
      const double do_g = dh * tc;
      const double dc = dh * o_g * (1.0 - tc * tc) + dc_acc[j];
      const double di = dc * g_g;
      const double df = dc * tr.c_prev[t][j];
      const double dg = dc * i_g;
      dc_acc[j] = dc * f_g;
      da[0 * H + j] = di * i_g * (1.0 - i_g);
      da[1 * H + j] = df * f_g * (1.0 - f_g);
      da[2 * H + j] = dg * (1.0 - g_g * g_g);
      da[3 * H + j] = do_g * o_g * (1.0 - o_g);
    }
    for (int row = 0; row < 4 * H; ++row) {
      const double d = da[row];
      grads[l.b + row] += d;
      double* gw = &grads[l.w + static_cast<std::size_t>(row) * l.in];
      for (int k = 0; k < l.in; ++k) gw[k] += d * tr.x[t][k];
      double* gu = &grads[l.u + static_cast<std::size_t>(row) * H];
      for (int k = 0; k < H; ++k) gu[k] += d * tr.h_prev[t][k];
    }
    if (dx_out) {
      std::vector<double>& dx = (*dx_out)[t];
      dx.assign(static_cast<std::size_t>(l.in), 0.0);
      for (int row = 0; row < 4 * H; ++row) {
        const double d = da[row];
        const double* w = &p[l.w + static_cast<std::size_t>(row) * l.in];
        for (int k = 0; k < l.in; ++k) dx[k] += d * w[k];
      }
    }
    std::fill(dh_acc.begin(), dh_acc.end(), 0.0);
    for (int row = 0; row < 4 * H; ++row) {
      const double d = da[row];
      const double* u = &p[l.u + static_cast<std::size_t>(row) * H];
      for (int k = 0; k < H; ++k) dh_acc[k] += d * u[k];
    }
  }
}

// Full LSTM forward for one normalized sequence; returns prediction and
// fills traces.
double lstm_forward(const std::vector<double>& p, const LstmLayout& lay,
                    const std::vector<double>& sequence, std::vector<LstmTrace>* traces) {
  const int T = static_cast<int>(sequence.size());
  std::vector<std::vector<double>> input(T);
  for (int t = 0; t < T; ++t) input[t] = {sequence[t]};
  std::vector<LstmTrace> local;
  std::vector<LstmTrace>& trs = traces ? *traces : local;
  trs.assign(lay.layers.size(), {});
  for (std::size_t r = 0; r < lay.layers.size(); ++r) {
    lstm_layer_forward(p, lay.layers[r], input, trs[r]);
    input = trs[r].h;
  }
  const auto& h_top = trs.back().h.back();
  double y = p[lay.head_b];
  for (int k = 0; k < lay.head_in; ++k) y += p[lay.head_w + k] * h_top[k];
  return y;
}

void lstm_backward(const std::vector<double>& p, const LstmLayout& lay,
                   const std::vector<LstmTrace>& trs, double dy, std::vector<double>& grads) {
  const int T = static_cast<int>(trs.front().h.size());
  const auto& h_top = trs.back().h.back();
  grads[lay.head_b] += dy;
  for (int k = 0; k < lay.head_in; ++k) grads[lay.head_w + k] += dy * h_top[k];

  std::vector<std::vector<double>> dh_ext(
      static_cast<std::size_t>(T), std::vector<double>(lay.layers.back().hidden, 0.0));
  for (int k = 0; k < lay.head_in; ++k) dh_ext[T - 1][k] = dy * p[lay.head_w + k];

  for (std::size_t r = lay.layers.size(); r-- > 0;) {
    std::vector<std::vector<double>> dx(static_cast<std::size_t>(T));
    lstm_layer_backward(p, lay.layers[r], trs[r], dh_ext, grads, r > 0 ? &dx : nullptr);
    if (r > 0) dh_ext = std::move(dx);
  }
}

double glorot_range(int fan_in, int fan_out) {
  return std::sqrt(6.0 / (fan_in + fan_out));
}

}  // namespace

ForecastModel init_model(ModelKind kind, const TrainingConfig& config, double scale) {
  if (scale <= 0.0) throw ConfigError("init_model: normalization scale must be > 0");
  if (config.layer_units.empty() || config.layer_units.back() != 1) {
    throw ConfigError("init_model: layer_units must end in a single output unit");
  }
  ForecastModel m;
  m.kind = kind;
  m.units = config.layer_units;
  m.scale = scale;
  m.seed = config.seed;
  m.config = config;
  std::mt19937_64 rng(config.seed);
  auto uniform = [&rng](double r) {
    std::uniform_real_distribution<double> dist(-r, r);
    return [&rng, dist]() mutable { return dist(rng); };
  };
  if (kind == ModelKind::persistence) {
    m.input_window = 1;
    return m;
  }
  if (kind == ModelKind::dnn) {
    m.input_window = config.lag;
    const DnnLayout lay = dnn_layout(config.lag, m.units);
    m.params.assign(lay.total, 0.0);
    for (const auto& l : lay.layers) {
      auto draw = uniform(glorot_range(l.in, l.out));
      for (std::size_t i = 0; i < static_cast<std::size_t>(l.out) * l.in; ++i) {
        m.params[l.w + i] = draw();
      }
    }
    return m;
  }
  m.input_window = config.lstm_warmup_h;
  const LstmLayout lay = lstm_layout(m.units);
  m.params.assign(lay.total, 0.0);
  for (const auto& l : lay.layers) {
    auto draw_w = uniform(glorot_range(l.in, l.hidden));
    for (std::size_t i = 0; i < static_cast<std::size_t>(4) * l.hidden * l.in; ++i) {
      m.params[l.w + i] = draw_w();
    }
    auto draw_u = uniform(glorot_range(l.hidden, l.hidden));
    for (std::size_t i = 0; i < static_cast<std::size_t>(4) * l.hidden * l.hidden; ++i) {
      m.params[l.u + i] = draw_u();
    }
  }
  auto draw_h = uniform(glorot_range(lay.head_in, 1));
  for (int k = 0; k < lay.head_in; ++k) m.params[lay.head_w + k] = draw_h();
  return m;
}

double forward_one(const ForecastModel& model, const std::vector<double>& input) {
  if (model.kind == ModelKind::lstm) {
    // any sequence length; the cells carry state across the steps
    if (input.empty()) throw NumericError("forward_one: empty sequence");
    return lstm_forward(model.params, lstm_layout(model.units), input, nullptr);
  }
  if (static_cast<int>(input.size()) != model.input_window) {
    throw NumericError("forward_one: input length does not match the model window");
  }
  if (model.kind == ModelKind::dnn) {
    return dnn_forward(model.params, dnn_layout(model.input_window, model.units), input, nullptr);
  }
  return input.back();  // persistence
}

LossGrad loss_and_gradient(const ForecastModel& model,
                           const std::vector<std::vector<double>>& inputs,
                           const std::vector<double>& targets) {
  if (inputs.size() != targets.size() || inputs.empty()) {
    throw NumericError("loss_and_gradient: empty or mismatched batch");
  }
  LossGrad out;
  out.grads.assign(model.params.size(), 0.0);
  const double bn = static_cast<double>(inputs.size());
  if (model.kind == ModelKind::dnn) {
    const DnnLayout lay = dnn_layout(model.input_window, model.units);
    DnnTrace trace;
    for (std::size_t s = 0; s < inputs.size(); ++s) {
      const double y = dnn_forward(model.params, lay, inputs[s], &trace);
      const double err = y - targets[s];
      out.loss += err * err / bn;
      dnn_backward(model.params, lay, inputs[s], trace, 2.0 * err / bn, out.grads);
    }
    return out;
  }
  if (model.kind == ModelKind::lstm) {
    const LstmLayout lay = lstm_layout(model.units);
    std::vector<LstmTrace> traces;
    for (std::size_t s = 0; s < inputs.size(); ++s) {
      const double y = lstm_forward(model.params, lay, inputs[s], &traces);
      const double err = y - targets[s];
      out.loss += err * err / bn;
      lstm_backward(model.params, lay, traces, 2.0 * err / bn, out.grads);
    }
    return out;
  }
  throw ConfigError("loss_and_gradient: persistence has no parameters");
}

TrainResult train(const SupervisedDataset& data, ModelKind kind, const TrainingConfig& config,
                  double scale) {
  if (kind != ModelKind::dnn && kind != ModelKind::lstm) {
    throw ConfigError("train: only dnn and lstm are trainable");
  }
  if (data.size() == 0) throw ValidationError("train: empty dataset");
  if (config.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");

  TrainResult result;
  result.model = init_model(kind, config, scale);
  const int window = result.model.input_window;
  if (data.lag != window) {
    throw ConfigError("train: dataset lag " + std::to_string(data.lag) +
                      " does not match the model window " + std::to_string(window));
  }

  // Normalize once.
  std::vector<std::vector<double>> inputs(data.inputs);
  std::vector<double> targets(data.targets);
  for (auto& w : inputs) {
    for (double& v : w) v /= scale;
  }
  for (double& t : targets) t /= scale;

  const std::size_t n_train = data.train_count;
  std::vector<std::size_t> order(n_train);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  auto subset_loss = [&](std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double y = forward_one(result.model, inputs[i]);
      const double e = y - targets[i];
      acc += e * e;
    }
    return acc / static_cast<double>(end - begin);
  };

  AdamState adam(result.model.params.size());
  std::vector<double> best_params = result.model.params;
  double best_val = std::numeric_limits<double>::infinity();
  int epochs_since_best = 0;
  const bool has_val = n_train < data.size();

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double train_sq = 0.0;
    for (std::size_t start = 0; start < n_train; start += config.batch_size) {
      const std::size_t stop = std::min(n_train, start + config.batch_size);
      std::vector<std::vector<double>> bx;
      std::vector<double> bt;
      bx.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        bx.push_back(inputs[order[i]]);
        bt.push_back(targets[order[i]]);
      }
      const LossGrad lg = loss_and_gradient(result.model, bx, bt);
      train_sq += lg.loss * static_cast<double>(stop - start);
      adam_step(result.model.params, lg.grads, adam, config.adam);
    }
    const double train_loss = train_sq / static_cast<double>(n_train);
    const double val_loss = has_val ? subset_loss(n_train, data.size()) : train_loss;
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
      throw NumericError("train: loss diverged at epoch " + std::to_string(epoch));
    }
    result.log.push_back({epoch, train_loss, val_loss});
    if (val_loss < best_val) {
      best_val = val_loss;
      best_params = result.model.params;
      result.best_epoch = epoch;
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best > config.patience) break;
    }
  }
  result.final_params = result.model.params;
  result.model.params = best_params;
  return result;
}

std::vector<double> persistence_forecast(const TimeSeries& hourly_power, Timestamp t0,
                                         int horizon) {
  const auto last = value_at(hourly_power, t0, QueryMode::realtime);
  if (!last) throw ValidationError("persistence_forecast: no measured value at or before t0");
  return std::vector<double>(static_cast<std::size_t>(horizon), *last);
}

std::vector<double> rollout(const ForecastModel& model, const std::vector<double>& history_kw,
                            int horizon) {
  if (horizon < 0) throw ConfigError("rollout: negative horizon");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon));
  if (model.kind == ModelKind::persistence) {
    if (history_kw.empty()) throw ValidationError("rollout: empty history");
    const double v = std::clamp(history_kw.back(), 0.0, model.scale);
    out.assign(static_cast<std::size_t>(horizon), v);
    return out;
  }
  const std::size_t window = static_cast<std::size_t>(model.input_window);
  if (history_kw.size() < window) {
    throw ValidationError("rollout: history shorter than the model window");
  }
  std::vector<double> seq(history_kw.end() - window, history_kw.end());
  for (double& v : seq) v /= model.scale;

  if (model.kind == ModelKind::dnn) {
    for (int h = 0; h < horizon; ++h) {
      double y = forward_one(model, seq);
      y = std::clamp(y, 0.0, 1.0);
      out.push_back(y * model.scale);
      seq.erase(seq.begin());
      seq.push_back(y);
    }
    return out;
  }

  // LSTM: warm up on the history, then feed predictions back one at a time.
  const LstmLayout lay = lstm_layout(model.units);
  std::vector<std::vector<double>> h(lay.layers.size()), c(lay.layers.size());
  for (std::size_t r = 0; r < lay.layers.size(); ++r) {
    h[r].assign(lay.layers[r].hidden, 0.0);
    c[r].assign(lay.layers[r].hidden, 0.0);
  }
  auto step = [&](double x_in) {
    std::vector<double> xv{x_in};
    for (std::size_t r = 0; r < lay.layers.size(); ++r) {
      const auto& l = lay.layers[r];
      const int H = l.hidden;
      std::vector<double> hn(H), cn(H);
      for (int j = 0; j < H; ++j) {
        double a[4];
        for (int g = 0; g < 4; ++g) {
          const int row = g * H + j;
          double z = model.params[l.b + row];
          const double* w = &model.params[l.w + static_cast<std::size_t>(row) * l.in];
          for (int k = 0; k < l.in; ++k) z += w[k] * xv[k];
          const double* u = &model.params[l.u + static_cast<std::size_t>(row) * H];
          for (int k = 0; k < H; ++k) z += u[k] * h[r][k];
          a[g] = z;
        }
        const double i_g = sigmoid(a[0]);
        const double f_g = sigmoid(a[1]);
        const double g_g = std::tanh(a[2]);
        const double o_g = sigmoid(a[3]);
        cn[j] = f_g * c[r][j] + i_g * g_g;
        hn[j] = o_g * std::tanh(cn[j]);
      }
      h[r] = std::move(hn);
      c[r] = std::move(cn);
      xv = h[r];
    }
    double y = model.params[lay.head_b];
    for (int k = 0; k < lay.head_in; ++k) y += model.params[lay.head_w + k] * h.back()[k];
    return y;
  };
  double y = 0.0;
  for (double x : seq) y = step(x);
  for (int hz = 0; hz < horizon; ++hz) {
    y = std::clamp(y, 0.0, 1.0);
    out.push_back(y * model.scale);
    if (hz + 1 < horizon) y = step(y);
  }
  return out;
}

double gradient_check(ModelKind kind, const TrainingConfig& config, int batch_count,
                      std::uint64_t seed) {
  TrainingConfig cfg = config;
  cfg.seed = seed;
  ForecastModel model = init_model(kind, cfg, 1.0);
  std::mt19937_64 rng(seed ^ 0xda3e39cb94b95bdbULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> weight(-0.5, 0.5);
  for (double& p : model.params) p = weight(rng);

  const int window = model.input_window;
  std::vector<std::vector<double>> inputs;
  std::vector<double> targets;
  for (int b = 0; b < batch_count; ++b) {
    std::vector<double> w(static_cast<std::size_t>(window));
    for (double& v : w) v = unit(rng);
    inputs.push_back(std::move(w));
    targets.push_back(unit(rng));
  }

  const LossGrad analytic = loss_and_gradient(model, inputs, targets);
  const double step = 1e-5;
  double max_rel = 0.0;
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    const double keep = model.params[i];
    model.params[i] = keep + step;
    const double lp = loss_and_gradient(model, inputs, targets).loss;
    model.params[i] = keep - step;
    const double lm = loss_and_gradient(model, inputs, targets).loss;
    model.params[i] = keep;
    const double fd = (lp - lm) / (2.0 * step);
    const double ga = analytic.grads[i];
    if (std::abs(fd) < 1e-12 && std::abs(ga) < 1e-12) continue;
    const double rel = std::abs(ga - fd) / std::max(1e-8, std::abs(ga) + std::abs(fd));
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

static json adam_to_json(const AdamHyper& a) {
  return {{"learning_rate", a.learning_rate},
          {"beta1", a.beta1},
          {"beta2", a.beta2},
          {"epsilon", a.epsilon}};
}

static AdamHyper adam_from_json(const json& j) {
  AdamHyper a;
  a.learning_rate = j.at("learning_rate").get<double>();
  a.beta1 = j.at("beta1").get<double>();
  a.beta2 = j.at("beta2").get<double>();
  a.epsilon = j.at("epsilon").get<double>();
  return a;
}

json training_config_to_json(const TrainingConfig& c) {
  return {{"lag", c.lag},
          {"layer_units", c.layer_units},
          {"batch_size", c.batch_size},
          {"validation_fraction", c.validation_fraction},
          {"adam", adam_to_json(c.adam)},
          {"patience", c.patience},
          {"max_epochs", c.max_epochs},
          {"lstm_warmup_h", c.lstm_warmup_h},
          {"seed", c.seed}};
}

TrainingConfig training_config_from_json(const json& j) {
  TrainingConfig c;
  c.lag = j.at("lag").get<int>();
  c.layer_units = j.at("layer_units").get<std::vector<int>>();
  c.batch_size = j.at("batch_size").get<int>();
  c.validation_fraction = j.at("validation_fraction").get<double>();
  c.adam = adam_from_json(j.at("adam"));
  c.patience = j.at("patience").get<int>();
  c.max_epochs = j.at("max_epochs").get<int>();
  c.lstm_warmup_h = j.at("lstm_warmup_h").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

void save_model(const ForecastModel& model, const std::filesystem::path& path) {
  json j;
  j["kind"] = model_kind_name(model.kind);
  j["input_window"] = model.input_window;
  j["units"] = model.units;
  j["params"] = model.params;
  j["scale"] = model.scale;
  j["seed"] = model.seed;
  j["config"] = training_config_to_json(model.config);
  auto out = open_output(path);
  out << j.dump(2) << "\n";
}

ForecastModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("model " + path.string() + ": " + e.what());
  }
  ForecastModel m;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "persistence") {
    m.kind = ModelKind::persistence;
  } else if (kind == "dnn") {
    m.kind = ModelKind::dnn;
  } else if (kind == "lstm") {
    m.kind = ModelKind::lstm;
  } else {
    throw FormatError("model " + path.string() + ": unknown kind '" + kind + "'");
  }
  m.input_window = j.at("input_window").get<int>();
  m.units = j.at("units").get<std::vector<int>>();
  m.params = j.at("params").get<std::vector<double>>();
  m.scale = j.at("scale").get<double>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.config = training_config_from_json(j.at("config"));
  return m;
}

}  // namespace windtwin
