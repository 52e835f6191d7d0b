#include "rarephen/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "rarephen/error.hpp"

namespace rarephen {

namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logit(const std::vector<double>& w, double b, std::span<const double> x) {
  double z = b;
  for (std::size_t k = 0; k < w.size(); ++k) z += w[k] * x[k];
  return z;
}

void check_data(std::span<const std::vector<double>> x, std::span<const int> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kInvalidArgument, "feature and label counts differ");
  }
  if (x.empty()) return;
  const std::size_t dim = x.front().size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != dim) {
      throw Error(ErrorKind::kDimensionMismatch, "row " + std::to_string(i) + " has dimension " +
                                                     std::to_string(x[i].size()) + ", expected " +
                                                     std::to_string(dim));
    }
    if (y[i] != 0 && y[i] != 1) throw Error(ErrorKind::kInvalidArgument, "labels must be 0 or 1");
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::kCorruptFile, "bad number '" + std::string(s) + "'");
  }
  return v;
}

// Training rows after optional subsampling, in their original order.
std::vector<std::size_t> training_rows(std::size_t n, const TrainConfig& config) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  if (!config.subsample || *config.subsample >= n) return rows;
  std::mt19937_64 rng(config.seed);
  const std::size_t k = *config.subsample;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(rows[i], rows[j]);
  }
  rows.resize(k);
  std::sort(rows.begin(), rows.end());
  return rows;
}

struct Trainer {
  std::span<const std::vector<double>> x;
  std::span<const int> y;
  std::vector<std::size_t> rows;
  const TrainConfig& config;
  std::vector<double> w;
  double b = 0.0;

  // Takes one gradient step and returns the mean objective before it.
  double step() {
    const double n = static_cast<double>(rows.size());
    std::vector<double> gw(w.size(), 0.0);
    double gb = 0.0;
    double loss = 0.0;
    for (std::size_t i : rows) {
      const double z = logit(w, b, x[i]);
      loss += softplus(z) - y[i] * z;
      const double r = sigmoid(z) - y[i];
      for (std::size_t k = 0; k < w.size(); ++k) gw[k] += r * x[i][k];
      gb += r;
    }
    double sq = 0.0;
    for (double v : w) sq += v * v;
    loss = (loss + 0.5 * config.l2 * sq) / n;
    for (std::size_t k = 0; k < w.size(); ++k) {
      w[k] -= config.learning_rate * (gw[k] + config.l2 * w[k]) / n;
    }
    b -= config.learning_rate * gb / n;
    return loss;
  }

  double loss() const {
    double total = 0.0;
    for (std::size_t i : rows) {
      const double z = logit(w, b, x[i]);
      total += softplus(z) - y[i] * z;
    }
    double sq = 0.0;
    for (double v : w) sq += v * v;
    return (total + 0.5 * config.l2 * sq) / static_cast<double>(rows.size());
  }
};

Trainer make_trainer(std::span<const std::vector<double>> x, std::span<const int> y,
                     const TrainConfig& config) {
  config.validate();
  check_data(x, y);
  if (x.size() < 2) throw Error(ErrorKind::kEmptyInput, "need at least two training pairs");
  const std::size_t dim = x.front().size();
  if (dim == 0) throw Error(ErrorKind::kDimensionMismatch, "zero-dimensional features");
  Trainer t{x, y, training_rows(x.size(), config), config, std::vector<double>(dim, 0.0)};
  std::size_t positives = 0;
  for (std::size_t i : t.rows) positives += static_cast<std::size_t>(y[i]);
  if (positives == 0 || positives == t.rows.size()) {
    throw Error(ErrorKind::kSingleClass, "training labels contain a single class");
  }
  return t;
}

}  // namespace

std::string_view to_string(TrainingKind kind) {
  return kind == TrainingKind::kWeak ? "weak" : "strong";
}

TrainingKind parse_training_kind(std::string_view text) {
  if (text == "weak") return TrainingKind::kWeak;
  if (text == "strong") return TrainingKind::kStrong;
  throw Error(ErrorKind::kInvalidArgument, "unknown training kind '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorKind::kInvalidArgument, "learning_rate must be positive");
  }
  if (epochs < 1) throw Error(ErrorKind::kInvalidArgument, "epochs must be at least 1");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) {
    throw Error(ErrorKind::kInvalidArgument, "l2 must be non-negative");
  }
}

double objective(std::span<const std::vector<double>> x, std::span<const int> y,
                 const GradientPoint& point, double l2) {
  check_data(x, y);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != point.weights.size()) throw Error(ErrorKind::kDimensionMismatch, "point");
    const double z = logit(point.weights, point.bias, x[i]);
    total += softplus(z) - y[i] * z;
  }
  double sq = 0.0;
  for (double v : point.weights) sq += v * v;
  return total + 0.5 * l2 * sq;
}

std::vector<double> objective_gradient(std::span<const std::vector<double>> x,
                                       std::span<const int> y, const GradientPoint& point,
                                       double l2) {
  check_data(x, y);
  const std::size_t d = point.weights.size();
  std::vector<double> g(d + 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != d) throw Error(ErrorKind::kDimensionMismatch, "point");
    const double r = sigmoid(logit(point.weights, point.bias, x[i])) - y[i];
    for (std::size_t k = 0; k < d; ++k) g[k] += r * x[i][k];
    g[d] += r;
  }
  for (std::size_t k = 0; k < d; ++k) g[k] += l2 * point.weights[k];
  return g;
}

LogRegModel train(std::span<const std::vector<double>> x, std::span<const int> y,
                  const TrainConfig& config, Provenance provenance) {
  Trainer t = make_trainer(x, y, config);
  for (std::size_t e = 0; e < config.epochs; ++e) {
    if (!std::isfinite(t.step())) {
      throw Error(ErrorKind::kDivergence, "loss became non-finite at epoch " + std::to_string(e));
    }
  }
  if (!std::isfinite(t.loss())) throw Error(ErrorKind::kDivergence, "final loss is non-finite");
  return {std::move(t.w), t.b, std::move(provenance)};
}

LogRegModel train(const std::vector<MentionVector>& x, const std::vector<int>& y,
                  const TrainConfig& config, Provenance provenance) {
  std::vector<std::vector<double>> rows;
  rows.reserve(x.size());
  for (const auto& v : x) rows.push_back(v.values);
  return train(std::span<const std::vector<double>>(rows), std::span<const int>(y), config,
               std::move(provenance));
}

std::vector<double> training_curve(std::span<const std::vector<double>> x, std::span<const int> y,
                                   const TrainConfig& config) {
  Trainer t = make_trainer(x, y, config);
  std::vector<double> curve;
  curve.reserve(config.epochs + 1);
  for (std::size_t e = 0; e < config.epochs; ++e) curve.push_back(t.step());
  curve.push_back(t.loss());
  return curve;
}

double predict(const LogRegModel& model, std::span<const double> v) {
  if (v.size() != model.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "model has dimension " +
                                                   std::to_string(model.dim()) + ", vector has " +
                                                   std::to_string(v.size()));
  }
  const double p = sigmoid(logit(model.weights, model.bias, v));
  // keep the result strictly inside (0, 1)
  return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

double gradient_check(std::span<const std::vector<double>> x, std::span<const int> y,
                      const GradientPoint& point, double l2) {
  constexpr double h = 1e-5;
  const std::vector<double> analytic = objective_gradient(x, y, point, l2);
  double worst = 0.0;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    GradientPoint plus = point;
    GradientPoint minus = point;
    if (k < point.weights.size()) {
      plus.weights[k] += h;
      minus.weights[k] -= h;
    } else {
      plus.bias += h;
      minus.bias -= h;
    }
    const double numeric = (objective(x, y, plus, l2) - objective(x, y, minus, l2)) / (2 * h);
    const double scale = std::max({std::abs(analytic[k]), std::abs(numeric), 1.0});
    worst = std::max(worst, std::abs(analytic[k] - numeric) / scale);
  }
  return worst;
}

std::string serialize(const LogRegModel& model) {
  std::ostringstream out;
  const auto& p = model.provenance;
  out << "rarephen-logreg\n"
      << "version " << kModelFormatVersion << "\n"
      << "dim " << model.dim() << "\n"
      << "training_kind " << to_string(p.training_kind) << "\n"
      << "provider_id " << p.provider_id << "\n"
      << "params_hash " << p.params_hash << "\n"
      << "mask_mention " << (p.options.mask_mention ? 1 : 0) << "\n"
      << "use_structure " << (p.options.use_structure ? 1 : 0) << "\n"
      << "window_tokens " << p.options.window_tokens << "\n"
      << "bias " << format_double(model.bias) << "\n"
      << "weights\n";
  for (double w : model.weights) out << format_double(w) << "\n";
  out << "end\n";
  return out.str();
}

LogRegModel deserialize(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos < text.size();) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  std::size_t at = 0;
  auto next = [&]() -> std::string_view {
    if (at >= lines.size()) throw Error(ErrorKind::kCorruptFile, "model file is truncated");
    return lines[at++];
  };
  auto field = [&](std::string_view key) -> std::string_view {
    std::string_view line = next();
    if (line == key) return {};
    if (!line.starts_with(key) || line.size() <= key.size() || line[key.size()] != ' ') {
      throw Error(ErrorKind::kCorruptFile, "expected '" + std::string(key) + "' in model file");
    }
    return line.substr(key.size() + 1);
  };
  auto integer = [](std::string_view s) {
    std::size_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) {
      throw Error(ErrorKind::kCorruptFile, "bad integer '" + std::string(s) + "'");
    }
    return v;
  };
  auto flag = [&](std::string_view s) {
    if (s != "0" && s != "1") throw Error(ErrorKind::kCorruptFile, "bad flag");
    return s == "1";
  };

  if (next() != "rarephen-logreg") throw Error(ErrorKind::kCorruptFile, "not a rarephen model");
  const std::size_t version = integer(field("version"));
  if (version != kModelFormatVersion) {
    throw Error(ErrorKind::kVersionMismatch, "model format version " + std::to_string(version) +
                                                 " is not supported (expected " +
                                                 std::to_string(kModelFormatVersion) + ")");
  }
  LogRegModel model;
  const std::size_t dim = integer(field("dim"));
  try {
    model.provenance.training_kind = parse_training_kind(field("training_kind"));
  } catch (const Error& e) {
    throw Error(ErrorKind::kCorruptFile, e.what());
  }
  model.provenance.provider_id = std::string(field("provider_id"));
  model.provenance.params_hash = std::string(field("params_hash"));
  model.provenance.options.mask_mention = flag(field("mask_mention"));
  model.provenance.options.use_structure = flag(field("use_structure"));
  model.provenance.options.window_tokens = integer(field("window_tokens"));
  model.bias = parse_double(field("bias"));
  if (next() != "weights") throw Error(ErrorKind::kCorruptFile, "expected 'weights'");
  model.weights.reserve(dim);
  for (std::size_t k = 0; k < dim; ++k) model.weights.push_back(parse_double(next()));
  if (next() != "end") throw Error(ErrorKind::kCorruptFile, "missing end marker");
  return model;
}

void save(const LogRegModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << serialize(model);
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

LogRegModel load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace rarephen
