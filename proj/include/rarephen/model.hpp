#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rarephen/represent.hpp"

namespace rarephen {

enum class TrainingKind { kWeak, kStrong };

std::string_view to_string(TrainingKind kind);
TrainingKind parse_training_kind(std::string_view text);

struct Provenance {
  TrainingKind training_kind = TrainingKind::kWeak;
  std::string params_hash;
  std::string provider_id;
  EncodingOptions options;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct LogRegModel {
  std::vector<double> weights;
  double bias = 0.0;
  Provenance provenance;

  std::size_t dim() const { return weights.size(); }
  friend bool operator==(const LogRegModel&, const LogRegModel&) = default;
};

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 200;
  double l2 = 1.0;  // applied as l2 / n on the mean loss
  std::uint64_t seed = 0;
  std::optional<std::size_t> subsample;

  void validate() const;
};

struct GradientPoint {
  std::vector<double> weights;
  double bias = 0.0;
};

// Objective over the summed data term:
//   J(w, b) = sum_i [softplus(z_i) - y_i z_i] + (l2 / 2) |w|^2,  z_i = w.x_i + b
// Training minimises J / n with gradient descent.
double objective(std::span<const std::vector<double>> x, std::span<const int> y,
                 const GradientPoint& point, double l2);
// Gradient of `objective`; the last component is d/db.
std::vector<double> objective_gradient(std::span<const std::vector<double>> x,
                                       std::span<const int> y, const GradientPoint& point,
                                       double l2);

LogRegModel train(const std::vector<MentionVector>& x, const std::vector<int>& y,
                  const TrainConfig& config, Provenance provenance = {});
LogRegModel train(std::span<const std::vector<double>> x, std::span<const int> y,
                  const TrainConfig& config, Provenance provenance = {});

// Loss J / n after each epoch; used to check monotone descent.
std::vector<double> training_curve(std::span<const std::vector<double>> x, std::span<const int> y,
                                   const TrainConfig& config);

double predict(const LogRegModel& model, std::span<const double> v);
inline double predict(const LogRegModel& model, const MentionVector& v) {
  return predict(model, v.values);
}
inline bool decide(double probability) { return probability >= 0.5; }

// Max relative error between the analytic gradient and central differences
// (h = 1e-5). Relative error is |a - n| / max(|a|, |n|, 1).
double gradient_check(std::span<const std::vector<double>> x, std::span<const int> y,
                      const GradientPoint& point, double l2 = 1.0);

inline constexpr int kModelFormatVersion = 1;

void save(const LogRegModel& model, const std::filesystem::path& path);
LogRegModel load(const std::filesystem::path& path);
std::string serialize(const LogRegModel& model);
LogRegModel deserialize(std::string_view text);

}  // namespace rarephen
