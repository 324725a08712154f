#include "timewarp/penalty.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace timewarp {

namespace {

struct Registry {
  std::mutex mutex;
  std::map<std::string, CustomLoss> losses;
  std::map<std::string, CustomRegularizer> regularizers;
};

Registry& registry() {
  static Registry r;
  return r;
}

void check_weight(double w, const char* name) {
  if (!std::isfinite(w) || w < 0.0) {
    throw std::invalid_argument(std::string(name) + " must be finite and nonnegative");
  }
}

}  // namespace

void LossSpec::validate() const {
  switch (kind) {
    case LossKind::huber:
      if (!(huber_m > 0.0) || !std::isfinite(huber_m)) {
        throw std::invalid_argument("huber_m must be positive");
      }
      break;
    case LossKind::band:
      if (!(band_eps > 0.0) || !std::isfinite(band_eps)) {
        throw std::invalid_argument("band_eps must be positive");
      }
      break;
    case LossKind::custom:
      if (!custom) throw std::invalid_argument("custom loss '" + custom_name + "' has no callable");
      break;
    default:
      break;
  }
}

void RegularizerSpec::validate() const {
  if (std::isnan(slope_min) || std::isnan(slope_max) || !(slope_min < slope_max)) {
    throw std::invalid_argument("regularizer box requires s_min < s_max");
  }
  if (kind == RegularizerKind::custom && !custom) {
    throw std::invalid_argument("custom regularizer '" + custom_name + "' has no callable");
  }
}

void PenaltySpec::validate() const {
  loss.validate();
  reg_cum.validate();
  reg_inst.validate();
  check_weight(lambda_cum, "lambda_cum");
  check_weight(lambda_inst, "lambda_inst");
  check_weight(lambda_inst2, "lambda_inst2");
  if (reg_inst2) reg_inst2->validate();
}

void register_custom_loss(const std::string& name, CustomLoss fn) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  r.losses[name] = std::move(fn);
}

void register_custom_regularizer(const std::string& name, CustomRegularizer fn) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  r.regularizers[name] = std::move(fn);
}

CustomLoss find_custom_loss(const std::string& name) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  auto it = r.losses.find(name);
  if (it == r.losses.end()) throw std::invalid_argument("unknown custom loss '" + name + "'");
  return it->second;
}

CustomRegularizer find_custom_regularizer(const std::string& name) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  auto it = r.regularizers.find(name);
  if (it == r.regularizers.end()) {
    throw std::invalid_argument("unknown custom regularizer '" + name + "'");
  }
  return it->second;
}

}  // namespace timewarp
