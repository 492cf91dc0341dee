#include "satsched/link.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace satsched {

namespace {
constexpr double kBoltzmannDbw = -228.599;  // 10 log10(1.380649e-23)
}

void validate_link(const LinkConfig& cfg) {
  std::ostringstream bad;
  auto check = [&](bool ok, const char* what) {
    if (!ok) bad << (bad.tellp() > 0 ? "; " : "") << what;
  };
  check(cfg.num_beams >= 1, "num_beams must be >= 1");
  check(std::isfinite(cfg.altitude_km) && cfg.altitude_km > 0, "altitude_km must be positive");
  check(std::isfinite(cfg.carrier_ghz) && cfg.carrier_ghz > 0, "carrier_ghz must be positive");
  check(std::isfinite(cfg.total_bandwidth_mhz) && cfg.total_bandwidth_mhz > 0,
        "total_bandwidth_mhz must be positive");
  check(std::isfinite(cfg.eirp_dbw), "eirp_dbw must be finite");
  check(std::isfinite(cfg.rx_gain_dbi), "rx_gain_dbi must be finite");
  check(std::isfinite(cfg.noise_temp_k) && cfg.noise_temp_k > 0, "noise_temp_k must be positive");
  check(std::isfinite(cfg.atmos_loss_db) && cfg.atmos_loss_db >= 0,
        "atmos_loss_db must be >= 0");
  check(std::isfinite(cfg.rain_fade_std_db) && cfg.rain_fade_std_db >= 0,
        "rain_fade_std_db must be >= 0");
  if (bad.tellp() > 0) throw std::invalid_argument("link config: " + bad.str());
}

double free_space_path_loss_db(const LinkConfig& cfg) {
  return 92.45 + 20.0 * std::log10(cfg.carrier_ghz) + 20.0 * std::log10(cfg.altitude_km);
}

double base_snr_db(const LinkConfig& cfg) {
  const double noise_dbw = kBoltzmannDbw + 10.0 * std::log10(cfg.noise_temp_k) +
                           10.0 * std::log10(cfg.total_bandwidth_mhz * 1e6);
  return cfg.eirp_dbw + cfg.rx_gain_dbi - free_space_path_loss_db(cfg) - cfg.atmos_loss_db -
         noise_dbw;
}

double draw_snr_linear(const LinkConfig& cfg, Rng& rng) {
  const double fade_db = std::abs(rng.normal(0.0, cfg.rain_fade_std_db));
  const double snr_db = base_snr_db(cfg) - fade_db;
  return std::pow(10.0, snr_db / 10.0);
}

double shannon_rate(double alloc, double snr_linear, const LinkConfig& cfg) {
  if (!(alloc >= 0.0 && alloc <= 1.0)) {
    throw std::domain_error("shannon_rate: alloc must be in [0,1]");
  }
  if (!(snr_linear >= 0.0)) throw std::domain_error("shannon_rate: snr must be >= 0");
  return alloc * cfg.total_bandwidth_mhz * std::log2(1.0 + snr_linear);
}

}  // namespace satsched
