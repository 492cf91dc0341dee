#pragma once

#include "satsched/rng.hpp"

namespace satsched {

// Ka-band LEO link parameters. Defaults give a clear-sky SNR around 4.9 dB
// (about 2.5 bit/s/Hz clear, ~2.2 with rain fades): tight enough that a
// uniform split under-serves the hot cells and allocation actually matters.
struct LinkConfig {
  int num_beams = 19;
  double altitude_km = 600.0;
  double carrier_ghz = 20.0;
  double total_bandwidth_mhz = 500.0;
  double eirp_dbw = 27.5;
  double rx_gain_dbi = 35.0;
  double noise_temp_k = 290.0;
  double atmos_loss_db = 0.5;
  double rain_fade_std_db = 2.0;

  bool operator==(const LinkConfig&) const = default;
};

// Throws std::invalid_argument listing all violations.
void validate_link(const LinkConfig& cfg);

// Free-space path loss at the configured carrier and slant range (= altitude).
double free_space_path_loss_db(const LinkConfig& cfg);

// Clear-sky SNR from the link budget, noise taken over the full pool bandwidth.
double base_snr_db(const LinkConfig& cfg);

// Per-step per-beam SNR draw: base SNR minus a half-normal rain fade with the
// configured dB std, returned as a linear ratio.
double draw_snr_linear(const LinkConfig& cfg, Rng& rng);

// alloc * B_tot * log2(1 + snr), in Mbps. alloc in [0,1], snr >= 0 (linear).
double shannon_rate(double alloc, double snr_linear, const LinkConfig& cfg);

}  // namespace satsched
