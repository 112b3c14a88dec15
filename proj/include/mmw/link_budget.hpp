#pragma once

#include <string>

namespace mmw::link {

inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr double kThermalNoiseDbmPerHz = -174.0;

/// Gain is used; the half-power beamwidth is carried as metadata only.
struct AntennaModel {
    std::string name;
    double gain_dbi = 0.0;
    double hpbw_deg = 0.0;

    static AntennaModel horn() { return {"horn", 22.4, 12.0}; }
    static AntennaModel patch() { return {"patch", 8.0, 30.0}; }
    /// "horn" or "patch"; throws std::invalid_argument otherwise.
    static AntennaModel from_name(const std::string& name);
};

struct LinkBudget {
    double tx_power_dbm = 0.0;
    AntennaModel tx_antenna = AntennaModel::horn();
    AntennaModel rx_antenna = AntennaModel::horn();
    double carrier_hz = 60e9;
    double noise_figure_db = 10.0;
    double noise_bandwidth_hz = 2e9;
    double implementation_loss_db = 5.0;

    double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
    void validate() const;
};

struct LinkResult {
    double distance_m = 0.0;
    double fspl_db = 0.0;
    double rx_power_dbm = 0.0;
    double noise_floor_dbm = 0.0;
    double snr_db = 0.0;
    double ebn0_db = 0.0;
};

/// 20 log10(4 pi d / lambda). Throws std::invalid_argument for d <= 0.
double fspl_db(double distance_m, double carrier_hz);

/// Eb/N0 = SNR + 10 log10(B / Rb).
double ebn0_from_snr(double snr_db, double noise_bandwidth_hz, double bit_rate_hz);

/// Prx = Ptx + Gt + Gr - FSPL; noise = -174 + 10 log10 B + NF; SNR = Prx - noise - L_impl.
LinkResult friis_snr(const LinkBudget& budget, double distance_m, double bit_rate_hz = 875e6);

}  // namespace mmw::link
