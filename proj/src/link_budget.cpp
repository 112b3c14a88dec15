#include "mmw/link_budget.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mmw::link {

AntennaModel AntennaModel::from_name(const std::string& name) {
    if (name == "horn") return horn();
    if (name == "patch") return patch();
    throw std::invalid_argument("unknown antenna '" + name + "' (expected horn or patch)");
}

void LinkBudget::validate() const {
    for (double v : {tx_power_dbm, tx_antenna.gain_dbi, rx_antenna.gain_dbi, carrier_hz, noise_figure_db,
                     noise_bandwidth_hz, implementation_loss_db})
        if (!std::isfinite(v)) throw std::invalid_argument("link budget: all fields must be finite");
    if (!(carrier_hz > 0.0)) throw std::invalid_argument("link budget: carrier must be positive");
    if (!(noise_bandwidth_hz > 0.0)) throw std::invalid_argument("link budget: noise bandwidth must be positive");
}

double fspl_db(double distance_m, double carrier_hz) {
    if (!(distance_m > 0.0)) throw std::invalid_argument("fspl: distance must be positive");
    const double lambda = kSpeedOfLight / carrier_hz;
    return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m / lambda);
}

double ebn0_from_snr(double snr_db, double noise_bandwidth_hz, double bit_rate_hz) {
    return snr_db + 10.0 * std::log10(noise_bandwidth_hz / bit_rate_hz);
}

LinkResult friis_snr(const LinkBudget& budget, double distance_m, double bit_rate_hz) {
    budget.validate();
    if (!(bit_rate_hz > 0.0)) throw std::invalid_argument("friis_snr: bit rate must be positive");
    LinkResult r;
    r.distance_m = distance_m;
    r.fspl_db = fspl_db(distance_m, budget.carrier_hz);
    r.rx_power_dbm = budget.tx_power_dbm + budget.tx_antenna.gain_dbi + budget.rx_antenna.gain_dbi - r.fspl_db;
    r.noise_floor_dbm = kThermalNoiseDbmPerHz + 10.0 * std::log10(budget.noise_bandwidth_hz) + budget.noise_figure_db;
    r.snr_db = r.rx_power_dbm - r.noise_floor_dbm - budget.implementation_loss_db;
    r.ebn0_db = ebn0_from_snr(r.snr_db, budget.noise_bandwidth_hz, bit_rate_hz);
    return r;
}

}  // namespace mmw::link
