#include "mmw/fifo.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mmw::framing {

FifoModel FifoModel::transmit(const ClockPlan& plan, std::size_t capacity_bytes) {
    FifoModel m;
    m.capacity = capacity_bytes;
    m.start_threshold = capacity_bytes / 2;
    m.write_hz = plan.net_byte_hz;
    m.read_hz = plan.gross_byte_hz;
    m.gated = GatedSide::read;
    return m;
}

FifoModel FifoModel::receive(const ClockPlan& plan, std::size_t capacity_bytes) {
    FifoModel m = transmit(plan, capacity_bytes);
    m.write_hz = plan.gross_byte_hz;
    m.read_hz = plan.net_byte_hz;
    m.gated = GatedSide::write;
    return m;
}

FifoResult simulate_fifo(const FifoModel& model, std::size_t events, bool record_trace) {
    if (model.capacity == 0) throw std::invalid_argument("simulate_fifo: capacity must be positive");
    if (model.write_hz <= 0 || model.read_hz <= 0) throw std::invalid_argument("simulate_fifo: clock rates must be positive");
    if (model.active_periods <= 0 || model.idle_periods < 0)
        throw std::invalid_argument("simulate_fifo: invalid gating schedule");

    // Periods 1/f as integers over a common denominator.
    const Rational write_period = 1 / model.write_hz;
    const Rational read_period = 1 / model.read_hz;
    const std::int64_t denom = std::lcm(write_period.denominator(), read_period.denominator());
    const std::int64_t write_step = write_period.numerator() * (denom / write_period.denominator());
    const std::int64_t read_step = read_period.numerator() * (denom / read_period.denominator());

    FifoResult r;
    r.time_unit_s = Rational(1, denom);
    if (record_trace) r.trace.reserve(events);

    const int cycle = model.active_periods + model.idle_periods;
    std::int64_t next_write = 0, next_read = 0;
    long occupancy = 0;
    int read_phase = 0, write_phase = 0;
    int min_occ = 0, max_occ = 0;
    int steady_min = std::numeric_limits<int>::max(), steady_max = std::numeric_limits<int>::min();
    const auto cap = static_cast<long>(model.capacity);

    for (std::size_t e = 0; e < events; ++e) {
        const bool is_write = next_write <= next_read;
        const std::int64_t now = is_write ? next_write : next_read;
        FifoEvent ev;
        if (is_write) {
            next_write += write_step;
            bool active = true;
            if (model.gated == GatedSide::write) {
                if (write_phase == 0 && r.read_started) r.cycle_start_levels.push_back(static_cast<int>(occupancy));
                active = write_phase < model.active_periods;
                write_phase = (write_phase + 1) % cycle;
            }
            if (active) {
                ev = FifoEvent::write;
                if (occupancy >= cap) ++r.overflows;
                else ++occupancy;
            } else {
                ev = FifoEvent::idle_write;
            }
        } else {
            next_read += read_step;
            if (!r.read_started && occupancy >= static_cast<long>(model.start_threshold)) {
                r.read_started = true;
                r.read_start_event = e;
            }
            bool active = r.read_started;
            if (active && model.gated == GatedSide::read) {
                if (read_phase == 0) r.cycle_start_levels.push_back(static_cast<int>(occupancy));
                active = read_phase < model.active_periods;
                read_phase = (read_phase + 1) % cycle;
            }
            if (active) {
                ev = FifoEvent::read;
                if (occupancy <= 0) ++r.underflows;
                else --occupancy;
            } else {
                ev = FifoEvent::idle_read;
            }
        }
        const int occ = static_cast<int>(occupancy);
        min_occ = std::min(min_occ, occ);
        max_occ = std::max(max_occ, occ);
        if (r.read_started) {
            steady_min = std::min(steady_min, occ);
            steady_max = std::max(steady_max, occ);
        }
        if (record_trace) r.trace.push_back({now, occ, ev});
        ++r.events;
    }
    r.min_occupancy = min_occ;
    r.max_occupancy = max_occ;
    r.steady_min = r.read_started ? steady_min : 0;
    r.steady_max = r.read_started ? steady_max : 0;
    return r;
}

}  // namespace mmw::framing
