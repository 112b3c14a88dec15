#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mmw/framing.hpp"

namespace mmw::framing {

enum class GatedSide { read, write };

/// Dual-clock elastic buffer between the payload clock and the line clock.
/// One side runs continuously, the other is gated per frame (active then idle periods).
/// The read side stays idle until occupancy reaches start_threshold.
struct FifoModel {
    std::size_t capacity = 2 * kFrameBytes;
    std::size_t start_threshold = kFrameBytes;  // capacity / 2
    Rational write_hz{0};
    Rational read_hz{0};
    GatedSide gated = GatedSide::read;
    int active_periods = static_cast<int>(kPayloadBytes);                // 239
    int idle_periods = static_cast<int>(kFrameBytes - kPayloadBytes);     // 21

    /// Transmit-side buffer: written at f1, read at f2 gated 239/21, half-full start.
    static FifoModel transmit(const ClockPlan& plan, std::size_t capacity_bytes = 2 * kFrameBytes);
    /// Receive-side buffer: written at f2 gated 239/21, read continuously at f1.
    static FifoModel receive(const ClockPlan& plan, std::size_t capacity_bytes = 2 * kFrameBytes);
};

enum class FifoEvent : std::uint8_t { write, read, idle_read, idle_write };

struct FifoSample {
    std::int64_t time = 0;  // in units of FifoResult::time_unit_s
    std::int32_t occupancy = 0;
    FifoEvent event = FifoEvent::write;
};

struct FifoResult {
    std::vector<FifoSample> trace;
    /// One time unit in seconds (exact).
    Rational time_unit_s{0};
    std::size_t events = 0;
    std::size_t underflows = 0;
    std::size_t overflows = 0;
    bool read_started = false;
    std::size_t read_start_event = 0;
    /// Occupancy range over the whole run and after the read side started.
    int min_occupancy = 0;
    int max_occupancy = 0;
    int steady_min = 0;
    int steady_max = 0;
    /// Occupancy at the start of every gating cycle once reading has started.
    std::vector<int> cycle_start_levels;
};

/// Event-driven simulation over `events` clock edges with exact integer time.
/// Coincident edges process the write first. Underflow and overflow are counted, never thrown.
FifoResult simulate_fifo(const FifoModel& model, std::size_t events, bool record_trace = true);

}  // namespace mmw::framing
