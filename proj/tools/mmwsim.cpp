// Command-line driver for the 60 GHz DBPSK link simulator.

#include <cstdio>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmw/experiment.hpp"
#include "mmw/framing.hpp"
#include "mmw/runtime.hpp"

using namespace mmw;

namespace {

struct Options {
    std::uint64_t seed = 1;
    std::string out;
    std::string antennas = "horn";
    std::string channel = "los-only";
    std::string coding = "off";
    std::uint64_t min_errors = 100;
    std::uint64_t max_bits = 10'000'000;
    std::vector<double> points;
    std::string modem = "hardware";
    int sps = 8;
    double ebn0 = harness::kNoNoise;
    std::size_t traces = 2000;
    std::uint64_t frames = 1000;
    int fifo_capacity_frames = 2;
    std::uint64_t fifo_events = 1'000'000;
    int workers = 0;
    int threshold = 29;
    std::string soft_out;
    std::string sync_log;
};

harness::ExperimentConfig to_config(const Options& o, harness::Mode mode) {
    harness::ExperimentConfig c;
    c.mode = mode;
    c.seed = o.seed;
    c.antennas = o.antennas;
    const auto antenna = link::AntennaModel::from_name(o.antennas);
    c.budget.tx_antenna = antenna;
    c.budget.rx_antenna = antenna;
    c.channel = channel::resolve_profile(o.channel);
    c.coding = o.coding == "on";
    c.min_errors = o.min_errors;
    c.max_bits = o.max_bits;
    c.modem = o.modem == "ideal" ? modem::ModemConfig::ideal(o.sps) : modem::ModemConfig::hardware_default();
    c.modem.samples_per_symbol = o.sps;
    c.ebn0_db = o.ebn0;
    c.eye_traces = o.traces;
    c.frames = o.frames;
    c.fifo_capacity_frames = o.fifo_capacity_frames;
    c.fifo_events = o.fifo_events;
    c.workers = o.workers;
    c.sync_threshold = o.threshold;
    c.points = o.points;
    if (c.points.empty()) {
        if (mode == harness::Mode::ber_ebn0) c.points = {4, 6, 8, 10};
        if (mode == harness::Mode::ber_distance) c.points = {1, 2, 5, 10, 15, 20, 30};
    }
    c.validate();
    return c;
}

// CSV to --out when given, otherwise to stdout.
template <typename Report>
void output(const Options& o, const Report& report, void (*write)(std::ostream&, const Report&),
            void (*emit)(const Report&, const std::string&)) {
    if (o.out.empty()) write(std::cout, report);
    else emit(report, o.out);
}

void print_point(const harness::BerPoint& p) {
    std::fprintf(stderr, "x=%-8g Eb/N0=%7.2f dB  bits=%-10llu errors=%-8llu BER=%.3e%s  synced=%llu missed=%llu\n", p.x,
                 p.ebn0_db, static_cast<unsigned long long>(p.bits_sent), static_cast<unsigned long long>(p.bit_errors),
                 p.ber(), p.upper_bound ? " (upper bound)" : "", static_cast<unsigned long long>(p.frames_synced),
                 static_cast<unsigned long long>(p.frames_missed));
}

}  // namespace

int main(int argc, char** argv) {
    tune_allocator();
    CLI::App app{"mmwsim: 60 GHz DBPSK link simulator (BER, eye, response, framing, FIFO)"};
    app.set_config("--config", "", "Read options from a TOML/INI file (keys mirror the long flag names)");
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    app.add_option("--seed", o.seed, "Master RNG seed")->capture_default_str();
    app.add_option("--out", o.out, "Output CSV path (stdout when omitted)");
    app.add_option("--antennas", o.antennas, "Antenna preset on both ends")
        ->check(CLI::IsMember({"horn", "patch"}))
        ->capture_default_str();
    app.add_option("--channel", o.channel, "Channel preset (los-only, two-ray, corridor-like) or JSON profile path")
        ->capture_default_str();
    app.add_option("--coding", o.coding, "RS(255,239) decoding on|off")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
    app.add_option("--min-errors", o.min_errors, "Stop a BER point after this many bit errors")
        ->check(CLI::Range(std::uint64_t{100}, std::numeric_limits<std::uint64_t>::max()))
        ->capture_default_str();
    app.add_option("--max-bits", o.max_bits, "Stop a BER point after this many payload bits")->capture_default_str();
    app.add_option("--points", o.points, "Sweep points: Eb/N0 in dB (ber-ebn0) or distances in m (ber-distance)")
        ->delimiter(',');
    app.add_option("--modem", o.modem, "hardware: band-limited chain; ideal: optimum differential detector")
        ->check(CLI::IsMember({"hardware", "ideal"}))
        ->capture_default_str();
    app.add_option("--sps", o.sps, "Samples per symbol (even, >= 4)")->capture_default_str();
    app.add_option("--ebn0", o.ebn0, "Eb/N0 in dB for eye and frame-roundtrip (default: noiseless)");
    app.add_option("--traces", o.traces, "Eye traces")->capture_default_str();
    app.add_option("--frames", o.frames, "Frames for frame-roundtrip")->capture_default_str();
    app.add_option("--fifo-capacity-frames", o.fifo_capacity_frames, "FIFO capacity in 260-byte frames")->capture_default_str();
    app.add_option("--fifo-events", o.fifo_events, "Clock events to simulate")->capture_default_str();
    app.add_option("--workers", o.workers, "Worker threads (0 = hardware concurrency)")->capture_default_str();
    app.add_option("--threshold", o.threshold, "Preamble correlator threshold (bits out of 32)")->capture_default_str();

    app.add_option("--soft-out", o.soft_out, "eye: also write the demodulated soft stream as little-endian float32");
    app.add_option("--sync-log", o.sync_log, "frame-roundtrip: also write every correlator decision as CSV");

    auto* ber_ebn0 = app.add_subcommand("ber-ebn0", "BER versus Eb/N0");
    auto* ber_distance = app.add_subcommand("ber-distance", "BER versus distance through the link budget");
    auto* eye = app.add_subcommand("eye", "Eye diagram of the demodulated signal");
    auto* response = app.add_subcommand("response", "Frequency and impulse response of the linear chain");
    auto* roundtrip = app.add_subcommand("frame-roundtrip", "Frames through the chain with sync acquisition");
    auto* fifo = app.add_subcommand("fifo-sim", "Dual-clock FIFO occupancy trace");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ber_ebn0->parsed() || ber_distance->parsed()) {
            const auto mode = ber_ebn0->parsed() ? harness::Mode::ber_ebn0 : harness::Mode::ber_distance;
            const auto cfg = to_config(o, mode);
            const auto report = mode == harness::Mode::ber_ebn0 ? harness::run_ebn0_sweep(cfg) : harness::run_distance_sweep(cfg);
            for (const auto& p : report.points) print_point(p);
            output(o, report, harness::write_ber_csv, harness::emit_csv);
        } else if (eye->parsed()) {
            const auto cfg = to_config(o, harness::Mode::eye);
            const auto soft = harness::run_eye_soft(cfg);
            if (!o.soft_out.empty()) modem::emit_soft_f32(soft, o.soft_out);
            const auto rec = modem::eye_capture(soft, cfg.modem, cfg.eye_traces);
            std::fprintf(stderr, "eye height %.4f (inner %.4f), width %.3f UI, levels %+.4f / %+.4f\n", rec.eye_height,
                         rec.eye_height_inner, rec.eye_width_ui, rec.level_one, rec.level_zero);
            output(o, rec, harness::write_eye_csv, harness::emit_eye);
        } else if (response->parsed()) {
            const auto cfg = to_config(o, harness::Mode::response);
            const auto probe = harness::run_response(cfg);
            std::fprintf(stderr, "-3 dB bandwidth (passband equivalent): %.4f GHz\n", probe.bandwidth_3db_hz / 1e9);
            output(o, probe, harness::write_response_csv, harness::emit_response);
        } else if (roundtrip->parsed()) {
            const auto cfg = to_config(o, harness::Mode::frame_roundtrip);
            const auto r = harness::run_frame_roundtrip(cfg);
            std::fprintf(stderr, "frames %llu recovered %llu payload bit errors %llu false syncs %llu\n",
                         static_cast<unsigned long long>(r.frames_sent), static_cast<unsigned long long>(r.frames_recovered),
                         static_cast<unsigned long long>(r.payload_bit_errors), static_cast<unsigned long long>(r.false_syncs));
            if (!o.sync_log.empty()) harness::emit_sync_log(r.sync_log, o.sync_log);
            output(o, r, harness::write_roundtrip_csv, harness::emit_roundtrip);
        } else if (fifo->parsed()) {
            const auto cfg = to_config(o, harness::Mode::fifo_sim);
            const auto r = harness::run_fifo(cfg);
            std::fprintf(stderr, "events %zu steady occupancy [%d, %d] underflows %zu overflows %zu\n", r.events, r.steady_min,
                         r.steady_max, r.underflows, r.overflows);
            output(o, r, harness::write_fifo_csv, harness::emit_fifo);
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
