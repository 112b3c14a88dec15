#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mmw/experiment.hpp"

namespace mmw::harness {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    body(out);
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

void write_ber_csv(std::ostream& os, const BerReport& report) {
    os << "x,ebn0_db,snr_db,frames,bits_sent,bit_errors,ber,ci_low,ci_high,post_fec_bit_errors,post_fec_ber,"
          "frame_errors,codeword_byte_errors,decode_failures,miscorrections,frames_synced,frames_missed,"
          "false_syncs,upper_bound,coding,fec_hist\n";
    for (const BerPoint& p : report.points) {
        os << num(p.x) << ',' << num(p.ebn0_db) << ',' << num(p.snr_db) << ',' << p.frames << ',' << p.bits_sent << ','
           << p.bit_errors << ',' << sci(p.ber()) << ',' << sci(p.ci_low()) << ',' << sci(p.ci_high()) << ','
           << p.post_fec_bit_errors << ',' << sci(p.post_fec_ber()) << ',' << p.frame_errors << ','
           << p.codeword_byte_errors << ',' << p.decode_failures << ',' << p.miscorrections << ',' << p.frames_synced
           << ',' << p.frames_missed << ',' << p.false_syncs << ',' << (p.upper_bound ? 1 : 0) << ','
           << (p.coding ? "on" : "off") << ',';
        for (std::size_t i = 0; i < p.fec_hist.size(); ++i) os << (i ? ";" : "") << p.fec_hist[i];
        os << '\n';
    }
}

void write_eye_csv(std::ostream& os, const modem::EyeRecord& eye) {
    os << "trace_id,sample_index,value\n";
    for (Eigen::Index i = 0; i < eye.traces.rows(); ++i)
        for (Eigen::Index j = 0; j < eye.traces.cols(); ++j) os << i << ',' << j << ',' << num(eye.traces(i, j)) << '\n';
}

void write_response_csv(std::ostream& os, const channel::ResponseProbe& probe) {
    os << "curve,index,x,value\n";
    for (Eigen::Index i = 0; i < probe.frequency_hz.size(); ++i)
        os << "magnitude_db," << i << ',' << num(probe.frequency_hz[i]) << ',' << num(probe.magnitude_db[i]) << '\n';
    for (Eigen::Index i = 0; i < probe.impulse.size(); ++i)
        os << "impulse," << i << ',' << num(probe.time_s[i]) << ',' << num(std::abs(probe.impulse[i])) << '\n';
}

void write_fifo_csv(std::ostream& os, const framing::FifoResult& result) {
    static constexpr const char* kNames[] = {"write", "read", "idle_read", "idle_write"};
    os << "event_index,time_units,event,occupancy\n";
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        const auto& s = result.trace[i];
        os << i << ',' << s.time << ',' << kNames[static_cast<int>(s.event)] << ',' << s.occupancy << '\n';
    }
}

void write_roundtrip_csv(std::ostream& os, const RoundtripReport& r) {
    os << "frames_sent,frames_recovered,payload_bit_errors,frames_missed,false_syncs,lead_in_bits\n";
    os << r.frames_sent << ',' << r.frames_recovered << ',' << r.payload_bit_errors << ',' << r.frames_missed << ','
       << r.false_syncs << ',' << r.lead_in_bits << '\n';
}

void write_sync_log_csv(std::ostream& os, const std::vector<sync::DetectionRecord>& log) {
    os << "bit_position,shift,score,validated\n";
    for (const auto& d : log) os << d.bit_position << ',' << d.shift << ',' << d.score << ',' << (d.validated ? 1 : 0) << '\n';
}

void emit_csv(const BerReport& report, const std::string& path) {
    write_file(path, [&](std::ostream& os) { write_ber_csv(os, report); });
}
void emit_eye(const modem::EyeRecord& eye, const std::string& path) {
    write_file(path, [&](std::ostream& os) { write_eye_csv(os, eye); });
}
void emit_response(const channel::ResponseProbe& probe, const std::string& path) {
    write_file(path, [&](std::ostream& os) { write_response_csv(os, probe); });
}
void emit_fifo(const framing::FifoResult& result, const std::string& path) {
    write_file(path, [&](std::ostream& os) { write_fifo_csv(os, result); });
}
void emit_roundtrip(const RoundtripReport& r, const std::string& path) {
    write_file(path, [&](std::ostream& os) { write_roundtrip_csv(os, r); });
}

void emit_sync_log(const std::vector<sync::DetectionRecord>& log, const std::string& path) {
    write_file(path, [&](std::ostream& os) { write_sync_log_csv(os, log); });
}

}  // namespace mmw::harness
