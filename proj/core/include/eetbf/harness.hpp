#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "eetbf/config.hpp"
#include "eetbf/sim.hpp"

namespace eetbf {

// Trailing-window aggregate of one run. SNR is averaged in linear units and
// reported in dB; everything else is an arithmetic mean.
struct Summary {
    long frames_total = 0;
    long frames_window = 0;
    double latency_s = 0.0;
    double snr_db = 0.0;
    double rate_bps = 0.0;
    double avg_power_w = 0.0;
    double ee_bit_per_joule = 0.0;
    double accuracy = 0.0;
};

Summary summarize(std::span<const MetricRecord> records, double window_fraction);

std::string format_csv_double(double v);
void write_frames_csv(const std::filesystem::path &path,
                      std::span<const MetricRecord> records);
std::vector<MetricRecord> read_frames_csv(const std::filesystem::path &path);

extern const char *const kFramesCsvHeader;

struct RunOptions {
    std::string out_dir = "out";
    double window_fraction = 0.5;
    std::string q_save;  // dump the final action-value table here
    std::string q_load;  // action-value table to warm-start from
};

struct SweepOptions {
    std::string param;  // velocity | t_ti | n_beams | freq | radius | scheme
    std::vector<std::string> values;
    std::vector<std::string> schemes;  // empty = the configured scheme
    int seeds = 1;
    int workers = 1;
    double window_fraction = 0.5;
    std::string out_dir = "out";
    bool plot = false;
};

struct BenchOptions {
    int seeds = 1;
    int workers = 1;
    double window_fraction = 0.5;
    std::string out_dir = "out";
};

int cmd_run(const ConfigMap &config, const RunOptions &options);
int cmd_sweep(const ConfigMap &config, const SweepOptions &options);
int cmd_bench(const ConfigMap &config, const BenchOptions &options);

} // namespace eetbf
