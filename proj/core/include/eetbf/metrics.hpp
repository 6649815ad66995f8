#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eetbf/phys.hpp"

namespace eetbf {

// Timing budget of one transmission interval. All values in seconds.
struct FrameBudget {
    double t_ti = 0.05;  // transmission interval
    double t_bt = 1e-5;  // one pilot/training slot
    double t_rq = 1e-5;  // request slot
    double t_fb = 1e-5;  // one feedback slot
    double t_ac = 1e-5;  // acknowledgement slot
    void validate() const;
};

struct BeamMeasurement {
    int i = 0;
    int j = 0;
    double snr = 0.0;
};

// What the BS remembers about one completed frame.
struct HistoryRecord {
    long frame = 0;
    int beam_i = 0;
    int beam_j = 0;
    double snr = 0.0;
    bool success = false;  // snr >= outage threshold
    double rate = 0.0;     // effective rate achieved that frame
};

// Full per-beam SNR map measured during an exhaustive frame.
struct SnrGridFrame {
    long frame = 0;
    int n_h = 0;
    int n_v = 0;
    double power = 0.0;       // per-beam pilot power used for the sweep
    double noise = 0.0;       // receiver noise power during the sweep
    std::vector<double> snr;  // row-major, snr[i * n_v + j]

    double at(int i, int j) const {
        return snr[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_v) + j];
    }
};

// Sliding window over the most recent frames, oldest first.
class HistoryWindow {
  public:
    explicit HistoryWindow(std::size_t capacity);

    void push(const HistoryRecord &rec);
    void push_grid(SnrGridFrame grid);
    void clear();

    const std::deque<HistoryRecord> &records() const { return records_; }
    const std::deque<SnrGridFrame> &grids() const { return grids_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return records_.size(); }
    bool full() const { return records_.size() == capacity_; }

  private:
    std::size_t capacity_;
    std::deque<HistoryRecord> records_;
    std::deque<SnrGridFrame> grids_;
};

// One row of simulator output.
struct MetricRecord {
    long frame = 0;
    double t_sec = 0.0;
    std::string scheme;
    long n_beams = 0;
    double latency_s = 0.0;
    double alpha = 0.0;  // latency / interval, the overhead share
    double snr_db = 0.0;
    double rate_bps = 0.0;
    double avg_power_w = 0.0;
    double ee_bit_per_joule = 0.0;
    double accuracy = 0.0;
    int beam_i = 0;
    int beam_j = 0;
};

double to_db(double linear);
double from_db(double db);

// Receiver noise over the whole band: bandwidth * (thermal floor + molecular
// re-radiation density) + noise-figure power.
double noise_power(const ChannelParams &params, double distance);

double snr(double power, double path_gain, double gain_h, double gain_v,
           double noise);

// Index of the best measurement; exact SNR ties go to the smallest (i, j).
std::size_t pick_optimal(std::span<const BeamMeasurement> measurements);
std::pair<int, int> pick_optimal(const SnrGridFrame &grid);

double training_latency(long n_beams, const FrameBudget &budget);
double training_latency(long n_beams, long n_feedbacks, const FrameBudget &budget);

// Shannon rate over the post-training remainder of the interval, zeroed when
// the chosen beam misses the outage threshold.
double effective_rate(double bandwidth, double snr_value, double snr_threshold,
                      double latency_s, double t_ti);

// Time-average transmit power over one interval: pilot energy plus data-phase
// power, both normalized by the interval length.
double avg_power(std::span<const double> beam_powers, const FrameBudget &budget,
                 double latency_s, double p_data);

double energy_efficiency(double rate_bps, double avg_power_w);

// Fraction of remembered frames whose chosen beam cleared the threshold.
double alignment_accuracy(const HistoryWindow &history, double gamma_th);

} // namespace eetbf
