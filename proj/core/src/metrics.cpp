#include "eetbf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eetbf {

void FrameBudget::validate() const {
    if (!(t_ti > 0.0))
        throw std::invalid_argument("FrameBudget: t_ti must be > 0");
    if (!(t_bt > 0.0))
        throw std::invalid_argument("FrameBudget: t_bt must be > 0");
    if (t_rq < 0.0 || t_fb < 0.0 || t_ac < 0.0)
        throw std::invalid_argument("FrameBudget: handshake slots must be >= 0");
    if (t_rq + t_fb + t_ac >= t_ti)
        throw std::invalid_argument("FrameBudget: handshake alone exceeds the interval");
}

HistoryWindow::HistoryWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0)
        throw std::invalid_argument("HistoryWindow: capacity must be >= 1");
}

void HistoryWindow::push(const HistoryRecord &rec) {
    if (records_.size() == capacity_) records_.pop_front();
    records_.push_back(rec);
}

void HistoryWindow::push_grid(SnrGridFrame grid) {
    if (grids_.size() == capacity_) grids_.pop_front();
    grids_.push_back(std::move(grid));
}

void HistoryWindow::clear() {
    records_.clear();
    grids_.clear();
}

double to_db(double linear) { return 10.0 * std::log10(linear); }

double from_db(double db) { return std::pow(10.0, db / 10.0); }

double noise_power(const ChannelParams &params, double distance) {
    return params.bandwidth * (params.thermal_floor + molecular_noise(params, distance)) +
           params.noise_figure_power;
}

double snr(double power, double path_gain, double gain_h, double gain_v,
           double noise) {
    if (!(noise > 0.0))
        throw std::invalid_argument("snr: noise must be > 0");
    if (power < 0.0)
        throw std::invalid_argument("snr: power must be >= 0");
    return power * path_gain * gain_h * gain_v / noise;
}

std::size_t pick_optimal(std::span<const BeamMeasurement> measurements) {
    if (measurements.empty())
        throw std::invalid_argument("pick_optimal: empty measurement list");
    std::size_t best = 0;
    for (std::size_t k = 1; k < measurements.size(); ++k) {
        const auto &m = measurements[k];
        const auto &b = measurements[best];
        if (m.snr > b.snr ||
            (m.snr == b.snr && std::pair{m.i, m.j} < std::pair{b.i, b.j}))
            best = k;
    }
    return best;
}

std::pair<int, int> pick_optimal(const SnrGridFrame &grid) {
    if (grid.snr.empty())
        throw std::invalid_argument("pick_optimal: empty grid");
    // Row-major scan visits (i, j) in lexicographic order, so keeping the
    // first strict maximum applies the tie rule for free.
    int bi = 0, bj = 0;
    double best = grid.at(0, 0);
    for (int i = 0; i < grid.n_h; ++i)
        for (int j = 0; j < grid.n_v; ++j)
            if (grid.at(i, j) > best) {
                best = grid.at(i, j);
                bi = i;
                bj = j;
            }
    return {bi, bj};
}

double training_latency(long n_beams, const FrameBudget &budget) {
    return training_latency(n_beams, 1, budget);
}

double training_latency(long n_beams, long n_feedbacks, const FrameBudget &budget) {
    if (n_beams < 0 || n_feedbacks < 0)
        throw std::invalid_argument("training_latency: counts must be >= 0");
    return static_cast<double>(n_beams) * budget.t_bt + budget.t_rq +
           static_cast<double>(n_feedbacks) * budget.t_fb + budget.t_ac;
}

double effective_rate(double bandwidth, double snr_value, double snr_threshold,
                      double latency_s, double t_ti) {
    if (!(t_ti > 0.0))
        throw std::invalid_argument("effective_rate: t_ti must be > 0");
    const double share = std::max(0.0, 1.0 - latency_s / t_ti);
    if (snr_value < snr_threshold) return 0.0;
    return bandwidth * share * std::log2(1.0 + snr_value);
}

double avg_power(std::span<const double> beam_powers, const FrameBudget &budget,
                 double latency_s, double p_data) {
    if (p_data < 0.0)
        throw std::invalid_argument("avg_power: p_data must be >= 0");
    double pilot_energy = 0.0;
    for (double p : beam_powers) {
        if (p < 0.0)
            throw std::invalid_argument("avg_power: beam powers must be >= 0");
        pilot_energy += p * budget.t_bt;
    }
    const double data_time = std::max(0.0, budget.t_ti - latency_s);
    return pilot_energy / budget.t_ti + p_data * data_time / budget.t_ti;
}

double energy_efficiency(double rate_bps, double avg_power_w) {
    if (avg_power_w < 0.0)
        throw std::invalid_argument("energy_efficiency: power must be >= 0");
    return avg_power_w > 0.0 ? rate_bps / avg_power_w : 0.0;
}

double alignment_accuracy(const HistoryWindow &history, double gamma_th) {
    if (history.records().empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto &rec : history.records())
        if (rec.snr >= gamma_th) ++hits;
    return static_cast<double>(hits) / static_cast<double>(history.size());
}

} // namespace eetbf
