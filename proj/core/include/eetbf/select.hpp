#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "eetbf/metrics.hpp"
#include "eetbf/phys.hpp"
#include "eetbf/rng.hpp"

namespace eetbf {

enum class Direction { forward, backward, bidirectional, exhaustive, other };

// Recent optimal beam indexes of one axis, oldest first.
struct AxisHistory {
    std::vector<int> indexes;
    std::vector<double> snrs;  // gamma* recorded alongside each index
    void validate() const;
};

// Anchor of the directional search learned from the history scan.
struct SpanParams {
    int center = 0;  // psi: beam index of the anchoring record
    int span = 1;    // s: 1-based age of the anchor, counted from the newest
    int width = 0;   // epsilon = s * max |diff|
};

struct BeamPolicy {
    std::vector<int> h_indexes;
    std::vector<int> v_indexes;
    Direction h_direction = Direction::other;
    Direction v_direction = Direction::other;
    // When non-empty this list *is* the trained set; otherwise the set is the
    // cartesian product of the two axis lists.
    std::vector<std::pair<int, int>> explicit_beams;

    long beam_count() const;
    std::vector<std::pair<int, int>> beams() const;
    void validate(int n_h, int n_v) const;
};

BeamPolicy exhaustive_policy(const BeamCodebook &codebook);

// First-order differences of the stored indexes (newer minus older).
std::vector<int> axis_diffs(const AxisHistory &hist);

// Scan the history newest-first: every failed frame (snr <= gamma_th) ages the
// anchor by one; the first success fixes it. Empty when every remembered frame
// failed. center_pre anchors on the record one step newer than the success
// (the pre-increment reading of the scan).
std::optional<SpanParams> span_params(const AxisHistory &hist, double gamma_th,
                                      bool center_pre = false);

Direction classify_direction(std::span<const int> diffs);

// Contiguous index range around the anchor, oriented by the diff signs and
// clamped to [0, axis_len).
std::pair<std::vector<int>, Direction> directional_set(int center, int width,
                                                       std::span<const int> diffs,
                                                       int axis_len);

// History-driven directional training set spanning both axes. Empty when an
// axis has fewer than two records or an all-failed history; the caller then
// substitutes the exhaustive policy.
std::optional<BeamPolicy> eetbf_bt(const AxisHistory &h_hist,
                                   const AxisHistory &v_hist,
                                   const BeamCodebook &codebook, double gamma_th,
                                   bool center_pre = false);

// Invert the SNR relation to recover the channel gain seen by one beam.
double estimate_channel(double snr_value, double power, double gain_h,
                        double gain_v, double noise);

// One past per-beam channel-gain map, tagged with its age in frames.
struct AgedGrid {
    long tau = 1;
    std::vector<double> gain;  // row-major, zero marks a blocked measurement
};

struct ChannelEstimate {
    int n_h = 0;
    int n_v = 0;
    std::vector<double> gain;  // predicted gain per beam, row-major
    std::vector<char> valid;   // nonzero where at least one sample existed

    double at(int i, int j) const {
        return gain[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_v) + j];
    }
    bool valid_at(int i, int j) const {
        return valid[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_v) + j] != 0;
    }
};

// Age-discounted average of past per-beam gains; zero samples are treated as
// blocked and excluded, and beams with no usable sample are flagged invalid.
ChannelEstimate predict_channel(int n_h, int n_v, std::span<const AgedGrid> history,
                                double beta);

// Largest number of training slots that fit into one interval.
long max_training_beams(const FrameBudget &budget);

// Rank predicted beams best-first, screen out undecodable ones, and keep at
// most n_be. Empty when no kept beam is predicted to clear gamma_th.
std::optional<BeamPolicy> init_top_beams(const ChannelEstimate &est, long n_be,
                                         double p_be, double gamma_th,
                                         double gamma_dec, double noise,
                                         double gain_h, double gain_v);

// ---------------------------------------------------------------------------
// Benchmark schemes

BeamPolicy random_policy(const BeamCodebook &codebook, long n, Rng &rng);

// Fixed window of `window` consecutive beams per axis around the previous
// optimum, shifted inward at the codebook edges.
BeamPolicy linear_policy(const BeamCodebook &codebook, int window, int prev_i,
                         int prev_j);

// A sector of consecutive beams [lo, hi] per axis, trained as one widened probe.
struct SectorSpan {
    int h_lo = 0, h_hi = 0;
    int v_lo = 0, v_hi = 0;
    bool is_leaf() const { return h_lo == h_hi && v_lo == v_hi; }
};

// SNR the user reports for one (possibly widened) probe.
using SectorMeasure = std::function<double(const SectorSpan &)>;

struct SearchOutcome {
    int best_i = 0;
    int best_j = 0;
    double best_snr = 0.0;
    long beams_trained = 0;  // probes sent across every round
    bool budget_hit = false; // stopped early on the probe budget
};

// Tree search: each level splits the surviving sector `split` ways per axis,
// probes every combination, and recurses into the winner until single beams
// remain. max_probes <= 0 means unlimited.
SearchOutcome iterative_search(const BeamCodebook &codebook, int split,
                               const SectorMeasure &measure, long max_probes = 0);

// Per-axis bisection with two single-beam probes per axis and round; keeps the
// half whose probe reports the higher SNR. max_probes <= 0 means unlimited.
SearchOutcome binary_search(const BeamCodebook &codebook,
                            const SectorMeasure &measure, long max_probes = 0);

} // namespace eetbf
