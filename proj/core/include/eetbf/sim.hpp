#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eetbf/metrics.hpp"
#include "eetbf/phys.hpp"
#include "eetbf/power.hpp"
#include "eetbf/rng.hpp"
#include "eetbf/select.hpp"

namespace eetbf {

enum class Scheme { eetbf, exhaustive, random, iterative, linear, binary };

const char *scheme_name(Scheme scheme);
std::optional<Scheme> parse_scheme(const std::string &name);

enum class TruncateMode { automatic, on, off };

struct UserState {
    double x = 0.0;
    double y = 0.0;
    double z = 1.5;
    double speed = 0.5;    // m/s
    double heading = 0.0;  // rad, azimuth of motion
};

// Uniform position over the serving disc, uniform heading.
UserState init_user(double radius, double speed, double z, Rng &rng);

// Random-direction walk: jitter the heading, advance, reflect at the boundary.
UserState step_user(const UserState &user, double dt, double radius, Rng &rng);

struct SimConfig {
    long frames = 2000;
    std::uint64_t seed = 1;
    Scheme scheme = Scheme::eetbf;
    double radius = 50.0;       // serving disc radius (m)
    double speed = 0.5;         // user speed (m/s)
    double bs_height = 10.0;    // m
    double user_height = 1.5;   // m
    FadingModel fading = FadingModel::deterministic;
    TruncateMode truncate = TruncateMode::automatic;

    ChannelParams channel;
    BeamCodebook codebook = BeamCodebook::uniform(40, 40, 6.283185307179586,
                                                  1.5707963267948966,
                                                  -3.141592653589793,
                                                  1.5707963267948966);
    FrameBudget budget;
    double eps_sidelobe = 0.1;

    double gamma_th = 10.0;   // linear outage threshold (10 dB)
    double gamma_dec = 1.0;   // linear decodability threshold (0 dB)
    double xi_th = 0.7;       // accuracy floor triggering the exhaustive fallback
    std::size_t history_m = 10;

    bool pa_enabled = true;
    PaSettings pa;
    int s_q = 100;
    bool reward_normalize = true;   // scale rewards by the running EE maximum
    bool global_rate_max = false;   // quantize against an all-time rate maximum

    double beta = 0.95;             // channel-prediction decay
    bool center_pre = false;        // anchor variant of the history scan
    bool init_top = true;           // seed the first directional frame from grids

    long random_n = 1000;
    int linear_window = 5;
    int iter_split = 2;             // per-axis sector split of the tree search

    void validate() const;
    bool truncate_effective() const;
};

struct ConstraintCounters {
    long c1 = 0;    // frames whose best trained SNR missed gamma_th
    long c1_1 = 0;  // trained beams whose SNR missed gamma_dec
    long c3 = 0;    // frames whose planned average power needed normalization
    long c4 = 0;    // latency-cap events: truncations, or overruns when off
    long c5 = 0;    // frames whose requested policy exceeded the beam budget
};

struct RunState {
    explicit RunState(const SimConfig &config);

    UserState user;
    HistoryWindow history;
    QTable q;
    int pending_state = 0;           // table state carried into the next frame
    double ee_max = 0.0;             // running EE maximum for reward scaling
    double rate_max_global = 0.0;
    bool prev_full_sweep = false;    // previous frame trained the whole codebook
    std::optional<std::pair<int, int>> prev_best;
    ConstraintCounters counters;
    long fallback_frames = 0;        // directional frames degraded to exhaustive
    Rng rng;
};

struct RunResult {
    std::vector<MetricRecord> records;
    std::vector<long> policy_sizes;
    ConstraintCounters counters;
    long fallback_frames = 0;
    QTable q{1, 1};
};

MetricRecord run_frame(const SimConfig &config, RunState &state, long t);

// warm_start, when given, seeds the action-value table (dimensions must match).
RunResult run_sim(const SimConfig &config, const QTable *warm_start = nullptr);

} // namespace eetbf
