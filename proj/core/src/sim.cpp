#include "eetbf/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eetbf {

namespace {
constexpr double kPi = std::numbers::pi;

// Largest trainable beam count given the per-scheme feedback cost.
long beam_budget(const FrameBudget &b, bool per_beam_feedback) {
    if (!per_beam_feedback) return max_training_beams(b);
    const double q = (b.t_ti - b.t_rq - b.t_ac) / (b.t_bt + b.t_fb);
    return std::max(0L, static_cast<long>(std::floor(q + 1e-9)));
}
} // namespace

const char *scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::eetbf: return "eetbf";
        case Scheme::exhaustive: return "exhaustive";
        case Scheme::random: return "random";
        case Scheme::iterative: return "iterative";
        case Scheme::linear: return "linear";
        case Scheme::binary: return "binary";
    }
    return "unknown";
}

std::optional<Scheme> parse_scheme(const std::string &name) {
    if (name == "eetbf") return Scheme::eetbf;
    if (name == "exhaustive") return Scheme::exhaustive;
    if (name == "random") return Scheme::random;
    if (name == "iterative") return Scheme::iterative;
    if (name == "linear") return Scheme::linear;
    if (name == "binary") return Scheme::binary;
    return std::nullopt;
}

UserState init_user(double radius, double speed, double z, Rng &rng) {
    if (!(radius > 0.0))
        throw std::invalid_argument("init_user: radius must be > 0");
    const double r = radius * std::sqrt(uniform01(rng));
    const double phi = uniform_range(rng, -kPi, kPi);
    UserState u;
    u.x = r * std::cos(phi);
    u.y = r * std::sin(phi);
    u.z = z;
    u.speed = speed;
    u.heading = uniform_range(rng, -kPi, kPi);
    return u;
}

UserState step_user(const UserState &user, double dt, double radius, Rng &rng) {
    if (!(dt > 0.0))
        throw std::invalid_argument("step_user: dt must be > 0");
    if (!(radius > 0.0))
        throw std::invalid_argument("step_user: radius must be > 0");
    UserState u = user;
    u.heading = wrap_angle(u.heading + uniform_range(rng, -kPi / 8.0, kPi / 8.0));
    u.x += u.speed * dt * std::cos(u.heading);
    u.y += u.speed * dt * std::sin(u.heading);
    const double r = std::hypot(u.x, u.y);
    if (r > radius) {
        // fold the overshoot back inside and bounce the heading off the rim
        const double rim_azimuth = std::atan2(u.y, u.x);
        const double fold = (2.0 * radius - r) / r;
        if (fold > 0.0) {
            u.x *= fold;
            u.y *= fold;
        } else {  // a step longer than the diameter; park at the centre
            u.x = 0.0;
            u.y = 0.0;
        }
        u.heading = wrap_angle(2.0 * rim_azimuth - u.heading + kPi);
    }
    return u;
}

void SimConfig::validate() const {
    if (frames < 1)
        throw std::invalid_argument("SimConfig: frames must be >= 1");
    if (!(radius > 0.0))
        throw std::invalid_argument("SimConfig: radius must be > 0");
    if (speed < 0.0)
        throw std::invalid_argument("SimConfig: speed must be >= 0");
    if (bs_height == user_height)
        throw std::invalid_argument("SimConfig: BS and user heights must differ");
    channel.validate();
    codebook.validate();
    budget.validate();
    pa.validate();
    if (!(eps_sidelobe > 0.0) || !(eps_sidelobe < 1.0))
        throw std::invalid_argument("SimConfig: eps_sidelobe must lie in (0, 1)");
    if (!(gamma_th > 0.0))
        throw std::invalid_argument("SimConfig: gamma_th must be > 0");
    if (gamma_dec < 0.0)
        throw std::invalid_argument("SimConfig: gamma_dec must be >= 0");
    if (xi_th < 0.0 || xi_th > 1.0)
        throw std::invalid_argument("SimConfig: xi_th must lie in [0, 1]");
    if (history_m < 1)
        throw std::invalid_argument("SimConfig: history_m must be >= 1");
    if (s_q < 1)
        throw std::invalid_argument("SimConfig: s_q must be >= 1");
    if (!(beta > 0.0) || !(beta < 1.0))
        throw std::invalid_argument("SimConfig: beta must lie in (0, 1)");
    if (random_n < 1)
        throw std::invalid_argument("SimConfig: random_n must be >= 1");
    if (linear_window < 1)
        throw std::invalid_argument("SimConfig: linear_window must be >= 1");
    if (iter_split < 2)
        throw std::invalid_argument("SimConfig: iter_split must be >= 2");
}

bool SimConfig::truncate_effective() const {
    switch (truncate) {
        case TruncateMode::on: return true;
        case TruncateMode::off: return false;
        case TruncateMode::automatic: return scheme == Scheme::eetbf;
    }
    return false;
}

RunState::RunState(const SimConfig &config)
    : history(config.history_m), q(config.s_q, config.pa.q_levels), rng(config.seed) {
    user = init_user(config.radius, config.speed, config.user_height, rng);
}

MetricRecord run_frame(const SimConfig &cfg, RunState &st, long t) {
    const BeamCodebook &cb = cfg.codebook;
    const int n_h = cb.count_h(), n_v = cb.count_v();
    const long total = cb.total_beams();

    const Geometry geo{cfg.bs_height, st.user.x, st.user.y, st.user.z};
    const double dist = geo.distance();
    const Boresight bore = boresight(geo);
    const double rho = sample_fading(cfg.fading, st.rng);
    const double chan_gain = path_gain(cfg.channel, dist, rho);
    const double noise = noise_power(cfg.channel, dist);

    std::vector<double> g_h(static_cast<std::size_t>(n_h));
    std::vector<double> g_v(static_cast<std::size_t>(n_v));
    for (int i = 0; i < n_h; ++i)
        g_h[static_cast<std::size_t>(i)] =
            beam_gain(cb.h_directions[static_cast<std::size_t>(i)], cb.theta_h,
                      bore.azimuth, cfg.eps_sidelobe);
    for (int j = 0; j < n_v; ++j)
        g_v[static_cast<std::size_t>(j)] =
            beam_gain(cb.v_directions[static_cast<std::size_t>(j)], cb.theta_v,
                      bore.elevation, cfg.eps_sidelobe);

    const bool trunc = cfg.truncate_effective();

    long n_trained = 0;
    long n_feedbacks = 1;
    int best_i = 0, best_j = 0;
    double best_snr = 0.0;
    bool full_sweep = false;
    std::vector<double> powers;
    double p_data = 0.0;
    int action = cfg.pa.q_levels;  // implicit full-power action

    if (cfg.scheme == Scheme::eetbf) {
        const long n_be = beam_budget(cfg.budget, false);
        const bool warm = t < static_cast<long>(cfg.history_m) ||
                          alignment_accuracy(st.history, cfg.gamma_th) < cfg.xi_th;
        bool exhaustive_frame = warm;
        BeamPolicy policy;
        if (!warm) {
            std::optional<BeamPolicy> pol;
            bool used_init = false;
            if (cfg.init_top && st.prev_full_sweep && !st.history.grids().empty()) {
                // fold the stored sweep grids into a per-beam channel forecast
                const double gh_nom = 2.0 * kPi / cb.theta_h;
                const double gv_nom = 2.0 * kPi / cb.theta_v;
                std::vector<AgedGrid> aged;
                aged.reserve(st.history.grids().size());
                for (const auto &g : st.history.grids()) {
                    if (static_cast<long>(g.snr.size()) != total || g.frame >= t)
                        continue;
                    AgedGrid ag;
                    ag.tau = t - g.frame;
                    ag.gain.resize(g.snr.size());
                    for (std::size_t b = 0; b < g.snr.size(); ++b)
                        ag.gain[b] = estimate_channel(g.snr[b], g.power, gh_nom,
                                                      gv_nom, g.noise);
                    aged.push_back(std::move(ag));
                }
                if (!aged.empty()) {
                    used_init = true;
                    const auto est = predict_channel(n_h, n_v, aged, cfg.beta);
                    pol = init_top_beams(est, n_be, cfg.pa.p_be, cfg.gamma_th,
                                         cfg.gamma_dec, noise, gh_nom, gv_nom);
                }
            }
            if (!used_init) {
                AxisHistory hh, vv;
                hh.indexes.reserve(st.history.size());
                vv.indexes.reserve(st.history.size());
                for (const auto &r : st.history.records()) {
                    hh.indexes.push_back(r.beam_i);
                    hh.snrs.push_back(r.snr);
                    vv.indexes.push_back(r.beam_j);
                    vv.snrs.push_back(r.snr);
                }
                pol = eetbf_bt(hh, vv, cb, cfg.gamma_th, cfg.center_pre);
            }
            if (pol) {
                policy = std::move(*pol);
            } else {
                exhaustive_frame = true;
                ++st.fallback_frames;
            }
        }
        if (exhaustive_frame) policy = exhaustive_policy(cb);

        if (policy.beam_count() > n_be) ++st.counters.c5;

        double pilot = cfg.pa.p_be;
        if (!exhaustive_frame && cfg.pa_enabled) {
            action = choose_action(st.q, st.pending_state, cfg.pa, st.rng);
            pilot = action_to_power(action, cfg.pa);
        } else {
            action = cfg.pa.q_levels;
        }

        auto beams = policy.beams();
        if (static_cast<long>(beams.size()) > n_be && trunc) {
            beams.resize(static_cast<std::size_t>(n_be));
            ++st.counters.c4;
        }
        n_trained = static_cast<long>(beams.size());
        n_feedbacks = 1;

        powers.assign(beams.size(), pilot);
        p_data = pilot;
        if (!exhaustive_frame && cfg.pa_enabled &&
            normalize_total(powers, p_data, cfg.budget, cfg.pa) < 1.0)
            ++st.counters.c3;

        std::vector<BeamMeasurement> meas(beams.size());
        for (std::size_t k = 0; k < beams.size(); ++k) {
            const auto [i, j] = beams[k];
            const double g = snr(powers[k], chan_gain,
                                 g_h[static_cast<std::size_t>(i)],
                                 g_v[static_cast<std::size_t>(j)], noise);
            meas[k] = {i, j, g};
            if (g < cfg.gamma_dec) ++st.counters.c1_1;
        }
        const auto &win = meas[pick_optimal(meas)];
        best_i = win.i;
        best_j = win.j;
        best_snr = win.snr;

        full_sweep = n_trained == total;
        if (full_sweep) {
            SnrGridFrame grid;
            grid.frame = t;
            grid.n_h = n_h;
            grid.n_v = n_v;
            grid.power = pilot;
            grid.noise = noise;
            grid.snr.resize(meas.size());
            for (std::size_t k = 0; k < meas.size(); ++k) grid.snr[k] = meas[k].snr;
            st.history.push_grid(std::move(grid));
        }
    } else {
        const double p_full = cfg.pa.p_th;  // benchmarks sweep at the power cap
        const bool interactive =
            cfg.scheme == Scheme::iterative || cfg.scheme == Scheme::binary;

        if (!interactive) {
            BeamPolicy policy;
            bool per_beam_fb = false;
            switch (cfg.scheme) {
                case Scheme::exhaustive:
                    policy = exhaustive_policy(cb);
                    break;
                case Scheme::random:
                    policy = random_policy(cb, std::min(cfg.random_n, total), st.rng);
                    break;
                case Scheme::linear:
                    if (st.prev_best) {
                        policy = linear_policy(cb, cfg.linear_window,
                                               st.prev_best->first,
                                               st.prev_best->second);
                        per_beam_fb = true;
                    } else {
                        policy = exhaustive_policy(cb);  // nothing to centre on yet
                    }
                    break;
                default:
                    throw std::logic_error("run_frame: unexpected scheme");
            }
            const long n_be = beam_budget(cfg.budget, per_beam_fb);
            if (policy.beam_count() > n_be) ++st.counters.c5;
            auto beams = policy.beams();
            if (static_cast<long>(beams.size()) > n_be && trunc) {
                beams.resize(static_cast<std::size_t>(n_be));
                ++st.counters.c4;
            }
            n_trained = static_cast<long>(beams.size());
            n_feedbacks = per_beam_fb ? n_trained : 1;

            std::vector<BeamMeasurement> meas(beams.size());
            for (std::size_t k = 0; k < beams.size(); ++k) {
                const auto [i, j] = beams[k];
                const double g = snr(p_full, chan_gain,
                                     g_h[static_cast<std::size_t>(i)],
                                     g_v[static_cast<std::size_t>(j)], noise);
                meas[k] = {i, j, g};
                if (g < cfg.gamma_dec) ++st.counters.c1_1;
            }
            const auto &win = meas[pick_optimal(meas)];
            best_i = win.i;
            best_j = win.j;
            best_snr = win.snr;
            full_sweep = n_trained == total;
        } else {
            const SectorMeasure measure = [&](const SectorSpan &s) {
                const double width_h = (s.h_hi - s.h_lo + 1) * cb.theta_h;
                const double width_v = (s.v_hi - s.v_lo + 1) * cb.theta_v;
                const double dir_h =
                    0.5 * (cb.h_directions[static_cast<std::size_t>(s.h_lo)] +
                           cb.h_directions[static_cast<std::size_t>(s.h_hi)]);
                const double dir_v =
                    0.5 * (cb.v_directions[static_cast<std::size_t>(s.v_lo)] +
                           cb.v_directions[static_cast<std::size_t>(s.v_hi)]);
                const double gh = beam_gain(dir_h, width_h, bore.azimuth, cfg.eps_sidelobe);
                const double gv = beam_gain(dir_v, width_v, bore.elevation, cfg.eps_sidelobe);
                const double g = snr(p_full, chan_gain, gh, gv, noise);
                if (g < cfg.gamma_dec) ++st.counters.c1_1;
                return g;
            };
            const long max_probes = trunc ? beam_budget(cfg.budget, true) : 0;
            const SearchOutcome outcome =
                cfg.scheme == Scheme::iterative
                    ? iterative_search(cb, cfg.iter_split, measure, max_probes)
                    : binary_search(cb, measure, max_probes);
            if (outcome.budget_hit) ++st.counters.c4;
            n_trained = outcome.beams_trained;
            n_feedbacks = n_trained;
            best_i = outcome.best_i;
            best_j = outcome.best_j;
            best_snr = outcome.best_snr;
        }
        powers.assign(static_cast<std::size_t>(n_trained), p_full);
        p_data = p_full;
    }

    if (best_snr < cfg.gamma_th) ++st.counters.c1;
    const double latency = training_latency(n_trained, n_feedbacks, cfg.budget);
    if (!trunc && latency > cfg.budget.t_ti) ++st.counters.c4;
    const double rate = effective_rate(cfg.channel.bandwidth, best_snr, cfg.gamma_th,
                                       latency, cfg.budget.t_ti);
    const double p_avg = avg_power(powers, cfg.budget, latency, p_data);
    const double ee = energy_efficiency(rate, p_avg);

    st.history.push({t, best_i, best_j, best_snr, best_snr >= cfg.gamma_th, rate});

    MetricRecord rec;
    rec.frame = t;
    rec.t_sec = static_cast<double>(t) * cfg.budget.t_ti;
    rec.scheme = scheme_name(cfg.scheme);
    rec.n_beams = n_trained;
    rec.latency_s = latency;
    rec.alpha = latency / cfg.budget.t_ti;
    rec.snr_db = best_snr > 0.0 ? to_db(best_snr) : -300.0;
    rec.rate_bps = rate;
    rec.avg_power_w = p_avg;
    rec.ee_bit_per_joule = ee;
    rec.accuracy = alignment_accuracy(st.history, cfg.gamma_th);
    rec.beam_i = best_i;
    rec.beam_j = best_j;

    if (cfg.scheme == Scheme::eetbf && cfg.pa_enabled) {
        double reward = ee;
        if (cfg.reward_normalize) {
            st.ee_max = std::max(st.ee_max, ee);
            reward = st.ee_max > 0.0 ? ee / st.ee_max : 0.0;
        }
        double r_max = 0.0;
        if (cfg.global_rate_max) {
            st.rate_max_global = std::max(st.rate_max_global, rate);
            r_max = st.rate_max_global;
        } else {
            for (const auto &r : st.history.records()) r_max = std::max(r_max, r.rate);
        }
        const int s_next = next_state(rate, r_max, cfg.s_q);
        q_update(st.q, st.pending_state, action, reward, s_next, cfg.pa);
        st.pending_state = s_next;
    }

    st.prev_full_sweep = full_sweep;
    st.prev_best = std::pair{best_i, best_j};
    return rec;
}

RunResult run_sim(const SimConfig &cfg, const QTable *warm_start) {
    cfg.validate();
    RunState st(cfg);
    if (warm_start) {
        if (warm_start->state_levels() != st.q.state_levels() ||
            warm_start->q_levels() != st.q.q_levels())
            throw std::invalid_argument("run_sim: warm-start table dimensions mismatch");
        st.q = *warm_start;
    }
    RunResult res;
    res.records.reserve(static_cast<std::size_t>(cfg.frames));
    res.policy_sizes.reserve(static_cast<std::size_t>(cfg.frames));
    for (long t = 0; t < cfg.frames; ++t) {
        res.records.push_back(run_frame(cfg, st, t));
        res.policy_sizes.push_back(res.records.back().n_beams);
        st.user = step_user(st.user, cfg.budget.t_ti, cfg.radius, st.rng);
    }
    res.counters = st.counters;
    res.fallback_frames = st.fallback_frames;
    res.q = st.q;
    return res;
}

} // namespace eetbf
