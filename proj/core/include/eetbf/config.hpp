#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "eetbf/sim.hpp"

namespace eetbf {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raw dotted-key settings; every field mirrors exactly one config key and the
// defaults are the evaluated-scenario baseline.
struct RawConfig {
    long sim_frames = 2000;
    long sim_seed = 1;
    std::string sim_scheme = "eetbf";
    double sim_radius_m = 50.0;
    double sim_speed_kmh = 1.8;
    double sim_bs_height_m = 10.0;
    double sim_user_height_m = 1.5;
    std::string sim_fading = "deterministic";
    std::string sim_truncate = "auto";

    double chan_freq_hz = 0.3e12;
    double chan_bandwidth_hz = 1e9;
    double chan_noise_floor_dbm_hz = -174.0;
    double chan_noise_figure_w = 0.0;
    double chan_ref_temperature_k = 290.0;
    double chan_absorption_per_m = -1.0;  // >= 0 overrides the table lookup
    std::string chan_absorption_table;    // file path; empty = built-in table

    long beam_n_h = 40;
    long beam_n_v = 40;
    double beam_azimuth_span_rad = 6.283185307179586;
    double beam_azimuth_lo_rad = -3.141592653589793;
    double beam_elevation_span_rad = 1.5707963267948966;
    double beam_elevation_lo_rad = 1.5707963267948966;
    double beam_eps_sidelobe = 0.1;

    double frame_t_ti_s = 0.05;
    double frame_t_bt_s = 1e-5;
    double frame_t_rq_s = 1e-5;
    double frame_t_fb_s = 1e-5;
    double frame_t_ac_s = 1e-5;

    double link_gamma_th_db = 10.0;
    double link_gamma_dec_db = 0.0;
    double link_xi_th = 0.7;
    long link_history_m = 10;

    bool pa_enabled = true;
    double pa_p_be_dbm = 15.0;
    double pa_p_th_dbm = 27.0;
    double pa_delta_th = 0.15;
    double pa_eta1 = 0.5;
    double pa_eta2 = 0.5;
    long pa_q_levels = 20;
    long pa_s_q = 100;
    bool pa_reward_normalize = true;
    bool pa_global_rate_max = false;

    double bt_beta = 0.95;
    bool bt_center_pre = false;
    bool bt_init_top = true;

    long baseline_random_n = 1000;
    long baseline_linear_window = 5;
    long baseline_iter_split = 2;
};

// Layered key-value store: defaults, then file, then explicit overrides.
class ConfigMap {
  public:
    void apply_file(const std::string &path);
    void apply_text(const std::string &text, const std::string &origin);
    void set(const std::string &key, const std::string &value);

    // Resolved "key = value" text; feeding it back reproduces this config.
    std::string echo() const;

    // Convert and validate. Non-fatal notes (e.g. out-of-band frequency) are
    // appended to *warnings when given.
    SimConfig build(std::vector<std::string> *warnings = nullptr) const;

    const RawConfig &raw() const { return raw_; }

  private:
    RawConfig raw_;
};

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

} // namespace eetbf
