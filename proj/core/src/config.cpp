#include "eetbf/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <variant>

namespace eetbf {

namespace {

using Member = std::variant<double RawConfig::*, long RawConfig::*,
                            bool RawConfig::*, std::string RawConfig::*>;

struct Entry {
    const char *key;
    Member member;
};

const std::vector<Entry> &registry() {
    static const std::vector<Entry> reg = {
        {"sim.frames", &RawConfig::sim_frames},
        {"sim.seed", &RawConfig::sim_seed},
        {"sim.scheme", &RawConfig::sim_scheme},
        {"sim.radius_m", &RawConfig::sim_radius_m},
        {"sim.speed_kmh", &RawConfig::sim_speed_kmh},
        {"sim.bs_height_m", &RawConfig::sim_bs_height_m},
        {"sim.user_height_m", &RawConfig::sim_user_height_m},
        {"sim.fading", &RawConfig::sim_fading},
        {"sim.truncate", &RawConfig::sim_truncate},
        {"chan.freq_hz", &RawConfig::chan_freq_hz},
        {"chan.bandwidth_hz", &RawConfig::chan_bandwidth_hz},
        {"chan.noise_floor_dbm_hz", &RawConfig::chan_noise_floor_dbm_hz},
        {"chan.noise_figure_w", &RawConfig::chan_noise_figure_w},
        {"chan.ref_temperature_k", &RawConfig::chan_ref_temperature_k},
        {"chan.absorption_per_m", &RawConfig::chan_absorption_per_m},
        {"chan.absorption_table", &RawConfig::chan_absorption_table},
        {"beam.n_h", &RawConfig::beam_n_h},
        {"beam.n_v", &RawConfig::beam_n_v},
        {"beam.azimuth_span_rad", &RawConfig::beam_azimuth_span_rad},
        {"beam.azimuth_lo_rad", &RawConfig::beam_azimuth_lo_rad},
        {"beam.elevation_span_rad", &RawConfig::beam_elevation_span_rad},
        {"beam.elevation_lo_rad", &RawConfig::beam_elevation_lo_rad},
        {"beam.eps_sidelobe", &RawConfig::beam_eps_sidelobe},
        {"frame.t_ti_s", &RawConfig::frame_t_ti_s},
        {"frame.t_bt_s", &RawConfig::frame_t_bt_s},
        {"frame.t_rq_s", &RawConfig::frame_t_rq_s},
        {"frame.t_fb_s", &RawConfig::frame_t_fb_s},
        {"frame.t_ac_s", &RawConfig::frame_t_ac_s},
        {"link.gamma_th_db", &RawConfig::link_gamma_th_db},
        {"link.gamma_dec_db", &RawConfig::link_gamma_dec_db},
        {"link.xi_th", &RawConfig::link_xi_th},
        {"link.history_m", &RawConfig::link_history_m},
        {"pa.enabled", &RawConfig::pa_enabled},
        {"pa.p_be_dbm", &RawConfig::pa_p_be_dbm},
        {"pa.p_th_dbm", &RawConfig::pa_p_th_dbm},
        {"pa.delta_th", &RawConfig::pa_delta_th},
        {"pa.eta1", &RawConfig::pa_eta1},
        {"pa.eta2", &RawConfig::pa_eta2},
        {"pa.q_levels", &RawConfig::pa_q_levels},
        {"pa.s_q", &RawConfig::pa_s_q},
        {"pa.reward_normalize", &RawConfig::pa_reward_normalize},
        {"pa.global_rate_max", &RawConfig::pa_global_rate_max},
        {"bt.beta", &RawConfig::bt_beta},
        {"bt.center_pre", &RawConfig::bt_center_pre},
        {"bt.init_top", &RawConfig::bt_init_top},
        {"baseline.random_n", &RawConfig::baseline_random_n},
        {"baseline.linear_window", &RawConfig::baseline_linear_window},
        {"baseline.iter_split", &RawConfig::baseline_iter_split},
    };
    return reg;
}

std::string trim(const std::string &s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string &key, const std::string &value) {
    double out = 0.0;
    const char *first = value.data();
    const char *last = value.data() + value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last)
        throw ConfigError("key '" + key + "': cannot parse number '" + value + "'");
    return out;
}

long parse_long(const std::string &key, const std::string &value) {
    long out = 0;
    const char *first = value.data();
    const char *last = value.data() + value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last)
        throw ConfigError("key '" + key + "': cannot parse integer '" + value + "'");
    return out;
}

bool parse_bool(const std::string &key, const std::string &value) {
    if (value == "true" || value == "on" || value == "1") return true;
    if (value == "false" || value == "off" || value == "0") return false;
    throw ConfigError("key '" + key + "': cannot parse boolean '" + value + "'");
}

std::string format_double(double v) {
    std::array<char, 64> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

} // namespace

double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

double watt_to_dbm(double watt) { return 10.0 * std::log10(watt * 1e3); }

void ConfigMap::set(const std::string &key, const std::string &value) {
    for (const auto &entry : registry()) {
        if (key != entry.key) continue;
        std::visit(
            [&](auto member) {
                using T = std::remove_reference_t<decltype(raw_.*member)>;
                if constexpr (std::is_same_v<T, double>)
                    raw_.*member = parse_double(key, value);
                else if constexpr (std::is_same_v<T, long>)
                    raw_.*member = parse_long(key, value);
                else if constexpr (std::is_same_v<T, bool>)
                    raw_.*member = parse_bool(key, value);
                else
                    raw_.*member = value;
            },
            entry.member);
        return;
    }
    throw ConfigError("unknown key '" + key + "'");
}

void ConfigMap::apply_text(const std::string &text, const std::string &origin) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        try {
            set(key, value);
        } catch (const ConfigError &e) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void ConfigMap::apply_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    apply_text(buf.str(), path);
}

std::string ConfigMap::echo() const {
    std::ostringstream out;
    for (const auto &entry : registry()) {
        out << entry.key << " = ";
        std::visit(
            [&](auto member) {
                using T = std::remove_cvref_t<decltype(raw_.*member)>;
                if constexpr (std::is_same_v<T, double>)
                    out << format_double(raw_.*member);
                else if constexpr (std::is_same_v<T, long>)
                    out << raw_.*member;
                else if constexpr (std::is_same_v<T, bool>)
                    out << (raw_.*member ? "true" : "false");
                else
                    out << raw_.*member;
            },
            entry.member);
        out << '\n';
    }
    return out.str();
}

SimConfig ConfigMap::build(std::vector<std::string> *warnings) const {
    SimConfig c;
    c.frames = raw_.sim_frames;
    c.seed = static_cast<std::uint64_t>(raw_.sim_seed);

    const auto scheme = parse_scheme(raw_.sim_scheme);
    if (!scheme)
        throw ConfigError("key 'sim.scheme': unknown scheme '" + raw_.sim_scheme + "'");
    c.scheme = *scheme;

    c.radius = raw_.sim_radius_m;
    c.speed = raw_.sim_speed_kmh / 3.6;
    c.bs_height = raw_.sim_bs_height_m;
    c.user_height = raw_.sim_user_height_m;

    if (raw_.sim_fading == "deterministic") c.fading = FadingModel::deterministic;
    else if (raw_.sim_fading == "rayleigh") c.fading = FadingModel::rayleigh;
    else throw ConfigError("key 'sim.fading': unknown model '" + raw_.sim_fading + "'");

    if (raw_.sim_truncate == "auto") c.truncate = TruncateMode::automatic;
    else if (raw_.sim_truncate == "on") c.truncate = TruncateMode::on;
    else if (raw_.sim_truncate == "off") c.truncate = TruncateMode::off;
    else throw ConfigError("key 'sim.truncate': expected auto/on/off, got '" +
                           raw_.sim_truncate + "'");

    c.channel.freq = raw_.chan_freq_hz;
    c.channel.bandwidth = raw_.chan_bandwidth_hz;
    c.channel.thermal_floor = dbm_to_watt(raw_.chan_noise_floor_dbm_hz);
    c.channel.noise_figure_power = raw_.chan_noise_figure_w;
    c.channel.ref_temperature = raw_.chan_ref_temperature_k;
    try {
        if (raw_.chan_absorption_per_m >= 0.0)
            c.channel.absorption = AbsorptionTable::constant(raw_.chan_absorption_per_m);
        else if (!raw_.chan_absorption_table.empty())
            c.channel.absorption = AbsorptionTable::from_file(raw_.chan_absorption_table);
        else
            c.channel.absorption = AbsorptionTable::builtin_default();
    } catch (const std::exception &e) {
        throw ConfigError(std::string("key 'chan.absorption_table': ") + e.what());
    }

    if (raw_.beam_n_h < 1 || raw_.beam_n_h > 1'000'000 || raw_.beam_n_v < 1 ||
        raw_.beam_n_v > 1'000'000)
        throw ConfigError("key 'beam.n_h'/'beam.n_v': counts must lie in [1, 1e6]");
    try {
        c.codebook = BeamCodebook::uniform(
            static_cast<int>(raw_.beam_n_h), static_cast<int>(raw_.beam_n_v),
            raw_.beam_azimuth_span_rad, raw_.beam_elevation_span_rad,
            raw_.beam_azimuth_lo_rad, raw_.beam_elevation_lo_rad);
    } catch (const std::exception &e) {
        throw ConfigError(std::string("beam.*: ") + e.what());
    }
    c.eps_sidelobe = raw_.beam_eps_sidelobe;

    c.budget.t_ti = raw_.frame_t_ti_s;
    c.budget.t_bt = raw_.frame_t_bt_s;
    c.budget.t_rq = raw_.frame_t_rq_s;
    c.budget.t_fb = raw_.frame_t_fb_s;
    c.budget.t_ac = raw_.frame_t_ac_s;

    c.gamma_th = from_db(raw_.link_gamma_th_db);
    c.gamma_dec = from_db(raw_.link_gamma_dec_db);
    c.xi_th = raw_.link_xi_th;
    if (raw_.link_history_m < 1)
        throw ConfigError("key 'link.history_m': must be >= 1");
    c.history_m = static_cast<std::size_t>(raw_.link_history_m);

    c.pa_enabled = raw_.pa_enabled;
    c.pa.delta_th = raw_.pa_delta_th;
    c.pa.eta1 = raw_.pa_eta1;
    c.pa.eta2 = raw_.pa_eta2;
    c.pa.p_be = dbm_to_watt(raw_.pa_p_be_dbm);
    c.pa.p_th = dbm_to_watt(raw_.pa_p_th_dbm);
    if (raw_.pa_q_levels < 1 || raw_.pa_q_levels > 100000)
        throw ConfigError("key 'pa.q_levels': must lie in [1, 1e5]");
    c.pa.q_levels = static_cast<int>(raw_.pa_q_levels);
    if (raw_.pa_s_q < 1 || raw_.pa_s_q > 1000000)
        throw ConfigError("key 'pa.s_q': must lie in [1, 1e6]");
    c.s_q = static_cast<int>(raw_.pa_s_q);
    c.reward_normalize = raw_.pa_reward_normalize;
    c.global_rate_max = raw_.pa_global_rate_max;

    c.beta = raw_.bt_beta;
    c.center_pre = raw_.bt_center_pre;
    c.init_top = raw_.bt_init_top;

    c.random_n = raw_.baseline_random_n;
    if (raw_.baseline_linear_window < 1 || raw_.baseline_linear_window > 1000000)
        throw ConfigError("key 'baseline.linear_window': must lie in [1, 1e6]");
    c.linear_window = static_cast<int>(raw_.baseline_linear_window);
    if (raw_.baseline_iter_split < 2 || raw_.baseline_iter_split > 1024)
        throw ConfigError("key 'baseline.iter_split': must lie in [2, 1024]");
    c.iter_split = static_cast<int>(raw_.baseline_iter_split);

    if (warnings && !c.channel.freq_in_scope())
        warnings->push_back("chan.freq_hz = " + format_double(raw_.chan_freq_hz) +
                            " lies outside the evaluated 0.1-1 THz band");

    try {
        c.validate();
    } catch (const std::exception &e) {
        throw ConfigError(e.what());
    }
    return c;
}

} // namespace eetbf
