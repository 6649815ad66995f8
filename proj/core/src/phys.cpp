#include "eetbf/phys.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace eetbf {

namespace {
constexpr double kPi = std::numbers::pi;
}

void AntennaConfig::validate() const {
    if (n_h < 1 || n_v < 1)
        throw std::invalid_argument("AntennaConfig: element counts must be >= 1");
    if (!(d_t > 0.0))
        throw std::invalid_argument("AntennaConfig: d_t must be > 0");
    if (!(eps_sidelobe > 0.0) || !(eps_sidelobe < 1.0))
        throw std::invalid_argument("AntennaConfig: eps_sidelobe must lie in (0, 1)");
}

AbsorptionTable::AbsorptionTable(std::vector<std::pair<double, double>> entries)
    : entries_(std::move(entries)) {
    if (entries_.empty())
        throw std::invalid_argument("AbsorptionTable: needs at least one entry");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].second < 0.0)
            throw std::invalid_argument("AbsorptionTable: coefficients must be >= 0");
        if (i > 0 && !(entries_[i].first > entries_[i - 1].first))
            throw std::invalid_argument("AbsorptionTable: frequencies must be strictly increasing");
    }
}

AbsorptionTable AbsorptionTable::constant(double coefficient) {
    return AbsorptionTable({{1.0, coefficient}});
}

AbsorptionTable AbsorptionTable::from_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("AbsorptionTable: cannot open '" + path + "'");
    std::vector<std::pair<double, double>> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue; // blank or comment-only line
        std::istringstream fields(line);
        double f, k;
        std::string extra;
        if (!(fields >> f >> k) || (fields >> extra))
            throw std::runtime_error("AbsorptionTable: '" + path + "' line " +
                                     std::to_string(lineno) + ": expected two numbers");
        entries.emplace_back(f, k);
    }
    if (entries.empty())
        throw std::runtime_error("AbsorptionTable: '" + path + "' holds no entries");
    return AbsorptionTable(std::move(entries));
}

AbsorptionTable AbsorptionTable::builtin_default() {
    // Order-of-magnitude coefficients for a standard atmosphere across the
    // evaluated band. Runs that need exact numbers set the coefficient
    // explicitly in the configuration.
    return AbsorptionTable({
        {0.1e12, 1.0e-4},
        {0.2e12, 7.0e-4},
        {0.3e12, 2.0e-3},
        {0.5e12, 2.0e-2},
        {0.7e12, 6.0e-2},
        {1.0e12, 2.0e-1},
    });
}

double AbsorptionTable::at(double freq_hz) const {
    if (entries_.empty())
        throw std::logic_error("AbsorptionTable: empty table");
    if (freq_hz <= entries_.front().first) return entries_.front().second;
    if (freq_hz >= entries_.back().first) return entries_.back().second;
    auto hi = std::upper_bound(entries_.begin(), entries_.end(), freq_hz,
                               [](double f, const auto &e) { return f < e.first; });
    auto lo = hi - 1;
    const double w = (freq_hz - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
}

void ChannelParams::validate() const {
    if (!(freq > 0.0))
        throw std::invalid_argument("ChannelParams: freq must be > 0");
    if (!(bandwidth > 0.0))
        throw std::invalid_argument("ChannelParams: bandwidth must be > 0");
    if (thermal_floor < 0.0 || noise_figure_power < 0.0 || ref_temperature < 0.0)
        throw std::invalid_argument("ChannelParams: power and temperature fields must be >= 0");
}

double Geometry::distance() const {
    const double dz = bs_height - user_z;
    return std::sqrt(user_x * user_x + user_y * user_y + dz * dz);
}

void Geometry::validate() const {
    if (!(distance() > 0.0))
        throw std::invalid_argument("Geometry: user must not sit on the BS");
}

BeamCodebook BeamCodebook::uniform(int beams_h, int beams_v,
                                   double azimuth_span, double elevation_span,
                                   double azimuth_lo, double elevation_lo) {
    if (beams_h < 1 || beams_v < 1)
        throw std::invalid_argument("BeamCodebook: beam counts must be >= 1");
    if (!(azimuth_span > 0.0) || !(elevation_span > 0.0))
        throw std::invalid_argument("BeamCodebook: spans must be > 0");
    BeamCodebook cb;
    cb.azimuth_span = azimuth_span;
    cb.elevation_span = elevation_span;
    cb.theta_h = azimuth_span / beams_h;
    cb.theta_v = elevation_span / beams_v;
    cb.h_directions.reserve(beams_h);
    cb.v_directions.reserve(beams_v);
    for (int i = 0; i < beams_h; ++i)
        cb.h_directions.push_back(azimuth_lo + (i + 0.5) * cb.theta_h);
    for (int j = 0; j < beams_v; ++j)
        cb.v_directions.push_back(elevation_lo + (j + 0.5) * cb.theta_v);
    return cb;
}

BeamCodebook BeamCodebook::from_antennas(const AntennaConfig &antenna,
                                         double azimuth_span, double elevation_span,
                                         double azimuth_lo, double elevation_lo) {
    antenna.validate();
    const double th = beamwidth(antenna.n_h, antenna.d_t);
    const double tv = beamwidth(antenna.n_v, antenna.d_t);
    // nudge the ratio so that exact tilings are not lost to the last ulp
    const int nh = std::max(1, static_cast<int>(std::floor(azimuth_span / th + 1e-9)));
    const int nv = std::max(1, static_cast<int>(std::floor(elevation_span / tv + 1e-9)));
    return uniform(nh, nv, azimuth_span, elevation_span, azimuth_lo, elevation_lo);
}

void BeamCodebook::validate() const {
    if (h_directions.empty() || v_directions.empty())
        throw std::invalid_argument("BeamCodebook: empty direction list");
    if (!(theta_h > 0.0) || !(theta_v > 0.0))
        throw std::invalid_argument("BeamCodebook: beamwidths must be > 0");
    auto check_axis = [](const std::vector<double> &dirs, double theta, const char *axis) {
        for (std::size_t k = 1; k < dirs.size(); ++k) {
            const double gap = dirs[k] - dirs[k - 1];
            if (!(gap > 0.0))
                throw std::invalid_argument(std::string("BeamCodebook: ") + axis +
                                            " directions must be strictly increasing");
            if (std::abs(gap - theta) > 1e-9 * std::max(1.0, std::abs(theta)))
                throw std::invalid_argument(std::string("BeamCodebook: ") + axis +
                                            " spacing must equal the beamwidth");
        }
    };
    check_axis(h_directions, theta_h, "azimuth");
    check_axis(v_directions, theta_v, "elevation");
}

double beamwidth(int n_elements, double d_t) {
    if (n_elements < 1)
        throw std::invalid_argument("beamwidth: n_elements must be >= 1");
    if (!(d_t > 0.0))
        throw std::invalid_argument("beamwidth: d_t must be > 0");
    return 1.772 * kPi * d_t / n_elements;
}

Boresight boresight(const Geometry &geo) {
    return {std::atan2(geo.user_y, geo.user_x),
            std::atan2(geo.distance(), geo.user_z - geo.bs_height)};
}

double wrap_angle(double angle) {
    double a = std::fmod(angle, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

double beam_gain(double beam_direction, double beamwidth, double boresight, double eps) {
    if (!(beamwidth > 0.0))
        throw std::invalid_argument("beam_gain: beamwidth must be > 0");
    const double offset = std::abs(wrap_angle(beam_direction - boresight));
    return offset <= 0.5 * beamwidth ? 2.0 * kPi / beamwidth : eps;
}

double path_gain(const ChannelParams &params, double distance, double rho) {
    if (!(distance > 0.0))
        throw std::invalid_argument("path_gain: distance must be > 0");
    if (rho < 0.0)
        throw std::invalid_argument("path_gain: fading sample must be >= 0");
    const double spread = kSpeedOfLight / (4.0 * kPi * params.freq * distance);
    return rho * spread * spread * std::exp(-params.absorption.at(params.freq) * distance);
}

double molecular_noise(const ChannelParams &params, double distance) {
    if (distance < 0.0)
        throw std::invalid_argument("molecular_noise: distance must be >= 0");
    const double kd = params.absorption.at(params.freq) * distance;
    return kBoltzmann * params.ref_temperature * (1.0 - std::exp(-kd));
}

double sample_fading(FadingModel model, Rng &rng) {
    switch (model) {
        case FadingModel::deterministic:
            return 1.0;
        case FadingModel::rayleigh:
            // |h|^2 with h ~ CN(0,1): exponential with unit mean.
            return -std::log(1.0 - uniform01(rng));
    }
    throw std::invalid_argument("sample_fading: unknown model");
}

} // namespace eetbf
