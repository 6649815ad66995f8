#ifndef EETBF_PHYS_HPP
#define EETBF_PHYS_HPP

#include <string>
#include <utility>
#include <vector>

#include "eetbf/rng.hpp"

namespace eetbf {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K

/// Uniform planar array at the base station.
struct AntennaConfig {
    int n_h = 1;               // horizontal elements
    int n_v = 1;               // vertical elements
    double d_t = 1.0;          // beam broadening factor set by element spacing
    double eps_sidelobe = 0.1; // flat sidelobe gain, linear

    void validate() const;
};

/// Frequency -> molecular absorption coefficient (1/m), piecewise linear.
class AbsorptionTable {
  public:
    AbsorptionTable() = default;
    explicit AbsorptionTable(std::vector<std::pair<double, double>> entries);

    static AbsorptionTable constant(double coefficient);
    /// Text format: one "frequency_hz coefficient_per_m" pair per line,
    /// '#' starts a comment.
    static AbsorptionTable from_file(const std::string &path);
    /// Representative coefficients for the 0.1-1 THz window, used when no
    /// table file is configured.
    static AbsorptionTable builtin_default();

    /// Linear interpolation between knots; clamps outside the covered range.
    double at(double freq_hz) const;

    const std::vector<std::pair<double, double>> &entries() const { return entries_; }

  private:
    std::vector<std::pair<double, double>> entries_;
};

struct ChannelParams {
    double freq = 0.3e12;               // carrier, Hz
    AbsorptionTable absorption = AbsorptionTable::constant(0.0);
    double bandwidth = 1e9;             // Hz
    double thermal_floor = 3.9810717055349565e-21; // W/Hz (-174 dBm/Hz)
    double noise_figure_power = 0.0;    // additive hardware noise, W
    double ref_temperature = 290.0;     // K

    void validate() const;
    /// True when freq sits inside the 0.1-1 THz window this model targets.
    bool freq_in_scope() const { return freq >= 0.1e12 && freq <= 1e12; }
};

/// BS at (0, 0, bs_height), user anywhere with positive distance.
struct Geometry {
    double bs_height = 10.0;
    double user_x = 0.0, user_y = 0.0, user_z = 1.5;

    double distance() const;
    void validate() const;
};

struct Boresight {
    double azimuth;   // rad
    double elevation; // rad
};

/// Angular grid of candidate 3D beams. Mainlobes tile the configured spans:
/// adjacent directions are exactly one beamwidth apart.
struct BeamCodebook {
    std::vector<double> h_directions; // rad, strictly increasing
    std::vector<double> v_directions;
    double theta_h = 0.0;             // horizontal beamwidth, rad
    double theta_v = 0.0;
    double azimuth_span = 0.0;
    double elevation_span = 0.0;

    static BeamCodebook uniform(int beams_h, int beams_v,
                                double azimuth_span, double elevation_span,
                                double azimuth_lo, double elevation_lo);
    /// Sizes the grid from the array geometry: per-axis beam count is the
    /// number of beamwidth(n, d_t) lobes that tile the span.
    static BeamCodebook from_antennas(const AntennaConfig &antenna,
                                      double azimuth_span, double elevation_span,
                                      double azimuth_lo, double elevation_lo);

    int count_h() const { return static_cast<int>(h_directions.size()); }
    int count_v() const { return static_cast<int>(v_directions.size()); }
    long total_beams() const { return static_cast<long>(h_directions.size()) * count_v(); }

    void validate() const;
};

enum class FadingModel { deterministic, rayleigh };

/// Beamwidth of an n-element axis: 1.772*pi*d_t / n.
double beamwidth(int n_elements, double d_t);

/// Quadrant-correct direction from the BS to the user. The elevation uses
/// atan2(distance, z - h), so a user level with the BS sits at pi/2 and
/// users below it map into (pi/2, pi).
Boresight boresight(const Geometry &geo);

/// Mainlobe gain 2*pi/beamwidth when the offset to the boresight (wrapped to
/// (-pi, pi]) is at most half a beamwidth, sidelobe gain eps otherwise.
/// The boundary offset of exactly beamwidth/2 counts as mainlobe.
double beam_gain(double beam_direction, double beamwidth, double boresight, double eps);

/// rho * (c / (4*pi*f*d))^2 * exp(-K(f)*d)
double path_gain(const ChannelParams &params, double distance, double rho);

/// Molecular noise density k_B*T0*(1 - exp(-K(f)*d)), W/Hz.
double molecular_noise(const ChannelParams &params, double distance);

/// Small-scale power factor. deterministic -> exactly 1; rayleigh -> a
/// unit-mean exponential draw.
double sample_fading(FadingModel model, Rng &rng);

/// Wraps an angle difference into (-pi, pi].
double wrap_angle(double angle);

} // namespace eetbf

#endif
