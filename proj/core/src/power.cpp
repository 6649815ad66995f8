#include "eetbf/power.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace eetbf {

QTable::QTable(int state_levels, int q_levels) : s_q_(state_levels), q_(q_levels) {
    if (s_q_ < 1 || q_ < 1)
        throw std::invalid_argument("QTable: dimensions must be >= 1");
    values_.assign(static_cast<std::size_t>(s_q_ + 1) * static_cast<std::size_t>(q_), 0.0);
}

std::size_t QTable::cell(int state, int action) const {
    if (state < 0 || state > s_q_)
        throw std::out_of_range("QTable: state out of range");
    if (action < 1 || action > q_)
        throw std::out_of_range("QTable: action out of range");
    return static_cast<std::size_t>(state) * static_cast<std::size_t>(q_) +
           static_cast<std::size_t>(action - 1);
}

double QTable::at(int state, int action) const { return values_[cell(state, action)]; }

void QTable::set(int state, int action, double value) { values_[cell(state, action)] = value; }

double QTable::max_value(int state) const {
    double best = at(state, 1);
    for (int a = 2; a <= q_; ++a) best = std::max(best, at(state, a));
    return best;
}

int QTable::greedy_action(int state) const {
    int best = 1;
    double best_v = at(state, 1);
    for (int a = 2; a <= q_; ++a) {
        if (at(state, a) > best_v) {
            best_v = at(state, a);
            best = a;
        }
    }
    return best;
}

void QTable::save(std::ostream &out) const {
    out << s_q_ << ' ' << q_ << '\n';
    out.precision(17);
    for (int s = 0; s <= s_q_; ++s) {
        for (int a = 1; a <= q_; ++a) {
            if (a > 1) out << ' ';
            out << at(s, a);
        }
        out << '\n';
    }
}

QTable QTable::load(std::istream &in) {
    int s_q = 0, q = 0;
    if (!(in >> s_q >> q))
        throw std::runtime_error("QTable: malformed header");
    QTable table(s_q, q);
    for (int s = 0; s <= s_q; ++s)
        for (int a = 1; a <= q; ++a) {
            double v;
            if (!(in >> v))
                throw std::runtime_error("QTable: truncated value block");
            table.set(s, a, v);
        }
    return table;
}

void PaSettings::validate() const {
    if (delta_th < 0.0 || delta_th > 1.0)
        throw std::invalid_argument("PaSettings: delta_th must lie in [0, 1]");
    if (!(eta1 > 0.0) || eta1 > 1.0)
        throw std::invalid_argument("PaSettings: eta1 must lie in (0, 1]");
    if (eta2 < 0.0 || eta2 >= 1.0)
        throw std::invalid_argument("PaSettings: eta2 must lie in [0, 1)");
    if (!(p_be > 0.0))
        throw std::invalid_argument("PaSettings: p_be must be > 0");
    if (p_be > p_th)
        throw std::invalid_argument("PaSettings: p_be must not exceed p_th");
    if (q_levels < 1)
        throw std::invalid_argument("PaSettings: q_levels must be >= 1");
}

int choose_action(const QTable &q, int state, const PaSettings &settings, Rng &rng) {
    if (uniform01(rng) < settings.delta_th)
        return uniform_int(rng, 1, q.q_levels());
    return q.greedy_action(state);
}

double action_to_power(int action, const PaSettings &settings) {
    if (action < 1 || action > settings.q_levels)
        throw std::invalid_argument("action_to_power: action out of range");
    return static_cast<double>(action) * settings.p_be /
           static_cast<double>(settings.q_levels);
}

double normalize_total(std::vector<double> &per_beam, double &p_data,
                       const FrameBudget &budget, const PaSettings &settings) {
    const double latency =
        training_latency(static_cast<long>(per_beam.size()), 1, budget);
    const double planned = avg_power(per_beam, budget, latency, p_data);
    if (planned <= settings.p_th || planned <= 0.0) return 1.0;
    const double scale = settings.p_th / planned;
    for (double &p : per_beam) p *= scale;
    p_data *= scale;
    return scale;
}

int next_state(double rate, double r_max, int s_q) {
    if (s_q < 1)
        throw std::invalid_argument("next_state: s_q must be >= 1");
    if (!(r_max > 0.0)) return 0;
    const double x = rate * static_cast<double>(s_q) / r_max;
    const long s = static_cast<long>(std::floor(x + 0.5));
    return static_cast<int>(std::clamp(s, 0L, static_cast<long>(s_q)));
}

void q_update(QTable &q, int state, int action, double reward, int state_next,
              const PaSettings &settings) {
    const double old = q.at(state, action);
    const double target = reward + settings.eta2 * q.max_value(state_next);
    q.set(state, action, old + settings.eta1 * (target - old));
}

} // namespace eetbf
