#pragma once

#include <iosfwd>
#include <vector>

#include "eetbf/metrics.hpp"
#include "eetbf/rng.hpp"

namespace eetbf {

// Action-value table over quantized rate states and power levels. States run
// 0..state_levels inclusive (a rate equal to the reference maximum maps to the
// top state), actions are 1-based power levels.
class QTable {
  public:
    QTable(int state_levels, int q_levels);

    int state_levels() const { return s_q_; }
    int q_levels() const { return q_; }

    double at(int state, int action) const;
    void set(int state, int action, double value);
    double max_value(int state) const;
    int greedy_action(int state) const;  // ties go to the smallest action

    void save(std::ostream &out) const;
    static QTable load(std::istream &in);

    bool operator==(const QTable &other) const = default;

  private:
    std::size_t cell(int state, int action) const;
    int s_q_;
    int q_;
    std::vector<double> values_;
};

struct PaSettings {
    double delta_th = 0.15;              // exploration probability
    double eta1 = 0.5;                   // learning rate
    double eta2 = 0.5;                   // discount factor
    double p_be = 0.03162277660168379;   // per-beam power cap (15 dBm)
    double p_th = 0.5011872336272722;    // average-power cap (27 dBm)
    int q_levels = 20;                   // number of power levels
    void validate() const;
};

// Epsilon-greedy selection; the exploration draw precedes the action draw.
int choose_action(const QTable &q, int state, const PaSettings &settings, Rng &rng);

double action_to_power(int action, const PaSettings &settings);

// Scale the planned per-beam powers (and the data-phase power) down so the
// interval's average power fits the cap. Returns the applied scale (1 when
// the plan already fits). Assumes a single end-of-sweep feedback slot.
double normalize_total(std::vector<double> &per_beam, double &p_data,
                       const FrameBudget &budget, const PaSettings &settings);

// Quantize a rate against the window's best into a table state (half-up
// rounding, clamped). A non-positive reference maps everything to state 0.
int next_state(double rate, double r_max, int s_q);

void q_update(QTable &q, int state, int action, double reward, int state_next,
              const PaSettings &settings);

} // namespace eetbf
