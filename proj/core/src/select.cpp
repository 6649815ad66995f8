#include "eetbf/select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace eetbf {

void AxisHistory::validate() const {
    if (indexes.size() != snrs.size())
        throw std::invalid_argument("AxisHistory: index and snr lengths differ");
}

long BeamPolicy::beam_count() const {
    if (!explicit_beams.empty()) return static_cast<long>(explicit_beams.size());
    return static_cast<long>(h_indexes.size()) * static_cast<long>(v_indexes.size());
}

std::vector<std::pair<int, int>> BeamPolicy::beams() const {
    if (!explicit_beams.empty()) return explicit_beams;
    std::vector<std::pair<int, int>> out;
    out.reserve(h_indexes.size() * v_indexes.size());
    for (int i : h_indexes)
        for (int j : v_indexes) out.emplace_back(i, j);
    return out;
}

void BeamPolicy::validate(int n_h, int n_v) const {
    auto check_axis = [](const std::vector<int> &idx, int len, Direction dir,
                         const char *axis) {
        std::unordered_set<int> seen;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (idx[k] < 0 || idx[k] >= len)
                throw std::invalid_argument(std::string("BeamPolicy: ") + axis +
                                            " index out of bounds");
            if (!seen.insert(idx[k]).second)
                throw std::invalid_argument(std::string("BeamPolicy: duplicate ") +
                                            axis + " index");
            const bool contiguous = dir == Direction::forward ||
                                    dir == Direction::backward ||
                                    dir == Direction::bidirectional ||
                                    dir == Direction::exhaustive;
            if (contiguous && k > 0 && idx[k] != idx[k - 1] + 1)
                throw std::invalid_argument(std::string("BeamPolicy: ") + axis +
                                            " set not contiguous");
        }
    };
    check_axis(h_indexes, n_h, h_direction, "azimuth");
    check_axis(v_indexes, n_v, v_direction, "elevation");
    std::unordered_set<long> seen;
    for (const auto &[i, j] : explicit_beams) {
        if (i < 0 || i >= n_h || j < 0 || j >= n_v)
            throw std::invalid_argument("BeamPolicy: explicit beam out of bounds");
        if (!seen.insert(static_cast<long>(i) * n_v + j).second)
            throw std::invalid_argument("BeamPolicy: duplicate explicit beam");
    }
}

BeamPolicy exhaustive_policy(const BeamCodebook &codebook) {
    BeamPolicy p;
    p.h_indexes.resize(codebook.count_h());
    p.v_indexes.resize(codebook.count_v());
    std::iota(p.h_indexes.begin(), p.h_indexes.end(), 0);
    std::iota(p.v_indexes.begin(), p.v_indexes.end(), 0);
    p.h_direction = Direction::exhaustive;
    p.v_direction = Direction::exhaustive;
    return p;
}

std::vector<int> axis_diffs(const AxisHistory &hist) {
    hist.validate();
    if (hist.indexes.size() < 2) return {};
    std::vector<int> d(hist.indexes.size() - 1);
    for (std::size_t k = 0; k + 1 < hist.indexes.size(); ++k)
        d[k] = hist.indexes[k + 1] - hist.indexes[k];
    return d;
}

std::optional<SpanParams> span_params(const AxisHistory &hist, double gamma_th,
                                      bool center_pre) {
    hist.validate();
    if (hist.indexes.empty())
        throw std::invalid_argument("span_params: empty history");
    const int n = static_cast<int>(hist.indexes.size());
    int found = 0;
    for (int tau = 1; tau <= n; ++tau) {
        if (hist.snrs[n - tau] > gamma_th) {
            found = tau;
            break;
        }
    }
    if (found == 0) return std::nullopt;  // every remembered frame failed

    int max_abs_diff = 0;
    if (n >= 2)
        for (int d : axis_diffs(hist)) max_abs_diff = std::max(max_abs_diff, std::abs(d));

    SpanParams sp;
    sp.span = found;
    const int anchor_age = center_pre ? std::max(1, found - 1) : found;
    sp.center = hist.indexes[n - anchor_age];
    sp.width = found * max_abs_diff;
    return sp;
}

Direction classify_direction(std::span<const int> diffs) {
    if (diffs.empty()) return Direction::forward;
    int mn = diffs[0], mx = diffs[0];
    for (int d : diffs) {
        mn = std::min(mn, d);
        mx = std::max(mx, d);
    }
    if (mn >= 0) return Direction::forward;
    if (mx < 0) return Direction::backward;
    return Direction::bidirectional;
}

std::pair<std::vector<int>, Direction> directional_set(int center, int width,
                                                       std::span<const int> diffs,
                                                       int axis_len) {
    if (width < 0)
        throw std::invalid_argument("directional_set: width must be >= 0");
    if (axis_len < 1)
        throw std::invalid_argument("directional_set: empty axis");
    const Direction dir = classify_direction(diffs);
    long lo = center, hi = center;
    if (dir == Direction::forward) hi += width;
    else if (dir == Direction::backward) lo -= width;
    else {
        lo -= width;
        hi += width;
    }
    lo = std::clamp<long>(lo, 0, axis_len - 1);
    hi = std::clamp<long>(hi, 0, axis_len - 1);
    std::vector<int> set;
    set.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long k = lo; k <= hi; ++k) set.push_back(static_cast<int>(k));
    return {std::move(set), dir};
}

std::optional<BeamPolicy> eetbf_bt(const AxisHistory &h_hist,
                                   const AxisHistory &v_hist,
                                   const BeamCodebook &codebook, double gamma_th,
                                   bool center_pre) {
    if (h_hist.indexes.size() < 2 || v_hist.indexes.size() < 2)
        return std::nullopt;  // not enough history to learn a trend
    const auto sp_h = span_params(h_hist, gamma_th, center_pre);
    const auto sp_v = span_params(v_hist, gamma_th, center_pre);
    if (!sp_h || !sp_v) return std::nullopt;

    const auto dh = axis_diffs(h_hist);
    const auto dv = axis_diffs(v_hist);
    auto [h_set, h_dir] = directional_set(sp_h->center, sp_h->width, dh, codebook.count_h());
    auto [v_set, v_dir] = directional_set(sp_v->center, sp_v->width, dv, codebook.count_v());

    BeamPolicy p;
    p.h_indexes = std::move(h_set);
    p.v_indexes = std::move(v_set);
    p.h_direction = h_dir;
    p.v_direction = v_dir;
    return p;
}

double estimate_channel(double snr_value, double power, double gain_h,
                        double gain_v, double noise) {
    if (!(power > 0.0) || !(gain_h > 0.0) || !(gain_v > 0.0))
        throw std::invalid_argument("estimate_channel: power and gains must be > 0");
    if (!(noise > 0.0))
        throw std::invalid_argument("estimate_channel: noise must be > 0");
    if (snr_value < 0.0)
        throw std::invalid_argument("estimate_channel: snr must be >= 0");
    return snr_value * noise / (power * gain_h * gain_v);
}

ChannelEstimate predict_channel(int n_h, int n_v, std::span<const AgedGrid> history,
                                double beta) {
    if (n_h < 1 || n_v < 1)
        throw std::invalid_argument("predict_channel: grid must be non-empty");
    if (!(beta > 0.0) || !(beta < 1.0))
        throw std::invalid_argument("predict_channel: beta must lie in (0, 1)");
    const std::size_t total = static_cast<std::size_t>(n_h) * static_cast<std::size_t>(n_v);
    std::vector<double> sum(total, 0.0);
    std::vector<int> count(total, 0);
    for (const auto &g : history) {
        if (g.tau < 1)
            throw std::invalid_argument("predict_channel: grid age must be >= 1");
        if (g.gain.size() != total)
            throw std::invalid_argument("predict_channel: grid size mismatch");
        const double w = std::pow(beta, static_cast<double>(g.tau));
        for (std::size_t b = 0; b < total; ++b) {
            if (g.gain[b] > 0.0) {
                sum[b] += w * g.gain[b];
                ++count[b];
            }
        }
    }
    ChannelEstimate est;
    est.n_h = n_h;
    est.n_v = n_v;
    est.gain.resize(total, 0.0);
    est.valid.resize(total, 0);
    for (std::size_t b = 0; b < total; ++b) {
        if (count[b] > 0) {
            est.gain[b] = sum[b] / count[b];
            est.valid[b] = 1;
        }
    }
    return est;
}

long max_training_beams(const FrameBudget &budget) {
    const double q = (budget.t_ti - budget.t_rq - budget.t_fb - budget.t_ac) / budget.t_bt;
    // +1e-9 absorbs division round-off on exact-quotient budgets
    return std::max(0L, static_cast<long>(std::floor(q + 1e-9)));
}

std::optional<BeamPolicy> init_top_beams(const ChannelEstimate &est, long n_be,
                                         double p_be, double gamma_th,
                                         double gamma_dec, double noise,
                                         double gain_h, double gain_v) {
    if (!(p_be > 0.0) || !(gain_h > 0.0) || !(gain_v > 0.0))
        throw std::invalid_argument("init_top_beams: power and gains must be > 0");
    if (!(noise > 0.0))
        throw std::invalid_argument("init_top_beams: noise must be > 0");
    if (n_be < 1) return std::nullopt;

    struct Cand {
        double metric;
        int i, j;
    };
    std::vector<Cand> cands;
    for (int i = 0; i < est.n_h; ++i) {
        for (int j = 0; j < est.n_v; ++j) {
            if (!est.valid_at(i, j)) continue;
            const double quality = est.at(i, j) * gain_h * gain_v;
            if (p_be * quality < gamma_dec * noise) continue;  // undecodable
            cands.push_back({quality, i, j});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand &a, const Cand &b) {
        if (a.metric != b.metric) return a.metric > b.metric;
        return std::pair{a.i, a.j} < std::pair{b.i, b.j};
    });
    if (cands.size() > static_cast<std::size_t>(n_be)) cands.resize(static_cast<std::size_t>(n_be));

    bool feasible = false;
    for (const auto &c : cands)
        if (p_be * c.metric >= gamma_th * noise) {
            feasible = true;
            break;
        }
    if (cands.empty() || !feasible) return std::nullopt;

    BeamPolicy p;
    p.explicit_beams.reserve(cands.size());
    for (const auto &c : cands) p.explicit_beams.emplace_back(c.i, c.j);
    return p;
}

BeamPolicy random_policy(const BeamCodebook &codebook, long n, Rng &rng) {
    const long total = codebook.total_beams();
    if (n < 1)
        throw std::invalid_argument("random_policy: need at least one beam");
    if (n > total)
        throw std::invalid_argument(
            "random_policy: cannot pick more distinct beams than the codebook holds");
    std::vector<long> idx(static_cast<std::size_t>(total));
    std::iota(idx.begin(), idx.end(), 0L);
    // partial Fisher-Yates: only the first n slots are needed
    for (long k = 0; k < n; ++k) {
        const long j = k + static_cast<long>(uniform_int(
                               rng, 0, static_cast<int>(total - 1 - k)));
        std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(j)]);
    }
    BeamPolicy p;
    p.explicit_beams.reserve(static_cast<std::size_t>(n));
    const int n_v = codebook.count_v();
    for (long k = 0; k < n; ++k)
        p.explicit_beams.emplace_back(static_cast<int>(idx[static_cast<std::size_t>(k)] / n_v),
                                      static_cast<int>(idx[static_cast<std::size_t>(k)] % n_v));
    return p;
}

BeamPolicy linear_policy(const BeamCodebook &codebook, int window, int prev_i,
                         int prev_j) {
    if (window < 1)
        throw std::invalid_argument("linear_policy: window must be >= 1");
    auto axis_window = [window](int prev, int len) {
        const int w = std::min(window, len);
        int lo = prev - (w - 1) / 2;
        lo = std::clamp(lo, 0, len - w);
        std::vector<int> set(static_cast<std::size_t>(w));
        std::iota(set.begin(), set.end(), lo);
        return set;
    };
    BeamPolicy p;
    p.h_indexes = axis_window(prev_i, codebook.count_h());
    p.v_indexes = axis_window(prev_j, codebook.count_v());
    return p;
}

namespace {

// split [lo, hi] into at most `parts` contiguous chunks of near-equal size
std::vector<std::pair<int, int>> split_range(int lo, int hi, int parts) {
    const int len = hi - lo + 1;
    const int m = std::min(parts, len);
    std::vector<std::pair<int, int>> chunks;
    chunks.reserve(static_cast<std::size_t>(m));
    const int base = len / m, extra = len % m;
    int start = lo;
    for (int k = 0; k < m; ++k) {
        const int size = base + (k < extra ? 1 : 0);
        chunks.emplace_back(start, start + size - 1);
        start += size;
    }
    return chunks;
}

} // namespace

SearchOutcome iterative_search(const BeamCodebook &codebook, int split,
                               const SectorMeasure &measure, long max_probes) {
    if (split < 2)
        throw std::invalid_argument("iterative_search: split must be >= 2");
    const int n_h = codebook.count_h(), n_v = codebook.count_v();
    SearchOutcome out;
    int h_lo = 0, h_hi = n_h - 1, v_lo = 0, v_hi = n_v - 1;

    if (n_h == 1 && n_v == 1) {
        out.best_snr = measure({0, 0, 0, 0});
        out.beams_trained = 1;
        return out;
    }

    double winner_snr = 0.0;
    while (!(h_lo == h_hi && v_lo == v_hi)) {
        const auto hc = split_range(h_lo, h_hi, split);
        const auto vc = split_range(v_lo, v_hi, split);
        const long probes = static_cast<long>(hc.size()) * static_cast<long>(vc.size());
        if (max_probes > 0 && out.beams_trained + probes > max_probes) {
            out.budget_hit = true;
            break;
        }
        std::size_t best_a = 0, best_b = 0;
        double best = 0.0;
        bool first = true;
        for (std::size_t a = 0; a < hc.size(); ++a) {
            for (std::size_t b = 0; b < vc.size(); ++b) {
                const double s = measure({hc[a].first, hc[a].second,
                                          vc[b].first, vc[b].second});
                if (first || s > best) {
                    best = s;
                    best_a = a;
                    best_b = b;
                    first = false;
                }
            }
        }
        out.beams_trained += probes;
        h_lo = hc[best_a].first;
        h_hi = hc[best_a].second;
        v_lo = vc[best_b].first;
        v_hi = vc[best_b].second;
        winner_snr = best;
    }
    out.best_i = h_lo;
    out.best_j = v_lo;
    // the final winner is the leaf sector itself unless the budget cut us off
    out.best_snr = out.budget_hit ? 0.0 : winner_snr;
    return out;
}

SearchOutcome binary_search(const BeamCodebook &codebook,
                            const SectorMeasure &measure, long max_probes) {
    const int n_h = codebook.count_h(), n_v = codebook.count_v();
    SearchOutcome out;
    int h_lo = 0, h_hi = n_h - 1, v_lo = 0, v_hi = n_v - 1;

    if (n_h == 1 && n_v == 1) {
        out.best_snr = measure({0, 0, 0, 0});
        out.beams_trained = 1;
        return out;
    }

    while (h_lo < h_hi || v_lo < v_hi) {
        std::vector<int> hp, vp;
        if (h_lo < h_hi) {
            const int hm = (h_lo + h_hi) / 2;
            hp = {hm, hm + 1};
        } else {
            hp = {h_lo};
        }
        if (v_lo < v_hi) {
            const int vm = (v_lo + v_hi) / 2;
            vp = {vm, vm + 1};
        } else {
            vp = {v_lo};
        }
        const long probes = static_cast<long>(hp.size()) * static_cast<long>(vp.size());
        if (max_probes > 0 && out.beams_trained + probes > max_probes) {
            out.budget_hit = true;
            break;
        }
        double s[2][2] = {{0, 0}, {0, 0}};
        for (std::size_t a = 0; a < hp.size(); ++a)
            for (std::size_t b = 0; b < vp.size(); ++b)
                s[a][b] = measure({hp[a], hp[a], vp[b], vp[b]});
        out.beams_trained += probes;

        if (hp.size() == 2) {
            const double left = std::max(s[0][0], vp.size() == 2 ? s[0][1] : s[0][0]);
            const double right = std::max(s[1][0], vp.size() == 2 ? s[1][1] : s[1][0]);
            if (left >= right) h_hi = hp[0];
            else h_lo = hp[1];
        }
        if (vp.size() == 2) {
            const double low = std::max(s[0][0], hp.size() == 2 ? s[1][0] : s[0][0]);
            const double high = std::max(s[0][1], hp.size() == 2 ? s[1][1] : s[0][1]);
            if (low >= high) v_hi = vp[0];
            else v_lo = vp[1];
        }
        if (h_lo == h_hi && v_lo == v_hi) {
            // the surviving beam was one of this round's probes
            for (std::size_t a = 0; a < hp.size(); ++a)
                for (std::size_t b = 0; b < vp.size(); ++b)
                    if (hp[a] == h_lo && vp[b] == v_lo) out.best_snr = s[a][b];
        }
    }
    out.best_i = h_lo;
    out.best_j = v_lo;
    if (out.budget_hit) out.best_snr = 0.0;
    return out;
}

} // namespace eetbf
