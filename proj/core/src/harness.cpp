#include "eetbf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace eetbf {

namespace fs = std::filesystem;

const char *const kFramesCsvHeader =
    "frame,t_sec,scheme,n_beams,latency_s,snr_db,rate_bps,avg_power_w,"
    "ee_bit_per_joule,accuracy,beam_i,beam_j";

std::string format_csv_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Summary summarize(std::span<const MetricRecord> records, double window_fraction) {
    if (records.empty())
        throw std::invalid_argument("summarize: no records");
    if (!(window_fraction > 0.0) || window_fraction > 1.0)
        throw std::invalid_argument("summarize: window fraction must lie in (0, 1]");
    const long total = static_cast<long>(records.size());
    const long window = std::max(
        1L, static_cast<long>(std::floor(window_fraction * static_cast<double>(total))));
    const long start = total - window;

    Summary s;
    s.frames_total = total;
    s.frames_window = window;
    double snr_linear = 0.0;
    for (long k = start; k < total; ++k) {
        const auto &r = records[static_cast<std::size_t>(k)];
        s.latency_s += r.latency_s;
        snr_linear += from_db(r.snr_db);
        s.rate_bps += r.rate_bps;
        s.avg_power_w += r.avg_power_w;
        s.ee_bit_per_joule += r.ee_bit_per_joule;
        s.accuracy += r.accuracy;
    }
    const double n = static_cast<double>(window);
    s.latency_s /= n;
    s.snr_db = to_db(snr_linear / n);
    s.rate_bps /= n;
    s.avg_power_w /= n;
    s.ee_bit_per_joule /= n;
    s.accuracy /= n;
    return s;
}

void write_frames_csv(const fs::path &path, std::span<const MetricRecord> records) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << kFramesCsvHeader << '\n';
    for (const auto &r : records) {
        out << r.frame << ',' << format_csv_double(r.t_sec) << ',' << r.scheme << ','
            << r.n_beams << ',' << format_csv_double(r.latency_s) << ','
            << format_csv_double(r.snr_db) << ',' << format_csv_double(r.rate_bps)
            << ',' << format_csv_double(r.avg_power_w) << ','
            << format_csv_double(r.ee_bit_per_joule) << ','
            << format_csv_double(r.accuracy) << ',' << r.beam_i << ',' << r.beam_j
            << '\n';
    }
}

namespace {

std::vector<std::string> split(const std::string &line, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(sep, pos);
        if (next == std::string::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

double field_double(const std::string &s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::runtime_error("bad CSV number '" + s + "'");
    return v;
}

long field_long(const std::string &s) {
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::runtime_error("bad CSV integer '" + s + "'");
    return v;
}

} // namespace

std::vector<MetricRecord> read_frames_csv(const fs::path &path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != kFramesCsvHeader)
        throw std::runtime_error("unexpected CSV header in '" + path.string() + "'");
    std::vector<MetricRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 12)
            throw std::runtime_error("bad CSV row in '" + path.string() + "'");
        MetricRecord r;
        r.frame = field_long(f[0]);
        r.t_sec = field_double(f[1]);
        r.scheme = f[2];
        r.n_beams = field_long(f[3]);
        r.latency_s = field_double(f[4]);
        r.snr_db = field_double(f[5]);
        r.rate_bps = field_double(f[6]);
        r.avg_power_w = field_double(f[7]);
        r.ee_bit_per_joule = field_double(f[8]);
        r.accuracy = field_double(f[9]);
        r.beam_i = static_cast<int>(field_long(f[10]));
        r.beam_j = static_cast<int>(field_long(f[11]));
        records.push_back(std::move(r));
    }
    return records;
}

namespace {

void run_jobs(int workers, long n, const std::function<void(long)> &fn) {
    workers = std::clamp(workers, 1, 256);
    if (workers == 1 || n <= 1) {
        for (long k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    const int count = static_cast<int>(std::min<long>(workers, n));
    pool.reserve(static_cast<std::size_t>(count));
    for (int w = 0; w < count; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const long k = next.fetch_add(1);
                if (k >= n) break;
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!error) error = std::current_exception();
                    break;
                }
            }
        });
    }
    for (auto &t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

void apply_sweep_value(ConfigMap &cfg, const std::string &param,
                       const std::string &value) {
    if (param == "velocity") {
        cfg.set("sim.speed_kmh", value);
    } else if (param == "t_ti") {
        cfg.set("frame.t_ti_s", value);
    } else if (param == "freq") {
        cfg.set("chan.freq_hz", value);
    } else if (param == "radius") {
        cfg.set("sim.radius_m", value);
    } else if (param == "scheme") {
        cfg.set("sim.scheme", value);
    } else if (param == "n_beams") {
        double total = 0.0;
        const auto res = std::from_chars(value.data(), value.data() + value.size(), total);
        if (res.ec != std::errc{} || res.ptr != value.data() + value.size() || total < 1)
            throw ConfigError("sweep value '" + value + "' is not a beam count");
        const long per_axis = std::max(1L, std::lround(std::sqrt(total)));
        cfg.set("beam.n_h", std::to_string(per_axis));
        cfg.set("beam.n_v", std::to_string(per_axis));
    } else {
        throw ConfigError("unknown sweep parameter '" + param +
                          "' (expected velocity, t_ti, n_beams, freq, radius or scheme)");
    }
}

struct Aggregate {
    double mean = 0.0;
    double se = 0.0;
};

Aggregate aggregate(const std::vector<double> &xs) {
    Aggregate a;
    if (xs.empty()) return a;
    for (double x : xs) a.mean += x;
    a.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double var = 0.0;
        for (double x : xs) var += (x - a.mean) * (x - a.mean);
        var /= static_cast<double>(xs.size() - 1);
        a.se = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return a;
}

bool per_beam_feedback(Scheme scheme) {
    return scheme == Scheme::iterative || scheme == Scheme::linear ||
           scheme == Scheme::binary;
}

void write_text_file(const fs::path &path, const std::string &text) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

std::string format_tick(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

void write_svg_chart(const fs::path &path, const std::string &title,
                     const std::string &x_label, const std::string &y_label,
                     std::vector<SvgSeries> series) {
    static const char *const palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                          "#9467bd", "#ff7f0e", "#8c564b"};
    const double width = 820, height = 520;
    const double ml = 90, mr = 30, mt = 50, mb = 70;
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    bool first = true;
    for (auto &s : series) {
        std::sort(s.points.begin(), s.points.end());
        for (const auto &[x, y] : s.points) {
            if (first) {
                x_min = x_max = x;
                y_min = y_max = y;
                first = false;
            }
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + (y_min == 0.0 ? 1.0 : std::abs(y_min) * 0.1);
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    auto sx = [&](double x) {
        return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr);
    };
    auto sy = [&](double y) {
        return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb);
    };

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
        << "' height='" << height << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<text x='" << width / 2 << "' y='28' text-anchor='middle' "
           "font-family='sans-serif' font-size='17'>" << title << "</text>\n";
    // axes
    svg << "<line x1='" << ml << "' y1='" << height - mb << "' x2='" << width - mr
        << "' y2='" << height - mb << "' stroke='black'/>\n"
        << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
        << height - mb << "' stroke='black'/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x_min + (x_max - x_min) * k / 4.0;
        const double yv = y_min + (y_max - y_min) * k / 4.0;
        svg << "<line x1='" << sx(xv) << "' y1='" << height - mb << "' x2='" << sx(xv)
            << "' y2='" << height - mb + 5 << "' stroke='black'/>\n"
            << "<text x='" << sx(xv) << "' y='" << height - mb + 20
            << "' text-anchor='middle' font-family='sans-serif' font-size='12'>"
            << format_tick(xv) << "</text>\n"
            << "<line x1='" << ml - 5 << "' y1='" << sy(yv) << "' x2='" << ml
            << "' y2='" << sy(yv) << "' stroke='black'/>\n"
            << "<text x='" << ml - 8 << "' y='" << sy(yv) + 4
            << "' text-anchor='end' font-family='sans-serif' font-size='12'>"
            << format_tick(yv) << "</text>\n";
    }
    svg << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 20
        << "' text-anchor='middle' font-family='sans-serif' font-size='14'>"
        << x_label << "</text>\n"
        << "<text x='22' y='" << (mt + height - mb) / 2
        << "' text-anchor='middle' font-family='sans-serif' font-size='14' "
           "transform='rotate(-90 22 " << (mt + height - mb) / 2 << ")'>" << y_label
        << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char *color = palette[s % 6];
        svg << "<polyline fill='none' stroke='" << color << "' stroke-width='2' points='";
        for (const auto &[x, y] : series[s].points)
            svg << sx(x) << ',' << sy(y) << ' ';
        svg << "'/>\n";
        for (const auto &[x, y] : series[s].points)
            svg << "<circle cx='" << sx(x) << "' cy='" << sy(y) << "' r='3' fill='"
                << color << "'/>\n";
        // legend entry
        const double ly = mt + 18.0 * static_cast<double>(s);
        svg << "<line x1='" << width - mr - 150 << "' y1='" << ly << "' x2='"
            << width - mr - 120 << "' y2='" << ly << "' stroke='" << color
            << "' stroke-width='2'/>\n"
            << "<text x='" << width - mr - 112 << "' y='" << ly + 4
            << "' font-family='sans-serif' font-size='12'>" << series[s].name
            << "</text>\n";
    }
    svg << "</svg>\n";
    write_text_file(path, svg.str());
}

std::string summary_text(const SimConfig &cfg, const Summary &s,
                         const RunResult &result) {
    std::ostringstream out;
    out << "scheme = " << scheme_name(cfg.scheme) << '\n'
        << "frames = " << s.frames_total << '\n'
        << "window_frames = " << s.frames_window << '\n'
        << "mean_latency_s = " << format_csv_double(s.latency_s) << '\n'
        << "mean_snr_db = " << format_csv_double(s.snr_db) << '\n'
        << "mean_rate_bps = " << format_csv_double(s.rate_bps) << '\n'
        << "mean_power_w = " << format_csv_double(s.avg_power_w) << " ("
        << format_tick(watt_to_dbm(s.avg_power_w)) << " dBm)\n"
        << "mean_ee_bit_per_joule = " << format_csv_double(s.ee_bit_per_joule) << '\n'
        << "mean_accuracy = " << format_csv_double(s.accuracy) << '\n'
        << "outage_frames_c1 = " << result.counters.c1 << '\n'
        << "undecodable_beams_c1_1 = " << result.counters.c1_1 << '\n'
        << "power_normalizations_c3 = " << result.counters.c3 << '\n'
        << "latency_cap_events_c4 = " << result.counters.c4 << '\n'
        << "beam_budget_overruns_c5 = " << result.counters.c5 << '\n'
        << "fallback_frames = " << result.fallback_frames << '\n';
    return out.str();
}

} // namespace

int cmd_run(const ConfigMap &config, const RunOptions &options) {
    std::vector<std::string> warnings;
    const SimConfig cfg = config.build(&warnings);
    for (const auto &w : warnings) std::cerr << "warning: " << w << '\n';

    std::optional<QTable> warm;
    if (!options.q_load.empty()) {
        std::ifstream in(options.q_load);
        if (!in)
            throw ConfigError("cannot open q-table file '" + options.q_load + "'");
        warm = QTable::load(in);
    }

    const RunResult result = run_sim(cfg, warm ? &*warm : nullptr);
    const Summary s = summarize(result.records, options.window_fraction);

    const fs::path out_dir(options.out_dir);
    fs::create_directories(out_dir);
    write_frames_csv(out_dir / "frames.csv", result.records);
    write_text_file(out_dir / "config.txt", config.echo());
    const std::string text = summary_text(cfg, s, result);
    write_text_file(out_dir / "summary.txt", text);
    std::cout << text;
    if (!options.q_save.empty()) {
        std::ofstream out(options.q_save);
        if (!out)
            throw std::runtime_error("cannot write q-table file '" + options.q_save + "'");
        result.q.save(out);
    }
    std::cout << "wrote " << (out_dir / "frames.csv").string() << '\n';
    return 0;
}

int cmd_sweep(const ConfigMap &config, const SweepOptions &options) {
    if (options.param.empty() || options.values.empty())
        throw ConfigError("sweep needs --param and --values");
    if (options.seeds < 1)
        throw ConfigError("sweep needs --seeds >= 1");

    std::vector<std::string> schemes = options.schemes;
    if (options.param == "scheme")
        schemes = {""};  // the swept value carries the scheme
    else if (schemes.empty())
        schemes = {config.raw().sim_scheme};

    const long n_values = static_cast<long>(options.values.size());
    const long n_schemes = static_cast<long>(schemes.size());
    const long n_seeds = options.seeds;
    const long n_jobs = n_values * n_schemes * n_seeds;
    const long base_seed = config.raw().sim_seed;

    const fs::path out_dir(options.out_dir);
    fs::create_directories(out_dir / "runs");
    write_text_file(out_dir / "config.txt", config.echo());

    std::vector<Summary> summaries(static_cast<std::size_t>(n_jobs));
    run_jobs(options.workers, n_jobs, [&](long job) {
        const long vi = job / (n_schemes * n_seeds);
        const long si = (job / n_seeds) % n_schemes;
        const long k = job % n_seeds;
        ConfigMap cfg = config;
        apply_sweep_value(cfg, options.param, options.values[static_cast<std::size_t>(vi)]);
        if (!schemes[static_cast<std::size_t>(si)].empty())
            cfg.set("sim.scheme", schemes[static_cast<std::size_t>(si)]);
        cfg.set("sim.seed", std::to_string(base_seed + k));
        const SimConfig sim_cfg = cfg.build();
        const RunResult result = run_sim(sim_cfg);
        const std::string scheme_tag = scheme_name(sim_cfg.scheme);
        const fs::path run_csv =
            out_dir / "runs" /
            (options.param + "-" + options.values[static_cast<std::size_t>(vi)] + "_" +
             scheme_tag + "_seed" + std::to_string(base_seed + k) + ".csv");
        write_frames_csv(run_csv, result.records);
        summaries[static_cast<std::size_t>(job)] =
            summarize(result.records, options.window_fraction);
    });

    std::ofstream csv(out_dir / "sweep.csv");
    if (!csv)
        throw std::runtime_error("cannot write sweep.csv");
    csv << "param,value,scheme,seeds,latency_s_mean,latency_s_se,snr_db_mean,"
           "snr_db_se,rate_bps_mean,rate_bps_se,avg_power_w_mean,avg_power_w_se,"
           "ee_bit_per_joule_mean,ee_bit_per_joule_se,accuracy_mean,accuracy_se\n";

    struct Metric {
        const char *name;
        double Summary::*field;
    };
    static const Metric metrics[] = {
        {"latency_s", &Summary::latency_s},
        {"snr_db", &Summary::snr_db},
        {"rate_bps", &Summary::rate_bps},
        {"avg_power_w", &Summary::avg_power_w},
        {"ee_bit_per_joule", &Summary::ee_bit_per_joule},
        {"accuracy", &Summary::accuracy},
    };

    std::vector<SvgSeries> plot_series[4];
    const char *plot_metrics[4] = {"latency_s", "rate_bps", "avg_power_w",
                                   "ee_bit_per_joule"};
    bool numeric_values = true;

    for (long vi = 0; vi < n_values; ++vi) {
        for (long si = 0; si < n_schemes; ++si) {
            const std::string &value = options.values[static_cast<std::size_t>(vi)];
            const std::string scheme_tag = options.param == "scheme"
                                               ? value
                                               : schemes[static_cast<std::size_t>(si)];
            csv << options.param << ',' << value << ',' << scheme_tag << ','
                << n_seeds;
            double means[6] = {};
            for (std::size_t m = 0; m < 6; ++m) {
                std::vector<double> xs;
                xs.reserve(static_cast<std::size_t>(n_seeds));
                for (long k = 0; k < n_seeds; ++k) {
                    const long job = (vi * n_schemes + si) * n_seeds + k;
                    xs.push_back(summaries[static_cast<std::size_t>(job)].*
                                 (metrics[m].field));
                }
                const Aggregate a = aggregate(xs);
                means[m] = a.mean;
                csv << ',' << format_csv_double(a.mean) << ','
                    << format_csv_double(a.se);
            }
            csv << '\n';

            double x = 0.0;
            const auto res = std::from_chars(value.data(), value.data() + value.size(), x);
            if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
                numeric_values = false;
            if (numeric_values) {
                const double ys[4] = {means[0], means[2], means[3], means[4]};
                for (int p = 0; p < 4; ++p) {
                    auto &list = plot_series[p];
                    auto it = std::find_if(list.begin(), list.end(),
                                           [&](const SvgSeries &s) {
                                               return s.name == scheme_tag;
                                           });
                    if (it == list.end()) {
                        list.push_back({scheme_tag, {}});
                        it = list.end() - 1;
                    }
                    it->points.emplace_back(x, ys[p]);
                }
            }
        }
    }
    csv.close();

    if (options.plot && numeric_values) {
        for (int p = 0; p < 4; ++p)
            write_svg_chart(out_dir / ("sweep_" + std::string(plot_metrics[p]) + ".svg"),
                            std::string(plot_metrics[p]) + " vs " + options.param,
                            options.param, plot_metrics[p], plot_series[p]);
    }

    std::cout << "wrote " << (out_dir / "sweep.csv").string() << " (" << n_jobs
              << " runs)\n";
    return 0;
}

int cmd_bench(const ConfigMap &config, const BenchOptions &options) {
    if (options.seeds < 1)
        throw ConfigError("bench needs --seeds >= 1");
    static const Scheme schemes[] = {Scheme::exhaustive, Scheme::random,
                                     Scheme::iterative, Scheme::linear,
                                     Scheme::binary, Scheme::eetbf};
    const long n_schemes = 6;
    const long n_seeds = options.seeds;
    const long base_seed = config.raw().sim_seed;

    const fs::path out_dir(options.out_dir);
    fs::create_directories(out_dir);
    write_text_file(out_dir / "config.txt", config.echo());

    std::vector<Summary> summaries(static_cast<std::size_t>(n_schemes * n_seeds));
    run_jobs(options.workers, n_schemes * n_seeds, [&](long job) {
        const long si = job / n_seeds;
        const long k = job % n_seeds;
        ConfigMap cfg = config;
        cfg.set("sim.scheme", scheme_name(schemes[si]));
        cfg.set("sim.seed", std::to_string(base_seed + k));
        const RunResult result = run_sim(cfg.build());
        summaries[static_cast<std::size_t>(job)] =
            summarize(result.records, options.window_fraction);
    });

    std::ofstream csv(out_dir / "bench.csv");
    if (!csv)
        throw std::runtime_error("cannot write bench.csv");
    csv << "scheme,feedback,seeds,latency_s,snr_db,rate_bps,avg_power_w,"
           "ee_bit_per_joule,accuracy\n";
    std::printf("%-11s %-9s %12s %9s %12s %10s %13s %9s\n", "scheme", "feedback",
                "latency(ms)", "snr(dB)", "rate(Gb/s)", "pwr(dBm)", "ee(bit/J)",
                "accuracy");
    for (long si = 0; si < n_schemes; ++si) {
        double mean[6] = {};
        for (std::size_t m = 0; m < 6; ++m) {
            static const double Summary::*fields[6] = {
                &Summary::latency_s,        &Summary::snr_db,
                &Summary::rate_bps,         &Summary::avg_power_w,
                &Summary::ee_bit_per_joule, &Summary::accuracy};
            double acc = 0.0;
            for (long k = 0; k < n_seeds; ++k)
                acc += summaries[static_cast<std::size_t>(si * n_seeds + k)].*fields[m];
            mean[m] = acc / static_cast<double>(n_seeds);
        }
        const char *feedback = per_beam_feedback(schemes[si]) ? "per-beam" : "per-frame";
        csv << scheme_name(schemes[si]) << ',' << feedback << ',' << n_seeds << ','
            << format_csv_double(mean[0]) << ',' << format_csv_double(mean[1]) << ','
            << format_csv_double(mean[2]) << ',' << format_csv_double(mean[3]) << ','
            << format_csv_double(mean[4]) << ',' << format_csv_double(mean[5]) << '\n';
        std::printf("%-11s %-9s %12.4f %9.2f %12.4f %10.2f %13.4e %9.3f\n",
                    scheme_name(schemes[si]), feedback, mean[0] * 1e3, mean[1],
                    mean[2] / 1e9, watt_to_dbm(mean[3]), mean[4], mean[5]);
    }
    std::cout << "wrote " << (out_dir / "bench.csv").string() << '\n';
    return 0;
}

} // namespace eetbf
