#include "omch/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "omch/langevin_sim.hpp"
#include "omch/presets.hpp"

namespace omch {

const char* const kSweepSchemaLine = "# schema omch-sweep-v1";
const char* const kSweepCsvHeader =
    "family,style,fixed_value,sweep_value,tau1,tau2,T1,T2,T,VN,VN_neg,VN_ent,"
    "p0,p1,p2plus,margin,W00,flag";

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct PointPhysics {
    double T1 = 0.0, T2 = 0.0, delta = 1.0;
    double T = 0.0, VN = 1.0;
    double xy_asymmetry = 0.0;
    bool singular = false;
};

PointPhysics eval_physics(const RunConfig& config, double tau1, double tau2) {
    const SystemParams& p = config.params;
    PointPhysics out;
    out.T1 = swap_transmittance(p.g1, tau1, p.kappa);
    out.T2 = swap_transmittance(p.g2, tau2, p.kappa);
    out.delta = storage_decay(p.gamma, config.tau_s);
    if (config.level == Level::Adiabatic) {
        out.T = total_transmittance(out.T1, out.T2, p.eta(), out.delta);
        if (out.T >= 1.0) {
            out.singular = true;
            out.VN = std::numeric_limits<double>::quiet_NaN();
        } else {
            out.VN = added_noise_variance(p, out.T1, out.T2, out.delta);
        }
    } else {
        PropagationOptions opts;
        opts.dt = config.dt;
        const ExtractedChannel ch =
            extract_channel(p, {tau1, tau2, config.tau_s}, config.level == Level::Rwa, opts);
        out.T = ch.T_full;
        out.VN = ch.VN_full;
        out.xy_asymmetry = ch.xy_asymmetry;
        out.singular = ch.vn_singular;
        if (!out.singular && out.VN < 1.0 - 1e-6)
            throw PhysicalityError("extracted noise variance fell below the vacuum level");
    }
    return out;
}

void fill_derived(SweepRecord& rec) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (rec.flag == "singular" || rec.T >= 1.0) {
        rec.flag = "singular";
        rec.VN_neg = rec.VN_ent = rec.p0 = rec.p1 = rec.p2plus = rec.margin = rec.W00 = nan;
        return;
    }
    rec.VN_neg = negativity_threshold(rec.T);
    rec.VN_ent = entanglement_threshold(rec.T);
    GaussianChannelSpec spec{rec.T, std::max(rec.VN, 1.0)};
    const FockState state = apply_channel_single_photon(spec);
    const FockTriple triple = fock_triple(state);
    rec.p0 = triple.p0;
    rec.p1 = triple.p1;
    rec.p2plus = triple.p2plus;
    rec.margin = nongauss_certified(state).margin;
    rec.W00 = wigner_at_origin(state);
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    const auto dot = path.rfind('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + suffix + ".csv";
    return path.substr(0, dot) + suffix + path.substr(dot);
}

std::vector<std::string> config_meta(const RunConfig& config) {
    std::vector<std::string> meta;
    meta.push_back("# preset " + (config.preset_name.empty() ? std::string("none") : config.preset_name));
    meta.push_back("# level " + to_string(config.level));
    meta.push_back("# points " + std::to_string(config.points));
    meta.push_back("# eta " + fmt(config.params.eta()));
    meta.push_back("# gamma " + fmt(config.params.gamma));
    meta.push_back("# omega_m " + fmt(config.params.omega_m));
    meta.push_back("# g1 " + fmt(config.params.g1));
    meta.push_back("# g2 " + fmt(config.params.g2));
    meta.push_back("# n0 " + fmt(config.params.n0));
    meta.push_back("# n_th " + fmt(config.params.n_th));
    meta.push_back("# tau_s " + fmt(config.tau_s));
    meta.push_back("# tau1_max " + fmt(config.tau1_max));
    meta.push_back("# tau2_max " + fmt(config.tau2_max));
    return meta;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // '\n' endings on every platform
    if (!out)
        throw ConfigError("cannot open output file '" + path + "'");
    return out;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& records,
                     const std::vector<std::string>& meta) {
    std::ofstream out = open_out(path);
    out << kSweepSchemaLine << '\n';
    for (const std::string& m : meta) out << m << '\n';
    out << kSweepCsvHeader << '\n';
    for (const SweepRecord& r : records) {
        out << r.family << ',' << r.style << ',' << fmt(r.fixed_value) << ','
            << fmt(r.sweep_value) << ',' << fmt(r.tau1) << ',' << fmt(r.tau2) << ','
            << fmt(r.T1) << ',' << fmt(r.T2) << ',' << fmt(r.T) << ',' << fmt(r.VN) << ','
            << fmt(r.VN_neg) << ',' << fmt(r.VN_ent) << ',' << fmt(r.p0) << ',' << fmt(r.p1)
            << ',' << fmt(r.p2plus) << ',' << fmt(r.margin) << ',' << fmt(r.W00) << ','
            << r.flag << '\n';
    }
}

struct SweepJob {
    std::string family;
    std::string style;
    double fixed_value = -1.0;
    double sweep_value = 0.0;
    double tau1 = 0.0;
    double tau2 = 0.0;
};

std::vector<SweepRecord> run_jobs(const RunConfig& config, const std::vector<SweepJob>& jobs) {
    std::vector<SweepRecord> records(jobs.size());
    parallel_for_index(static_cast<int>(jobs.size()), config.threads, [&](int i) {
        const SweepJob& job = jobs[static_cast<std::size_t>(i)];
        records[static_cast<std::size_t>(i)] = [&] {
            SweepRecord rec = evaluate_point(config, job.tau1, job.tau2);
            rec.family = job.family;
            rec.style = job.style;
            rec.fixed_value = job.fixed_value;
            rec.sweep_value = job.sweep_value;
            return rec;
        }();
    });
    return records;
}

int family_rank(const std::string& family) {
    if (family == "diagonal") return 0;
    if (family == "t1_fixed") return 1;
    if (family == "t2_fixed") return 2;
    return 3;
}

void sort_records(std::vector<SweepRecord>& records) {
    std::stable_sort(records.begin(), records.end(),
                     [](const SweepRecord& a, const SweepRecord& b) {
                         const int ra = family_rank(a.family), rb = family_rank(b.family);
                         if (ra != rb) return ra < rb;
                         if (a.fixed_value != b.fixed_value) return a.fixed_value < b.fixed_value;
                         return a.sweep_value < b.sweep_value;
                     });
}

double margin_at(const RunConfig& config, double s) {
    const SweepRecord rec =
        evaluate_point(config, s * config.tau1_max, s * config.tau2_max);
    return rec.margin;
}

bool negativity_at(const RunConfig& config, double s) {
    const SweepRecord rec =
        evaluate_point(config, s * config.tau1_max, s * config.tau2_max);
    return rec.flag == "ok" && rec.VN < rec.VN_neg;
}

/// First parameter s in (0, 1] where pred flips false -> true, refined by
/// bisection; returns -1 when pred never becomes true on the scan grid.
double find_crossing(const std::function<bool(double)>& pred, int scan_points) {
    double prev_s = 0.0;
    bool prev = false;
    double lo = -1.0, hi = -1.0;
    for (int i = 1; i <= scan_points; ++i) {
        const double s = static_cast<double>(i) / scan_points;
        const bool cur = pred(s);
        if (cur && !prev) {
            lo = prev_s;
            hi = s;
            break;
        }
        prev = cur;
        prev_s = s;
    }
    if (hi < 0.0) return -1.0;
    for (int it = 0; it < 40 && hi - lo > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

} // namespace

SweepRecord evaluate_point(const RunConfig& config, double tau1, double tau2) {
    SweepRecord rec;
    rec.tau1 = tau1;
    rec.tau2 = tau2;
    const PointPhysics phys = eval_physics(config, tau1, tau2);
    rec.T1 = phys.T1;
    rec.T2 = phys.T2;
    rec.T = phys.T;
    rec.VN = phys.VN;
    if (phys.singular) rec.flag = "singular";
    fill_derived(rec);
    return rec;
}

ChannelReport cmd_channel(const RunConfig& config, std::ostream& log) {
    config.validate();
    ChannelReport report;
    const PointPhysics phys = eval_physics(config, config.tau1, config.tau2);
    if (phys.singular)
        throw SingularChannelError("channel: total transmittance reached 1");
    SweepRecord rec;
    rec.family = "point";
    rec.style = "point";
    rec.sweep_value = config.tau1;
    rec.tau1 = config.tau1;
    rec.tau2 = config.tau2;
    rec.T1 = phys.T1;
    rec.T2 = phys.T2;
    rec.T = phys.T;
    rec.VN = phys.VN;
    fill_derived(rec);
    report.record = rec;
    report.delta = phys.delta;
    report.xy_asymmetry = phys.xy_asymmetry;
    report.negativity = rec.VN < rec.VN_neg;
    report.entanglement = rec.VN < rec.VN_ent;
    report.nongaussian = rec.margin > 0.0;

    log << "channel  preset=" << (config.preset_name.empty() ? "none" : config.preset_name)
        << "  level=" << to_string(config.level) << '\n';
    log << "  tau1=" << fmt_short(config.tau1) << "  tau2=" << fmt_short(config.tau2)
        << "  tau_s=" << fmt_short(config.tau_s) << '\n';
    log << "  T1=" << fmt_short(rec.T1) << "  T2=" << fmt_short(rec.T2)
        << "  delta=" << fmt_short(report.delta) << '\n';
    log << "  T=" << fmt_short(rec.T) << "  V_N=" << fmt_short(rec.VN) << '\n';
    log << "  V_N^neg=" << fmt_short(rec.VN_neg) << "  V_N^ent=" << fmt_short(rec.VN_ent) << '\n';
    if (config.level != Level::Adiabatic)
        log << "  xy_asymmetry=" << fmt_short(report.xy_asymmetry) << '\n';
    log << "  p0=" << fmt_short(rec.p0) << "  p1=" << fmt_short(rec.p1)
        << "  p2plus=" << fmt_short(rec.p2plus) << '\n';
    log << "  W(0,0)=" << fmt_short(rec.W00) << "  nongauss margin=" << fmt_short(rec.margin)
        << '\n';
    log << "  negativity preserved: " << (report.negativity ? "yes" : "no") << '\n';
    log << "  entanglement preserved: " << (report.entanglement ? "yes" : "no") << '\n';
    log << "  quantum non-Gaussianity certified: " << (report.nongaussian ? "yes" : "no") << '\n';

    if (!config.out.empty())
        write_sweep_csv(config.out, {rec}, config_meta(config));
    return report;
}

std::vector<SweepRecord> cmd_fig2(const RunConfig& config, std::ostream& log) {
    config.validate();
    if (!(config.tau1_max > 0.0) || !(config.tau2_max > 0.0))
        throw ConfigError("fig2 needs positive tau1_max and tau2_max");
    const int n = config.points;
    const double tau_diag = std::min(config.tau1_max, config.tau2_max);

    std::vector<SweepJob> jobs;
    for (int i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) / (n - 1);
        jobs.push_back({"diagonal", "dotted", -1.0, s * tau_diag, s * tau_diag, s * tau_diag});
    }
    const double fractions[] = {0.25, 0.5, 1.0};
    for (const double frac : fractions) {
        const double tau1_held = frac * config.tau1_max;
        for (int i = 0; i < n; ++i) {
            const double tau2 = static_cast<double>(i) / (n - 1) * config.tau2_max;
            jobs.push_back({"t1_fixed", "dashed", tau1_held, tau2, tau1_held, tau2});
        }
    }
    for (const double frac : fractions) {
        const double tau2_held = frac * config.tau2_max;
        for (int i = 0; i < n; ++i) {
            const double tau1 = static_cast<double>(i) / (n - 1) * config.tau1_max;
            jobs.push_back({"t2_fixed", "solid", tau2_held, tau1, tau1, tau2_held});
        }
    }

    std::vector<SweepRecord> records = run_jobs(config, jobs);
    sort_records(records);

    std::vector<std::string> meta = config_meta(config);
    if (config.level == Level::Full)
        meta.push_back("# tmax_eta_sq " + fmt(config.params.eta() * config.params.eta()));

    const std::string main_path = config.out.empty() ? "fig2.csv" : config.out;
    write_sweep_csv(main_path, records, meta);

    // Threshold curves V_N^neg(T), V_N^ent(T) on a uniform grid.
    const std::string thr_path = with_suffix(main_path, "_thresholds");
    std::ofstream thr = open_out(thr_path);
    thr << "# schema omch-thresholds-v1" << '\n';
    thr << "T,VN_neg,VN_ent" << '\n';
    for (int i = 0; i < n; ++i) {
        const double t = 0.99 * static_cast<double>(i) / (n - 1);
        thr << fmt(t) << ',' << fmt(negativity_threshold(t)) << ','
            << fmt(entanglement_threshold(t)) << '\n';
    }

    log << "fig2: wrote " << records.size() << " records to " << main_path
        << " and threshold curves to " << thr_path << '\n';
    return records;
}

std::vector<SweepRecord> cmd_fig3(const RunConfig& config, std::ostream& log) {
    config.validate();
    if (!(config.tau1_max > 0.0) || !(config.tau2_max > 0.0))
        throw ConfigError("fig3 needs positive tau1_max and tau2_max");
    const int n = config.points;

    std::vector<SweepJob> jobs;
    for (int i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) / (n - 1);
        jobs.push_back({"trajectory", "line", -1.0, s, s * config.tau1_max, s * config.tau2_max});
    }
    std::vector<SweepRecord> records = run_jobs(config, jobs);

    std::vector<std::string> meta = config_meta(config);
    const double s_cross =
        find_crossing([&](double s) { return margin_at(config, s) > 0.0; }, std::max(n, 32));
    if (s_cross >= 0.0) {
        const SweepRecord at = evaluate_point(config, s_cross * config.tau1_max,
                                              s_cross * config.tau2_max);
        meta.push_back("# g_crossing_s " + fmt(s_cross));
        meta.push_back("# g_crossing_T1 " + fmt(at.T1));
        meta.push_back("# g_crossing_T2 " + fmt(at.T2));
    } else {
        meta.push_back("# g_crossing none");
    }

    const std::string main_path = config.out.empty() ? "fig3.csv" : config.out;
    write_sweep_csv(main_path, records, meta);

    // Non-Gaussianity boundary polyline, r from 0 (p0 = 1, p1G = 0) upward.
    const std::string bnd_path = with_suffix(main_path, "_boundary");
    std::ofstream bnd = open_out(bnd_path);
    bnd << "# schema omch-boundary-v1" << '\n';
    bnd << "r,p0,p1G" << '\n';
    for (int i = 0; i < n; ++i) {
        const double r = 3.0 * static_cast<double>(i) / (n - 1);
        const NonGaussBoundaryPoint pt = nongauss_boundary(r);
        bnd << fmt(pt.r) << ',' << fmt(pt.p0) << ',' << fmt(pt.p1G) << '\n';
    }

    log << "fig3: wrote " << records.size() << " records to " << main_path
        << " and the boundary to " << bnd_path << '\n';
    return records;
}

namespace {

void write_wigner_csv(const std::string& path, const WignerGrid& grid,
                      const std::vector<std::string>& meta) {
    std::ofstream out = open_out(path);
    out << "# schema omch-wigner-v1" << '\n';
    for (const std::string& m : meta) out << m << '\n';
    out << "y\\x";
    for (Eigen::Index i = 0; i < grid.x_axis.size(); ++i) out << ',' << fmt(grid.x_axis[i]);
    out << '\n';
    for (Eigen::Index j = 0; j < grid.y_axis.size(); ++j) {
        out << fmt(grid.y_axis[j]);
        for (Eigen::Index i = 0; i < grid.x_axis.size(); ++i)
            out << ',' << fmt(grid.values(i, j));
        out << '\n';
    }
}

} // namespace

std::vector<Fig4Point> cmd_fig4(const RunConfig& config, std::ostream& log) {
    config.validate();
    if (!(config.tau1_max > 0.0) || !(config.tau2_max > 0.0))
        throw ConfigError("fig4 needs positive tau1_max and tau2_max");

    const int scan = std::max(config.points, 32);
    const double s_neg =
        find_crossing([&](double s) { return negativity_at(config, s); }, scan);
    if (s_neg < 0.0)
        throw ConfigError("fig4: the negativity threshold is never crossed within the schedule");
    const double s_ng =
        find_crossing([&](double s) { return margin_at(config, s) > 0.0; }, scan);
    if (s_ng < 0.0)
        throw ConfigError("fig4: the non-Gaussianity boundary is never crossed within the schedule");

    struct Pick {
        const char* label;
        double s;
    };
    const Pick picks[] = {
        {"A", 0.85 * s_neg},
        {"B", std::min(1.15 * s_neg, 1.0)},
        {"C", 0.85 * s_ng},
        {"D", std::min(1.15 * s_ng, 1.0)},
    };

    std::string prefix = config.out.empty() ? "fig4" : config.out;
    if (prefix.size() > 4 && prefix.substr(prefix.size() - 4) == ".csv")
        prefix = prefix.substr(0, prefix.size() - 4);

    std::vector<Fig4Point> points;
    for (const Pick& pick : picks) {
        const double tau1 = pick.s * config.tau1_max;
        const double tau2 = pick.s * config.tau2_max;
        const SweepRecord rec = evaluate_point(config, tau1, tau2);
        if (rec.flag != "ok")
            throw SingularChannelError("fig4: singular channel at the selected point");

        GaussianChannelSpec spec{rec.T, std::max(rec.VN, 1.0)};
        const FockState state = apply_channel_single_photon(spec);
        WignerGridSpec gspec;
        gspec.nx = gspec.ny = config.wigner_points;
        gspec.half_width_x = gspec.half_width_y = config.wigner_halfwidth;
        const WignerGrid grid = wigner_of_state(state, gspec);

        Fig4Point pt;
        pt.label = pick.label;
        pt.tau1 = tau1;
        pt.tau2 = tau2;
        pt.T = rec.T;
        pt.VN = rec.VN;
        pt.W00 = rec.W00;
        pt.margin = rec.margin;
        pt.wigner_integral = grid.integral;
        pt.path = prefix + "_" + pick.label + ".csv";

        std::vector<std::string> meta = config_meta(config);
        meta.push_back(std::string("# point ") + pick.label);
        meta.push_back("# tau1 " + fmt(tau1));
        meta.push_back("# tau2 " + fmt(tau2));
        meta.push_back("# T " + fmt(rec.T));
        meta.push_back("# VN " + fmt(rec.VN));
        meta.push_back("# W00 " + fmt(rec.W00));
        meta.push_back("# margin " + fmt(rec.margin));
        meta.push_back("# integral " + fmt(grid.integral));
        write_wigner_csv(pt.path, grid, meta);
        if (!grid.normalized)
            log << "warning: Wigner grid " << pt.path << " integrates to " << fmt_short(grid.integral)
                << "; enlarge wigner_points or wigner_halfwidth\n";
        points.push_back(pt);
        log << "fig4 point " << pick.label << ": tau1=" << fmt_short(tau1)
            << " T=" << fmt_short(rec.T) << " VN=" << fmt_short(rec.VN)
            << " W00=" << fmt_short(rec.W00) << " margin=" << fmt_short(rec.margin) << " -> "
            << pt.path << '\n';
    }
    return points;
}

void cmd_boundary(const RunConfig& config, std::ostream& log) {
    if (config.points < 2)
        throw ConfigError("points must be >= 2");
    const std::string path = config.out.empty() ? "boundary.csv" : config.out;
    std::ofstream out = open_out(path);
    out << "# schema omch-boundary-v1" << '\n';
    out << "r,p0,p1G" << '\n';
    for (int i = 0; i < config.points; ++i) {
        const double r = 3.0 * static_cast<double>(i) / (config.points - 1);
        const NonGaussBoundaryPoint pt = nongauss_boundary(r);
        out << fmt(pt.r) << ',' << fmt(pt.p0) << ',' << fmt(pt.p1G) << '\n';
    }
    log << "boundary: wrote " << config.points << " points to " << path << '\n';
}

void cmd_presets(std::ostream& log) {
    log << "name                  eta    gamma      omega_m  g1     g2     n0  n_th  tau1_max  tau2_max  tau_s\n";
    for (const ExperimentPreset& p : all_presets()) {
        log << std::left << std::setw(22) << p.name << std::setw(7) << p.params.eta()
            << std::setw(11) << p.params.gamma << std::setw(9) << p.params.omega_m
            << std::setw(7) << p.params.g1 << std::setw(7) << p.params.g2 << std::setw(4)
            << p.params.n0 << std::setw(6) << p.params.n_th << std::setw(10) << p.tau1_max
            << std::setw(10) << p.tau2_max << p.tau_s << '\n';
    }
}

void parallel_for_index(int n, int threads, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto work = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace omch
