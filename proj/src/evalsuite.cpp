#include "qj/evalsuite.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "qj/csv.hpp"
#include "qj/rng.hpp"

namespace qj::eval {

namespace {

// Index-deterministic parallel map: results land in fixed slots.
void parallel_for(int n, int n_threads, const std::function<void(int)>& fn) {
    int threads = n_threads > 0 ? n_threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

double horizontal_error(const sim::EpisodeOutcome& out) {
    return (out.target_c.head<2>() - out.final_c.head<2>()).norm();
}

struct Stats {
    double mean = 0.0, std = 0.0;
};

Stats mean_std(const std::vector<double>& xs) {
    Stats s;
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double acc = 0.0;
        for (double x : xs) acc += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(acc / static_cast<double>(xs.size() - 1));
    }
    return s;
}

}  // namespace

Vec13 policy_action(const learner::GaussianPolicy& policy, const Vec6& state) {
    const auto fwd = policy.act(state);
    return learner::action_to_physical(fwd.mean);
}

sim::EpisodeOutcome eval_episode(const learner::GaussianPolicy& policy,
                                 const thrust::JumpCommand& cmd, const EvalContext& ctx) {
    const Vec6 state = (Vec6() << cmd.delta_c, cmd.delta_phi).finished();
    return sim::run_episode(ctx.model, cmd, policy_action(policy, state), ctx.episode);
}

std::vector<RegionRow> feasible_region(const learner::GaussianPolicy& policy,
                                       const SweepSpec& spec, const EvalContext& ctx) {
    Rng rng(derive_seed(spec.seed, 0x726567696f6eULL));
    std::vector<thrust::JumpCommand> cmds(spec.samples);
    for (auto& cmd : cmds) {
        cmd.delta_c = Vec3(rng.uniform(spec.x_lo, spec.x_hi), rng.uniform(spec.y_lo, spec.y_hi),
                           0.0);
        cmd.delta_phi = Vec3::Zero();
    }
    std::vector<RegionRow> rows(cmds.size());
    parallel_for(static_cast<int>(cmds.size()), ctx.n_threads, [&](int i) {
        const sim::EpisodeOutcome out = eval_episode(policy, cmds[i], ctx);
        const double err = horizontal_error(out);
        rows[i] = {cmds[i].delta_c.x(), cmds[i].delta_c.y(), err,
                   out.failure == sim::Failure::kNone && err <= spec.threshold};
    });
    return rows;
}

std::vector<AvtRow> actual_vs_target(const learner::GaussianPolicy& policy, bool backward,
                                     const SweepSpec& spec, const EvalContext& ctx) {
    Rng rng(derive_seed(spec.seed, backward ? 0x626b77ULL : 0x667764ULL));
    const double reach = backward ? -spec.x_lo : spec.x_hi;
    std::vector<double> dists(spec.samples);
    for (auto& d : dists) d = rng.uniform(0.0, std::max(reach, 0.0));
    std::vector<AvtRow> rows(dists.size());
    const double dir = backward ? -1.0 : 1.0;
    parallel_for(static_cast<int>(dists.size()), ctx.n_threads, [&](int i) {
        thrust::JumpCommand cmd;
        cmd.delta_c = Vec3(dir * dists[i], 0.0, 0.0);
        cmd.delta_phi = Vec3::Zero();
        const sim::EpisodeOutcome out = eval_episode(policy, cmd, ctx);
        const double actual = dir * (out.final_c.x() - out.start_c.x());
        rows[i] = {dists[i], actual, out.failure != sim::Failure::kNone};
    });
    return rows;
}

HeightMaps height_map(const learner::GaussianPolicy& policy, const SweepSpec& spec,
                      const EvalContext& ctx) {
    const int grid = std::max(2, static_cast<int>(std::lround(std::sqrt(spec.samples))));
    const double dz = 0.02;
    std::vector<Eigen::Vector2d> cells;
    for (int ix = 0; ix < grid; ++ix)
        for (int iy = 0; iy < grid; ++iy)
            cells.emplace_back(spec.x_lo + (spec.x_hi - spec.x_lo) * ix / (grid - 1),
                               spec.y_lo + (spec.y_hi - spec.y_lo) * iy / (grid - 1));

    HeightMaps maps;
    maps.up.resize(cells.size());
    maps.down.resize(cells.size());
    parallel_for(static_cast<int>(cells.size()), ctx.n_threads, [&](int i) {
        auto passes = [&](double z) {
            thrust::JumpCommand cmd;
            cmd.delta_c = Vec3(cells[i].x(), cells[i].y(), z);
            cmd.delta_phi = Vec3::Zero();
            const sim::EpisodeOutcome out = eval_episode(policy, cmd, ctx);
            return out.failure == sim::Failure::kNone && horizontal_error(out) <= spec.threshold;
        };
        double up = 0.0;
        for (double z = 0.0; z <= spec.z_hi + 1e-9; z += dz) {
            if (!passes(z)) break;
            up = z;
        }
        double down = 0.0;
        for (double z = 0.0; z >= spec.z_lo - 1e-9; z -= dz) {
            if (!passes(z)) break;
            down = z;
        }
        maps.up[i] = {cells[i].x(), cells[i].y(), up};
        maps.down[i] = {cells[i].x(), cells[i].y(), down};
    });
    return maps;
}

std::vector<YawRow> yaw_sweep(const learner::GaussianPolicy& policy, const SweepSpec& spec,
                              const EvalContext& ctx) {
    const int n = std::max(3, spec.samples);
    std::vector<YawRow> rows(n);
    parallel_for(n, ctx.n_threads, [&](int i) {
        const double yaw = -spec.yaw_max + 2.0 * spec.yaw_max * i / (n - 1);
        thrust::JumpCommand cmd;
        cmd.delta_c = Vec3::Zero();
        cmd.delta_phi = Vec3(0.0, 0.0, yaw);
        const sim::EpisodeOutcome out = eval_episode(policy, cmd, ctx);
        const double err = wrap_angle(out.final_phi.z() - out.target_phi.z());
        rows[i] = {rad2deg(yaw), rad2deg(std::abs(err))};
    });
    return rows;
}

std::vector<RobustRow> robustness_study(const learner::GaussianPolicy& policy, int n_runs,
                                        double perturb_p, double d_max, const SweepSpec& spec,
                                        const EvalContext& ctx) {
    struct Cell {
        const char* jump;
        const char* test;
    };
    const std::vector<Cell> cells = {{"FWD", "NOM"},  {"FWD", "DV"},  {"FWD", "MV"},
                                     {"DIAG", "NOM"}, {"DIAG", "DV"}, {"DIAG", "MV"}};
    std::vector<RobustRow> rows;
    for (size_t c = 0; c < cells.size(); ++c) {
        const auto& cell = cells[c];
        thrust::JumpCommand cmd;
        if (std::string(cell.jump) == "FWD") {
            cmd.delta_c = Vec3(0.4, 0.0, 0.0);
            cmd.delta_phi = Vec3::Zero();
        } else {
            cmd.delta_c = Vec3(0.3, 0.2, 0.0);
            cmd.delta_phi = Vec3(0.0, 0.0, deg2rad(45.0));
        }
        std::vector<double> ex(n_runs), ey(n_runs), epsi(n_runs);
        parallel_for(n_runs, ctx.n_threads, [&](int run) {
            EvalContext run_ctx = ctx;
            const std::string test = cell.test;
            if (test != "NOM") {
                const uint64_t seed = derive_seed(spec.seed, c, static_cast<uint64_t>(run));
                run_ctx.model = sim::perturb_model(ctx.model, seed, test == "MV" ? perturb_p : 0.0,
                                                   test == "DV" ? d_max : 0.0);
            }
            const Vec6 state = (Vec6() << cmd.delta_c, cmd.delta_phi).finished();
            const sim::EpisodeOutcome out =
                sim::run_episode(run_ctx.model, cmd, policy_action(policy, state),
                                 run_ctx.episode);
            ex[run] = out.final_c.x() - out.target_c.x();
            ey[run] = out.final_c.y() - out.target_c.y();
            epsi[run] = rad2deg(wrap_angle(out.final_phi.z() - out.target_phi.z()));
        });
        const Stats sx = mean_std(ex), sy = mean_std(ey), sp = mean_std(epsi);
        rows.push_back({cell.jump, cell.test, n_runs, sx.mean, sx.std, sy.mean, sy.std, sp.mean,
                        sp.std});
    }
    return rows;
}

void write_region_csv(const std::string& path, const std::vector<RegionRow>& rows) {
    CsvWriter csv(path, {"x", "y", "landing_error", "pass"});
    for (const auto& r : rows) csv.row({r.x, r.y, r.landing_error, r.pass ? 1.0 : 0.0});
}

void write_avt_csv(const std::string& path, const std::vector<AvtRow>& rows) {
    CsvWriter csv(path, {"target_dist", "actual_dist", "failed"});
    for (const auto& r : rows) csv.row({r.target_dist, r.actual_dist, r.failed ? 1.0 : 0.0});
}

void write_height_csv(const std::string& path, const std::vector<HeightRow>& rows,
                      const std::string& z_column) {
    CsvWriter csv(path, {"x", "y", z_column});
    for (const auto& r : rows) csv.row({r.x, r.y, r.z});
}

void write_yaw_csv(const std::string& path, const std::vector<YawRow>& rows) {
    CsvWriter csv(path, {"yaw_cmd_deg", "yaw_err_deg"});
    for (const auto& r : rows) csv.row({r.yaw_cmd_deg, r.yaw_err_deg});
}

void write_robust_csv(const std::string& path, const std::vector<RobustRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "jump_type,test,runs,ex_mean,ex_std,ey_mean,ey_std,epsi_mean,epsi_std\n";
    for (const auto& r : rows) {
        out << r.jump_type << ',' << r.test << ',' << r.runs << ','
            << CsvWriter::format(r.ex_mean) << ',' << CsvWriter::format(r.ex_std) << ','
            << CsvWriter::format(r.ey_mean) << ',' << CsvWriter::format(r.ey_std) << ','
            << CsvWriter::format(r.epsi_mean) << ',' << CsvWriter::format(r.epsi_std) << '\n';
    }
}

void write_metadata(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& fields) {
    nlohmann::ordered_json j;
    for (const auto& [key, value] : fields) j[key] = value;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << '\n';
}

}  // namespace qj::eval
