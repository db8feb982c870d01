#include "nfsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nfsim/channel.hpp"

namespace nfsim {

namespace {

// Reflects p into [lo, hi] and flips v on each bounce.
void reflect_axis(double& p, double& v, double lo, double hi) {
    if (hi <= lo) {  // degenerate axis: pin position, keep it still
        p = lo;
        return;
    }
    // A step never exceeds a few region widths, so a short loop suffices.
    for (int guard = 0; guard < 64; ++guard) {
        if (p < lo) {
            p = lo + (lo - p);
            v = -v;
        } else if (p > hi) {
            p = hi - (p - hi);
            v = -v;
        } else {
            return;
        }
    }
    p = std::clamp(p, lo, hi);
}

void move_reflect(Position3& p, Position3& v, const WorldBounds& b, double dt) {
    p.x += v.x * dt;
    p.y += v.y * dt;
    p.z += v.z * dt;
    reflect_axis(p.x, v.x, b.lo.x, b.hi.x);
    reflect_axis(p.y, v.y, b.lo.y, b.hi.y);
    reflect_axis(p.z, v.z, b.lo.z, b.hi.z);
}

Position3 random_point(const WorldBounds& b, RandomStream& rng) {
    return {rng.uniform(b.lo.x, b.hi.x), rng.uniform(b.lo.y, b.hi.y),
            rng.uniform(b.lo.z, b.hi.z)};
}

Position3 random_planar_velocity(double speed, RandomStream& rng) {
    const double a = rng.uniform(0.0, 2.0 * M_PI);
    return {speed * std::cos(a), speed * std::sin(a), 0.0};
}

} // namespace

WorldState make_world(const WorldParams& params, RandomStream& rng) {
    WorldState w;
    w.ue_region = params.ue_region;
    w.blocker_region = params.blocker_region;
    w.view_lo = params.view_lo;
    w.view_hi = params.view_hi;

    w.ue_positions.reserve(params.num_ues);
    w.ue_velocities.reserve(params.num_ues);
    for (std::size_t k = 0; k < params.num_ues; ++k) {
        w.ue_positions.push_back(random_point(params.ue_region, rng));
        w.ue_velocities.push_back(random_planar_velocity(params.ue_speed, rng));
    }

    w.blockers.reserve(params.num_blockers);
    for (std::size_t i = 0; i < params.num_blockers; ++i) {
        Blocker b;
        b.center = random_point(params.blocker_region, rng);
        const double speed = rng.uniform(params.blocker_speed_min, params.blocker_speed_max);
        b.velocity = random_planar_velocity(speed, rng);
        b.half_extents = params.blocker_half_extents;
        w.blockers.push_back(b);
    }
    return w;
}

WorldState step_world(const WorldState& w, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("step_world: dt must be positive");
    WorldState out = w;
    out.time = w.time + dt;
    for (std::size_t k = 0; k < out.ue_positions.size(); ++k) {
        move_reflect(out.ue_positions[k], out.ue_velocities[k], out.ue_region, dt);
    }
    for (auto& b : out.blockers) {
        move_reflect(b.center, b.velocity, out.blocker_region, dt);
    }
    return out;
}

bool occlusion_test(const Position3& a, const Position3& b,
                    const std::vector<Blocker>& blockers) {
    const Position3 d = b - a;
    for (const auto& blk : blockers) {
        const Position3 lo = blk.center - blk.half_extents;
        const Position3 hi = blk.center + blk.half_extents;
        double t_min = 0.0;
        double t_max = 1.0;
        bool miss = false;
        const double ax[3] = {a.x, a.y, a.z};
        const double dx[3] = {d.x, d.y, d.z};
        const double lox[3] = {lo.x, lo.y, lo.z};
        const double hix[3] = {hi.x, hi.y, hi.z};
        for (int i = 0; i < 3 && !miss; ++i) {
            if (dx[i] == 0.0) {
                if (ax[i] < lox[i] || ax[i] > hix[i]) miss = true;
            } else {
                double t1 = (lox[i] - ax[i]) / dx[i];
                double t2 = (hix[i] - ax[i]) / dx[i];
                if (t1 > t2) std::swap(t1, t2);
                t_min = std::max(t_min, t1);
                t_max = std::min(t_max, t2);
                if (t_min > t_max) miss = true;
            }
        }
        if (!miss) return true;
    }
    return false;
}

int blockage_label(double pl_los_db, double pl_threshold_db) {
    return pl_los_db < pl_threshold_db ? 1 : 0;
}

namespace {

// Fraction of the cell [cx0,cx1]x[cy0,cy1] covered by the rect [rx0,rx1]x[ry0,ry1].
double cell_coverage(double cx0, double cx1, double cy0, double cy1,
                     double rx0, double rx1, double ry0, double ry1) {
    const double ox = std::max(0.0, std::min(cx1, rx1) - std::max(cx0, rx0));
    const double oy = std::max(0.0, std::min(cy1, ry1) - std::max(cy0, ry0));
    const double cell_area = (cx1 - cx0) * (cy1 - cy0);
    return cell_area > 0.0 ? (ox * oy) / cell_area : 0.0;
}

void splat_rect(std::vector<double>& frame, std::size_t h, std::size_t w,
                double vx0, double vy0, double sx, double sy,
                double rx0, double rx1, double ry0, double ry1, double intensity) {
    if (rx1 <= rx0 || ry1 <= ry0) return;
    const auto c0 = static_cast<long>(std::floor((rx0 - vx0) / sx));
    const auto c1 = static_cast<long>(std::floor((rx1 - vx0) / sx));
    const auto r0 = static_cast<long>(std::floor((ry0 - vy0) / sy));
    const auto r1 = static_cast<long>(std::floor((ry1 - vy0) / sy));
    for (long r = std::max(0L, r0); r <= std::min(static_cast<long>(h) - 1, r1); ++r) {
        const double cy0 = vy0 + static_cast<double>(r) * sy;
        for (long c = std::max(0L, c0); c <= std::min(static_cast<long>(w) - 1, c1); ++c) {
            const double cx0 = vx0 + static_cast<double>(c) * sx;
            const double cov = cell_coverage(cx0, cx0 + sx, cy0, cy0 + sy, rx0, rx1, ry0, ry1);
            auto& cell = frame[static_cast<std::size_t>(r) * w + static_cast<std::size_t>(c)];
            cell = std::min(1.0, std::max(cell, cov * intensity));
        }
    }
}

void rasterize(const WorldState& w, std::size_t h, std::size_t wd, std::vector<double>& frame) {
    const double vx0 = w.view_lo.x;
    const double vy0 = w.view_lo.y;
    const double sx = (w.view_hi.x - w.view_lo.x) / static_cast<double>(wd);
    const double sy = (w.view_hi.y - w.view_lo.y) / static_cast<double>(h);

    const std::size_t k_total = w.ue_positions.size();
    for (std::size_t k = 0; k < k_total; ++k) {
        // Intensities in (0.25, 0.5]; a lone UE renders at exactly 0.5.
        const double intensity =
            0.25 + 0.25 * static_cast<double>(k + 1) / static_cast<double>(k_total);
        const double hx = w.ue_marker_half_extent > 0.0 ? w.ue_marker_half_extent : sx / 2.0;
        const double hy = w.ue_marker_half_extent > 0.0 ? w.ue_marker_half_extent : sy / 2.0;
        const auto& p = w.ue_positions[k];
        splat_rect(frame, h, wd, vx0, vy0, sx, sy, p.x - hx, p.x + hx, p.y - hy, p.y + hy,
                   intensity);
    }
    for (const auto& b : w.blockers) {
        splat_rect(frame, h, wd, vx0, vy0, sx, sy, b.center.x - b.half_extents.x,
                   b.center.x + b.half_extents.x, b.center.y - b.half_extents.y,
                   b.center.y + b.half_extents.y, 1.0);
    }
}

} // namespace

FrameSequence render_frames(const WorldState& w, std::size_t f, std::size_t h,
                            std::size_t wd, double dt_frame) {
    if (f < 1 || h < 1 || wd < 1) throw std::invalid_argument("render_frames: empty grid");
    FrameSequence seq;
    seq.frames = f;
    seq.height = h;
    seq.width = wd;
    seq.values.assign(f * h * wd, 0.0);

    WorldState cur = w;
    for (std::size_t i = 0; i < f; ++i) {
        std::vector<double> frame(h * wd, 0.0);
        rasterize(cur, h, wd, frame);
        std::copy(frame.begin(), frame.end(), seq.values.begin() + static_cast<long>(i * h * wd));
        if (i + 1 < f) cur = step_world(cur, dt_frame);
    }
    return seq;
}

std::vector<int> world_blockage_bits(const WorldState& w, const DatasetParams& p) {
    std::vector<int> bits;
    bits.reserve(w.ue_positions.size());
    for (const auto& u : w.ue_positions) {
        const bool occluded = occlusion_test(p.bs_position, u, w.blockers);
        double pl = path_loss_db(distance(p.bs_position, u), p.wavelength);
        if (occluded) pl += p.attenuation_db;
        bits.push_back(blockage_label(pl, p.pl_threshold_db));
    }
    return bits;
}

std::vector<LabeledSample> make_dataset(const WorldState& w0, std::size_t n_samples,
                                        std::size_t horizon_macro, const DatasetParams& p) {
    if (n_samples < 1) throw std::invalid_argument("make_dataset: need at least one sample");
    if (horizon_macro < 1) throw std::invalid_argument("make_dataset: zero horizon");

    std::vector<LabeledSample> out;
    out.reserve(n_samples);
    WorldState w = w0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        LabeledSample sample;
        sample.frames = render_frames(w, p.frames, p.height, p.width, p.dt_frame);
        // The sequence's last frame sits (frames-1) intervals ahead of w.
        WorldState last = w;
        if (p.frames > 1) last = step_world(last, static_cast<double>(p.frames - 1) * p.dt_frame);
        sample.capture_time = last.time;
        WorldState at_label = step_world(last, static_cast<double>(horizon_macro) * p.macro_seconds);
        sample.labels = world_blockage_bits(at_label, p);
        out.push_back(std::move(sample));
        w = step_world(w, p.dt_frame);  // slide the window one frame
    }
    return out;
}

TimescaleClock::TimescaleClock(double tti_seconds, std::size_t n_macro)
    : tti_(tti_seconds), n_macro_(n_macro) {
    if (tti_seconds <= 0.0) throw std::invalid_argument("TimescaleClock: tti must be positive");
    if (n_macro < 1) throw std::invalid_argument("TimescaleClock: n_macro must be >= 1");
}

TimescaleClock::Tick TimescaleClock::at(std::size_t step) const {
    Tick t;
    t.step = step;
    t.time = static_cast<double>(step) * tti_;
    t.macro_boundary = is_macro_boundary(step);
    t.macro_index = step / n_macro_;
    return t;
}

double TimescaleClock::macro_period() const {
    return static_cast<double>(n_macro_) * tti_;
}

} // namespace nfsim
