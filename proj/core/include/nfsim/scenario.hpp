#pragma once

#include <cstddef>
#include <vector>

#include "nfsim/geometry.hpp"
#include "nfsim/random.hpp"

namespace nfsim {

// Axis-aligned moving box.
struct Blocker {
    Position3 center;
    Position3 velocity;      // m/s
    Position3 half_extents;  // meters, all positive
};

struct WorldBounds {
    Position3 lo;
    Position3 hi;
};

// Synthetic dynamic scene: UEs and blockers move linearly and reflect off
// their region walls. Evolution is fully deterministic after seeded
// construction; there is no per-step randomness.
struct WorldState {
    double time = 0.0;  // seconds, nondecreasing
    std::vector<Position3> ue_positions;
    std::vector<Position3> ue_velocities;
    std::vector<Blocker> blockers;
    WorldBounds ue_region;       // reflecting walls for UEs
    WorldBounds blocker_region;  // reflecting walls for blocker centers
    // Top-down view rectangle rendered into occupancy frames (x/y only).
    Position3 view_lo;
    Position3 view_hi;
    // Marker intensity for UE k: ue_intensity_lo + k-dependent step up to 0.5,
    // so identities are distinguishable from pixels (single UE renders at 0.5).
    double ue_marker_half_extent = 0.0;  // meters; 0 = one grid cell
};

struct WorldParams {
    WorldBounds ue_region;
    WorldBounds blocker_region;
    std::size_t num_ues = 1;
    std::size_t num_blockers = 0;
    double ue_speed = 1.0;
    double blocker_speed_min = 0.5;
    double blocker_speed_max = 2.0;
    Position3 blocker_half_extents{1.5, 1.5, 1.25};
    Position3 view_lo{-2.0, -30.0, 0.0};
    Position3 view_hi{58.0, 30.0, 0.0};
};

WorldState make_world(const WorldParams& params, RandomStream& rng);

// Linear motion with reflecting boundaries; preserves speeds exactly.
WorldState step_world(const WorldState& w, double dt);

// Segment a-b versus axis-aligned boxes (slab method, inclusive boundaries).
bool occlusion_test(const Position3& a, const Position3& b,
                    const std::vector<Blocker>& blockers);

// 1 when the measured LoS path loss is below the threshold (link available),
// 0 otherwise. Both arguments are positive-dB path losses.
int blockage_label(double pl_los_db, double pl_threshold_db);

// F frames of H x W occupancy values in [0, 1].
struct FrameSequence {
    std::size_t frames = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> values;  // frame-major, then row-major

    double at(std::size_t f, std::size_t r, std::size_t c) const {
        return values[(f * height + r) * width + c];
    }
    std::size_t frame_size() const { return height * width; }
};

// Top-down orthographic occupancy rendering: blocker footprints at intensity
// 1.0 scaled by exact cell coverage, UE markers at per-UE intensities in
// (0.25, 0.5], background 0. Frames are sampled forward in time every
// dt_frame from a copy of the world.
FrameSequence render_frames(const WorldState& w, std::size_t f, std::size_t h,
                            std::size_t wd, double dt_frame);

struct LabeledSample {
    FrameSequence frames;
    std::vector<int> labels;  // per UE: 1 = LoS available at the label time
    double capture_time = 0.0;
};

struct DatasetParams {
    Position3 bs_position;
    double wavelength = 0.0;
    double attenuation_db = 30.0;
    double pl_threshold_db = 84.0;
    double dt_frame = 1.0 / 6.5;
    double macro_seconds = 0.154;
    std::size_t frames = 10;
    std::size_t height = 32;
    std::size_t width = 32;
};

// Sliding-window dataset: the world rolls forward one frame interval per
// sample, and each label is the per-UE blockage status one macro-interval
// after the sample's last frame (horizon_macro intervals when > 1).
std::vector<LabeledSample> make_dataset(const WorldState& w0, std::size_t n_samples,
                                        std::size_t horizon_macro, const DatasetParams& p);

// Per-UE availability bits of a world snapshot under the dataset labeling rule.
std::vector<int> world_blockage_bits(const WorldState& w, const DatasetParams& p);

// Two-timescale schedule: micro ticks of tti seconds, macro boundaries every
// n_macro ticks.
class TimescaleClock {
public:
    TimescaleClock(double tti_seconds, std::size_t n_macro);

    struct Tick {
        std::size_t step = 0;
        double time = 0.0;
        bool macro_boundary = false;
        std::size_t macro_index = 0;
    };

    Tick at(std::size_t step) const;
    bool is_macro_boundary(std::size_t step) const { return step % n_macro_ == 0; }
    double macro_period() const;  // n_macro * tti, seconds
    double tti() const { return tti_; }
    std::size_t n_macro() const { return n_macro_; }

private:
    double tti_ = 0.0;
    std::size_t n_macro_ = 0;
};

} // namespace nfsim
