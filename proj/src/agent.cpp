#include "bvcsim/agent.hpp"

#include <optional>
#include <ostream>
#include <stdexcept>

#include "bvcsim/metrics.hpp"
#include "bvcsim/recording.hpp"

namespace bvcsim {

void WalkParams::validate() const {
    if (tau_w < 1) throw std::invalid_argument("WalkParams: tau_w must be >= 1");
    if (!(speed > 0.0)) throw std::invalid_argument("WalkParams: speed must be positive");
    if (!(turn_sigma > 0.0)) throw std::invalid_argument("WalkParams: turn_sigma must be positive");
    if (body_radius < 0.0) throw std::invalid_argument("WalkParams: body_radius must be >= 0");
    if (exploration_steps < 0 || sampling_steps < 0) {
        throw std::invalid_argument("WalkParams: step counts must be >= 0");
    }
}

namespace {

bool path_blocked(const AgentState& state, const World& world, const WalkParams& params) {
    return collision_check(world, state.pose.sensor_origin(), state.pose.heading,
                           params.body_radius, params.speed);
}

void advance(AgentState& state, double speed) {
    state.pose.x += speed * std::cos(state.pose.heading);
    state.pose.y += speed * std::sin(state.pose.heading);
}

}  // namespace

WalkEvent walk_step(AgentState& state, const World& world, const WalkParams& params,
                    Rng& rng) {
    if (path_blocked(state, world, params)) {
        state.pose.heading = rng.uniform(-kPi, kPi);
        state.steps_since_turn = 0;
        return WalkEvent::collided_turn;
    }
    if (state.steps_since_turn >= params.tau_w) {
        state.pose.heading = wrap_angle(state.pose.heading + rng.normal(0.0, params.turn_sigma));
        state.steps_since_turn = 0;
        if (!path_blocked(state, world, params)) {
            advance(state, params.speed);
        }
        return WalkEvent::scheduled_turn;
    }
    advance(state, params.speed);
    ++state.steps_since_turn;
    return WalkEvent::moved;
}

PhaseStats run_phase(const World& world, const BvcPopulation& model,
                     PlaceCellNetwork& net, AgentState& state,
                     const WalkParams& params, int n_steps, bool plasticity,
                     TraceWriter* recorder, Rng& rng, std::ostream* progress) {
    params.validate();
    PhaseStats stats;
    const bool spherical = model.config().is_3d();
    const double max_range = model.config().d_max;
    const int report_every = n_steps >= 10 ? n_steps / 10 : 1;

    // Coverage tracking for progress lines only.
    std::optional<HexGrid> grid;
    std::vector<bool> visited;
    int visited_count = 0;
    if (progress) {
        grid.emplace(world.bounds(), 50, 50);
        visited.assign(grid->n_bins(), false);
    }

    for (int step = 0; step < n_steps; ++step) {
        const WalkEvent ev = walk_step(state, world, params, rng);
        if (ev == WalkEvent::collided_turn) ++stats.collisions;
        if (ev == WalkEvent::scheduled_turn) ++stats.scheduled_turns;
        if (!world.bounds().contains(state.pose.sensor_origin())) {
            throw std::logic_error("run_phase: agent left the arena (geometry bug)");
        }

        BoundaryPoints points;
        if (spherical) {
            const SphericalDepthMap map = scan_spherical(world, state.pose, max_range);
            points = depth_map_to_points(map, state.pose, world.spec().include_floor_in_scans);
        } else {
            const HorizontalScan scan = scan_horizontal(world, state.pose, max_range);
            points = horizontal_scan_to_points(scan, state.pose);
        }
        const std::vector<double> v_b = model.compute_activations(points);
        const std::vector<double>& v_p = net.step(v_b, plasticity);
        if (recorder) recorder->append(step, state.pose, v_p);
        ++stats.steps;

        if (progress) {
            const int bin = grid->bin_index(state.pose.x, state.pose.y);
            if (!visited[bin]) {
                visited[bin] = true;
                ++visited_count;
            }
            if ((step + 1) % report_every == 0) {
                int active = 0;
                for (double r : v_p) {
                    if (r > kRateSparsityFloor) ++active;
                }
                *progress << "  step " << (step + 1) << "/" << n_steps << "  coverage "
                          << (100.0 * visited_count / grid->n_bins()) << "%  active cells "
                          << (100.0 * active / net.n_p()) << "%\n";
            }
        }
    }
    return stats;
}

}  // namespace bvcsim
