#ifndef BVCSIM_AGENT_HPP
#define BVCSIM_AGENT_HPP

#include <cstdint>
#include <iosfwd>

#include "bvcsim/bvc.hpp"
#include "bvcsim/geometry.hpp"
#include "bvcsim/pcn.hpp"
#include "bvcsim/rng.hpp"
#include "bvcsim/sensor.hpp"

namespace bvcsim {

class TraceWriter;

struct WalkParams {
    int tau_w = 50;                  // forward steps between heading resamples
    double speed = 0.08;             // m per step
    double turn_sigma = kPi / 6.0;   // scheduled-turn spread, rad
    double body_radius = 0.25;       // m
    int exploration_steps = 15000;
    int sampling_steps = 30000;
    std::uint64_t seed = 1;

    void validate() const;
};

enum class WalkEvent { moved, collided_turn, scheduled_turn };

struct AgentState {
    Pose pose;
    int steps_since_turn = 0;
};

/// One random-walk control step. A blocked path triggers a uniform re-heading
/// without advancing; after tau_w clear steps the heading gets a Gaussian
/// nudge. The agent only advances along a heading whose look-ahead ray
/// (body_radius + speed) is clear, so it never crosses a surface.
WalkEvent walk_step(AgentState& state, const World& world, const WalkParams& params,
                    Rng& rng);

struct PhaseStats {
    long steps = 0;
    long collisions = 0;
    long scheduled_turns = 0;
};

/// Runs one phase of the control loop: walk, sense with the scanner the model
/// binds to (horizontal for the 2D model, spherical depth map otherwise),
/// compute BVC activations, advance the network, and append to the recorder
/// when given. Throws std::logic_error if the agent ever leaves the arena.
/// `progress` (optional) receives one status line every ~10% of the phase.
PhaseStats run_phase(const World& world, const BvcPopulation& model,
                     PlaceCellNetwork& net, AgentState& state,
                     const WalkParams& params, int n_steps, bool plasticity,
                     TraceWriter* recorder, Rng& rng,
                     std::ostream* progress = nullptr);

}  // namespace bvcsim

#endif
