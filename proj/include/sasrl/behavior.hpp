#pragma once

#include "sasrl/agent.hpp"
#include "sasrl/mmrp.hpp"

namespace sasrl {

// Data-generating policy for buffer prefill and the k probe.
//   continuous: uniform over the action box.
//   coarse:     displacement environments draw from 8 compass directions at
//               the move limit; the slot machine from 4 timer levels per reel.
//   fine:       32 directions x 4 magnitudes, or 16 timer levels per reel.
Policy behavior_policy(Granularity granularity, const Env& env, Rng& rng);

// The discrete action set behind the coarse/fine policies (empty for
// continuous). Exposed for enumeration-style tests.
std::vector<ActionVec> discrete_action_set(Granularity granularity, const Env& env);

}  // namespace sasrl
