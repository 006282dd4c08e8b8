#pragma once

#include "finnet/network.hpp"
#include "finnet/quantum.hpp"
#include "finnet/types.hpp"

#include <vector>

namespace finnet {

// Exact distribution when each source independently fails with probability
// e_i and a party reports the failure outcome iff at least one of its attached
// sources failed. The ideal distribution must carry no failure labels; the
// output appends one failure label per party. At most 20 sources.
OutcomeDistribution overlay_distribution(const OutcomeDistribution& ideal,
                                         const NetworkGraph& graph,
                                         const RealVector& e);

// Heralded realization of the overlay: every source grows a flag qubit on each
// end, sending sqrt(1-e)|11>|ideal> + sqrt(e)|00>|junk>; every conclusive
// element is dressed with flag-1 projectors on all edges and the failure
// element absorbs the rest. junk_states (optional, one per source, arbitrary
// normalized payload vectors) default to |0...0>.
QuantumNetworkModel flag_qubit_model(const QuantumNetworkModel& ideal,
                                     const RealVector& e,
                                     const std::vector<Vector>& junk_states = {});

}  // namespace finnet
