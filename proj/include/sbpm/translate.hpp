#pragma once

#include <string>

#include "sbpm/block.hpp"
#include "sbpm/model.hpp"
#include "sbpm/notation.hpp"

namespace sbpm {

/// Turns a block model into a process model.
///
/// The interaction layer maps subject blocks to subjects and channel blocks
/// or labeled arrows to channels. Each behavior layer (keyed by subject block
/// id) maps send/receive/action blocks to states, start/end flag blocks to the
/// flags of the activity they connect to, and connections or transition
/// blocks to transitions. Blocks are interpreted through the notation's
/// kind-to-construct mapping, so any notation mapped onto the S-BPM
/// constructs translates.
///
/// Block properties:
///   subject blocks        multiplicity=<n> (multi subjects, default 2)
///   channel blocks        <message id>=<payload keys, comma separated>
///   send blocks           to=<subject id>, message=<message id>
///   receive blocks        from.<subject id>=<message ids, comma separated>
///   action blocks         outcomes=<labels, comma separated> (default done)
///   transition blocks     guard=<label>
///   timeout blocks        duration=<logical time units>
///
/// Fails with the conformance violations, with AmbiguousDirection for docked
/// pairs whose order neither the flow convention nor an arrow determines, or
/// with the model's build violations.
Checked<ProcessModel> to_semantic_model(const LayeredDiagram& diagram,
                                        const NotationDefinition& notation,
                                        std::string model_id = "model",
                                        std::string model_name = {});

/// Interaction layer only; subjects get an empty behavior.
Checked<ProcessModel> to_semantic_model(const BlockDiagram& interaction,
                                        const NotationDefinition& notation,
                                        std::string model_id = "model",
                                        std::string model_name = {});

} // namespace sbpm
