#pragma once

#include <stdexcept>

#include "qdag/answer.hpp"
#include "qdag/program.hpp"
#include "qdag/scene_graph.hpp"

namespace qdag {

/// Raised when a program has no well-defined answer on a scene graph
/// (empty open query, invalid anchor under an open query, ambiguous choose).
class UndefinedAnswer : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluates `p` over the scene graph under the closed-world assumption.
///
/// Localizers narrow the frame window: `before a` keeps frames before a's
/// start, `after a` frames after its end, `while a` its interval, and
/// `between a, b` the open gap between the earlier action's end and the
/// later one's start. A localizer anchored on an action absent from `g`
/// makes boolean bodies answer "no" and open bodies undefined.
///
/// First/Last pick the candidate whose earliest in-window frame is minimal
/// (maximal); Longest/Shortest compare full interval lengths. Ties
/// go to the lexicographically smallest label. Set-valued queries answer
/// with their sorted members joined by ", ".
Answer execute(const Program& p, const SceneGraph& g);

/// Window `p`'s localizer selects inside `outer`; nullopt for an invalid
/// anchor. Non-localized programs return `outer`.
std::optional<FrameWindow> localized_window(const Program& p, const SceneGraph& g,
                                            const FrameWindow& outer);

}  // namespace qdag
