#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ugraph/srp.hpp"

namespace ugraph {

// One training record; to_jsonl() emits the stage's JSON schema.
struct TrainingSample {
  int stage = 1;
  std::string pair_type;        // "stage1_image_only" / "stage2_fusion"
  std::string image_id;
  std::string image_ref;        // path recorded in the record
  std::string graph_ref;        // stage 2: the subgraph file
  std::string user_content;     // messages[0].content
  std::string positive_content; // stage 1 target text
  std::string summarization;    // stage 2 assistant/summarization text
  std::string image_coordinates;

  std::string to_jsonl() const;
};

inline constexpr const char* kStage1Instruction =
    "Describe if this viewpoint is reachable or the destination is reachable from the "
    "viewpoint.";

inline constexpr const char* kPathNotationNote =
    "Note on path notation: Triple indicates the decision point information in the path, "
    "the arrow '->' indicates the next step in the path, and parentheses (e.g., (50m, S)) "
    "immediately after a triple describe the distance and direction from the source to the "
    "target node.";

// Builds one record per annotated path. Stage 1 pairs the image with the
// rendered SRP text; stage 2 references the subgraph file and carries the
// notation note, a block describing every entity the path mentions, and the
// reachability summarization. Stage 2 without a subgraph reference is a
// config error.
std::vector<TrainingSample> emit_training_samples(const SpatialGraph& g,
                                                  const std::string& image_id,
                                                  const std::vector<AnnotatedPath>& paths,
                                                  const std::string& image_ref,
                                                  const std::optional<std::string>& subgraph_ref,
                                                  int stage);

// "{'id1': {'id': ..., 'category': ..., 'coordinates': ...}, ...}" block
// covering the image plus each entity named in the path's triples.
std::string relevant_entities_block(const SpatialGraph& g, const std::string& image_id,
                                    const AnnotatedPath& path);

}  // namespace ugraph
