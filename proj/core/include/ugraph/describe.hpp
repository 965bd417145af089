#pragma once

#include <string>

#include "ugraph/subgraph.hpp"

namespace ugraph {

// Five-section structured description of a subgraph. The overview line
// follows the exact template "This network contains {N} locations, with {C}
// center nodes and {E} connections." where N counts all included nodes, C
// the centers, and E the induced edges.
struct SubgraphDescription {
  std::string overview;
  std::string center_section;
  std::string nearby_section;
  std::string onehop_section;
  std::string connections_section;

  std::string full_text() const;
};

SubgraphDescription describe_subgraph(const Subgraph& s);

struct CaptionPrompt {
  std::string full_text;
  std::string schema_version;
};

// Caption-generation prompt with the description substituted into the
// {subgraph_desc} slot of the fixed template.
CaptionPrompt build_caption_prompt(const SubgraphDescription& d);

// The fixed template with the {subgraph_desc} placeholder still in place.
const std::string& caption_prompt_template();

inline constexpr const char* kCaptionPromptVersion = "1";

}  // namespace ugraph
