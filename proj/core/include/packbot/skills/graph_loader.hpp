#pragma once

#include "packbot/skills/skill_graph.hpp"

#include <string>

namespace packbot::skills {

/// Parse and validate a skill-graph definition file (JSON; field names match
/// the element types). Throws std::runtime_error on parse problems and
/// GraphError on registration conflicts; files that fail validate() are
/// rejected with the diagnostics in the message.
SkillGraph load_skill_graph(const std::string& path);

SkillGraph parse_skill_graph(const std::string& json_text, const std::string& origin = "<memory>");

/// The graph shipped under data/skill_graphs/default.json, constructed in
/// code for tests and as the fallback when no file is given.
SkillGraph default_skill_graph();

}  // namespace packbot::skills
