#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "mnl/agent.hpp"

namespace mnl {

inline constexpr int kAgentFormatVersion = 1;

/// Text encoding of one unit's parameters:
///
///   unit <role> <arch> <hidden> <head activation>
///   <block name> <count> <v_1> ... <v_count>      (one line per block, layout_of order)
///   end
///
/// Values use 17 significant digits so a write/read cycle is bit exact.
void write_unit(std::ostream& out, std::string_view role, const Unit& unit);
Unit read_unit(std::istream& in, std::string_view expected_role);

/// Agent file: a `mnl-agent <version>` line, `arch`, `window`, `hidden`,
/// `seed` and `config_digest` lines, then the mpu and dpu unit sections.
std::string serialize_agent(const Agent& agent);
Agent deserialize_agent(std::string_view text);

void save_agent(const std::filesystem::path& path, const Agent& agent);
Agent load_agent(const std::filesystem::path& path);

}  // namespace mnl
