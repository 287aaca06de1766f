#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace rdtu::cli {

/// Entry point of the `rdtu` tool.  `args` includes the program name.
/// Exit status: 0 on success, 1 on invalid input or I/O failure, 2 when an
/// evaluation grid had skipped cells.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Writes `content` to `path` through a temporary sibling file and a rename.
void write_atomically(const std::filesystem::path& path, std::string_view content);

}  // namespace rdtu::cli
