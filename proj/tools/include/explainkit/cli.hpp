#pragma once

#include <string>
#include <vector>

namespace explainkit::cli {

// Dispatches the toolkit subcommands; returns a process exit status.
int run(const std::vector<std::string>& args);

}  // namespace explainkit::cli
